//! The MAMC compressed-file format and the end-to-end pipelines.
//!
//! Layout (all integers little-endian, 50-byte header):
//!
//! | offset | size | field                         |
//! |-------:|-----:|-------------------------------|
//! | 0      | 4    | magic `"MAMC"`                |
//! | 4      | 1    | version (1)                   |
//! | 5      | 1    | flags (0)                     |
//! | 6      | 4    | original width                |
//! | 10     | 4    | original height               |
//! | 14     | 1    | original bit depth            |
//! | 15     | 1    | latent bit length `n`         |
//! | 16     | 2    | latent channels               |
//! | 18     | 4    | latent rows `k`               |
//! | 22     | 4    | latent columns `m`            |
//! | 26     | 8    | FNV-1a 64 of the MAMW weights |
//! | 34     | 8    | symbol count                  |
//! | 42     | 8    | payload length                |
//! | 50     | …    | arithmetic-coded payload      |

use crate::bytes::ByteReader;
use crate::entropy::{aac_decode, aac_encode, pack_bits, symbol_count, unpack_bits};
use crate::error::{Error, Result};
use crate::image::{check_depth, GrayImage};
use crate::model::{compress_forward, decompress_forward, pad_to_multiple, WeightBundle, DOWNSAMPLE, LATENT_CHANNELS};
use crate::quant::{check_bits, float2int, int2float, LatentCode};

pub const MAMC_MAGIC: [u8; 4] = *b"MAMC";
pub const MAMC_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainerHeader {
    pub width: u32,
    pub height: u32,
    pub depth: u8,
    pub bits: u8,
    pub channels: u16,
    pub rows: u32,
    pub cols: u32,
    pub model_hash: u64,
    pub symbol_count: u64,
    pub payload_len: u64,
}

impl ContainerHeader {
    /// Header for a `width × height` source coded at `bits` per latent value.
    pub fn for_image(width: u32, height: u32, depth: u8, bits: u8, model_hash: u64, payload_len: u64) -> Self {
        let rows = height.div_ceil(DOWNSAMPLE as u32);
        let cols = width.div_ceil(DOWNSAMPLE as u32);
        let channels = LATENT_CHANNELS as u16;
        ContainerHeader {
            width,
            height,
            depth,
            bits,
            channels,
            rows,
            cols,
            model_hash,
            symbol_count: symbol_count(channels as usize * rows as usize * cols as usize, bits as u32) as u64,
            payload_len,
        }
    }

    pub fn latent_dims(&self) -> (usize, usize, usize) {
        (self.channels as usize, self.rows as usize, self.cols as usize)
    }

    pub fn latent_len(&self) -> usize {
        self.channels as usize * self.rows as usize * self.cols as usize
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::CorruptContainer(m));
        if self.width == 0 || self.height == 0 {
            return bad(format!("image dims {}x{}", self.width, self.height));
        }
        if check_depth(self.depth as u32).is_err() {
            return bad(format!("bit depth {}", self.depth));
        }
        if check_bits(self.bits as u32).is_err() {
            return bad(format!("latent bit length {}", self.bits));
        }
        if self.channels as usize != LATENT_CHANNELS {
            return bad(format!("{} latent channels", self.channels));
        }
        let d = DOWNSAMPLE as u32;
        if self.rows != self.height.div_ceil(d) || self.cols != self.width.div_ceil(d) {
            return bad(format!(
                "latent {}x{} inconsistent with image {}x{}",
                self.rows, self.cols, self.height, self.width
            ));
        }
        let expected = symbol_count(self.latent_len(), self.bits as u32) as u64;
        if self.symbol_count != expected {
            return bad(format!("symbol count {} != {expected}", self.symbol_count));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAMC_MAGIC);
        out[4] = MAMC_VERSION;
        out[5] = 0;
        out[6..10].copy_from_slice(&self.width.to_le_bytes());
        out[10..14].copy_from_slice(&self.height.to_le_bytes());
        out[14] = self.depth;
        out[15] = self.bits;
        out[16..18].copy_from_slice(&self.channels.to_le_bytes());
        out[18..22].copy_from_slice(&self.rows.to_le_bytes());
        out[22..26].copy_from_slice(&self.cols.to_le_bytes());
        out[26..34].copy_from_slice(&self.model_hash.to_le_bytes());
        out[34..42].copy_from_slice(&self.symbol_count.to_le_bytes());
        out[42..50].copy_from_slice(&self.payload_len.to_le_bytes());
        out
    }
}

/// Serializes a header and payload. The header's payload length is taken
/// from `payload`.
pub fn write_container(header: &ContainerHeader, payload: &[u8]) -> Vec<u8> {
    let header = ContainerHeader {
        payload_len: payload.len() as u64,
        ..header.clone()
    };
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&header.to_bytes());
    out.extend_from_slice(payload);
    out
}

/// Parses and validates a container, returning the header and payload.
pub fn read_container(bytes: &[u8]) -> Result<(ContainerHeader, &[u8])> {
    let mut r = ByteReader::new(bytes);
    let magic = r.array::<4>("container magic")?;
    if magic != MAMC_MAGIC {
        return Err(Error::BadMagic {
            expected: MAMC_MAGIC,
            found: magic,
        });
    }
    let version = r.u8("container version")?;
    if version != MAMC_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let flags = r.u8("container flags")?;
    if flags != 0 {
        return Err(Error::CorruptContainer(format!("unknown flags {flags:#04x}")));
    }
    let header = ContainerHeader {
        width: r.u32("width")?,
        height: r.u32("height")?,
        depth: r.u8("depth")?,
        bits: r.u8("bit length")?,
        channels: r.u16("channels")?,
        rows: r.u32("latent rows")?,
        cols: r.u32("latent columns")?,
        model_hash: r.u64("model hash")?,
        symbol_count: r.u64("symbol count")?,
        payload_len: r.u64("payload length")?,
    };
    debug_assert_eq!(r.position(), HEADER_LEN);
    header.validate()?;
    if r.remaining() as u64 != header.payload_len {
        return Err(Error::CorruptContainer(format!(
            "payload length {} declared, {} present",
            header.payload_len,
            r.remaining()
        )));
    }
    Ok((header, &bytes[HEADER_LEN..]))
}

/// Everything produced while compressing one image.
#[derive(Clone, Debug)]
pub struct Compressed {
    pub header: ContainerHeader,
    pub latent: LatentCode,
    pub bytes: Vec<u8>,
}

impl Compressed {
    /// `8 · file size / pixel count`.
    pub fn bpp(&self) -> f64 {
        8.0 * self.bytes.len() as f64 / (self.header.width as f64 * self.header.height as f64)
    }
}

/// Normalizes, pads, encodes, quantizes to `bits`, packs and
/// arithmetic-codes one image.
pub fn compress_image(img: &GrayImage, weights: &WeightBundle, bits: u32) -> Result<Compressed> {
    check_bits(bits)?;
    // re-validate: the fields are public
    let img = GrayImage::new(img.width, img.height, img.depth, img.pixels.clone())?;
    let (padded, _) = pad_to_multiple(&img.normalize(), DOWNSAMPLE);
    let analysis = compress_forward(&padded, weights)?;
    let latent = float2int(&analysis, bits)?;
    let symbols = pack_bits(&latent);
    let payload = aac_encode(&symbols);
    let header = ContainerHeader::for_image(
        img.width as u32,
        img.height as u32,
        img.depth,
        bits as u8,
        weights.hash(),
        payload.len() as u64,
    );
    debug_assert_eq!(header.latent_dims(), latent.dims());
    debug_assert_eq!(header.symbol_count as usize, symbols.len());
    let bytes = write_container(&header, &payload);
    Ok(Compressed { header, latent, bytes })
}

/// Entropy-decodes and unpacks the latent code of a container without
/// running the network.
pub fn decode_latent(bytes: &[u8]) -> Result<(ContainerHeader, LatentCode)> {
    let (header, payload) = read_container(bytes)?;
    let symbols = aac_decode(payload, header.symbol_count as usize)?;
    let latent = unpack_bits(&symbols, header.latent_dims(), header.bits as u32)?;
    Ok((header, latent))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DecompressOptions {
    /// Decode even when the weights hash differs from the one recorded.
    pub force: bool,
}

#[derive(Clone, Debug)]
pub struct Decompressed {
    pub header: ContainerHeader,
    pub latent: LatentCode,
    pub image: GrayImage,
    /// False when decoding went ahead under `force` with mismatched weights.
    pub hash_matched: bool,
}

pub fn decompress_image(bytes: &[u8], weights: &WeightBundle, opts: DecompressOptions) -> Result<Decompressed> {
    let (header, latent) = decode_latent(bytes)?;
    let hash_matched = header.model_hash == weights.hash();
    if !hash_matched && !opts.force {
        return Err(Error::HashMismatch {
            expected: header.model_hash,
            actual: weights.hash(),
        });
    }
    let recon = decompress_forward(&int2float(&latent), weights)?;
    let cropped = recon.crop(header.height as usize, header.width as usize)?;
    let image = GrayImage::from_normalized(&cropped, header.depth)?;
    Ok(Decompressed {
        header,
        latent,
        image,
        hash_matched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> ContainerHeader {
        ContainerHeader::for_image(256, 256, 16, 2, 0x0123_4567_89ab_cdef, 0)
    }

    #[test]
    fn header_fields_for_256_square() {
        let h = header();
        assert_eq!((h.rows, h.cols, h.channels, h.bits), (16, 16, 16, 2));
        assert_eq!(h.symbol_count, 1024);
        assert_eq!(h.to_bytes().len(), HEADER_LEN);
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let payload = [1u8, 2, 3, 4, 5];
        let bytes = write_container(&header(), &payload);
        let (h, p) = read_container(&bytes).unwrap();
        assert_eq!(p, &payload);
        assert_eq!(h.payload_len, 5);
        assert_eq!(write_container(&h, p), bytes);
    }

    #[test]
    fn empty_payload_parses() {
        let bytes = write_container(&header(), &[]);
        assert_eq!(bytes.len(), HEADER_LEN);
        let (h, p) = read_container(&bytes).unwrap();
        assert!(p.is_empty());
        assert_eq!(h.payload_len, 0);
        // every valid header describes at least one symbol
        assert!(matches!(decode_latent(&bytes), Err(Error::CorruptStream(_))));
    }

    #[test]
    fn header_invariants_are_checked() {
        let mut h = header();
        h.symbol_count += 1;
        let bytes = write_container(&h, &[]);
        assert!(matches!(read_container(&bytes), Err(Error::CorruptContainer(_))));

        let mut h = header();
        h.rows = 17;
        assert!(matches!(
            read_container(&write_container(&h, &[])),
            Err(Error::CorruptContainer(_))
        ));

        let mut h = header();
        h.bits = 0;
        assert!(matches!(
            read_container(&write_container(&h, &[])),
            Err(Error::CorruptContainer(_))
        ));

        let mut bytes = write_container(&header(), &[9, 9]);
        bytes.pop();
        assert!(matches!(read_container(&bytes), Err(Error::CorruptContainer(_))));
        assert!(matches!(read_container(&bytes[..20]), Err(Error::Truncated(_))));

        let mut bytes = write_container(&header(), &[]);
        bytes[0] = b'X';
        assert!(matches!(read_container(&bytes), Err(Error::BadMagic { .. })));
        let mut bytes = write_container(&header(), &[]);
        bytes[4] = 9;
        assert!(matches!(read_container(&bytes), Err(Error::UnsupportedVersion(9))));
    }

    #[test]
    fn small_pipeline_round_trip() {
        let w = WeightBundle::fixture();
        let img = GrayImage::new(40, 20, 12, (0..800).map(|i| (i * 5 % 4096) as u16).collect()).unwrap();
        let c = compress_image(&img, &w, 6).unwrap();
        assert_eq!(c.header.latent_dims(), (16, 2, 3));
        let d = decompress_image(&c.bytes, &w, DecompressOptions::default()).unwrap();
        assert_eq!(d.latent, c.latent);
        assert_eq!((d.image.width, d.image.height, d.image.depth), (40, 20, 12));
        assert!(d.hash_matched);
    }

    #[test]
    fn hash_mismatch_needs_force() {
        let w = WeightBundle::fixture();
        let img = GrayImage::new(16, 16, 8, vec![100; 256]).unwrap();
        let c = compress_image(&img, &w, 4).unwrap();
        let other = WeightBundle::from_params(
            w.layers()
                .iter()
                .map(|l| (l.kernel.clone(), vec![0.0; l.bias.len()]))
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            decompress_image(&c.bytes, &other, DecompressOptions::default()),
            Err(Error::HashMismatch { .. })
        ));
        let d = decompress_image(&c.bytes, &other, DecompressOptions { force: true }).unwrap();
        assert!(!d.hash_matched);
    }

    #[test]
    fn input_errors() {
        let w = WeightBundle::fixture();
        let img = GrayImage {
            width: 16,
            height: 16,
            depth: 8,
            pixels: vec![300; 256],
        };
        assert!(matches!(
            compress_image(&img, &w, 4),
            Err(Error::PixelOutOfRange { .. })
        ));
        let img = GrayImage {
            width: 16,
            height: 16,
            depth: 10,
            pixels: vec![0; 256],
        };
        assert!(matches!(compress_image(&img, &w, 4), Err(Error::UnsupportedDepth(10))));
        let img = GrayImage::new(16, 16, 8, vec![0; 256]).unwrap();
        assert!(matches!(compress_image(&img, &w, 0), Err(Error::InvalidBitLength(0))));
    }
}
