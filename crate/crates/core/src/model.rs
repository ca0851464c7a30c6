//! The fixed convolutional autoencoder: layer table, forward passes and the
//! MAMW weight interchange format.
//!
//! The compressor is four down-conv blocks (3×3 stride 1 then 3×3 stride 2,
//! both ReLU) followed by a 3×3 clipped-ReLU projection to 16 latent
//! channels, so it downsamples by 16. The decompressor mirrors it with a
//! 3×3 input layer and four up-conv blocks, each a 3×3 convolution followed
//! by a ×2 sub-pixel shuffle.

use crate::bytes::{fnv1a64, ByteReader};
use crate::error::{Error, Result};
use crate::tensor::{
    check_conv_input, conv2d, conv_output_dim, conv_rows, pixel_shuffle, Activation, ConvLayer, RowView, Tensor3,
};

/// Hidden feature width used throughout the network.
pub const HIDDEN_CHANNELS: usize = 64;
/// Channels of the latent code tensor.
pub const LATENT_CHANNELS: usize = 16;
/// Spatial downsampling factor of the compressor.
pub const DOWNSAMPLE: usize = 16;

pub const MAMW_MAGIC: [u8; 4] = *b"MAMW";
pub const MAMW_VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    pub name: &'static str,
    pub in_channels: usize,
    pub out_channels: usize,
    pub stride: usize,
    pub activation: Activation,
    /// Sub-pixel shuffle factor applied after the activation, if any.
    pub shuffle: Option<usize>,
}

impl LayerSpec {
    pub fn param_count(&self) -> usize {
        self.out_channels * self.in_channels * 9 + self.out_channels
    }

    pub fn kernel_dims(&self) -> [usize; 4] {
        [self.out_channels, self.in_channels, 3, 3]
    }
}

/// Ordered layer table of the codec network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArchitectureSpec {
    layers: Vec<LayerSpec>,
    compressor_len: usize,
}

impl ArchitectureSpec {
    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn compressor(&self) -> &[LayerSpec] {
        &self.layers[..self.compressor_len]
    }

    pub fn decompressor(&self) -> &[LayerSpec] {
        &self.layers[self.compressor_len..]
    }

    pub fn compressor_params(&self) -> usize {
        self.compressor().iter().map(LayerSpec::param_count).sum()
    }

    pub fn decompressor_params(&self) -> usize {
        self.decompressor().iter().map(LayerSpec::param_count).sum()
    }
}

/// Returns the canonical 14-layer table.
pub fn build_architecture() -> ArchitectureSpec {
    use Activation::{ClippedRelu1, Relu};
    let h = HIDDEN_CHANNELS;
    let l = |name, in_channels, out_channels, stride, activation, shuffle| LayerSpec {
        name,
        in_channels,
        out_channels,
        stride,
        activation,
        shuffle,
    };
    let layers = vec![
        l("enc.s1.c1", 1, h, 1, Relu, None),
        l("enc.s1.c2", h, h, 2, Relu, None),
        l("enc.s2.c1", h, h, 1, Relu, None),
        l("enc.s2.c2", h, h, 2, Relu, None),
        l("enc.s3.c1", h, h, 1, Relu, None),
        l("enc.s3.c2", h, h, 2, Relu, None),
        l("enc.s4.c1", h, h, 1, Relu, None),
        l("enc.s4.c2", h, h, 2, Relu, None),
        l("enc.out", h, LATENT_CHANNELS, 1, ClippedRelu1, None),
        l("dec.in", LATENT_CHANNELS, h, 1, Relu, None),
        l("dec.u1", h, 4 * h, 1, Relu, Some(2)),
        l("dec.u2", h, 4 * h, 1, Relu, Some(2)),
        l("dec.u3", h, 4 * h, 1, Relu, Some(2)),
        l("dec.u4", h, 4, 1, ClippedRelu1, Some(2)),
    ];
    ArchitectureSpec {
        layers,
        compressor_len: 9,
    }
}

/// The learnable parameters of every layer, in canonical order, plus the
/// FNV-1a hash of their MAMW serialization.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightBundle {
    layers: Vec<ConvLayer>,
    shuffles: Vec<Option<usize>>,
    hash: u64,
}

impl WeightBundle {
    /// Builds a bundle from `(kernel, bias)` pairs in canonical layer order.
    pub fn from_params(params: Vec<(Vec<f32>, Vec<f32>)>) -> Result<Self> {
        let arch = build_architecture();
        if params.len() != arch.layers().len() {
            return Err(Error::DimMismatch {
                layer: "<bundle>".into(),
                detail: format!("expected {} layers, got {}", arch.layers().len(), params.len()),
            });
        }
        let mut layers = Vec::with_capacity(params.len());
        for (spec, (kernel, bias)) in arch.layers().iter().zip(params) {
            if kernel.len() != spec.out_channels * spec.in_channels * 9 || bias.len() != spec.out_channels {
                return Err(Error::DimMismatch {
                    layer: spec.name.into(),
                    detail: format!(
                        "expected {} kernel / {} bias values, got {} / {}",
                        spec.out_channels * spec.in_channels * 9,
                        spec.out_channels,
                        kernel.len(),
                        bias.len()
                    ),
                });
            }
            layers.push(ConvLayer::new(
                spec.name,
                spec.in_channels,
                spec.out_channels,
                spec.stride,
                spec.activation,
                kernel,
                bias,
            )?);
        }
        let shuffles = arch.layers().iter().map(|l| l.shuffle).collect();
        let mut bundle = WeightBundle {
            layers,
            shuffles,
            hash: 0,
        };
        bundle.hash = fnv1a64(&bundle.to_bytes());
        Ok(bundle)
    }

    /// Deterministic pseudo-random weights for tests and demos.
    ///
    /// Values come from xorshift64* seeded with `0x9E3779B97F4A7C15`, mapped
    /// to `((out >> 11) / 2^53 - 0.5) * 0.2`, filling each layer's kernel and
    /// then its bias in canonical order.
    pub fn fixture() -> Self {
        let mut rng = XorShift64Star(0x9E37_79B9_7F4A_7C15);
        let params = build_architecture()
            .layers()
            .iter()
            .map(|spec| {
                let kernel = (0..spec.out_channels * spec.in_channels * 9)
                    .map(|_| rng.fixture_value())
                    .collect();
                let bias = (0..spec.out_channels).map(|_| rng.fixture_value()).collect();
                (kernel, bias)
            })
            .collect();
        Self::from_params(params).expect("fixture matches architecture")
    }

    pub fn layers(&self) -> &[ConvLayer] {
        &self.layers
    }

    pub fn layer(&self, name: &str) -> Option<&ConvLayer> {
        self.layers.iter().find(|l| l.name == name)
    }

    /// FNV-1a 64 of the serialized MAMW bytes.
    pub fn hash(&self) -> u64 {
        self.hash
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let total: usize = self.layers.iter().map(|l| 32 + 4 * l.param_count()).sum();
        let mut out = Vec::with_capacity(7 + total);
        out.extend_from_slice(&MAMW_MAGIC);
        out.push(MAMW_VERSION);
        out.extend_from_slice(&(self.layers.len() as u16).to_le_bytes());
        for l in &self.layers {
            out.push(l.name.len() as u8);
            out.extend_from_slice(l.name.as_bytes());
            out.push(4);
            for d in [l.out_channels, l.in_channels, 3, 3] {
                out.extend_from_slice(&(d as u32).to_le_bytes());
            }
            out.push(1);
            out.extend_from_slice(&(l.out_channels as u32).to_le_bytes());
            for v in l.kernel.iter().chain(&l.bias) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Parses MAMW bytes and validates them against the canonical architecture.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let arch = build_architecture();
        let mut r = ByteReader::new(bytes);
        let magic = r.array::<4>("magic")?;
        if magic != MAMW_MAGIC {
            return Err(Error::BadMagic {
                expected: MAMW_MAGIC,
                found: magic,
            });
        }
        let version = r.u8("version")?;
        if version != MAMW_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let count = r.u16("layer count")? as usize;
        if count != arch.layers().len() {
            return Err(Error::DimMismatch {
                layer: "<bundle>".into(),
                detail: format!("expected {} layers, found {count}", arch.layers().len()),
            });
        }
        let mut params = Vec::with_capacity(count);
        for spec in arch.layers() {
            let name_len = r.u8("layer name length")? as usize;
            let name = std::str::from_utf8(r.take(name_len, "layer name")?)
                .map_err(|_| Error::Malformed("layer name is not UTF-8".into()))?;
            if name != spec.name {
                return Err(Error::LayerOrder {
                    expected: spec.name.into(),
                    found: name.into(),
                });
            }
            let kernel_dims = read_dims(&mut r, spec.name)?;
            if kernel_dims != spec.kernel_dims() {
                return Err(Error::DimMismatch {
                    layer: spec.name.into(),
                    detail: format!("kernel dims {kernel_dims:?}, expected {:?}", spec.kernel_dims()),
                });
            }
            let bias_dims = read_dims(&mut r, spec.name)?;
            if bias_dims != [spec.out_channels] {
                return Err(Error::DimMismatch {
                    layer: spec.name.into(),
                    detail: format!("bias dims {bias_dims:?}, expected [{}]", spec.out_channels),
                });
            }
            let read_values = |r: &mut ByteReader<'_>, n: usize| -> Result<Vec<f32>> {
                let raw = r.take(4 * n, "weight values")?;
                Ok(raw
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                    .collect())
            };
            let kernel = read_values(&mut r, spec.out_channels * spec.in_channels * 9)?;
            let bias = read_values(&mut r, spec.out_channels)?;
            params.push((kernel, bias));
        }
        if r.remaining() != 0 {
            return Err(Error::Malformed(format!(
                "{} trailing bytes after last layer",
                r.remaining()
            )));
        }
        let bundle = Self::from_params(params)?;
        debug_assert_eq!(bundle.hash, fnv1a64(bytes));
        Ok(bundle)
    }

    /// Like [`from_bytes`](Self::from_bytes) but also requires the content
    /// hash to equal `expected`.
    pub fn from_bytes_expecting(bytes: &[u8], expected: u64) -> Result<Self> {
        let bundle = Self::from_bytes(bytes)?;
        if bundle.hash != expected {
            return Err(Error::HashMismatch {
                expected,
                actual: bundle.hash,
            });
        }
        Ok(bundle)
    }

    fn compressor(&self) -> &[ConvLayer] {
        &self.layers[..9]
    }

    fn decompressor(&self) -> impl Iterator<Item = (&ConvLayer, Option<usize>)> {
        self.layers[9..].iter().zip(self.shuffles[9..].iter().copied())
    }
}

fn read_dims(r: &mut ByteReader<'_>, layer: &str) -> Result<Vec<usize>> {
    let rank = r.u8("tensor rank")? as usize;
    if rank == 0 || rank > 4 {
        return Err(Error::DimMismatch {
            layer: layer.into(),
            detail: format!("invalid rank {rank}"),
        });
    }
    (0..rank).map(|_| r.u32("tensor dim").map(|d| d as usize)).collect()
}

/// xorshift64* generator used for fixture weights.
#[derive(Clone, Debug)]
pub struct XorShift64Star(pub u64);

impl XorShift64Star {
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn fixture_value(&mut self) -> f32 {
        ((self.next_f64() - 0.5) * 0.2) as f32
    }
}

/// A single-channel image with pixel values scaled into `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedImage {
    pub height: usize,
    pub width: usize,
    /// Bit depth of the source the values were scaled from, when known.
    pub depth: Option<u8>,
    pub pixels: Vec<f32>,
}

impl NormalizedImage {
    pub fn new(height: usize, width: usize, depth: Option<u8>, pixels: Vec<f32>) -> Result<Self> {
        if height == 0 || width == 0 || pixels.len() != height * width {
            return Err(Error::contract(format!(
                "image {height}x{width} with {} pixels",
                pixels.len()
            )));
        }
        if let Some(p) = pixels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::contract(format!("pixel {p} outside [0, 1]")));
        }
        Ok(NormalizedImage {
            height,
            width,
            depth,
            pixels,
        })
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f32 {
        self.pixels[y * self.width + x]
    }

    /// Crops to the top-left `height × width` region.
    pub fn crop(&self, height: usize, width: usize) -> Result<NormalizedImage> {
        if height == 0 || width == 0 || height > self.height || width > self.width {
            return Err(Error::contract(format!(
                "cannot crop {}x{} to {height}x{width}",
                self.height, self.width
            )));
        }
        let mut pixels = Vec::with_capacity(height * width);
        for y in 0..height {
            pixels.extend_from_slice(&self.pixels[y * self.width..][..width]);
        }
        Ok(NormalizedImage {
            height,
            width,
            depth: self.depth,
            pixels,
        })
    }
}

/// Zero-pads bottom and right up to the next multiples of `m`, returning the
/// padded image and the original `(height, width)`.
pub fn pad_to_multiple(img: &NormalizedImage, m: usize) -> (NormalizedImage, (usize, usize)) {
    let h = img.height.div_ceil(m) * m;
    let w = img.width.div_ceil(m) * m;
    let orig = (img.height, img.width);
    if (h, w) == orig {
        return (img.clone(), orig);
    }
    let mut pixels = vec![0f32; h * w];
    for y in 0..img.height {
        pixels[y * w..][..img.width].copy_from_slice(&img.pixels[y * img.width..][..img.width]);
    }
    (
        NormalizedImage {
            height: h,
            width: w,
            depth: img.depth,
            pixels,
        },
        orig,
    )
}

/// Output rows of the first down-conv block computed per band, so the
/// full-resolution 64-channel activation is never materialized.
const STAGE1_BAND: usize = 32;

/// Runs the compressor, producing the `16 × H/16 × W/16` analysis tensor.
pub fn compress_forward(img: &NormalizedImage, w: &WeightBundle) -> Result<Tensor3> {
    if !img.height.is_multiple_of(DOWNSAMPLE) || !img.width.is_multiple_of(DOWNSAMPLE) {
        return Err(Error::contract(format!(
            "image {}x{} is not padded to a multiple of {DOWNSAMPLE}",
            img.height, img.width
        )));
    }
    let layers = w.compressor();
    let (c1, c2) = (&layers[0], &layers[1]);
    check_conv_input(1, c1)?;
    check_conv_input(c1.out_channels, c2)?;

    let input = RowView {
        data: &img.pixels,
        channels: 1,
        first_row: 0,
        rows: img.height,
        height: img.height,
        width: img.width,
    };
    let out_h = conv_output_dim(img.height, c2.stride);
    let out_w = conv_output_dim(img.width, c2.stride);
    let mut stage = vec![0f32; c2.out_channels * out_h * out_w];
    let mut a = 0;
    while a < out_h {
        let b = (a + STAGE1_BAND).min(out_h);
        // rows of c1 output read by c2 for output rows a..b
        let r0 = (c2.stride * a).saturating_sub(1);
        let r1 = (c2.stride * (b - 1) + 2).min(img.height);
        let hidden = conv_rows(&input, c1, r0..r1);
        let view = RowView {
            data: &hidden,
            channels: c1.out_channels,
            first_row: r0,
            rows: r1 - r0,
            height: img.height,
            width: img.width,
        };
        let band = conv_rows(&view, c2, a..b);
        let band_len = (b - a) * out_w;
        for o in 0..c2.out_channels {
            stage[(o * out_h + a) * out_w..][..band_len].copy_from_slice(&band[o * band_len..][..band_len]);
        }
        a = b;
    }

    let mut x = Tensor3::new(c2.out_channels, out_h, out_w, stage)?;
    for layer in &layers[2..] {
        x = conv2d(&x, layer)?;
    }
    Ok(x)
}

/// Runs the decompressor on a dequantized latent tensor.
pub fn decompress_forward(latent: &Tensor3, w: &WeightBundle) -> Result<NormalizedImage> {
    if latent.channels() != LATENT_CHANNELS {
        return Err(Error::contract(format!(
            "latent has {} channels, expected {LATENT_CHANNELS}",
            latent.channels()
        )));
    }
    let mut layers = w.decompressor();
    let (first, _) = layers.next().expect("decompressor is non-empty");
    let mut x = conv2d(latent, first)?;
    for (layer, shuffle) in layers {
        x = conv2d(&x, layer)?;
        if let Some(r) = shuffle {
            x = pixel_shuffle(&x, r)?;
        }
    }
    let (c, h, wd) = x.dims();
    debug_assert_eq!(c, 1);
    Ok(NormalizedImage {
        height: h,
        width: wd,
        depth: None,
        pixels: x.into_data(),
    })
}
