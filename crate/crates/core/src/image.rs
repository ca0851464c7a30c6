//! Raw grayscale images and their on-disk forms: binary PGM (P5) and a raw
//! little-endian sample file with a `key=value` sidecar header.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::NormalizedImage;

pub const SUPPORTED_DEPTHS: [u8; 3] = [8, 12, 16];

/// Integer grayscale pixels with their nominal bit depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub depth: u8,
    pub pixels: Vec<u16>,
}

pub fn check_depth(depth: u32) -> Result<u8> {
    if SUPPORTED_DEPTHS.contains(&(depth as u8)) && depth <= 16 {
        Ok(depth as u8)
    } else {
        Err(Error::UnsupportedDepth(depth))
    }
}

fn depth_max(depth: u8) -> u32 {
    (1u32 << depth) - 1
}

impl GrayImage {
    pub fn new(width: usize, height: usize, depth: u8, pixels: Vec<u16>) -> Result<Self> {
        check_depth(depth as u32)?;
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::contract(format!(
                "image {width}x{height} with {} pixels",
                pixels.len()
            )));
        }
        let max = depth_max(depth);
        if let Some(&v) = pixels.iter().find(|&&v| v as u32 > max) {
            return Err(Error::PixelOutOfRange { value: v as u32, depth });
        }
        Ok(GrayImage {
            width,
            height,
            depth,
            pixels,
        })
    }

    /// Scales pixels into `[0, 1]` by `2^depth − 1`.
    pub fn normalize(&self) -> NormalizedImage {
        let scale = depth_max(self.depth) as f64;
        let pixels = self.pixels.iter().map(|&v| (v as f64 / scale) as f32).collect();
        NormalizedImage {
            height: self.height,
            width: self.width,
            depth: Some(self.depth),
            pixels,
        }
    }

    /// Maps `[0, 1]` values back to integers, rounding half away from zero
    /// and clamping to the depth's range.
    pub fn from_normalized(img: &NormalizedImage, depth: u8) -> Result<Self> {
        check_depth(depth as u32)?;
        let max = depth_max(depth) as f64;
        let pixels = img
            .pixels
            .iter()
            .map(|&v| (v as f64 * max).round().clamp(0.0, max) as u16)
            .collect();
        GrayImage::new(img.width, img.height, depth, pixels)
    }

    /// Overrides the recorded depth, checking that samples still fit.
    pub fn with_depth(self, depth: u8) -> Result<Self> {
        GrayImage::new(self.width, self.height, depth, self.pixels)
    }
}

/// Depth implied by a PGM maxval.
fn depth_for_maxval(maxval: u32) -> u8 {
    match maxval {
        0..=255 => 8,
        256..=4095 => 12,
        _ => 16,
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    let token = |pos: &mut usize| -> Result<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::ImageFormat("truncated PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = token(&mut pos)?;
    if magic != "P5" {
        return Err(Error::ImageFormat(format!("expected binary PGM (P5), found {magic:?}")));
    }
    let number = |pos: &mut usize, what: &str| -> Result<u32> {
        token(pos)?
            .parse::<u32>()
            .map_err(|_| Error::ImageFormat(format!("invalid PGM {what}")))
    };
    let width = number(&mut pos, "width")? as usize;
    let height = number(&mut pos, "height")? as usize;
    let maxval = number(&mut pos, "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::ImageFormat(format!("PGM maxval {maxval} out of range")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let sample_bytes = if maxval < 256 { 1 } else { 2 };
    let need = width * height * sample_bytes;
    let raster = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::ImageFormat("truncated PGM raster".into()))?;
    let pixels: Vec<u16> = if sample_bytes == 1 {
        raster.iter().map(|&b| b as u16).collect()
    } else {
        raster
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    if let Some(&v) = pixels.iter().find(|&&v| v as u32 > maxval) {
        return Err(Error::ImageFormat(format!("sample {v} exceeds maxval {maxval}")));
    }
    GrayImage::new(width, height, depth_for_maxval(maxval), pixels)
}

/// Binary PGM with maxval `2^depth − 1`; 16-bit samples are big-endian.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let maxval = depth_max(img.depth);
    let mut out = format!("P5\n{} {}\n{}\n", img.width, img.height, maxval).into_bytes();
    if maxval < 256 {
        out.extend(img.pixels.iter().map(|&v| v as u8));
    } else {
        for &v in &img.pixels {
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    out
}

/// Path of the sidecar header for a raw sample file: `<file>.hdr`.
pub fn sidecar_path(raw: &Path) -> PathBuf {
    let mut s = raw.as_os_str().to_owned();
    s.push(".hdr");
    PathBuf::from(s)
}

pub fn encode_sidecar(img: &GrayImage) -> String {
    format!("width={}\nheight={}\ndepth={}\n", img.width, img.height, img.depth)
}

/// Parses a raw sample buffer described by sidecar text. Depth-8 images use
/// one byte per sample, all others two bytes little-endian.
pub fn decode_raw(samples: &[u8], sidecar: &str) -> Result<GrayImage> {
    let (mut width, mut height, mut depth) = (None, None, None);
    for line in sidecar.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::ImageFormat(format!("bad sidecar line {line:?}")))?;
        let v: u32 = v
            .trim()
            .parse()
            .map_err(|_| Error::ImageFormat(format!("bad sidecar value in {line:?}")))?;
        match k.trim() {
            "width" => width = Some(v as usize),
            "height" => height = Some(v as usize),
            "depth" => depth = Some(v),
            _ => {}
        }
    }
    let missing = |k| Error::ImageFormat(format!("sidecar lacks {k}"));
    let width = width.ok_or_else(|| missing("width"))?;
    let height = height.ok_or_else(|| missing("height"))?;
    let depth = check_depth(depth.ok_or_else(|| missing("depth"))?)?;
    let sample_bytes = if depth == 8 { 1 } else { 2 };
    if samples.len() != width * height * sample_bytes {
        return Err(Error::ImageFormat(format!(
            "raw file has {} bytes, expected {}",
            samples.len(),
            width * height * sample_bytes
        )));
    }
    let pixels = if sample_bytes == 1 {
        samples.iter().map(|&b| b as u16).collect()
    } else {
        samples
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect()
    };
    GrayImage::new(width, height, depth, pixels)
}

pub fn encode_raw(img: &GrayImage) -> Vec<u8> {
    if img.depth == 8 {
        img.pixels.iter().map(|&v| v as u8).collect()
    } else {
        img.pixels.iter().flat_map(|v| v.to_le_bytes()).collect()
    }
}

fn is_raw(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("raw"))
}

/// Reads a `.raw` (with sidecar) or PGM file, picked by extension.
pub fn read_image(path: &Path) -> Result<GrayImage> {
    if is_raw(path) {
        let samples = fs::read(path)?;
        let sidecar = fs::read_to_string(sidecar_path(path))?;
        decode_raw(&samples, &sidecar)
    } else {
        decode_pgm(&fs::read(path)?)
    }
}

pub fn write_image(path: &Path, img: &GrayImage) -> Result<()> {
    if is_raw(path) {
        fs::write(path, encode_raw(img))?;
        fs::write(sidecar_path(path), encode_sidecar(img))?;
    } else {
        fs::write(path, encode_pgm(img))?;
    }
    Ok(())
}
