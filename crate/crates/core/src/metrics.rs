//! Rate–distortion measurements: pSNR, SSIM, latent entropy and bits per
//! pixel. Quality metrics work on `[0, 1]`-normalized pixels (peak 1).

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::NormalizedImage;
use crate::quant::{max_code, LatentCode};

fn same_dims(a: &NormalizedImage, b: &NormalizedImage) -> Result<()> {
    if (a.height, a.width) != (b.height, b.width) {
        return Err(Error::contract(format!(
            "image dims differ: {}x{} vs {}x{}",
            a.height, a.width, b.height, b.width
        )));
    }
    Ok(())
}

pub fn mse(reference: &NormalizedImage, test: &NormalizedImage) -> Result<f64> {
    same_dims(reference, test)?;
    let sum: f64 = reference
        .pixels
        .iter()
        .zip(&test.pixels)
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    Ok(sum / reference.pixels.len() as f64)
}

/// `10·log₁₀(1 / MSE)` in dB; `f64::INFINITY` for identical images.
pub fn psnr(reference: &NormalizedImage, test: &NormalizedImage) -> Result<f64> {
    let mse = mse(reference, test)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-10.0 * mse.log10())
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
pub fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let c = (SSIM_WINDOW / 2) as f64;
    let mut taps: [f64; SSIM_WINDOW] =
        std::array::from_fn(|i| (-((i as f64 - c).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp());
    let s: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= s);
    taps
}

/// Valid-region separable Gaussian filter of a `h × w` plane.
fn filter_valid(plane: &[f64], h: usize, w: usize, taps: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut rows = vec![0.0; h * ow];
    for y in 0..h {
        let src = &plane[y * w..][..w];
        for x in 0..ow {
            rows[y * ow + x] = taps.iter().zip(&src[x..]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps.iter().enumerate().map(|(k, t)| t * rows[(y + k) * ow + x]).sum();
        }
    }
    out
}

/// Mean SSIM over all fully-contained 11×11 Gaussian windows (σ = 1.5,
/// K₁ = 0.01, K₂ = 0.03, L = 1).
pub fn ssim(reference: &NormalizedImage, test: &NormalizedImage) -> Result<f64> {
    same_dims(reference, test)?;
    let (h, w) = (reference.height, reference.width);
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::contract(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {h}x{w}"
        )));
    }
    let taps = gaussian_taps();
    let x: Vec<f64> = reference.pixels.iter().map(|&v| v as f64).collect();
    let y: Vec<f64> = test.pixels.iter().map(|&v| v as f64).collect();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
    let [mx, my, sxx, syy, sxy] = [&x, &y, &xx, &yy, &xy].map(|p| filter_valid(p, h, w, &taps));

    let (c1, c2) = (K1 * K1, K2 * K2);
    let n = mx.len();
    let mut total = 0.0;
    for i in 0..n {
        let (ux, uy) = (mx[i], my[i]);
        let vx = sxx[i] - ux * ux;
        let vy = syy[i] - uy * uy;
        let cov = sxy[i] - ux * uy;
        total += ((2.0 * ux * uy + c1) * (2.0 * cov + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
    }
    Ok(total / n as f64)
}

/// Shannon entropy in bits of the latent's value histogram.
pub fn latent_entropy(code: &LatentCode) -> f64 {
    let hist = histogram(code);
    let n = code.len() as f64;
    hist.iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Occurrence count of every code value `0..2ⁿ`.
pub fn histogram(code: &LatentCode) -> Vec<u64> {
    let mut hist = vec![0u64; max_code(code.bits()) as usize + 1];
    for &v in code.values() {
        hist[v as usize] += 1;
    }
    hist
}

/// Number of distinct values that occur in the latent.
pub fn distinct_values(code: &LatentCode) -> usize {
    histogram(code).iter().filter(|&&c| c > 0).count()
}

/// `(bpp, compression factor)` for a file of `file_len` bytes describing a
/// `width × height` image of the given source depth.
pub fn bpp_report(file_len: usize, width: usize, height: usize, depth: u8) -> (f64, f64) {
    let bpp = 8.0 * file_len as f64 / (width as f64 * height as f64);
    (bpp, depth as f64 / bpp)
}

/// Metrics for one reference/test pair. Rate fields are present when the
/// test image came from a container.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(serialize_with = "ser_db", deserialize_with = "de_db")]
    pub psnr: f64,
    pub ssim: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bpp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compression_factor: Option<f64>,
}

fn ser_db<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

fn de_db<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Db {
        Num(f64),
        Text(String),
    }
    match Db::deserialize(d)? {
        Db::Num(v) => Ok(v),
        Db::Text(t) => match t.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => Err(serde::de::Error::custom(format!("invalid dB value {t:?}"))),
        },
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v}")
    }
}

impl MetricsReport {
    pub fn quality(reference: &NormalizedImage, test: &NormalizedImage) -> Result<Self> {
        Ok(MetricsReport {
            psnr: psnr(reference, test)?,
            ssim: ssim(reference, test)?,
            entropy: None,
            bits: None,
            bpp: None,
            compression_factor: None,
        })
    }

    /// One `key=value` line per field.
    pub fn to_key_value(&self) -> String {
        let mut out = format!("psnr={}\nssim={}\n", fmt_value(self.psnr), fmt_value(self.ssim));
        if let Some(h) = self.entropy {
            out += &format!("entropy={}\n", fmt_value(h));
        }
        if let Some(n) = self.bits {
            out += &format!("bits={n}\n");
        }
        if let Some(b) = self.bpp {
            out += &format!("bpp={}\n", fmt_value(b));
        }
        if let Some(f) = self.compression_factor {
            out += &format!("compression_factor={}\n", fmt_value(f));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(format!("metrics report: {e}")))
    }
}
