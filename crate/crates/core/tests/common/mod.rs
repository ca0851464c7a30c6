//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the library's coder or metric code paths; each
//! routine is a deliberately plain transcription of the format or formula.

#![allow(dead_code)]

use mamc::GrayImage;

pub mod golden;

/// Bit-at-a-time packing of `bits`-wide values, MSB first, zero padded.
pub fn ref_pack(values: &[u16], bits: u32) -> Vec<u8> {
    let mut stream: Vec<bool> = Vec::new();
    for &v in values {
        for b in (0..bits).rev() {
            stream.push((v >> b) & 1 == 1);
        }
    }
    bools_to_bytes(&stream)
}

fn bools_to_bytes(stream: &[bool]) -> Vec<u8> {
    stream
        .chunks(8)
        .map(|c| {
            c.iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
        })
        .collect()
}

/// Plain adaptive model: linear scans, no trees.
struct RefModel {
    freq: Vec<u64>,
}

impl RefModel {
    fn new() -> Self {
        RefModel { freq: vec![1; 256] }
    }
    fn total(&self) -> u64 {
        self.freq.iter().sum()
    }
    fn cum(&self, s: usize) -> (u64, u64) {
        let lo: u64 = self.freq[..s].iter().sum();
        (lo, lo + self.freq[s])
    }
    fn bump(&mut self, s: usize) {
        self.freq[s] += 1;
        if self.total() >= 65536 {
            for f in &mut self.freq {
                *f = f.div_ceil(2);
            }
        }
    }
}

const Q1: u64 = 0x4000_0000;
const Q2: u64 = 0x8000_0000;
const Q3: u64 = 0xC000_0000;

pub fn ref_encode(symbols: &[u8]) -> Vec<u8> {
    if symbols.is_empty() {
        return Vec::new();
    }
    let mut model = RefModel::new();
    let (mut low, mut high) = (0u64, 0xFFFF_FFFFu64);
    let mut follow = 0usize;
    let mut out: Vec<bool> = Vec::new();
    let put = |out: &mut Vec<bool>, follow: &mut usize, bit: bool| {
        out.push(bit);
        out.extend(std::iter::repeat_n(!bit, *follow));
        *follow = 0;
    };
    for &s in symbols {
        let total = model.total();
        let (cl, ch) = model.cum(s as usize);
        let range = high - low + 1;
        high = low + range * ch / total - 1;
        low += range * cl / total;
        loop {
            if high < Q2 {
                put(&mut out, &mut follow, false);
            } else if low >= Q2 {
                put(&mut out, &mut follow, true);
                low -= Q2;
                high -= Q2;
            } else if low >= Q1 && high < Q3 {
                follow += 1;
                low -= Q1;
                high -= Q1;
            } else {
                break;
            }
            low *= 2;
            high = high * 2 + 1;
        }
        model.bump(s as usize);
    }
    follow += 1;
    put(&mut out, &mut follow, low >= Q1);
    bools_to_bytes(&out)
}

pub fn ref_decode(payload: &[u8], count: usize) -> Vec<u8> {
    if count == 0 {
        return Vec::new();
    }
    let bit = |i: usize| -> u64 { payload.get(i / 8).map_or(0, |b| ((b >> (7 - i % 8)) & 1) as u64) };
    let mut model = RefModel::new();
    let (mut low, mut high) = (0u64, 0xFFFF_FFFFu64);
    let mut value = 0u64;
    let mut pos = 0;
    for _ in 0..32 {
        value = value * 2 + bit(pos);
        pos += 1;
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let total = model.total();
        let range = high - low + 1;
        let target = ((value - low + 1) * total - 1) / range;
        let s = (0..256).find(|&s| model.cum(s).1 > target).unwrap();
        let (cl, ch) = model.cum(s);
        high = low + range * ch / total - 1;
        low += range * cl / total;
        loop {
            if high < Q2 {
            } else if low >= Q2 {
                low -= Q2;
                high -= Q2;
                value -= Q2;
            } else if low >= Q1 && high < Q3 {
                low -= Q1;
                high -= Q1;
                value -= Q1;
            } else {
                break;
            }
            low *= 2;
            high = high * 2 + 1;
            value = value * 2 + bit(pos);
            pos += 1;
        }
        model.bump(s);
        out.push(s as u8);
    }
    out
}

/// Ideal code length in bytes of an adaptive Laplace (count-1 initialized)
/// model over 256 symbols, ignoring rescaling.
pub fn laplace_code_bytes(symbols: &[u8]) -> f64 {
    fn ln_gamma_int(n: u64) -> f64 {
        (1..n).map(|k| (k as f64).ln()).sum()
    }
    let mut counts = [0u64; 256];
    for &s in symbols {
        counts[s as usize] += 1;
    }
    let n = symbols.len() as u64;
    let nats = ln_gamma_int(n + 256) - ln_gamma_int(256) - counts.iter().map(|&c| ln_gamma_int(c + 1)).sum::<f64>();
    nats / std::f64::consts::LN_2 / 8.0
}

pub fn ref_psnr(a: &[f32], b: &[f32]) -> f64 {
    let mut s = 0.0f64;
    for i in 0..a.len() {
        s += (a[i] as f64 - b[i] as f64).powi(2);
    }
    10.0 * (1.0 / (s / a.len() as f64)).log10()
}

/// Mean SSIM with an explicit 2-D Gaussian window evaluated at every
/// fully-contained 11×11 position.
pub fn ref_ssim(a: &[f32], b: &[f32], h: usize, w: usize) -> f64 {
    let mut win = [[0.0f64; 11]; 11];
    let mut z = 0.0;
    for (i, row) in win.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(di * di + dj * dj) / (2.0 * 1.5 * 1.5)).exp();
            z += *v;
        }
    }
    let (c1, c2) = (0.0001, 0.0009);
    let mut acc = 0.0;
    let mut n = 0usize;
    for y in 0..=h - 11 {
        for x in 0..=w - 11 {
            let (mut ma, mut mb) = (0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let wt = win[i][j] / z;
                    ma += wt * a[(y + i) * w + x + j] as f64;
                    mb += wt * b[(y + i) * w + x + j] as f64;
                }
            }
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let wt = win[i][j] / z;
                    let da = a[(y + i) * w + x + j] as f64 - ma;
                    let db = b[(y + i) * w + x + j] as f64 - mb;
                    va += wt * da * da;
                    vb += wt * db * db;
                    cov += wt * da * db;
                }
            }
            acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            n += 1;
        }
    }
    acc / n as f64
}

/// Soft elliptical "breast" over a black background with fine texture.
pub fn synthetic_image(width: usize, height: usize, depth: u8) -> GrayImage {
    let max = ((1u32 << depth) - 1) as f64;
    let (cx, cy) = (0.0, height as f64 * 0.5);
    let (rx, ry) = (width as f64 * 0.8, height as f64 * 0.45);
    let pixels = (0..width * height)
        .map(|i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            let d = ((x - cx) / rx).powi(2) + ((y - cy) / ry).powi(2);
            if d >= 1.0 {
                return 0;
            }
            let v = 0.15 + 0.6 * (1.0 - d) + 0.05 * ((x * 0.3).sin() * (y * 0.23).cos());
            (v.clamp(0.0, 1.0) * max).round() as u16
        })
        .collect();
    GrayImage::new(width, height, depth, pixels).unwrap()
}
