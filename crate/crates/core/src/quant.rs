//! Uniform latent quantization at a configurable bit length `n`.
//!
//! `float2int` maps `i ∈ [0,1]` to `round((2ⁿ−1)·i)` with ties away from
//! zero; `int2float` maps back with `g / (2ⁿ−1)`.

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

pub const MIN_BITS: u32 = 1;
pub const MAX_BITS: u32 = 16;

pub fn check_bits(n: u32) -> Result<()> {
    if (MIN_BITS..=MAX_BITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidBitLength(n))
    }
}

/// Largest code at bit length `n`, i.e. `2ⁿ − 1`.
#[inline]
pub fn max_code(n: u32) -> u32 {
    (1u32 << n) - 1
}

/// Quantizes one value. `value` must lie in `[0, 1]` and `n` in `1..=16`.
#[inline]
pub fn quantize_value(value: f64, n: u32) -> u16 {
    debug_assert!((0.0..=1.0).contains(&value));
    // f64::round rounds half away from zero
    (max_code(n) as f64 * value).round() as u16
}

#[inline]
pub fn dequantize_value(code: u16, n: u32) -> f64 {
    code as f64 / max_code(n) as f64
}

/// Integer latent code tensor, `channels × height × width` row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatentCode {
    bits: u32,
    channels: usize,
    height: usize,
    width: usize,
    values: Vec<u16>,
}

impl LatentCode {
    pub fn new(bits: u32, channels: usize, height: usize, width: usize, values: Vec<u16>) -> Result<Self> {
        check_bits(bits)?;
        if values.len() != channels * height * width {
            return Err(Error::contract(format!(
                "latent {channels}x{height}x{width} needs {} values, got {}",
                channels * height * width,
                values.len()
            )));
        }
        let max = max_code(bits);
        if let Some(v) = values.iter().find(|&&v| v as u32 > max) {
            return Err(Error::contract(format!("latent value {v} exceeds {bits}-bit range")));
        }
        Ok(LatentCode {
            bits,
            channels,
            height,
            width,
            values,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Quantizes a tensor with values in `[0, 1]` to `n`-bit integers.
pub fn float2int(input: &Tensor3, n: u32) -> Result<LatentCode> {
    check_bits(n)?;
    let mut values = Vec::with_capacity(input.len());
    for &v in input.data() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::contract(format!("quantizer input {v} outside [0, 1]")));
        }
        values.push(quantize_value(v as f64, n));
    }
    let (c, h, w) = input.dims();
    Ok(LatentCode {
        bits: n,
        channels: c,
        height: h,
        width: w,
        values,
    })
}

pub fn int2float(code: &LatentCode) -> Tensor3 {
    let data = code
        .values
        .iter()
        .map(|&g| dequantize_value(g, code.bits) as f32)
        .collect();
    Tensor3::new(code.channels, code.height, code.width, data).expect("latent dims are valid")
}
