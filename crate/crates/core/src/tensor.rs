//! Dense 3-D tensors and the handful of kernels the codec network needs:
//! zero-padded 3×3 convolution at stride 1 or 2, ReLU / clipped ReLU, and
//! sub-pixel shuffling.
//!
//! Values are stored as `f32`; every convolution accumulates in `f64` with a
//! fixed summation order, so results are bit-reproducible.

use std::ops::Range;

use crate::error::{Error, Result};

/// Channel-major (channel, row, column) feature map.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl Tensor3 {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::contract(format!(
                "tensor dims must be non-zero, got {channels}x{height}x{width}"
            )));
        }
        if data.len() != channels * height * width {
            return Err(Error::contract(format!(
                "tensor {channels}x{height}x{width} needs {} values, got {}",
                channels * height * width,
                data.len()
            )));
        }
        Ok(Tensor3 {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Result<Self> {
        Self::new(channels, height, width, vec![0.0; channels * height * width])
    }

    pub fn from_fn(
        channels: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(channels * height * width);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(c, y, x));
                }
            }
        }
        Self::new(channels, height, width, data)
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

    /// `(channels, height, width)`
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f32 {
        self.data[(c * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, c: usize, y: usize, x: usize, v: f32) {
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn plane(&self, c: usize) -> &[f32] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    pub(crate) fn view(&self) -> RowView<'_> {
        RowView {
            data: &self.data,
            channels: self.channels,
            first_row: 0,
            rows: self.height,
            height: self.height,
            width: self.width,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Activation {
    None,
    Relu,
    /// `min(1, max(0, v))`
    ClippedRelu1,
}

impl Activation {
    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::None => v,
            Activation::Relu => v.max(0.0),
            // max/min rather than clamp so NaN maps to 0
            #[allow(clippy::manual_clamp)]
            Activation::ClippedRelu1 => v.max(0.0).min(1.0),
        }
    }
}

/// A 3×3 convolution with bias, stride and pointwise activation.
///
/// `kernel` is laid out `(out, in, ky, kx)` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvLayer {
    pub name: String,
    pub in_channels: usize,
    pub out_channels: usize,
    pub stride: usize,
    pub activation: Activation,
    pub kernel: Vec<f32>,
    pub bias: Vec<f32>,
}

impl ConvLayer {
    pub fn new(
        name: impl Into<String>,
        in_channels: usize,
        out_channels: usize,
        stride: usize,
        activation: Activation,
        kernel: Vec<f32>,
        bias: Vec<f32>,
    ) -> Result<Self> {
        let name = name.into();
        if stride != 1 && stride != 2 {
            return Err(Error::contract(format!("{name}: stride must be 1 or 2, got {stride}")));
        }
        if in_channels == 0 || out_channels == 0 {
            return Err(Error::contract(format!("{name}: channel counts must be non-zero")));
        }
        if kernel.len() != out_channels * in_channels * 9 {
            return Err(Error::contract(format!(
                "{name}: kernel needs {} values, got {}",
                out_channels * in_channels * 9,
                kernel.len()
            )));
        }
        if bias.len() != out_channels {
            return Err(Error::contract(format!(
                "{name}: bias needs {out_channels} values, got {}",
                bias.len()
            )));
        }
        Ok(ConvLayer {
            name,
            in_channels,
            out_channels,
            stride,
            activation,
            kernel,
            bias,
        })
    }

    pub fn param_count(&self) -> usize {
        self.kernel.len() + self.bias.len()
    }
}

/// Output size along one axis for a 3×3 kernel with padding 1.
pub fn conv_output_dim(input: usize, stride: usize) -> usize {
    (input + 2 - 3) / stride + 1
}

/// Zero-padded 3×3 convolution followed by the layer's activation.
pub fn conv2d(input: &Tensor3, layer: &ConvLayer) -> Result<Tensor3> {
    check_conv_input(input.channels, layer)?;
    let out_h = conv_output_dim(input.height, layer.stride);
    let out_w = conv_output_dim(input.width, layer.stride);
    let data = conv_rows(&input.view(), layer, 0..out_h);
    Tensor3::new(layer.out_channels, out_h, out_w, data)
}

pub(crate) fn check_conv_input(channels: usize, layer: &ConvLayer) -> Result<()> {
    if channels != layer.in_channels {
        return Err(Error::contract(format!(
            "{}: expected {} input channels, got {channels}",
            layer.name, layer.in_channels
        )));
    }
    Ok(())
}

/// A horizontal band of a logical `channels × height × width` tensor.
///
/// Only rows `first_row..first_row + rows` are stored. Rows outside
/// `0..height` read as zero padding; reading any other missing row is a bug.
pub(crate) struct RowView<'a> {
    pub data: &'a [f32],
    pub channels: usize,
    pub first_row: usize,
    pub rows: usize,
    pub height: usize,
    pub width: usize,
}

impl RowView<'_> {
    #[inline]
    fn row(&self, c: usize, y: isize) -> Option<&[f32]> {
        if y < 0 || y as usize >= self.height {
            return None;
        }
        let y = y as usize;
        assert!(
            y >= self.first_row && y < self.first_row + self.rows,
            "row {y} not present in band"
        );
        let start = (c * self.rows + (y - self.first_row)) * self.width;
        Some(&self.data[start..start + self.width])
    }
}

const TILE_ROWS: usize = 4;
const TILE_COLS: usize = 64;

/// Computes output rows `out_rows` of `layer` applied to `view`, returning an
/// `out_channels × out_rows.len() × out_width` buffer.
pub(crate) fn conv_rows(view: &RowView<'_>, layer: &ConvLayer, out_rows: Range<usize>) -> Vec<f32> {
    debug_assert_eq!(view.channels, layer.in_channels);
    let s = layer.stride;
    let out_w = conv_output_dim(view.width, s);
    let band_h = out_rows.len();
    let in_ch = layer.in_channels;
    let mut out = vec![0f32; layer.out_channels * band_h * out_w];

    let mut pad: Vec<f64> = Vec::new();
    let mut acc: Vec<f64> = Vec::new();

    let mut ya = out_rows.start;
    while ya < out_rows.end {
        let yb = (ya + TILE_ROWS).min(out_rows.end);
        let th = yb - ya;
        let pad_rows = s * (th - 1) + 3;
        let mut xa = 0;
        while xa < out_w {
            let xb = (xa + TILE_COLS).min(out_w);
            let tw = xb - xa;
            let pad_cols = s * (tw - 1) + 3;

            // gather the zero-padded input window for every input channel
            pad.clear();
            pad.resize(in_ch * pad_rows * pad_cols, 0.0);
            let x0 = (s * xa) as isize - 1;
            for c in 0..in_ch {
                for r in 0..pad_rows {
                    let iy = (s * ya) as isize - 1 + r as isize;
                    let Some(src) = view.row(c, iy) else { continue };
                    let dst = &mut pad[(c * pad_rows + r) * pad_cols..][..pad_cols];
                    for (k, d) in dst.iter_mut().enumerate() {
                        let ix = x0 + k as isize;
                        if ix >= 0 && (ix as usize) < view.width {
                            *d = src[ix as usize] as f64;
                        }
                    }
                }
            }

            for o in 0..layer.out_channels {
                acc.clear();
                acc.resize(th * tw, layer.bias[o] as f64);
                for c in 0..in_ch {
                    let kbase = (o * in_ch + c) * 9;
                    let w: [f64; 9] = std::array::from_fn(|k| layer.kernel[kbase + k] as f64);
                    let plane = &pad[c * pad_rows * pad_cols..][..pad_rows * pad_cols];
                    for ty in 0..th {
                        let r0 = &plane[(s * ty) * pad_cols..][..pad_cols];
                        let r1 = &plane[(s * ty + 1) * pad_cols..][..pad_cols];
                        let r2 = &plane[(s * ty + 2) * pad_cols..][..pad_cols];
                        let acc_row = &mut acc[ty * tw..][..tw];
                        if s == 1 {
                            for (tx, a) in acc_row.iter_mut().enumerate() {
                                *a += tap9(&w, r0, r1, r2, tx);
                            }
                        } else {
                            for (tx, a) in acc_row.iter_mut().enumerate() {
                                *a += tap9(&w, r0, r1, r2, 2 * tx);
                            }
                        }
                    }
                }
                for ty in 0..th {
                    let orow = (o * band_h + (ya - out_rows.start + ty)) * out_w;
                    for tx in 0..tw {
                        out[orow + xa + tx] = layer.activation.apply(acc[ty * tw + tx]) as f32;
                    }
                }
            }
            xa = xb;
        }
        ya = yb;
    }
    out
}

#[inline(always)]
fn tap9(w: &[f64; 9], r0: &[f64], r1: &[f64], r2: &[f64], b: usize) -> f64 {
    w[0] * r0[b]
        + w[1] * r0[b + 1]
        + w[2] * r0[b + 2]
        + w[3] * r1[b]
        + w[4] * r1[b + 1]
        + w[5] * r1[b + 2]
        + w[6] * r2[b]
        + w[7] * r2[b + 1]
        + w[8] * r2[b + 2]
}

/// Rearranges `C·r² × H × W` into `C × H·r × W·r`:
/// `out[c, r·y + dy, r·x + dx] = in[c·r² + dy·r + dx, y, x]`.
pub fn pixel_shuffle(input: &Tensor3, r: usize) -> Result<Tensor3> {
    if r == 0 || !input.channels.is_multiple_of(r * r) {
        return Err(Error::contract(format!(
            "pixel_shuffle: {} channels not divisible by {}",
            input.channels,
            r * r
        )));
    }
    let oc = input.channels / (r * r);
    let (h, w) = (input.height, input.width);
    let (oh, ow) = (h * r, w * r);
    let mut out = vec![0f32; input.data.len()];
    for c in 0..oc {
        for dy in 0..r {
            for dx in 0..r {
                let src = input.plane(c * r * r + dy * r + dx);
                for y in 0..h {
                    let orow = (c * oh + r * y + dy) * ow;
                    for x in 0..w {
                        out[orow + r * x + dx] = src[y * w + x];
                    }
                }
            }
        }
    }
    Tensor3::new(oc, oh, ow, out)
}

/// Inverse of [`pixel_shuffle`].
pub fn pixel_unshuffle(input: &Tensor3, r: usize) -> Result<Tensor3> {
    if r == 0 || !input.height.is_multiple_of(r) || !input.width.is_multiple_of(r) {
        return Err(Error::contract(format!(
            "pixel_unshuffle: {}x{} not divisible by {r}",
            input.height, input.width
        )));
    }
    let (oh, ow) = (input.height / r, input.width / r);
    let oc = input.channels * r * r;
    let mut out = vec![0f32; input.data.len()];
    for c in 0..input.channels {
        for dy in 0..r {
            for dx in 0..r {
                let dst = &mut out[(c * r * r + dy * r + dx) * oh * ow..][..oh * ow];
                for y in 0..oh {
                    for x in 0..ow {
                        dst[y * ow + x] = input.get(c, r * y + dy, r * x + dx);
                    }
                }
            }
        }
    }
    Tensor3::new(oc, oh, ow, out)
}
