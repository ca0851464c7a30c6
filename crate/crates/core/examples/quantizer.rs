//! Quantization error and latent entropy across bit lengths.
//!
//! Runs the compressor once on a synthetic image, then quantizes its
//! analysis tensor at every supported `n`.

use mamc::metrics::latent_entropy;
use mamc::model::{compress_forward, pad_to_multiple};
use mamc::quant::{dequantize_value, float2int, max_code, MAX_BITS, MIN_BITS};
use mamc::{GrayImage, WeightBundle};

fn main() {
    let (w, h) = (128, 128);
    let pixels = (0..w * h)
        .map(|i| ((i % w) * 31 + (i / w) * 17) as u16 % 4096)
        .collect();
    let img = GrayImage::new(w, h, 12, pixels).unwrap();
    let (padded, _) = pad_to_multiple(&img.normalize(), 16);
    let analysis = compress_forward(&padded, &WeightBundle::fixture()).unwrap();

    println!(" n  max err / half step   entropy (bits)");
    for n in MIN_BITS..=MAX_BITS {
        let code = float2int(&analysis, n).unwrap();
        let half = 0.5 / max_code(n) as f64;
        let worst = analysis
            .data()
            .iter()
            .zip(code.values())
            .map(|(&i, &g)| (dequantize_value(g, n) - i as f64).abs())
            .fold(0.0, f64::max);
        println!("{n:>2}  {:>19.4}   {:>14.3}", worst / half, latent_entropy(&code));
    }
}
