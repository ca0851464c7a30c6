//! Compress and decompress a synthetic 12-bit image with the fixture weights,
//! then report rate and quality at several latent bit lengths.
//!
//! ```bash
//! cargo run -p mamc --example roundtrip -- 512 384
//! ```

use std::time::Instant;

use mamc::metrics::{latent_entropy, psnr, ssim};
use mamc::{compress_image, decompress_image, DecompressOptions, GrayImage, WeightBundle};

/// A smooth blob on a dark background with a little texture.
fn synthetic(width: usize, height: usize) -> GrayImage {
    let (cx, cy) = (width as f64 * 0.4, height as f64 * 0.5);
    let r = width.min(height) as f64 * 0.45;
    let pixels = (0..width * height)
        .map(|i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() / r;
            let tissue = if d < 1.0 { 2600.0 * (1.0 - d * d) + 300.0 } else { 0.0 };
            let texture = 120.0 * ((x * 0.21).sin() * (y * 0.17).cos());
            (tissue + if d < 1.0 { texture } else { 0.0 }).clamp(0.0, 4095.0) as u16
        })
        .collect();
    GrayImage::new(width, height, 12, pixels).unwrap()
}

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("dimension"));
    let width = args.next().unwrap_or(256);
    let height = args.next().unwrap_or(256);

    let weights = WeightBundle::fixture();
    let img = synthetic(width, height);
    println!("image {width}x{height}, 12-bit, weights hash {:016x}", weights.hash());

    for bits in [2, 6, 10, 14] {
        let t = Instant::now();
        let packed = compress_image(&img, &weights, bits).unwrap();
        let t_enc = t.elapsed();
        let t = Instant::now();
        let back = decompress_image(&packed.bytes, &weights, DecompressOptions::default()).unwrap();
        let t_dec = t.elapsed();
        assert_eq!(back.latent, packed.latent);

        let (a, b) = (img.normalize(), back.image.normalize());
        println!(
            "n={bits:2}  bytes={:6}  bpp={:.4}  factor={:7.1}  H={:.3}  psnr={:.2} dB  ssim={:.4}  enc={:?} dec={:?}",
            packed.bytes.len(),
            packed.bpp(),
            12.0 / packed.bpp(),
            latent_entropy(&packed.latent),
            psnr(&a, &b).unwrap(),
            ssim(&a, &b).unwrap(),
            t_enc,
            t_dec,
        );
    }
}
