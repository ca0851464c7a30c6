//! Score a reconstruction against its reference, e.g. the output of an
//! external codec.
//!
//! ```bash
//! cargo run -p mamc --example metrics -- reference.pgm decoded.pgm
//! ```
//!
//! Without arguments, scores a synthetic image against noisy copies of itself.

use mamc::model::XorShift64Star;
use mamc::{image::read_image, MetricsReport, NormalizedImage};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [reference, test] = args.as_slice() {
        let r = read_image(reference.as_ref()).expect("reference image");
        let t = read_image(test.as_ref()).expect("test image");
        let report = MetricsReport::quality(&r.normalize(), &t.normalize()).expect("matching dims");
        print!("{}", report.to_key_value());
        return;
    }

    let (h, w) = (96, 96);
    let clean: Vec<f32> = (0..h * w)
        .map(|i| {
            let (x, y) = ((i % w) as f32, (i / w) as f32);
            0.5 + 0.3 * (x * 0.1).sin() * (y * 0.07).cos()
        })
        .collect();
    let reference = NormalizedImage::new(h, w, None, clean.clone()).unwrap();
    let mut rng = XorShift64Star(3);
    println!("noise   psnr (dB)   ssim");
    for sigma in [0.0f32, 0.005, 0.01, 0.02, 0.05, 0.1] {
        let noisy = clean
            .iter()
            .map(|&v| (v + sigma * (rng.next_f64() as f32 - 0.5) * 3.46).clamp(0.0, 1.0))
            .collect();
        let test = NormalizedImage::new(h, w, None, noisy).unwrap();
        let m = MetricsReport::quality(&reference, &test).unwrap();
        println!("{sigma:<6}  {:>9.3}   {:.4}", m.psnr, m.ssim);
    }
}
