//! Randomized properties of the metrics, quantizer and coder.

mod common;

use proptest::prelude::*;

use common::{laplace_code_bytes, ref_decode};
use mamc::entropy::{aac_decode, aac_encode};
use mamc::metrics::{latent_entropy, psnr, ssim};
use mamc::quant::{dequantize_value, max_code, quantize_value};
use mamc::{LatentCode, NormalizedImage};

fn image(h: usize, w: usize) -> impl Strategy<Value = NormalizedImage> {
    proptest::collection::vec(0.0f32..=1.0, h * w).prop_map(move |p| NormalizedImage::new(h, w, None, p).unwrap())
}

fn pair() -> impl Strategy<Value = (NormalizedImage, NormalizedImage)> {
    (11usize..40, 11usize..40).prop_flat_map(|(h, w)| (image(h, w), image(h, w)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ssim_is_symmetric_and_bounded((a, b) in pair()) {
        let (ab, ba) = (ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn psnr_falls_as_noise_grows(a in image(24, 24), seed in any::<u64>()) {
        let mut rng = mamc::model::XorShift64Star(seed | 1);
        let noise: Vec<f64> = (0..a.pixels.len()).map(|_| rng.next_f64() - 0.5).collect();
        let mut last = f64::INFINITY;
        for level in [0.01f64, 0.02, 0.05, 0.1, 0.2] {
            // reflect at the borders so clipping cannot reduce the error
            let px = a.pixels.iter().zip(&noise).map(|(&v, &n)| {
                let t = v as f64 + level * n;
                (if t < 0.0 { -t } else if t > 1.0 { 2.0 - t } else { t }) as f32
            }).collect();
            let b = NormalizedImage::new(24, 24, None, px).unwrap();
            let p = psnr(&a, &b).unwrap();
            prop_assert!(p < last, "level {level}: {p} !< {last}");
            last = p;
        }
    }

    #[test]
    fn entropy_is_between_zero_and_n(n in 1u32..=16, raw in proptest::collection::vec(any::<u16>(), 1..300)) {
        let vals: Vec<u16> = raw.iter().map(|&v| (v as u32 % (max_code(n) + 1)) as u16).collect();
        let len = vals.len();
        let h = latent_entropy(&LatentCode::new(n, 1, 1, len, vals).unwrap());
        prop_assert!(h >= 0.0 && h <= n as f64 + 1e-12);
    }

    #[test]
    fn quantizer_error_is_at_most_half_a_step(n in 1u32..=16, i in 0.0f32..=1.0) {
        let g = quantize_value(i as f64, n);
        prop_assert!((dequantize_value(g, n) - i as f64).abs() <= 0.5 / max_code(n) as f64);
    }

    #[test]
    fn coder_matches_reference_decoder(data in proptest::collection::vec(0u8..12, 0..3000)) {
        let payload = aac_encode(&data);
        prop_assert_eq!(ref_decode(&payload, data.len()), data.clone());
        prop_assert_eq!(aac_decode(&payload, data.len()).unwrap(), data);
    }
}

fn uniform_bytes(len: usize) -> Vec<u8> {
    let mut rng = mamc::model::XorShift64Star(0xB17E5);
    (0..len).map(|_| (rng.next_u64() >> 56) as u8).collect()
}

#[test]
fn uniform_random_bytes_cost_what_the_adaptive_model_predicts() {
    let data = uniform_bytes(4096);
    let payload = aac_encode(&data);
    assert_eq!(aac_decode(&payload, data.len()).unwrap(), data);
    let ideal = laplace_code_bytes(&data);
    assert!(
        payload.len() as f64 <= ideal + 8.0,
        "{} bytes vs ideal {ideal:.1}",
        payload.len()
    );
}

/// Fixed overhead bound of 16 bytes over the raw length. An order-0 model
/// that starts from uniform counts pays about log2 C(4096+255, 255) bits of
/// learning cost on such input, roughly 45 bytes, so this does not hold.
#[test]
#[ignore = "the learning cost of an adaptive order-0 model exceeds 16 bytes on uniform data"]
fn uniform_random_bytes_within_sixteen_bytes_of_raw() {
    let data = uniform_bytes(4096);
    let payload = aac_encode(&data);
    assert!(payload.len() <= 4096 + 16, "{} bytes", payload.len());
}

