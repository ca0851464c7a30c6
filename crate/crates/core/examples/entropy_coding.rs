//! Adaptive arithmetic coding of byte streams with different statistics.

use mamc::entropy::{aac_decode, aac_encode};
use mamc::model::XorShift64Star;

fn main() {
    let mut rng = XorShift64Star(7);
    let streams: Vec<(&str, Vec<u8>)> = vec![
        ("empty", vec![]),
        ("constant", vec![0x41; 1000]),
        ("uniform", (0..4096).map(|_| (rng.next_u64() >> 56) as u8).collect()),
        (
            "95% zeros",
            (0..4096)
                .map(|_| {
                    if rng.next_f64() < 0.95 {
                        0
                    } else {
                        (rng.next_u64() >> 56) as u8
                    }
                })
                .collect(),
        ),
        ("text", include_str!("entropy_coding.rs").bytes().collect()),
    ];
    println!("{:<10} {:>8} {:>8} {:>7}", "stream", "symbols", "payload", "ratio");
    for (name, data) in streams {
        let payload = aac_encode(&data);
        assert_eq!(aac_decode(&payload, data.len()).unwrap(), data);
        let ratio = if data.is_empty() {
            0.0
        } else {
            payload.len() as f64 / data.len() as f64
        };
        println!("{name:<10} {:>8} {:>8} {ratio:>7.3}", data.len(), payload.len());
    }
}
