//! Dump a MAMC container's header and latent statistics.
//!
//! ```bash
//! cargo run -p mamc --example inspect_container -- image.mamc
//! ```

use mamc::container::decode_latent;
use mamc::metrics::{bpp_report, distinct_values, latent_entropy};

fn main() {
    let path = std::env::args().nth(1).expect("usage: inspect_container <file.mamc>");
    let bytes = std::fs::read(&path).expect("read container");
    let (h, latent) = match decode_latent(&bytes) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(1);
        }
    };
    let (bpp, factor) = bpp_report(bytes.len(), h.width as usize, h.height as usize, h.depth);
    println!("image        {}x{} at {} bits", h.width, h.height, h.depth);
    println!("latent       {}x{}x{} at n={}", h.channels, h.rows, h.cols, h.bits);
    println!("weights      {:016x}", h.model_hash);
    println!("payload      {} bytes ({} symbols)", h.payload_len, h.symbol_count);
    println!("rate         {bpp:.4} bpp, factor {factor:.1}");
    println!(
        "entropy      {:.3} bits, {} distinct values",
        latent_entropy(&latent),
        distinct_values(&latent)
    );
}
