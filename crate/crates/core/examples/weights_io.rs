//! Write the deterministic fixture weights as a MAMW file and read it back.
//!
//! ```bash
//! cargo run -p mamc --example weights_io -- fixture.mamw
//! ```

use mamc::WeightBundle;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "fixture.mamw".into());
    let w = WeightBundle::fixture();
    let bytes = w.to_bytes();
    std::fs::write(&path, &bytes).expect("write weights");

    let back = WeightBundle::from_bytes_expecting(&std::fs::read(&path).unwrap(), w.hash()).expect("reload");
    println!(
        "{path}: {} bytes, {} layers, hash {:016x}",
        bytes.len(),
        back.layers().len(),
        back.hash()
    );
    for l in back.layers() {
        println!(
            "  {:<10} kernel {}x{}x3x3  bias {}",
            l.name,
            l.out_channels,
            l.in_channels,
            l.bias.len()
        );
    }
}
