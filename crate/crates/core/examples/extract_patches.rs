//! Sample training patches from a directory of PGM / raw images.
//!
//! ```bash
//! cargo run -p mamc --example extract_patches -- images/ patches/ 100
//! ```
//!
//! Without arguments, builds a small synthetic input directory first.

use std::path::PathBuf;

use mamc::image::write_image;
use mamc::patches::extract_patches;
use mamc::GrayImage;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (input, output, count) = match args.as_slice() {
        [i, o, c] => (PathBuf::from(i), PathBuf::from(o), c.parse().expect("count")),
        _ => {
            let root = std::env::temp_dir().join("mamc-patch-demo");
            let input = root.join("images");
            std::fs::create_dir_all(&input).unwrap();
            for (k, name) in ["left.pgm", "right.pgm"].iter().enumerate() {
                let (w, h) = (300, 400);
                let px = (0..w * h)
                    .map(|i| {
                        let x = if k == 0 { i % w } else { w - 1 - i % w };
                        if x < 180 {
                            (600 + 9 * x + (i / w) % 50) as u16
                        } else {
                            0
                        }
                    })
                    .collect();
                write_image(&input.join(name), &GrayImage::new(w, h, 12, px).unwrap()).unwrap();
            }
            (input, root.join("patches"), 8)
        }
    };
    let report = extract_patches(&input, &output, count, 64, 0).expect("extraction");
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {} patches to {}", report.written.len(), output.display());
}
