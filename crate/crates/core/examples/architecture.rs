//! Print the codec's layer table and parameter totals.

use mamc::build_architecture;

fn main() {
    let arch = build_architecture();
    println!(
        "{:<10} {:>5} {:>5} {:>6} {:>8} {:>9}  activation",
        "layer", "in", "out", "stride", "shuffle", "params"
    );
    for l in arch.layers() {
        let shuffle = l.shuffle.map_or("-".to_string(), |r| r.to_string());
        println!(
            "{:<10} {:>5} {:>5} {:>6} {:>8} {:>9}  {:?}",
            l.name,
            l.in_channels,
            l.out_channels,
            l.stride,
            shuffle,
            l.param_count(),
            l.activation
        );
    }
    println!("compressor parameters:   {}", arch.compressor_params());
    println!("decompressor parameters: {}", arch.decompressor_params());
}
