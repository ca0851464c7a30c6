//! MAMW weight files written by hand, the way an external trainer would.

use mamc::model::{build_architecture, LayerSpec};
use mamc::{fnv1a64, Error, WeightBundle};

/// Serializes one layer per spec, letting `dims` override the declared
/// kernel shape. Values are `value(layer_index, element_index)`.
fn write_mamw(
    specs: &[LayerSpec],
    dims: impl Fn(&LayerSpec) -> [u32; 4],
    value: impl Fn(usize, usize) -> f32,
) -> Vec<u8> {
    let mut out = b"MAMW\x01".to_vec();
    out.extend((specs.len() as u16).to_le_bytes());
    for (li, s) in specs.iter().enumerate() {
        let d = dims(s);
        out.push(s.name.len() as u8);
        out.extend(s.name.bytes());
        out.push(4);
        d.iter().for_each(|v| out.extend(v.to_le_bytes()));
        out.push(1);
        out.extend(d[0].to_le_bytes());
        let n = (d[0] * d[1] * 9 + d[0]) as usize;
        (0..n).for_each(|i| out.extend(value(li, i).to_le_bytes()));
    }
    out
}

fn canonical(s: &LayerSpec) -> [u32; 4] {
    [s.out_channels as u32, s.in_channels as u32, 3, 3]
}

#[test]
fn hand_written_file_loads_and_hashes() {
    let arch = build_architecture();
    let bytes = write_mamw(arch.layers(), canonical, |l, i| {
        (l as f32) * 0.01 - (i % 7) as f32 * 1e-3
    });
    let w = WeightBundle::from_bytes(&bytes).unwrap();
    assert_eq!(w.hash(), fnv1a64(&bytes));
    assert_eq!(w.to_bytes(), bytes);
    assert_eq!(
        w.layer("dec.u4").map(|l| l.bias.len()),
        arch.layers().last().map(|l| l.out_channels)
    );
    assert!(WeightBundle::from_bytes_expecting(&bytes, fnv1a64(&bytes)).is_ok());
    assert!(matches!(
        WeightBundle::from_bytes_expecting(&bytes, 1),
        Err(Error::HashMismatch { expected: 1, .. })
    ));
}

#[test]
fn wrong_latent_width_is_a_dim_mismatch() {
    let arch = build_architecture();
    let bytes = write_mamw(
        arch.layers(),
        |s| {
            if s.name == "enc.out" {
                [17, 64, 3, 3]
            } else {
                canonical(s)
            }
        },
        |_, _| 0.0,
    );
    match WeightBundle::from_bytes(&bytes) {
        Err(Error::DimMismatch { layer, .. }) => assert_eq!(layer, "enc.out"),
        other => panic!("expected a dim mismatch, got {other:?}"),
    }
}

#[test]
fn truncated_and_padded_files_are_rejected() {
    let bytes = WeightBundle::fixture().to_bytes();
    assert!(matches!(
        WeightBundle::from_bytes(&bytes[..bytes.len() - 3]),
        Err(Error::Truncated(_))
    ));
    let mut long = bytes.clone();
    long.push(0);
    assert!(matches!(WeightBundle::from_bytes(&long), Err(Error::Malformed(_))));
    let mut v2 = bytes;
    v2[4] = 2;
    assert!(matches!(
        WeightBundle::from_bytes(&v2),
        Err(Error::UnsupportedVersion(2))
    ));
}

#[test]
fn fixture_hash_is_stable() {
    assert_eq!(WeightBundle::fixture().hash(), 0x0e98_3d89_af91_aa1d);
}
