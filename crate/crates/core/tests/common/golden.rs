//! Definitions of the frozen `.mamc` fixtures in `tests/fixtures`.

use std::path::PathBuf;

use mamc::container::{write_container, ContainerHeader};
use mamc::model::XorShift64Star;
use mamc::{GrayImage, LatentCode, WeightBundle};

use super::{ref_encode, ref_pack, synthetic_image};

pub struct Golden {
    pub name: &'static str,
    pub header: ContainerHeader,
    pub latent: LatentCode,
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn synthetic_case(
    name: &'static str,
    width: u32,
    height: u32,
    depth: u8,
    bits: u32,
    f: impl Fn(usize) -> u16,
) -> Golden {
    let header = ContainerHeader::for_image(width, height, depth, bits as u8, WeightBundle::fixture().hash(), 0);
    let (c, k, m) = header.latent_dims();
    let values = (0..c * k * m).map(f).collect();
    Golden {
        name,
        header,
        latent: LatentCode::new(bits, c, k, m, values).unwrap(),
    }
}

/// The two hand-built latents. The third fixture is the full pipeline on
/// `pipeline_source()`.
pub fn synthetic_cases() -> Vec<Golden> {
    let mut rng = XorShift64Star(0x5EED);
    let skewed: Vec<u16> = (0..16 * 3 * 5)
        .map(|_| {
            let r = rng.next_u64();
            if r % 10 < 7 {
                2048 + (r >> 40) as u16 % 8
            } else {
                (r >> 20) as u16 & 0xFFF
            }
        })
        .collect();
    vec![
        synthetic_case("golden_n2.mamc", 32, 48, 12, 2, |i| ((i * 7 + i / 6) % 4) as u16),
        synthetic_case("golden_n12.mamc", 80, 40, 16, 12, |i| skewed[i]),
    ]
}

pub fn pipeline_source() -> GrayImage {
    synthetic_image(48, 64, 12)
}

pub const PIPELINE_FIXTURE: &str = "golden_pipeline_n6.mamc";
pub const PIPELINE_BITS: u32 = 6;

pub fn reference_container(g: &Golden) -> Vec<u8> {
    let payload = ref_encode(&ref_pack(g.latent.values(), g.latent.bits()));
    write_container(&g.header, &payload)
}
