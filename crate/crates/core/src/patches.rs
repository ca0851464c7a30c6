//! Random training-patch extraction.
//!
//! A candidate patch is kept only if more than half of its pixels are
//! non-zero, its normalized mean is neither 0 nor 1, and its variance is
//! positive.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::image::{read_image, write_image, GrayImage};

/// Tolerance for the "mean is 0 or 1" test on normalized values.
pub const MEAN_TOLERANCE: f64 = 1e-9;
/// Sampling attempts allowed per image, as a multiple of the requested count.
pub const ATTEMPTS_PER_PATCH: usize = 1000;

pub fn accept_patch(patch: &GrayImage) -> bool {
    let n = patch.pixels.len() as f64;
    let nonzero = patch.pixels.iter().filter(|&&v| v != 0).count() as f64;
    if nonzero <= 0.5 * n {
        return false;
    }
    let scale = ((1u32 << patch.depth) - 1) as f64;
    let mean = patch.pixels.iter().map(|&v| v as f64 / scale).sum::<f64>() / n;
    if mean.abs() <= MEAN_TOLERANCE || (mean - 1.0).abs() <= MEAN_TOLERANCE {
        return false;
    }
    // n²·variance in exact integer arithmetic
    let (sum, sum_sq) = patch
        .pixels
        .iter()
        .fold((0u128, 0u128), |(s, q), &v| (s + v as u128, q + (v as u128).pow(2)));
    patch.pixels.len() as u128 * sum_sq > sum * sum
}

pub fn crop_patch(img: &GrayImage, y: usize, x: usize, size: usize) -> GrayImage {
    let mut pixels = Vec::with_capacity(size * size);
    for row in y..y + size {
        pixels.extend_from_slice(&img.pixels[row * img.width + x..][..size]);
    }
    GrayImage {
        width: size,
        height: size,
        depth: img.depth,
        pixels,
    }
}

/// `(source name, top row, left column, patch)`.
pub type SampledPatch = (String, usize, usize, GrayImage);

#[derive(Clone, Debug, Default)]
pub struct PatchReport {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Samples up to `count` accepted `size × size` patches from `images`.
///
/// Images are visited round-robin, one uniformly placed candidate per visit.
/// An image is retired after `ATTEMPTS_PER_PATCH × count` candidates.
pub fn sample_patches(
    images: &[(String, GrayImage)],
    count: usize,
    size: usize,
    seed: u64,
) -> (Vec<SampledPatch>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut warnings = Vec::new();
    let mut live: Vec<(usize, usize)> = Vec::new();
    for (i, (name, img)) in images.iter().enumerate() {
        if img.width < size || img.height < size {
            warnings.push(format!(
                "{name}: {}x{} is smaller than the {size}x{size} patch, skipped",
                img.width, img.height
            ));
        } else {
            live.push((i, 0));
        }
    }
    let cap = ATTEMPTS_PER_PATCH.saturating_mul(count);
    let mut out = Vec::with_capacity(count);
    let mut cursor = 0;
    while out.len() < count && !live.is_empty() {
        cursor %= live.len();
        let (idx, attempts) = &mut live[cursor];
        let (name, img) = &images[*idx];
        let y = rng.gen_range(0..=img.height - size);
        let x = rng.gen_range(0..=img.width - size);
        let patch = crop_patch(img, y, x, size);
        *attempts += 1;
        let exhausted = *attempts >= cap;
        if accept_patch(&patch) {
            out.push((name.clone(), y, x, patch));
        }
        if exhausted {
            warnings.push(format!("{name}: no further acceptable patches after {cap} attempts"));
            live.remove(cursor);
        } else {
            cursor += 1;
        }
    }
    if out.len() < count {
        warnings.push(format!(
            "only {} of {count} requested patches could be extracted",
            out.len()
        ));
    }
    (out, warnings)
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "pgm" | "raw"))
}

/// Reads every PGM / raw image in `input_dir` (sorted by file name), samples
/// patches and writes them as `patch_NNNNNN.pgm` into `output_dir`.
pub fn extract_patches(
    input_dir: &Path,
    output_dir: &Path,
    count: usize,
    size: usize,
    seed: u64,
) -> Result<PatchReport> {
    let mut paths: Vec<PathBuf> = fs::read_dir(input_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_image(p))
        .collect();
    paths.sort();

    let mut report = PatchReport::default();
    let mut images = Vec::with_capacity(paths.len());
    for p in &paths {
        let name = p.file_name().unwrap_or_default().to_string_lossy().into_owned();
        match read_image(p) {
            Ok(img) => images.push((name, img)),
            Err(e) => report.warnings.push(format!("{name}: unreadable ({e}), skipped")),
        }
    }

    let (patches, warnings) = sample_patches(&images, count, size, seed);
    report.warnings.extend(warnings);
    fs::create_dir_all(output_dir)?;
    for (i, (_, _, _, patch)) in patches.iter().enumerate() {
        let path = output_dir.join(format!("patch_{i:06}.pgm"));
        write_image(&path, patch)?;
        report.written.push(path);
    }
    Ok(report)
}
