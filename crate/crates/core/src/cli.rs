//! Command-line front end shared by the `mamc` binary and its tests.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::container::{compress_image, decode_latent, decompress_image, DecompressOptions};
use crate::error::{Error, Result};
use crate::image::{check_depth, read_image, write_image, GrayImage};
use crate::metrics::{bpp_report, distinct_values, histogram, latent_entropy, MetricsReport};
use crate::model::WeightBundle;
use crate::patches::extract_patches;

#[derive(Debug, Parser)]
#[command(
    name = "mamc",
    version,
    about = "Autoencoder codec for high-bit-depth grayscale images"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a PGM or raw image into a MAMC container
    Compress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        /// Bits per latent value
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
        bits: u32,
        #[arg(long)]
        output: PathBuf,
        /// Source bit depth, overriding the one implied by the file
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Reconstruct an image from a MAMC container
    Decompress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Decode even if the weights differ from those used to compress
        #[arg(long)]
        force: bool,
    },
    /// Score a reconstruction against its reference
    Metrics {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        depth: Option<u32>,
        /// Emit JSON instead of key=value lines
        #[arg(long)]
        json: bool,
        /// Container the test image was decoded from; adds rate fields
        #[arg(long)]
        container: Option<PathBuf>,
    },
    /// Sample training patches from a directory of images
    ExtractPatches {
        #[arg(long)]
        input_dir: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(16..))]
        size: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Decode a container's latent code and report its statistics
    LatentStats {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print a container's header
    Info {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 3,
        Error::HashMismatch { .. } => 5,
        Error::Contract(_)
        | Error::InvalidBitLength(_)
        | Error::UnsupportedDepth(_)
        | Error::PixelOutOfRange { .. } => 6,
        _ => 4,
    }
}

/// Parses `args` and runs the command, writing reports to `out` and
/// diagnostics to `err`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load_weights(path: &Path) -> Result<WeightBundle> {
    WeightBundle::from_bytes(&fs::read(path)?)
}

fn load_image(path: &Path, depth: Option<u32>) -> Result<GrayImage> {
    let img = read_image(path)?;
    match depth {
        Some(d) => img.with_depth(check_depth(d)?),
        None => Ok(img),
    }
}

pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Compress {
            input,
            weights,
            bits,
            output,
            depth,
        } => {
            let img = load_image(&input, depth)?;
            let w = load_weights(&weights)?;
            let c = compress_image(&img, &w, bits)?;
            fs::write(&output, &c.bytes)?;
            let (bpp, factor) = bpp_report(c.bytes.len(), img.width, img.height, img.depth);
            writeln!(out, "bytes={}", c.bytes.len())?;
            writeln!(out, "bpp={bpp}")?;
            writeln!(out, "compression_factor={factor}")?;
        }
        Command::Decompress {
            input,
            weights,
            output,
            force,
        } => {
            let bytes = fs::read(&input)?;
            let w = load_weights(&weights)?;
            let d = decompress_image(&bytes, &w, DecompressOptions { force })?;
            if !d.hash_matched {
                writeln!(
                    err,
                    "warning: weights hash {:016x} differs from container's {:016x}; decoded anyway",
                    w.hash(),
                    d.header.model_hash
                )?;
            }
            write_image(&output, &d.image)?;
            let (bpp, factor) = bpp_report(bytes.len(), d.image.width, d.image.height, d.image.depth);
            writeln!(out, "width={}", d.image.width)?;
            writeln!(out, "height={}", d.image.height)?;
            writeln!(out, "bpp={bpp}")?;
            writeln!(out, "compression_factor={factor}")?;
        }
        Command::Metrics {
            reference,
            test,
            depth,
            json,
            container,
        } => {
            let r = load_image(&reference, depth)?;
            let t = load_image(&test, depth)?;
            let mut report = MetricsReport::quality(&r.normalize(), &t.normalize())?;
            if let Some(path) = container {
                let bytes = fs::read(&path)?;
                let (header, latent) = decode_latent(&bytes)?;
                let (bpp, factor) = bpp_report(bytes.len(), header.width as usize, header.height as usize, r.depth);
                report.entropy = Some(latent_entropy(&latent));
                report.bits = Some(header.bits as u32);
                report.bpp = Some(bpp);
                report.compression_factor = Some(factor);
            }
            if json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                write!(out, "{}", report.to_key_value())?;
            }
        }
        Command::ExtractPatches {
            input_dir,
            count,
            size,
            seed,
            output_dir,
        } => {
            let report = extract_patches(&input_dir, &output_dir, count, size as usize, seed)?;
            for w in &report.warnings {
                writeln!(err, "warning: {w}")?;
            }
            writeln!(out, "written={}", report.written.len())?;
        }
        Command::LatentStats { input } => {
            let bytes = fs::read(&input)?;
            let (header, latent) = decode_latent(&bytes)?;
            writeln!(out, "bits={}", header.bits)?;
            writeln!(out, "elements={}", latent.len())?;
            writeln!(out, "entropy={}", latent_entropy(&latent))?;
            writeln!(out, "distinct={}", distinct_values(&latent))?;
            for (value, count) in histogram(&latent).iter().enumerate().filter(|(_, &c)| c > 0) {
                writeln!(out, "hist.{value}={count}")?;
            }
        }
        Command::Info { input } => {
            let bytes = fs::read(&input)?;
            let (h, _) = crate::container::read_container(&bytes)?;
            writeln!(out, "width={}", h.width)?;
            writeln!(out, "height={}", h.height)?;
            writeln!(out, "depth={}", h.depth)?;
            writeln!(out, "bits={}", h.bits)?;
            writeln!(out, "channels={}", h.channels)?;
            writeln!(out, "rows={}", h.rows)?;
            writeln!(out, "cols={}", h.cols)?;
            writeln!(out, "model_hash={:016x}", h.model_hash)?;
            writeln!(out, "symbol_count={}", h.symbol_count)?;
            writeln!(out, "payload_len={}", h.payload_len)?;
            let (bpp, factor) = bpp_report(bytes.len(), h.width as usize, h.height as usize, h.depth);
            writeln!(out, "bpp={bpp}")?;
            writeln!(out, "compression_factor={factor}")?;
        }
    }
    Ok(())
}
