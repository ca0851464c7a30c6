//! Lossy compression of high-bit-depth grayscale images (mammograms) with a
//! fully convolutional autoencoder.
//!
//! The pipeline is:
//!
//! 1. normalize pixels to `[0, 1]` and zero-pad to a multiple of 16
//!    ([`model::pad_to_multiple`]),
//! 2. run the compressor network ([`model::compress_forward`]) to get a
//!    `16 × H/16 × W/16` tensor in `[0, 1]`,
//! 3. quantize it to `n`-bit integers ([`quant::float2int`]),
//! 4. pack the codes MSB-first into bytes ([`entropy::pack_bits`]) and
//!    compress those bytes with an adaptive arithmetic coder
//!    ([`entropy::aac_encode`]),
//! 5. store the result in a MAMC container ([`container`]).
//!
//! Decompression runs the same steps backwards. Only the network is lossy;
//! the latent code survives the container bit-exactly.
//!
//! ```no_run
//! use mamc::{compress_image, decompress_image, DecompressOptions, GrayImage, WeightBundle};
//!
//! let weights = WeightBundle::fixture();
//! let img = GrayImage::new(256, 256, 12, vec![1000; 256 * 256]).unwrap();
//! let packed = compress_image(&img, &weights, 8).unwrap();
//! let back = decompress_image(&packed.bytes, &weights, DecompressOptions::default()).unwrap();
//! assert_eq!(back.latent, packed.latent);
//! ```
//!
//! ## Examples
//!
//! - **`architecture`** - layer table and parameter totals
//! - **`roundtrip`** - compress and decompress at several bit lengths
//! - **`quantizer`** - quantization error and latent entropy per `n`
//! - **`entropy_coding`** - the arithmetic coder on different byte streams
//! - **`metrics`** - pSNR / SSIM of two image files, or a noise sweep
//! - **`extract_patches`** - training patches from a directory of images
//! - **`weights_io`** - write and reload a MAMW weight file
//! - **`inspect_container`** - header and latent statistics of a `.mamc` file
//!
//! ```bash
//! cargo run -p mamc --example roundtrip -- 512 384
//! ```

mod bytes;
pub mod cli;
pub mod container;
pub mod entropy;
pub mod error;
pub mod image;
pub mod metrics;
pub mod model;
pub mod patches;
pub mod quant;
pub mod tensor;

pub use bytes::fnv1a64;
pub use container::{
    compress_image, decode_latent, decompress_image, read_container, write_container, Compressed, ContainerHeader,
    DecompressOptions, Decompressed,
};
pub use error::{Error, Result};
pub use image::GrayImage;
pub use metrics::MetricsReport;
pub use model::{build_architecture, ArchitectureSpec, NormalizedImage, WeightBundle};
pub use quant::LatentCode;
pub use tensor::Tensor3;
