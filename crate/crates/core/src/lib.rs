//! Spectral image compression: PCA or cubic-spline band reduction followed by
//! an 8×8 DCT plane coder, a byte-exact container with rate control, and a
//! CIEDE2000 evaluation harness.
//!
//! ```
//! use spectral_codec::{compress, decompress_bytes, Method, RateTarget};
//! use spectral_codec::synth::synthesize_cube;
//!
//! let cube = synthesize_cube(32, 32, 31, "skin", 7).unwrap();
//! let out = compress(&cube, Method::Pca, 16, RateTarget::new(8.0, 0.05).unwrap()).unwrap();
//! assert!(out.within_tolerance);
//! let back = decompress_bytes(&out.bytes).unwrap();
//! assert!(back.same_shape(&cube));
//! ```

pub mod bench;
pub mod color;
pub mod container;
pub mod cube;
mod error;
pub mod par;
pub mod reduction;
pub mod spatial;
pub mod synth;

pub use container::{
    compress, compress_at_quality, compression_rate, decompress, decompress_bytes,
    decompress_timed, parse_stream, serialize_stream, Compressed, CompressedStream, RateTarget,
    SideInfo, StageTimings,
};
pub use cube::{read_cube, read_cube_file, write_cube, write_cube_file, SpectralCube};
pub use error::{Error, Result};
pub use reduction::Method;
