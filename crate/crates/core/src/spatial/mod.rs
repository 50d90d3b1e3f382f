//! Baseline-style lossy coder for one real-valued plane:
//! normalize → 8×8 blocks → DCT → quantize → zigzag → DC-differential and
//! run-length Huffman coding. No subsampling; every plane is coded at full
//! resolution with the same luminance tables.

pub mod dct;
pub mod entropy;
pub mod plane;
pub mod quant;

pub use dct::{dct8_forward, dct8_inverse, Block};
pub use entropy::{decode_blocks, encode_blocks};
pub use plane::{decode_plane, encode_plane, EncodedPlane, PlaneNorm, PreparedPlane};
pub use quant::{quality_to_table, QuantTable, ANNEX_K_LUMINANCE};
