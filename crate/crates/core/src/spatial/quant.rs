use crate::error::{ensure, Result};

use super::dct::Block;

/// 8×8 quantizer step sizes in natural (row-major) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantTable {
    pub steps: [u16; 64],
}

/// Typical luminance table from the JPEG baseline annex.
#[rustfmt::skip]
pub const ANNEX_K_LUMINANCE: QuantTable = QuantTable {
    steps: [
        16, 11, 10, 16,  24,  40,  51,  61,
        12, 12, 14, 19,  26,  58,  60,  55,
        14, 13, 16, 24,  40,  57,  69,  56,
        14, 17, 22, 29,  51,  87,  80,  62,
        18, 22, 37, 56,  68, 109, 103,  77,
        24, 35, 55, 64,  81, 104, 113,  92,
        49, 64, 78, 87, 103, 121, 120, 101,
        72, 92, 95, 98, 112, 100, 103,  99,
    ],
};

impl QuantTable {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.steps.iter().all(|&s| (1..=32767).contains(&s)),
            Validation,
            "quantizer steps must lie in [1, 32767]"
        );
        Ok(())
    }
}

/// Scales `base` by the conventional quality factor (50 = unchanged).
pub fn quality_to_table(base: &QuantTable, quality: u8) -> Result<QuantTable> {
    ensure!(
        (1..=100).contains(&quality),
        Argument,
        "quality {quality} outside 1..=100"
    );
    let q = u32::from(quality);
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut steps = [0u16; 64];
    for (out, &s) in steps.iter_mut().zip(&base.steps) {
        *out = ((u32::from(s) * scale + 50) / 100).clamp(1, 32767) as u16;
    }
    Ok(QuantTable { steps })
}

/// Divides by the step and rounds half away from zero.
pub fn quantize_block(coefs: &Block, table: &QuantTable) -> [i32; 64] {
    let mut out = [0i32; 64];
    for i in 0..64 {
        out[i] = (coefs[i] / f64::from(table.steps[i])).round() as i32;
    }
    out
}

pub fn dequantize_block(q: &[i32; 64], table: &QuantTable) -> Block {
    let mut out = [0.0; 64];
    for i in 0..64 {
        out[i] = f64::from(q[i]) * f64::from(table.steps[i]);
    }
    out
}
