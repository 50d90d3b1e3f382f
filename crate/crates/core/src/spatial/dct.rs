//! Orthonormal 8×8 DCT-II, computed separably from a cosine table.

use std::f64::consts::PI;
use std::sync::OnceLock;

pub type Block = [f64; 64];

/// `C[u][x] = c(u)·cos((2x+1)uπ/16)` with `c(0) = √(1/8)`, `c(u>0) = 1/2`.
fn basis() -> &'static [[f64; 8]; 8] {
    static TABLE: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0.0; 8]; 8];
        for (u, row) in t.iter_mut().enumerate() {
            let cu = if u == 0 { (1.0f64 / 8.0).sqrt() } else { 0.5 };
            for (x, v) in row.iter_mut().enumerate() {
                *v = cu * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos();
            }
        }
        t
    })
}

/// Forward 2-D DCT of a row-major block: `F = C·X·Cᵀ`.
pub fn dct8_forward(block: &Block) -> Block {
    let c = basis();
    let mut tmp = [0.0; 64];
    // rows: tmp[y][u] = Σ_x C[u][x]·X[y][x]
    for y in 0..8 {
        for u in 0..8 {
            tmp[y * 8 + u] = (0..8).map(|x| c[u][x] * block[y * 8 + x]).sum();
        }
    }
    let mut out = [0.0; 64];
    for v in 0..8 {
        for u in 0..8 {
            out[v * 8 + u] = (0..8).map(|y| c[v][y] * tmp[y * 8 + u]).sum();
        }
    }
    out
}

/// Inverse 2-D DCT: `X = Cᵀ·F·C`.
pub fn dct8_inverse(coefs: &Block) -> Block {
    let c = basis();
    let mut tmp = [0.0; 64];
    for v in 0..8 {
        for x in 0..8 {
            tmp[v * 8 + x] = (0..8).map(|u| c[u][x] * coefs[v * 8 + u]).sum();
        }
    }
    let mut out = [0.0; 64];
    for y in 0..8 {
        for x in 0..8 {
            out[y * 8 + x] = (0..8).map(|v| c[v][y] * tmp[v * 8 + x]).sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_block_has_only_dc() {
        let f = dct8_forward(&[3.5; 64]);
        assert!((f[0] - 28.0).abs() < 1e-12);
        assert!(f[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn inverse_undoes_forward() {
        let mut b = [0.0; 64];
        for (i, v) in b.iter_mut().enumerate() {
            *v = ((i * 37 + 11) % 255) as f64 - 128.0;
        }
        let back = dct8_inverse(&dct8_forward(&b));
        for (a, r) in b.iter().zip(back.iter()) {
            assert!((a - r).abs() < 1e-9);
        }
    }
}
