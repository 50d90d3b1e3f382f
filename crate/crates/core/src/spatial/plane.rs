//! Single-plane lossy coder built from the DCT, quantizer and entropy stages.
//!
//! Record layout (little-endian): `u32 width | u32 height | u8 quality |
//! f64 norm.offset | f64 norm.scale | u32 payload_len | payload`.

use crate::error::{ensure, Error, Result};
use crate::par;

use super::dct::{dct8_forward, dct8_inverse, Block};
use super::entropy::{decode_blocks, encode_blocks};
use super::quant::{dequantize_block, quality_to_table, quantize_block, ANNEX_K_LUMINANCE};

pub const PLANE_HEADER_LEN: usize = 29;

/// Affine map from plane values into [0, 255]: `n = (v − offset) / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneNorm {
    pub offset: f64,
    pub scale: f64,
}

impl PlaneNorm {
    /// min → 0, max → 255. A flat plane gets scale 1 and lands on 128, which
    /// level-shifts to zero so every coefficient vanishes at any quality.
    pub fn fit(plane: &[f64]) -> PlaneNorm {
        let lo = plane.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = plane.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scale = (hi - lo) / 255.0;
        if scale > 0.0 && scale.is_finite() {
            PlaneNorm { offset: lo, scale }
        } else {
            PlaneNorm {
                offset: lo - 128.0,
                scale: 1.0,
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.offset.is_finite() && self.scale.is_finite() && self.scale > 0.0,
            Corrupt,
            "invalid plane normalization (offset {}, scale {})",
            self.offset,
            self.scale
        );
        Ok(())
    }
}

/// One coded plane.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedPlane {
    pub width: usize,
    pub height: usize,
    pub quality: u8,
    pub norm: PlaneNorm,
    pub payload: Vec<u8>,
}

impl EncodedPlane {
    pub fn serialized_len(&self) -> usize {
        PLANE_HEADER_LEN + self.payload.len()
    }

    pub fn write_to(&self, out: &mut Vec<u8>) -> Result<()> {
        let u32_of = |v: usize, what: &str| {
            u32::try_from(v).map_err(|_| Error::Validation(format!("{what} {v} exceeds u32")))
        };
        out.extend_from_slice(&u32_of(self.width, "width")?.to_le_bytes());
        out.extend_from_slice(&u32_of(self.height, "height")?.to_le_bytes());
        out.push(self.quality);
        out.extend_from_slice(&self.norm.offset.to_le_bytes());
        out.extend_from_slice(&self.norm.scale.to_le_bytes());
        out.extend_from_slice(&u32_of(self.payload.len(), "payload length")?.to_le_bytes());
        out.extend_from_slice(&self.payload);
        Ok(())
    }

    /// Parses one record from the front of `bytes`, returning it and the
    /// number of bytes consumed.
    pub fn read_from(bytes: &[u8]) -> Result<(EncodedPlane, usize)> {
        ensure!(
            bytes.len() >= PLANE_HEADER_LEN,
            Corrupt,
            "plane record truncated: {} of {PLANE_HEADER_LEN} header bytes",
            bytes.len()
        );
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let width = u32_at(0);
        let height = u32_at(4);
        let quality = bytes[8];
        let norm = PlaneNorm {
            offset: f64_at(9),
            scale: f64_at(17),
        };
        let len = u32_at(25);
        ensure!(
            bytes.len() - PLANE_HEADER_LEN >= len,
            Corrupt,
            "plane payload truncated: {} of {len} bytes",
            bytes.len() - PLANE_HEADER_LEN
        );
        ensure!(
            width >= 1 && height >= 1,
            Corrupt,
            "plane has zero dimension"
        );
        ensure!(
            (1..=100).contains(&quality),
            Corrupt,
            "plane quality {quality} outside 1..=100"
        );
        norm.validate()?;
        let plane = EncodedPlane {
            width,
            height,
            quality,
            norm,
            payload: bytes[PLANE_HEADER_LEN..PLANE_HEADER_LEN + len].to_vec(),
        };
        Ok((plane, PLANE_HEADER_LEN + len))
    }
}

fn block_grid(width: usize, height: usize) -> (usize, usize) {
    (width.div_ceil(8), height.div_ceil(8))
}

/// A normalized, padded plane with its DCT coefficients computed once so
/// that rate control can re-quantize at many qualities cheaply.
#[derive(Debug, Clone)]
pub struct PreparedPlane {
    pub width: usize,
    pub height: usize,
    pub norm: PlaneNorm,
    /// DCT coefficients per block, raster order.
    pub coefs: Vec<Block>,
}

impl PreparedPlane {
    pub fn new(plane: &[f64], width: usize, height: usize) -> Result<Self> {
        ensure!(
            width >= 1 && height >= 1,
            Argument,
            "plane dimensions must be >= 1"
        );
        ensure!(
            plane.len() == width * height,
            Argument,
            "plane holds {} values, expected {width}x{height}",
            plane.len()
        );
        ensure!(
            plane.iter().all(|v| v.is_finite()),
            Validation,
            "plane contains non-finite values"
        );
        let norm = PlaneNorm::fit(plane);
        let (bw, bh) = block_grid(width, height);
        let coefs = par::map_range(bw * bh, |bi| {
            let (bx, by) = (bi % bw, bi / bw);
            let mut block = [0.0; 64];
            for y in 0..8 {
                let sy = (by * 8 + y).min(height - 1);
                for x in 0..8 {
                    let sx = (bx * 8 + x).min(width - 1);
                    block[y * 8 + x] = (plane[sy * width + sx] - norm.offset) / norm.scale - 128.0;
                }
            }
            dct8_forward(&block)
        });
        Ok(PreparedPlane {
            width,
            height,
            norm,
            coefs,
        })
    }

    /// Quantized coefficient blocks (natural order) at `quality`.
    pub fn quantized(&self, quality: u8) -> Result<Vec<[i32; 64]>> {
        let table = quality_to_table(&ANNEX_K_LUMINANCE, quality)?;
        Ok(par::map_range(self.coefs.len(), |i| {
            quantize_block(&self.coefs[i], &table)
        }))
    }

    pub fn encode(&self, quality: u8) -> Result<EncodedPlane> {
        let blocks = self.quantized(quality)?;
        Ok(EncodedPlane {
            width: self.width,
            height: self.height,
            quality,
            norm: self.norm,
            payload: encode_blocks(&blocks)?,
        })
    }
}

/// Encodes an H×W row-major plane at `quality` (1–100).
pub fn encode_plane(
    plane: &[f64],
    width: usize,
    height: usize,
    quality: u8,
) -> Result<EncodedPlane> {
    PreparedPlane::new(plane, width, height)?.encode(quality)
}

/// Decodes a plane back to H×W real values.
pub fn decode_plane(enc: &EncodedPlane) -> Result<Vec<f64>> {
    enc.norm.validate()?;
    let table = quality_to_table(&ANNEX_K_LUMINANCE, enc.quality)
        .map_err(|e| Error::Corrupt(e.to_string()))?;
    let (bw, bh) = block_grid(enc.width, enc.height);
    let blocks = decode_blocks(&enc.payload, bw * bh)?;
    let pixels = par::map_range(blocks.len(), |i| {
        let mut px = dct8_inverse(&dequantize_block(&blocks[i], &table));
        for v in px.iter_mut() {
            *v = (*v + 128.0).clamp(0.0, 255.0);
        }
        px
    });
    let (w, norm) = (enc.width, enc.norm);
    let mut out = vec![0.0; w * enc.height];
    par::for_each_chunk_mut(&mut out, w, |y, row| {
        let (by, iy) = (y / 8, y % 8);
        for (x, o) in row.iter_mut().enumerate() {
            *o = norm.offset + norm.scale * pixels[by * bw + x / 8][iy * 8 + x % 8];
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::quant::QuantTable;

    fn mse(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
    }

    fn textured(w: usize, h: usize) -> Vec<f64> {
        (0..w * h)
            .map(|i| {
                let (x, y) = ((i % w) as f64, (i / w) as f64);
                0.3 + 0.2 * (x * 0.7).sin() * (y * 0.3).cos()
                    + 0.05 * ((i * 7919) % 13) as f64 / 13.0
            })
            .collect()
    }

    #[test]
    fn flat_plane_is_exact_and_minimal() {
        let plane = vec![0.37; 24 * 16];
        let enc = encode_plane(&plane, 24, 16, 50).unwrap();
        assert_eq!(enc.norm.scale, 1.0);
        // 6 all-zero blocks, each a 2-bit DC category 0 plus a 4-bit EOB
        assert_eq!(enc.payload.len(), (6 * 6usize).div_ceil(8));
        let dec = decode_plane(&enc).unwrap();
        assert!(dec.iter().all(|v| (v - 0.37).abs() <= 1e-12));
    }

    #[test]
    fn odd_sizes_round_trip() {
        let plane = textured(17, 13);
        let enc = encode_plane(&plane, 17, 13, 75).unwrap();
        let dec = decode_plane(&enc).unwrap();
        assert_eq!(dec.len(), 17 * 13);
        assert!(dec.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn padding_matches_replicated_twin() {
        let (w, h) = (13, 10);
        let plane = textured(w, h);
        let (pw, ph) = (16, 16);
        let mut padded = vec![0.0; pw * ph];
        for y in 0..ph {
            for x in 0..pw {
                padded[y * pw + x] = plane[y.min(h - 1) * w + x.min(w - 1)];
            }
        }
        let a = decode_plane(&encode_plane(&plane, w, h, 60).unwrap()).unwrap();
        let b = decode_plane(&encode_plane(&padded, pw, ph, 60).unwrap()).unwrap();
        for y in 0..h {
            for x in 0..w {
                assert_eq!(a[y * w + x], b[y * pw + x]);
            }
        }
    }

    #[test]
    fn rate_and_distortion_are_monotone_in_quality() {
        let plane = textured(40, 32);
        let mut last_len = usize::MAX;
        let mut last_mse = f64::INFINITY;
        for q in [90u8, 70, 50, 30, 10] {
            let enc = encode_plane(&plane, 40, 32, q).unwrap();
            assert!(enc.payload.len() <= last_len);
            last_len = enc.payload.len();
        }
        for q in [10u8, 30, 50, 70, 90] {
            let e = mse(
                &plane,
                &decode_plane(&encode_plane(&plane, 40, 32, q).unwrap()).unwrap(),
            );
            assert!(e <= last_mse + 1e-12, "quality {q}: {e} > {last_mse}");
            last_mse = e;
        }
    }

    #[test]
    fn record_round_trip_and_truncation() {
        let enc = encode_plane(&textured(9, 9), 9, 9, 40).unwrap();
        let mut bytes = Vec::new();
        enc.write_to(&mut bytes).unwrap();
        assert_eq!(bytes.len(), enc.serialized_len());
        let (back, used) = EncodedPlane::read_from(&bytes).unwrap();
        assert_eq!(used, bytes.len());
        assert_eq!(back, enc);
        assert!(EncodedPlane::read_from(&bytes[..bytes.len() - 1]).is_err());
        assert!(EncodedPlane::read_from(&bytes[..20]).is_err());
    }

    #[test]
    fn rejects_non_finite_input() {
        assert!(matches!(
            encode_plane(&[0.0, f64::NAN], 2, 1, 50),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn ramp_block_quantizes_like_hand_pipeline() {
        // ramp 0..=252 across the block in steps of 4: normalization maps
        // min 0 → 0 and max 252 → 255, so n = v·255/252
        let plane: Vec<f64> = (0..64)
            .map(|i| ((i % 8) * 4 + (i / 8) * 32) as f64)
            .collect();
        let prepared = PreparedPlane::new(&plane, 8, 8).unwrap();
        let q = prepared.quantized(50).unwrap();
        let shifted: Vec<f64> = plane.iter().map(|v| v * 255.0 / 252.0 - 128.0).collect();
        let table: QuantTable = ANNEX_K_LUMINANCE;
        for v in 0..8 {
            for u in 0..8 {
                let cu = if u == 0 { (0.125f64).sqrt() } else { 0.5 };
                let cv = if v == 0 { (0.125f64).sqrt() } else { 0.5 };
                let mut s = 0.0;
                for y in 0..8 {
                    for x in 0..8 {
                        s += shifted[y * 8 + x]
                            * ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / 16.0).cos()
                            * ((2 * y + 1) as f64 * v as f64 * std::f64::consts::PI / 16.0).cos();
                    }
                }
                let expected = (cu * cv * s / f64::from(table.steps[v * 8 + u])).round() as i32;
                assert_eq!(q[0][v * 8 + u], expected, "coefficient ({u},{v})");
            }
        }
    }
}
