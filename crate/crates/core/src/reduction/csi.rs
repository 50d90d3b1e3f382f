//! Cubic-spline-interpolation (CSI) spectral reduction.
//!
//! The encoder keeps a subset of bands ("knots"); the decoder rebuilds every
//! band of every pixel from the knot values with a natural cubic spline over
//! wavelength. Knots are spread uniformly in band index and always include
//! both end bands, so reconstruction never extrapolates.

use crate::cube::SpectralCube;
use crate::error::{ensure, Result};
use crate::par;

use super::spline::SplinePlan;
use super::ReducedPlanes;

/// Retained band indices, strictly increasing, first 0 and last N−1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsiSideInfo {
    pub knot_indices: Vec<usize>,
}

impl CsiSideInfo {
    pub fn knot_count(&self) -> usize {
        self.knot_indices.len()
    }

    pub fn validate(&self, bands: usize) -> Result<()> {
        let k = &self.knot_indices;
        ensure!(
            k.len() >= 2 && k.len() <= bands,
            Argument,
            "{} knots invalid for {bands} bands",
            k.len()
        );
        ensure!(
            k[0] == 0 && k[k.len() - 1] == bands - 1,
            Argument,
            "knots must include bands 0 and {}",
            bands - 1
        );
        ensure!(
            k.windows(2).all(|w| w[1] > w[0]),
            Argument,
            "knot indices must be strictly increasing"
        );
        Ok(())
    }
}

/// `p` knots at `round(k·(n−1)/(p−1))`, `k = 0..p`.
pub fn csi_select_knots(n: usize, p: usize) -> Result<CsiSideInfo> {
    ensure!(
        p >= 2 && p <= n,
        Argument,
        "CSI knot count {p} outside 2..={n}"
    );
    // round half up in exact integer arithmetic
    let knot_indices = (0..p)
        .map(|k| (2 * k * (n - 1) + (p - 1)) / (2 * (p - 1)))
        .collect();
    Ok(CsiSideInfo { knot_indices })
}

/// Copies the knot bands out as planes.
pub fn csi_forward(cube: &SpectralCube, side: &CsiSideInfo) -> Result<ReducedPlanes> {
    side.validate(cube.bands())?;
    let planes = side
        .knot_indices
        .iter()
        .map(|&b| cube.band(b).iter().map(|&v| f64::from(v)).collect())
        .collect();
    ReducedPlanes::new(cube.width(), cube.height(), planes)
}

/// Pixels per work item in [`csi_inverse`].
const PIXEL_CHUNK: usize = 4096;

/// Rebuilds all bands by natural spline over the knot wavelengths, one
/// pixel segment at a time with every knot plane processed as a vector.
pub fn csi_inverse(
    planes: &ReducedPlanes,
    side: &CsiSideInfo,
    wavelengths: &[f32],
) -> Result<SpectralCube> {
    let n = wavelengths.len();
    side.validate(n)?;
    ensure!(
        planes.count() == side.knot_count(),
        Argument,
        "{} planes given for {} knots",
        planes.count(),
        side.knot_count()
    );
    let lambda: Vec<f64> = wavelengths.iter().map(|&w| f64::from(w)).collect();
    let knot_x: Vec<f64> = side.knot_indices.iter().map(|&i| lambda[i]).collect();
    let plan = SplinePlan::new(&knot_x, &lambda)?;

    let pixels = planes.pixel_count();
    let segments = pixels.div_ceil(PIXEL_CHUNK);
    let pieces = par::map_range(segments, |seg| {
        let range = seg * PIXEL_CHUNK..((seg + 1) * PIXEL_CHUNK).min(pixels);
        let len = range.len();
        let mut block = vec![0f32; n * len];
        plan.eval_planes(&planes.planes, range, |b, vals| {
            for (o, &v) in block[b * len..(b + 1) * len].iter_mut().zip(vals) {
                *o = v as f32;
            }
        });
        block
    });
    let mut samples = vec![0f32; pixels * n];
    for (seg, block) in pieces.iter().enumerate() {
        let start = seg * PIXEL_CHUNK;
        let len = block.len() / n;
        for b in 0..n {
            samples[b * pixels + start..b * pixels + start + len]
                .copy_from_slice(&block[b * len..(b + 1) * len]);
        }
    }
    SpectralCube::new(planes.width, planes.height, wavelengths.to_vec(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthesize_cube;

    #[test]
    fn knot_selection_examples() {
        assert_eq!(csi_select_knots(31, 2).unwrap().knot_indices, vec![0, 30]);
        assert_eq!(
            csi_select_knots(31, 31).unwrap().knot_indices,
            (0..31).collect::<Vec<_>>()
        );
        assert_eq!(
            csi_select_knots(31, 7).unwrap().knot_indices,
            vec![0, 5, 10, 15, 20, 25, 30]
        );
        // 9·k/4 = 0, 2.25, 4.5, 6.75, 9 → 0, 2, 5, 7, 9 (half rounds up)
        assert_eq!(
            csi_select_knots(10, 5).unwrap().knot_indices,
            vec![0, 2, 5, 7, 9]
        );
    }

    #[test]
    fn knot_selection_is_always_valid() {
        for n in 2..40 {
            for p in 2..=n {
                let s = csi_select_knots(n, p).unwrap();
                s.validate(n).unwrap();
                assert_eq!(s.knot_count(), p);
            }
        }
        assert!(csi_select_knots(31, 1).is_err());
        assert!(csi_select_knots(31, 32).is_err());
    }

    #[test]
    fn forward_copies_knot_bands() {
        let c = SpectralCube::new(
            1,
            1,
            vec![400.0, 410.0, 420.0, 430.0, 440.0],
            vec![0.0, 1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let side = CsiSideInfo {
            knot_indices: vec![0, 2, 4],
        };
        let planes = csi_forward(&c, &side).unwrap();
        assert_eq!(planes.planes, vec![vec![0.0], vec![2.0], vec![4.0]]);

        let ends = csi_select_knots(5, 2).unwrap();
        let p = csi_forward(&c, &ends).unwrap();
        assert_eq!(p.planes, vec![vec![0.0], vec![4.0]]);
    }

    #[test]
    fn all_knots_is_identity() {
        let c = synthesize_cube(7, 5, 31, "random-smooth", 2).unwrap();
        let side = csi_select_knots(31, 31).unwrap();
        let back = csi_inverse(&csi_forward(&c, &side).unwrap(), &side, c.wavelengths()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn linear_spectra_survive_any_knots() {
        let n = 31;
        let wl = crate::synth::default_wavelengths(n);
        let mut samples = Vec::new();
        for b in 0..n {
            for px in 0..4 {
                samples.push(0.1 * px as f32 + 0.02 * b as f32);
            }
        }
        let c = SpectralCube::new(2, 2, wl, samples).unwrap();
        for p in [2, 3, 7, 12] {
            let side = csi_select_knots(n, p).unwrap();
            let back =
                csi_inverse(&csi_forward(&c, &side).unwrap(), &side, c.wavelengths()).unwrap();
            for (a, b) in c.samples().iter().zip(back.samples()) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn knot_bands_reconstruct_exactly() {
        let c = synthesize_cube(9, 9, 31, "gaussian-spectra", 4).unwrap();
        let side = csi_select_knots(31, 6).unwrap();
        let back = csi_inverse(&csi_forward(&c, &side).unwrap(), &side, c.wavelengths()).unwrap();
        for &k in &side.knot_indices {
            assert_eq!(back.band(k), c.band(k));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let c = synthesize_cube(2, 2, 5, "ramp", 0).unwrap();
        let side = csi_select_knots(5, 3).unwrap();
        let planes = csi_forward(&c, &side).unwrap();
        let wrong = csi_select_knots(5, 2).unwrap();
        assert!(csi_inverse(&planes, &wrong, c.wavelengths()).is_err());
        assert!(csi_forward(&c, &csi_select_knots(6, 3).unwrap()).is_err());
    }
}
