//! Karhunen-Loève (PCA) spectral reduction.

use crate::cube::SpectralCube;
use crate::error::{ensure, Error, Result};
use crate::par;

use super::eigen::symmetric_eigen;
use super::ReducedPlanes;

/// Decoder-side data for the PCA backend.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaSideInfo {
    /// Per-band mean over all pixels.
    pub mean: Vec<f64>,
    /// Row-major N×P; column k is the k-th principal axis.
    pub basis: Vec<f64>,
    /// Covariance eigenvalues for the retained axes, non-increasing.
    pub eigenvalues: Vec<f64>,
}

impl PcaSideInfo {
    pub fn bands(&self) -> usize {
        self.mean.len()
    }

    pub fn components(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn axis(&self, band: usize, k: usize) -> f64 {
        self.basis[band * self.components() + k]
    }

    pub fn validate(&self) -> Result<()> {
        let (n, p) = (self.bands(), self.components());
        ensure!(
            n >= 1 && p >= 1 && p <= n,
            Argument,
            "PCA side info has {p} components for {n} bands"
        );
        ensure!(
            self.basis.len() == n * p,
            Argument,
            "PCA basis holds {} values, expected {n}x{p}",
            self.basis.len()
        );
        Ok(())
    }

    /// ‖BᵀB − I‖∞ (largest absolute entry).
    pub fn orthonormality_error(&self) -> f64 {
        let (n, p) = (self.bands(), self.components());
        let mut worst: f64 = 0.0;
        for i in 0..p {
            for j in 0..p {
                let dot: f64 = (0..n).map(|b| self.axis(b, i) * self.axis(b, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Copy with every value rounded to f32 precision, matching what the
    /// stream container stores.
    pub fn rounded_to_f32(&self) -> PcaSideInfo {
        let r = |v: &[f64]| v.iter().map(|&x| f64::from(x as f32)).collect();
        PcaSideInfo {
            mean: r(&self.mean),
            basis: r(&self.basis),
            eigenvalues: r(&self.eigenvalues),
        }
    }
}

/// Band mean vector and N×N covariance (divisor HW−1), accumulated in f64 in
/// row-major pixel order.
pub fn band_covariance(cube: &SpectralCube) -> (Vec<f64>, Vec<f64>) {
    let n = cube.bands();
    let pixels = cube.pixel_count();
    let mean: Vec<f64> = (0..n)
        .map(|b| cube.band(b).iter().map(|&v| f64::from(v)).sum::<f64>() / pixels as f64)
        .collect();

    let mut cov = vec![0.0; n * n];
    let mut d = vec![0.0; n];
    let samples = cube.samples();
    for px in 0..pixels {
        for (b, db) in d.iter_mut().enumerate() {
            *db = f64::from(samples[b * pixels + px]) - mean[b];
        }
        for i in 0..n {
            let di = d[i];
            let row = &mut cov[i * n..i * n + n];
            for j in i..n {
                row[j] += di * d[j];
            }
        }
    }
    let denom = (pixels - 1) as f64;
    for i in 0..n {
        for j in i..n {
            let v = cov[i * n + j] / denom;
            cov[i * n + j] = v;
            cov[j * n + i] = v;
        }
    }
    (mean, cov)
}

/// Fits the PCA side info keeping the `p` leading principal axes.
pub fn pca_fit(cube: &SpectralCube, p: usize) -> Result<PcaSideInfo> {
    let n = cube.bands();
    ensure!(
        (1..=n).contains(&p),
        Argument,
        "PCA component count {p} outside 1..={n}"
    );
    ensure!(
        cube.pixel_count() >= 2,
        Argument,
        "PCA needs at least 2 pixels, cube has {}",
        cube.pixel_count()
    );
    let (mean, cov) = band_covariance(cube);
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("covariance has non-finite entries".into()));
    }
    let eig = symmetric_eigen(&cov, n)?;
    let mut basis = vec![0.0; n * p];
    for b in 0..n {
        basis[b * p..b * p + p].copy_from_slice(&eig.vectors[b * n..b * n + p]);
    }
    Ok(PcaSideInfo {
        mean,
        basis,
        eigenvalues: eig.values[..p].to_vec(),
    })
}

/// Projects every pixel's centered spectrum onto the retained axes.
pub fn pca_forward(cube: &SpectralCube, side: &PcaSideInfo) -> Result<ReducedPlanes> {
    side.validate()?;
    ensure!(
        side.bands() == cube.bands(),
        Argument,
        "side info is for {} bands, cube has {}",
        side.bands(),
        cube.bands()
    );
    let pixels = cube.pixel_count();
    let planes = par::map_range(side.components(), |k| {
        let mut plane = vec![0.0; pixels];
        for b in 0..cube.bands() {
            let w = side.axis(b, k);
            let m = side.mean[b];
            for (out, &v) in plane.iter_mut().zip(cube.band(b)) {
                *out += w * (f64::from(v) - m);
            }
        }
        plane
    });
    ReducedPlanes::new(cube.width(), cube.height(), planes)
}

/// Rebuilds the cube as mean + basis · planes. With `clamp = Some(max)` the
/// output is clipped to `[0, max]`; evaluation uses the raw reconstruction.
pub fn pca_inverse(
    planes: &ReducedPlanes,
    side: &PcaSideInfo,
    wavelengths: &[f32],
    clamp: Option<f64>,
) -> Result<SpectralCube> {
    side.validate()?;
    ensure!(
        planes.count() == side.components(),
        Argument,
        "{} planes given for {} PCA components",
        planes.count(),
        side.components()
    );
    ensure!(
        wavelengths.len() == side.bands(),
        Argument,
        "{} wavelengths given for {} bands",
        wavelengths.len(),
        side.bands()
    );
    let pixels = planes.pixel_count();
    let mut samples = vec![0f32; pixels * side.bands()];
    par::for_each_chunk_mut(&mut samples, pixels, |b, out| {
        let mut acc = vec![side.mean[b]; pixels];
        for (k, plane) in planes.planes.iter().enumerate() {
            let w = side.axis(b, k);
            for (a, &v) in acc.iter_mut().zip(plane) {
                *a += w * v;
            }
        }
        for (o, a) in out.iter_mut().zip(acc) {
            let v = match clamp {
                Some(max) => a.clamp(0.0, max),
                None => a,
            };
            *o = v as f32;
        }
    });
    SpectralCube::new(planes.width, planes.height, wavelengths.to_vec(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthesize_cube;

    fn cube(w: usize, h: usize, wl: Vec<f32>, samples: Vec<f32>) -> SpectralCube {
        SpectralCube::new(w, h, wl, samples).unwrap()
    }

    #[test]
    fn identical_spectra_have_zero_covariance() {
        let c = synthesize_cube(5, 4, 6, "flat", 0).unwrap();
        let side = pca_fit(&c, 3).unwrap();
        assert!(side.eigenvalues.iter().all(|&e| e == 0.0));
        let planes = pca_forward(&c, &side).unwrap();
        assert!(planes.planes.iter().flatten().all(|&v| v == 0.0));
        let back = pca_inverse(&planes, &side, c.wavelengths(), None).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn diagonal_two_band_example() {
        // pixels (0,0),(1,1),(2,2),(3,3)
        let c = cube(
            4,
            1,
            vec![500.0, 600.0],
            vec![0.0, 1.0, 2.0, 3.0, 0.0, 1.0, 2.0, 3.0],
        );
        let side = pca_fit(&c, 1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((side.axis(0, 0) - r).abs() < 1e-12);
        assert!((side.axis(1, 0) - r).abs() < 1e-12);
        // 2 · var({0,1,2,3}) with divisor 3
        assert!((side.eigenvalues[0] - 2.0 * 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn forward_single_pixel_dot_product() {
        let c = cube(2, 1, vec![500.0, 600.0], vec![3.0, 0.0, 1.0, 0.0]);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let side = PcaSideInfo {
            mean: vec![0.0, 0.0],
            basis: vec![r, r],
            eigenvalues: vec![1.0],
        };
        let planes = pca_forward(&c, &side).unwrap();
        assert!((planes.planes[0][0] - 4.0 / 2f64.sqrt()).abs() < 1e-12);
        // a rank-1 basis along (1,1) maps (3,1) back to (2,2); the hand case
        // inverts exactly only when the pixel lies on the axis, checked below
        let on_axis = cube(1, 1, vec![500.0, 600.0], vec![3.0, 3.0]);
        let p = pca_forward(&on_axis, &side).unwrap();
        let back = pca_inverse(&p, &side, on_axis.wavelengths(), None).unwrap();
        assert!((back.get(0, 0, 0) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn single_pixel_full_basis_inverts_exactly() {
        let c = cube(2, 1, vec![500.0, 600.0], vec![3.0, 0.0, 1.0, 0.0]);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let side = PcaSideInfo {
            mean: vec![0.0, 0.0],
            basis: vec![r, r, r, -r],
            eigenvalues: vec![1.0, 0.0],
        };
        let planes = pca_forward(&c, &side).unwrap();
        let back = pca_inverse(&planes, &side, c.wavelengths(), None).unwrap();
        assert!((back.get(0, 0, 0) - 3.0).abs() < 1e-9);
        assert!((back.get(0, 0, 1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_rank_round_trip() {
        let c = synthesize_cube(8, 8, 8, "random-smooth", 3).unwrap();
        let side = pca_fit(&c, 8).unwrap();
        assert!(side.orthonormality_error() < 1e-9);
        let back = pca_inverse(
            &pca_forward(&c, &side).unwrap(),
            &side,
            c.wavelengths(),
            None,
        )
        .unwrap();
        let worst = c
            .samples()
            .iter()
            .zip(back.samples())
            .map(|(a, b)| (a - b).abs())
            .fold(0f32, f32::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn clamp_flag_limits_output() {
        let side = PcaSideInfo {
            mean: vec![0.5],
            basis: vec![1.0],
            eigenvalues: vec![1.0],
        };
        let planes = ReducedPlanes::new(2, 1, vec![vec![-2.0, 2.0]]).unwrap();
        let raw = pca_inverse(&planes, &side, &[550.0], None).unwrap();
        assert_eq!(raw.samples(), &[-1.5, 2.5]);
        let clamped = pca_inverse(&planes, &side, &[550.0], Some(1.0)).unwrap();
        assert_eq!(clamped.samples(), &[0.0, 1.0]);
    }

    #[test]
    fn argument_errors() {
        let c = synthesize_cube(3, 3, 4, "ramp", 0).unwrap();
        assert!(pca_fit(&c, 0).is_err());
        assert!(pca_fit(&c, 5).is_err());
        let one = synthesize_cube(1, 1, 4, "ramp", 0).unwrap();
        assert!(pca_fit(&one, 1).is_err());
        let side = pca_fit(&c, 2).unwrap();
        let other = synthesize_cube(3, 3, 5, "ramp", 0).unwrap();
        assert!(pca_forward(&other, &side).is_err());
        let planes = pca_forward(&c, &side).unwrap();
        assert!(pca_inverse(&planes, &side, &[1.0, 2.0], None).is_err());
    }

    #[test]
    fn fit_is_bit_deterministic() {
        let c = synthesize_cube(16, 16, 31, "random-smooth", 11).unwrap();
        assert_eq!(pca_fit(&c, 6).unwrap(), pca_fit(&c, 6).unwrap());
    }
}
