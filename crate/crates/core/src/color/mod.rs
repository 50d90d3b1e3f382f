//! Spectral rendering to CIE XYZ and L*a*b*, CIEDE2000, and per-cube ΔE₀₀
//! statistics.

mod ciede2000;
pub mod tables;

pub use ciede2000::ciede2000;

use crate::cube::SpectralCube;
use crate::error::{ensure, Result};
use crate::par;

/// Color-matching functions sampled on an increasing wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverTable {
    pub wavelengths: Vec<f64>,
    pub xbar: Vec<f64>,
    pub ybar: Vec<f64>,
    pub zbar: Vec<f64>,
}

impl ObserverTable {
    /// CIE 1931 2° standard observer, 400–700 nm at 10 nm.
    pub fn cie1931_2deg() -> Self {
        let col = |i: usize| tables::CIE1931_2DEG.iter().map(|r| r[i]).collect();
        ObserverTable {
            wavelengths: tables::grid_wavelengths(),
            xbar: col(0),
            ybar: col(1),
            zbar: col(2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.wavelengths.len();
        ensure!(
            m >= 2,
            Argument,
            "observer table needs at least two samples"
        );
        ensure!(
            self.xbar.len() == m && self.ybar.len() == m && self.zbar.len() == m,
            Argument,
            "observer arrays differ in length"
        );
        ensure!(
            self.wavelengths.windows(2).all(|w| w[0] < w[1]),
            Argument,
            "observer wavelengths must increase"
        );
        ensure!(
            self.xbar
                .iter()
                .chain(&self.ybar)
                .chain(&self.zbar)
                .all(|v| *v >= 0.0),
            Argument,
            "observer values must be non-negative"
        );
        Ok(())
    }
}

/// Relative spectral power of a light source.
#[derive(Debug, Clone, PartialEq)]
pub struct Illuminant {
    pub wavelengths: Vec<f64>,
    pub power: Vec<f64>,
}

impl Illuminant {
    pub fn d65() -> Self {
        Illuminant {
            wavelengths: tables::grid_wavelengths(),
            power: tables::D65.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyzColor {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabColor {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl LabColor {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        LabColor { l, a, b }
    }
}

/// Slack for wavelength grids stored in single precision.
const COVERAGE_EPS_NM: f64 = 1e-3;

/// Precomputed rendering of spectra sampled on one fixed grid.
///
/// Each observer wavelength is mapped to a bracketing pair of input bands
/// and an interpolation fraction, and the illuminant-weighted CMFs are
/// folded into three per-sample weights.
#[derive(Debug, Clone)]
pub struct Renderer {
    lo: Vec<usize>,
    frac: Vec<f64>,
    wx: Vec<f64>,
    wy: Vec<f64>,
    wz: Vec<f64>,
    norm: f64,
    bands: usize,
}

impl Renderer {
    pub fn new(
        wavelengths: &[f64],
        observer: &ObserverTable,
        illuminant: &Illuminant,
    ) -> Result<Self> {
        observer.validate()?;
        let m = observer.wavelengths.len();
        ensure!(
            illuminant.wavelengths.len() == illuminant.power.len(),
            Argument,
            "illuminant arrays differ in length"
        );
        ensure!(
            illuminant.power.iter().all(|v| *v >= 0.0),
            Argument,
            "illuminant power must be non-negative"
        );
        let n = wavelengths.len();
        ensure!(
            n >= 2,
            Argument,
            "spectrum needs at least two samples to resample"
        );
        ensure!(
            wavelengths.windows(2).all(|w| w[0] < w[1]),
            Argument,
            "spectrum wavelengths must increase"
        );
        let (first, last) = (observer.wavelengths[0], observer.wavelengths[m - 1]);
        ensure!(
            wavelengths[0] <= first + COVERAGE_EPS_NM
                && wavelengths[n - 1] >= last - COVERAGE_EPS_NM,
            Argument,
            "spectrum span [{}, {}] nm does not cover observer span [{first}, {last}] nm",
            wavelengths[0],
            wavelengths[n - 1]
        );
        let power = resample(
            &illuminant.wavelengths,
            &illuminant.power,
            &observer.wavelengths,
        )?;

        let mut lo = Vec::with_capacity(m);
        let mut frac = Vec::with_capacity(m);
        for &lam in &observer.wavelengths {
            let lam = lam.clamp(wavelengths[0], wavelengths[n - 1]);
            let i = wavelengths.partition_point(|&w| w <= lam).clamp(1, n - 1) - 1;
            lo.push(i);
            frac.push((lam - wavelengths[i]) / (wavelengths[i + 1] - wavelengths[i]));
        }
        let step: Vec<f64> = (0..m)
            .map(|j| {
                let left = if j > 0 {
                    observer.wavelengths[j] - observer.wavelengths[j - 1]
                } else {
                    0.0
                };
                let right = if j + 1 < m {
                    observer.wavelengths[j + 1] - observer.wavelengths[j]
                } else {
                    0.0
                };
                if j == 0 || j + 1 == m {
                    left.max(right)
                } else {
                    0.5 * (left + right)
                }
            })
            .collect();
        let weigh =
            |cmf: &[f64]| -> Vec<f64> { (0..m).map(|j| power[j] * cmf[j] * step[j]).collect() };
        let wx = weigh(&observer.xbar);
        let wy = weigh(&observer.ybar);
        let wz = weigh(&observer.zbar);
        let norm: f64 = wy.iter().sum();
        ensure!(
            norm > 0.0,
            Argument,
            "illuminant has no luminous power on the observer grid"
        );
        Ok(Renderer {
            lo,
            frac,
            wx,
            wy,
            wz,
            norm,
            bands: n,
        })
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    /// Renders the spectrum whose value at band `n` is `sample(n)`.
    pub fn render_with(&self, sample: impl Fn(usize) -> f64) -> XyzColor {
        let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
        for j in 0..self.lo.len() {
            let i = self.lo[j];
            let (a, b) = (sample(i), sample(i + 1));
            let r = a + self.frac[j] * (b - a);
            sx += self.wx[j] * r;
            sy += self.wy[j] * r;
            sz += self.wz[j] * r;
        }
        XyzColor {
            x: 100.0 * (sx / self.norm),
            y: 100.0 * (sy / self.norm),
            z: 100.0 * (sz / self.norm),
        }
    }

    pub fn render(&self, spectrum: &[f64]) -> XyzColor {
        assert_eq!(
            spectrum.len(),
            self.bands,
            "spectrum length must match renderer grid"
        );
        self.render_with(|n| spectrum[n])
    }

    /// XYZ of the perfect reflector.
    pub fn white(&self) -> XyzColor {
        self.render_with(|_| 1.0)
    }
}

fn resample(x: &[f64], y: &[f64], at: &[f64]) -> Result<Vec<f64>> {
    ensure!(
        x.len() >= 2,
        Argument,
        "illuminant needs at least two samples"
    );
    ensure!(
        x.windows(2).all(|w| w[0] < w[1]),
        Argument,
        "illuminant wavelengths must increase"
    );
    let n = x.len();
    at.iter()
        .map(|&t| {
            ensure!(
                t >= x[0] - COVERAGE_EPS_NM && t <= x[n - 1] + COVERAGE_EPS_NM,
                Argument,
                "illuminant does not cover {t} nm"
            );
            let t = t.clamp(x[0], x[n - 1]);
            let i = x.partition_point(|&w| w <= t).clamp(1, n - 1) - 1;
            let f = (t - x[i]) / (x[i + 1] - x[i]);
            Ok(y[i] + f * (y[i + 1] - y[i]))
        })
        .collect()
}

/// Renders one reflectance spectrum to XYZ, normalized so the perfect
/// reflector has Y = 100.
pub fn spectral_to_xyz(
    spectrum: &[f64],
    wavelengths: &[f64],
    observer: &ObserverTable,
    illuminant: &Illuminant,
) -> Result<XyzColor> {
    ensure!(
        spectrum.len() == wavelengths.len(),
        Argument,
        "spectrum has {} samples but {} wavelengths",
        spectrum.len(),
        wavelengths.len()
    );
    Ok(Renderer::new(wavelengths, observer, illuminant)?.render(spectrum))
}

const LAB_DELTA: f64 = 6.0 / 29.0;

fn lab_f(t: f64) -> f64 {
    if t > LAB_DELTA * LAB_DELTA * LAB_DELTA {
        t.cbrt()
    } else {
        t / (3.0 * LAB_DELTA * LAB_DELTA) + 4.0 / 29.0
    }
}

/// CIE 1976 L*a*b* relative to `white`.
pub fn xyz_to_lab(xyz: XyzColor, white: XyzColor) -> Result<LabColor> {
    ensure!(
        white.x > 0.0 && white.y > 0.0 && white.z > 0.0,
        Argument,
        "white point components must be positive"
    );
    Ok(lab_unchecked(xyz, white))
}

fn lab_unchecked(xyz: XyzColor, white: XyzColor) -> LabColor {
    let fx = lab_f(xyz.x / white.x);
    let fy = lab_f(xyz.y / white.y);
    let fz = lab_f(xyz.z / white.z);
    LabColor {
        l: 116.0 * fy - 16.0,
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

/// Summary of a per-pixel ΔE₀₀ map.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaEStats {
    pub mean: f64,
    pub max: f64,
    /// Nearest-rank 95th percentile.
    pub p95: f64,
    pub width: usize,
    pub height: usize,
    /// Row-major H×W map.
    pub map: Vec<f64>,
}

impl DeltaEStats {
    pub fn from_map(width: usize, height: usize, map: Vec<f64>) -> Self {
        assert_eq!(map.len(), width * height);
        let mean = map.iter().sum::<f64>() / map.len() as f64;
        let mut sorted = map.clone();
        sorted.sort_by(f64::total_cmp);
        let max = *sorted.last().unwrap();
        let rank = ((0.95 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        DeltaEStats {
            mean,
            max,
            p95: sorted[rank - 1],
            width,
            height,
            map,
        }
    }
}

/// Per-pixel ΔE₀₀ between two cubes rendered under `illuminant`, using the
/// perfect reflector as the white point.
pub fn cube_delta_e(
    original: &SpectralCube,
    reconstructed: &SpectralCube,
    observer: &ObserverTable,
    illuminant: &Illuminant,
) -> Result<DeltaEStats> {
    ensure!(
        original.same_shape(reconstructed),
        Argument,
        "cube shapes differ: {}x{}x{} vs {}x{}x{}",
        original.width(),
        original.height(),
        original.bands(),
        reconstructed.width(),
        reconstructed.height(),
        reconstructed.bands()
    );
    let renderer = Renderer::new(&original.wavelengths_f64(), observer, illuminant)?;
    let white = renderer.white();
    let hw = original.pixel_count();
    let (sa, sb) = (original.samples(), reconstructed.samples());
    let map = par::map_range(hw, |px| {
        let xa = renderer.render_with(|n| f64::from(sa[n * hw + px]));
        let xb = renderer.render_with(|n| f64::from(sb[n * hw + px]));
        ciede2000(lab_unchecked(xa, white), lab_unchecked(xb, white))
    });
    Ok(DeltaEStats::from_map(
        original.width(),
        original.height(),
        map,
    ))
}

/// [`cube_delta_e`] with the CIE 1931 2° observer and D65.
pub fn cube_delta_e_default(
    original: &SpectralCube,
    reconstructed: &SpectralCube,
) -> Result<DeltaEStats> {
    cube_delta_e(
        original,
        reconstructed,
        &ObserverTable::cie1931_2deg(),
        &Illuminant::d65(),
    )
}
