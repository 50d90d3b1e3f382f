//! Deterministic synthetic spectral cubes for tests and benchmarking.
//!
//! The four content classes (`skin`, `narrowband`, `dark`, `chart`) are
//! stand-ins for natural scenes: smooth skin-like reflectance, saturated
//! narrow-band colors, dark low-signal objects, and a patchwise-constant
//! color chart. They are not reproductions of any particular image.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube::SpectralCube;
use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pattern {
    Flat,
    Ramp,
    GaussianSpectra,
    RandomSmooth,
    Skin,
    NarrowBand,
    Dark,
    Chart,
}

impl Pattern {
    pub const ALL: [Pattern; 8] = [
        Pattern::Flat,
        Pattern::Ramp,
        Pattern::GaussianSpectra,
        Pattern::RandomSmooth,
        Pattern::Skin,
        Pattern::NarrowBand,
        Pattern::Dark,
        Pattern::Chart,
    ];

    /// The four content classes used by the default benchmark corpus.
    pub const CORPUS: [Pattern; 4] = [
        Pattern::Skin,
        Pattern::NarrowBand,
        Pattern::Dark,
        Pattern::Chart,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Flat => "flat",
            Pattern::Ramp => "ramp",
            Pattern::GaussianSpectra => "gaussian-spectra",
            Pattern::RandomSmooth => "random-smooth",
            Pattern::Skin => "skin",
            Pattern::NarrowBand => "narrowband",
            Pattern::Dark => "dark",
            Pattern::Chart => "chart",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pattern::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown pattern id {s:?}")))
    }
}

/// Default wavelength grid: 400–700 nm, evenly spaced (10 nm steps at N=31).
/// A single band sits at 550 nm.
/// Half-width of the uniform per-sample noise on the corpus stand-ins
/// (standard deviation about 0.5 % reflectance).
const SENSOR_NOISE: f64 = 0.009;
/// Dark scenes collect fewer photons, so their absolute noise is lower.
const DARK_SENSOR_NOISE: f64 = 0.006;

pub fn default_wavelengths(bands: usize) -> Vec<f32> {
    if bands == 1 {
        return vec![550.0];
    }
    let step = 300.0 / (bands - 1) as f64;
    (0..bands)
        .map(|i| (400.0 + step * i as f64) as f32)
        .collect()
}

/// Generates a cube of the given pattern. Output is a pure function of the
/// arguments; all samples lie in [0, 1].
pub fn synthesize_cube(
    width: usize,
    height: usize,
    bands: usize,
    pattern: &str,
    seed: u64,
) -> Result<SpectralCube> {
    let pattern: Pattern = pattern.parse()?;
    synthesize(width, height, bands, pattern, seed)
}

pub fn synthesize(
    width: usize,
    height: usize,
    bands: usize,
    pattern: Pattern,
    seed: u64,
) -> Result<SpectralCube> {
    ensure!(
        width >= 1 && height >= 1 && bands >= 1,
        Argument,
        "dimensions must be >= 1 (got {width}x{height}x{bands})"
    );
    let wavelengths = default_wavelengths(bands);
    let lambda: Vec<f64> = wavelengths.iter().map(|&w| f64::from(w)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = width * height;
    let mut samples = vec![0f32; pixels * bands];
    let mut put = |pixel: usize, spectrum: &[f64]| {
        for (b, &v) in spectrum.iter().enumerate() {
            samples[b * pixels + pixel] = v.clamp(0.0, 1.0) as f32;
        }
    };

    match pattern {
        Pattern::Flat => samples.fill(0.5),
        Pattern::Ramp => {
            let denom = (width + height + bands).saturating_sub(3).max(1) as f64;
            for y in 0..height {
                for x in 0..width {
                    let s: Vec<f64> = (0..bands)
                        .map(|b| 0.1 + 0.8 * (x + y + b) as f64 / denom)
                        .collect();
                    put(y * width + x, &s);
                }
            }
        }
        Pattern::GaussianSpectra => {
            let field = SmoothField::new(&mut rng, 3);
            let field2 = SmoothField::new(&mut rng, 3);
            for y in 0..height {
                for x in 0..width {
                    let (u, v) = unit_coords(x, y, width, height);
                    let mu = 430.0 + 240.0 * field.eval(u, v);
                    let sigma = 30.0 + 50.0 * field2.eval(u, v);
                    let s: Vec<f64> = lambda
                        .iter()
                        .map(|&l| 0.1 + 0.8 * gaussian(l, mu, sigma))
                        .collect();
                    put(y * width + x, &s);
                }
            }
        }
        Pattern::RandomSmooth => {
            let members: Vec<Vec<f64>> =
                (0..4).map(|_| smooth_endmember(&mut rng, bands)).collect();
            mixture(&mut rng, width, height, &members, 0.004, &mut put);
        }
        Pattern::Skin => {
            let members: Vec<Vec<f64>> = (0..3)
                .map(|_| {
                    let base = rng.random_range(0.15..0.3);
                    let rise = rng.random_range(0.25..0.4);
                    let dip = rng.random_range(0.03..0.08);
                    lambda
                        .iter()
                        .map(|&l| {
                            base + rise * sigmoid((l - 590.0) / 18.0)
                                - dip * gaussian(l, 542.0, 12.0)
                                - dip * gaussian(l, 576.0, 10.0)
                                + 0.04 * (l - 400.0) / 300.0
                        })
                        .collect()
                })
                .collect();
            mixture(&mut rng, width, height, &members, SENSOR_NOISE, &mut put);
        }
        Pattern::NarrowBand => {
            let petals: Vec<Vec<f64>> = (0..2)
                .map(|_| {
                    let edge = rng.random_range(600.0..625.0);
                    let blue = rng.random_range(0.02..0.08);
                    lambda
                        .iter()
                        .map(|&l| {
                            0.03 + blue * gaussian(l, 420.0, 20.0)
                                + 0.85 * sigmoid((l - edge) / 6.0)
                        })
                        .collect()
                })
                .collect();
            let leaf: Vec<f64> = lambda
                .iter()
                .map(|&l| 0.04 + 0.35 * gaussian(l, 550.0, 18.0) + 0.1 * sigmoid((l - 690.0) / 5.0))
                .collect();
            let mut members = petals;
            members.push(leaf);
            mixture(&mut rng, width, height, &members, SENSOR_NOISE, &mut put);
        }
        Pattern::Dark => {
            let members: Vec<Vec<f64>> = (0..3)
                .map(|_| {
                    let edge = rng.random_range(570.0..640.0);
                    let high = rng.random_range(0.06..0.18);
                    lambda
                        .iter()
                        .map(|&l| 0.02 + high * sigmoid((l - edge) / 15.0))
                        .collect()
                })
                .collect();
            mixture(
                &mut rng,
                width,
                height,
                &members,
                DARK_SENSOR_NOISE,
                &mut put,
            );
        }
        Pattern::Chart => {
            const COLS: usize = 6;
            const ROWS: usize = 4;
            let patches: Vec<Vec<f64>> = (0..COLS * ROWS)
                .map(|_| {
                    let base = rng.random_range(0.03..0.4);
                    let peak = rng.random_range(0.0..0.55);
                    let mu = rng.random_range(420.0..680.0);
                    let sigma = rng.random_range(25.0..70.0);
                    let tilt = rng.random_range(-0.15..0.15);
                    lambda
                        .iter()
                        .map(|&l| base + peak * gaussian(l, mu, sigma) + tilt * (l - 550.0) / 150.0)
                        .collect()
                })
                .collect();
            for y in 0..height {
                for x in 0..width {
                    let patch = (y * ROWS / height) * COLS + x * COLS / width;
                    let s: Vec<f64> = patches[patch]
                        .iter()
                        .map(|&v| v + rng.random_range(-SENSOR_NOISE..SENSOR_NOISE))
                        .collect();
                    put(y * width + x, &s);
                }
            }
        }
    }
    SpectralCube::new(width, height, wavelengths, samples)
}

fn gaussian(x: f64, mu: f64, sigma: f64) -> f64 {
    (-(x - mu) * (x - mu) / (2.0 * sigma * sigma)).exp()
}

fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

fn unit_coords(x: usize, y: usize, width: usize, height: usize) -> (f64, f64) {
    (
        (x as f64 + 0.5) / width as f64,
        (y as f64 + 0.5) / height as f64,
    )
}

/// Sum of a few low-frequency 2-D sinusoids, mapped into [0, 1].
struct SmoothField {
    terms: Vec<(f64, f64, f64, f64)>,
}

impl SmoothField {
    fn new(rng: &mut ChaCha8Rng, count: usize) -> Self {
        let terms = (0..count)
            .map(|_| {
                (
                    rng.random_range(0.5..3.0),
                    rng.random_range(0.5..3.0),
                    rng.random_range(0.0..2.0 * PI),
                    rng.random_range(0.3..1.0),
                )
            })
            .collect();
        SmoothField { terms }
    }

    fn eval(&self, u: f64, v: f64) -> f64 {
        let total: f64 = self.terms.iter().map(|t| t.3).sum();
        let s: f64 = self
            .terms
            .iter()
            .map(|&(fu, fv, ph, a)| a * (2.0 * PI * (fu * u + fv * v) + ph).sin())
            .sum();
        0.5 + 0.5 * s / total
    }
}

/// A random smooth reflectance curve in [0.05, 0.95] whose adjacent-band
/// steps are at most 0.08.
fn smooth_endmember(rng: &mut ChaCha8Rng, bands: usize) -> Vec<f64> {
    let coeffs: Vec<(f64, f64)> = (1..=3)
        .map(|k| {
            (
                rng.random_range(-1.0..1.0) / k as f64,
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let denom = (bands.max(2) - 1) as f64;
    let raw: Vec<f64> = (0..bands)
        .map(|b| {
            let t = b as f64 / denom;
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &(a, ph))| a * ((k + 1) as f64 * PI * t + ph).cos())
                .sum()
        })
        .collect();
    let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_step = raw
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    let span = (hi - lo).max(1e-12);
    let mut scale = 0.9 / span;
    if max_step * scale > 0.08 {
        scale = 0.08 / max_step;
    }
    let center = rng.random_range(0.3..0.7);
    let mid = 0.5 * (hi + lo);
    raw.iter()
        .map(|&r| (center + (r - mid) * scale).clamp(0.05, 0.95))
        .collect()
}

/// Fills the cube with convex mixtures of `members`, weights varying smoothly
/// across the image, plus uniform per-sample noise of half-width `noise`.
fn mixture(
    rng: &mut ChaCha8Rng,
    width: usize,
    height: usize,
    members: &[Vec<f64>],
    noise: f64,
    put: &mut impl FnMut(usize, &[f64]),
) {
    let fields: Vec<SmoothField> = members.iter().map(|_| SmoothField::new(rng, 3)).collect();
    let bands = members[0].len();
    let mut spectrum = vec![0.0; bands];
    for y in 0..height {
        for x in 0..width {
            let (u, v) = unit_coords(x, y, width, height);
            let raw: Vec<f64> = fields.iter().map(|f| (3.0 * f.eval(u, v)).exp()).collect();
            let total: f64 = raw.iter().sum();
            spectrum.fill(0.0);
            for (w, m) in raw.iter().zip(members) {
                for (s, &mv) in spectrum.iter_mut().zip(m) {
                    *s += w / total * mv;
                }
            }
            for s in spectrum.iter_mut() {
                *s += rng.random_range(-noise..=noise);
            }
            put(y * width + x, &spectrum);
        }
    }
}
