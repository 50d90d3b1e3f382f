//! Spectral dimensionality reduction: N bands down to P planes and back.
//!
//! Two backends share the [`ReducedPlanes`] hand-off type:
//! - [`pca`]: Karhunen-Loève transform onto the P leading eigenvectors of the
//!   band covariance. Side info is the band mean and the N×P basis.
//! - [`csi`]: keeps P knot bands and rebuilds the rest per pixel with a
//!   natural cubic spline. Side info is the knot index list.

pub mod csi;
pub mod eigen;
pub mod pca;
pub mod spline;

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};

pub use csi::{csi_forward, csi_inverse, csi_select_knots, CsiSideInfo};
pub use pca::{pca_fit, pca_forward, pca_inverse, PcaSideInfo};
pub use spline::{natural_cubic_spline, SplinePlan};

/// Spectral reduction backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Pca,
    Csi,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::Csi => "csi",
        }
    }

    /// Smallest valid retained-plane count.
    pub fn min_planes(self) -> usize {
        match self {
            Method::Pca => 1,
            Method::Csi => 2,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pca" => Ok(Method::Pca),
            "csi" => Ok(Method::Csi),
            _ => Err(Error::Argument(format!(
                "unknown method {s:?} (expected pca or csi)"
            ))),
        }
    }
}

/// P spatial planes of H×W values each, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPlanes {
    pub width: usize,
    pub height: usize,
    pub planes: Vec<Vec<f64>>,
}

impl ReducedPlanes {
    pub fn new(width: usize, height: usize, planes: Vec<Vec<f64>>) -> Result<Self> {
        ensure!(
            !planes.is_empty(),
            Argument,
            "at least one plane is required"
        );
        ensure!(
            planes.iter().all(|p| p.len() == width * height),
            Argument,
            "every plane must hold {}x{} values",
            width,
            height
        );
        ensure!(
            planes.iter().flatten().all(|v| v.is_finite()),
            Validation,
            "planes contain non-finite values"
        );
        Ok(ReducedPlanes {
            width,
            height,
            planes,
        })
    }

    pub fn count(&self) -> usize {
        self.planes.len()
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }
}
