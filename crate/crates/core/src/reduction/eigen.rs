//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub dim: usize,
    /// Eigenvalues, non-increasing.
    pub values: Vec<f64>,
    /// Row-major `dim × dim`; column `k` is the eigenvector of `values[k]`.
    pub vectors: Vec<f64>,
}

const MAX_SWEEPS: usize = 100;

/// Decomposes the row-major symmetric matrix `a` (`dim × dim`).
///
/// Output is sorted by descending eigenvalue (ties keep the solver's
/// order) and each eigenvector is signed so that its largest-magnitude entry
/// (first such on ties) is positive. A zero matrix yields the canonical basis.
pub fn symmetric_eigen(a: &[f64], dim: usize) -> Result<SymmetricEigen> {
    assert_eq!(a.len(), dim * dim, "matrix must be dim x dim");
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let mut m = a.to_vec();
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }

    let scale: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale > 0.0 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..dim)
                .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[i * dim + j] * m[i * dim + j])
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                converged = true;
                break;
            }
            for p in 0..dim {
                for q in p + 1..dim {
                    rotate(&mut m, &mut v, dim, p, q);
                }
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| m[j * dim + j].total_cmp(&m[i * dim + i]));
    let values: Vec<f64> = order.iter().map(|&i| m[i * dim + i]).collect();
    let mut vectors = vec![0.0; dim * dim];
    for (k, &src) in order.iter().enumerate() {
        let mut best = 0;
        for r in 1..dim {
            if v[r * dim + src].abs() > v[best * dim + src].abs() {
                best = r;
            }
        }
        let sign = if v[best * dim + src] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..dim {
            vectors[r * dim + k] = sign * v[r * dim + src];
        }
    }
    Ok(SymmetricEigen {
        dim,
        values,
        vectors,
    })
}

/// One Jacobi rotation zeroing `m[p][q]`.
fn rotate(m: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = m[p * n + p];
    let aqq = m[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let mkp = m[k * n + p];
        let mkq = m[k * n + q];
        m[k * n + p] = c * mkp - s * mkq;
        m[k * n + q] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[p * n + k];
        let mqk = m[q * n + k];
        m[p * n + k] = c * mpk - s * mqk;
        m[q * n + k] = s * mpk + c * mqk;
    }
    m[p * n + q] = 0.0;
    m[q * n + p] = 0.0;
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}
