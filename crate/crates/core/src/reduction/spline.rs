//! Natural cubic spline interpolation.
//!
//! The interior second derivatives solve the usual tridiagonal system with
//! `M[0] = M[P-1] = 0`. Because that system depends only on the knot
//! abscissae, [`SplinePlan`] factors it once and then evaluates any number of
//! ordinate vectors against a fixed set of query points. The spectral decoder
//! runs one plan per image over every pixel.

use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy)]
enum Query {
    /// Query coincides with a knot; return its ordinate unchanged.
    Knot(usize),
    /// Query inside interval `i`: weights for `M[i], M[i+1], y[i], y[i+1]`.
    Interval { i: usize, w: [f64; 4] },
}

/// Pre-factored natural spline over fixed knot abscissae and query points.
#[derive(Debug, Clone)]
pub struct SplinePlan {
    h: Vec<f64>,
    inv_h: Vec<f64>,
    /// Thomas-algorithm forward coefficients for the interior system.
    c_prime: Vec<f64>,
    inv_denom: Vec<f64>,
    queries: Vec<Query>,
}

impl SplinePlan {
    pub fn new(knot_x: &[f64], query_x: &[f64]) -> Result<Self> {
        let p = knot_x.len();
        ensure!(p >= 2, Argument, "a spline needs at least 2 knots, got {p}");
        ensure!(
            knot_x.iter().all(|x| x.is_finite()),
            Argument,
            "knot abscissae must be finite"
        );
        ensure!(
            knot_x.windows(2).all(|w| w[1] > w[0]),
            Argument,
            "knot abscissae must be strictly increasing"
        );
        let (lo, hi) = (knot_x[0], knot_x[p - 1]);
        for &q in query_x {
            ensure!(
                q >= lo && q <= hi,
                Argument,
                "query {q} outside knot span [{lo}, {hi}]"
            );
        }

        let h: Vec<f64> = knot_x.windows(2).map(|w| w[1] - w[0]).collect();
        let m = p - 2;
        let mut c_prime = vec![0.0; m];
        let mut inv_denom = vec![0.0; m];
        for j in 0..m {
            let i = j + 1;
            let diag = 2.0 * (h[i - 1] + h[i]);
            let d = if j == 0 {
                diag
            } else {
                diag - h[i - 1] * c_prime[j - 1]
            };
            inv_denom[j] = 1.0 / d;
            c_prime[j] = h[i] / d;
        }

        let queries = query_x
            .iter()
            .map(|&q| {
                if let Ok(k) = knot_x.binary_search_by(|x| x.total_cmp(&q)) {
                    return Query::Knot(k);
                }
                let i = knot_x.partition_point(|&x| x < q) - 1;
                let hi = h[i];
                let a = knot_x[i + 1] - q;
                let b = q - knot_x[i];
                Query::Interval {
                    i,
                    w: [
                        a * a * a / (6.0 * hi) - hi * a / 6.0,
                        b * b * b / (6.0 * hi) - hi * b / 6.0,
                        a / hi,
                        b / hi,
                    ],
                }
            })
            .collect();

        let inv_h = h.iter().map(|v| 1.0 / v).collect();
        Ok(SplinePlan {
            h,
            inv_h,
            c_prime,
            inv_denom,
            queries,
        })
    }

    pub fn knot_count(&self) -> usize {
        self.h.len() + 1
    }

    pub fn query_count(&self) -> usize {
        self.queries.len()
    }

    /// Second derivatives at every knot (zero at both ends).
    pub fn second_derivatives(&self, y: &[f64], m_out: &mut [f64]) {
        let p = self.knot_count();
        debug_assert_eq!(y.len(), p);
        debug_assert_eq!(m_out.len(), p);
        m_out[0] = 0.0;
        m_out[p - 1] = 0.0;
        let n = p - 2;
        if n == 0 {
            return;
        }
        let h = &self.h;
        // forward sweep, storing d' in m_out[1..=n]
        for j in 0..n {
            let i = j + 1;
            let r =
                6.0 * ((y[i + 1] - y[i]) * self.inv_h[i] - (y[i] - y[i - 1]) * self.inv_h[i - 1]);
            let prev = if j == 0 { 0.0 } else { h[i - 1] * m_out[i - 1] };
            m_out[i] = (r - prev) * self.inv_denom[j];
        }
        for j in (0..n - 1).rev() {
            let i = j + 1;
            m_out[i] -= self.c_prime[j] * m_out[i + 1];
        }
    }

    /// Evaluates the spline through `y` at every query point. `scratch` must
    /// hold `knot_count()` values.
    pub fn eval_into(&self, y: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.queries.len());
        self.second_derivatives(y, scratch);
        for (o, q) in out.iter_mut().zip(&self.queries) {
            *o = match *q {
                Query::Knot(k) => y[k],
                Query::Interval { i, w } => {
                    scratch[i] * w[0] + scratch[i + 1] * w[1] + y[i] * w[2] + y[i + 1] * w[3]
                }
            };
        }
    }

    /// Evaluates many splines at once. `planes[k][s]` is the ordinate at knot
    /// `k` of sample `s`, restricted to `range`; `emit(q, values)` receives
    /// query `q` for every sample in the range. Arithmetic matches
    /// [`eval_into`](Self::eval_into) operation for operation, so the results
    /// are bit-identical to per-sample evaluation.
    pub fn eval_planes(
        &self,
        planes: &[Vec<f64>],
        range: std::ops::Range<usize>,
        mut emit: impl FnMut(usize, &[f64]),
    ) {
        let p = self.knot_count();
        assert_eq!(planes.len(), p, "one plane per knot");
        let len = range.len();
        let y: Vec<&[f64]> = planes.iter().map(|pl| &pl[range.clone()]).collect();
        let h = &self.h;
        // m[k] holds the second derivatives at knot k; ends stay zero
        let mut m = vec![vec![0.0; len]; p];
        for j in 0..p.saturating_sub(2) {
            let i = j + 1;
            let (before, rest) = m.split_at_mut(i);
            let (prev, cur) = (&before[i - 1], &mut rest[0]);
            let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
            let (d, ih1, ih0, h0) = (
                self.inv_denom[j],
                self.inv_h[i],
                self.inv_h[i - 1],
                h[i - 1],
            );
            for s in 0..len {
                let r = 6.0 * ((y2[s] - y1[s]) * ih1 - (y1[s] - y0[s]) * ih0);
                let pv = if j == 0 { 0.0 } else { h0 * prev[s] };
                cur[s] = (r - pv) * d;
            }
        }
        for j in (0..p.saturating_sub(2).saturating_sub(1)).rev() {
            let i = j + 1;
            let (lo, hi) = m.split_at_mut(i + 1);
            let (cur, next) = (&mut lo[i], &hi[0]);
            let c = self.c_prime[j];
            for s in 0..len {
                cur[s] -= c * next[s];
            }
        }
        let mut out = vec![0.0; len];
        for (q, query) in self.queries.iter().enumerate() {
            match *query {
                Query::Knot(k) => emit(q, y[k]),
                Query::Interval { i, w } => {
                    let (m0, m1, y0, y1) = (&m[i], &m[i + 1], y[i], y[i + 1]);
                    for s in 0..len {
                        out[s] = m0[s] * w[0] + m1[s] * w[1] + y0[s] * w[2] + y1[s] * w[3];
                    }
                    emit(q, &out);
                }
            }
        }
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        let mut scratch = vec![0.0; self.knot_count()];
        let mut out = vec![0.0; self.queries.len()];
        self.eval_into(y, &mut scratch, &mut out);
        out
    }
}

/// Evaluates the natural cubic spline through `(knot_x, knot_y)` at each
/// query. No extrapolation: queries must lie within the knot span.
pub fn natural_cubic_spline(knot_x: &[f64], knot_y: &[f64], query_x: &[f64]) -> Result<Vec<f64>> {
    ensure!(
        knot_x.len() == knot_y.len(),
        Argument,
        "{} knot abscissae but {} ordinates",
        knot_x.len(),
        knot_y.len()
    );
    Ok(SplinePlan::new(knot_x, query_x)?.eval(knot_y))
}
