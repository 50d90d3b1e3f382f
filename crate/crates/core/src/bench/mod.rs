//! Benchmark harness: compresses each corpus image with each method and
//! plane count at a target CR, times both stages, and scores ΔE₀₀.
//!
//! Rows run one after another so that timed repetitions never overlap;
//! parallelism lives inside the codec.

mod config;
mod report;

pub use config::{BenchConfig, CorpusEntry, PGrid};
pub use report::{emit_csv, emit_table, format_sig6, DeltaESummary, EvalReport, CSV_HEADER};

use std::time::Instant;

use crate::color::cube_delta_e_default;
use crate::container::{compress, decompress_timed, RateTarget};
use crate::cube::SpectralCube;
use crate::error::{Error, Result};
use crate::reduction::Method;
use crate::synth::{synthesize, Pattern};

/// Median of a non-empty sample (mean of the middle pair for even counts).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Compresses, decompresses and scores one cube `repetitions` times.
/// Reported timings are per-field medians; ΔE₀₀ comes from the last run
/// (the codec is deterministic, so every run reconstructs the same cube).
pub fn run_row(
    image: &str,
    cube: &SpectralCube,
    method: Method,
    p: usize,
    rate: RateTarget,
    repetitions: usize,
) -> EvalReport {
    let fail =
        |reason: String| EvalReport::failed(image.to_string(), method, p, rate.target_cr, reason);
    if p < method.min_planes() || p > cube.bands() {
        return fail(format!(
            "p={p} outside {}..={} for {}",
            method.min_planes(),
            cube.bands(),
            method.name()
        ));
    }
    let reps = repetitions.max(1);
    let (mut spectral, mut spatial, mut total) = (
        Vec::with_capacity(reps),
        Vec::with_capacity(reps),
        Vec::with_capacity(reps),
    );
    let mut last = None;
    for _ in 0..reps {
        let t0 = Instant::now();
        let out = match compress(cube, method, p, rate) {
            Ok(o) => o,
            Err(Error::Rate {
                reason, best_cr, ..
            }) => {
                let mut r = fail(format!("rate control: {reason}"));
                r.achieved_cr = best_cr;
                return r;
            }
            Err(e) => return fail(e.to_string()),
        };
        let (recon, dec) = match decompress_timed(&out.stream) {
            Ok(v) => v,
            Err(e) => return fail(e.to_string()),
        };
        total.push(ms(t0.elapsed()));
        spectral.push(ms(out.timings.spectral + dec.spectral));
        spatial.push(ms(out.timings.spatial + dec.spatial));
        last = Some((out, recon));
    }
    let (out, recon) = last.expect("at least one repetition");
    let delta_e = match cube_delta_e_default(cube, &recon) {
        Ok(s) => Some(DeltaESummary {
            mean: s.mean,
            p95: s.p95,
            max: s.max,
        }),
        Err(e) => return fail(e.to_string()),
    };
    let error = (!out.within_tolerance).then(|| {
        format!(
            "achieved CR {:.4} outside [{:.4}, {:.4}]",
            out.achieved_cr,
            rate.lower(),
            rate.upper()
        )
    });
    EvalReport {
        image: image.to_string(),
        method,
        p,
        target_cr: rate.target_cr,
        achieved_cr: out.achieved_cr,
        quality: Some(out.stream.quality),
        t_spectral_ms: median(&spectral),
        t_spatial_ms: median(&spatial),
        t_total_ms: median(&total),
        delta_e,
        error,
    }
}

/// One row per (image, method, p), failed rows included. With
/// [`PGrid::Proper`], an image that cannot be loaded contributes a single
/// flagged row per method since its band count is unknown.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<EvalReport>> {
    config.validate()?;
    let rate = RateTarget::new(config.target_cr, config.tolerance)?;
    let mut rows = Vec::new();
    for entry in &config.corpus {
        let id = entry.id();
        let cube = entry.load();
        let bands = match (&cube, entry) {
            (Ok(c), _) => c.bands(),
            (Err(_), CorpusEntry::Synth { bands, .. }) => *bands,
            (Err(_), CorpusEntry::File(_)) => 0,
        };
        let p_values = match (&config.p_values, bands) {
            // unreadable file with a derived grid: still emit one flagged row
            (PGrid::Proper, 0) => vec![0],
            (grid, n) => grid.values(n),
        };
        for &method in &config.methods {
            for &p in &p_values {
                rows.push(match &cube {
                    Ok(c) => run_row(&id, c, method, p, rate, config.repetitions),
                    Err(e) => EvalReport::failed(
                        id.clone(),
                        method,
                        p,
                        config.target_cr,
                        format!("cannot load image: {e}"),
                    ),
                });
            }
        }
    }
    Ok(rows)
}

/// Processing time against image size: one smooth synthetic cube per
/// `size_sweep` entry, `sweep_bands` bands, `sweep_p` planes, every method.
pub fn run_size_sweep(config: &BenchConfig) -> Result<Vec<EvalReport>> {
    config.validate()?;
    let rate = RateTarget::new(config.target_cr, config.tolerance)?;
    let mut rows = Vec::new();
    for &(w, h) in &config.size_sweep {
        let cube = synthesize(w, h, config.sweep_bands, Pattern::Skin, 1)?;
        let id = format!("sweep-{w}x{h}");
        for &method in &config.methods {
            rows.push(run_row(
                &id,
                &cube,
                method,
                config.sweep_p,
                rate,
                config.repetitions,
            ));
        }
    }
    Ok(rows)
}

/// For each (image, method), the successful row with the lowest mean ΔE₀₀,
/// in order of first appearance.
pub fn best_rows(reports: &[EvalReport]) -> Vec<&EvalReport> {
    let mut best: Vec<&EvalReport> = Vec::new();
    for r in reports.iter().filter(|r| r.is_ok()) {
        match best
            .iter_mut()
            .find(|b| b.image == r.image && b.method == r.method)
        {
            Some(b) if r.de_mean() < b.de_mean() => *b = r,
            Some(_) => {}
            None => best.push(r),
        }
    }
    best
}
