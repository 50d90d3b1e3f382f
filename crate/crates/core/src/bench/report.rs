use std::fmt::Write as _;

use crate::error::{ensure, Result};
use crate::reduction::Method;

/// Aggregate ΔE₀₀ for one row (the per-pixel map is not retained).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaESummary {
    pub mean: f64,
    pub p95: f64,
    pub max: f64,
}

/// One (image, method, p) benchmark row.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub image: String,
    pub method: Method,
    pub p: usize,
    pub target_cr: f64,
    /// Best known CR; NaN when the row failed before any encode.
    pub achieved_cr: f64,
    pub quality: Option<u8>,
    pub t_spectral_ms: f64,
    pub t_spatial_ms: f64,
    pub t_total_ms: f64,
    pub delta_e: Option<DeltaESummary>,
    /// Set when the row failed: rate control missed, or the image could not
    /// be loaded or coded.
    pub error: Option<String>,
}

impl EvalReport {
    pub fn failed(image: String, method: Method, p: usize, target_cr: f64, reason: String) -> Self {
        EvalReport {
            image,
            method,
            p,
            target_cr,
            achieved_cr: f64::NAN,
            quality: None,
            t_spectral_ms: f64::NAN,
            t_spatial_ms: f64::NAN,
            t_total_ms: f64::NAN,
            delta_e: None,
            error: Some(reason),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn de_mean(&self) -> f64 {
        self.delta_e.map_or(f64::NAN, |d| d.mean)
    }
}

/// Formats `v` with six significant digits, `.` as the decimal separator.
pub fn format_sig6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    } else {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

pub const CSV_HEADER: &str =
    "image,method,p,target_cr,achieved_cr,t_spectral_ms,t_spatial_ms,t_total_ms,de_mean,de_p95,de_max";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with a fixed header. Failed rows keep their place with `nan` in the
/// fields they could not produce.
pub fn emit_csv(reports: &[EvalReport]) -> Result<String> {
    ensure!(!reports.is_empty(), Argument, "no reports to emit");
    let mut out = String::with_capacity(64 * (reports.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let de = r.delta_e.unwrap_or(DeltaESummary {
            mean: f64::NAN,
            p95: f64::NAN,
            max: f64::NAN,
        });
        let nums = [
            r.target_cr,
            r.achieved_cr,
            r.t_spectral_ms,
            r.t_spatial_ms,
            r.t_total_ms,
            de.mean,
            de.p95,
            de.max,
        ];
        let _ = write!(out, "{},{},{}", csv_field(&r.image), r.method.name(), r.p);
        for v in nums {
            out.push(',');
            out.push_str(&format_sig6(v));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Human-readable aligned table, one line per report plus a header.
pub fn emit_table(reports: &[EvalReport]) -> Result<String> {
    ensure!(!reports.is_empty(), Argument, "no reports to emit");
    let header = [
        "image", "method", "p", "q", "target", "CR", "spec ms", "spat ms", "total ms", "dE mean",
        "dE p95", "dE max", "status",
    ];
    let f = |v: f64, d: usize| {
        if v.is_nan() {
            "-".to_string()
        } else {
            format!("{v:.d$}")
        }
    };
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let de = r.delta_e;
            vec![
                r.image.clone(),
                r.method.name().to_string(),
                r.p.to_string(),
                r.quality.map_or("-".into(), |q| q.to_string()),
                f(r.target_cr, 2),
                f(r.achieved_cr, 3),
                f(r.t_spectral_ms, 3),
                f(r.t_spatial_ms, 3),
                f(r.t_total_ms, 3),
                f(de.map_or(f64::NAN, |d| d.mean), 4),
                f(de.map_or(f64::NAN, |d| d.p95), 4),
                f(de.map_or(f64::NAN, |d| d.max), 4),
                r.error
                    .as_ref()
                    .map_or("ok".to_string(), |e| format!("FAILED: {e}")),
            ]
        })
        .collect();
    let last = header.len() - 1;
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row).take(last) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, cell) in cells.enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            if i == 0 || i == last {
                let _ = write!(s, "{cell:<w$}", w = if i == last { 0 } else { widths[i] });
            } else {
                let _ = write!(s, "{cell:>w$}", w = widths[i]);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    for row in &rows {
        line(&mut row.iter().map(String::as_str));
    }
    Ok(out)
}
