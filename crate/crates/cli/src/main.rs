//! `speccomp`: compress, decompress, evaluate and benchmark spectral cubes.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 rate-control error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use spectral_codec::bench::{
    emit_csv, emit_table, format_sig6, run_benchmark, run_size_sweep, BenchConfig,
};
use spectral_codec::color::cube_delta_e_default;
use spectral_codec::color::tables::{grid_wavelengths, CIE1931_2DEG, D65};
use spectral_codec::spatial::{quality_to_table, ANNEX_K_LUMINANCE};
use spectral_codec::synth::{synthesize, Pattern};
use spectral_codec::{
    compress, compress_at_quality, decompress_bytes, read_cube_file, write_cube_file, Error,
    Method, RateTarget,
};

#[derive(Parser)]
#[command(
    name = "speccomp",
    version,
    about = "Spectral image compression with PCA or cubic-spline band reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pca,
    Csi,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Pca => Method::Pca,
            MethodArg::Csi => Method::Csi,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum ConstantSet {
    All,
    Cmf,
    Illuminant,
    Quant,
}

#[derive(Subcommand)]
enum Command {
    /// Compress an SCUB cube into an SCMP stream.
    Compress {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Number of retained planes.
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 8.0)]
        target_cr: f64,
        #[arg(long, default_value_t = RateTarget::DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Fixed quality 1..=100; disables rate control.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=100))]
        quality: Option<u8>,
    },
    /// Decode an SCMP stream back to an SCUB cube.
    Decompress {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print ΔE₀₀ statistics between two cubes (D65, CIE 1931 2°).
    Evaluate {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        reconstructed: PathBuf,
        /// Also write the per-pixel ΔE₀₀ map as CSV (one image row per line).
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Run a benchmark described by a config file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Write a synthetic cube.
    Synth {
        /// flat, ramp, gaussian-spectra, random-smooth, skin, narrowband, dark or chart
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = 64)]
        width: usize,
        #[arg(long, default_value_t = 64)]
        height: usize,
        #[arg(long, default_value_t = 31)]
        bands: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the embedded colorimetric and quantizer tables.
    DumpConstants {
        #[arg(long, value_enum, default_value = "all")]
        only: ConstantSet,
        /// Also print the quantizer table scaled to this quality.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=100))]
        quality: Option<u8>,
    },
}

enum Failure {
    Usage(String),
    Data(String),
    Rate(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Rate { .. } => Failure::Rate(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Data(e.to_string()))
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Compress {
            input,
            out,
            method,
            p,
            target_cr,
            tolerance,
            quality,
        } => {
            let cube = read_cube_file(&input)?;
            let method = Method::from(method);
            let result = match quality {
                Some(q) => compress_at_quality(&cube, method, p, q)?,
                None => {
                    let rate = RateTarget::new(target_cr, tolerance)
                        .map_err(|e| Failure::Usage(e.to_string()))?;
                    let r = compress(&cube, method, p, rate)?;
                    if !r.within_tolerance {
                        return Err(Failure::Rate(format!(
                            "achieved CR {:.4} at quality {} is outside [{:.4}, {:.4}]; nothing written",
                            r.achieved_cr,
                            r.stream.quality,
                            rate.lower(),
                            rate.upper()
                        )));
                    }
                    r
                }
            };
            fs::write(&out, &result.bytes)
                .map_err(|e| Failure::Data(format!("{}: {e}", out.display())))?;
            eprintln!(
                "{}: {} p={} quality={} CR={:.4} ({} bytes)",
                out.display(),
                method,
                p,
                result.stream.quality,
                result.achieved_cr,
                result.bytes.len()
            );
            Ok(())
        }
        Command::Decompress { input, out } => {
            let bytes =
                fs::read(&input).map_err(|e| Failure::Data(format!("{}: {e}", input.display())))?;
            let cube = decompress_bytes(&bytes)?;
            write_cube_file(&cube, &out)?;
            Ok(())
        }
        Command::Evaluate {
            original,
            reconstructed,
            map,
        } => {
            let a = read_cube_file(&original)?;
            let b = read_cube_file(&reconstructed)?;
            let stats = cube_delta_e_default(&a, &b)?;
            if let Some(path) = map {
                let mut text = String::new();
                for row in stats.map.chunks(stats.width) {
                    let cells: Vec<String> = row.iter().map(|v| format_sig6(*v)).collect();
                    text.push_str(&cells.join(","));
                    text.push('\n');
                }
                write_output(Some(&path), &text)?;
            }
            write_output(
                None,
                &format!(
                    "de_mean={}\nde_p95={}\nde_max={}\n",
                    format_sig6(stats.mean),
                    format_sig6(stats.p95),
                    format_sig6(stats.max)
                ),
            )
        }
        Command::Bench {
            config,
            out,
            format,
        } => {
            let cfg = BenchConfig::from_file(&config).map_err(|e| match e {
                Error::Io(msg) => Failure::Data(format!("{}: {msg}", config.display())),
                other => Failure::Usage(format!("{}: {other}", config.display())),
            })?;
            let mut rows = run_benchmark(&cfg)?;
            rows.extend(run_size_sweep(&cfg)?);
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                eprintln!(
                    "{failed} of {} rows failed (flagged in the report)",
                    rows.len()
                );
            }
            let text = match format {
                Format::Csv => emit_csv(&rows)?,
                Format::Table => emit_table(&rows)?,
            };
            write_output(out.as_deref(), &text)
        }
        Command::Synth {
            pattern,
            width,
            height,
            bands,
            seed,
            out,
        } => {
            let pattern: Pattern = pattern
                .parse()
                .map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let cube = synthesize(width, height, bands, pattern, seed)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            write_cube_file(&cube, &out)?;
            Ok(())
        }
        Command::DumpConstants { only, quality } => {
            let wants = |s: ConstantSet| only == ConstantSet::All || only == s;
            let grid = grid_wavelengths();
            let mut text = String::new();
            if wants(ConstantSet::Cmf) {
                text.push_str("# CIE 1931 2-degree color-matching functions\nnm,xbar,ybar,zbar\n");
                for (nm, row) in grid.iter().zip(CIE1931_2DEG.iter()) {
                    let _ = writeln!(text, "{nm},{},{},{}", row[0], row[1], row[2]);
                }
            }
            if wants(ConstantSet::Illuminant) {
                text.push_str("# CIE D65 relative spectral power\nnm,power\n");
                for (nm, v) in grid.iter().zip(D65.iter()) {
                    let _ = writeln!(text, "{nm},{v}");
                }
            }
            if wants(ConstantSet::Quant) {
                let mut tables = vec![("base luminance quantizer", ANNEX_K_LUMINANCE)];
                if let Some(q) = quality {
                    tables.push((
                        "quantizer at the requested quality",
                        quality_to_table(&ANNEX_K_LUMINANCE, q)?,
                    ));
                }
                for (title, table) in tables {
                    let _ = writeln!(text, "# {title}");
                    for row in table.steps.chunks(8) {
                        let cells: Vec<String> = row.iter().map(u16::to_string).collect();
                        text.push_str(&cells.join(","));
                        text.push('\n');
                    }
                }
            }
            write_output(None, &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("speccomp: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("speccomp: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Rate(msg)) => {
            eprintln!("speccomp: {msg}");
            ExitCode::from(3)
        }
    }
}
