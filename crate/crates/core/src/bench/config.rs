use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::cube::{read_cube_file, SpectralCube};
use crate::error::{ensure, Error, Result};
use crate::reduction::Method;
use crate::synth::{synthesize, Pattern};

/// One benchmark image: a cube file or a synthesis recipe.
///
/// Recipes are written `synth:<pattern>:<W>x<H>x<N>:<seed>`; anything else
/// is taken as a file path.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusEntry {
    Synth {
        pattern: Pattern,
        width: usize,
        height: usize,
        bands: usize,
        seed: u64,
    },
    File(PathBuf),
}

impl CorpusEntry {
    pub fn id(&self) -> String {
        match self {
            CorpusEntry::Synth {
                pattern,
                width,
                height,
                bands,
                seed,
            } => format!("{}-{width}x{height}x{bands}-s{seed}", pattern.name()),
            CorpusEntry::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
        }
    }

    pub fn load(&self) -> Result<SpectralCube> {
        match self {
            CorpusEntry::Synth {
                pattern,
                width,
                height,
                bands,
                seed,
            } => synthesize(*width, *height, *bands, *pattern, *seed),
            CorpusEntry::File(p) => read_cube_file(p),
        }
    }
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split('x')
        .map(|d| {
            d.trim()
                .parse::<usize>()
                .ok()
                .filter(|v| *v > 0)
                .ok_or_else(|| Error::Argument(format!("bad dimension {d:?} in {s:?}")))
        })
        .collect()
}

impl FromStr for CorpusEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(rest) = s.strip_prefix("synth:") else {
            ensure!(!s.is_empty(), Argument, "empty corpus entry");
            return Ok(CorpusEntry::File(PathBuf::from(s)));
        };
        let parts: Vec<&str> = rest.split(':').collect();
        ensure!(
            parts.len() == 3,
            Argument,
            "synthesis entry must look like synth:<pattern>:<W>x<H>x<N>:<seed>, got {s:?}"
        );
        let pattern: Pattern = parts[0].parse()?;
        let dims = parse_dims(parts[1])?;
        ensure!(
            dims.len() == 3,
            Argument,
            "expected WxHxN, got {:?}",
            parts[1]
        );
        let seed = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("bad seed {:?}", parts[2])))?;
        Ok(CorpusEntry::Synth {
            pattern,
            width: dims[0],
            height: dims[1],
            bands: dims[2],
            seed,
        })
    }
}

impl fmt::Display for CorpusEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusEntry::Synth {
                pattern,
                width,
                height,
                bands,
                seed,
            } => write!(
                f,
                "synth:{}:{width}x{height}x{bands}:{seed}",
                pattern.name()
            ),
            CorpusEntry::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Plane counts to try for each image.
#[derive(Debug, Clone, PartialEq)]
pub enum PGrid {
    List(Vec<usize>),
    /// Every proper reduction, `2..=N-1` for an N-band image. At `p = N`
    /// the spline reducer keeps every band and stops being a reduction.
    Proper,
}

impl PGrid {
    pub fn values(&self, bands: usize) -> Vec<usize> {
        match self {
            PGrid::List(v) => v.clone(),
            PGrid::Proper => (2..bands).collect(),
        }
    }
}

/// Benchmark parameters, normally read from a `key = value` text file.
///
/// ```text
/// # comment
/// corpus      = synth:skin:64x64x31:1, data/scene.scub
/// methods     = pca, csi
/// p_values    = 4, 6, 8-12    # or `proper` for 2..=N-1
/// target_cr   = 8
/// tolerance   = 0.05
/// repetitions = 5
/// size_sweep  = 32x32, 64x64
/// sweep_bands = 31
/// sweep_p     = 16
/// ```
///
/// Lists are comma separated. Omitted keys keep their defaults except
/// `corpus`, which is required.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub corpus: Vec<CorpusEntry>,
    pub methods: Vec<Method>,
    pub p_values: PGrid,
    pub target_cr: f64,
    pub tolerance: f64,
    pub repetitions: usize,
    pub size_sweep: Vec<(usize, usize)>,
    pub sweep_bands: usize,
    pub sweep_p: usize,
}

impl BenchConfig {
    /// Four 64×64×31 stand-in cubes: smooth skin-like, saturated narrow-band,
    /// dark low-signal, and a patchwise-constant chart.
    pub fn synthetic_corpus() -> Vec<CorpusEntry> {
        Pattern::CORPUS
            .iter()
            .enumerate()
            .map(|(i, &pattern)| CorpusEntry::Synth {
                pattern,
                width: 64,
                height: 64,
                bands: 31,
                seed: i as u64 + 1,
            })
            .collect()
    }

    pub fn with_corpus(corpus: Vec<CorpusEntry>) -> Self {
        BenchConfig {
            corpus,
            methods: vec![Method::Pca, Method::Csi],
            p_values: PGrid::Proper,
            target_cr: 8.0,
            tolerance: 0.05,
            repetitions: 5,
            size_sweep: Vec::new(),
            sweep_bands: 31,
            sweep_p: 16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.corpus.is_empty(), Argument, "corpus is empty");
        ensure!(!self.methods.is_empty(), Argument, "no methods selected");
        ensure!(
            self.p_values != PGrid::List(Vec::new()),
            Argument,
            "no p values given"
        );
        ensure!(
            self.repetitions >= 3,
            Argument,
            "repetitions must be at least 3 (got {})",
            self.repetitions
        );
        crate::container::RateTarget::new(self.target_cr, self.tolerance)?;
        ensure!(
            self.sweep_bands >= 2,
            Argument,
            "sweep_bands must be at least 2"
        );
        ensure!(
            (2..=self.sweep_bands).contains(&self.sweep_p),
            Argument,
            "sweep_p must lie in 2..={}",
            self.sweep_bands
        );
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = BenchConfig::with_corpus(Vec::new());
        let list = |v: &str| -> Vec<String> {
            v.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        };
        let num = |key: &str, v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::Argument(format!("{key}: expected a number, got {v:?}")))
        };
        let count = |key: &str, v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| Error::Argument(format!("{key}: expected a count, got {v:?}")))
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Argument(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "corpus" => {
                    for item in list(value) {
                        cfg.corpus.push(item.parse()?);
                    }
                }
                "methods" => {
                    cfg.methods = list(value)
                        .iter()
                        .map(|m| m.parse())
                        .collect::<Result<_>>()?
                }
                "p_values" if value == "proper" => cfg.p_values = PGrid::Proper,
                "p_values" => {
                    let mut v = Vec::new();
                    for item in list(value) {
                        match item.split_once('-') {
                            Some((a, b)) => {
                                let (a, b) = (count(key, a.trim())?, count(key, b.trim())?);
                                ensure!(a <= b, Argument, "p_values: empty range {item:?}");
                                v.extend(a..=b);
                            }
                            None => v.push(count(key, &item)?),
                        }
                    }
                    cfg.p_values = PGrid::List(v);
                }
                "target_cr" => cfg.target_cr = num(key, value)?,
                "tolerance" => cfg.tolerance = num(key, value)?,
                "repetitions" => cfg.repetitions = count(key, value)?,
                "size_sweep" => {
                    cfg.size_sweep = list(value)
                        .iter()
                        .map(|s| {
                            let d = parse_dims(s)?;
                            ensure!(
                                d.len() == 2,
                                Argument,
                                "size_sweep entries are WxH, got {s:?}"
                            );
                            Ok((d[0], d[1]))
                        })
                        .collect::<Result<_>>()?
                }
                "sweep_bands" => cfg.sweep_bands = count(key, value)?,
                "sweep_p" => cfg.sweep_p = count(key, value)?,
                other => {
                    return Err(Error::Argument(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        BenchConfig::parse(&std::fs::read_to_string(path)?)
    }
}
