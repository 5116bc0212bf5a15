//! Verification checks behind the `symsep verify` command.
//!
//! Every check reports a single `max_residual`. Exact checks report either
//! an exact zero or the number of violated conditions and pass only on exact
//! zero. `demo-separation` reports the largest ratio of a floating residual
//! to its threshold, so its default tolerance is 1.

mod checks;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::value::RawValue;

pub use checks::{octonion_diagonal_outcome, DiagonalOutcome};

pub const SCHEMA_VERSION: u32 = 1;

pub const CHECK_IDS: [&str; 5] = ["octonion-diagonal", "f4", "cpn", "lie-triple-dims", "demo-separation"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Residual {
    ExactZero,
    Value(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub check_id: String,
    pub status: Status,
    pub max_residual: Residual,
    pub tolerance: f64,
    pub witnesses: Vec<String>,
    pub runtime_ms: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub samples: BTreeMap<String, usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Record wall-clock runtimes; off by default so reports are reproducible.
    pub timings: bool,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown check id '{0}'")]
    UnknownCheck(String),
    #[error("tolerance for '{check}' must be finite and nonnegative, got {value}")]
    BadTolerance { check: String, value: f64 },
    #[error("sample count for '{0}' must be positive")]
    BadSamples(String),
    #[error("malformed override '{0}', expected CHECK=VALUE")]
    Malformed(String),
}

impl RunConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (id, &value) in &self.tolerances {
            known(id)?;
            if !value.is_finite() || value < 0.0 {
                return Err(ConfigError::BadTolerance {
                    check: id.clone(),
                    value,
                });
            }
        }
        for (id, &n) in &self.samples {
            known(id)?;
            if n == 0 {
                return Err(ConfigError::BadSamples(id.clone()));
            }
        }
        Ok(())
    }

    fn tolerance(&self, id: &str, default: f64) -> f64 {
        self.tolerances.get(id).copied().unwrap_or(default)
    }

    fn samples(&self, id: &str, default: usize) -> usize {
        self.samples.get(id).copied().unwrap_or(default)
    }
}

fn known(id: &str) -> Result<(), ConfigError> {
    if CHECK_IDS.contains(&id) {
        Ok(())
    } else {
        Err(ConfigError::UnknownCheck(id.to_string()))
    }
}

/// Stream seed of one check: the run seed xor the FNV-1a hash of its id.
pub fn check_seed(seed: u64, id: &str) -> u64 {
    let hash = id
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3));
    seed ^ hash
}

/// What a check body hands back before status and bookkeeping are filled in.
pub(crate) struct Outcome {
    pub residual: Residual,
    pub witnesses: Vec<String>,
    pub skipped: bool,
}

struct CheckDefaults {
    id: &'static str,
    exact: bool,
    tolerance: f64,
    samples: usize,
    run: fn(usize, &mut ChaCha8Rng) -> Outcome,
}

fn defaults_for(id: &str) -> Result<CheckDefaults, ConfigError> {
    let s = match id {
        "octonion-diagonal" => CheckDefaults {
            id: "octonion-diagonal",
            exact: true,
            tolerance: 0.0,
            samples: 100,
            run: checks::octonion_diagonal,
        },
        "f4" => CheckDefaults {
            id: "f4",
            exact: true,
            tolerance: 0.0,
            samples: 100,
            run: checks::f4,
        },
        "cpn" => CheckDefaults {
            id: "cpn",
            exact: true,
            tolerance: 0.0,
            samples: 100,
            run: checks::cpn,
        },
        "lie-triple-dims" => CheckDefaults {
            id: "lie-triple-dims",
            exact: true,
            tolerance: 0.0,
            samples: 20,
            run: checks::lie_triple_dims,
        },
        "demo-separation" => CheckDefaults {
            id: "demo-separation",
            exact: false,
            tolerance: 1.0,
            samples: 50,
            run: checks::demo_separation,
        },
        other => return Err(ConfigError::UnknownCheck(other.to_string())),
    };
    Ok(s)
}

/// Runs one check under `cfg`.
pub fn run_check(id: &str, cfg: &RunConfig) -> Result<CheckReport, ConfigError> {
    cfg.validate()?;
    let defaults = defaults_for(id)?;
    let seed = check_seed(cfg.seed, defaults.id);
    let tolerance = cfg.tolerance(defaults.id, defaults.tolerance);
    let samples = cfg.samples(defaults.id, defaults.samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let out = (defaults.run)(samples, &mut rng);
    let runtime_ms = if cfg.timings { start.elapsed().as_millis() as u64 } else { 0 };

    let within = match out.residual {
        Residual::ExactZero => true,
        Residual::Value(v) => !defaults.exact && v <= tolerance,
    };
    let status = if out.skipped {
        Status::Skipped
    } else if within {
        Status::Pass
    } else {
        Status::Fail
    };
    let mut witnesses = out.witnesses;
    if status == Status::Fail && witnesses.is_empty() {
        witnesses.push(format!("max_residual exceeds tolerance {}", float(tolerance)));
    }
    Ok(CheckReport {
        check_id: defaults.id.to_string(),
        status,
        max_residual: out.residual,
        tolerance,
        witnesses,
        runtime_ms,
        seed,
    })
}

/// Runs every check concurrently; reports come back in [`CHECK_IDS`] order.
pub fn run_all(cfg: &RunConfig) -> Result<Vec<CheckReport>, ConfigError> {
    cfg.validate()?;
    std::thread::scope(|scope| {
        let handles: Vec<_> = CHECK_IDS
            .iter()
            .map(|id| scope.spawn(move || run_check(id, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect()
    })
}

/// 0 when nothing failed, 1 otherwise.
pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().any(|r| r.status == Status::Fail) {
        1
    } else {
        0
    }
}

/// 17 significant digits; non-finite values have no JSON number form.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("\"{x}\"")
    }
}

fn raw(s: String) -> Box<RawValue> {
    RawValue::from_string(s).expect("valid JSON fragment")
}

fn residual_json(r: Residual) -> Box<RawValue> {
    match r {
        Residual::ExactZero => raw("\"exact-zero\"".to_string()),
        Residual::Value(v) => raw(float(v)),
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    check_id: &'a str,
    status: &'a str,
    max_residual: Box<RawValue>,
    tolerance: Box<RawValue>,
    witnesses: &'a [String],
    runtime_ms: u64,
    seed: u64,
}

#[derive(Serialize)]
struct JsonRun<'a> {
    schema_version: u32,
    seed: u64,
    reports: Vec<JsonReport<'a>>,
}

pub fn render_json(seed: u64, reports: &[CheckReport]) -> String {
    let run = JsonRun {
        schema_version: SCHEMA_VERSION,
        seed,
        reports: reports
            .iter()
            .map(|r| JsonReport {
                check_id: &r.check_id,
                status: r.status.as_str(),
                max_residual: residual_json(r.max_residual),
                tolerance: raw(float(r.tolerance)),
                witnesses: &r.witnesses,
                runtime_ms: r.runtime_ms,
                seed: r.seed,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&run).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn render_text(seed: u64, reports: &[CheckReport]) -> String {
    let mut s = format!("symsep verify (schema {SCHEMA_VERSION}, seed {seed})\n");
    for r in reports {
        let residual = match r.max_residual {
            Residual::ExactZero => "exact zero".to_string(),
            Residual::Value(v) => float(v),
        };
        let _ = writeln!(
            s,
            "\n[{}] {}\n  max_residual: {residual}\n  tolerance: {}\n  seed: {}\n  runtime_ms: {}",
            r.status.as_str(),
            r.check_id,
            float(r.tolerance),
            r.seed,
            r.runtime_ms
        );
        for w in &r.witnesses {
            let _ = writeln!(s, "  - {w}");
        }
    }
    s
}

pub fn render(format: Format, seed: u64, reports: &[CheckReport]) -> String {
    match format {
        Format::Json => render_json(seed, reports),
        Format::Text => render_text(seed, reports),
    }
}

/// Parses `CHECK=VALUE`.
pub fn parse_override<T: std::str::FromStr>(s: &str) -> Result<(String, T), ConfigError> {
    let (id, value) = s.split_once('=').ok_or_else(|| ConfigError::Malformed(s.to_string()))?;
    let value = value.trim().parse().map_err(|_| ConfigError::Malformed(s.to_string()))?;
    Ok((id.trim().to_string(), value))
}
