//! File and corpus runner around the core pipeline: parse, normalize,
//! solve, re-verify, report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use stropsat::smtlib::{self, VerdictOverride};
use stropsat::subtropical::{self, Outcome, SolveConfig};
use stropsat::{Error, Rational};

pub const SEED_ENV: &str = "STROPSAT_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub max_squarings: u32,
    pub timeout_ms: Option<u64>,
    pub output_format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_squarings: 32,
            timeout_ms: None,
            output_format: OutputFormat::Text,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Applies the `STROPSAT_SEED` override when it is set and parses.
    pub fn with_env(mut self) -> Self {
        if let Some(seed) = std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()) {
            self.seed = seed;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Sat => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Sat | Verdict::Unsat => 0,
            Verdict::Unknown => 1,
        }
    }
}

/// Rationals travel through JSON as `{"num": "...", "den": "..."}`.
mod rational_json {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        num: String,
        den: String,
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        Repr {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let repr = Repr::deserialize(d)?;
        let num: BigInt = repr.num.parse().map_err(D::Error::custom)?;
        let den: BigInt = repr.den.parse().map_err(D::Error::custom)?;
        if den.is_positive() {
            Ok(Rational::new(num, den))
        } else {
            Err(D::Error::custom("denominator must be positive"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub name: String,
    #[serde(with = "rational_json")]
    pub value: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timing {
    pub parse_ms: f64,
    pub encode_ms: f64,
    pub solve_ms: f64,
    pub base_search_ms: f64,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

impl Timing {
    pub fn total_ms(&self) -> f64 {
        self.parse_ms + self.encode_ms + self.solve_ms + self.base_search_ms
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub file: String,
    pub verdict: Verdict,
    /// Present exactly when the verdict is sat.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Binding>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub timing: Timing,
}

/// Failures that prevent a verdict.
#[derive(Debug)]
pub enum RunError {
    Io(PathBuf, std::io::Error),
    Parse(Error),
    /// The witness failed independent re-verification.
    Internal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io(..) | RunError::Parse(_) => 2,
            RunError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            RunError::Parse(e) => write!(f, "{e}"),
            RunError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for RunError {}

pub fn run_file(path: &Path, cfg: &RunConfig) -> Result<RunReport, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::Io(path.to_path_buf(), e))?;
    run_source(&path.display().to_string(), &text, cfg).map_err(|e| match e {
        RunError::Parse(Error::Syntax { line, column, message }) => RunError::Parse(Error::Syntax {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        }),
        other => other,
    })
}

/// Runs the pipeline on script text. `name` labels the report.
pub fn run_source(name: &str, text: &str, cfg: &RunConfig) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let deadline = cfg.timeout_ms.map(|ms| start + Duration::from_millis(ms));
    let mut timing = Timing::default();
    let unknown = |reason: String, timing: Timing| RunReport {
        file: name.to_string(),
        verdict: Verdict::Unknown,
        witness: None,
        reason: Some(reason),
        timing,
    };

    let parsed = smtlib::parse(text).and_then(|script| {
        let normalized = smtlib::normalize(&script)?;
        Ok((script, normalized))
    });
    timing.parse_ms = millis(start.elapsed());
    let (script, normalized) = match parsed {
        Ok(pair) => pair,
        Err(e @ Error::Unsupported(_)) => return Ok(unknown(e.to_string(), timing)),
        Err(e) => return Err(RunError::Parse(e)),
    };
    if deadline.is_some_and(|d| Instant::now() >= d) {
        return Ok(unknown("timeout".into(), timing));
    }

    let values = match normalized.verdict_override {
        Some(VerdictOverride::TriviallyUnsat) => {
            return Ok(RunReport {
                file: name.to_string(),
                verdict: Verdict::Unsat,
                witness: None,
                reason: None,
                timing,
            })
        }
        Some(VerdictOverride::TriviallySat) => vec![Rational::one(); script.variables.len()],
        None => {
            let solve_cfg = SolveConfig {
                max_squarings: cfg.max_squarings,
                deadline,
            };
            let (outcome, times) = subtropical::solve_timed(&normalized.problem, &solve_cfg);
            timing.encode_ms = millis(times.encode);
            timing.solve_ms = millis(times.solve);
            timing.base_search_ms = millis(times.base_search);
            match outcome {
                Outcome::Sat(witness) => witness.point().into_coordinates(),
                Outcome::Unknown(reason) => return Ok(unknown(reason.to_string(), timing)),
            }
        }
    };

    if !smtlib::assertions_hold(&script, &values) {
        return Err(RunError::Internal(format!("{name}: witness fails re-verification")));
    }
    let witness = script
        .variables
        .iter()
        .cloned()
        .zip(values)
        .map(|(name, value)| Binding { name, value })
        .collect();
    Ok(RunReport {
        file: name.to_string(),
        verdict: Verdict::Sat,
        witness: Some(witness),
        reason: None,
        timing,
    })
}

fn is_simple_symbol(name: &str) -> bool {
    let allowed = |c: char| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c);
    !name.is_empty() && !name.starts_with(|c: char| c.is_ascii_digit()) && name.chars().all(allowed)
}

/// `(/ p q)`, wrapped as `(- (/ p q))` when negative.
pub fn format_rational(r: &Rational) -> String {
    let body = format!("(/ {} {})", r.numer().abs(), r.denom());
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

/// Verdict line, then the model block for sat or a reason comment for
/// unknown.
pub fn render_text(report: &RunReport) -> String {
    let mut out = format!("{}\n", report.verdict.as_str());
    if let Some(witness) = &report.witness {
        out.push_str("(\n");
        for b in witness {
            let name = if is_simple_symbol(&b.name) {
                b.name.clone()
            } else {
                format!("|{}|", b.name)
            };
            let _ = writeln!(out, "  (define-fun {name} () Real {})", format_rational(&b.value));
        }
        out.push_str(")\n");
    }
    if let Some(reason) = &report.reason {
        let _ = writeln!(out, "; {reason}");
    }
    out
}

pub fn render_json(report: &RunReport) -> String {
    serde_json::to_string(report).expect("reports serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub rows: Vec<RunReport>,
    /// Entries that could not be read or parsed, with the diagnostic.
    pub skipped: Vec<(String, String)>,
    pub sat: usize,
    pub unsat: usize,
    pub unknown: usize,
    pub total_ms: f64,
}

/// Runs every `.smt2` file of `dir` in parallel; rows follow file-name order.
pub fn run_batch(dir: &Path, cfg: &RunConfig) -> std::io::Result<BatchSummary> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "smt2"))
        .collect();
    files.sort();
    let start = Instant::now();
    let results: Vec<(PathBuf, Result<RunReport, RunError>)> = files
        .into_par_iter()
        .map(|path| {
            let result = run_file(&path, cfg);
            (path, result)
        })
        .collect();
    let mut summary = BatchSummary {
        rows: Vec::new(),
        skipped: Vec::new(),
        sat: 0,
        unsat: 0,
        unknown: 0,
        total_ms: 0.0,
    };
    for (path, result) in results {
        match result {
            Ok(report) => {
                match report.verdict {
                    Verdict::Sat => summary.sat += 1,
                    Verdict::Unsat => summary.unsat += 1,
                    Verdict::Unknown => summary.unknown += 1,
                }
                summary.rows.push(report);
            }
            Err(e) => {
                eprintln!("warning: skipping {}: {e}", path.display());
                summary.skipped.push((path.display().to_string(), e.to_string()));
            }
        }
    }
    summary.total_ms = millis(start.elapsed());
    Ok(summary)
}

pub fn render_batch_text(summary: &BatchSummary) -> String {
    let width = summary.rows.iter().map(|r| r.file.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<width$}  {:<7}  {:>10}\n", "file", "verdict", "time_ms");
    for row in &summary.rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:<7}  {:>10.3}",
            row.file,
            row.verdict.as_str(),
            row.timing.total_ms()
        );
    }
    let _ = writeln!(
        out,
        "rows {}  sat {}  unsat {}  unknown {}  skipped {}  total_ms {:.3}",
        summary.rows.len(),
        summary.sat,
        summary.unsat,
        summary.unknown,
        summary.skipped.len(),
        summary.total_ms
    );
    out
}

/// A random script: mostly strict polynomial conjunctions, with an
/// occasional non-strict atom or false constant to cover every verdict.
pub fn generate_script(rng: &mut ChaCha8Rng) -> String {
    let names = ["x", "y", "z"];
    let d = rng.gen_range(1..=3);
    let mut out = String::from("(set-logic QF_NRA)\n");
    for name in &names[..d] {
        let _ = writeln!(out, "(declare-fun {name} () Real)");
    }
    let constraints = rng.gen_range(1..=3);
    for _ in 0..constraints {
        let terms = rng.gen_range(1..=4);
        let mut summands = Vec::with_capacity(terms);
        for _ in 0..terms {
            let coefficient: i32 = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
            let mut factors = vec![if coefficient < 0 {
                format!("(- {})", -coefficient)
            } else {
                coefficient.to_string()
            }];
            for name in &names[..d] {
                for _ in 0..rng.gen_range(0..=3) {
                    factors.push(name.to_string());
                }
            }
            summands.push(if factors.len() == 1 {
                factors.pop().expect("one factor")
            } else {
                format!("(* {})", factors.join(" "))
            });
        }
        let lhs = if summands.len() == 1 {
            summands.pop().expect("one summand")
        } else {
            format!("(+ {})", summands.join(" "))
        };
        let relation = match rng.gen_range(0..10) {
            0 => ">=",
            1..=5 => ">",
            _ => "<",
        };
        let _ = writeln!(out, "(assert ({relation} {lhs} 0))");
    }
    if rng.gen_range(0..10) == 0 {
        out.push_str("(assert (> 0 1))\n");
    }
    out.push_str("(check-sat)\n(exit)\n");
    out
}

/// Writes `count` scripts named `gen-NNN.smt2` into `dir`.
pub fn generate_corpus(dir: &Path, count: usize, seed: u64) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let path = dir.join(format!("gen-{i:03}.smt2"));
            fs::write(&path, generate_script(&mut rng))?;
            Ok(path)
        })
        .collect()
}
