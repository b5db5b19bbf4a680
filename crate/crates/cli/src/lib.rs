//! Library side of the `prodesign` command: loading markets, running a
//! solver and producing the JSON run report.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};
use std::time::Instant;

use prodesign_core::format::{read_csv, read_json};
use prodesign_core::{
    brute_force_optimum, evaluate, solve_approx, solve_exact_1d_with_stats, DepthMode, Error,
    LevelReport, Market, ProfitReport, Solution, SweepStats,
};
use serde::Serialize;
use thiserror::Error as ThisError;

/// Version of the report layout. Bump on any field change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[value(name = "exact1d")]
    Exact1d,
    Approx,
    Bruteforce,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub algorithm: Algorithm,
    pub epsilon: Option<f64>,
    pub depth_mode: DepthMode,
    pub seed: u64,
    pub prune: bool,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, algorithm: Algorithm) -> Self {
        Self {
            input: input.into(),
            algorithm,
            epsilon: None,
            depth_mode: DepthMode::Exact,
            seed: 0,
            prune: false,
            output: None,
        }
    }
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("internal check failed: {0}")]
    Unverified(String),
}

impl CliError {
    /// Process exit code: 3 for guard breaches, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::GuardExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

/// A loaded market and how many dominated customers were dropped from it.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedMarket {
    pub market: Market,
    pub pruned: usize,
}

fn is_json(path: &Path, text: &str) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => true,
        Some(ext) if ext.eq_ignore_ascii_case("csv") => false,
        _ => text.trim_start().starts_with('{'),
    }
}

/// Reads a CSV or JSON customer file (by extension, else by content). With
/// `prune`, dominated customers are dropped with a warning; without it they
/// are an error listing the violating pairs.
pub fn load_market(path: &Path, prune: bool) -> Result<LoadedMarket, CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut text = String::new();
    BufReader::new(File::open(path).map_err(io)?)
        .read_to_string(&mut text)
        .map_err(io)?;
    let customers = if is_json(path, &text) {
        read_json(text.as_bytes())?
    } else {
        read_csv(text.as_bytes())?
    };
    if prune {
        let (market, pruned) = Market::pruned(customers)?;
        if pruned > 0 {
            log::warn!(
                "dropped {pruned} dominated customer(s) from {}",
                path.display()
            );
        }
        Ok(LoadedMarket { market, pruned })
    } else {
        Ok(LoadedMarket {
            market: Market::new(customers)?,
            pruned: 0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarketSummary {
    pub n: usize,
    pub d: usize,
    /// Largest customer margin.
    pub r: f64,
    pub pruned: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunResult {
    Profitable {
        price: f64,
        qualities: Vec<f64>,
        ppu: f64,
        buyers: usize,
        profit: f64,
    },
    NoProfitableProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Diagnostics {
    Sweep(SweepStats),
    Approx {
        levels_used: usize,
        levels: Vec<LevelReport>,
    },
    None {},
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub market: MarketSummary,
    pub result: RunResult,
    pub diagnostics: Diagnostics,
    pub timing_ms: f64,
}

impl RunReport {
    /// Canonical JSON: fixed key order, shortest round-trip decimals.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Same as [`to_json`](Self::to_json) with the timing zeroed, for
    /// comparing runs.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        copy.timing_ms = 0.0;
        copy.to_json()
    }
}

impl RunConfig {
    /// Checks the rules that do not depend on the input: epsilon is required
    /// for approx, only allowed there, and must lie in (0, 1).
    pub fn validate(&self) -> Result<(), CliError> {
        match (self.algorithm, self.epsilon) {
            (Algorithm::Approx, None) => Err(CliError::Usage(
                "--epsilon is required with --algorithm approx".into(),
            )),
            (Algorithm::Approx, Some(e)) if !(e > 0.0 && e < 1.0) => Err(CliError::Usage(format!(
                "--epsilon must lie strictly between 0 and 1, got {e}"
            ))),
            (Algorithm::Exact1d | Algorithm::Bruteforce, Some(_)) => Err(CliError::Usage(
                "--epsilon applies only to --algorithm approx".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Re-evaluates the solver's product so only verified numbers are emitted.
fn verified(market: &Market, solution: &Solution) -> Result<RunResult, CliError> {
    let Some(report) = solution.report() else {
        return Ok(RunResult::NoProfitableProduct);
    };
    let again: ProfitReport = evaluate(market, &report.product)?;
    if &again != report {
        return Err(CliError::Unverified(format!(
            "solver reported {report:?}, re-evaluation gives {again:?}"
        )));
    }
    Ok(RunResult::Profitable {
        price: again.product.price,
        qualities: again.product.qualities,
        ppu: again.ppu,
        buyers: again.buyers,
        profit: again.profit,
    })
}

pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let loaded = load_market(&config.input, config.prune)?;
    let market = &loaded.market;
    if config.algorithm == Algorithm::Exact1d && market.dim() != 1 {
        return Err(CliError::Usage(format!(
            "exact1d needs a one-dimensional market, input has d = {}",
            market.dim()
        )));
    }
    log::info!(
        "solving n = {} d = {} with {:?}",
        market.len(),
        market.dim(),
        config.algorithm
    );

    let start = Instant::now();
    let (solution, diagnostics) = match config.algorithm {
        Algorithm::Exact1d => {
            let out = solve_exact_1d_with_stats(market, false)?;
            (out.solution, Diagnostics::Sweep(out.stats))
        }
        Algorithm::Approx => {
            let eps = config.epsilon.expect("checked");
            let out = solve_approx(market, eps, config.depth_mode, config.seed)?;
            let diagnostics = Diagnostics::Approx {
                levels_used: out.levels.len(),
                levels: out.levels,
            };
            (out.solution, diagnostics)
        }
        Algorithm::Bruteforce => (brute_force_optimum(market)?, Diagnostics::None {}),
    };
    let timing_ms = start.elapsed().as_secs_f64() * 1e3;
    let result = verified(market, &solution)?;

    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        market: MarketSummary {
            n: market.len(),
            d: market.dim(),
            r: market.best_customer().1,
            pruned: loaded.pruned,
        },
        result,
        diagnostics,
        timing_ms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(suffix: &str, body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_single_row_csv() {
        let f = file(".csv", "price,q1\n2,1\n");
        let m = load_market(f.path(), false).unwrap();
        assert_eq!(m.market.len(), 1);
        assert_eq!(m.market.customers()[0].price, 2.0);
        assert_eq!(m.market.customers()[0].qualities, vec![1.0]);
    }

    #[test]
    fn dimension_error_names_customer() {
        let f = file(
            ".json",
            r#"{"dim":1,"customers":[{"price":2,"qualities":[1]},{"price":3,"qualities":[1,2]}]}"#,
        );
        let err = load_market(f.path(), false).unwrap_err();
        assert!(err.to_string().contains("customer 1"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn prune_counts_dominated_customers() {
        // (3, [0]) pays more for less than (2, [1]).
        let f = file(".csv", "price,q1\n2,1\n3,0\n");
        assert!(matches!(
            load_market(f.path(), false),
            Err(CliError::Core(Error::NotPareto(_)))
        ));
        let m = load_market(f.path(), true).unwrap();
        assert_eq!(m.pruned, 1);
        assert_eq!(m.market.len(), 1);
    }

    #[test]
    fn content_sniffing_without_extension() {
        let f = file("", r#"{"dim":1,"customers":[{"price":2,"qualities":[1]}]}"#);
        assert_eq!(load_market(f.path(), false).unwrap().market.len(), 1);
    }

    #[test]
    fn exact1d_report() {
        let f = file(".csv", "price,q1\n3,1\n2,0\n");
        let report = run(&RunConfig::new(f.path(), Algorithm::Exact1d)).unwrap();
        match &report.result {
            RunResult::Profitable { profit, .. } => assert_eq!(*profit, 2.0),
            other => panic!("{other:?}"),
        }
        let json = report.to_json();
        assert!(json.contains("\"profit\": 2.0"), "{json}");
        assert!(json.contains("\"schema_version\": 1"));
    }

    #[test]
    fn config_errors() {
        let f = file(".csv", "price,q1,q2\n3,1,0\n");
        let mut c = RunConfig::new(f.path(), Algorithm::Approx);
        c.epsilon = Some(1.5);
        assert_eq!(run(&c).unwrap_err().exit_code(), 2);
        c.epsilon = None;
        assert_eq!(run(&c).unwrap_err().exit_code(), 2);
        let c = RunConfig::new(f.path(), Algorithm::Exact1d);
        assert_eq!(run(&c).unwrap_err().exit_code(), 2);
        let mut c = RunConfig::new(f.path(), Algorithm::Bruteforce);
        c.epsilon = Some(0.5);
        assert_eq!(run(&c).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn guard_breach_exit_code() {
        let err = CliError::Core(Error::GuardExceeded {
            what: "x",
            size: 2,
            limit: 1,
        });
        assert_eq!(err.exit_code(), 3);
    }
}
