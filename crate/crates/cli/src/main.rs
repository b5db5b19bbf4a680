use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prodesign_cli::{run, Algorithm, CliError, RunConfig};
use prodesign_core::format::{write_csv, write_json};
use prodesign_core::{
    arrangement_stats, chained_homothets, clustered_homothets, element_uniqueness_instance,
    random_pareto_market, solve_exact_1d, DepthMode,
};
use rand::{Rng, SeedableRng};
use serde::Serialize;

/// Profit-maximizing product design against a saturated market.
///
/// Set PRODESIGN_LOG (error, warn, info, debug) to change the log level.
#[derive(Parser)]
#[command(name = "prodesign", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a market file and print a JSON report.
    Solve(SolveArgs),
    /// Write a generated market file.
    Gen(GenArgs),
    /// Scaling and size measurements.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// Required with `approx`, in (0, 1).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = DepthArg::Exact)]
    depth_mode: DepthArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Drop dominated customers instead of rejecting the file.
    #[arg(long)]
    prune: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DepthArg {
    Exact,
    #[value(name = "monte_carlo", alias = "monte-carlo")]
    MonteCarlo,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Kind {
    Random,
    ElementUniqueness,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coordinates are drawn from 0..=MAX.
    #[arg(long, default_value_t = 1000)]
    max: i64,
    /// Explicit values for `element-uniqueness`; random ones otherwise.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Vec<i64>,
    /// Defaults to the output extension, else CSV.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Time the exact 1-D sweep over growing random markets.
    Sweep {
        #[arg(long, value_delimiter = ',', default_values_t = [250_000usize, 500_000, 1_000_000])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Arrangement vertex counts for planar families of bounded depth.
    Arrangement {
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Family::Clusters, Family::Chain])]
        family: Vec<Family>,
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8])]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 400, 1600])]
        n: Vec<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Family {
    Clusters,
    Chain,
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |e: std::io::Error| CliError::Io {
            path,
            message: e.to_string(),
        }
    };
    match output {
        Some(path) => std::fs::write(path, text).map_err(io(path)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(io(Path::new("<stdout>"))),
    }
}

fn solve(args: SolveArgs) -> Result<(), CliError> {
    let config = RunConfig {
        input: args.input,
        algorithm: args.algorithm,
        epsilon: args.epsilon,
        depth_mode: match args.depth_mode {
            DepthArg::Exact => DepthMode::Exact,
            DepthArg::MonteCarlo => DepthMode::MonteCarlo,
        },
        seed: args.seed,
        prune: args.prune,
        output: args.output,
    };
    let report = run(&config)?;
    emit(config.output.as_deref(), &report.to_json())
}

fn generate(args: GenArgs) -> Result<(), CliError> {
    let market = match args.kind {
        Kind::Random => random_pareto_market(args.n, args.dim, args.seed, 0..=args.max)?,
        Kind::ElementUniqueness => {
            let values = if args.values.is_empty() {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
                (0..args.n).map(|_| rng.gen_range(0..=args.max)).collect()
            } else {
                args.values
            };
            element_uniqueness_instance(&values)?
        }
    };
    let format =
        args.format
            .unwrap_or_else(|| match args.output.as_ref().and_then(|p| p.extension()) {
                Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
                _ => Format::Csv,
            });
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(&mut buf, market.customers())?,
        Format::Json => {
            write_json(&mut buf, market.customers())?;
            buf.push(b'\n');
        }
    }
    emit(
        args.output.as_deref(),
        &String::from_utf8(buf).expect("utf-8"),
    )
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    min_ms: f64,
    ratio_to_previous: Option<f64>,
}

#[derive(Serialize)]
struct ArrangementRow {
    family: Family,
    k: usize,
    n: usize,
    max_depth: usize,
    vertex_count: Option<usize>,
    pairwise_intersections: usize,
    /// `vertex_count / (n k)`.
    ratio: Option<f64>,
}

fn bench(cmd: BenchCommand) -> Result<(), CliError> {
    let text = match cmd {
        BenchCommand::Sweep {
            sizes,
            repeats,
            seed,
        } => {
            let mut rows: Vec<SweepRow> = Vec::new();
            for (i, &n) in sizes.iter().enumerate() {
                let market = random_pareto_market(n, 1, seed + i as u64, 0..=1_000_000_000)?;
                let mut best = f64::INFINITY;
                for _ in 0..repeats.max(1) {
                    let start = Instant::now();
                    std::hint::black_box(solve_exact_1d(&market)?);
                    best = best.min(start.elapsed().as_secs_f64() * 1e3);
                }
                log::info!("sweep n = {n}: {best:.1} ms");
                let ratio = rows.last().map(|r| best / r.min_ms);
                rows.push(SweepRow {
                    n,
                    min_ms: best,
                    ratio_to_previous: ratio,
                });
            }
            serde_json::to_string_pretty(&rows).expect("rows serialize")
        }
        BenchCommand::Arrangement { family, k, n } => {
            let mut rows = Vec::new();
            for &fam in &family {
                for &k in &k {
                    for &n in &n {
                        let set = match fam {
                            Family::Clusters => clustered_homothets(n, k),
                            Family::Chain => chained_homothets(n, k),
                        };
                        let st = arrangement_stats(&set)?;
                        rows.push(ArrangementRow {
                            family: fam,
                            k,
                            n,
                            max_depth: st.max_depth,
                            vertex_count: st.vertex_count,
                            pairwise_intersections: st.pairwise_intersections,
                            ratio: st.vertex_count.map(|v| v as f64 / (n * k) as f64),
                        });
                    }
                }
            }
            serde_json::to_string_pretty(&rows).expect("rows serialize")
        }
    };
    emit(None, &(text + "\n"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PRODESIGN_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Gen(args) => generate(args),
        Command::Bench(cmd) => bench(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
