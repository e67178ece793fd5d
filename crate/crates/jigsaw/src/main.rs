//! Command-line surface: generate puzzles, solve and classify them, and run
//! the Monte Carlo / exact-bound experiment suites.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error, 3 when a budget
//! prevented a verdict (UNDECIDED-dominated result).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use jigsaw::combinatorics::{
    self, count_boxes, count_piece_types, dup_zero_bound, expected_piece_stats,
    expected_solutions_log10, lattice, uea_probability_bound, window_solutions_log10,
};
use jigsaw::experiments::{self, TrialStats};
use jigsaw::io::{self, ReadMode};
use jigsaw::sampler::{sample_carving, IotaKind, RngStream};
use jigsaw::solver::{classify, enumerate_solution_carvings, SearchBudget, StopReason, Verdict};
use jigsaw::{Assembly, Carving, JigSystem, PieceBox};

#[derive(Parser)]
#[command(name = "jigsaw", version, about = "Random jigsaw puzzle simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SystemArgs {
    /// Grid side length
    #[arg(long)]
    n: usize,
    /// Number of jig types
    #[arg(long)]
    q: u32,
    /// Fitting involution: identity, paired, or mixed:<s>
    #[arg(long, default_value = "identity")]
    iota: String,
}

impl SystemArgs {
    fn system(&self) -> Result<JigSystem, CliError> {
        let kind: IotaKind = self.iota.parse().map_err(usage)?;
        kind.make(self.q).map_err(usage)
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Search node budget; 0 means unlimited
    #[arg(long, default_value_t = 10_000_000)]
    node_budget: u64,
    /// Optional wall-clock timeout (makes runs non-deterministic)
    #[arg(long)]
    timeout_ms: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_nodes: if self.node_budget == 0 { u64::MAX } else { self.node_budget },
            timeout: self.timeout_ms.map(Duration::from_millis),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a uniform random puzzle and write it to a file
    Gen {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output puzzle file
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate the solution carvings of a puzzle or box file
    Solve {
        /// Puzzle or box JSON file (recognized by its fields)
        file: PathBuf,
        /// Stop after this many distinct carvings; 0 enumerates all
        #[arg(long, default_value_t = 0)]
        limit: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Accept unknown fields in the input with a warning
        #[arg(long)]
        lenient: bool,
        /// Write the solution carvings to this JSON file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a puzzle file as MULTIPLE_NONSIMILAR / UEA / UNDECIDED
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        limit: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        lenient: bool,
    },
    /// Classify many sampled puzzles at one (n, q)
    Trials {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        limit: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trials across a list of q values, emitted as CSV
    Sweep {
        /// Grid side length
        #[arg(long)]
        n: usize,
        /// Comma-separated q values, sorted ascending
        #[arg(long)]
        q: String,
        #[arg(long, default_value = "identity")]
        iota: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        limit: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rate at which the planted assembly is k-good
    Kgood {
        #[command(flatten)]
        system: SystemArgs,
        /// Window side (even)
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Monte Carlo feasibility of a reference partial assembly vs the exact
    /// probability
    FeasMc {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reference assembly: two-swap (interior), corner-swap, or planted
        #[arg(long, default_value = "two-swap")]
        config: String,
    },
    /// Enumerate connected lattice subgraphs and check the counting bound
    Subgraphs {
        #[arg(long, default_value_t = 6)]
        max_e: usize,
    },
    /// Exact counting formulas and bounds, one CSV row per (n, q)
    Bounds {
        /// Comma-separated n values
        #[arg(long)]
        n: String,
        /// Comma-separated q values
        #[arg(long)]
        q: String,
        #[arg(long, default_value = "identity")]
        iota: String,
        /// Window side for the window-solutions column
        #[arg(long)]
        k: Option<u64>,
    },
}

enum CliError {
    Usage(String),
    Runtime(String),
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    let values = text
        .split(',')
        .map(|part| part.trim().parse::<T>())
        .collect::<Result<Vec<T>, _>>()
        .map_err(|_| CliError::Usage(format!("bad {what} list {text:?}")))?;
    if values.is_empty() {
        return Err(CliError::Usage(format!("{what} list is empty")));
    }
    Ok(values)
}

fn read_mode(lenient: bool) -> ReadMode {
    if lenient {
        ReadMode::Lenient
    } else {
        ReadMode::Strict
    }
}

/// Loads either a puzzle or a box file, telling them apart by their fields.
fn load_input(
    path: &Path,
    mode: ReadMode,
) -> Result<(PieceBox, JigSystem, Option<Carving>, Vec<String>), CliError> {
    let text = std::fs::read_to_string(path).map_err(runtime)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(runtime)?;
    let is_puzzle = value.get("north").is_some();
    if is_puzzle {
        let loaded = io::parse_puzzle_json(&text, mode).map_err(runtime)?;
        let box_ = jigsaw::box_of(&loaded.carving, &loaded.system);
        Ok((box_, loaded.system, Some(loaded.carving), loaded.warnings))
    } else {
        let loaded = io::parse_box_json(&text, mode).map_err(runtime)?;
        Ok((loaded.pieces, loaded.system, None, loaded.warnings))
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(runtime),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn stop_name(stop: StopReason) -> &'static str {
    match stop {
        StopReason::Exhausted => "exhausted",
        StopReason::LimitReached => "limit",
        StopReason::NodeBudget => "node-budget",
        StopReason::Timeout => "timeout",
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Gen { system, seed, out } => {
            let sys = system.system()?;
            let mut rng = RngStream::master(seed);
            let w = sample_carving(system.n, &sys, &mut rng);
            io::write_puzzle(&out, &w, &sys, Some(seed)).map_err(runtime)?;
            let summary = json!({
                "command": "gen",
                "n": system.n,
                "q": system.q,
                "iota": sys.iota_label(),
                "seed": seed,
                "path": out,
            });
            println!("{summary}");
            Ok(ExitCode::SUCCESS)
        }

        Command::Solve { file, limit, budget, lenient, out } => {
            let (box_, sys, _, warnings) = load_input(&file, read_mode(lenient))?;
            print_warnings(&warnings);
            let result = enumerate_solution_carvings(&box_, &sys, limit, budget.budget())
                .map_err(runtime)?;
            if let Some(path) = &out {
                let solutions: Vec<serde_json::Value> = result
                    .distinct_carvings
                    .iter()
                    .map(|w| serde_json::from_str(&io::puzzle_to_json(w, &sys, None)).unwrap())
                    .collect();
                let doc = json!({ "solutions": solutions });
                std::fs::write(path, serde_json::to_string_pretty(&doc).unwrap())
                    .map_err(runtime)?;
            }
            let summary = json!({
                "command": "solve",
                "distinct_carvings": result.distinct_carvings.len(),
                "exhausted": result.exhausted,
                "nodes_expanded": result.nodes_expanded,
                "duplicate_pairs": result.duplicate_pairs,
                "symmetric_pieces": result.symmetric_pieces,
                "stop": stop_name(result.stop),
            });
            println!("{summary}");
            let starved = matches!(result.stop, StopReason::NodeBudget | StopReason::Timeout);
            Ok(if starved { ExitCode::from(3) } else { ExitCode::SUCCESS })
        }

        Command::Classify { file, limit, budget, lenient } => {
            let (_, sys, carving, warnings) = load_input(&file, read_mode(lenient))?;
            print_warnings(&warnings);
            let Some(w) = carving else {
                return Err(CliError::Usage(
                    "classify needs a puzzle file (a box has no planted carving)".into(),
                ));
            };
            let outcome = classify(&w, &sys, limit, budget.budget());
            let summary = json!({
                "command": "classify",
                "verdict": outcome.verdict.as_str(),
                "uva": outcome.uva,
                "duplicate_pairs": outcome.duplicate_pairs,
                "symmetric_pieces": outcome.symmetric_pieces,
                "distinct_found": outcome.distinct_found,
                "nodes_expanded": outcome.nodes_expanded,
                "exhausted": outcome.exhausted,
                "stop": stop_name(outcome.stop),
            });
            println!("{summary}");
            Ok(if outcome.verdict == Verdict::Undecided {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }

        Command::Trials { system, trials, seed, limit, budget, format, out } => {
            let sys = system.system()?;
            if trials == 0 {
                return Err(CliError::Usage("trials must be at least 1".into()));
            }
            eprintln!("# seed {seed}");
            let stats =
                experiments::run_trials(system.n, &sys, trials, seed, limit, budget.budget());
            let content = match format {
                Format::Csv => format!("{}\n{}\n", TrialStats::csv_header(), stats.csv_row()),
                Format::Json => format!("{}\n", trial_stats_json(&stats)),
            };
            emit(out.as_deref(), &content)?;
            Ok(undecided_exit(&[stats]))
        }

        Command::Sweep { n, q, iota, trials, seed, limit, budget, out } => {
            let qs: Vec<u32> = parse_list(&q, "q")?;
            if qs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::Usage("q list must be strictly increasing".into()));
            }
            let kind: IotaKind = iota.parse().map_err(usage)?;
            eprintln!("# seed {seed}");
            let rows = experiments::sweep(n, &qs, kind, trials, seed, limit, budget.budget())
                .map_err(usage)?;
            let mut content = String::from(TrialStats::csv_header());
            content.push('\n');
            for row in &rows {
                eprintln!("# q={} done (uea_rate {})", row.q, row.uea_rate());
                content.push_str(&row.csv_row());
                content.push('\n');
            }
            emit(out.as_deref(), &content)?;
            Ok(undecided_exit(&rows))
        }

        Command::Kgood { system, k, trials, seed, format } => {
            let sys = system.system()?;
            let stats = experiments::kgood_rate(system.n, &sys, k, trials, seed).map_err(usage)?;
            let (lo, hi) = stats.wilson(1.96);
            let content = match format {
                Format::Csv => format!(
                    "n,q,iota_kind,k,trials,seed,rate,wilson_lo,wilson_hi\n{},{},{},{},{},{},{},{lo},{hi}\n",
                    stats.n,
                    stats.q,
                    sys.iota_label(),
                    stats.k,
                    stats.trials,
                    stats.seed,
                    stats.rate(),
                ),
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "command": "kgood",
                        "n": stats.n,
                        "q": stats.q,
                        "iota": sys.iota_label(),
                        "k": stats.k,
                        "trials": stats.trials,
                        "seed": stats.seed,
                        "rate": stats.rate(),
                        "wilson95": [lo, hi],
                    })
                ),
            };
            print!("{content}");
            Ok(ExitCode::SUCCESS)
        }

        Command::FeasMc { system, trials, seed, config } => {
            let sys = system.system()?;
            let n = system.n;
            let assembly = match config.as_str() {
                "planted" => Assembly::planted(n),
                "corner-swap" => {
                    if n < 2 {
                        return Err(CliError::Usage("corner-swap needs n >= 2".into()));
                    }
                    Assembly::planted_with_swap(n, (0, 0), (n - 1, n - 1)).map_err(usage)?
                }
                "two-swap" => {
                    if n < 4 {
                        return Err(CliError::Usage(
                            "two-swap needs n >= 4 (interior pieces)".into(),
                        ));
                    }
                    Assembly::planted_with_swap(n, (1, 1), (n - 2, n - 2)).map_err(usage)?
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown config {other:?} (expected two-swap, corner-swap or planted)"
                    )));
                }
            };
            let mc = experiments::feasibility_mc(&assembly, &sys, trials, seed).map_err(runtime)?;
            let summary = json!({
                "command": "feas-mc",
                "n": n,
                "q": system.q,
                "iota": sys.iota_label(),
                "config": config,
                "trials": trials,
                "seed": seed,
                "empirical": mc.empirical(),
                "exact": mc.exact,
                "exact_log10": mc.exact_log10,
                "contour_edges": mc.contour_edges,
                "cycles": mc.cycles,
                "abs_diff": mc.abs_diff(),
                "sigma": mc.sigma(),
                "sigma_distance": mc.sigma_distance(),
            });
            println!("{summary}");
            Ok(ExitCode::SUCCESS)
        }

        Command::Subgraphs { max_e } => {
            let table = lattice::enumerate_lattice_subgraphs(max_e).map_err(|e| {
                if max_e > lattice::MAX_ENUMERATION_EDGES {
                    usage(e)
                } else {
                    runtime(e)
                }
            })?;
            println!("e,f,count,bound,within_bound");
            for (&(e, f), &count) in &table.counts {
                let bound = table.bound(e, f).map_err(runtime)?;
                let ok = num_bigint::BigUint::from(count) <= bound;
                println!("{e},{f},{count},{bound},{ok}");
            }
            eprintln!("# all counts within bounds; Euler and degree identities verified");
            Ok(ExitCode::SUCCESS)
        }

        Command::Bounds { n, q, iota, k } => {
            let ns: Vec<u64> = parse_list(&n, "n")?;
            let qs: Vec<u64> = parse_list(&q, "q")?;
            let kind: IotaKind = iota.parse().map_err(usage)?;
            println!(
                "n,q,iota_kind,k,piece_types,boxes,uea_bound,uea_bound_log10,expected_x,expected_y,dup_zero_bound,expected_solutions_log10,window_solutions_log10"
            );
            for &n in &ns {
                if n < 2 {
                    return Err(CliError::Usage("bounds needs n >= 2".into()));
                }
                let k = k.unwrap_or(2);
                for &q in &qs {
                    let q32 = u32::try_from(q)
                        .map_err(|_| CliError::Usage(format!("q = {q} too large")))?;
                    let sys = kind.make(q32).map_err(usage)?;
                    let stats = expected_piece_stats(n, &sys).map_err(runtime)?;
                    let (bound, bound_log10) = uea_probability_bound(n, q);
                    println!(
                        "{n},{q},{},{k},{},{},{}/{},{bound_log10},{}/{},{}/{},{},{},{}",
                        sys.iota_label(),
                        count_piece_types(q),
                        count_boxes(n, q),
                        bound.numer(),
                        bound.denom(),
                        stats.expected_duplicate_pairs.numer(),
                        stats.expected_duplicate_pairs.denom(),
                        stats.expected_symmetric.numer(),
                        stats.expected_symmetric.denom(),
                        dup_zero_bound(n, q).map_err(usage)?,
                        expected_solutions_log10(n, q),
                        window_solutions_log10(n, q, k).map_err(usage)?,
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn trial_stats_json(stats: &TrialStats) -> serde_json::Value {
    let (uea_lo, uea_hi) = stats.wilson_uea(1.96);
    json!({
        "command": "trials",
        "n": stats.n,
        "q": stats.q,
        "iota_kind": stats.iota_kind,
        "trials": stats.trials,
        "seed": stats.seed,
        "uea_rate": stats.uea_rate(),
        "uva_rate": stats.uva_rate(),
        "multiple_rate": stats.multiple_rate(),
        "undecided_rate": stats.undecided_rate(),
        "mean_x": stats.mean_duplicate_pairs(),
        "mean_y": stats.mean_symmetric(),
        "mean_nodes": stats.mean_nodes(),
        "uea_wilson95": [uea_lo, uea_hi],
        "uea_bound_log10": combinatorics::uea_probability_bound(stats.n as u64, stats.q as u64).1,
    })
}

fn undecided_exit(rows: &[TrialStats]) -> ExitCode {
    if rows.iter().any(|r| r.undecided_rate() > 0.5) {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
