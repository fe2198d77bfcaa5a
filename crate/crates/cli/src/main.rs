//! Command-line front end: multiplication, integration, enumeration, Gram
//! matrices, rank tables and relation checks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use strata_core::integrals::global;
use strata_core::parse::{sum_to_json, GraphJson};
use strata_core::{
    decorated_basis, gram, integrate_graph, multiply, parse_sum, rank_table, verify_relation, EvaluationKind, FormalSum,
    SpaceKind, StrataError, Q,
};

#[derive(Parser, Debug)]
#[command(name = "strata", version, about = "Exact computations with decorated strata classes")]
struct Cli {
    /// Intersection number cache, loaded at start and written back at exit.
    #[arg(long, global = true, env = "STRATA_CACHE")]
    cache: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiply two formal sums.
    Multiply {
        x: PathBuf,
        y: PathBuf,
        /// Output file (default: stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SumFormat::Text)]
        format: SumFormat,
    },
    /// Integrate a formal sum of top degree against an evaluation class.
    Integrate {
        file: PathBuf,
        #[arg(long, default_value = "fundamental")]
        kind: EvaluationKind,
    },
    /// List the decorated spanning set in codimension k.
    Enumerate {
        #[command(flatten)]
        target: Target,
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Gram matrix of the pairing between codimensions k and top - k.
    Gram {
        #[command(flatten)]
        target: Target,
        #[arg(short)]
        k: usize,
        /// Factor applied to every entry when printing.
        #[arg(long, default_value = "1")]
        scale: Q,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Ranks of the pairing in every codimension.
    RankTable {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Pair a relation with the complementary spanning set.
    VerifyRelation {
        file: PathBuf,
        #[command(flatten)]
        target: Target,
        /// Codimension of the relation (default: read from the file).
        #[arg(short)]
        k: Option<usize>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Target {
    #[arg(short)]
    g: u32,
    #[arg(short)]
    n: usize,
    #[arg(long, default_value = "mbar")]
    space: SpaceKind,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SumFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TableFormat {
    Csv,
    Json,
}

/// Outcome of a successful run: output text and whether a check passed.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, passed: true }
    }
}

fn read_sum(path: &Path) -> Result<FormalSum> {
    let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_sum(&src).with_context(|| format!("parsing {}", path.display()))
}

fn check_stable(t: &Target) -> Result<()> {
    if 2 * t.g as usize + t.n < 3 {
        return Err(anyhow!("unstable (g, n) = ({}, {})", t.g, t.n));
    }
    Ok(())
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Multiply { x, y, output, format } => {
            let p = multiply(&read_sum(&x)?, &read_sum(&y)?)?;
            let text = match format {
                SumFormat::Text => p.to_string(),
                SumFormat::Json => format!("{}\n", serde_json::to_string_pretty(&sum_to_json(&p))?),
            };
            match output {
                Some(path) => {
                    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                    Ok(Outcome::ok(String::new()))
                }
                None => Ok(Outcome::ok(text)),
            }
        }
        Command::Integrate { file, kind } => {
            let s = read_sum(&file)?;
            let mut total = Q::from_integer(0.into());
            for (g, c) in s.iter() {
                total += c * integrate_graph(g, kind)?;
            }
            Ok(Outcome::ok(format!("{total}\n")))
        }
        Command::Enumerate { target, k, format } => {
            check_stable(&target)?;
            let basis = decorated_basis(target.g, target.n, k, target.space);
            let text = match format {
                TableFormat::Csv => {
                    let mut s = String::from("index,edges,graph\n");
                    for (i, b) in basis.iter().enumerate() {
                        writeln!(s, "{i},{},\"{b}\"", b.graph().num_edges())?;
                    }
                    s
                }
                TableFormat::Json => {
                    let list: Vec<GraphJson> = basis.iter().map(GraphJson::from_graph).collect();
                    format!("{}\n", serde_json::to_string_pretty(&list)?)
                }
            };
            Ok(Outcome::ok(text))
        }
        Command::Gram { target, k, scale, format } => {
            check_stable(&target)?;
            let m = gram(target.g, target.n, k, target.space);
            let text = match format {
                TableFormat::Csv => m.to_csv(&scale),
                TableFormat::Json => format!("{}\n", serde_json::to_string_pretty(&m.to_json(&scale))?),
            };
            Ok(Outcome::ok(text))
        }
        Command::RankTable { target, format } => {
            check_stable(&target)?;
            let ranks = rank_table(target.g, target.n, target.space);
            let text = match format {
                TableFormat::Csv => {
                    let parts: Vec<String> = ranks.iter().map(ToString::to_string).collect();
                    format!("{}\n", parts.join(","))
                }
                TableFormat::Json => format!(
                    "{}\n",
                    serde_json::json!({"g": target.g, "n": target.n, "space": target.space.to_string(), "ranks": ranks})
                ),
            };
            Ok(Outcome::ok(text))
        }
        Command::VerifyRelation { file, target, k } => {
            check_stable(&target)?;
            let r = read_sum(&file)?;
            let k = match k {
                Some(k) => k,
                None => r.homogeneous_codim().ok_or(StrataError::DegreeMismatch(0))?,
            };
            let rep = verify_relation(&r, target.g, target.n, k, target.space)?;
            let mut text = String::new();
            for (c, v) in rep.failures() {
                writeln!(text, "nonzero {v} {c}")?;
            }
            writeln!(
                text,
                "{} ({} pairings, {} nonzero)",
                if rep.passed() { "PASS" } else { "FAIL" },
                rep.values.len(),
                rep.failures().count()
            )?;
            Ok(Outcome {
                text,
                passed: rep.passed(),
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    if let Some(path) = &cli.cache {
        if path.exists() {
            match global().load(path) {
                Ok(n) => log::info!("loaded {n} cached values from {}", path.display()),
                Err(e) => log::warn!("ignoring cache {}: {e}", path.display()),
            }
        }
    }
    let result = run(cli.command);
    if let Some(path) = &cli.cache {
        if let Err(e) = global().snapshot(path) {
            log::warn!("could not write cache {}: {e}", path.display());
        }
    }
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
