use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qubo_energy::formulations::{hens_oracle, qap_oracle, uc_grid_oracle, uc_oracle};
use qubo_energy::qubo::Qubo;
use qubo_energy::solvers::solve;
use qubo_energy_cli::{
    deviation_histogram, deviation_stats, gen_hens, gen_uc, read_csv, run_bench, write_csv,
    write_histogram_csv, BenchError, Family, HensGenSpec, Penalties, Problem, Result, SolverSpec,
    Suite, UcGenSpec,
};

#[derive(Parser)]
#[command(
    name = "qubo-energy",
    version,
    about = "Formulate, solve and benchmark QUBO models of energy problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Qap,
    Uc,
    Hens,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Qap => Family::Qap,
            FamilyArg::Uc => Family::Uc,
            FamilyArg::Hens => Family::Hens,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    Uc,
    Hens,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Brute,
    Sa,
    Tabu,
    Decomp,
    Vqe,
}

impl SolverArg {
    fn name(self) -> &'static str {
        match self {
            SolverArg::Brute => "brute",
            SolverArg::Sa => "sa",
            SolverArg::Tabu => "tabu",
            SolverArg::Decomp => "decomp",
            SolverArg::Vqe => "vqe",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the QUBO of an instance (QAPLIB text for qap, JSON otherwise).
    Formulate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long = "in")]
        input: PathBuf,
        /// Grid points per unit or match (UC default: chosen automatically, HENS: 4).
        #[arg(long)]
        grids: Option<usize>,
        #[arg(long)]
        penalty_a: Option<f64>,
        #[arg(long)]
        penalty_b: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Minimize a QUBO file and write the sample set.
    Solve {
        #[arg(long)]
        qubo: PathBuf,
        #[arg(long, value_enum)]
        solver: SolverArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        reads: Option<usize>,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum of an instance.
    Oracle {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long = "in")]
        input: PathBuf,
        /// UC only: optimize over this grid instead of continuous outputs.
        #[arg(long)]
        grids: Option<usize>,
    },
    /// Write a random instance.
    Generate {
        #[arg(long, value_enum)]
        family: GenFamily,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        units: usize,
        #[arg(long, default_value_t = 3)]
        sources: usize,
        #[arg(long, default_value_t = 3)]
        sinks: usize,
        #[arg(long, default_value_t = 4)]
        grids: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a suite file and write the CSV report.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a CSV report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        histogram_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        bin_width: f64,
    },
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| BenchError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| BenchError::Io {
            path: path.to_path_buf(),
            source: e,
        })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| BenchError::Io {
            path: path.to_path_buf(),
            source: e,
        })
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Formulate {
            family,
            input,
            grids,
            penalty_a,
            penalty_b,
            out,
        } => {
            let problem = Problem::read(family.into(), &input, grids)?;
            let (qubo, _) = problem.formulate(Penalties {
                a: penalty_a,
                b: penalty_b,
            })?;
            write_text(&out, &serde_json::to_string_pretty(&qubo)?)?;
            eprintln!("{} variables", qubo.num_vars());
        }
        Command::Solve {
            qubo,
            solver,
            seed,
            reads,
            out,
        } => {
            let model: Qubo = serde_json::from_str(&read_text(&qubo)?)?;
            let strategy = SolverSpec {
                name: solver.name().into(),
                seed,
                reads,
            }
            .strategy()?;
            let set = solve(&model, &strategy)?;
            if set.max_energy_error(&model)? != 0.0 {
                return Err(BenchError::Invariant(
                    "sample energies do not match the model".into(),
                ));
            }
            let text = set.to_json();
            match out {
                Some(path) => write_text(&path, &text)?,
                None => println!("{text}"),
            }
            if let Some(best) = set.best() {
                eprintln!("best energy {} ({})", best.energy, best.assignment);
            }
        }
        Command::Oracle {
            family,
            input,
            grids,
        } => {
            let text = read_text(&input)?;
            let value = match Family::from(family) {
                Family::Qap => {
                    let Problem::Qap(inst) = Problem::parse(Family::Qap, &text, None)? else {
                        unreachable!()
                    };
                    let s = qap_oracle(&inst)?;
                    json!({"family": "qap", "objective": s.objective, "perm": s.perm})
                }
                Family::Uc => {
                    let inst = serde_json::from_str(&text)?;
                    let s = match grids {
                        Some(n) => {
                            let Problem::Uc(d) = Problem::from_uc(&inst, Some(n))? else {
                                unreachable!()
                            };
                            uc_grid_oracle(&d)?
                        }
                        None => uc_oracle(&inst)?,
                    };
                    json!({"family": "uc", "objective": s.total, "solution": s})
                }
                Family::Hens => {
                    let s = hens_oracle(&serde_json::from_str(&text)?)?;
                    json!({"family": "hens", "objective": s.total_cost, "solution": s})
                }
            };
            println!("{value}");
        }
        Command::Generate {
            family,
            seed,
            units,
            sources,
            sinks,
            grids,
            out,
        } => {
            let text = match family {
                GenFamily::Uc => {
                    let g = gen_uc(&UcGenSpec {
                        units,
                        grids,
                        seed,
                        ..UcGenSpec::default()
                    })?;
                    serde_json::to_string_pretty(&g.instance)?
                }
                GenFamily::Hens => {
                    let g = gen_hens(&HensGenSpec {
                        sources,
                        sinks,
                        grids,
                        seed,
                        ..HensGenSpec::default()
                    })?;
                    serde_json::to_string_pretty(&g.instance)?
                }
            };
            write_text(&out, &text)?;
        }
        Command::Bench { suite, out } => {
            let spec = Suite::read(&suite)?;
            let base = suite.parent().unwrap_or(Path::new("."));
            let report = run_bench(&spec, base)?;
            for id in &report.external_references {
                eprintln!("{id}: reference is an external best-known value");
            }
            write_csv(&report.rows, create(&out)?)?;
        }
        Command::Report {
            input,
            stats,
            histogram_csv,
            bin_width,
        } => {
            let file = File::open(&input).map_err(|e| BenchError::Io {
                path: input.clone(),
                source: e,
            })?;
            let rows = read_csv(BufReader::new(file))?;
            if stats || histogram_csv.is_none() {
                let mut out = io::stdout().lock();
                for (family, s) in deviation_stats(&rows) {
                    writeln!(out, "{family}: {s}").map_err(|e| BenchError::Io {
                        path: "<stdout>".into(),
                        source: e,
                    })?;
                }
            }
            if let Some(path) = histogram_csv {
                write_histogram_csv(&deviation_histogram(&rows, bin_width)?, create(&path)?)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
