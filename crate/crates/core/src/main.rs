use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use induced_spin::cli::{cg_table_json, emit_cg_table, run_suite, write_atomic, SuiteConfig};
use induced_spin::fock::{fock_space, ModeBasis};
use induced_spin::many_body::Statistics;
use induced_spin::minkowski::TimelikeUnitVector;
use induced_spin::wavepacket::noncovariance_demo;

#[derive(Parser)]
#[command(name = "induced-spin", version, about = "Checks for spin on a timelike foliation")]
struct Cli {
    /// Overrides the seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML suite configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites.
    Verify,
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Clebsch-Gordan table for j1 ⊗ j2.
    Cg { j1: f64, j2: f64 },
    Dump {
        #[command(subcommand)]
        what: Dump,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Boost a packet under the momentum-induced law and compare ⟨x⟩.
    Noncovariance,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stats {
    Boson,
    Fermion,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpKind {
    Create,
    Annihilate,
    Number,
}

#[derive(Subcommand)]
enum Dump {
    /// Occupation basis of a truncated Fock space, optionally one operator.
    Fock {
        #[arg(long, default_value_t = 3)]
        modes: usize,
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Stats::Fermion)]
        statistics: Stats,
        #[arg(long, value_enum)]
        operator: Option<OpKind>,
        #[arg(long, default_value_t = 0)]
        mode: usize,
    },
}

enum Failure {
    Usage(String),
    Checks,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => write_atomic(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(cli: &Cli) -> Result<SuiteConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => SuiteConfig::load(path).map_err(usage)?,
        None => SuiteConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Verify => {
            let cfg = load_config(&cli)?;
            let report = run_suite(&cfg).map_err(usage)?;
            let text = match cli.format {
                Format::Json => json(&report),
                Format::Csv => report.to_csv(),
            };
            emit(&cli, &text)?;
            for r in report.records.iter().filter(|r| !r.passed) {
                eprintln!("FAIL {} residual {:e} tolerance {:e}", r.name, r.residual, r.tolerance);
            }
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Command::Demo { which: Demo::Noncovariance } => {
            let cfg = load_config(&cli)?;
            let r = noncovariance_demo(&cfg.demo).map_err(usage)?;
            let text = match cli.format {
                Format::Json => json(&serde_json::json!({ "report": r, "ratio": r.ratio() })),
                Format::Csv => {
                    let mut s = String::from("quantity,mu0,mu1,mu2,mu3\n");
                    for (name, v) in [("before", r.before), ("expected", r.expected), ("observed", r.observed)] {
                        let c = v.as_vector();
                        s.push_str(&format!("{name},{:.15e},{:.15e},{:.15e},{:.15e}\n", c[0], c[1], c[2], c[3]));
                    }
                    s.push_str(&format!("deviation,{:.15e},,,\n", r.deviation));
                    s.push_str(&format!("rotation_deviation,{:.15e},,,\n", r.rotation_deviation));
                    s
                }
            };
            emit(&cli, &text)?;
            if r.deviation > 10.0 * r.quadrature_tolerance {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Command::Cg { j1, j2 } => {
            let text = match cli.format {
                Format::Csv => emit_cg_table(*j1, *j2).map_err(usage)?,
                Format::Json => json(&cg_table_json(*j1, *j2).map_err(usage)?),
            };
            emit(&cli, &text)
        }
        Command::Dump {
            what:
                Dump::Fock {
                    modes,
                    n_max,
                    statistics,
                    operator,
                    mode,
                },
        } => {
            let stats = match statistics {
                Stats::Boson => Statistics::Boson,
                Stats::Fermion => Statistics::Fermion,
            };
            let basis = ModeBasis::new(TimelikeUnitVector::rest(), *modes).map_err(usage)?;
            let space = fock_space(basis, stats, *n_max).map_err(usage)?;
            let op = match operator {
                None => None,
                Some(OpKind::Create) => Some(space.create_mode(*mode).map_err(usage)?),
                Some(OpKind::Annihilate) => Some(space.annihilate_mode(*mode).map_err(usage)?),
                Some(OpKind::Number) => Some(space.number_operator()),
            };
            let text = match (cli.format, &op) {
                (Format::Json, None) => json(&space.dump_json()),
                (Format::Json, Some(op)) => json(&serde_json::json!({ "space": space.dump_json(), "operator": op.dump_json() })),
                (Format::Csv, None) => space.dump_csv(),
                (Format::Csv, Some(op)) => op.dump_csv(),
            };
            emit(&cli, &text)
        }
    }
}
