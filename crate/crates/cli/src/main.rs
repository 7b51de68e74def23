//! `liesym`: symmetry analysis and solution checks for the (3+1)-dimensional
//! KdV-type equation from the command line.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Report, Session};
use config::{Overrides, RunConfig};
use liesym::verify::Precision;

/// Exit codes: 0 pass, 1 verification failure, 2 input error, 3 resource limit.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError { code: 2, message: msg.into() }
    }
}

impl From<liesym::Error> for CliError {
    fn from(e: liesym::Error) -> Self {
        let code = match e {
            liesym::Error::ResourceLimit { .. } => 3,
            _ => 2,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<liesym::expr::ParseError> for CliError {
    fn from(e: liesym::expr::ParseError) -> Self {
        CliError::input(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "liesym", version, about = "Lie point symmetries and closed-form solution checks")]
struct Cli {
    /// Equation file (`vars`, `dep`, `eq` lines); defaults to the shipped equation
    #[arg(long, global = true)]
    pde: Option<PathBuf>,
    /// Flat `key = value` file mirroring these flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Catalog of claims; defaults to the shipped catalog
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    /// double, dd or complex
    #[arg(long, global = true)]
    precision: Option<Precision>,
    /// Output file (sample) or directory (pipeline)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the determining system
    Derive {
        /// Reference system to compare with (nullspace equality)
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Solve the determining system under a polynomial ansatz
    Solve {
        #[arg(long)]
        degree: Option<u32>,
        /// Generators to test for membership; defaults to the shipped basis
        #[arg(long)]
        generators: Option<PathBuf>,
    },
    /// Commutator table of the generators
    Table {
        /// Reference table; defaults to the shipped one
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long)]
        generators: Option<PathBuf>,
    },
    /// Closed-form flows of the generators
    Flow {
        /// 1-based generator index; all when omitted
        #[arg(long)]
        field: Option<usize>,
        /// Evaluate the group element at this parameter value
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<String>,
        /// Push this solution forward and check its images
        #[arg(long)]
        apply: Option<String>,
        #[arg(long)]
        generators: Option<PathBuf>,
    },
    /// Check every catalog claim
    Verify {
        /// Also push every exact solution through every flow
        #[arg(long)]
        group_actions: bool,
        #[arg(long, default_value_t = 50)]
        group_action_points: usize,
    },
    /// Evaluate a closed-form solution on a grid and write CSV
    Sample {
        /// Solution with all parameters numeric
        #[arg(long)]
        solution: String,
        /// Axes `sym=min:max:count` and bindings `sym=value`
        #[arg(long)]
        grid: String,
    },
    /// derive, solve, table, flow, verify and sample in sequence
    Pipeline,
}

fn emit(r: &Report, json: bool) {
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&r.json).expect("serializable"));
    } else {
        print!("{}", r.text);
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let degree = match &cli.command {
        Command::Solve { degree, .. } => *degree,
        _ => None,
    };
    let flags = Overrides {
        pde: cli.pde,
        catalog: cli.catalog,
        seed: cli.seed,
        tol: cli.tol,
        points: cli.points,
        precision: cli.precision,
        degree,
        out: cli.out,
        json: cli.json,
    };
    let cfg = RunConfig::from_sources(cli.config.as_deref(), flags)?;
    let json = cfg.json;
    let s = Session::new(cfg)?;
    let report = match &cli.command {
        Command::Derive { golden } => commands::derive(&s, golden.as_deref())?,
        Command::Solve { generators, .. } => commands::solve(&s, s.cfg.degree, generators.as_deref())?,
        Command::Table { compare, generators } => commands::table(&s, compare.as_deref(), generators.as_deref())?,
        Command::Flow { field, epsilon, apply, generators } => commands::flow(
            &s,
            &commands::FlowArgs {
                field: *field,
                epsilon: epsilon.as_deref(),
                apply: apply.as_deref(),
                generators: generators.as_deref(),
            },
        )?,
        Command::Verify { group_actions, group_action_points } => {
            commands::verify(&s, *group_actions, *group_action_points)?
        }
        Command::Sample { solution, grid } => {
            let (r, csv) = commands::sample(&s, solution, grid)?;
            match &s.cfg.out {
                Some(p) => write_file(p, &csv)?,
                None => print!("{csv}"),
            }
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            if s.cfg.out.is_some() {
                eprint!("{}", r.text);
            }
            return Ok(r.passed);
        }
        Command::Pipeline => {
            let (stages, csvs) = commands::pipeline(&s)?;
            let summary = commands::pipeline_json(&s, &stages);
            let passed = summary["passed"].as_bool().unwrap_or(false);
            if let Some(dir) = &s.cfg.out {
                std::fs::create_dir_all(dir)
                    .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
                let text = serde_json::to_string_pretty(&summary).expect("serializable") + "\n";
                write_file(&dir.join("summary.json"), &text)?;
                for (name, csv) in &csvs {
                    write_file(&dir.join(name), csv)?;
                }
            }
            for st in &stages {
                for w in &st.report.warnings {
                    eprintln!("warning: {}: {w}", st.name);
                }
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
            } else {
                for st in &stages {
                    println!("== {} [{}]", st.name, if st.report.passed { "pass" } else { "FAIL" });
                    print!("{}", st.report.text);
                }
                println!("pipeline: {}", if passed { "pass" } else { "FAIL" });
            }
            return Ok(passed);
        }
    };
    emit(&report, json);
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
