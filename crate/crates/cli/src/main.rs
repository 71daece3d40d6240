// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use qmc_core::analysis::{self, ellipse, AlgorithmOptions, GridSpec};
use qmc_core::error::SdpError;
use qmc_core::oracle::DEFAULT_QUBIT_CAP;
use qmc_core::{
    build_hamiltonian, build_moment_structure, matching_state_energy, max_energy, max_weight_matching, read_graph,
    solve_sdp, Graph, Level, SolverOptions,
};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "qmc", version, about = "Quantum Max Cut approximation via the level-2 moment relaxation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full algorithm and report both candidate states.
    Solve {
        /// Edge-list file, or `-` for standard input.
        graph: String,
        #[arg(long, default_value_t = 2)]
        level: u8,
        /// Solver tolerance.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Product-state roundings; the best is kept.
        #[arg(long, default_value_t = 64)]
        trials: u64,
        #[arg(long, default_value_t = 200_000)]
        max_iter: usize,
    },
    /// Exact maximum energy by dense diagonalization.
    Oracle { graph: String },
    /// Maximum weight matching and its singlet-state energy.
    Matching { graph: String },
    /// Solve the relaxation and audit the monogamy inequalities.
    Audit {
        graph: String,
        /// Audit tolerance.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 2)]
        level: u8,
    },
    /// Evaluate the max-min ratio of the combined algorithm.
    CertifyAlpha {
        /// Scale of the fractional matching fed to the matching branch.
        #[arg(long, default_value_t = 0.8)]
        scale: f64,
        /// Pin the mixing weight instead of maximizing over it.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Boundary of the two-edge feasible region as CSV.
    EllipseData {
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
}

enum Failure {
    Input(anyhow::Error),
    Solver(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let non_convergence = matches!(
            e.downcast_ref::<qmc_core::Error>(),
            Some(qmc_core::Error::Sdp(SdpError::NonConvergence { .. }))
        ) || matches!(e.downcast_ref::<SdpError>(), Some(SdpError::NonConvergence { .. }));
        if non_convergence {
            Failure::Solver(e)
        } else {
            Failure::Input(e)
        }
    }
}

fn load_graph(path: &str) -> anyhow::Result<Graph> {
    let mut text = Vec::new();
    if path == "-" {
        io::stdin().read_to_end(&mut text).context("reading standard input")?;
    } else {
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut text))
            .with_context(|| format!("reading {path}"))?;
    }
    read_graph(text.as_slice()).with_context(|| format!("parsing {path}"))
}

fn level(k: u8) -> anyhow::Result<Level> {
    Ok(Level::try_from(k)?)
}

/// Sorted keys come from `serde_json`'s default `BTreeMap` objects.
fn versioned(v: impl serde::Serialize) -> anyhow::Result<String> {
    let mut value = serde_json::to_value(v)?;
    match &mut value {
        Value::Object(map) => {
            map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        }
        _ => bail!("report is not a JSON object"),
    }
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

fn run(cmd: Command) -> Result<String, Failure> {
    match cmd {
        Command::Solve { graph, level: k, tol, seed, trials, max_iter } => {
            let g = load_graph(&graph)?;
            if !(tol > 0.0) {
                return Err(Failure::Input(anyhow::anyhow!("--tol must be positive")));
            }
            if trials == 0 {
                return Err(Failure::Input(anyhow::anyhow!("--trials must be positive")));
            }
            let opts = AlgorithmOptions {
                level: level(k)?,
                seed,
                trials,
                solver: SolverOptions { tol, max_iter, ..SolverOptions::default() },
                ..AlgorithmOptions::default()
            };
            let report = analysis::run_algorithm(&g, &opts).map_err(anyhow::Error::from)?;
            Ok(versioned(&report)?)
        }
        Command::Oracle { graph } => {
            let g = load_graph(&graph)?;
            let h = build_hamiltonian(&g, DEFAULT_QUBIT_CAP).map_err(anyhow::Error::from)?;
            let report = max_energy(&h).map_err(anyhow::Error::from)?;
            Ok(versioned(json!({ "n": g.num_vertices(), "lambda_max": report.lambda_max }))?)
        }
        Command::Matching { graph } => {
            let g = load_graph(&graph)?;
            let m = max_weight_matching(&g);
            let energy = matching_state_energy(&m, &g).map_err(anyhow::Error::from)?;
            Ok(versioned(json!({
                "n": g.num_vertices(),
                "edges": m.matched_edges(),
                "pairs": m.pairs(),
                "weight": m.weight(&g),
                "energy": energy,
            }))?)
        }
        Command::Audit { graph, tol, level: k } => {
            let g = load_graph(&graph)?;
            if !(tol >= 0.0) {
                return Err(Failure::Input(anyhow::anyhow!("--tol must be nonnegative")));
            }
            let s = build_moment_structure(&g, level(k)?).map_err(anyhow::Error::from)?;
            let sol = solve_sdp(&s, &g, &SolverOptions::default()).map_err(anyhow::Error::from)?;
            Ok(versioned(analysis::audit(&sol, &g, tol))?)
        }
        Command::CertifyAlpha { scale, p } => {
            if !(scale > 0.0 && scale <= 1.0) {
                return Err(Failure::Input(anyhow::anyhow!("--scale must lie in (0, 1]")));
            }
            match p {
                Some(p) if !(0.0..=1.0).contains(&p) => Err(Failure::Input(anyhow::anyhow!("--p must lie in [0, 1]"))),
                Some(p) => Ok(versioned(analysis::inner_minimum(p, scale, GridSpec::default()))?),
                None => Ok(versioned(analysis::certify_alpha(scale, GridSpec::default()))?),
            }
        }
        Command::EllipseData { samples } => {
            if samples < 2 {
                return Err(Failure::Input(anyhow::anyhow!("--samples must be at least 2")));
            }
            Ok(ellipse::to_csv(&analysis::ellipse_region_data::<f64>(samples)))
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("QMC_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().with_context(|| format!("QMC_THREADS={v:?} is not a count"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
