//! Command-line entry points: `solve`, `perturb` and `oracle`.

use crate::formulation::FormulationVariant;
use crate::metrics::{gap, milestones, optg, violation, Milestones};
use crate::model::{
    generate_synthetic, load_instance, perturb_loads_with, write_instance, UcInstance,
};
use crate::oia::{AlgoParams, Termination};
use crate::oracle::{brute_force_optimum, GoldenRecord};
use crate::progressive::{run_pioia, Method};
use crate::solver::Backend;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "pioia",
    about = "Progressive integrality outer-inner approximation solver for SOC-relaxed AC unit commitment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance and write a trace CSV plus a summary JSON.
    Solve(SolveArgs),
    /// Write Gaussian-perturbed copies of an instance, one per seed.
    Perturb(PerturbArgs),
    /// Brute-force the exact optimum of a desk-scale instance.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct InstanceSource {
    /// Instance file (JSON).
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Generate a synthetic instance instead: N_BUSES,N_GENS,T (seeded by
    /// --seed).
    #[arg(long, value_name = "N_BUSES,N_GENS,T", conflicts_with = "instance")]
    synthetic: Option<String>,
    /// Seed for synthetic-instance generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl InstanceSource {
    fn load(&self) -> Result<UcInstance, String> {
        match (&self.instance, &self.synthetic) {
            (Some(path), None) => {
                load_instance(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
            }
            (None, Some(shape)) => {
                let dims: Vec<usize> = shape
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse()
                            .map_err(|_| format!("bad --synthetic '{shape}'"))
                    })
                    .collect::<Result<_, _>>()?;
                if dims.len() != 3 {
                    return Err(format!("bad --synthetic '{shape}' (want N_BUSES,N_GENS,T)"));
                }
                generate_synthetic(dims[0], dims[1], dims[2], self.seed).map_err(|e| e.to_string())
            }
            _ => Err("provide exactly one of --instance or --synthetic".into()),
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    source: InstanceSource,
    /// Formulation variant: f1 (no slacks), f2 (shedding only), f3 (both).
    #[arg(long, default_value = "f2")]
    variant: FormulationVariant,
    /// Method ladder m1..m4.
    #[arg(long, default_value = "m4")]
    method: Method,
    /// Convergence tolerance on the relative gap.
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    /// Violation threshold for cut generation.
    #[arg(long, default_value_t = 1e-5)]
    eps_tol: f64,
    /// Parallel-cut rejection tolerance.
    #[arg(long, default_value_t = 5e-6)]
    eps_par: f64,
    /// Fraction of most-violated constraints to cut per family.
    #[arg(long, default_value_t = 0.55)]
    p_cut: f64,
    /// Initial MIP gap of the outer solves.
    #[arg(long, default_value_t = 0.01)]
    mip_gap_init: f64,
    /// Initial time limit of the outer solves (seconds).
    #[arg(long, default_value_t = 200.0)]
    solver_time_init: f64,
    /// LP-stage improvement-rate exit threshold.
    #[arg(long, default_value_t = 0.05)]
    eps_lp: f64,
    /// IG-stage improvement-rate exit threshold.
    #[arg(long, default_value_t = 0.01)]
    eps_ig: f64,
    /// Generators enforced binary per IG round (default: ceil(|G|/4)).
    #[arg(long)]
    k_ig: Option<usize>,
    /// Iteration cap per stage.
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// Global wall-clock budget in seconds.
    #[arg(long, default_value_t = f64::INFINITY)]
    time_budget: f64,
    /// Continuous engine: clarabel or totsu (env PIOIA_BACKEND).
    #[arg(long)]
    backend: Option<Backend>,
    /// Reserved tolerance knob kept for configuration compatibility; it has
    /// no effect on the run.
    #[arg(long, default_value_t = 1e-3)]
    delta_tol: f64,
    /// Trace CSV output path.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Summary JSON output path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Known optimal value, enabling the optimality-gap metrics.
    #[arg(long)]
    obj_star: Option<f64>,
}

#[derive(Debug, Args)]
struct PerturbArgs {
    #[command(flatten)]
    source: InstanceSource,
    /// Standard deviation of the Gaussian load factor.
    #[arg(long)]
    sigma: f64,
    /// Perturbation seeds: a range like 1..10 or a comma list like 1,2,3.
    #[arg(long)]
    seeds: String,
    /// Scale reactive demand by the same factor as active demand.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    perturb_q: bool,
    /// Output directory for the perturbed instance files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    source: InstanceSource,
    #[arg(long, default_value = "f2")]
    variant: FormulationVariant,
    #[arg(long)]
    backend: Option<Backend>,
    /// Write the result as a golden file.
    #[arg(long)]
    golden: Option<PathBuf>,
}

/// Summary JSON payload, the machine-readable run report.
#[derive(Debug, Serialize)]
struct Summary {
    method: String,
    variant: String,
    backend: String,
    seed: u64,
    ub: f64,
    lb: f64,
    gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    optg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vio: Option<f64>,
    runtime_s: f64,
    converged: bool,
    milestones: Milestones,
    cut_counts: CutCounts,
}

#[derive(Debug, Serialize)]
struct CutCounts {
    soc: usize,
    cap: usize,
    benders: usize,
}

/// Parses and runs a full command line (excluding the program name handled
/// by clap); returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path with code 0
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Perturb(args) => cmd_perturb(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn backend_from(flag: Option<Backend>) -> Result<Backend, String> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("PIOIA_BACKEND") {
        Ok(v) if !v.is_empty() => v.parse(),
        _ => Ok(Backend::Clarabel),
    }
}

fn cmd_solve(args: SolveArgs) -> i32 {
    let inst = match args.source.load() {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let backend = match backend_from(args.backend) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let params = AlgoParams {
        eps: args.eps,
        eps_tol: args.eps_tol,
        eps_par: args.eps_par,
        p_cut: args.p_cut,
        mip_gap_init: args.mip_gap_init,
        solver_time_init: args.solver_time_init,
        eps_lp: args.eps_lp,
        eps_ig: args.eps_ig,
        k_ig: args.k_ig,
        max_iter: args.max_iter,
        time_budget: args.time_budget,
        ..Default::default()
    };

    let run = match run_pioia(&inst, args.variant, &params, args.method, backend) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let state = &run.state;

    if let Some(path) = &args.trace {
        if let Err(e) = File::create(path).map_err(|e| e.to_string()).and_then(|f| {
            state
                .trace
                .write_csv(BufWriter::new(f))
                .map_err(|e| e.to_string())
        }) {
            eprintln!("error: cannot write trace {}: {e}", path.display());
            return 1;
        }
    }

    let vio = state
        .incumbent
        .as_ref()
        .map(|inc| violation(&inst, args.variant, &inc.values));
    let summary = Summary {
        method: run.method.to_string(),
        variant: run.variant.to_string(),
        backend: backend.to_string(),
        seed: args.source.seed,
        ub: state.ub,
        lb: state.lb,
        gap: gap(state.ub, state.lb),
        optg: args.obj_star.map(|star| optg(state.ub, star)),
        vio,
        runtime_s: state.elapsed(),
        converged: run.termination == Termination::Converged,
        milestones: milestones(&state.trace, args.obj_star, args.eps),
        cut_counts: CutCounts {
            soc: state.pool.count(crate::cuts::CutKind::Soc),
            cap: state.pool.count(crate::cuts::CutKind::Cap),
            benders: state.pool.count(crate::cuts::CutKind::Benders),
        },
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    match &args.summary {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write summary {}: {e}", path.display());
                return 1;
            }
        }
        None => println!("{text}"),
    }

    match run.termination {
        Termination::Converged => 0,
        Termination::MaxIter | Termination::TimeBudget if state.incumbent.is_some() => 2,
        _ => 1,
    }
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>, String> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once("..") {
        let lo: u64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad seed range '{spec}'"))?;
        let hi: u64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad seed range '{spec}'"))?;
        if hi < lo {
            return Err(format!("empty seed range '{spec}'"));
        }
        // inclusive: 1..10 names ten instances
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| format!("bad seed list '{spec}'"))
        })
        .collect()
}

fn cmd_perturb(args: PerturbArgs) -> i32 {
    let inst = match args.source.load() {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if args.sigma < 0.0 {
        eprintln!("error: sigma must be nonnegative");
        return 1;
    }
    let seeds = match parse_seeds(&args.seeds) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    for seed in seeds {
        let out = perturb_loads_with(&inst, args.sigma, seed, args.perturb_q);
        let path = args.out_dir.join(format!("perturbed_{seed}.json"));
        if let Err(e) = write_instance(&out, &path) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 1;
        }
        println!("{}", path.display());
    }
    0
}

fn cmd_oracle(args: OracleArgs) -> i32 {
    let inst = match args.source.load() {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let backend = match backend_from(args.backend) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let result = match brute_force_optimum(&inst, args.variant, backend) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let record = GoldenRecord::new(&inst, args.variant, &result);
    println!("obj_star: {}", result.objective);
    println!("schedules_enumerated: {}", result.n_schedules);
    println!("u: {:?}", result.schedule.u);
    if let Some(path) = &args.golden {
        let text = serde_json::to_string_pretty(&record).expect("record serializes");
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: cannot write golden file {}: {e}", path.display());
            return 1;
        }
    }
    0
}
