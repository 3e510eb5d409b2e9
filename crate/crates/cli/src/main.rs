use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mcpc_core::experiment::{run_experiment, ExperimentConfig};
use mcpc_core::mkpc::{detect_disentangled, IterativeConfig};
use mcpc_core::model::{
    assignment_from_json, check_feasible, evaluate_assignment, generate_instance, parse_instance,
    serialize_instance, GeneratorParams, Instance, ProblemKind,
};
use mcpc_core::oracle::{brute_force_opt, OracleError, OracleLimits};
use mcpc_core::par::Execution;
use mcpc_core::rational::{format_rational, ratio_or_one};
use mcpc_core::solve::{solve, Algorithm, SolveConfig, SolveError};

/// Approximation algorithms for coverage and knapsack problems with cluster
/// capacities, in exact rational arithmetic.
#[derive(Parser, Debug)]
#[command(name = "mcpc", version)]
struct Cli {
    /// Instance file; standard input when omitted.
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Machine-readable summaries.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one algorithm on an instance and print the assignment and its
    /// certificate.
    Solve {
        #[arg(long)]
        alg: Algorithm,
        /// Largest item pool a cluster may be rounded over (mkpc-iterative).
        #[arg(long, default_value_t = 20)]
        max_pool: usize,
    },
    /// Draw a random instance.
    Generate(GenerateArgs),
    /// Check a solution against an instance, and against the exact optimum
    /// when the instance is small enough.
    Verify {
        #[arg(long)]
        solution: PathBuf,
    },
    /// Ratio sweep against the exact optimum, as CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value = "mcpc")]
    kind: ProblemKind,
    #[arg(long, default_value_t = 6)]
    items: usize,
    #[arg(long, default_value_t = 5)]
    sets: usize,
    #[arg(long, default_value_t = 4)]
    knapsacks: usize,
    #[arg(long, default_value_t = 2)]
    clusters: usize,
    #[arg(long, default_value_t = 1.0)]
    tightness: f64,
    #[arg(long)]
    disentangled: bool,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    kind: ProblemKind,
    #[arg(long)]
    alg: Algorithm,
    /// Upper bounds on the sizes drawn per trial.
    #[arg(long, default_value_t = 6)]
    max_items: usize,
    #[arg(long, default_value_t = 6)]
    max_sets: usize,
    #[arg(long, default_value_t = 4)]
    max_knapsacks: usize,
    #[arg(long, default_value_t = 2)]
    max_clusters: usize,
    #[arg(long)]
    disentangled: bool,
    #[arg(long)]
    sequential: bool,
    /// Leave the runtime column empty, for byte-identical reruns.
    #[arg(long)]
    no_runtime: bool,
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>> {
    match path {
        Some(p) => fs::read(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf).context("reading standard input")?;
            Ok(buf)
        }
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(bytes).context("writing standard output"),
    }
}

fn load_instance(cli: &Cli) -> Result<Instance> {
    let text = read_input(cli.input.as_deref())?;
    Ok(parse_instance(&text)?)
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("values serialize");
    out.push(b'\n');
    out
}

fn cmd_solve(cli: &Cli, alg: Algorithm, max_pool: usize) -> Result<()> {
    let inst = load_instance(cli)?;
    if alg == Algorithm::MkpcIterative && detect_disentangled(&inst).is_none() {
        eprintln!("warning: clusters are not disentangled; the 1/2 guarantee needs the isolation property");
    }
    let config = SolveConfig { iterative: IterativeConfig { max_pool }, ..Default::default() };
    let out = solve(&inst, alg, &config)?;
    write_output(cli.out.as_deref(), &pretty(&out.to_json()))
}

fn cmd_generate(cli: &Cli, args: &GenerateArgs) -> Result<()> {
    let params = GeneratorParams {
        kind: args.kind,
        n: args.items,
        m: args.sets,
        p: args.knapsacks,
        q: args.clusters,
        seed: cli.seed,
        tightness: args.tightness,
        disentangled: args.disentangled,
        ..Default::default()
    };
    let inst = generate_instance(&params)?;
    write_output(cli.out.as_deref(), &serialize_instance(&inst))
}

/// Returns whether the solution passed.
fn cmd_verify(cli: &Cli, solution: &Path) -> Result<bool> {
    let inst = load_instance(cli)?;
    let text = fs::read(solution).with_context(|| format!("reading {}", solution.display()))?;
    let (assignment, claimed) = assignment_from_json(&text, inst.num_sets())?;
    let report = check_feasible(&inst, &assignment)?;
    let value = evaluate_assignment(&inst, &assignment)?;
    let claim_ok = claimed.as_ref().is_none_or(|c| *c == value);
    let opt = match brute_force_opt(&inst, &OracleLimits::default()) {
        Ok(r) => Some(r.opt_value),
        Err(OracleError::TooLarge { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let passed = report.is_feasible() && claim_ok;
    let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    let doc = json!({
        "feasible": report.is_feasible(),
        "violations": violations,
        "value": format_rational(&value),
        "claimed_value": claimed.as_ref().map(format_rational),
        "claim_matches": claim_ok,
        "opt_value": opt.as_ref().map(format_rational),
        "ratio_vs_opt": opt.as_ref().map(|o| format_rational(&ratio_or_one(&value, o))),
    });
    let body = if cli.json {
        pretty(&doc)
    } else {
        let mut s = format!(
            "{}\nvalue {}\n",
            if passed { "OK" } else { "INVALID" },
            format_rational(&value)
        );
        for v in &violations {
            s.push_str(&format!("violation: {v}\n"));
        }
        if let Some(c) = &claimed {
            if !claim_ok {
                s.push_str(&format!("claimed value {} does not match\n", format_rational(c)));
            }
        }
        match &opt {
            Some(o) => s.push_str(&format!(
                "optimum {} ratio {}\n",
                format_rational(o),
                format_rational(&ratio_or_one(&value, o))
            )),
            None => s.push_str("optimum not computed: instance exceeds the oracle limits\n"),
        }
        s.into_bytes()
    };
    write_output(cli.out.as_deref(), &body)?;
    Ok(passed)
}

/// Returns whether the sweep met the guarantee on every trial.
fn cmd_experiment(cli: &Cli, args: &ExperimentArgs) -> Result<bool> {
    let mut config = ExperimentConfig::new(args.kind, args.alg, args.trials, cli.seed);
    config.max_items = args.max_items;
    config.max_sets = args.max_sets;
    config.max_knapsacks = args.max_knapsacks;
    config.max_clusters = args.max_clusters;
    config.disentangled = args.disentangled;
    config.execution = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    let report = run_experiment(&config)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv, !args.no_runtime)?;
    write_output(cli.out.as_deref(), &csv)?;
    let s = &report.summary;
    if cli.json {
        let r = |v: &Option<_>| v.as_ref().map(format_rational);
        let doc = json!({
            "trials": s.trials,
            "completed": s.completed,
            "min_ratio": r(&s.min_ratio),
            "mean_ratio": r(&s.mean_ratio),
            "guarantee": r(&s.guarantee),
            "violations": s.violations,
            "skipped": s.skipped,
            "isolation_failures": s.isolation_failures,
        });
        eprintln!("{doc}");
    } else {
        eprint!("{}", s.to_text());
    }
    Ok(s.passed())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Solve { alg, max_pool } => cmd_solve(cli, *alg, *max_pool).map(|_| true),
        Command::Generate(args) => cmd_generate(cli, args).map(|_| true),
        Command::Verify { solution } => cmd_verify(cli, solution),
        Command::Experiment(args) => {
            if args.trials == 0 {
                bail!("--trials must be positive");
            }
            cmd_experiment(cli, args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let isolation = e.downcast_ref::<SolveError>().is_some_and(SolveError::is_isolation_failure);
            ExitCode::from(if isolation { 2 } else { 1 })
        }
    }
}
