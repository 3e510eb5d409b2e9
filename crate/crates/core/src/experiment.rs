//! Seeded ratio sweeps: draw instances, run one algorithm and the exact
//! oracle on each, and compare against the proven guarantee.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{check_feasible, generate_instance, GenerateError, GeneratorParams, ProblemKind};
use crate::oracle::{brute_force_opt, OracleError, OracleLimits};
use crate::par::{map_collect, Execution};
use crate::rational::{format_rational, ratio_or_one, to_f64, Rational};
use crate::solve::{solve, Algorithm, SolveConfig, SolveError};

pub const CSV_HEADER: [&str; 9] = [
    "seed",
    "kind",
    "algorithm",
    "alg_value",
    "lp_value",
    "opt_value",
    "ratio_vs_opt",
    "ratio_vs_lp",
    "runtime_ms",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ProblemKind,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub seed: u64,
    /// Upper bounds; each trial draws its own sizes up to these.
    pub max_items: usize,
    pub max_sets: usize,
    pub max_knapsacks: usize,
    pub max_clusters: usize,
    pub disentangled: bool,
    /// Template for everything else the generator needs.
    pub generator: GeneratorParams,
    pub solve: SolveConfig,
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(kind: ProblemKind, algorithm: Algorithm, trials: usize, seed: u64) -> Self {
        Self {
            kind,
            algorithm,
            trials,
            seed,
            max_items: 6,
            max_sets: 6,
            max_knapsacks: 4,
            max_clusters: 2,
            disentangled: false,
            generator: GeneratorParams::default(),
            solve: SolveConfig::default(),
            execution: Execution::default(),
        }
    }

    /// Seed of trial `t`; trials are independent of each other and of the
    /// execution mode.
    pub fn trial_seed(&self, t: usize) -> u64 {
        self.seed.wrapping_add((t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn trial_params(&self, t: usize) -> GeneratorParams {
        let seed = self.trial_seed(t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
        let n = rng.gen_range(1..=self.max_items.max(1));
        let m_cap = match self.kind {
            ProblemKind::Mkp | ProblemKind::Mkpc => self.max_sets.min(n),
            _ => self.max_sets,
        };
        let m = rng.gen_range(1..=m_cap.max(1));
        let p = rng.gen_range(1..=self.max_knapsacks.max(1));
        let q = rng.gen_range(1..=self.max_clusters.clamp(1, p));
        GeneratorParams {
            kind: self.kind,
            n,
            m,
            p,
            q,
            seed,
            disentangled: self.disentangled,
            ..self.generator.clone()
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{alg} does not accept {kind} instances")]
    WrongKind { alg: Algorithm, kind: ProblemKind },
    #[error("trial seed {seed}: {source}")]
    Generate { seed: u64, source: GenerateError },
    #[error("trial seed {seed}: {source}")]
    Solve { seed: u64, source: SolveError },
    #[error("trial seed {seed}: emitted assignment is infeasible: {detail}")]
    Infeasible { seed: u64, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub seed: u64,
    pub kind: ProblemKind,
    pub algorithm: Algorithm,
    pub alg_value: Rational,
    pub lp_value: Option<Rational>,
    pub opt_value: Rational,
    pub ratio_vs_opt: Rational,
    pub ratio_vs_lp: Option<Rational>,
    pub runtime_ms: u128,
}

impl Row {
    fn cells(&self, with_runtime: bool) -> [String; 9] {
        let opt = |v: &Option<Rational>| v.as_ref().map(format_rational).unwrap_or_default();
        [
            self.seed.to_string(),
            self.kind.to_string(),
            self.algorithm.to_string(),
            format_rational(&self.alg_value),
            opt(&self.lp_value),
            format_rational(&self.opt_value),
            format_rational(&self.ratio_vs_opt),
            opt(&self.ratio_vs_lp),
            if with_runtime { self.runtime_ms.to_string() } else { String::new() },
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trial {
    Done(Box<Row>),
    /// The oracle refused the instance (size or node cap).
    Skipped { seed: u64, reason: String },
    /// The iterative rounding found no isolated cluster.
    NotIsolated { seed: u64, reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub trials: usize,
    pub completed: usize,
    pub min_ratio: Option<Rational>,
    pub mean_ratio: Option<Rational>,
    pub guarantee: Option<Rational>,
    /// Rows with `ratio_vs_opt` below the guarantee.
    pub violations: usize,
    pub skipped: usize,
    pub isolation_failures: usize,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn to_text(&self) -> String {
        let show = |v: &Option<Rational>| match v {
            Some(r) => format!("{} (~{:.4})", format_rational(r), to_f64(r)),
            None => "-".into(),
        };
        format!(
            "trials {} completed {} skipped {} isolation_failures {}\n\
             min_ratio {}\nmean_ratio {}\nguarantee {}\nviolations {}\n",
            self.trials,
            self.completed,
            self.skipped,
            self.isolation_failures,
            show(&self.min_ratio),
            show(&self.mean_ratio),
            show(&self.guarantee),
            self.violations,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentReport {
    pub trials: Vec<Trial>,
    pub summary: Summary,
}

impl ExperimentReport {
    pub fn rows(&self) -> impl Iterator<Item = &Row> {
        self.trials.iter().filter_map(|t| match t {
            Trial::Done(r) => Some(r.as_ref()),
            _ => None,
        })
    }

    /// CSV with the fixed header. Without `with_runtime` the runtime column
    /// is left empty so that output is byte-identical across runs.
    pub fn write_csv<W: Write>(&self, out: W, with_runtime: bool) -> Result<(), ExperimentError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for row in self.rows() {
            w.write_record(row.cells(with_runtime))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn run_trial(config: &ExperimentConfig, t: usize) -> Result<Trial, ExperimentError> {
    let params = config.trial_params(t);
    let seed = params.seed;
    let inst = generate_instance(&params).map_err(|source| ExperimentError::Generate { seed, source })?;
    // one level of parallelism is enough: the oracle runs sequentially
    let oracle = OracleLimits { execution: Execution::Sequential, ..config.solve.oracle };
    let opt = match brute_force_opt(&inst, &oracle) {
        Ok(r) => r.opt_value,
        Err(e @ (OracleError::TooLarge { .. } | OracleError::NodeLimit(_) | OracleError::TimeLimit(_))) => {
            return Ok(Trial::Skipped { seed, reason: e.to_string() });
        }
        Err(e) => return Err(ExperimentError::Solve { seed, source: e.into() }),
    };
    let start = Instant::now();
    let solve_config = SolveConfig { oracle, ..config.solve };
    let out = match solve(&inst, config.algorithm, &solve_config) {
        Ok(out) => out,
        Err(e) if e.is_isolation_failure() => {
            return Ok(Trial::NotIsolated { seed, reason: e.to_string() });
        }
        Err(source) => return Err(ExperimentError::Solve { seed, source }),
    };
    let runtime_ms = start.elapsed().as_millis();
    if let Some(a) = out.assignment() {
        let report = check_feasible(&inst, a).expect("solvers use instance ids");
        if !report.is_feasible() {
            let detail = report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
            return Err(ExperimentError::Infeasible { seed, detail });
        }
    }
    Ok(Trial::Done(Box::new(Row {
        seed,
        kind: inst.kind(),
        algorithm: config.algorithm,
        ratio_vs_opt: ratio_or_one(&out.value, &opt),
        ratio_vs_lp: out.lp_value.as_ref().map(|lp| ratio_or_one(&out.value, lp)),
        alg_value: out.value,
        lp_value: out.lp_value,
        opt_value: opt,
        runtime_ms,
    })))
}

pub fn summarize(trials: &[Trial], guarantee: Option<Rational>) -> Summary {
    let ratios: Vec<&Rational> = trials
        .iter()
        .filter_map(|t| match t {
            Trial::Done(r) => Some(&r.ratio_vs_opt),
            _ => None,
        })
        .collect();
    let completed = ratios.len();
    let min_ratio = ratios.iter().min().map(|r| (*r).clone());
    let mean_ratio = (completed > 0)
        .then(|| ratios.iter().copied().sum::<Rational>() / Rational::from_integer(completed.into()));
    let violations = match &guarantee {
        Some(g) => ratios.iter().filter(|r| **r < g).count(),
        None => 0,
    };
    Summary {
        trials: trials.len(),
        completed,
        min_ratio,
        mean_ratio,
        guarantee,
        violations,
        skipped: trials.iter().filter(|t| matches!(t, Trial::Skipped { .. })).count(),
        isolation_failures: trials.iter().filter(|t| matches!(t, Trial::NotIsolated { .. })).count(),
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    if !config.algorithm.domain().generalizes(config.kind) {
        return Err(ExperimentError::WrongKind { alg: config.algorithm, kind: config.kind });
    }
    let indices: Vec<usize> = (0..config.trials).collect();
    let trials = map_collect(config.execution, &indices, |&t| run_trial(config, t))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(&trials, config.algorithm.guarantee());
    Ok(ExperimentReport { trials, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;
    use crate::rational::{int, ratio};

    #[test]
    fn sizes_stay_within_bounds() {
        let cfg = ExperimentConfig::new(ProblemKind::Mkpc, Algorithm::MkpcThird, 50, 7);
        for t in 0..50 {
            let p = cfg.trial_params(t);
            assert!(p.n <= 6 && p.m <= p.n && p.p <= 4 && p.q <= p.p.min(2));
            assert!(p.n >= 1 && p.m >= 1 && p.q >= 1);
        }
    }

    #[test]
    fn modes_give_identical_csv() {
        let mut cfg = ExperimentConfig::new(ProblemKind::Mcpc, Algorithm::Mcpc, 12, 3);
        cfg.execution = Execution::Sequential;
        let a = run_experiment(&cfg).unwrap();
        cfg.execution = Execution::Parallel;
        let b = run_experiment(&cfg).unwrap();
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        a.write_csv(&mut ca, false).unwrap();
        b.write_csv(&mut cb, false).unwrap();
        assert_eq!(ca, cb);
        assert_eq!(a.summary, b.summary);
        assert!(String::from_utf8(ca).unwrap().starts_with(&CSV_HEADER.join(",")));
    }

    #[test]
    fn summary_counts_violations() {
        let row = |r: Rational| {
            Trial::Done(Box::new(Row {
                seed: 0,
                kind: ProblemKind::Mkpc,
                algorithm: Algorithm::MkpcThird,
                alg_value: Rational::zero(),
                lp_value: None,
                opt_value: int(1),
                ratio_vs_opt: r,
                ratio_vs_lp: None,
                runtime_ms: 0,
            }))
        };
        let trials = vec![
            row(ratio(1, 4)),
            row(int(1)),
            Trial::Skipped { seed: 1, reason: String::new() },
        ];
        let s = summarize(&trials, Some(ratio(1, 3)));
        assert_eq!(s.violations, 1);
        assert_eq!(s.min_ratio, Some(ratio(1, 4)));
        assert_eq!(s.mean_ratio, Some(ratio(5, 8)));
        assert_eq!(s.skipped, 1);
        assert!(!s.passed());
    }

    #[test]
    fn wrong_family_is_rejected() {
        let cfg = ExperimentConfig::new(ProblemKind::Mcpc, Algorithm::MkpcThird, 1, 0);
        assert!(matches!(run_experiment(&cfg), Err(ExperimentError::WrongKind { .. })));
    }
}
