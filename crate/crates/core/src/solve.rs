//! One entry point for every algorithm, with a uniform JSON report.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::lp::{build_mcpk_lp, solve_lp};
use crate::mcpc::{effective_capacities, solve_mcpc_alg2, McpcError};
use crate::mkpc::{greedy_lp_checked, solve_mkpc_iterative, solve_mkpc_third, IterativeConfig, MkpcError};
use crate::model::{assignment_to_json, Assignment, FractionalSolution, Instance, ProblemKind};
use crate::oracle::{brute_force_opt, OracleError, OracleLimits};
use crate::pipage::{solve_mcpk_alg1, PipageError};
use crate::rational::{format_rational, ratio, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    McpkPipage,
    Mcpc,
    MkpcGreedy,
    MkpcThird,
    MkpcIterative,
    Exact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::McpkPipage,
        Algorithm::Mcpc,
        Algorithm::MkpcGreedy,
        Algorithm::MkpcThird,
        Algorithm::MkpcIterative,
        Algorithm::Exact,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::McpkPipage => "mcpk-pipage",
            Algorithm::Mcpc => "mcpc",
            Algorithm::MkpcGreedy => "mkpc-greedy",
            Algorithm::MkpcThird => "mkpc-third",
            Algorithm::MkpcIterative => "mkpc-iterative",
            Algorithm::Exact => "exact",
        }
    }

    /// The widest problem kind the algorithm accepts.
    pub fn domain(self) -> ProblemKind {
        match self {
            Algorithm::McpkPipage => ProblemKind::Mcpk,
            Algorithm::Mcpc | Algorithm::Exact => ProblemKind::Mcpc,
            Algorithm::MkpcGreedy | Algorithm::MkpcThird | Algorithm::MkpcIterative => ProblemKind::Mkpc,
        }
    }

    /// Proven lower bound on `value / OPT`, as an exact rational. The
    /// `1 - 1/e` factors are rounded down to four decimals. `None` for the
    /// relaxation, which is an upper bound instead.
    pub fn guarantee(self) -> Option<Rational> {
        match self {
            Algorithm::McpkPipage => Some(ratio(3160, 10000)),
            Algorithm::Mcpc => Some(ratio(2107, 10000)),
            Algorithm::MkpcThird => Some(ratio(1, 3)),
            Algorithm::MkpcIterative => Some(ratio(1, 2)),
            Algorithm::Exact => Some(ratio(1, 1)),
            Algorithm::MkpcGreedy => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("{alg} does not accept {kind} instances")]
    WrongKind { alg: Algorithm, kind: ProblemKind },
    #[error(transparent)]
    Pipage(#[from] PipageError),
    #[error(transparent)]
    Mcpc(#[from] McpcError),
    #[error(transparent)]
    Mkpc(#[from] MkpcError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl SolveError {
    /// The instance lacks the isolation property, as opposed to being
    /// malformed or outside the algorithm's domain.
    pub fn is_isolation_failure(&self) -> bool {
        matches!(self, SolveError::Mkpc(MkpcError::NoIsolatedCluster { .. }))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveConfig {
    pub iterative: IterativeConfig,
    pub oracle: OracleLimits,
}

#[derive(Clone, Debug)]
pub enum Solution {
    Integral(Assignment),
    /// The relaxation's optimum, for `mkpc-greedy`.
    Fractional(FractionalSolution),
}

#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub algorithm: Algorithm,
    pub solution: Solution,
    pub value: Rational,
    /// Optimum of the relaxation the algorithm starts from, if it has one.
    pub lp_value: Option<Rational>,
    pub certificate: Value,
}

impl SolveOutput {
    pub fn assignment(&self) -> Option<&Assignment> {
        match &self.solution {
            Solution::Integral(a) => Some(a),
            Solution::Fractional(_) => None,
        }
    }

    /// Deterministic report: no timings, maps in a fixed order.
    pub fn to_json(&self) -> Value {
        let mut doc = match &self.solution {
            Solution::Integral(a) => assignment_to_json(a, &self.value),
            Solution::Fractional(x) => {
                let entries: Vec<Value> = x
                    .x_entries()
                    .map(|(j, k, v)| json!({"set": j, "knapsack": k, "value": format_rational(v)}))
                    .collect();
                json!({"fractional": entries, "value": format_rational(&self.value)})
            }
        };
        let obj = doc.as_object_mut().expect("documents are objects");
        obj.insert("algorithm".into(), Value::String(self.algorithm.as_str().into()));
        obj.insert("certificate".into(), self.certificate.clone());
        doc
    }
}

fn to_value<T: Serialize>(certificate: &T) -> Value {
    serde_json::to_value(certificate).expect("certificates serialize")
}

fn fixed_split_lp_value(inst: &Instance) -> Option<Rational> {
    let sol = solve_lp(&build_mcpk_lp(inst, &effective_capacities(inst)).lp);
    sol.is_optimal().then_some(sol.objective_value)
}

pub fn solve(inst: &Instance, alg: Algorithm, config: &SolveConfig) -> Result<SolveOutput, SolveError> {
    if !alg.domain().generalizes(inst.kind()) {
        return Err(SolveError::WrongKind { alg, kind: inst.kind() });
    }
    let (solution, value, lp_value, certificate) = match alg {
        Algorithm::McpkPipage => {
            let out = solve_mcpk_alg1(inst, &effective_capacities(inst))?;
            let lp = out.certificate.lp_value.clone();
            (Solution::Integral(out.assignment), out.value, Some(lp), to_value(&out.certificate))
        }
        Algorithm::Mcpc => {
            let out = solve_mcpc_alg2(inst)?;
            let lp = out.certificate.lp_value.clone();
            (Solution::Integral(out.assignment), out.value, Some(lp), to_value(&out.certificate))
        }
        Algorithm::MkpcGreedy => {
            let g = greedy_lp_checked(inst)?;
            let certificate = json!({
                "split_items": g.split_items,
                "unsplit_items": g.unsplit_items,
                "matching": g.matching.pairs(),
            });
            let lp = g.objective.clone();
            (Solution::Fractional(g.x), lp.clone(), Some(lp), certificate)
        }
        Algorithm::MkpcThird => {
            let out = solve_mkpc_third(inst)?;
            let lp = out.certificate.lp_value.clone();
            (Solution::Integral(out.assignment), out.value, Some(lp), to_value(&out.certificate))
        }
        Algorithm::MkpcIterative => {
            let out = solve_mkpc_iterative(inst, config.iterative)?;
            let lp = out.certificate.lp_value.clone();
            (Solution::Integral(out.assignment), out.value, Some(lp), to_value(&out.certificate))
        }
        Algorithm::Exact => {
            let r = brute_force_opt(inst, &config.oracle)?;
            let certificate = json!({"nodes_explored": r.nodes_explored});
            (Solution::Integral(r.opt_assignment), r.opt_value, fixed_split_lp_value(inst), certificate)
        }
    };
    Ok(SolveOutput { algorithm: alg, solution, value, lp_value, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{tests::raw, validate_and_normalize};
    use crate::rational::int;

    fn e1() -> Instance {
        validate_and_normalize(raw(&[4, 2], &[(2, &[0]), (2, &[1])], &[(2, 0), (2, 0)], &[3]))
            .unwrap()
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>(), Ok(a));
        }
        assert!("mkpc".parse::<Algorithm>().is_err());
    }

    #[test]
    fn e1_values() {
        let cfg = SolveConfig::default();
        let inst = e1();
        assert_eq!(solve(&inst, Algorithm::Mcpc, &cfg).unwrap().value, int(4));
        assert_eq!(solve(&inst, Algorithm::Exact, &cfg).unwrap().value, int(4));
        assert_eq!(solve(&inst, Algorithm::MkpcIterative, &cfg).unwrap().value, int(4));
        let g = solve(&inst, Algorithm::MkpcGreedy, &cfg).unwrap();
        assert_eq!(g.value, int(5));
        assert!(g.assignment().is_none());
    }

    #[test]
    fn kind_is_enforced() {
        let err = solve(&e1(), Algorithm::McpkPipage, &SolveConfig::default()).unwrap_err();
        assert_eq!(err, SolveError::WrongKind { alg: Algorithm::McpkPipage, kind: ProblemKind::Mkpc });
    }

    #[test]
    fn report_layout() {
        let out = solve(&e1(), Algorithm::MkpcThird, &SolveConfig::default()).unwrap();
        let doc = out.to_json();
        assert_eq!(doc["algorithm"], "mkpc-third");
        assert_eq!(doc["value"], "4");
        assert_eq!(doc["assignment"]["0"], 1);
        assert_eq!(doc["certificate"]["chosen"], "x3");
        assert_eq!(doc["certificate"]["lp_value"], "5");
    }
}
