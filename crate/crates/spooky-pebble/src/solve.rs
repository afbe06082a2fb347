//! Outer bounded-model-checking loop: grow the horizon until the encoding
//! becomes satisfiable, the time budget runs out, or the horizon cap is hit.
//!
//! The search starts at horizon 0 and extends by one step after an UNSAT
//! verdict. A per-call timeout instead skips ahead several steps at once:
//! longer horizons are often easier to satisfy than to refute, so jumping
//! past the hard region trades optimality of the step count for an answer.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dag::Dag;
use crate::encode::Encoding;
use crate::game::{Configuration, ParallelTrace};
use crate::sat::{BatsatBackend, SatBackend, Verdict};

/// Resource limits for one solve call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveLimits {
    /// Budget for a single solver call.
    pub t_wait: Duration,
    /// Total budget; the last call may overrun it by up to `t_wait`.
    pub t_max: Duration,
    /// Horizon increment applied after a solver-call timeout.
    pub t_skip: usize,
    /// Seed for the solver's randomized heuristics.
    pub seed: u64,
    /// Hard horizon cap; `None` leaves the horizon unbounded.
    pub max_horizon: Option<usize>,
}

impl Default for SolveLimits {
    fn default() -> Self {
        Self {
            t_wait: Duration::from_secs(15),
            t_max: Duration::from_secs(120),
            t_skip: 5,
            seed: 0,
            max_horizon: None,
        }
    }
}

/// Verdict of one solver call, as recorded in the search history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CallVerdict {
    Sat,
    Unsat,
    Timeout,
}

impl From<Verdict> for CallVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Sat => CallVerdict::Sat,
            Verdict::Unsat => CallVerdict::Unsat,
            Verdict::Timeout => CallVerdict::Timeout,
        }
    }
}

/// One solver call at one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorizonRecord {
    pub horizon: usize,
    pub verdict: CallVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// A satisfying trace was found.
    Solved,
    /// The time budget or horizon cap ran out without an answer.
    Exhausted,
}

/// Result of the search loop.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// The satisfying trace, when solved.
    pub trace: Option<ParallelTrace>,
    pub history: Vec<HorizonRecord>,
    pub elapsed: Duration,
}

/// Reads the configuration sequence out of a satisfying model.
pub fn decode_model(dag: &Dag, enc: &Encoding, backend: &impl SatBackend) -> ParallelTrace {
    let vars = enc.vars();
    let mut configs = Vec::with_capacity(enc.horizon() + 1);
    for i in 0..=enc.horizon() {
        let pebbled = dag.vertices().filter(|&v| backend.value(vars.p(v, i))).collect();
        let ghosted = dag.vertices().filter(|&v| backend.value(vars.s(v, i))).collect();
        // Model invariant: the move clauses keep the two sets disjoint.
        let cfg = Configuration::new(pebbled, ghosted).expect("model has overlapping sets");
        configs.push(cfg);
    }
    ParallelTrace::new(configs)
}

/// Searches for a complete parallel spooky strategy within the budgets.
pub fn solve_spooky(
    dag: &Dag,
    pebble_budget: usize,
    ghost_budget: usize,
    limits: &SolveLimits,
) -> SolveOutcome {
    let start = Instant::now();
    let deadline = start + limits.t_max;
    let mut enc = Encoding::new(dag, pebble_budget, ghost_budget);
    let mut backend = BatsatBackend::new(limits.seed);
    for clause in enc.drain_pending() {
        backend.add_clause(&clause);
    }
    let mut history = Vec::new();
    let exhausted = |history: Vec<HorizonRecord>, start: Instant| SolveOutcome {
        status: SolveStatus::Exhausted,
        trace: None,
        history,
        elapsed: start.elapsed(),
    };
    loop {
        let remaining = deadline.saturating_duration_since(Instant::now());
        if remaining.is_zero() {
            return exhausted(history, start);
        }
        let budget = limits.t_wait.min(remaining);
        let verdict = backend.solve_under(&enc.assumptions(), Some(budget));
        history.push(HorizonRecord {
            horizon: enc.horizon(),
            verdict: verdict.into(),
        });
        let grow = match verdict {
            Verdict::Sat => {
                let trace = decode_model(dag, &enc, &backend);
                return SolveOutcome {
                    status: SolveStatus::Solved,
                    trace: Some(trace),
                    history,
                    elapsed: start.elapsed(),
                };
            }
            Verdict::Unsat => 1,
            Verdict::Timeout => limits.t_skip.max(1),
        };
        let next = enc.horizon() + grow;
        if limits.max_horizon.is_some_and(|cap| next > cap) {
            return exhausted(history, start);
        }
        for _ in 0..grow {
            enc.unroll();
        }
        for clause in enc.drain_pending() {
            backend.add_clause(&clause);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{example_dag, parse_dag};
    use crate::game::validate_parallel;

    #[test]
    fn single_vertex_history() {
        let dag = parse_dag("only").unwrap();
        let outcome = solve_spooky(&dag, 1, 0, &SolveLimits::default());
        assert_eq!(outcome.status, SolveStatus::Solved);
        assert_eq!(
            outcome.history,
            vec![
                HorizonRecord {
                    horizon: 0,
                    verdict: CallVerdict::Unsat
                },
                HorizonRecord {
                    horizon: 1,
                    verdict: CallVerdict::Sat
                },
            ]
        );
        let trace = outcome.trace.unwrap();
        let report = validate_parallel(&dag, &trace, 1, 0, true).unwrap();
        assert_eq!(report.time, 1);
    }

    #[test]
    fn example_dag_three_pebbles_one_ghost() {
        let dag = example_dag();
        let outcome = solve_spooky(&dag, 3, 1, &SolveLimits::default());
        assert_eq!(outcome.status, SolveStatus::Solved);
        let trace = outcome.trace.unwrap();
        let report = validate_parallel(&dag, &trace, 3, 1, true).unwrap();
        assert!(report.pebbles <= 3);
        assert!(report.ghosts <= 1);
    }

    #[test]
    fn too_few_pebbles_exhausts_horizon() {
        let dag = example_dag();
        let limits = SolveLimits {
            max_horizon: Some(12),
            ..SolveLimits::default()
        };
        let outcome = solve_spooky(&dag, 2, 5, &limits);
        assert_eq!(outcome.status, SolveStatus::Exhausted);
        assert!(outcome.trace.is_none());
        assert!(outcome
            .history
            .iter()
            .all(|r| r.verdict == CallVerdict::Unsat));
    }
}
