//! Incremental SAT backend abstraction over batsat.
//!
//! Literals use the DIMACS convention: nonzero `i32`, negative for negated.
//! The backend supports solving under assumptions with a wall-clock budget;
//! a budget overrun surfaces as [`Verdict::Timeout`] and leaves the solver
//! usable for further calls.

use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use batsat::{callbacks, lbool, Lit, Solver, SolverInterface, SolverOpts};

/// Outcome of one budgeted solver call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
    Timeout,
}

/// The subset of an incremental SAT solver the encoder and search loop need.
pub trait SatBackend {
    /// Adds a permanent clause of DIMACS literals.
    fn add_clause(&mut self, lits: &[i32]);

    /// Solves under the given assumptions, giving up after `budget` elapses.
    fn solve_under(&mut self, assumptions: &[i32], budget: Option<Duration>) -> Verdict;

    /// Model value of a literal. Meaningful only after [`Verdict::Sat`].
    fn value(&self, lit: i32) -> bool;
}

pub struct BatsatBackend {
    solver: Solver<callbacks::Basic>,
    deadline: Arc<Mutex<Option<Instant>>>,
    buf: Vec<Lit>,
}

impl BatsatBackend {
    pub fn new(seed: u64) -> Self {
        let mut opts = SolverOpts::default();
        // Positive seed is required; randomized activities diversify restarts
        // across repeated solves with different seeds.
        opts.random_seed = seed as f64 + 1.0;
        opts.rnd_init_act = true;
        opts.random_var_freq = 0.02;
        debug_assert!(opts.check());
        let deadline: Arc<Mutex<Option<Instant>>> = Arc::new(Mutex::new(None));
        let mut cb = callbacks::Basic::new();
        let watch = Arc::clone(&deadline);
        cb.set_stop(move || {
            watch
                .lock()
                .unwrap()
                .map_or(false, |d| Instant::now() >= d)
        });
        Self {
            solver: Solver::new(opts, cb),
            deadline,
            buf: Vec::new(),
        }
    }

    fn lit(&mut self, l: i32) -> Lit {
        debug_assert!(l != 0);
        let var = self.solver.var_of_int(l.unsigned_abs() - 1);
        Lit::new(var, l > 0)
    }
}

impl SatBackend for BatsatBackend {
    fn add_clause(&mut self, lits: &[i32]) {
        self.buf.clear();
        for &l in lits {
            let lit = self.lit(l);
            self.buf.push(lit);
        }
        let mut clause = std::mem::take(&mut self.buf);
        self.solver.add_clause_reuse(&mut clause);
        self.buf = clause;
    }

    fn solve_under(&mut self, assumptions: &[i32], budget: Option<Duration>) -> Verdict {
        let assumps: Vec<Lit> = assumptions.iter().map(|&l| self.lit(l)).collect();
        *self.deadline.lock().unwrap() = budget.map(|b| Instant::now() + b);
        let res = self.solver.solve_limited(&assumps);
        *self.deadline.lock().unwrap() = None;
        if res == lbool::TRUE {
            Verdict::Sat
        } else if res == lbool::FALSE {
            Verdict::Unsat
        } else {
            Verdict::Timeout
        }
    }

    fn value(&self, lit: i32) -> bool {
        let var = batsat::Var::unsafe_from_idx(lit.unsigned_abs() - 1);
        let v = self.solver.value_var(var) == lbool::TRUE;
        if lit > 0 {
            v
        } else {
            !v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_sat_unsat() {
        let mut s = BatsatBackend::new(0);
        s.add_clause(&[1, 2]);
        s.add_clause(&[-1, 2]);
        assert_eq!(s.solve_under(&[], None), Verdict::Sat);
        assert!(s.value(2));
        s.add_clause(&[-2]);
        assert_eq!(s.solve_under(&[], None), Verdict::Unsat);
    }

    #[test]
    fn assumptions_are_retractable() {
        let mut s = BatsatBackend::new(1);
        s.add_clause(&[1, 2]);
        assert_eq!(s.solve_under(&[-1, -2], None), Verdict::Unsat);
        assert_eq!(s.solve_under(&[-1], None), Verdict::Sat);
        assert!(s.value(2));
    }

    #[test]
    fn spent_budget_times_out() {
        let mut s = BatsatBackend::new(2);
        s.add_clause(&[1, 2]);
        assert_eq!(
            s.solve_under(&[], Some(Duration::ZERO)),
            Verdict::Timeout
        );
        // The solver stays usable after a timeout.
        assert_eq!(s.solve_under(&[], None), Verdict::Sat);
    }
}
