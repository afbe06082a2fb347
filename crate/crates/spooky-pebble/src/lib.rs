//! Solver toolkit for the spooky pebble game.
//!
//! The spooky pebble game schedules a classical circuit DAG on a quantum
//! machine, trading quantum space (pebbles), classical space (ghosts) and
//! time. This crate provides:
//!
//! - [`dag`]: DAG representation, edge-list parsing and graph generators;
//! - [`game`]: game semantics, sequential and parallel validators, cost metrics;
//! - [`encode`]: CNF/BMC encoding of the game with incremental unrolling;
//! - [`sat`]: the incremental SAT backend abstraction;
//! - [`solve`]: the outer bounded-model-checking search loop;
//! - [`optimize`]: trace sequentialization and heuristic post-optimization;
//! - [`transform`]: constructive irreversible-to-spooky strategy conversion;
//! - [`oracle`]: exact brute-force search on small instances.

pub mod dag;
pub mod encode;
pub mod game;
pub mod optimize;
pub mod oracle;
pub mod sat;
pub mod solve;
pub mod transform;

pub use dag::{Dag, Vertex};
pub use game::{
    Configuration, CostReport, Move, MoveKind, ParallelTrace, Semantics, SequentialStrategy,
};
pub use optimize::{metrics_triple, optimize_fixpoint, run_pass, sequentialize, PassKind};
pub use oracle::{find_strategy, min_pebbles, min_time};
pub use solve::{solve_spooky, SolveLimits, SolveOutcome, SolveStatus};
pub use transform::irrev_to_spooky;
