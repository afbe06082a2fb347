//! Constructive conversion of irreversible strategies into spooky ones.
//!
//! An irreversible strategy with cost `C` and time `T` on a DAG with `m`
//! roots becomes a complete spooky strategy with pebble cost at most `C + m`
//! and time at most `T + (T + 1)(|V| - m)`. The conversion has two phases:
//!
//! - the front replays the irreversible strategy, turning every unpebbling
//!   into a ghosting and every re-pebbling of a ghosted vertex into an
//!   unghosting, ending at `(R, V \ R)`;
//! - the cleanup clears the leftover ghosts one vertex at a time, in reverse
//!   order of first pebbling: for each ghosted vertex it replays the
//!   irreversible strategy projected onto the vertex's ancestors (under the
//!   same ghost-for-unpebble rules), unghosts the vertex when its inputs are
//!   up, immediately unpebbles it, and lets the projected replay re-ghost
//!   the ancestors on its way out.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::dag::{Dag, Vertex};
use crate::game::{validate, Move, MoveKind, Semantics, SequentialStrategy, ValidationError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("input is not a complete irreversible strategy: {0}")]
    InvalidInput(#[from] ValidationError),
    #[error("vertex {0} is kept but is not a root")]
    KeepNotRoot(Vertex),
}

/// Replays an irreversible strategy as a spooky sub-strategy from `(∅, Q)`:
/// pebblings of ghosted vertices become unghostings, unpebblings become
/// ghostings. Same move count; ends at `(R, (Q ∪ unpebbled) \ R)`.
pub fn irrev_to_spooky_front(
    dag: &Dag,
    irrev: &SequentialStrategy,
    start_ghosts: &BTreeSet<Vertex>,
) -> Result<SequentialStrategy, TransformError> {
    validate(dag, irrev, Semantics::Irreversible, true)?;
    let mut ghosted = start_ghosts.clone();
    let mut moves = Vec::with_capacity(irrev.len());
    for mv in irrev.moves() {
        let v = mv.vertex;
        let kind = match mv.kind {
            MoveKind::Pebble if ghosted.remove(&v) => MoveKind::Unghost,
            MoveKind::Pebble => MoveKind::Pebble,
            MoveKind::Unpebble => {
                ghosted.insert(v);
                MoveKind::Ghost
            }
            // Irreversible validation admits no other kinds.
            other => unreachable!("irreversible strategy contains {other}"),
        };
        moves.push(Move::new(kind, v));
    }
    Ok(SequentialStrategy::new(moves))
}

/// First index at which each vertex is pebbled. Complete strategies pebble
/// every vertex at least once, since every vertex is an ancestor of a root.
fn first_pebbling(dag: &Dag, irrev: &SequentialStrategy) -> Vec<usize> {
    let mut first = vec![usize::MAX; dag.n_vertices()];
    for (i, mv) in irrev.moves().iter().enumerate() {
        if mv.kind == MoveKind::Pebble && first[mv.vertex] == usize::MAX {
            first[mv.vertex] = i;
        }
    }
    first
}

/// Clears the ghosts left by the front: from `(R', V \ R')` to `(R', ∅)`,
/// keeping the pebbles on the root subset `R'` untouched throughout.
pub fn irrev_to_spooky_cleanup(
    dag: &Dag,
    irrev: &SequentialStrategy,
    keep: &BTreeSet<Vertex>,
) -> Result<SequentialStrategy, TransformError> {
    validate(dag, irrev, Semantics::Irreversible, true)?;
    let roots = dag.roots();
    if let Some(&v) = keep.iter().find(|v| !roots.contains(v)) {
        return Err(TransformError::KeepNotRoot(v));
    }
    let first = first_pebbling(dag, irrev);
    // Reverse order of first pebbling: a vertex's ancestors are pebbled
    // before it, so later-processed vertices never disturb earlier ones.
    let mut order: Vec<Vertex> = dag.vertices().filter(|v| !keep.contains(v)).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(first[v]));
    let mut moves = Vec::new();
    for v in order {
        let scope: BTreeSet<Vertex> = dag.ancestors_of(v).into_iter().collect();
        // Ancestors have successors, so the scope never meets the roots
        // (except possibly v itself) and every scoped vertex starts ghosted.
        let mut ghosted = scope.clone();
        for (i, mv) in irrev.moves().iter().enumerate() {
            let u = mv.vertex;
            if !scope.contains(&u) {
                continue;
            }
            if u == v {
                if i == first[v] {
                    moves.push(Move::new(MoveKind::Unghost, v));
                    moves.push(Move::new(MoveKind::Unpebble, v));
                    ghosted.remove(&v);
                }
                continue;
            }
            match mv.kind {
                MoveKind::Pebble if ghosted.remove(&u) => {
                    moves.push(Move::new(MoveKind::Unghost, u));
                }
                MoveKind::Pebble => moves.push(Move::new(MoveKind::Pebble, u)),
                MoveKind::Unpebble => {
                    ghosted.insert(u);
                    moves.push(Move::new(MoveKind::Ghost, u));
                }
                other => unreachable!("irreversible strategy contains {other}"),
            }
        }
        debug_assert_eq!(ghosted, scope.iter().copied().filter(|u| *u != v).collect());
    }
    Ok(SequentialStrategy::new(moves))
}

/// Converts a complete irreversible strategy into a complete spooky one:
/// the front followed by the cleanup with all roots kept.
pub fn irrev_to_spooky(
    dag: &Dag,
    irrev: &SequentialStrategy,
) -> Result<SequentialStrategy, TransformError> {
    let keep: BTreeSet<Vertex> = dag.roots().into_iter().collect();
    let front = irrev_to_spooky_front(dag, irrev, &BTreeSet::new())?;
    let cleanup = irrev_to_spooky_cleanup(dag, irrev, &keep)?;
    let mut moves = front.moves().to_vec();
    moves.extend_from_slice(cleanup.moves());
    let out = SequentialStrategy::new(moves);
    debug_assert!(validate(dag, &out, Semantics::Spooky, true).is_ok());
    Ok(out)
}
