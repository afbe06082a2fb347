//! Pebble-game semantics: configurations, moves, sequential and parallel
//! validators for the irreversible, reversible and spooky variants, and cost
//! metrics.
//!
//! A configuration is a pair of disjoint vertex sets `(pebbled, ghosted)`.
//! A sequential strategy is a move list replayed from a start configuration;
//! a parallel trace is a configuration list where each step may change many
//! vertices at once, constrained by the move-clause families M1-M4.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::{Dag, Vertex};

/// Which variant of the game governs move legality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    /// Unpebbling is unconditional; no ghosts.
    Irreversible,
    /// Unpebbling requires pebbled predecessors; no ghosts.
    Reversible,
    /// Reversible rules plus ghost/unghost moves.
    Spooky,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Semantics::Irreversible => "irreversible",
            Semantics::Reversible => "reversible",
            Semantics::Spooky => "spooky",
        };
        f.write_str(s)
    }
}

/// A pair of disjoint vertex sets: pebbled (quantum space) and ghosted
/// (classical space) vertices at one point in time.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Configuration {
    pebbled: BTreeSet<Vertex>,
    ghosted: BTreeSet<Vertex>,
}

impl Configuration {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Fails if the two sets overlap.
    pub fn new(
        pebbled: BTreeSet<Vertex>,
        ghosted: BTreeSet<Vertex>,
    ) -> Result<Self, OverlapError> {
        if let Some(&v) = pebbled.intersection(&ghosted).next() {
            return Err(OverlapError(v));
        }
        Ok(Self { pebbled, ghosted })
    }

    pub fn pebbled(&self) -> &BTreeSet<Vertex> {
        &self.pebbled
    }

    pub fn ghosted(&self) -> &BTreeSet<Vertex> {
        &self.ghosted
    }

    pub fn is_pebbled(&self, v: Vertex) -> bool {
        self.pebbled.contains(&v)
    }

    pub fn is_ghosted(&self, v: Vertex) -> bool {
        self.ghosted.contains(&v)
    }

    /// The complete-game goal configuration `(R, {})`.
    pub fn goal(dag: &Dag) -> Self {
        Self {
            pebbled: dag.roots().into_iter().collect(),
            ghosted: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("vertex {0} is both pebbled and ghosted")]
pub struct OverlapError(pub Vertex);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Pebble,
    Unpebble,
    Ghost,
    Unghost,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MoveKind::Pebble => "pebble",
            MoveKind::Unpebble => "unpebble",
            MoveKind::Ghost => "ghost",
            MoveKind::Unghost => "unghost",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    pub vertex: Vertex,
}

impl Move {
    pub fn new(kind: MoveKind, vertex: Vertex) -> Self {
        Self { kind, vertex }
    }
}

/// An ordered move list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SequentialStrategy {
    moves: Vec<Move>,
}

impl SequentialStrategy {
    pub fn new(moves: Vec<Move>) -> Self {
        Self { moves }
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Parses the strategy file format: one `<kind> <label>` move per line,
    /// `#` starts a comment.
    pub fn from_text(dag: &Dag, text: &str) -> Result<Self, StrategyParseError> {
        let mut moves = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let kind = match parts.next().unwrap() {
                "pebble" => MoveKind::Pebble,
                "unpebble" => MoveKind::Unpebble,
                "ghost" => MoveKind::Ghost,
                "unghost" => MoveKind::Unghost,
                other => {
                    return Err(StrategyParseError::BadKind {
                        line: line_no,
                        kind: other.to_string(),
                    })
                }
            };
            let label = parts
                .next()
                .ok_or(StrategyParseError::MissingVertex { line: line_no })?;
            if parts.next().is_some() {
                return Err(StrategyParseError::TrailingTokens { line: line_no });
            }
            let vertex =
                dag.vertex_by_label(label)
                    .ok_or_else(|| StrategyParseError::UnknownVertex {
                        line: line_no,
                        label: label.to_string(),
                    })?;
            moves.push(Move::new(kind, vertex));
        }
        Ok(Self { moves })
    }

    pub fn to_text(&self, dag: &Dag) -> String {
        let mut out = String::new();
        for mv in &self.moves {
            out.push_str(&format!("{} {}\n", mv.kind, dag.label(mv.vertex)));
        }
        out
    }

    /// Expands the strategy into the equivalent one-move-per-step trace.
    pub fn to_parallel_trace(
        &self,
        dag: &Dag,
        semantics: Semantics,
    ) -> Result<ParallelTrace, ValidationError> {
        let mut configs = vec![Configuration::empty()];
        for (i, mv) in self.moves.iter().enumerate() {
            let next = apply_move(dag, configs.last().unwrap(), *mv, semantics)
                .map_err(|source| ValidationError::IllegalMove { index: i, source })?;
            configs.push(next);
        }
        Ok(ParallelTrace { configs })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyParseError {
    #[error("line {line}: unknown move kind `{kind}`")]
    BadKind { line: usize, kind: String },
    #[error("line {line}: missing vertex label")]
    MissingVertex { line: usize },
    #[error("line {line}: trailing tokens after move")]
    TrailingTokens { line: usize },
    #[error("line {line}: unknown vertex `{label}`")]
    UnknownVertex { line: usize, label: String },
}

/// An ordered configuration list; step `t` is the transition from
/// `configs[t-1]` to `configs[t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelTrace {
    pub configs: Vec<Configuration>,
}

impl ParallelTrace {
    pub fn new(configs: Vec<Configuration>) -> Self {
        Self { configs }
    }

    pub fn n_steps(&self) -> usize {
        self.configs.len().saturating_sub(1)
    }
}

/// Costs of a strategy or trace: maximum simultaneous pebbles, maximum
/// simultaneous ghosts, and the number of moves (or steps).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub pebbles: usize,
    pub ghosts: usize,
    pub time: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("vertex {0} is already pebbled")]
    AlreadyPebbled(Vertex),
    #[error("vertex {0} is not pebbled")]
    NotPebbled(Vertex),
    #[error("vertex {0} is not ghosted")]
    NotGhosted(Vertex),
    #[error("vertex {0} carries a ghost")]
    GhostPresent(Vertex),
    #[error("predecessor {pred} of vertex {vertex} is not pebbled")]
    PredecessorNotPebbled { vertex: Vertex, pred: Vertex },
    #[error("ghost moves are not allowed under {0} semantics")]
    GhostMoveInSemantics(Semantics),
    #[error("vertex {0} does not exist in the DAG")]
    UnknownVertex(Vertex),
}

/// Applies one move to a configuration under the chosen semantics.
pub fn apply_move(
    dag: &Dag,
    cfg: &Configuration,
    mv: Move,
    semantics: Semantics,
) -> Result<Configuration, MoveError> {
    let v = mv.vertex;
    if v >= dag.n_vertices() {
        return Err(MoveError::UnknownVertex(v));
    }
    let preds_pebbled = |cfg: &Configuration| {
        dag.preds(v)
            .iter()
            .find(|&&w| !cfg.is_pebbled(w))
            .map(|&w| MoveError::PredecessorNotPebbled { vertex: v, pred: w })
    };
    let mut next = cfg.clone();
    match mv.kind {
        MoveKind::Pebble => {
            if cfg.is_pebbled(v) {
                return Err(MoveError::AlreadyPebbled(v));
            }
            if cfg.is_ghosted(v) {
                return Err(MoveError::GhostPresent(v));
            }
            if let Some(e) = preds_pebbled(cfg) {
                return Err(e);
            }
            next.pebbled.insert(v);
        }
        MoveKind::Unpebble => {
            if !cfg.is_pebbled(v) {
                return Err(MoveError::NotPebbled(v));
            }
            if semantics != Semantics::Irreversible {
                if let Some(e) = preds_pebbled(cfg) {
                    return Err(e);
                }
            }
            next.pebbled.remove(&v);
        }
        MoveKind::Ghost => {
            if semantics != Semantics::Spooky {
                return Err(MoveError::GhostMoveInSemantics(semantics));
            }
            if !cfg.is_pebbled(v) {
                return Err(MoveError::NotPebbled(v));
            }
            next.pebbled.remove(&v);
            next.ghosted.insert(v);
        }
        MoveKind::Unghost => {
            if semantics != Semantics::Spooky {
                return Err(MoveError::GhostMoveInSemantics(semantics));
            }
            if !cfg.is_ghosted(v) {
                return Err(MoveError::NotGhosted(v));
            }
            if let Some(e) = preds_pebbled(cfg) {
                return Err(e);
            }
            next.ghosted.remove(&v);
            next.pebbled.insert(v);
        }
    }
    Ok(next)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("illegal move at index {index}: {source}")]
    IllegalMove { index: usize, source: MoveError },
    #[error("incomplete strategy: final configuration is not (roots, {{}})")]
    Incomplete,
}

/// Replays a strategy from the empty configuration. With `complete` set, the
/// final configuration must be exactly `(R, {})`.
pub fn validate(
    dag: &Dag,
    strat: &SequentialStrategy,
    semantics: Semantics,
    complete: bool,
) -> Result<CostReport, ValidationError> {
    let (report, end) = validate_sub(dag, &Configuration::empty(), strat, semantics)?;
    if complete && end != Configuration::goal(dag) {
        return Err(ValidationError::Incomplete);
    }
    Ok(report)
}

/// Replays a sub-strategy from an arbitrary start configuration, returning
/// the costs and the final configuration.
pub fn validate_sub(
    dag: &Dag,
    start: &Configuration,
    strat: &SequentialStrategy,
    semantics: Semantics,
) -> Result<(CostReport, Configuration), ValidationError> {
    let mut cfg = start.clone();
    let mut pebbles = cfg.pebbled.len();
    let mut ghosts = cfg.ghosted.len();
    for (i, mv) in strat.moves.iter().enumerate() {
        cfg = apply_move(dag, &cfg, *mv, semantics)
            .map_err(|source| ValidationError::IllegalMove { index: i, source })?;
        pebbles = pebbles.max(cfg.pebbled.len());
        ghosts = ghosts.max(cfg.ghosted.len());
    }
    let report = CostReport {
        pebbles,
        ghosts,
        time: strat.len(),
    };
    Ok((report, cfg))
}

/// Which clause family a parallel trace violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseFamily {
    /// Initial clauses: configuration 0 must be empty.
    Init,
    /// Final clauses: the last configuration must be `(R, {})`.
    Final,
    /// Newly pebbled vertex: predecessors pebbled at both steps, no ghost left.
    M1,
    /// Removed pebble: predecessors pebbled at both steps or a ghost appears.
    M2,
    /// New ghost: the pebble must be removed in the same step.
    M3,
    /// Removed ghost: a pebble appears and predecessors are pebbled at both steps.
    M4,
    /// Cardinality: pebble or ghost budget exceeded.
    Card,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParallelError {
    #[error("trace has no configurations")]
    EmptyTrace,
    #[error("clause family {family:?} violated at step {step} on vertex {vertex:?}")]
    ClauseViolation {
        family: ClauseFamily,
        step: usize,
        vertex: Option<Vertex>,
    },
}

/// Checks a parallel trace against the set-wise reading of the move clause
/// families M1-M4 and the per-step budgets. With `complete` set, the boundary
/// conditions (empty start, `(R, {})` end) are checked as well.
pub fn validate_parallel(
    dag: &Dag,
    trace: &ParallelTrace,
    pebble_budget: usize,
    ghost_budget: usize,
    complete: bool,
) -> Result<CostReport, ParallelError> {
    let configs = &trace.configs;
    if configs.is_empty() {
        return Err(ParallelError::EmptyTrace);
    }
    let violation = |family, step, vertex| ParallelError::ClauseViolation {
        family,
        step,
        vertex,
    };
    if complete {
        if configs[0] != Configuration::empty() {
            return Err(violation(ClauseFamily::Init, 0, None));
        }
        if *configs.last().unwrap() != Configuration::goal(dag) {
            return Err(violation(ClauseFamily::Final, configs.len() - 1, None));
        }
    }
    let mut pebbles = 0;
    let mut ghosts = 0;
    for (t, cfg) in configs.iter().enumerate() {
        if cfg.pebbled.len() > pebble_budget || cfg.ghosted.len() > ghost_budget {
            return Err(violation(ClauseFamily::Card, t, None));
        }
        pebbles = pebbles.max(cfg.pebbled.len());
        ghosts = ghosts.max(cfg.ghosted.len());
    }
    for t in 1..configs.len() {
        let (prev, cur) = (&configs[t - 1], &configs[t]);
        for &v in cur.pebbled.difference(&prev.pebbled) {
            // M1: newly pebbled
            if cur.is_ghosted(v)
                || dag
                    .preds(v)
                    .iter()
                    .any(|&w| !(prev.is_pebbled(w) && cur.is_pebbled(w)))
            {
                return Err(violation(ClauseFamily::M1, t, Some(v)));
            }
        }
        for &v in prev.pebbled.difference(&cur.pebbled) {
            // M2: pebble removed
            if !cur.is_ghosted(v)
                && dag
                    .preds(v)
                    .iter()
                    .any(|&w| !(prev.is_pebbled(w) && cur.is_pebbled(w)))
            {
                return Err(violation(ClauseFamily::M2, t, Some(v)));
            }
        }
        for &v in cur.ghosted.difference(&prev.ghosted) {
            // M3: new ghost
            if !(prev.is_pebbled(v) && !cur.is_pebbled(v)) {
                return Err(violation(ClauseFamily::M3, t, Some(v)));
            }
        }
        for &v in prev.ghosted.difference(&cur.ghosted) {
            // M4: ghost removed
            if !cur.is_pebbled(v)
                || dag
                    .preds(v)
                    .iter()
                    .any(|&w| !(prev.is_pebbled(w) && cur.is_pebbled(w)))
            {
                return Err(violation(ClauseFamily::M4, t, Some(v)));
            }
        }
    }
    Ok(CostReport {
        pebbles,
        ghosts,
        time: trace.n_steps(),
    })
}
