//! CNF encoding of the spooky pebble game as a bounded-model-checking
//! problem, with incremental horizon unrolling.
//!
//! For each vertex `v` and time `i` there are two state variables: `p_{v,i}`
//! (pebbled) and `s_{v,i}` (ghosted). The formula is the conjunction of
//! initial units, per-transition move clauses, per-step cardinality
//! constraints, and final clauses pinning the last step to `(roots, {})`.
//! Final clauses must be retractable when the horizon grows, so each batch is
//! guarded by a fresh activation literal passed as a solver assumption;
//! growing the horizon permanently disables the old batch.
//!
//! The parallel semantics allows any number of simultaneous moves per step,
//! constrained vertex-wise:
//!
//! - M1: a new pebble needs predecessors pebbled at both steps and no ghost left;
//! - M2: a removed pebble needs predecessors pebbled at both steps, unless a
//!   ghost appears on the vertex;
//! - M3: a new ghost consumes the vertex's pebble;
//! - M4: a removed ghost produces a pebble and needs predecessors pebbled at
//!   both steps.

use crate::dag::{Dag, Vertex};

/// Which part of the formula a clause belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupTag {
    Init,
    Final,
    Moves,
    Card,
}

/// A batch of clauses from one encoding call.
#[derive(Debug, Clone)]
pub struct ClauseGroup {
    pub tag: GroupTag,
    pub clauses: Vec<Vec<i32>>,
}

/// Allocator mapping (vertex, time) state variables and auxiliary variables
/// to DIMACS indices. State variables for a time step are allocated as one
/// block; auxiliary variables interleave between blocks.
#[derive(Debug, Clone, Default)]
pub struct VarMap {
    next: i32,
    /// Per time step: first variable of the `2n`-wide state block.
    blocks: Vec<i32>,
    n: usize,
}

impl VarMap {
    pub fn new(n_vertices: usize) -> Self {
        Self {
            next: 1,
            blocks: Vec::new(),
            n: n_vertices,
        }
    }

    /// Allocates the state block for the next time step.
    pub fn push_time(&mut self) -> usize {
        self.blocks.push(self.next);
        self.next += 2 * self.n as i32;
        self.blocks.len() - 1
    }

    pub fn n_times(&self) -> usize {
        self.blocks.len()
    }

    /// The pebble variable `p_{v,i}`.
    pub fn p(&self, v: Vertex, i: usize) -> i32 {
        debug_assert!(v < self.n);
        self.blocks[i] + v as i32
    }

    /// The ghost variable `s_{v,i}`.
    pub fn s(&self, v: Vertex, i: usize) -> i32 {
        debug_assert!(v < self.n);
        self.blocks[i] + (self.n + v) as i32
    }

    /// A fresh auxiliary variable.
    pub fn fresh(&mut self) -> i32 {
        let v = self.next;
        self.next += 1;
        v
    }

    pub fn n_vars(&self) -> usize {
        (self.next - 1) as usize
    }
}

/// Unit clauses forcing the empty configuration at time 0.
pub fn encode_initial(dag: &Dag, vars: &VarMap) -> ClauseGroup {
    let mut clauses = Vec::with_capacity(2 * dag.n_vertices());
    for v in dag.vertices() {
        clauses.push(vec![-vars.p(v, 0)]);
        clauses.push(vec![-vars.s(v, 0)]);
    }
    ClauseGroup {
        tag: GroupTag::Init,
        clauses,
    }
}

/// Clauses pinning time `i` to `(roots, {})`, guarded by `act`: they only
/// bite while `act` is assumed, and retract for good once `-act` is asserted.
pub fn encode_final(dag: &Dag, vars: &VarMap, i: usize, act: i32) -> ClauseGroup {
    let roots = dag.roots();
    let mut clauses = Vec::with_capacity(2 * dag.n_vertices());
    for v in dag.vertices() {
        let p = vars.p(v, i);
        let want = if roots.contains(&v) { p } else { -p };
        clauses.push(vec![-act, want]);
        clauses.push(vec![-act, -vars.s(v, i)]);
    }
    ClauseGroup {
        tag: GroupTag::Final,
        clauses,
    }
}

/// Move clauses for the transition from time `i` to `i + 1`.
pub fn encode_moves(dag: &Dag, vars: &VarMap, i: usize) -> ClauseGroup {
    let j = i + 1;
    let mut clauses = Vec::new();
    for v in dag.vertices() {
        let (pv0, pv1) = (vars.p(v, i), vars.p(v, j));
        let (sv0, sv1) = (vars.s(v, i), vars.s(v, j));
        // M1: no ghost may remain under a fresh pebble.
        clauses.push(vec![pv0, -pv1, -sv1]);
        // M3: a new ghost consumes the pebble.
        clauses.push(vec![sv0, -sv1, pv0]);
        clauses.push(vec![sv0, -sv1, -pv1]);
        // M4: a removed ghost produces a pebble. Stated per vertex rather
        // than per edge so that predecessor-less vertices are covered too.
        clauses.push(vec![-sv0, sv1, pv1]);
        for &w in dag.preds(v) {
            let (pw0, pw1) = (vars.p(w, i), vars.p(w, j));
            // M1: a new pebble needs predecessors pebbled at both steps.
            clauses.push(vec![pv0, -pv1, pw0]);
            clauses.push(vec![pv0, -pv1, pw1]);
            // M2: a removed pebble does too, unless a ghost appears.
            clauses.push(vec![-pv0, pv1, sv1, pw0]);
            clauses.push(vec![-pv0, pv1, sv1, pw1]);
            // M4: a removed ghost as well.
            clauses.push(vec![-sv0, sv1, pw0]);
            clauses.push(vec![-sv0, sv1, pw1]);
        }
    }
    ClauseGroup {
        tag: GroupTag::Moves,
        clauses,
    }
}

/// Sinz sequential-counter at-most-`k` constraint over `lits`.
fn at_most_k(lits: &[i32], k: usize, vars: &mut VarMap, out: &mut Vec<Vec<i32>>) {
    let n = lits.len();
    if k >= n {
        return;
    }
    if k == 0 {
        for &x in lits {
            out.push(vec![-x]);
        }
        return;
    }
    // reg[j][l]: among lits[0..=j], at least l + 1 are true.
    let mut prev: Vec<i32> = (0..k).map(|_| vars.fresh()).collect();
    out.push(vec![-lits[0], prev[0]]);
    for &r in &prev[1..] {
        out.push(vec![-r]);
    }
    for j in 1..n {
        let x = lits[j];
        if j == n - 1 {
            out.push(vec![-x, -prev[k - 1]]);
            break;
        }
        let cur: Vec<i32> = (0..k).map(|_| vars.fresh()).collect();
        out.push(vec![-x, cur[0]]);
        out.push(vec![-prev[0], cur[0]]);
        for l in 1..k {
            out.push(vec![-x, -prev[l - 1], cur[l]]);
            out.push(vec![-prev[l], cur[l]]);
        }
        out.push(vec![-x, -prev[k - 1]]);
        prev = cur;
    }
}

/// Cardinality constraints bounding pebbles and ghosts at time `i`.
pub fn encode_cardinality(
    dag: &Dag,
    vars: &mut VarMap,
    i: usize,
    pebble_budget: usize,
    ghost_budget: usize,
) -> ClauseGroup {
    let mut clauses = Vec::new();
    let p_lits: Vec<i32> = dag.vertices().map(|v| vars.p(v, i)).collect();
    let s_lits: Vec<i32> = dag.vertices().map(|v| vars.s(v, i)).collect();
    at_most_k(&p_lits, pebble_budget, vars, &mut clauses);
    at_most_k(&s_lits, ghost_budget, vars, &mut clauses);
    ClauseGroup {
        tag: GroupTag::Card,
        clauses,
    }
}

/// Incrementally unrolled encoding of the game on one DAG with fixed budgets.
pub struct Encoding {
    dag: Dag,
    pebble_budget: usize,
    ghost_budget: usize,
    vars: VarMap,
    horizon: usize,
    act: i32,
    groups: Vec<ClauseGroup>,
    /// Clauses added since the last drain, for feeding the backend.
    pending: Vec<Vec<i32>>,
}

impl Encoding {
    /// Builds the horizon-0 formula: initial units, cardinality at time 0,
    /// and a guarded final batch pinning time 0.
    pub fn new(dag: &Dag, pebble_budget: usize, ghost_budget: usize) -> Self {
        let mut enc = Self {
            dag: dag.clone(),
            pebble_budget,
            ghost_budget,
            vars: VarMap::new(dag.n_vertices()),
            horizon: 0,
            act: 0,
            groups: Vec::new(),
            pending: Vec::new(),
        };
        enc.vars.push_time();
        let init = encode_initial(&enc.dag, &enc.vars);
        enc.push_group(init);
        let card = encode_cardinality(
            &enc.dag,
            &mut enc.vars,
            0,
            pebble_budget,
            ghost_budget,
        );
        enc.push_group(card);
        enc.act = enc.vars.fresh();
        let fin = encode_final(&enc.dag, &enc.vars, 0, enc.act);
        enc.push_group(fin);
        enc
    }

    fn push_group(&mut self, group: ClauseGroup) {
        self.pending.extend(group.clauses.iter().cloned());
        self.groups.push(group);
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn vars(&self) -> &VarMap {
        &self.vars
    }

    /// The assumptions enabling the current final batch.
    pub fn assumptions(&self) -> Vec<i32> {
        vec![self.act]
    }

    /// Extends the horizon by one step: retracts the old final batch, adds
    /// the new transition and cardinality clauses, and pins the new last step.
    pub fn unroll(&mut self) {
        let retract = ClauseGroup {
            tag: GroupTag::Final,
            clauses: vec![vec![-self.act]],
        };
        self.push_group(retract);
        self.horizon += 1;
        let i = self.vars.push_time();
        debug_assert_eq!(i, self.horizon);
        let moves = encode_moves(&self.dag, &self.vars, i - 1);
        self.push_group(moves);
        let card = encode_cardinality(
            &self.dag,
            &mut self.vars,
            i,
            self.pebble_budget,
            self.ghost_budget,
        );
        self.push_group(card);
        self.act = self.vars.fresh();
        let fin = encode_final(&self.dag, &self.vars, i, self.act);
        self.push_group(fin);
    }

    /// Clauses added since the last drain.
    pub fn drain_pending(&mut self) -> Vec<Vec<i32>> {
        std::mem::take(&mut self.pending)
    }

    pub fn groups(&self) -> &[ClauseGroup] {
        &self.groups
    }

    pub fn n_clauses(&self) -> usize {
        self.groups.iter().map(|g| g.clauses.len()).sum()
    }

    /// Renders the current formula in DIMACS CNF, with the live activation
    /// literal as a trailing unit so the file stands alone.
    pub fn to_dimacs(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let n_clauses = self.n_clauses() + 1;
        writeln!(out, "p cnf {} {}", self.vars.n_vars(), n_clauses).unwrap();
        for group in &self.groups {
            for clause in &group.clauses {
                for &l in clause {
                    write!(out, "{} ", l).unwrap();
                }
                out.push_str("0\n");
            }
        }
        writeln!(out, "{} 0", self.act).unwrap();
        out
    }
}
