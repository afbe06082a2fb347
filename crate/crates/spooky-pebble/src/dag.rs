//! DAG representation, edge-list parsing and graph generators.
//!
//! Vertices are dense integer ids in first-appearance order; labels are kept
//! in a side table for I/O. Edges are stored in the definitional orientation:
//! `(u, v)` means `u` is a direct predecessor (input) of `v`.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Dense vertex id.
pub type Vertex = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DagError {
    #[error("line {line}: cannot parse `{text}`")]
    UnparseableLine { line: usize, text: String },
    #[error("line {line}: self-loop on `{label}`")]
    SelfLoop { line: usize, label: String },
    #[error("line {line}: duplicate edge {from} -> {to}")]
    DuplicateEdge {
        line: usize,
        from: String,
        to: String,
    },
    #[error("graph contains a cycle (no topological order exists)")]
    Cycle,
    #[error("vertex count must be at least 1")]
    EmptyGraph,
    #[error("diamond gadget requires p >= 2, got {0}")]
    GadgetTooSmall(usize),
}

/// An immutable directed acyclic graph with identified roots and leaves.
#[derive(Debug, Clone)]
pub struct Dag {
    labels: Vec<String>,
    preds: Vec<Vec<Vertex>>,
    succs: Vec<Vec<Vertex>>,
    topo: Vec<Vertex>,
    by_label: HashMap<String, Vertex>,
}

impl Dag {
    /// Builds a DAG from labelled vertices and edges given as index pairs
    /// `(pred, succ)`. Rejects duplicate edges, self-loops and cycles.
    pub fn from_edges(labels: Vec<String>, edges: &[(Vertex, Vertex)]) -> Result<Dag, DagError> {
        let n = labels.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge endpoint out of range");
            if u == v {
                return Err(DagError::SelfLoop {
                    line: 0,
                    label: labels[u].clone(),
                });
            }
            if succs[u].contains(&v) {
                return Err(DagError::DuplicateEdge {
                    line: 0,
                    from: labels[u].clone(),
                    to: labels[v].clone(),
                });
            }
            succs[u].push(v);
            preds[v].push(u);
        }
        let topo = topo_sort(&preds, &succs).ok_or(DagError::Cycle)?;
        let by_label = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Ok(Dag {
            labels,
            preds,
            succs,
            topo,
            by_label,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<Vertex> {
        self.by_label.get(label).copied()
    }

    /// Direct predecessors (inputs) of `v`.
    pub fn preds(&self, v: Vertex) -> &[Vertex] {
        &self.preds[v]
    }

    /// Direct successors (consumers) of `v`.
    pub fn succs(&self, v: Vertex) -> &[Vertex] {
        &self.succs[v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.labels.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.succs
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub fn n_edges(&self) -> usize {
        self.succs.iter().map(Vec::len).sum()
    }

    /// Vertices with out-degree 0, recomputed from the edge set.
    pub fn roots(&self) -> Vec<Vertex> {
        self.vertices().filter(|&v| self.succs[v].is_empty()).collect()
    }

    /// Vertices with in-degree 0.
    pub fn leaves(&self) -> Vec<Vertex> {
        self.vertices().filter(|&v| self.preds[v].is_empty()).collect()
    }

    pub fn topo_order(&self) -> &[Vertex] {
        &self.topo
    }

    /// All ancestors of `v` including `v` itself: the vertex set of the
    /// largest subgraph rooted at `v`.
    pub fn ancestors_of(&self, v: Vertex) -> Vec<Vertex> {
        let mut seen = vec![false; self.n_vertices()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for &w in &self.preds[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..self.n_vertices()).filter(|&u| seen[u]).collect()
    }

    /// Renders the DAG in the edge-list file format accepted by [`parse_dag`].
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.labels[u], self.labels[v]).unwrap();
        }
        for v in self.vertices() {
            if self.preds[v].is_empty() && self.succs[v].is_empty() {
                writeln!(out, "{}", self.labels[v]).unwrap();
            }
        }
        out
    }
}

fn topo_sort(preds: &[Vec<Vertex>], succs: &[Vec<Vertex>]) -> Option<Vec<Vertex>> {
    let n = preds.len();
    let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut queue: Vec<Vertex> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop() {
        order.push(v);
        for &w in &succs[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Parses the edge-list format: one `<pred> <succ>` pair per line, a bare
/// `<label>` line declares an isolated vertex, `#` starts a comment.
pub fn parse_dag(text: &str) -> Result<Dag, DagError> {
    let mut labels: Vec<String> = Vec::new();
    let mut by_label: HashMap<String, Vertex> = HashMap::new();
    let mut edges: Vec<(Vertex, Vertex, usize)> = Vec::new();

    let intern = |name: &str, labels: &mut Vec<String>, by: &mut HashMap<String, Vertex>| {
        *by.entry(name.to_string()).or_insert_with(|| {
            labels.push(name.to_string());
            labels.len() - 1
        })
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let first = parts.next().unwrap();
        match (parts.next(), parts.next()) {
            (None, _) => {
                intern(first, &mut labels, &mut by_label);
            }
            (Some(second), None) => {
                let u = intern(first, &mut labels, &mut by_label);
                let v = intern(second, &mut labels, &mut by_label);
                if u == v {
                    return Err(DagError::SelfLoop {
                        line: line_no,
                        label: first.to_string(),
                    });
                }
                if edges.iter().any(|&(a, b, _)| (a, b) == (u, v)) {
                    return Err(DagError::DuplicateEdge {
                        line: line_no,
                        from: first.to_string(),
                        to: second.to_string(),
                    });
                }
                edges.push((u, v, line_no));
            }
            _ => {
                return Err(DagError::UnparseableLine {
                    line: line_no,
                    text: raw.to_string(),
                })
            }
        }
    }

    let pairs: Vec<(Vertex, Vertex)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
    Dag::from_edges(labels, &pairs)
}

/// The line graph v1 -> v2 -> ... -> vn.
pub fn line_graph(n: usize) -> Result<Dag, DagError> {
    if n == 0 {
        return Err(DagError::EmptyGraph);
    }
    let labels = (1..=n).map(|i| format!("v{i}")).collect();
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Dag::from_edges(labels, &edges)
}

/// The p x p diamond-lattice gadget: vertices `(i,j)` for `i,j in 1..=p`,
/// single leaf `(1,1)`, single root `(p,p)`, and each vertex feeding its
/// lattice neighbours `(i+1,j)` and `(i,j+1)` where they exist.
pub fn diamond_gadget(p: usize) -> Result<Dag, DagError> {
    if p < 2 {
        return Err(DagError::GadgetTooSmall(p));
    }
    let id = |i: usize, j: usize| (i - 1) * p + (j - 1);
    let mut labels = vec![String::new(); p * p];
    let mut edges = Vec::new();
    for i in 1..=p {
        for j in 1..=p {
            labels[id(i, j)] = format!("{i},{j}");
            if i < p {
                edges.push((id(i, j), id(i + 1, j)));
            }
            if j < p {
                edges.push((id(i, j), id(i, j + 1)));
            }
        }
    }
    Dag::from_edges(labels, &edges)
}

/// The explicit column-sweep strategy pebbling [`diamond_gadget`]`(p)`
/// irreversibly with exactly `p + 1` pebbles, touching the leaf only once.
pub fn diamond_gadget_strategy(p: usize) -> Result<crate::game::SequentialStrategy, DagError> {
    use crate::game::{Move, MoveKind, SequentialStrategy};
    if p < 2 {
        return Err(DagError::GadgetTooSmall(p));
    }
    let id = |i: usize, j: usize| (i - 1) * p + (j - 1);
    let mut moves = Vec::new();
    for i in 1..=p {
        moves.push(Move::new(MoveKind::Pebble, id(i, 1)));
    }
    for j in 2..=p {
        for i in 1..=p {
            moves.push(Move::new(MoveKind::Pebble, id(i, j)));
            moves.push(Move::new(MoveKind::Unpebble, id(i, j - 1)));
        }
    }
    for i in 1..p {
        moves.push(Move::new(MoveKind::Unpebble, id(i, p)));
    }
    Ok(SequentialStrategy::new(moves))
}

/// A random DAG: edges only from lower to higher index, present with
/// probability `density`. Pure function of `(n, density, seed)`.
pub fn random_dag(n: usize, density: f64, seed: u64) -> Result<Dag, DagError> {
    if n == 0 {
        return Err(DagError::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                edges.push((i, j));
            }
        }
    }
    Dag::from_edges(labels, &edges)
}

/// The five-gate example DAG A->C, B->D, C->E, D->E used throughout the tests.
#[doc(hidden)]
pub fn example_dag() -> Dag {
    parse_dag("a c\nb d\nc e\nd e").unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_line_graph() {
        let dag = parse_dag("a b\nb c").unwrap();
        assert_eq!(dag.n_vertices(), 3);
        assert_eq!(dag.roots(), vec![dag.vertex_by_label("c").unwrap()]);
        assert_eq!(dag.leaves(), vec![dag.vertex_by_label("a").unwrap()]);
    }

    #[test]
    fn parse_example_dag() {
        let dag = example_dag();
        assert_eq!(dag.n_vertices(), 5);
        assert_eq!(dag.n_edges(), 4);
        let e = dag.vertex_by_label("e").unwrap();
        assert_eq!(dag.roots(), vec![e]);
        let a = dag.vertex_by_label("a").unwrap();
        let b = dag.vertex_by_label("b").unwrap();
        assert_eq!(dag.leaves(), vec![a, b]);
    }

    #[test]
    fn parse_cycle_rejected() {
        assert!(matches!(parse_dag("a b\nb a"), Err(DagError::Cycle)));
    }

    #[test]
    fn parse_self_loop_rejected() {
        match parse_dag("a a") {
            Err(DagError::SelfLoop { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected self-loop error, got {other:?}"),
        }
    }

    #[test]
    fn parse_duplicate_edge_rejected() {
        match parse_dag("a b\na b") {
            Err(DagError::DuplicateEdge { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected duplicate edge error, got {other:?}"),
        }
    }

    #[test]
    fn parse_bad_line_rejected() {
        match parse_dag("a b c") {
            Err(DagError::UnparseableLine { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_comments_and_isolated() {
        let dag = parse_dag("# header\na b # trailing\nlonely\n").unwrap();
        assert_eq!(dag.n_vertices(), 3);
        assert!(dag.vertex_by_label("lonely").is_some());
    }

    #[test]
    fn line_graph_shapes() {
        let d1 = line_graph(1).unwrap();
        assert_eq!(d1.n_vertices(), 1);
        assert_eq!(d1.roots(), d1.leaves());

        let d3 = line_graph(3).unwrap();
        assert_eq!(d3.n_edges(), 2);
        assert_eq!(d3.roots(), vec![2]);

        assert!(line_graph(0).is_err());
    }

    #[test]
    fn diamond_shapes() {
        for p in 2..=6 {
            let dag = diamond_gadget(p).unwrap();
            assert_eq!(dag.n_vertices(), p * p);
            assert_eq!(dag.leaves().len(), 1);
            assert_eq!(dag.roots().len(), 1);
            assert_eq!(dag.label(dag.leaves()[0]), "1,1");
            assert_eq!(dag.label(dag.roots()[0]), format!("{p},{p}"));
        }
        assert!(diamond_gadget(1).is_err());
    }

    #[test]
    fn random_dag_deterministic() {
        let a = random_dag(6, 0.5, 7).unwrap();
        let b = random_dag(6, 0.5, 7).unwrap();
        assert_eq!(
            a.edges().collect::<Vec<_>>(),
            b.edges().collect::<Vec<_>>()
        );
        let z = random_dag(6, 0.0, 7).unwrap();
        assert_eq!(z.n_edges(), 0);
        assert_eq!(z.roots().len(), 6);
        assert_eq!(random_dag(1, 0.9, 3).unwrap().n_vertices(), 1);
    }

    #[test]
    fn topo_always_succeeds_on_generated() {
        for seed in 0..20 {
            let dag = random_dag(8, 0.4, seed).unwrap();
            assert_eq!(dag.topo_order().len(), 8);
            assert!(!dag.roots().is_empty());
        }
    }
}
