//! Cross-module properties checked over randomized inputs.

use proptest::prelude::*;

use spooky_pebble::dag::{parse_dag, random_dag};
use spooky_pebble::game::{validate, Move, MoveKind, Semantics, SequentialStrategy};
use spooky_pebble::optimize::{optimize_fixpoint, sequentialize};
use spooky_pebble::oracle::{find_strategy, min_pebbles};
use spooky_pebble::solve::{solve_spooky, SolveLimits, SolveStatus};

fn small_dag() -> impl Strategy<Value = spooky_pebble::Dag> {
    (3usize..=7, 0u64..500).prop_map(|(n, seed)| random_dag(n, 0.4, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Rendering a move list and parsing it back is the identity, valid or not.
    #[test]
    fn strategy_text_round_trip(moves in prop::collection::vec((0usize..4, 0usize..5), 0..40)) {
        let dag = random_dag(5, 0.3, 1).unwrap();
        let kinds = [MoveKind::Pebble, MoveKind::Unpebble, MoveKind::Ghost, MoveKind::Unghost];
        let strat = SequentialStrategy::new(
            moves.into_iter().map(|(k, v)| Move::new(kinds[k], v)).collect(),
        );
        let text = strat.to_text(&dag);
        prop_assert_eq!(SequentialStrategy::from_text(&dag, &text).unwrap(), strat);
    }

    /// The edge-list renderer and parser are inverse on generated DAGs.
    #[test]
    fn dag_edge_list_round_trip(dag in small_dag()) {
        let parsed = parse_dag(&dag.to_edge_list()).unwrap();
        prop_assert_eq!(parsed.n_vertices(), dag.n_vertices());
        for v in dag.vertices() {
            let u = parsed.vertex_by_label(dag.label(v)).unwrap();
            let mut a: Vec<&str> = dag.preds(v).iter().map(|&w| dag.label(w)).collect();
            let mut b: Vec<&str> = parsed.preds(u).iter().map(|&w| parsed.label(w)).collect();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
        }
    }

    /// Rule inclusion: a reversible-valid strategy is valid in every
    /// semantics, and minimal costs are ordered accordingly.
    #[test]
    fn rule_inclusion(dag in small_dag()) {
        let n = dag.n_vertices();
        let rev = min_pebbles(&dag, Semantics::Reversible, 0).unwrap();
        let spooky = min_pebbles(&dag, Semantics::Spooky, n).unwrap();
        let irrev = min_pebbles(&dag, Semantics::Irreversible, 0).unwrap();
        prop_assert!(irrev <= spooky);
        prop_assert!(spooky <= rev);
        let witness = find_strategy(&dag, Semantics::Reversible, rev, 0).unwrap().unwrap();
        prop_assert!(validate(&dag, &witness, Semantics::Irreversible, true).is_ok());
        prop_assert!(validate(&dag, &witness, Semantics::Spooky, true).is_ok());
    }

    /// The bounded search is sound and its strategies survive the whole
    /// sequentialize/optimize pipeline.
    #[test]
    fn solver_pipeline_sound(dag in small_dag(), seed in 0u64..100) {
        let n = dag.n_vertices();
        let limits = SolveLimits { seed, ..SolveLimits::default() };
        let outcome = solve_spooky(&dag, n, n, &limits);
        prop_assert_eq!(outcome.status, SolveStatus::Solved);
        let strat = sequentialize(&dag, &outcome.trace.unwrap(), n, n).unwrap();
        let raw = validate(&dag, &strat, Semantics::Spooky, true).unwrap();
        let opt = optimize_fixpoint(&dag, &strat, n, seed);
        let tuned = validate(&dag, &opt, Semantics::Spooky, true).unwrap();
        prop_assert!(tuned.time <= raw.time);
        prop_assert!(tuned.pebbles <= raw.pebbles);
        prop_assert!(tuned.ghosts <= raw.ghosts);
    }

    /// With fewer pebbles than the true minimum, the search proves UNSAT at
    /// every horizon it reaches.
    #[test]
    fn starved_budget_stays_unsat(dag in small_dag()) {
        let n = dag.n_vertices();
        let need = min_pebbles(&dag, Semantics::Spooky, n).unwrap();
        prop_assume!(need > 1);
        let limits = SolveLimits { max_horizon: Some(12), ..SolveLimits::default() };
        let outcome = solve_spooky(&dag, need - 1, n, &limits);
        prop_assert_eq!(outcome.status, SolveStatus::Exhausted);
    }
}
