use junctionc::generate::{case_rng, random_chordal_case, random_connected_graph};
use junctionc::oracle::{enumerate_almond_trees, enumerate_elimination_orders, min_fill};
use junctionc::pos::{
    build_cycle_counterexample, fixpoint_local_propagation, LocalScheme, PosRelation,
};
use junctionc::verify::{check_almond, check_propagation, model_case};
use junctionc::*;
use proptest::prelude::*;
use std::sync::Arc;

fn tree_of(g: &UndirectedGraph) -> JunctionTree {
    let t = triangulate_heuristic(g).unwrap();
    let jg = build_junction_graph(g.universe(), cliques(&t.graph).unwrap()).unwrap();
    kruskal_min_cost_tree(&jg).unwrap()
}

#[test]
fn cycles_need_n_minus_three_fill_ins() {
    for n in 4..=7 {
        let g = UndirectedGraph::cycle(n);
        let best = min_fill(&g).unwrap();
        assert_eq!(best, n - 3);
        assert_eq!(triangulate_heuristic(&g).unwrap().fill_count(), best);
        assert_eq!(
            triangulate_optimal(&g, Objective::FillIn)
                .unwrap()
                .fill_count(),
            best
        );
    }
}

#[test]
fn optimal_ties_go_to_the_first_order() {
    let g = UndirectedGraph::cycle(5);
    let first = enumerate_elimination_orders(&g)
        .unwrap()
        .filter(|o| o.fill_ins.len() == 2)
        .map(|o| o.order)
        .next()
        .unwrap();
    assert_eq!(
        triangulate_optimal(&g, Objective::FillIn)
            .unwrap()
            .order
            .as_slice(),
        first.as_slice()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heuristic_output_is_chordal_and_keeps_edges(seed in any::<u64>(), n in 2usize..12, d in 0.0f64..0.6) {
        let g = random_connected_graph(&mut case_rng(seed, 0), Arc::new(Universe::binary(n)), d);
        for objective in [Objective::FillIn, Objective::CliqueWeight] {
            let t = triangulate_heuristic_with(&g, objective).unwrap();
            prop_assert!(is_chordal(&t.graph).is_chordal());
            for (a, b) in g.edges() {
                prop_assert!(t.graph.has_edge(a, b));
            }
            prop_assert_eq!(t.graph.edge_count(), g.edge_count() + t.fill_count());
        }
    }

    #[test]
    fn chordal_graphs_need_no_fill(seed in any::<u64>()) {
        let c = random_chordal_case(&mut case_rng(seed, 0), 1, 6);
        prop_assert_eq!(triangulate_heuristic(&c.graph).unwrap().fill_count(), 0);
        prop_assert!(perfect_elimination_order_exists(&c.graph));
    }

    #[test]
    fn greedy_tree_is_a_deterministic_junction_tree(seed in any::<u64>()) {
        let c = random_chordal_case(&mut case_rng(seed, 0), 1, 8);
        let jg = build_junction_graph(c.graph.universe(), c.cliques.clone()).unwrap();
        let t = kruskal_min_cost_tree(&jg).unwrap();
        prop_assert!(verify_junction_property(&t).holds());
        prop_assert_eq!(&t, &kruskal_min_cost_tree(&jg).unwrap());
        let p = prim_max_spanning_tree(&jg).unwrap();
        prop_assert_eq!(p.total_weight, t.total_weight);
        prop_assert_eq!(separator_multiset(&p), separator_multiset(&t));
    }

    #[test]
    fn almond_trees_are_valid_and_minimal(seed in any::<u64>()) {
        let c = random_chordal_case(&mut case_rng(seed, 0), 1, 7);
        let jg = build_junction_graph(c.graph.universe(), c.cliques.clone()).unwrap();
        let t = kruskal_min_cost_tree(&jg).unwrap();
        let seps = separator_multiset(&t);
        let a = build_almond_tree(&t.cliques, &seps).unwrap();
        prop_assert!(a.validate().is_ok());
        let contracted = contract(&t);
        prop_assert!(contracted.validate().is_ok());
        if let Ok(all) = enumerate_almond_trees(&t.cliques, &seps) {
            let min = all.iter().map(AlmondTree::total_cost).min().unwrap();
            prop_assert_eq!(a.total_cost(), min);
            let key = |t: &AlmondTree| {
                let mut l: Vec<(usize, usize)> = t.links.iter().map(|l| (l.subset, l.superset)).collect();
                l.sort_unstable();
                l
            };
            prop_assert!(all.iter().any(|x| key(x) == key(&a)));
        }
    }

    #[test]
    fn propagation_and_almond_agree_with_the_oracle(seed in any::<u64>()) {
        let (m, ev) = model_case(seed, 0);
        prop_assert!(check_propagation(&m, &ev).is_ok(), "{:?}", check_propagation(&m, &ev));
        prop_assert!(check_almond(&m, &ev).is_ok(), "{:?}", check_almond(&m, &ev));
    }

    #[test]
    fn contracted_trees_propagate_like_junction_trees(seed in any::<u64>()) {
        let (m, ev) = model_case(seed, 1);
        let t = tree_of(&m.graph());
        let a = contract(&t);
        let mut state = assign_factors(&m.universe, &m.factors, &t).unwrap();
        match (propagate(&mut state, &ev), propagate_almond(&m.universe, &a, &m.factors, &ev)) {
            (Ok(()), Ok(cal)) => {
                for v in 0..m.universe.len() {
                    let x = query_marginal(&state, v).unwrap();
                    let y = cal.query_marginal(v).unwrap();
                    for (p, q) in x.iter().zip(&y) {
                        prop_assert!((p - q).abs() <= 1e-12);
                    }
                }
                prop_assert_eq!(cal.stats.marginalizations, marginalization_budget(&a).marginalizations);
            }
            (Err(Error::ImpossibleEvidence), Err(Error::ImpossibleEvidence)) => {}
            (x, y) => prop_assert!(false, "{:?} vs {:?}", x, y.map(|_| ())),
        }
    }

    #[test]
    fn local_fixpoint_shrinks_monotonically(bits in prop::collection::vec(prop::collection::vec(0u8..2, 4), 4)) {
        let inst = build_cycle_counterexample(4).unwrap();
        let rels: Vec<PosRelation> = inst
            .scopes
            .iter()
            .zip(&bits)
            .map(|(s, b)| PosRelation::from_bits(s.clone(), vec![2, 2], b).unwrap())
            .collect();
        let total: usize = rels.iter().map(|r| r.table().len()).sum();
        let fix = fixpoint_local_propagation(&LocalScheme::new(inst.scopes.clone()), rels).unwrap();
        prop_assert!(fix.rounds <= total + 1);
        for w in fix.ones_per_round.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                prop_assert!(b <= a);
            }
        }
        let again = fixpoint_local_propagation(&LocalScheme::new(inst.scopes.clone()), fix.relations.clone()).unwrap();
        prop_assert_eq!(again.relations, fix.relations);
        prop_assert_eq!(again.rounds, 1);
    }
}

fn perfect_elimination_order_exists(g: &UndirectedGraph) -> bool {
    junctionc::graph::perfect_elimination_order(g).is_some()
}
