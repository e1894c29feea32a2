//! Seeded random instances for property tests and the `verify` suites.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{cliques, eliminate, Dag, UndirectedGraph, Universe, VarId};
use crate::junction::Clique;
use crate::propagation::{Evidence, Potential};
use crate::varset::VarSet;

/// Independent stream for case `index` of a run seeded with `seed`.
pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Connected graph: a random spanning tree plus each other pair with
/// probability `density`.
pub fn random_connected_graph<R: Rng>(
    rng: &mut R,
    universe: Arc<Universe>,
    density: f64,
) -> UndirectedGraph {
    let n = universe.len();
    let mut g = UndirectedGraph::new(universe);
    let mut order: Vec<VarId> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        g.add_edge(order[i], order[j]).expect("distinct nodes");
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                g.add_edge(a, b).expect("distinct nodes");
            }
        }
    }
    g
}

/// A connected graph made chordal by eliminating it in a random order.
pub fn random_chordal_graph<R: Rng>(
    rng: &mut R,
    universe: Arc<Universe>,
    density: f64,
) -> UndirectedGraph {
    let g = random_connected_graph(rng, universe, density);
    let mut order: Vec<VarId> = (0..g.node_count()).collect();
    order.shuffle(rng);
    eliminate(&g, &order).expect("valid order").graph
}

#[derive(Clone, Debug)]
pub struct ChordalCase {
    pub graph: UndirectedGraph,
    pub cliques: Vec<Clique>,
}

/// Random connected chordal graph whose clique count is drawn uniformly
/// from `min..=max`, over variables with two or three states.
pub fn random_chordal_case<R: Rng>(
    rng: &mut R,
    min_cliques: usize,
    max_cliques: usize,
) -> ChordalCase {
    assert!(min_cliques >= 1 && min_cliques <= max_cliques);
    let target = rng.gen_range(min_cliques..=max_cliques);
    loop {
        let n = rng.gen_range(target + 1..=target + 4);
        let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=3)).collect();
        let universe =
            Arc::new(Universe::with_cardinalities(&cards).expect("positive cardinalities"));
        let density = rng.gen_range(0.0..0.35);
        let graph = random_chordal_graph(rng, universe, density);
        let cs = cliques(&graph).expect("chordal");
        if cs.len() == target {
            return ChordalCase { graph, cliques: cs };
        }
    }
}

/// A factorized model over binary variables.
#[derive(Clone, Debug)]
pub struct RandomModel {
    pub universe: Arc<Universe>,
    pub factors: Vec<Potential>,
    /// Present when the factors are the conditional tables of this network.
    pub dag: Option<Dag>,
}

impl RandomModel {
    /// Links every pair of variables sharing a factor.
    pub fn graph(&self) -> UndirectedGraph {
        let mut g = UndirectedGraph::new(self.universe.clone());
        for f in &self.factors {
            let vs = f.scope().as_slice();
            for (i, &a) in vs.iter().enumerate() {
                for &b in &vs[i + 1..] {
                    g.add_edge(a, b).expect("distinct scope members");
                }
            }
        }
        g
    }
}

fn random_entry<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.08) {
        0.0
    } else {
        rng.gen_range(0.05..1.0)
    }
}

/// Random table, not all zero.
fn random_table<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..len).map(|_| random_entry(rng)).collect();
    if t.iter().all(|&x| x == 0.0) {
        t[rng.gen_range(0..len)] = 1.0;
    }
    t
}

/// Conditional table of `child` given `parents` over the sorted scope.
fn random_cpt<R: Rng>(rng: &mut R, child: VarId, parents: &[VarId]) -> Potential {
    let scope: VarSet = parents.iter().copied().chain([child]).collect();
    let k = scope.len();
    let pos = scope.position(child).expect("child in scope");
    let stride = 1usize << (k - 1 - pos);
    let mut table = vec![0.0; 1 << k];
    for i in 0..1 << k {
        if i & stride != 0 {
            continue;
        }
        let row = random_table(rng, 2);
        let z: f64 = row.iter().sum();
        table[i] = row[0] / z;
        table[i | stride] = row[1] / z;
    }
    Potential::new(scope, vec![2; k], table).expect("valid conditional table")
}

/// Either a Bayesian network whose every non-initial variable has between
/// one and three earlier parents, or a Markov network with one random factor
/// per clique of a random chordal graph.
pub fn random_model<R: Rng>(rng: &mut R, max_vars: usize) -> RandomModel {
    let n = rng.gen_range(2..=max_vars.max(2));
    let universe = Arc::new(Universe::binary(n));
    if rng.gen_bool(0.5) {
        let mut edges = Vec::new();
        let mut factors = vec![random_cpt(rng, 0, &[])];
        for v in 1..n {
            let k = rng.gen_range(1..=v.min(3));
            let mut parents: Vec<VarId> = (0..v)
                .collect::<Vec<_>>()
                .choose_multiple(rng, k)
                .copied()
                .collect();
            parents.sort_unstable();
            edges.extend(parents.iter().map(|&p| (p, v)));
            factors.push(random_cpt(rng, v, &parents));
        }
        let dag = Dag::new(universe.clone(), edges).expect("parents precede children");
        RandomModel {
            universe,
            factors,
            dag: Some(dag),
        }
    } else {
        let density = rng.gen_range(0.0..0.3);
        let g = random_chordal_graph(rng, universe.clone(), density);
        let factors = cliques(&g)
            .expect("chordal")
            .into_iter()
            .map(|c| {
                let len = c.table_size as usize;
                Potential::new(
                    c.vars.clone(),
                    vec![2; c.vars.len()],
                    random_table(rng, len),
                )
                .expect("valid factor")
            })
            .collect();
        RandomModel {
            universe,
            factors,
            dag: None,
        }
    }
}

/// Findings on up to `max_findings` distinct variables, mostly hard.
pub fn random_evidence<R: Rng>(rng: &mut R, universe: &Universe, max_findings: usize) -> Evidence {
    let k = rng.gen_range(0..=max_findings.min(universe.len()));
    let vars: Vec<VarId> = (0..universe.len())
        .collect::<Vec<_>>()
        .choose_multiple(rng, k)
        .copied()
        .collect();
    let mut ev = Evidence::new();
    for v in vars {
        let card = universe.cardinality(v);
        ev = if rng.gen_bool(0.8) {
            ev.with_state(v, rng.gen_range(0..card))
        } else {
            ev.with_likelihood(v, random_table(rng, card))
        };
    }
    ev
}
