use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::chordal::{is_chordal, perfect_elimination_order, Chordality};
use super::{UndirectedGraph, VarId};
use crate::error::{Error, Result};
use crate::junction::Clique;
use crate::varset::VarSet;

/// Largest graph `triangulate_optimal` accepts unless told otherwise.
pub const DEFAULT_OPTIMAL_BOUND: usize = 10;

/// A permutation of the variable ids of a graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct EliminationOrder(Vec<VarId>);

impl EliminationOrder {
    pub fn new(order: Vec<VarId>, n: usize) -> Result<Self> {
        if order.len() != n {
            return Err(Error::InvalidOrder(format!(
                "expected {n} variables, got {}",
                order.len()
            )));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidOrder(format!(
                    "{v} is out of range or repeated"
                )));
            }
        }
        Ok(EliminationOrder(order))
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }
}

/// What an exhaustive or greedy triangulation minimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Number of added edges.
    #[default]
    FillIn,
    /// Sum of state-space sizes over the maximal cliques.
    CliqueWeight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangulationResult {
    /// The chordal supergraph.
    pub graph: UndirectedGraph,
    /// Added edges as `(u, v)` with `u < v`.
    pub fill_ins: BTreeSet<(VarId, VarId)>,
    pub order: EliminationOrder,
    pub total_clique_weight: u64,
}

impl TriangulationResult {
    pub fn fill_count(&self) -> usize {
        self.fill_ins.len()
    }
}

/// Plays the elimination game on `g` in the given order.
pub fn eliminate(g: &UndirectedGraph, order: &[VarId]) -> Result<TriangulationResult> {
    eliminate_with_cliques(g, order).map(|(r, _)| r)
}

/// Elimination plus the maximal cliques of the filled graph. An elimination
/// clique is maximal iff no earlier elimination clique contains it: a later
/// clique cannot, since it excludes every earlier-eliminated variable.
fn eliminate_with_cliques(
    g: &UndirectedGraph,
    order: &[VarId],
) -> Result<(TriangulationResult, Vec<VarSet>)> {
    let n = g.node_count();
    let order = EliminationOrder::new(order.to_vec(), n)?;
    let universe = g.universe().clone();
    let mut adj: Vec<BTreeSet<VarId>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut eliminated = vec![false; n];
    let mut filled = g.clone();
    let mut fill_ins = BTreeSet::new();
    let mut candidates: Vec<VarSet> = Vec::with_capacity(n);
    let mut maximal = Vec::new();
    let mut weight = 0u64;
    for &v in order.as_slice() {
        let nbrs: Vec<VarId> = adj[v].iter().copied().filter(|&w| !eliminated[w]).collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if adj[a].insert(b) {
                    adj[b].insert(a);
                    filled.add_edge(a, b)?;
                    fill_ins.insert((a.min(b), a.max(b)));
                }
            }
        }
        let clique: VarSet = nbrs.iter().copied().chain([v]).collect();
        if !candidates.iter().any(|c| clique.is_subset(c)) {
            weight = weight
                .checked_add(universe.state_space(&clique)?)
                .ok_or(Error::ModelTooLarge)?;
            maximal.push(clique.clone());
        }
        candidates.push(clique);
        eliminated[v] = true;
    }
    Ok((
        TriangulationResult {
            graph: filled,
            fill_ins,
            order,
            total_clique_weight: weight,
        },
        maximal,
    ))
}

/// Greedy one-step look-ahead triangulation minimizing fill-in.
pub fn triangulate_heuristic(g: &UndirectedGraph) -> Result<TriangulationResult> {
    triangulate_heuristic_with(g, Objective::FillIn)
}

/// Greedy one-step look-ahead: repeatedly eliminate the variable whose
/// elimination is cheapest under `objective`, using the other measure as the
/// secondary key and the lowest id last.
pub fn triangulate_heuristic_with(
    g: &UndirectedGraph,
    objective: Objective,
) -> Result<TriangulationResult> {
    g.require_connected()?;
    let n = g.node_count();
    let universe = g.universe();
    let mut adj: Vec<BTreeSet<VarId>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut remaining: BTreeSet<VarId> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while !remaining.is_empty() {
        let mut best: Option<((u64, u64), VarId)> = None;
        for &v in &remaining {
            let nbrs: Vec<VarId> = adj[v]
                .iter()
                .copied()
                .filter(|w| remaining.contains(w))
                .collect();
            let fill = nbrs
                .iter()
                .enumerate()
                .map(|(i, &a)| {
                    nbrs[i + 1..]
                        .iter()
                        .filter(|&&b| !adj[a].contains(&b))
                        .count()
                })
                .sum::<usize>() as u64;
            let weight = universe.state_space(&nbrs.iter().copied().chain([v]).collect())?;
            let key = match objective {
                Objective::FillIn => (fill, weight),
                Objective::CliqueWeight => (weight, fill),
            };
            if best.is_none_or(|(k, _)| key < k) {
                best = Some((key, v));
            }
        }
        let (_, v) = best.expect("remaining is non-empty");
        let nbrs: Vec<VarId> = adj[v]
            .iter()
            .copied()
            .filter(|w| remaining.contains(w))
            .collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        remaining.remove(&v);
        order.push(v);
    }
    eliminate(g, &order)
}

/// Exhaustive triangulation over all elimination orders, for graphs of at
/// most [`DEFAULT_OPTIMAL_BOUND`] variables.
pub fn triangulate_optimal(
    g: &UndirectedGraph,
    objective: Objective,
) -> Result<TriangulationResult> {
    triangulate_optimal_bounded(g, objective, DEFAULT_OPTIMAL_BOUND)
}

/// Branch and bound over elimination orders in lexicographic order; only
/// strict improvements replace the incumbent, so ties resolve to the
/// lexicographically smallest optimal order.
pub fn triangulate_optimal_bounded(
    g: &UndirectedGraph,
    objective: Objective,
    bound: usize,
) -> Result<TriangulationResult> {
    let n = g.node_count();
    if n > bound || n > 64 {
        return Err(Error::OptimalBoundExceeded { vars: n, bound });
    }
    g.require_connected()?;
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect();
    let cards: Vec<u64> = g
        .universe()
        .variables()
        .iter()
        .map(|v| v.cardinality as u64)
        .collect();
    let mut search = OrderSearch {
        objective,
        cards,
        best: None,
        memo: HashMap::new(),
        prefix: Vec::with_capacity(n),
        cliques: Vec::with_capacity(n),
    };
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    search.run(&adj, all, 0);
    let (_, order) = search.best.expect("at least one order exists");
    eliminate(g, &order)
}

struct OrderSearch {
    objective: Objective,
    cards: Vec<u64>,
    best: Option<(u64, Vec<VarId>)>,
    /// Cheapest cost seen so far for each eliminated set (fill objective only;
    /// the elimination graph after removing a set does not depend on the order).
    memo: HashMap<u64, u64>,
    prefix: Vec<VarId>,
    cliques: Vec<u64>,
}

impl OrderSearch {
    fn run(&mut self, adj: &[u64], remaining: u64, cost: u64) {
        if remaining == 0 {
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.prefix.clone()));
            }
            return;
        }
        if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
            return;
        }
        if self.objective == Objective::FillIn {
            let eliminated = !remaining;
            match self.memo.get(&eliminated) {
                Some(&seen) if seen <= cost => return,
                _ => {
                    self.memo.insert(eliminated, cost);
                }
            }
        }
        let mut candidates = remaining;
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            let nbrs = adj[v] & remaining;
            let mut next = adj.to_vec();
            let mut fill = 0u64;
            let mut rest = nbrs;
            while rest != 0 {
                let a = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let missing = rest & !next[a];
                fill += missing.count_ones() as u64;
                next[a] |= missing;
                let mut m = missing;
                while m != 0 {
                    let b = m.trailing_zeros() as usize;
                    m &= m - 1;
                    next[b] |= 1 << a;
                }
            }
            let clique = nbrs | 1 << v;
            let step = match self.objective {
                Objective::FillIn => fill,
                Objective::CliqueWeight => {
                    if self.cliques.iter().any(|&c| clique & !c == 0) {
                        0
                    } else {
                        self.clique_weight(clique)
                    }
                }
            };
            self.prefix.push(v);
            self.cliques.push(clique);
            self.run(&next, remaining & !(1 << v), cost.saturating_add(step));
            self.cliques.pop();
            self.prefix.pop();
        }
    }

    fn clique_weight(&self, mut clique: u64) -> u64 {
        let mut w = 1u64;
        while clique != 0 {
            let v = clique.trailing_zeros() as usize;
            clique &= clique - 1;
            w = w.saturating_mul(self.cards[v]);
        }
        w
    }
}

/// Maximal cliques of a chordal graph, extracted by eliminating along a
/// perfect elimination order. Cliques are numbered in lexicographic order of
/// their variable sets.
pub fn cliques(g: &UndirectedGraph) -> Result<Vec<Clique>> {
    if let Chordality::NotChordal { cycle } = is_chordal(g) {
        return Err(Error::NotChordal { witness: cycle });
    }
    let peo = perfect_elimination_order(g).expect("graph is chordal");
    let (result, mut maximal) = eliminate_with_cliques(g, &peo)?;
    debug_assert!(result.fill_ins.is_empty());
    maximal.sort();
    maximal
        .into_iter()
        .enumerate()
        .map(|(id, vars)| {
            let table_size = g.universe().state_space(&vars)?;
            Ok(Clique {
                id,
                vars,
                table_size,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Universe;
    use std::sync::Arc;

    fn graph(n: usize, edges: &[(VarId, VarId)]) -> UndirectedGraph {
        UndirectedGraph::from_edges(Arc::new(Universe::binary(n)), edges.iter().copied()).unwrap()
    }

    fn clique_sets(g: &UndirectedGraph) -> Vec<Vec<VarId>> {
        cliques(g)
            .unwrap()
            .into_iter()
            .map(|c| c.vars.as_slice().to_vec())
            .collect()
    }

    #[test]
    fn heuristic_leaves_chordal_graphs_alone() {
        let g = graph(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]);
        assert!(triangulate_heuristic(&g).unwrap().fill_ins.is_empty());
    }

    #[test]
    fn heuristic_on_four_cycle_adds_one_chord() {
        // A-B-D-C-A
        let g = graph(4, &[(0, 1), (1, 3), (3, 2), (2, 0)]);
        let r = triangulate_heuristic(&g).unwrap();
        assert_eq!(r.fill_count(), 1);
        let chord = *r.fill_ins.iter().next().unwrap();
        assert!(chord == (0, 3) || chord == (1, 2));
        assert!(is_chordal(&r.graph).is_chordal());
    }

    #[test]
    fn disconnected_input_rejected() {
        let g = graph(4, &[(0, 1), (2, 3)]);
        assert_eq!(
            triangulate_heuristic(&g).unwrap_err(),
            Error::Disconnected {
                components: vec![vec![0, 1], vec![2, 3]]
            }
        );
        assert!(triangulate_optimal(&g, Objective::FillIn).is_err());
    }

    #[test]
    fn optimal_triangle_and_four_cycle() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let r = triangulate_optimal(&tri, Objective::FillIn).unwrap();
        assert_eq!(r.fill_count(), 0);
        assert_eq!(r.total_clique_weight, 8);
        assert_eq!(r.order.as_slice(), &[0, 1, 2]);

        let c4 = UndirectedGraph::cycle(4);
        let r = triangulate_optimal(&c4, Objective::CliqueWeight).unwrap();
        assert_eq!(r.total_clique_weight, 16);
        assert_eq!(r.fill_count(), 1);
    }

    #[test]
    fn optimal_bound_enforced() {
        let g = UndirectedGraph::cycle(11);
        assert_eq!(
            triangulate_optimal(&g, Objective::FillIn).unwrap_err(),
            Error::OptimalBoundExceeded {
                vars: 11,
                bound: 10
            }
        );
        assert!(
            triangulate_optimal_bounded(&UndirectedGraph::cycle(5), Objective::FillIn, 4).is_err()
        );
    }

    #[test]
    fn elimination_order_validation() {
        assert!(EliminationOrder::new(vec![0, 1, 1], 3).is_err());
        assert!(EliminationOrder::new(vec![0, 3, 1], 3).is_err());
        assert!(EliminationOrder::new(vec![0, 1], 3).is_err());
        assert!(EliminationOrder::new(vec![2, 0, 1], 3).is_ok());
    }

    #[test]
    fn elimination_reproduces_fill() {
        let c4 = UndirectedGraph::cycle(4);
        let r = eliminate(&c4, &[0, 1, 2, 3]).unwrap();
        assert_eq!(r.fill_ins, BTreeSet::from([(1, 3)]));
        assert_eq!(r.total_clique_weight, 16);
    }

    #[test]
    fn clique_extraction() {
        assert_eq!(
            clique_sets(&graph(3, &[(0, 1), (1, 2), (0, 2)])),
            vec![vec![0, 1, 2]]
        );
        // 4-cycle A-B-D-C-A plus chord B-C
        let g = graph(4, &[(0, 1), (1, 3), (3, 2), (2, 0), (1, 2)]);
        assert_eq!(clique_sets(&g), vec![vec![0, 1, 2], vec![1, 2, 3]]);
        assert_eq!(
            clique_sets(&graph(3, &[(0, 1), (1, 2)])),
            vec![vec![0, 1], vec![1, 2]]
        );
        assert_eq!(clique_sets(&graph(1, &[])), vec![vec![0]]);
    }

    #[test]
    fn cliques_reject_non_chordal() {
        let err = cliques(&UndirectedGraph::cycle(4)).unwrap_err();
        assert!(matches!(err, Error::NotChordal { witness } if witness.len() == 4));
    }

    #[test]
    fn clique_table_sizes_use_cardinalities() {
        let u = Arc::new(Universe::with_cardinalities(&[2, 3, 4]).unwrap());
        let g = UndirectedGraph::from_edges(u, [(0, 1), (1, 2)]).unwrap();
        let cs = cliques(&g).unwrap();
        assert_eq!(
            cs.iter().map(|c| c.table_size).collect::<Vec<_>>(),
            vec![6, 12]
        );
    }
}
