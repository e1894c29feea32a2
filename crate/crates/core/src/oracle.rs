//! Brute-force reference implementations. Everything here works from first
//! principles (explicit enumeration of configurations, trees and orders) and
//! shares no table or graph algorithm with the rest of the crate, so it can
//! serve as ground truth in tests and in the `verify` suites.
//!
//! All entry points enforce hard size bounds.

use std::collections::HashMap;

use crate::almond::{AlmondLink, AlmondNode, AlmondNodeKind, AlmondTree};
use crate::error::{Error, Result};
use crate::graph::{UndirectedGraph, Universe, VarId};
use crate::junction::{Clique, JunctionGraph, JunctionTree, Separator, SeparatorMultiset};
use crate::pos::PosRelation;
use crate::propagation::{Evidence, Finding, Potential};
use crate::varset::VarSet;

/// Largest joint state space the oracle will materialize.
pub const JOINT_BOUND: u64 = 1 << 20;
/// Largest junction graph whose spanning trees are enumerated.
pub const SPANNING_TREE_BOUND: usize = 8;
/// Largest graph whose elimination orders are enumerated.
pub const ELIMINATION_BOUND: usize = 10;
/// Largest number of link combinations tried by [`enumerate_almond_trees`].
pub const ALMOND_COMBINATION_BOUND: u64 = 1 << 20;

/// Dense table over every configuration of a universe, the last variable
/// varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    cards: Vec<usize>,
    table: Vec<f64>,
}

fn strides(cards: &[usize]) -> Vec<usize> {
    let mut s = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * cards[i + 1];
    }
    s
}

impl JointTable {
    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.table.iter().sum()
    }

    /// States of every variable at a joint index.
    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut states = vec![0; self.cards.len()];
        for (s, &c) in states.iter_mut().zip(&self.cards).rev() {
            *s = index % c;
            index /= c;
        }
        states
    }

    /// Multiplies in hard and soft findings.
    pub fn with_evidence(&self, evidence: &Evidence) -> Result<JointTable> {
        let mut out = self.clone();
        for (var, finding) in evidence.iter() {
            let card = *self.cards.get(var).ok_or(Error::UnknownVariable(var))?;
            let weights: Vec<f64> = match finding {
                Finding::State(s) if *s < card => {
                    (0..card).map(|i| f64::from(u8::from(i == *s))).collect()
                }
                Finding::Likelihood(l) if l.len() == card => l.clone(),
                _ => return Err(Error::InvalidEvidence(format!("finding on variable {var}"))),
            };
            for (i, x) in out.table.iter_mut().enumerate() {
                *x *= weights[self.decode(i)[var]];
            }
        }
        Ok(out)
    }
}

/// Pointwise product of all factors over the whole universe.
pub fn joint_from_factors(universe: &Universe, factors: &[Potential]) -> Result<JointTable> {
    let cards: Vec<usize> = universe.variables().iter().map(|v| v.cardinality).collect();
    let size = cards
        .iter()
        .try_fold(1u64, |acc, &c| acc.checked_mul(c as u64))
        .ok_or(Error::ModelTooLarge)?;
    if size > JOINT_BOUND {
        return Err(Error::OracleBound {
            size,
            bound: JOINT_BOUND,
        });
    }
    let mut joint = JointTable {
        table: vec![1.0; size as usize],
        cards,
    };
    for f in factors {
        let scope = f.scope().as_slice();
        if let Some(&v) = scope.iter().find(|&&v| v >= joint.cards.len()) {
            return Err(Error::UnknownVariable(v));
        }
        let local = strides(f.cardinalities());
        for i in 0..joint.table.len() {
            let states = joint.decode(i);
            let j: usize = scope.iter().zip(&local).map(|(&v, &s)| states[v] * s).sum();
            joint.table[i] *= f.table()[j];
        }
    }
    Ok(joint)
}

/// Joint possibility: a configuration is possible iff every relation allows it.
pub fn joint_pos(universe: &Universe, relations: &[PosRelation]) -> Result<JointTable> {
    let factors = relations
        .iter()
        .map(PosRelation::to_potential)
        .collect::<Result<Vec<_>>>()?;
    let mut joint = joint_from_factors(universe, &factors)?;
    for x in &mut joint.table {
        *x = f64::from(u8::from(*x > 0.0));
    }
    Ok(joint)
}

/// Unnormalized marginal of the joint on `vars`.
pub fn oracle_marginal(jt: &JointTable, vars: &VarSet) -> Result<Potential> {
    if let Some(v) = vars.iter().find(|&v| v >= jt.cards.len()) {
        return Err(Error::UnknownVariable(v));
    }
    let cards: Vec<usize> = vars.iter().map(|v| jt.cards[v]).collect();
    let local = strides(&cards);
    let mut table = vec![0.0; cards.iter().product()];
    for (i, &x) in jt.table.iter().enumerate() {
        let states = jt.decode(i);
        let j: usize = vars.iter().zip(&local).map(|(v, &s)| states[v] * s).sum();
        table[j] += x;
    }
    if table.iter().all(|&x| x == 0.0) {
        return Err(Error::ImpossibleEvidence);
    }
    Potential::new(vars.clone(), cards, table)
}

/// Normalized single-variable marginal.
pub fn oracle_distribution(jt: &JointTable, var: VarId) -> Result<Vec<f64>> {
    let p = oracle_marginal(jt, &VarSet::singleton(var))?;
    let z = p.sum();
    Ok(p.table().iter().map(|x| x / z).collect())
}

/// A spanning tree of a junction graph, by link indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedTree {
    pub links: Vec<usize>,
    pub weight: usize,
    pub cost: u64,
    /// Whether every variable's cliques form a connected subtree.
    pub is_junction_tree: bool,
}

impl EnumeratedTree {
    pub fn to_tree(&self, jg: &JunctionGraph) -> Result<JunctionTree> {
        JunctionTree::from_links(
            jg.cliques.clone(),
            self.links.iter().map(|&i| jg.links[i].clone()).collect(),
        )
    }

    /// Separator labels sorted, with repetitions.
    pub fn separators(&self, jg: &JunctionGraph) -> Vec<Separator> {
        let mut s: Vec<Separator> = self
            .links
            .iter()
            .map(|&i| jg.links[i].separator.clone())
            .collect();
        s.sort();
        s
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Every spanning tree of the junction graph.
pub fn enumerate_spanning_trees(jg: &JunctionGraph) -> Result<Vec<EnumeratedTree>> {
    let k = jg.cliques.len();
    if k > SPANNING_TREE_BOUND {
        return Err(Error::OracleBound {
            size: k as u64,
            bound: SPANNING_TREE_BOUND as u64,
        });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    // variable membership per clique as bitmasks over variable ids
    let members: Vec<Vec<VarId>> = jg
        .cliques
        .iter()
        .map(|c| c.vars.as_slice().to_vec())
        .collect();
    let mut vars: Vec<VarId> = members.iter().flatten().copied().collect();
    vars.sort_unstable();
    vars.dedup();
    let holders: Vec<u32> = vars
        .iter()
        .map(|v| {
            members
                .iter()
                .enumerate()
                .filter(|(_, m)| m.contains(v))
                .fold(0, |acc, (i, _)| acc | 1 << i)
        })
        .collect();

    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(k - 1);
    let parent: Vec<usize> = (0..k).collect();
    fn rec(
        jg: &JunctionGraph,
        holders: &[u32],
        next: usize,
        parent: Vec<usize>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<EnumeratedTree>,
    ) {
        let k = jg.cliques.len();
        if chosen.len() == k - 1 {
            let is_junction_tree = holders.iter().all(|&h| {
                let edges = chosen
                    .iter()
                    .filter(|&&i| h >> jg.links[i].a & 1 == 1 && h >> jg.links[i].b & 1 == 1)
                    .count();
                edges + 1 == h.count_ones() as usize
            });
            out.push(EnumeratedTree {
                links: chosen.clone(),
                weight: chosen
                    .iter()
                    .map(|&i| jg.links[i].separator.vars.len())
                    .sum(),
                cost: chosen.iter().map(|&i| jg.links[i].cost).sum(),
                is_junction_tree,
            });
            return;
        }
        if jg.links.len() - next < k - 1 - chosen.len() {
            return;
        }
        let l = &jg.links[next];
        let mut p = parent.clone();
        let (ra, rb) = (find(&mut p, l.a), find(&mut p, l.b));
        if ra != rb {
            p[ra] = rb;
            chosen.push(next);
            rec(jg, holders, next + 1, p, chosen, out);
            chosen.pop();
        }
        rec(jg, holders, next + 1, parent, chosen, out);
    }
    if k == 1 {
        out.push(EnumeratedTree {
            links: Vec::new(),
            weight: 0,
            cost: 0,
            is_junction_tree: true,
        });
    } else {
        rec(jg, &holders, 0, parent, &mut chosen, &mut out);
    }
    Ok(out)
}

/// Result of eliminating the graph in one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOutcome {
    pub order: Vec<VarId>,
    pub fill_ins: Vec<(VarId, VarId)>,
    /// Sum of the table sizes of the maximal cliques of the filled graph.
    pub total_clique_weight: u64,
}

/// Lazily enumerates all elimination orders in lexicographic order.
pub struct EliminationOrders {
    adj: Vec<u16>,
    cards: Vec<u64>,
    perm: Option<Vec<VarId>>,
    weights: HashMap<u64, u64>,
}

pub fn enumerate_elimination_orders(g: &UndirectedGraph) -> Result<EliminationOrders> {
    let n = g.node_count();
    if n > ELIMINATION_BOUND {
        return Err(Error::OracleBound {
            size: n as u64,
            bound: ELIMINATION_BOUND as u64,
        });
    }
    let adj = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&w| g.has_edge(v, w))
                .fold(0u16, |m, w| m | 1 << w)
        })
        .collect();
    let cards = g
        .universe()
        .variables()
        .iter()
        .map(|v| v.cardinality as u64)
        .collect();
    Ok(EliminationOrders {
        adj,
        cards,
        perm: Some((0..n).collect()),
        weights: HashMap::new(),
    })
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

impl EliminationOrders {
    /// Maximal complete subsets by brute force over all node subsets.
    fn clique_weight(&mut self, adj: &[u16]) -> u64 {
        let n = adj.len();
        let key = adj
            .iter()
            .enumerate()
            .flat_map(|(v, &m)| (v + 1..n).map(move |w| (m >> w & 1) as u64))
            .fold(0u64, |k, b| k << 1 | b);
        if let Some(&w) = self.weights.get(&key) {
            return w;
        }
        let complete = |s: u16| {
            (0..n)
                .filter(|&v| s >> v & 1 == 1)
                .all(|v| (adj[v] | 1 << v) & s == s)
        };
        let mut total = 0;
        for s in 1u16..1 << n {
            if !complete(s) {
                continue;
            }
            let extendable = (0..n).any(|v| s >> v & 1 == 0 && complete(s | 1 << v));
            if !extendable {
                total += (0..n)
                    .filter(|&v| s >> v & 1 == 1)
                    .map(|v| self.cards[v])
                    .product::<u64>();
            }
        }
        self.weights.insert(key, total);
        total
    }
}

impl Iterator for EliminationOrders {
    type Item = EliminationOutcome;

    fn next(&mut self) -> Option<EliminationOutcome> {
        let order = self.perm.clone()?;
        let mut p = order.clone();
        self.perm = next_permutation(&mut p).then_some(p);

        let n = order.len();
        let mut adj = self.adj.clone();
        let mut gone = 0u16;
        let mut fill_ins = Vec::new();
        for &v in &order {
            let nbrs: Vec<usize> = (0..n)
                .filter(|&w| adj[v] >> w & 1 == 1 && gone >> w & 1 == 0)
                .collect();
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    if adj[a] >> b & 1 == 0 {
                        adj[a] |= 1 << b;
                        adj[b] |= 1 << a;
                        fill_ins.push((a.min(b), a.max(b)));
                    }
                }
            }
            gone |= 1 << v;
        }
        fill_ins.sort_unstable();
        let total_clique_weight = self.clique_weight(&adj);
        Some(EliminationOutcome {
            order,
            fill_ins,
            total_clique_weight,
        })
    }
}

/// Fewest fill-ins over all elimination orders.
pub fn min_fill(g: &UndirectedGraph) -> Result<usize> {
    Ok(enumerate_elimination_orders(g)?
        .map(|o| o.fill_ins.len())
        .min()
        .unwrap_or(0))
}

/// Smallest total clique table size over all elimination orders.
pub fn min_clique_weight(g: &UndirectedGraph) -> Result<u64> {
    Ok(enumerate_elimination_orders(g)?
        .map(|o| o.total_clique_weight)
        .min()
        .unwrap_or(0))
}

/// Every valid Almond tree over the cliques in which the node for a
/// separator of multiplicity `n` has exactly `n + 1` links, each to a strict
/// superset.
pub fn enumerate_almond_trees(
    cliques: &[Clique],
    separators: &SeparatorMultiset,
) -> Result<Vec<AlmondTree>> {
    let mut nodes: Vec<AlmondNode> = cliques
        .iter()
        .map(|c| AlmondNode {
            kind: AlmondNodeKind::Clique { clique: c.id },
            vars: c.vars.clone(),
            table_size: c.table_size,
        })
        .collect();
    for (sep, n) in &separators.entries {
        nodes.push(AlmondNode {
            kind: AlmondNodeKind::Separator { multiplicity: *n },
            vars: sep.vars.clone(),
            table_size: sep.table_size,
        });
    }
    // per separator node: all subsets of its candidate targets of the right size
    let mut choices: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    let mut combos = 1u64;
    for (s, (_, n)) in separators.entries.iter().enumerate() {
        let s = cliques.len() + s;
        let targets: Vec<usize> = (0..nodes.len())
            .filter(|&t| nodes[s].vars.is_strict_subset(&nodes[t].vars))
            .collect();
        if targets.len() > 20 {
            return Err(Error::OracleBound {
                size: targets.len() as u64,
                bound: 20,
            });
        }
        let subsets: Vec<Vec<usize>> = (0u32..1 << targets.len())
            .filter(|m| m.count_ones() as usize == n + 1)
            .map(|m| {
                (0..targets.len())
                    .filter(|&i| m >> i & 1 == 1)
                    .map(|i| targets[i])
                    .collect()
            })
            .collect();
        combos = combos.saturating_mul(subsets.len() as u64);
        choices.push((s, subsets));
    }
    if combos > ALMOND_COMBINATION_BOUND {
        return Err(Error::OracleBound {
            size: combos,
            bound: ALMOND_COMBINATION_BOUND,
        });
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; choices.len()];
    'outer: loop {
        if choices.iter().all(|(_, c)| !c.is_empty()) {
            let links: Vec<AlmondLink> = choices
                .iter()
                .zip(&pick)
                .flat_map(|((s, subsets), &i)| {
                    subsets[i].iter().map(|&t| AlmondLink {
                        subset: *s,
                        superset: t,
                        cost: nodes[*s].table_size + nodes[t].table_size,
                    })
                })
                .collect();
            let tree = AlmondTree {
                nodes: nodes.clone(),
                links,
            };
            if tree.validate().is_ok() {
                out.push(tree);
            }
        } else {
            break;
        }
        for (d, (_, subsets)) in choices.iter().enumerate() {
            pick[d] += 1;
            if pick[d] < subsets.len() {
                continue 'outer;
            }
            pick[d] = 0;
        }
        break;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::junction::build_junction_graph;
    use crate::pos::build_cycle_counterexample;

    fn graph(cards: &[usize], sets: &[&[usize]]) -> JunctionGraph {
        let u = Universe::with_cardinalities(cards).unwrap();
        let cs = sets
            .iter()
            .enumerate()
            .map(|(i, s)| Clique::new(i, s.iter().copied().collect(), &u).unwrap())
            .collect();
        build_junction_graph(&u, cs).unwrap()
    }

    #[test]
    fn joint_of_single_and_disjoint_factors() {
        let u = Universe::binary(2);
        let p = Potential::new(VarSet::from([0, 1]), vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(
            joint_from_factors(&u, &[p]).unwrap().table(),
            &[1.0, 2.0, 3.0, 4.0]
        );
        let a = Potential::new(VarSet::from([0]), vec![2], vec![1.0, 2.0]).unwrap();
        let b = Potential::new(VarSet::from([1]), vec![2], vec![3.0, 5.0]).unwrap();
        assert_eq!(
            joint_from_factors(&u, &[a, b]).unwrap().table(),
            &[3.0, 5.0, 6.0, 10.0]
        );
    }

    #[test]
    fn joint_bound() {
        let u = Universe::binary(21);
        assert!(matches!(
            joint_from_factors(&u, &[]),
            Err(Error::OracleBound { .. })
        ));
    }

    #[test]
    fn marginals_by_summation() {
        let u = Universe::binary(2);
        let p = Potential::new(VarSet::from([0, 1]), vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let jt = joint_from_factors(&u, &[p]).unwrap();
        assert_eq!(
            oracle_marginal(&jt, &VarSet::from([0])).unwrap().table(),
            &[3.0, 7.0]
        );
        assert_eq!(
            oracle_marginal(&jt, &VarSet::from([1])).unwrap().table(),
            &[4.0, 6.0]
        );
        assert_eq!(
            oracle_marginal(&jt, &VarSet::new()).unwrap().table(),
            &[10.0]
        );
        let ev = jt.with_evidence(&Evidence::new().with_state(0, 1)).unwrap();
        assert_eq!(
            oracle_distribution(&ev, 1).unwrap(),
            vec![3.0 / 7.0, 4.0 / 7.0]
        );
    }

    #[test]
    fn counterexample_joint_possibility() {
        let inst = build_cycle_counterexample(4).unwrap();
        let jp = joint_pos(&inst.universe, &inst.updated_relations()).unwrap();
        let possible: Vec<Vec<usize>> = (0..jp.len())
            .filter(|&i| jp.table()[i] > 0.0)
            .map(|i| jp.decode(i))
            .collect();
        assert_eq!(possible, vec![vec![0, 0, 0, 0], vec![1, 1, 1, 1]]);
        // before the evidence, A = C and B = D are the only constraints
        let before = joint_pos(&inst.universe, &inst.relations).unwrap();
        assert_eq!(before.total(), 4.0);
    }

    #[test]
    fn spanning_trees_of_small_graphs() {
        let single = graph(&[2, 2], &[&[0, 1]]);
        assert_eq!(enumerate_spanning_trees(&single).unwrap().len(), 1);

        let two = graph(&[2, 2, 2], &[&[0, 1], &[1, 2]]);
        assert_eq!(enumerate_spanning_trees(&two).unwrap().len(), 1);

        // {A,B,C}, {B,C,D}, {C,D,E}
        let chain = graph(&[2; 5], &[&[0, 1, 2], &[1, 2, 3], &[2, 3, 4]]);
        let trees = enumerate_spanning_trees(&chain).unwrap();
        assert_eq!(trees.len(), 3);
        let best: Vec<_> = trees.iter().filter(|t| t.weight == 4).collect();
        assert_eq!(best.len(), 1);
        assert!(best[0].is_junction_tree);
        assert_eq!(trees.iter().filter(|t| t.is_junction_tree).count(), 1);

        // {A,B}, {A,C,D}, {A,E}: all three trees are junction trees
        let star = graph(&[2; 5], &[&[0, 1], &[0, 2, 3], &[0, 4]]);
        let trees = enumerate_spanning_trees(&star).unwrap();
        assert_eq!(trees.len(), 3);
        assert!(trees.iter().all(|t| t.is_junction_tree && t.weight == 2));
        let mut costs: Vec<u64> = trees.iter().map(|t| t.cost).collect();
        costs.sort_unstable();
        assert_eq!(costs, vec![20, 20, 24]);
    }

    #[test]
    fn spanning_tree_bound() {
        let sets: Vec<Vec<usize>> = (0..9).map(|i| vec![0, i + 1]).collect();
        let refs: Vec<&[usize]> = sets.iter().map(Vec::as_slice).collect();
        let g = graph(&[2; 10], &refs);
        assert!(matches!(
            enumerate_spanning_trees(&g),
            Err(Error::OracleBound { .. })
        ));
    }

    #[test]
    fn elimination_orders() {
        assert_eq!(min_fill(&UndirectedGraph::cycle(4)).unwrap(), 1);
        assert_eq!(min_clique_weight(&UndirectedGraph::cycle(4)).unwrap(), 16);
        let u = std::sync::Arc::new(Universe::binary(3));
        let triangle = UndirectedGraph::from_edges(u.clone(), [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(min_fill(&triangle).unwrap(), 0);
        let path = UndirectedGraph::from_edges(u, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(min_fill(&path).unwrap(), 0);
        let all: Vec<_> = enumerate_elimination_orders(&path).unwrap().collect();
        assert_eq!(all.len(), 6);
        // eliminating the middle first joins its neighbours
        let mid = all.iter().find(|o| o.order == vec![1, 0, 2]).unwrap();
        assert_eq!(mid.fill_ins, vec![(0, 2)]);
        assert_eq!(mid.total_clique_weight, 8);
        assert!(enumerate_elimination_orders(&UndirectedGraph::cycle(11)).is_err());
    }

    #[test]
    fn almond_trees_on_a_star() {
        let jg = graph(&[2; 4], &[&[0, 1], &[0, 2], &[0, 3]]);
        let seps =
            SeparatorMultiset::from_separators(jg.links.iter().take(2).map(|l| &l.separator));
        let trees = enumerate_almond_trees(&jg.cliques, &seps).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].links.len(), 3);
    }
}
