//! Junction graphs and their maximal-weight, minimal-cost spanning trees.
//!
//! A spanning tree of the junction graph satisfies the junction tree
//! property exactly when its total separator weight is maximal. Among those,
//! [`kruskal_min_cost_tree`] returns one of minimal total cost, where the cost
//! of a link is the sum of the table sizes of the two cliques it joins.

use std::cmp::Reverse;
use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::Universe;
use crate::varset::VarSet;

/// A maximal clique of a chordal graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clique {
    pub id: usize,
    pub vars: VarSet,
    /// Number of configurations of `vars`.
    pub table_size: u64,
}

impl Clique {
    pub fn new(id: usize, vars: VarSet, universe: &Universe) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::InvalidInstance(format!("clique {id} is empty")));
        }
        universe.check(&vars)?;
        let table_size = universe.state_space(&vars)?;
        Ok(Clique {
            id,
            vars,
            table_size,
        })
    }
}

/// Label of a junction graph link: the intersection of the two cliques.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Separator {
    pub vars: VarSet,
    pub table_size: u64,
}

impl Separator {
    pub fn weight(&self) -> usize {
        self.vars.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Link {
    /// Lower clique id.
    pub a: usize,
    /// Higher clique id.
    pub b: usize,
    pub separator: Separator,
    pub cost: u64,
}

impl Link {
    pub fn weight(&self) -> usize {
        self.separator.weight()
    }

    fn greedy_key(&self) -> (Reverse<usize>, u64, usize, usize) {
        (Reverse(self.weight()), self.cost, self.a, self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JunctionGraph {
    pub cliques: Vec<Clique>,
    /// One link per intersecting clique pair, ordered by `(a, b)`.
    pub links: Vec<Link>,
}

/// Links every pair of cliques with a nonempty intersection.
pub fn build_junction_graph(universe: &Universe, cliques: Vec<Clique>) -> Result<JunctionGraph> {
    if cliques.is_empty() {
        return Err(Error::EmptyCliqueSet);
    }
    for (i, c) in cliques.iter().enumerate() {
        if c.id != i {
            return Err(Error::InvalidInstance(format!(
                "clique at position {i} has id {}",
                c.id
            )));
        }
    }
    let mut links = Vec::new();
    for (i, u) in cliques.iter().enumerate() {
        for v in &cliques[i + 1..] {
            if u.vars.is_subset(&v.vars) {
                return Err(Error::NestedCliques {
                    inner: u.id,
                    outer: v.id,
                });
            }
            if v.vars.is_subset(&u.vars) {
                return Err(Error::NestedCliques {
                    inner: v.id,
                    outer: u.id,
                });
            }
            let label = u.vars.intersection(&v.vars);
            if label.is_empty() {
                continue;
            }
            let table_size = universe.state_space(&label)?;
            let cost = u
                .table_size
                .checked_add(v.table_size)
                .ok_or(Error::ModelTooLarge)?;
            links.push(Link {
                a: u.id,
                b: v.id,
                separator: Separator {
                    vars: label,
                    table_size,
                },
                cost,
            });
        }
    }
    Ok(JunctionGraph { cliques, links })
}

/// A spanning tree over the cliques of a junction graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JunctionTree {
    pub cliques: Vec<Clique>,
    pub links: Vec<Link>,
    pub total_weight: usize,
    pub total_cost: u64,
}

impl JunctionTree {
    /// Validates that `links` span `cliques` without cycles.
    pub fn from_links(cliques: Vec<Clique>, links: Vec<Link>) -> Result<Self> {
        let k = cliques.len();
        if k == 0 {
            return Err(Error::EmptyCliqueSet);
        }
        if links.len() != k - 1 {
            return Err(Error::NotASpanningTree(format!(
                "{} links for {k} cliques",
                links.len()
            )));
        }
        let mut sets = DisjointSets::new(k);
        for l in &links {
            if l.a >= k || l.b >= k {
                return Err(Error::NotASpanningTree(format!(
                    "link ({}, {}) out of range",
                    l.a, l.b
                )));
            }
            if !sets.union(l.a, l.b) {
                return Err(Error::NotASpanningTree(format!(
                    "link ({}, {}) closes a cycle",
                    l.a, l.b
                )));
            }
        }
        let total_weight = links.iter().map(Link::weight).sum();
        let total_cost = links
            .iter()
            .try_fold(0u64, |acc, l| acc.checked_add(l.cost))
            .ok_or(Error::ModelTooLarge)?;
        Ok(JunctionTree {
            cliques,
            links,
            total_weight,
            total_cost,
        })
    }

    /// For each clique, its `(neighbour, link index)` pairs.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.cliques.len()];
        for (i, l) in self.links.iter().enumerate() {
            adj[l.a].push((l.b, i));
            adj[l.b].push((l.a, i));
        }
        for n in &mut adj {
            n.sort_unstable();
        }
        adj
    }
}

fn prim(jg: &JunctionGraph, use_cost: bool) -> Result<JunctionTree> {
    let k = jg.cliques.len();
    if k == 0 {
        return Err(Error::EmptyCliqueSet);
    }
    let mut in_tree = vec![false; k];
    in_tree[0] = true;
    let mut chosen: Vec<Link> = Vec::with_capacity(k - 1);
    for _ in 1..k {
        let next = jg
            .links
            .iter()
            .filter(|l| in_tree[l.a] != in_tree[l.b])
            .min_by_key(|l| {
                let cost = if use_cost { l.cost } else { 0 };
                (Reverse(l.weight()), cost, l.a, l.b)
            })
            .ok_or(Error::DisconnectedJunctionGraph)?;
        in_tree[next.a] = true;
        in_tree[next.b] = true;
        chosen.push(next.clone());
    }
    JunctionTree::from_links(jg.cliques.clone(), chosen)
}

/// Prim's algorithm from clique 0: repeatedly take a heaviest link leaving
/// the current tree.
pub fn prim_max_spanning_tree(jg: &JunctionGraph) -> Result<JunctionTree> {
    prim(jg, false)
}

/// Prim's algorithm with link cost as the secondary key.
pub fn prim_min_cost_tree(jg: &JunctionGraph) -> Result<JunctionTree> {
    prim(jg, true)
}

/// Kruskal's algorithm over links ordered by weight (descending), cost
/// (ascending), then clique ids. Taking equal-weight links cheapest first is
/// the cost-guided thinning of each weight stage.
pub fn kruskal_min_cost_tree(jg: &JunctionGraph) -> Result<JunctionTree> {
    let k = jg.cliques.len();
    if k == 0 {
        return Err(Error::EmptyCliqueSet);
    }
    let mut order: Vec<&Link> = jg.links.iter().collect();
    order.sort_by_key(|l| l.greedy_key());
    let mut sets = DisjointSets::new(k);
    let mut chosen = Vec::with_capacity(k - 1);
    for l in order {
        if sets.union(l.a, l.b) {
            chosen.push(l.clone());
            if chosen.len() == k - 1 {
                break;
            }
        }
    }
    if chosen.len() != k - 1 {
        return Err(Error::DisconnectedJunctionGraph);
    }
    JunctionTree::from_links(jg.cliques.clone(), chosen)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JunctionVerdict {
    Holds,
    /// Cliques `pair` share `separator`, but `offending` on the path between
    /// them does not contain it.
    Violated {
        pair: (usize, usize),
        separator: VarSet,
        offending: usize,
    },
}

impl JunctionVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, JunctionVerdict::Holds)
    }
}

/// Checks that every clique on the path between two cliques contains their
/// intersection.
pub fn verify_junction_property(t: &JunctionTree) -> JunctionVerdict {
    let k = t.cliques.len();
    let adj = t.adjacency();
    let mut parent = vec![usize::MAX; k];
    for u in 0..k {
        parent.fill(usize::MAX);
        parent[u] = u;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        for v in u + 1..k {
            let shared = t.cliques[u].vars.intersection(&t.cliques[v].vars);
            if shared.is_empty() {
                continue;
            }
            let mut w = parent[v];
            while w != u {
                if !shared.is_subset(&t.cliques[w].vars) {
                    return JunctionVerdict::Violated {
                        pair: (u, v),
                        separator: shared,
                        offending: w,
                    };
                }
                w = parent[w];
            }
        }
    }
    JunctionVerdict::Holds
}

/// Separator labels of a tree, counted with multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SeparatorMultiset {
    /// Distinct separators in order of their variable sets, with counts.
    pub entries: Vec<(Separator, usize)>,
}

impl SeparatorMultiset {
    pub fn from_separators<'a>(seps: impl IntoIterator<Item = &'a Separator>) -> Self {
        let mut counts: BTreeMap<&Separator, usize> = BTreeMap::new();
        for s in seps {
            *counts.entry(s).or_default() += 1;
        }
        SeparatorMultiset {
            entries: counts.into_iter().map(|(s, n)| (s.clone(), n)).collect(),
        }
    }

    pub fn multiplicity(&self, vars: &VarSet) -> usize {
        self.entries
            .iter()
            .find(|(s, _)| &s.vars == vars)
            .map_or(0, |&(_, n)| n)
    }

    /// Total count including multiplicity.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|&(_, n)| n).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.entries.iter().map(|&(_, n)| n).max().unwrap_or(0)
    }
}

pub fn separator_multiset(t: &JunctionTree) -> SeparatorMultiset {
    SeparatorMultiset::from_separators(t.links.iter().map(|l| &l.separator))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cliques(universe: &Universe, sets: &[&[usize]]) -> Vec<Clique> {
        sets.iter()
            .enumerate()
            .map(|(i, s)| Clique::new(i, s.iter().copied().collect(), universe).unwrap())
            .collect()
    }

    /// {A,B,C}, {B,C,D}, {C,D,E}
    fn chain() -> (Universe, JunctionGraph) {
        let u = Universe::binary(5);
        let cs = cliques(&u, &[&[0, 1, 2], &[1, 2, 3], &[2, 3, 4]]);
        let jg = build_junction_graph(&u, cs).unwrap();
        (u, jg)
    }

    #[test]
    fn junction_graph_links() {
        let u = Universe::binary(4);
        let jg = build_junction_graph(&u, cliques(&u, &[&[0, 1, 2], &[1, 2, 3]])).unwrap();
        assert_eq!(jg.links.len(), 1);
        assert_eq!(jg.links[0].separator.vars, VarSet::from([1, 2]));
        assert_eq!(jg.links[0].weight(), 2);
        assert_eq!(jg.links[0].cost, 16);

        let (_, jg) = chain();
        let labels: Vec<(usize, usize, VarSet, usize)> = jg
            .links
            .iter()
            .map(|l| (l.a, l.b, l.separator.vars.clone(), l.weight()))
            .collect();
        assert_eq!(
            labels,
            vec![
                (0, 1, VarSet::from([1, 2]), 2),
                (0, 2, VarSet::from([2]), 1),
                (1, 2, VarSet::from([2, 3]), 2),
            ]
        );

        let jg = build_junction_graph(&u, cliques(&u, &[&[0, 1], &[2, 3]])).unwrap();
        assert!(jg.links.is_empty());
        assert_eq!(
            prim_max_spanning_tree(&jg),
            Err(Error::DisconnectedJunctionGraph)
        );
        assert_eq!(
            kruskal_min_cost_tree(&jg),
            Err(Error::DisconnectedJunctionGraph)
        );
    }

    #[test]
    fn nested_and_empty_cliques_rejected() {
        let u = Universe::binary(3);
        assert_eq!(
            build_junction_graph(&u, cliques(&u, &[&[0, 1], &[0, 1, 2]])),
            Err(Error::NestedCliques { inner: 0, outer: 1 })
        );
        assert_eq!(build_junction_graph(&u, vec![]), Err(Error::EmptyCliqueSet));
    }

    #[test]
    fn prim_single_clique_and_chain() {
        let u = Universe::binary(2);
        let jg = build_junction_graph(&u, cliques(&u, &[&[0, 1]])).unwrap();
        let t = prim_max_spanning_tree(&jg).unwrap();
        assert!(t.links.is_empty());
        assert_eq!(t.total_weight, 0);
        assert!(verify_junction_property(&t).holds());
        assert!(separator_multiset(&t).is_empty());

        let (_, jg) = chain();
        let t = prim_max_spanning_tree(&jg).unwrap();
        assert_eq!(t.total_weight, 4);
        assert!(verify_junction_property(&t).holds());
        let seps: Vec<VarSet> = separator_multiset(&t)
            .entries
            .into_iter()
            .map(|(s, _)| s.vars)
            .collect();
        assert_eq!(seps, vec![VarSet::from([1, 2]), VarSet::from([2, 3])]);
    }

    #[test]
    fn star_of_equal_links() {
        let u = Universe::binary(5);
        let jg =
            build_junction_graph(&u, cliques(&u, &[&[0, 1], &[0, 2], &[0, 3], &[0, 4]])).unwrap();
        let t = prim_max_spanning_tree(&jg).unwrap();
        assert_eq!(t.total_weight, 3);
        assert_eq!(separator_multiset(&t).multiplicity(&VarSet::from([0])), 3);
    }

    #[test]
    fn kruskal_prefers_cheap_links() {
        // binary {A,B}, {A,C}, {A,D,E}
        let u = Universe::binary(5);
        let jg = build_junction_graph(&u, cliques(&u, &[&[0, 1], &[0, 2], &[0, 3, 4]])).unwrap();
        let t = kruskal_min_cost_tree(&jg).unwrap();
        let pairs: Vec<(usize, usize)> = t.links.iter().map(|l| (l.a, l.b)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2)]);
        assert_eq!(t.total_cost, 20);
        assert_eq!(prim_min_cost_tree(&jg).unwrap().total_cost, 20);

        let (_, jg) = chain();
        let t = kruskal_min_cost_tree(&jg).unwrap();
        assert_eq!(t.total_weight, 4);
        assert_eq!(t.total_cost, 32);

        let u = Universe::binary(3);
        let jg = build_junction_graph(&u, cliques(&u, &[&[0, 1], &[1, 2]])).unwrap();
        assert_eq!(kruskal_min_cost_tree(&jg).unwrap().links, jg.links);
    }

    #[test]
    fn junction_property_violation_witness() {
        let (_, jg) = chain();
        // {A,B,C}-{C,D,E} via {C}, plus {A,B,C}-{B,C,D}
        let links = vec![jg.links[1].clone(), jg.links[0].clone()];
        let t = JunctionTree::from_links(jg.cliques.clone(), links).unwrap();
        assert_eq!(t.total_weight, 3);
        assert_eq!(
            verify_junction_property(&t),
            JunctionVerdict::Violated {
                pair: (1, 2),
                separator: VarSet::from([2, 3]),
                offending: 0
            }
        );
    }

    #[test]
    fn from_links_rejects_non_trees() {
        let (_, jg) = chain();
        assert!(JunctionTree::from_links(jg.cliques.clone(), jg.links.clone()).is_err());
        assert!(JunctionTree::from_links(jg.cliques.clone(), vec![jg.links[0].clone()]).is_err());
    }

    #[test]
    fn deterministic_construction() {
        let (_, jg) = chain();
        assert_eq!(
            kruskal_min_cost_tree(&jg).unwrap(),
            kruskal_min_cost_tree(&jg).unwrap()
        );
    }
}
