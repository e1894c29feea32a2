//! Variables, graphs, moralization, chordality and triangulation.

mod chordal;
mod triangulate;

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::varset::VarSet;

pub use chordal::{is_chordal, perfect_elimination_order, Chordality};
pub use triangulate::{
    cliques, eliminate, triangulate_heuristic, triangulate_heuristic_with, triangulate_optimal,
    triangulate_optimal_bounded, EliminationOrder, Objective, TriangulationResult,
    DEFAULT_OPTIMAL_BOUND,
};

/// Dense index of a variable within its [`Universe`].
pub type VarId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub id: VarId,
    pub name: String,
    pub cardinality: usize,
}

/// An ordered collection of discrete variables with contiguous ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Universe {
    variables: Vec<Variable>,
}

/// `A`, `B`, ..., `Z`, then `V26`, `V27`, ...
pub fn default_name(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        format!("V{i}")
    }
}

impl Universe {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut variables: Vec<Variable> = Vec::new();
        let mut seen = BTreeSet::new();
        for (id, (name, cardinality)) in vars.into_iter().enumerate() {
            let name = name.into();
            if cardinality == 0 {
                return Err(Error::InvalidCardinality(name));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateName(name));
            }
            variables.push(Variable {
                id,
                name,
                cardinality,
            });
        }
        Ok(Universe { variables })
    }

    /// Variables named `A`, `B`, ... with the given cardinalities.
    pub fn with_cardinalities(cards: &[usize]) -> Result<Self> {
        Universe::new(cards.iter().enumerate().map(|(i, &c)| (default_name(i), c)))
    }

    pub fn binary(n: usize) -> Self {
        Universe::with_cardinalities(&vec![2; n]).expect("binary cardinalities are valid")
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> Result<&Variable> {
        self.variables.get(id).ok_or(Error::UnknownVariable(id))
    }

    pub fn cardinality(&self, id: VarId) -> usize {
        self.variables[id].cardinality
    }

    pub fn id_of(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn all(&self) -> VarSet {
        (0..self.len()).collect()
    }

    pub fn cardinalities(&self, vars: &VarSet) -> Vec<usize> {
        vars.iter().map(|v| self.cardinality(v)).collect()
    }

    /// Number of joint configurations of `vars`, in checked arithmetic.
    pub fn state_space(&self, vars: &VarSet) -> Result<u64> {
        vars.iter().try_fold(1u64, |acc, v| {
            let card = self.variable(v)?.cardinality as u64;
            acc.checked_mul(card).ok_or(Error::ModelTooLarge)
        })
    }

    pub fn check(&self, vars: &VarSet) -> Result<()> {
        match vars.iter().find(|&v| v >= self.len()) {
            Some(v) => Err(Error::UnknownVariable(v)),
            None => Ok(()),
        }
    }
}

/// Undirected graph over the variables of a universe. Adjacency is symmetric
/// and irreflexive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    universe: Arc<Universe>,
    adj: Vec<BTreeSet<VarId>>,
}

impl UndirectedGraph {
    pub fn new(universe: Arc<Universe>) -> Self {
        let adj = vec![BTreeSet::new(); universe.len()];
        UndirectedGraph { universe, adj }
    }

    pub fn from_edges(
        universe: Arc<Universe>,
        edges: impl IntoIterator<Item = (VarId, VarId)>,
    ) -> Result<Self> {
        let mut g = UndirectedGraph::new(universe);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0` over `n` binary variables.
    pub fn cycle(n: usize) -> Self {
        let edges = (0..n).map(|i| (i, (i + 1) % n));
        UndirectedGraph::from_edges(Arc::new(Universe::binary(n)), edges).expect("valid cycle")
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, u: VarId, v: VarId) -> Result<bool> {
        let n = self.adj.len();
        if u >= n {
            return Err(Error::UnknownVariable(u));
        }
        if v >= n {
            return Err(Error::UnknownVariable(v));
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        self.adj[v].insert(u);
        Ok(self.adj[u].insert(v))
    }

    pub fn has_edge(&self, u: VarId, v: VarId) -> bool {
        self.adj.get(u).is_some_and(|n| n.contains(&v))
    }

    pub fn neighbors(&self, v: VarId) -> &BTreeSet<VarId> {
        &self.adj[v]
    }

    pub fn degree(&self, v: VarId) -> usize {
        self.adj[v].len()
    }

    /// All edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_complete(&self, vars: &VarSet) -> bool {
        let s = vars.as_slice();
        s.iter()
            .enumerate()
            .all(|(i, &u)| s[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<VarId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.components().len() == 1
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected {
                components: self.components(),
            })
        }
    }

    /// Subgraph induced on `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[VarId]) -> UndirectedGraph {
        let cards: Vec<usize> = nodes
            .iter()
            .map(|&v| self.universe.cardinality(v))
            .collect();
        let universe = Universe::new(
            nodes
                .iter()
                .zip(&cards)
                .map(|(&v, &c)| (self.universe.variables()[v].name.clone(), c)),
        )
        .expect("subset of a valid universe");
        let mut g = UndirectedGraph::new(Arc::new(universe));
        for (i, &u) in nodes.iter().enumerate() {
            for (j, &v) in nodes.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j).expect("in range");
                }
            }
        }
        g
    }
}

/// Directed acyclic graph given by parent lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    universe: Arc<Universe>,
    parents: Vec<Vec<VarId>>,
}

impl Dag {
    /// Builds a DAG from `(parent, child)` edges, rejecting cycles.
    pub fn new(
        universe: Arc<Universe>,
        edges: impl IntoIterator<Item = (VarId, VarId)>,
    ) -> Result<Self> {
        let n = universe.len();
        let mut parents = vec![Vec::new(); n];
        for (p, c) in edges {
            if p >= n {
                return Err(Error::UnknownVariable(p));
            }
            if c >= n {
                return Err(Error::UnknownVariable(c));
            }
            if p == c {
                return Err(Error::SelfLoop(p));
            }
            if !parents[c].contains(&p) {
                parents[c].push(p);
            }
        }
        for ps in &mut parents {
            ps.sort_unstable();
        }
        let dag = Dag { universe, parents };
        dag.topological_order()?;
        Ok(dag)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn parents(&self, v: VarId) -> &[VarId] {
        &self.parents[v]
    }

    /// `(parent, child)` pairs ordered by child then parent.
    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect()
    }

    /// Kahn's algorithm, smallest ready id first.
    pub fn topological_order(&self) -> Result<Vec<VarId>> {
        let n = self.parents.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut children = vec![Vec::new(); n];
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let mut ready: BTreeSet<VarId> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).filter(|&v| indegree[v] > 0).collect();
            return Err(Error::DagCycle(stuck));
        }
        Ok(order)
    }
}

/// Undirects every arc and marries the parents of each node.
pub fn moralize(dag: &Dag) -> UndirectedGraph {
    let mut g = UndirectedGraph::new(dag.universe.clone());
    for (c, ps) in dag.parents.iter().enumerate() {
        for (i, &p) in ps.iter().enumerate() {
            g.add_edge(p, c).expect("dag edges are valid");
            for &q in &ps[i + 1..] {
                g.add_edge(p, q).expect("dag edges are valid");
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(n: usize, edges: &[(VarId, VarId)]) -> Result<Dag> {
        Dag::new(Arc::new(Universe::binary(n)), edges.iter().copied())
    }

    #[test]
    fn v_structure_marries_parents() {
        let g = moralize(&dag(3, &[(0, 2), (1, 2)]).unwrap());
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn chain_moralizes_to_skeleton() {
        let g = moralize(&dag(3, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn existing_marriage_edge_is_idempotent() {
        let g = moralize(&dag(3, &[(0, 2), (1, 2), (0, 1)]).unwrap());
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn cyclic_dag_rejected() {
        let err = dag(3, &[(0, 1), (1, 2), (2, 0)]).unwrap_err();
        assert_eq!(err, Error::DagCycle(vec![0, 1, 2]));
        assert_eq!(dag(2, &[(1, 1)]).unwrap_err(), Error::SelfLoop(1));
    }

    #[test]
    fn universe_validation() {
        assert_eq!(
            Universe::new([("A", 2), ("A", 3)]).unwrap_err(),
            Error::DuplicateName("A".into())
        );
        assert_eq!(
            Universe::new([("A", 0)]).unwrap_err(),
            Error::InvalidCardinality("A".into())
        );
        let u = Universe::with_cardinalities(&[u32::MAX as usize, u32::MAX as usize, 4]).unwrap();
        assert_eq!(
            u.state_space(&VarSet::from([0, 1, 2])),
            Err(Error::ModelTooLarge)
        );
        assert_eq!(u.state_space(&VarSet::from([2])), Ok(4));
        assert_eq!(u.state_space(&VarSet::new()), Ok(1));
    }

    #[test]
    fn graph_rejects_self_loops_and_reports_components() {
        let mut g = UndirectedGraph::new(Arc::new(Universe::binary(4)));
        assert_eq!(g.add_edge(1, 1), Err(Error::SelfLoop(1)));
        assert_eq!(g.add_edge(0, 9), Err(Error::UnknownVariable(9)));
        g.add_edge(0, 1).unwrap();
        g.add_edge(2, 3).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2, 3]]);
        assert!(!g.is_connected());
    }
}
