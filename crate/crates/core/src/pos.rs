//! Possibility relations (0/1 projections of probability tables), local
//! constraint-propagation schemes, and the four-cycle instance on which a
//! scheme without a hidden triangulation cannot reach the true projections.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{
    cliques, is_chordal, triangulate_heuristic, Chordality, UndirectedGraph, Universe, VarId,
};
use crate::junction::{build_junction_graph, kruskal_min_cost_tree};
use crate::propagation::{
    assign_factors, marginalize, projection_index, propagate, Evidence, Potential,
};
use crate::varset::VarSet;

/// Which configurations of a scope are possible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosRelation {
    scope: VarSet,
    cards: Vec<usize>,
    table: Vec<bool>,
}

impl PosRelation {
    pub fn new(scope: VarSet, cards: Vec<usize>, table: Vec<bool>) -> Result<Self> {
        if cards.len() != scope.len() || table.len() != cards.iter().product::<usize>() {
            return Err(Error::InvalidPotential(format!(
                "relation over {scope} has {} entries for cardinalities {cards:?}",
                table.len()
            )));
        }
        Ok(PosRelation {
            scope,
            cards,
            table,
        })
    }

    /// From a table of 0/1 entries.
    pub fn from_bits(scope: VarSet, cards: Vec<usize>, bits: &[u8]) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidPotential(format!("entry {b} is not 0 or 1")));
        }
        PosRelation::new(scope, cards, bits.iter().map(|&b| b == 1).collect())
    }

    pub fn all_ones(scope: VarSet, cards: Vec<usize>) -> Self {
        let size = cards.iter().product();
        PosRelation {
            scope,
            cards,
            table: vec![true; size],
        }
    }

    /// Two variables forced into the same state.
    pub fn equality(a: VarId, b: VarId, states: usize) -> Self {
        assert_ne!(a, b);
        let table = (0..states * states)
            .map(|i| i / states == i % states)
            .collect();
        PosRelation {
            scope: VarSet::from([a, b]),
            cards: vec![states, states],
            table,
        }
    }

    pub fn scope(&self) -> &VarSet {
        &self.scope
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn bits(&self) -> Vec<u8> {
        self.table.iter().map(|&b| u8::from(b)).collect()
    }

    pub fn ones(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    /// Existential projection: a configuration of `target` is possible iff
    /// some possible configuration extends it.
    pub fn project(&self, target: &VarSet) -> Result<PosRelation> {
        if !target.is_subset(&self.scope) {
            return Err(Error::ScopeMismatch(format!(
                "project: {target} is not contained in {}",
                self.scope
            )));
        }
        let cards: Vec<usize> = target
            .iter()
            .map(|v| self.cards[self.scope.position(v).expect("subset")])
            .collect();
        let mut table = vec![false; cards.iter().product()];
        for (&b, j) in self
            .table
            .iter()
            .zip(projection_index(&self.scope, &self.cards, target))
        {
            table[j] |= b;
        }
        Ok(PosRelation {
            scope: target.clone(),
            cards,
            table,
        })
    }

    /// Keeps only configurations whose restriction is possible in `other`,
    /// whose scope must be contained in this one.
    pub fn restrict(&self, other: &PosRelation) -> Result<PosRelation> {
        if !other.scope.is_subset(&self.scope) {
            return Err(Error::ScopeMismatch(format!(
                "restrict: {} is not contained in {}",
                other.scope, self.scope
            )));
        }
        let idx = projection_index(&self.scope, &self.cards, &other.scope);
        let table = self
            .table
            .iter()
            .zip(idx)
            .map(|(&b, j)| b && other.table[j])
            .collect();
        Ok(PosRelation {
            scope: self.scope.clone(),
            cards: self.cards.clone(),
            table,
        })
    }

    /// As a 0/1 potential.
    pub fn to_potential(&self) -> Result<Potential> {
        let table = self.table.iter().map(|&b| f64::from(u8::from(b))).collect();
        Potential::new(self.scope.clone(), self.cards.clone(), table)
    }
}

/// Possible configurations of a table: entry 1 iff positive.
pub fn pos_of(p: &Potential) -> PosRelation {
    PosRelation {
        scope: p.scope().clone(),
        cards: p.cardinalities().to_vec(),
        table: p.table().iter().map(|&x| x > 0.0).collect(),
    }
}

/// A set of procedures, each confined to a scope, exchanging information on
/// the intersection of their scopes over the listed channels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalScheme {
    pub scopes: Vec<VarSet>,
    pub channels: Vec<(usize, usize)>,
}

impl LocalScheme {
    /// Channels between every pair of scopes that intersect.
    pub fn new(scopes: Vec<VarSet>) -> Self {
        let mut channels = Vec::new();
        for i in 0..scopes.len() {
            for j in i + 1..scopes.len() {
                if !scopes[i].intersection(&scopes[j]).is_empty() {
                    channels.push((i, j));
                }
            }
        }
        LocalScheme { scopes, channels }
    }

    pub fn with_channels(scopes: Vec<VarSet>, channels: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(i, j)) = channels
            .iter()
            .find(|&&(i, j)| i >= scopes.len() || j >= scopes.len() || i == j)
        {
            return Err(Error::InvalidInstance(format!("bad channel ({i}, {j})")));
        }
        Ok(LocalScheme { scopes, channels })
    }

    /// The graph linking every two variables that share a scope.
    pub fn representing_graph(&self, universe: Arc<Universe>) -> Result<UndirectedGraph> {
        let mut g = UndirectedGraph::new(universe);
        for s in &self.scopes {
            let vs = s.as_slice();
            for (i, &a) in vs.iter().enumerate() {
                for &b in &vs[i + 1..] {
                    g.add_edge(a, b)?;
                }
            }
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFixpoint {
    pub relations: Vec<PosRelation>,
    /// Sweeps over all channels, including the final one that changed nothing.
    pub rounds: usize,
    /// Number of possible configurations per scope, initially and after each round.
    pub ones_per_round: Vec<Vec<usize>>,
}

/// Runs the strongest local messages to a fixpoint: over every channel, in
/// both directions, a procedure sends the existential projection of its
/// relation onto the shared variables and the receiver intersects it in.
pub fn fixpoint_local_propagation(
    scheme: &LocalScheme,
    relations: Vec<PosRelation>,
) -> Result<LocalFixpoint> {
    if relations.len() != scheme.scopes.len() {
        return Err(Error::InvalidInstance(format!(
            "{} relations for {} scopes",
            relations.len(),
            scheme.scopes.len()
        )));
    }
    for (r, s) in relations.iter().zip(&scheme.scopes) {
        if r.scope() != s {
            return Err(Error::ScopeMismatch(format!(
                "relation over {} for scope {s}",
                r.scope()
            )));
        }
    }
    let mut relations = relations;
    let counts = |rs: &[PosRelation]| rs.iter().map(PosRelation::ones).collect::<Vec<_>>();
    let mut ones_per_round = vec![counts(&relations)];
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        for &(i, j) in &scheme.channels {
            for (x, y) in [(i, j), (j, i)] {
                let shared = scheme.scopes[x].intersection(&scheme.scopes[y]);
                let msg = relations[x].project(&shared)?;
                let updated = relations[y].restrict(&msg)?;
                if updated != relations[y] {
                    relations[y] = updated;
                    changed = true;
                }
            }
        }
        ones_per_round.push(counts(&relations));
        if !changed {
            break;
        }
    }
    Ok(LocalFixpoint {
        relations,
        rounds,
        ones_per_round,
    })
}

/// Whether the representing graph of a scheme contains a triangulation of a
/// graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangulationWitness {
    pub contains_triangulation: bool,
    /// A chordless cycle (length >= 4) of the scheme's graph lying on the
    /// nodes of a cycle of the original graph.
    pub chordless_cycle: Option<Vec<VarId>>,
    /// An edge of the original graph no scope covers.
    pub uncovered_edge: Option<(VarId, VarId)>,
}

/// Largest graph [`check_hidden_triangulation`] will enumerate cycles of.
pub const HIDDEN_TRIANGULATION_BOUND: usize = 16;

/// Node sets (as bitmasks) of all cycles of length at least four.
fn cycle_node_sets(g: &UndirectedGraph) -> Vec<u32> {
    let n = g.node_count();
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let mut found = std::collections::BTreeSet::new();
    for start in 0..n {
        let allowed: u32 = adj
            .iter()
            .enumerate()
            .skip(start)
            .fold(0, |m, (v, _)| m | 1 << v);
        let mut seen = vec![false; (1usize << n) * n];
        let mut stack = vec![(1u32 << start, start)];
        while let Some((mask, cur)) = stack.pop() {
            let key = mask as usize * n + cur;
            if std::mem::replace(&mut seen[key], true) {
                continue;
            }
            if mask.count_ones() >= 4 && adj[cur] & 1 << start != 0 {
                found.insert(mask);
            }
            let mut next = adj[cur] & allowed & !mask;
            while next != 0 {
                let w = next.trailing_zeros() as usize;
                next &= next - 1;
                stack.push((mask | 1 << w, w));
            }
        }
    }
    let mut sets: Vec<u32> = found.into_iter().collect();
    sets.sort_by_key(|m| (m.count_ones(), *m));
    sets
}

/// Decides whether the scheme's representing graph contains a triangulation
/// of `g`: it must contain every edge of `g`, and the subgraph it induces on
/// the nodes of every cycle of `g` must be chordal.
pub fn check_hidden_triangulation(
    g: &UndirectedGraph,
    scheme: &LocalScheme,
) -> Result<TriangulationWitness> {
    let n = g.node_count();
    if n > HIDDEN_TRIANGULATION_BOUND {
        return Err(Error::OracleBound {
            size: n as u64,
            bound: HIDDEN_TRIANGULATION_BOUND as u64,
        });
    }
    let rep = scheme.representing_graph(g.universe().clone())?;
    if let Some(edge) = g.edges().into_iter().find(|&(a, b)| !rep.has_edge(a, b)) {
        return Ok(TriangulationWitness {
            contains_triangulation: false,
            chordless_cycle: None,
            uncovered_edge: Some(edge),
        });
    }
    for mask in cycle_node_sets(g) {
        let nodes: Vec<VarId> = (0..n).filter(|&v| mask & 1 << v != 0).collect();
        if let Chordality::NotChordal { cycle } = is_chordal(&rep.induced(&nodes)) {
            return Ok(TriangulationWitness {
                contains_triangulation: false,
                chordless_cycle: Some(cycle.into_iter().map(|i| nodes[i]).collect()),
                uncovered_edge: None,
            });
        }
    }
    Ok(TriangulationWitness {
        contains_triangulation: true,
        chordless_cycle: None,
        uncovered_edge: None,
    })
}

/// A cycle of binary variables where neighbours are forced equal except on
/// two opposite edges that start unconstrained. Evidence then forces the
/// first of those edges to equality, which makes every variable equal, but
/// local procedures on the cycle edges can only pass single-variable
/// information, and every single-variable projection is unconstrained.
#[derive(Clone, Debug)]
pub struct CycleCounterexample {
    pub universe: Arc<Universe>,
    /// Variables in cycle order.
    pub cycle: Vec<VarId>,
    /// One scope per cycle edge, sorted.
    pub scopes: Vec<VarSet>,
    /// Initial relation on each scope.
    pub relations: Vec<PosRelation>,
    /// Scope receiving the evidence.
    pub evidence_scope: usize,
    /// Relation replacing the initial one on `evidence_scope`.
    pub clamped: PosRelation,
    /// The unconstrained scope whose true updated projection is equality.
    pub query_scope: usize,
}

impl CycleCounterexample {
    pub fn graph(&self) -> UndirectedGraph {
        let n = self.cycle.len();
        let edges = (0..n).map(|i| (self.cycle[i], self.cycle[(i + 1) % n]));
        UndirectedGraph::from_edges(self.universe.clone(), edges).expect("cycle edges are valid")
    }

    /// One procedure per cycle edge.
    pub fn scheme(&self) -> LocalScheme {
        LocalScheme::new(self.scopes.clone())
    }

    /// The relations after the evidence replaced the one on `evidence_scope`.
    pub fn updated_relations(&self) -> Vec<PosRelation> {
        let mut rs = self.relations.clone();
        rs[self.evidence_scope] = self.clamped.clone();
        rs
    }

    /// Updated relations as 0/1 factors.
    pub fn factors(&self) -> Vec<Potential> {
        self.updated_relations()
            .iter()
            .map(|r| r.to_potential().expect("relations are non-empty"))
            .collect()
    }
}

/// Builds the counterexample on a cycle of `n >= 4` binary variables named
/// `A`, `B`, .... For `n = 4` the cycle is `A-B-D-C` with `Pos(A,B)` and
/// `Pos(C,D)` unconstrained, `A = C` and `B = D`, and the evidence clamps
/// `A = B`. Longer cycles insert further variables between `B` and `C`, each
/// clamped equal to its predecessor.
pub fn build_cycle_counterexample(n: usize) -> Result<CycleCounterexample> {
    if n < 4 {
        return Err(Error::InvalidInstance(format!("cycle length {n} < 4")));
    }
    let universe = Arc::new(Universe::binary(n));
    // A, B, D, E, ..., C
    let mut cycle = vec![0, 1];
    cycle.extend(3..n);
    cycle.push(2);
    let evidence_edge = VarSet::from([cycle[0], cycle[1]]);
    let free_edge = VarSet::from([cycle[n - 2], cycle[n - 1]]);
    let mut scopes: Vec<VarSet> = (0..n)
        .map(|i| VarSet::from([cycle[i], cycle[(i + 1) % n]]))
        .collect();
    scopes.sort();
    let relations = scopes
        .iter()
        .map(|s| {
            if *s == evidence_edge || *s == free_edge {
                PosRelation::all_ones(s.clone(), vec![2, 2])
            } else {
                PosRelation::equality(s.as_slice()[0], s.as_slice()[1], 2)
            }
        })
        .collect();
    let evidence_scope = scopes
        .iter()
        .position(|s| *s == evidence_edge)
        .expect("edge");
    let query_scope = scopes.iter().position(|s| *s == free_edge).expect("edge");
    Ok(CycleCounterexample {
        universe,
        cycle,
        clamped: PosRelation::equality(evidence_edge.as_slice()[0], evidence_edge.as_slice()[1], 2),
        scopes,
        relations,
        evidence_scope,
        query_scope,
    })
}

/// Scopes given by the cliques of a triangulation of the instance's cycle,
/// with each updated relation joined into the first scope containing it.
pub fn triangulated_scheme(inst: &CycleCounterexample) -> Result<(LocalScheme, Vec<PosRelation>)> {
    let tri = triangulate_heuristic(&inst.graph())?;
    let scopes: Vec<VarSet> = cliques(&tri.graph)?.into_iter().map(|c| c.vars).collect();
    let mut relations: Vec<PosRelation> = scopes
        .iter()
        .map(|s| PosRelation::all_ones(s.clone(), inst.universe.cardinalities(s)))
        .collect();
    for r in inst.updated_relations() {
        let home = scopes
            .iter()
            .position(|s| r.scope().is_subset(s))
            .ok_or_else(|| Error::FactorNotCovered(r.scope().clone()))?;
        relations[home] = relations[home].restrict(&r)?;
    }
    Ok((LocalScheme::new(scopes), relations))
}

/// The updated projection onto the query scope computed by junction tree
/// propagation of the 0/1 relations.
pub fn junction_tree_projection(inst: &CycleCounterexample) -> Result<PosRelation> {
    let tri = triangulate_heuristic(&inst.graph())?;
    let jg = build_junction_graph(&inst.universe, cliques(&tri.graph)?)?;
    let tree = kruskal_min_cost_tree(&jg)?;
    let mut state = assign_factors(&inst.universe, &inst.factors(), &tree)?;
    propagate(&mut state, &Evidence::new())?;
    let target = &inst.scopes[inst.query_scope];
    let home = tree
        .cliques
        .iter()
        .position(|c| target.is_subset(&c.vars))
        .ok_or_else(|| Error::FactorNotCovered(target.clone()))?;
    Ok(pos_of(&marginalize(state.clique_potential(home), target)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(scope: &[usize], bits: &[u8]) -> PosRelation {
        PosRelation::from_bits(scope.iter().copied().collect(), vec![2; scope.len()], bits).unwrap()
    }

    #[test]
    fn pos_of_marks_positive_entries() {
        let p = Potential::new(VarSet::from([0]), vec![2], vec![0.5, 0.0]).unwrap();
        assert_eq!(pos_of(&p).bits(), vec![1, 0]);
        let q = Potential::new(VarSet::from([0]), vec![2], vec![0.1, 3.0]).unwrap();
        assert_eq!(pos_of(&q).bits(), vec![1, 1]);
    }

    #[test]
    fn projection_and_restriction() {
        let eq = PosRelation::equality(0, 1, 2);
        assert_eq!(eq.bits(), vec![1, 0, 0, 1]);
        assert_eq!(eq.project(&VarSet::from([0])).unwrap().bits(), vec![1, 1]);
        let r = rel(&[0, 1], &[1, 1, 0, 0]);
        assert_eq!(r.project(&VarSet::from([0])).unwrap().bits(), vec![1, 0]);
        assert_eq!(
            eq.restrict(&rel(&[1], &[0, 1])).unwrap().bits(),
            vec![0, 0, 0, 1]
        );
        assert!(PosRelation::from_bits(VarSet::from([0]), vec![2], &[2, 0]).is_err());
    }

    #[test]
    fn counterexample_tables() {
        let inst = build_cycle_counterexample(4).unwrap();
        let scopes: Vec<Vec<usize>> = inst.scopes.iter().map(|s| s.as_slice().to_vec()).collect();
        assert_eq!(scopes, vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]]);
        let bits: Vec<Vec<u8>> = inst.relations.iter().map(PosRelation::bits).collect();
        assert_eq!(
            bits,
            vec![
                vec![1, 1, 1, 1],
                vec![1, 0, 0, 1],
                vec![1, 0, 0, 1],
                vec![1, 1, 1, 1]
            ]
        );
        assert_eq!(inst.clamped.bits(), vec![1, 0, 0, 1]);
        assert_eq!(inst.evidence_scope, 0);
        assert_eq!(inst.query_scope, 3);
        assert_eq!(inst.cycle, vec![0, 1, 3, 2]);
        assert!(build_cycle_counterexample(3).is_err());
    }

    #[test]
    fn local_scheme_on_the_cycle_cannot_see_the_constraint() {
        let inst = build_cycle_counterexample(4).unwrap();
        let fix = fixpoint_local_propagation(&inst.scheme(), inst.updated_relations()).unwrap();
        assert_eq!(fix.relations[inst.query_scope].bits(), vec![1, 1, 1, 1]);
        assert_eq!(fix.rounds, 1);
    }

    #[test]
    fn triangulated_scheme_reaches_equality() {
        let inst = build_cycle_counterexample(4).unwrap();
        let (scheme, relations) = triangulated_scheme(&inst).unwrap();
        let fix = fixpoint_local_propagation(&scheme, relations).unwrap();
        let target = &inst.scopes[inst.query_scope];
        let home = scheme
            .scopes
            .iter()
            .position(|s| target.is_subset(s))
            .unwrap();
        assert_eq!(
            fix.relations[home].project(target).unwrap().bits(),
            vec![1, 0, 0, 1]
        );
        assert_eq!(
            junction_tree_projection(&inst).unwrap().bits(),
            vec![1, 0, 0, 1]
        );
    }

    #[test]
    fn all_ones_is_a_fixpoint() {
        let scopes = vec![VarSet::from([0, 1]), VarSet::from([1, 2])];
        let rs: Vec<PosRelation> = scopes
            .iter()
            .map(|s| PosRelation::all_ones(s.clone(), vec![2, 2]))
            .collect();
        let fix = fixpoint_local_propagation(&LocalScheme::new(scopes), rs.clone()).unwrap();
        assert_eq!(fix.relations, rs);
    }

    #[test]
    fn hidden_triangulation_checks() {
        let inst = build_cycle_counterexample(4).unwrap();
        let g = inst.graph();
        let w = check_hidden_triangulation(&g, &inst.scheme()).unwrap();
        assert!(!w.contains_triangulation);
        assert_eq!(w.chordless_cycle, Some(vec![0, 1, 3, 2]));

        let chorded = LocalScheme::new(vec![VarSet::from([0, 1, 2]), VarSet::from([1, 2, 3])]);
        assert!(
            check_hidden_triangulation(&g, &chorded)
                .unwrap()
                .contains_triangulation
        );

        let tri = triangulate_heuristic(&g).unwrap();
        let scopes = cliques(&tri.graph)
            .unwrap()
            .into_iter()
            .map(|c| c.vars)
            .collect();
        assert!(
            check_hidden_triangulation(&g, &LocalScheme::new(scopes))
                .unwrap()
                .contains_triangulation
        );

        let partial = LocalScheme::new(vec![VarSet::from([0, 1]), VarSet::from([0, 2])]);
        let w = check_hidden_triangulation(&g, &partial).unwrap();
        assert_eq!(w.uncovered_edge, Some((1, 3)));
    }

    #[test]
    fn extra_edges_outside_cycles_do_not_matter() {
        // G is a path; a scheme whose graph is a 4-cycle still contains G itself
        let u = Arc::new(Universe::binary(4));
        let path = UndirectedGraph::from_edges(u, [(0, 1), (1, 3), (3, 2)]).unwrap();
        let square = LocalScheme::new(vec![
            VarSet::from([0, 1]),
            VarSet::from([1, 3]),
            VarSet::from([2, 3]),
            VarSet::from([0, 2]),
        ]);
        assert!(
            check_hidden_triangulation(&path, &square)
                .unwrap()
                .contains_triangulation
        );
    }

    proptest! {
        #[test]
        fn possibility_commutes_with_marginalization(
            table in prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], 8),
            keep in prop::collection::vec(any::<bool>(), 3),
        ) {
            prop_assume!(table.iter().any(|&x| x > 0.0));
            let p = Potential::new(VarSet::from([0, 1, 2]), vec![2; 3], table).unwrap();
            let target: VarSet = (0..3).filter(|&i| keep[i]).collect();
            let lhs = pos_of(&marginalize(&p, &target).unwrap());
            let rhs = pos_of(&p).project(&target).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
