use super::hugin::{check_factor, home_clique, largest_clique};
use super::{marginalize, multiply, Evidence, Potential, PropagationStats, Schedule};
use crate::almond::{AlmondNodeKind, AlmondTree};
use crate::error::{Error, Result};
use crate::graph::{Universe, VarId};
use crate::junction::Clique;
use crate::varset::VarSet;

/// Result of a two-pass propagation over an Almond tree.
#[derive(Clone, Debug)]
pub struct AlmondCalibration {
    /// Unnormalized clique marginals, indexed by clique id.
    pub clique_marginals: Vec<Potential>,
    /// Tables held at each node between the passes (zero for cliques).
    pub stored_tables: Vec<usize>,
    pub stats: PropagationStats,
    pub schedule: Schedule,
}

impl AlmondCalibration {
    /// Normalized marginal of `var` from the lowest-id clique containing it.
    pub fn query_marginal(&self, var: VarId) -> Result<Vec<f64>> {
        let p = self
            .clique_marginals
            .iter()
            .find(|p| p.scope().contains(var))
            .ok_or(Error::UnknownVariable(var))?;
        marginalize(p, &VarSet::singleton(var))?
            .normalized()
            .ok_or(Error::ImpossibleEvidence)
    }
}

struct Pass<'a> {
    tree: &'a AlmondTree,
    universe: &'a Universe,
    adjacency: Vec<Vec<usize>>,
    /// Clique potentials; `None` for separator nodes.
    local: Vec<Option<Potential>>,
    /// Messages kept at each node, aligned with `adjacency`.
    inbox: Vec<Vec<Option<Potential>>>,
    /// Message from the parent during distribution, consumed by a separator
    /// node without being stored.
    arriving: Vec<Option<Potential>>,
    stats: PropagationStats,
}

impl Pass<'_> {
    fn combine(&mut self, acc: Option<Potential>, msg: &Potential) -> Result<Potential> {
        match acc {
            None => Ok(msg.clone()),
            Some(a) => {
                self.stats.multiplications += 1;
                multiply(&a, msg)
            }
        }
    }

    /// Product of the local table and everything `from` has heard except
    /// from `to`, projected to the smaller of the two nodes.
    fn message(&mut self, from: usize, to: usize) -> Result<Potential> {
        // messages from smaller separators may not nest, so a separator node
        // accumulates over its own variables
        let mut acc = match &self.local[from] {
            Some(p) => Some(p.clone()),
            None if self.tree.nodes[from].is_separator() => {
                let vars = self.tree.nodes[from].vars.clone();
                let cards = self.universe.cardinalities(&vars);
                Some(Potential::neutral(vars, cards))
            }
            None => None,
        };
        for pos in 0..self.adjacency[from].len() {
            if self.adjacency[from][pos] == to {
                continue;
            }
            if let Some(msg) = self.inbox[from][pos].clone() {
                acc = Some(self.combine(acc, &msg)?);
            }
        }
        if let Some(msg) = self.arriving[from].clone() {
            acc = Some(self.combine(acc, &msg)?);
        }
        let acc = acc.ok_or_else(|| {
            Error::AlmondStructure(format!("node {from} has nothing to send to {to}"))
        })?;
        let (src, dst) = (&self.tree.nodes[from].vars, &self.tree.nodes[to].vars);
        if dst.is_strict_subset(src) {
            self.stats.marginalizations += 1;
            marginalize(&acc, dst)
        } else {
            Ok(acc)
        }
    }

    fn deliver(&mut self, from: usize, to: usize, msg: Potential, distributing: bool) {
        if distributing && self.tree.nodes[to].is_separator() {
            self.arriving[to] = Some(msg);
        } else {
            let pos = self.adjacency[to]
                .iter()
                .position(|&x| x == from)
                .expect("message follows a tree link");
            self.inbox[to][pos] = Some(msg);
        }
    }

    fn belief(&mut self, clique: usize) -> Result<Potential> {
        let mut acc = self.local[clique].clone().expect("clique node");
        for msg in self.inbox[clique].clone().into_iter().flatten() {
            acc = self.combine(Some(acc), &msg)?;
        }
        Ok(acc)
    }
}

/// Two-pass propagation over an Almond tree. Clique nodes hold the assigned
/// factors and findings; separator nodes combine what their neighbours send
/// and keep only the tables received during the collect pass.
pub fn propagate_almond(
    universe: &Universe,
    tree: &AlmondTree,
    factors: &[Potential],
    evidence: &Evidence,
) -> Result<AlmondCalibration> {
    tree.validate()?;
    let cliques: Vec<Clique> = tree
        .nodes
        .iter()
        .filter_map(|n| match n.kind {
            AlmondNodeKind::Clique { clique } => Some(Clique {
                id: clique,
                vars: n.vars.clone(),
                table_size: n.table_size,
            }),
            AlmondNodeKind::Separator { .. } => None,
        })
        .collect();
    if cliques.is_empty() {
        return Err(Error::EmptyCliqueSet);
    }
    let mut local: Vec<Option<Potential>> = tree
        .nodes
        .iter()
        .map(|n| {
            (!n.is_separator())
                .then(|| Potential::neutral(n.vars.clone(), universe.cardinalities(&n.vars)))
        })
        .collect();
    let mut stats = PropagationStats::default();
    let cards: Vec<usize> = universe.variables().iter().map(|v| v.cardinality).collect();
    let findings = evidence.indicators(&cards)?;
    for f in factors {
        check_factor(universe, f)?;
    }
    for f in factors.iter().chain(&findings) {
        let home = home_clique(&cliques, f.scope())
            .ok_or_else(|| Error::FactorNotCovered(f.scope().clone()))?;
        let p = local[home].take().expect("clique node");
        local[home] = Some(multiply(&p, f)?);
        stats.multiplications += 1;
    }
    let adjacency = tree.adjacency();
    let schedule = Schedule::two_pass(&adjacency, largest_clique(&cliques));
    let inbox = adjacency.iter().map(|a| vec![None; a.len()]).collect();
    let mut pass = Pass {
        tree,
        universe,
        adjacency,
        local,
        inbox,
        arriving: vec![None; tree.nodes.len()],
        stats,
    };
    for m in schedule.collect() {
        let msg = pass.message(m.from, m.to)?;
        pass.deliver(m.from, m.to, msg, false);
    }
    if pass.belief(schedule.root)?.sum() <= 0.0 {
        return Err(Error::ImpossibleEvidence);
    }
    for m in schedule.distribute() {
        let msg = pass.message(m.from, m.to)?;
        pass.deliver(m.from, m.to, msg, true);
    }
    let clique_marginals = (0..cliques.len())
        .map(|c| pass.belief(c))
        .collect::<Result<Vec<_>>>()?;
    let stored_tables = tree
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            if n.is_separator() {
                pass.inbox[i].iter().flatten().count()
            } else {
                0
            }
        })
        .collect();
    Ok(AlmondCalibration {
        clique_marginals,
        stored_tables,
        stats: pass.stats,
        schedule,
    })
}
