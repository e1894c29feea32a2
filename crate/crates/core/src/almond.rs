//! Almond trees: junction trees whose repeated separators are contracted into
//! explicit separator nodes, and whose separators may hang off larger
//! separators instead of cliques.
//!
//! Node indices `0..k` are the cliques (node `i` is clique `i`); separator
//! nodes follow.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::junction::{Clique, JunctionTree, Separator, SeparatorMultiset};
use crate::varset::VarSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AlmondNodeKind {
    Clique {
        clique: usize,
    },
    /// A separator standing for `multiplicity` junction tree links.
    Separator {
        multiplicity: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlmondNode {
    #[serde(flatten)]
    pub kind: AlmondNodeKind,
    pub vars: VarSet,
    pub table_size: u64,
}

impl AlmondNode {
    pub fn is_separator(&self) -> bool {
        matches!(self.kind, AlmondNodeKind::Separator { .. })
    }
}

/// A link from a separator node to a node whose variables strictly contain it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlmondLink {
    pub subset: usize,
    pub superset: usize,
    pub cost: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlmondTree {
    pub nodes: Vec<AlmondNode>,
    pub links: Vec<AlmondLink>,
}

impl AlmondTree {
    pub fn clique_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.is_separator()).count()
    }

    pub fn separator_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_separator())
            .map(|(i, _)| i)
    }

    /// Neighbour lists in ascending order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for l in &self.links {
            adj[l.subset].push(l.superset);
            adj[l.superset].push(l.subset);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    pub fn degree(&self, node: usize) -> usize {
        self.links
            .iter()
            .filter(|l| l.subset == node || l.superset == node)
            .count()
    }

    pub fn total_cost(&self) -> u64 {
        self.links.iter().map(|l| l.cost).sum()
    }

    /// Connected, acyclic, every link from a separator to a strict superset,
    /// and cliques numbered first.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        for (i, node) in self.nodes.iter().enumerate() {
            if let AlmondNodeKind::Clique { clique } = node.kind {
                if clique != i {
                    return Err(Error::AlmondStructure(format!(
                        "clique {clique} stored at node {i}"
                    )));
                }
            }
        }
        if n > 0 && self.links.len() != n - 1 {
            return Err(Error::AlmondStructure(format!(
                "{} links for {n} nodes",
                self.links.len()
            )));
        }
        let mut sets = DisjointSets::new(n);
        for l in &self.links {
            let (s, t) = (&self.nodes[l.subset], &self.nodes[l.superset]);
            if !s.is_separator() || !s.vars.is_strict_subset(&t.vars) {
                return Err(Error::AlmondStructure(format!(
                    "link {} -> {} is not separator-to-superset",
                    l.subset, l.superset
                )));
            }
            if !sets.union(l.subset, l.superset) {
                return Err(Error::AlmondStructure(format!(
                    "link {} -> {} closes a cycle",
                    l.subset, l.superset
                )));
            }
        }
        Ok(())
    }
}

fn clique_nodes(cliques: &[Clique]) -> Vec<AlmondNode> {
    cliques
        .iter()
        .map(|c| AlmondNode {
            kind: AlmondNodeKind::Clique { clique: c.id },
            vars: c.vars.clone(),
            table_size: c.table_size,
        })
        .collect()
}

fn link_cost(a: u64, b: u64) -> Result<u64> {
    a.checked_add(b).ok_or(Error::ModelTooLarge)
}

/// Merges junction tree links that carry the same separator and touch each
/// other into one separator node adjacent to all cliques involved. Links with
/// equal labels in different parts of the tree stay apart, since merging
/// them would close a cycle through the links that separate them.
pub fn contract(t: &JunctionTree) -> AlmondTree {
    let k = t.cliques.len();
    let mut nodes = clique_nodes(&t.cliques);
    let mut links = Vec::new();
    let mut by_label: BTreeMap<&Separator, Vec<usize>> = BTreeMap::new();
    for (i, l) in t.links.iter().enumerate() {
        by_label.entry(&l.separator).or_default().push(i);
    }
    for (sep, link_ids) in by_label {
        let mut sets = DisjointSets::new(k);
        for &i in &link_ids {
            sets.union(t.links[i].a, t.links[i].b);
        }
        // group the label's links by the component they fall in
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &i in &link_ids {
            groups.entry(sets.find(t.links[i].a)).or_default().push(i);
        }
        for group in groups.values() {
            let node = nodes.len();
            nodes.push(AlmondNode {
                kind: AlmondNodeKind::Separator {
                    multiplicity: group.len(),
                },
                vars: sep.vars.clone(),
                table_size: sep.table_size,
            });
            let mut members: Vec<usize> = group
                .iter()
                .flat_map(|&i| [t.links[i].a, t.links[i].b])
                .collect();
            members.sort_unstable();
            members.dedup();
            for c in members {
                links.push(AlmondLink {
                    subset: node,
                    superset: c,
                    cost: sep.table_size + t.cliques[c].table_size,
                });
            }
        }
    }
    AlmondTree { nodes, links }
}

/// The greedy link choice behind [`build_almond_tree`], without checking
/// that the result spans the cliques.
///
/// Candidate links join each separator to every clique and every other
/// separator strictly containing it. They are taken in order of separator
/// weight (descending), then cost (ascending), clique targets before
/// separator targets, then node ids; a link is accepted while its separator
/// still needs links (multiplicity + 1 in total) and it closes no cycle.
pub fn select_almond_links(
    cliques: &[Clique],
    separators: &SeparatorMultiset,
) -> Result<AlmondTree> {
    let mut nodes = clique_nodes(cliques);
    for (sep, n) in &separators.entries {
        if sep.vars.is_empty() || *n == 0 {
            return Err(Error::AlmondStructure(format!(
                "separator {} with multiplicity {n}",
                sep.vars
            )));
        }
        nodes.push(AlmondNode {
            kind: AlmondNodeKind::Separator { multiplicity: *n },
            vars: sep.vars.clone(),
            table_size: sep.table_size,
        });
    }
    let mut candidates = Vec::new();
    for (s, sn) in nodes.iter().enumerate().filter(|(_, n)| n.is_separator()) {
        for (t, tn) in nodes.iter().enumerate() {
            if sn.vars.is_strict_subset(&tn.vars) {
                let cost = link_cost(sn.table_size, tn.table_size)?;
                candidates.push((Reverse(sn.vars.len()), cost, tn.is_separator(), s, t));
            }
        }
    }
    candidates.sort();
    let mut quota: Vec<usize> = nodes
        .iter()
        .map(|n| match n.kind {
            AlmondNodeKind::Separator { multiplicity } => multiplicity + 1,
            AlmondNodeKind::Clique { .. } => 0,
        })
        .collect();
    let mut sets = DisjointSets::new(nodes.len());
    let mut links = Vec::new();
    for (_, cost, _, s, t) in candidates {
        if quota[s] > 0 && sets.union(s, t) {
            quota[s] -= 1;
            links.push(AlmondLink {
                subset: s,
                superset: t,
                cost,
            });
        }
    }
    if let Some(s) = quota.iter().position(|&q| q > 0) {
        return Err(Error::AlmondStructure(format!(
            "separator {} found only {} acyclic superset links",
            nodes[s].vars,
            links.iter().filter(|l| l.subset == s).count()
        )));
    }
    Ok(AlmondTree { nodes, links })
}

/// Minimal-cost Almond tree over `cliques`, given the separator multiset of
/// any junction tree over them.
pub fn build_almond_tree(cliques: &[Clique], separators: &SeparatorMultiset) -> Result<AlmondTree> {
    let tree = select_almond_links(cliques, separators)?;
    tree.validate().map_err(|e| {
        Error::AlmondStructure(format!(
            "separators do not come from a junction tree over these cliques ({e})"
        ))
    })?;
    Ok(tree)
}

/// Operation counts for one full two-pass propagation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MarginalizationBudget {
    /// Table projections (one per message from a node to a smaller node).
    pub marginalizations: usize,
    /// Separator tables that must be kept between the two passes.
    pub stored_separator_tables: usize,
}

/// Structures whose two-pass cost can be read off their shape.
pub trait TwoPassLayout {
    fn budget(&self) -> MarginalizationBudget;
}

impl TwoPassLayout for JunctionTree {
    /// Each link is marginalized once in each direction and its separator
    /// holds one table.
    fn budget(&self) -> MarginalizationBudget {
        MarginalizationBudget {
            marginalizations: 2 * self.links.len(),
            stored_separator_tables: self.links.len(),
        }
    }
}

impl TwoPassLayout for AlmondTree {
    /// Only the message from the superset end of a link needs a projection;
    /// a separator node with `n` neighbours keeps `n - 1` tables.
    fn budget(&self) -> MarginalizationBudget {
        MarginalizationBudget {
            marginalizations: self.links.len(),
            stored_separator_tables: self
                .separator_nodes()
                .map(|s| self.degree(s).saturating_sub(1))
                .sum(),
        }
    }
}

pub fn marginalization_budget(layout: &impl TwoPassLayout) -> MarginalizationBudget {
    layout.budget()
}
