//! Potentials and two-pass message passing over junction and Almond trees.

mod almond_pass;
mod hugin;
mod potential;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VarId;
use crate::varset::VarSet;

pub use almond_pass::{propagate_almond, AlmondCalibration};
pub use hugin::{assign_factors, propagate, query_marginal, JunctionState};
pub(crate) use potential::projection_index;
pub use potential::{divide, marginalize, multiply, Potential};

#[derive(Clone, Debug, PartialEq)]
pub enum Finding {
    /// The variable was observed in this state.
    State(usize),
    /// Soft finding: a nonnegative likelihood per state.
    Likelihood(Vec<f64>),
}

/// Findings keyed by variable id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Evidence {
    findings: BTreeMap<VarId, Finding>,
}

impl Evidence {
    pub fn new() -> Self {
        Evidence::default()
    }

    pub fn with_state(mut self, var: VarId, state: usize) -> Self {
        self.findings.insert(var, Finding::State(state));
        self
    }

    pub fn with_likelihood(mut self, var: VarId, likelihood: Vec<f64>) -> Self {
        self.findings.insert(var, Finding::Likelihood(likelihood));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.findings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &Finding)> {
        self.findings.iter().map(|(&v, f)| (v, f))
    }

    /// Each finding as a single-variable potential, checked against the
    /// variable cardinalities.
    pub fn indicators(&self, cards: &[usize]) -> Result<Vec<Potential>> {
        self.findings
            .iter()
            .map(|(&var, finding)| {
                let card = *cards.get(var).ok_or(Error::UnknownVariable(var))?;
                let table = match finding {
                    Finding::State(s) if *s < card => {
                        let mut t = vec![0.0; card];
                        t[*s] = 1.0;
                        t
                    }
                    Finding::State(s) => {
                        return Err(Error::InvalidEvidence(format!(
                            "state {s} out of range for variable {var} with {card} states"
                        )))
                    }
                    Finding::Likelihood(l) => l.clone(),
                };
                Potential::new(VarSet::singleton(var), vec![card], table)
                    .map_err(|e| Error::InvalidEvidence(format!("variable {var}: {e}")))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Message {
    pub from: usize,
    pub to: usize,
}

/// Collect-then-distribute order of directed messages over a tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub root: usize,
    /// Collect messages (towards the root) followed by distribute messages.
    pub messages: Vec<Message>,
}

impl Schedule {
    /// Builds the schedule for a tree given as adjacency lists.
    pub fn two_pass(adjacency: &[Vec<usize>], root: usize) -> Schedule {
        let n = adjacency.len();
        let mut parent = vec![usize::MAX; n];
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![root];
        parent[root] = root;
        while let Some(x) = stack.pop() {
            preorder.push(x);
            for &y in adjacency[x].iter().rev() {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let collect = preorder
            .iter()
            .rev()
            .filter(|&&x| x != root)
            .map(|&x| Message {
                from: x,
                to: parent[x],
            });
        let distribute = preorder.iter().filter(|&&x| x != root).map(|&x| Message {
            from: parent[x],
            to: x,
        });
        Schedule {
            root,
            messages: collect.chain(distribute).collect(),
        }
    }

    pub fn collect(&self) -> &[Message] {
        &self.messages[..self.messages.len() / 2]
    }

    pub fn distribute(&self) -> &[Message] {
        &self.messages[self.messages.len() / 2..]
    }

    /// Exactly one message per direction of every link, each sent only after
    /// its source heard from all other neighbours.
    pub fn is_valid_for(&self, adjacency: &[Vec<usize>]) -> bool {
        let links: usize = adjacency.iter().map(Vec::len).sum();
        if self.messages.len() != links {
            return false;
        }
        let mut sent = std::collections::BTreeSet::new();
        for m in &self.messages {
            if !adjacency[m.from].contains(&m.to) || !sent.insert((m.from, m.to)) {
                return false;
            }
            let ready = adjacency[m.from]
                .iter()
                .filter(|&&z| z != m.to)
                .all(|&z| sent.contains(&(z, m.from)));
            if !ready {
                return false;
            }
        }
        true
    }
}

/// Table operations performed during propagation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PropagationStats {
    pub marginalizations: usize,
    pub multiplications: usize,
    pub divisions: usize,
}
