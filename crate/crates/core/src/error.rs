use thiserror::Error;

use crate::graph::VarId;
use crate::varset::VarSet;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown variable id {0}")]
    UnknownVariable(VarId),
    #[error("unknown variable `{0}`")]
    UnknownVariableName(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("variable `{0}` must have at least one state")]
    InvalidCardinality(String),
    #[error("self-loop on variable {0}")]
    SelfLoop(VarId),
    #[error("directed graph has a cycle through variables {0:?}")]
    DagCycle(Vec<VarId>),
    #[error("model too large: state-space size overflows 64 bits")]
    ModelTooLarge,
    #[error("graph is disconnected ({} components: {components:?}); compile components separately", components.len())]
    Disconnected { components: Vec<Vec<VarId>> },
    #[error("exhaustive triangulation limited to {bound} variables, graph has {vars}; use the heuristic")]
    OptimalBoundExceeded { vars: usize, bound: usize },
    #[error("invalid elimination order: {0}")]
    InvalidOrder(String),
    #[error("graph is not chordal; chordless cycle {witness:?}")]
    NotChordal { witness: Vec<VarId> },
    #[error("clique collection is empty")]
    EmptyCliqueSet,
    #[error("clique {inner} is contained in clique {outer}")]
    NestedCliques { inner: usize, outer: usize },
    #[error("junction graph is disconnected")]
    DisconnectedJunctionGraph,
    #[error("links do not form a spanning tree: {0}")]
    NotASpanningTree(String),
    #[error("scope mismatch: {0}")]
    ScopeMismatch(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("inconsistent model: positive mass divided by zero at configuration {configuration}")]
    Inconsistent { configuration: usize },
    #[error("factor over {0} is not covered by any clique")]
    FactorNotCovered(VarSet),
    #[error(
        "numeric overflow: a table entry exceeded the floating-point range; rescale the factors"
    )]
    NumericOverflow,
    #[error("impossible evidence")]
    ImpossibleEvidence,
    #[error("invalid evidence: {0}")]
    InvalidEvidence(String),
    #[error("Almond tree construction failed: {0}")]
    AlmondStructure(String),
    #[error("oracle size bound exceeded: {size} > {bound}")]
    OracleBound { size: u64, bound: u64 },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}
