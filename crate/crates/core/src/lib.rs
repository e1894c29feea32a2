//! Compilation of discrete Markov networks into optimal junction trees and
//! Almond trees, with exact two-pass propagation on both.
//!
//! The pipeline is:
//!
//! 1. build an [`UndirectedGraph`] (directly, or by [`moralize`]-ing a [`Dag`]),
//! 2. triangulate it ([`triangulate_heuristic`] or [`triangulate_optimal`]),
//! 3. extract the maximal [`cliques`],
//! 4. build the [`JunctionGraph`] and pick a maximal-weight, minimal-cost
//!    spanning tree with [`kruskal_min_cost_tree`],
//! 5. optionally restructure it into an [`AlmondTree`],
//! 6. load factors with [`assign_factors`] and [`propagate`].
//!
//! The [`oracle`] module holds brute-force reference implementations that the
//! test suites and the `verify` command check everything against.

pub mod almond;
pub mod compile;
mod dsu;
mod error;
pub mod generate;
pub mod graph;
pub mod junction;
pub mod model;
pub mod oracle;
pub mod pos;
pub mod propagation;
mod varset;
pub mod verify;

pub use almond::{
    build_almond_tree, contract, marginalization_budget, select_almond_links, AlmondLink,
    AlmondNode, AlmondNodeKind, AlmondTree, MarginalizationBudget,
};
pub use error::{Error, Result};
pub use graph::{
    cliques, is_chordal, moralize, triangulate_heuristic, triangulate_heuristic_with,
    triangulate_optimal, triangulate_optimal_bounded, Chordality, Dag, EliminationOrder, Objective,
    TriangulationResult, UndirectedGraph, Universe, VarId, Variable,
};
pub use junction::{
    build_junction_graph, kruskal_min_cost_tree, prim_max_spanning_tree, prim_min_cost_tree,
    separator_multiset, verify_junction_property, Clique, JunctionGraph, JunctionTree,
    JunctionVerdict, Link, Separator, SeparatorMultiset,
};
pub use propagation::{
    assign_factors, divide, marginalize, multiply, propagate, propagate_almond, query_marginal,
    AlmondCalibration, Evidence, Finding, JunctionState, Potential, PropagationStats, Schedule,
};
pub use varset::VarSet;
