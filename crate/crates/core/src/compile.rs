//! End-to-end compilation of a model and inference on the result.

use serde::Serialize;

use crate::almond::{
    build_almond_tree, marginalization_budget, AlmondNodeKind, AlmondTree, MarginalizationBudget,
};
use crate::error::Result;
use crate::graph::{
    cliques, triangulate_heuristic_with, triangulate_optimal, Objective, TriangulationResult,
    UndirectedGraph, Universe, VarId,
};
use crate::junction::{
    build_junction_graph, kruskal_min_cost_tree, separator_multiset, JunctionTree,
    SeparatorMultiset,
};
use crate::propagation::{
    assign_factors, propagate, propagate_almond, query_marginal, Evidence, Potential,
};
use crate::varset::VarSet;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CompileOptions {
    pub objective: Objective,
    /// Exhaustive search instead of the greedy heuristic.
    pub optimal: bool,
    /// Also build the Almond tree (and propagate on it when inferring).
    pub almond: bool,
}

#[derive(Clone, Debug)]
pub struct Compilation {
    pub triangulation: TriangulationResult,
    pub tree: JunctionTree,
    pub separators: SeparatorMultiset,
    pub almond: Option<AlmondTree>,
}

pub fn compile_graph(g: &UndirectedGraph, options: CompileOptions) -> Result<Compilation> {
    let triangulation = if options.optimal {
        triangulate_optimal(g, options.objective)?
    } else {
        triangulate_heuristic_with(g, options.objective)?
    };
    let jg = build_junction_graph(g.universe(), cliques(&triangulation.graph)?)?;
    let tree = kruskal_min_cost_tree(&jg)?;
    let separators = separator_multiset(&tree);
    let almond = if options.almond {
        Some(build_almond_tree(&tree.cliques, &separators)?)
    } else {
        None
    };
    Ok(Compilation {
        triangulation,
        tree,
        separators,
        almond,
    })
}

impl Compilation {
    /// Normalized marginals of `vars` given the evidence. Uses the Almond
    /// tree when one was built.
    pub fn infer(
        &self,
        universe: &Universe,
        factors: &[Potential],
        evidence: &Evidence,
        vars: &[VarId],
    ) -> Result<Vec<Vec<f64>>> {
        match &self.almond {
            Some(a) => {
                let cal = propagate_almond(universe, a, factors, evidence)?;
                vars.iter().map(|&v| cal.query_marginal(v)).collect()
            }
            None => {
                let mut state = assign_factors(universe, factors, &self.tree)?;
                propagate(&mut state, evidence)?;
                vars.iter().map(|&v| query_marginal(&state, v)).collect()
            }
        }
    }

    pub fn report(&self, universe: &Universe) -> CompilationReport {
        let names = |s: &VarSet| {
            s.iter()
                .map(|v| universe.variables()[v].name.clone())
                .collect::<Vec<_>>()
        };
        let name = |v: VarId| universe.variables()[v].name.clone();
        let t = &self.triangulation;
        CompilationReport {
            variables: universe.len(),
            elimination_order: t.order.as_slice().iter().map(|&v| name(v)).collect(),
            fill_ins: t
                .fill_ins
                .iter()
                .map(|&(a, b)| (name(a), name(b)))
                .collect(),
            total_clique_weight: t.total_clique_weight,
            cliques: self
                .tree
                .cliques
                .iter()
                .map(|c| CliqueReport {
                    id: c.id,
                    vars: names(&c.vars),
                    table_size: c.table_size,
                })
                .collect(),
            links: self
                .tree
                .links
                .iter()
                .map(|l| LinkReport {
                    cliques: (l.a, l.b),
                    separator: names(&l.separator.vars),
                    cost: l.cost,
                })
                .collect(),
            separators: self
                .separators
                .entries
                .iter()
                .map(|(s, n)| SeparatorReport {
                    vars: names(&s.vars),
                    table_size: s.table_size,
                    multiplicity: *n,
                })
                .collect(),
            tree_weight: self.tree.total_weight,
            tree_cost: self.tree.total_cost,
            junction_budget: marginalization_budget(&self.tree),
            almond: self.almond.as_ref().map(|a| AlmondReport {
                separator_nodes: a
                    .separator_nodes()
                    .map(|s| {
                        let node = &a.nodes[s];
                        let AlmondNodeKind::Separator { multiplicity } = node.kind else {
                            unreachable!("separator_nodes yields separators")
                        };
                        let adj = &a.adjacency()[s];
                        AlmondSeparatorReport {
                            vars: names(&node.vars),
                            multiplicity,
                            neighbours: adj.clone(),
                            stored_tables: adj.len().saturating_sub(1),
                        }
                    })
                    .collect(),
                links: a.links.len(),
                total_cost: a.total_cost(),
                budget: marginalization_budget(a),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompilationReport {
    pub variables: usize,
    pub elimination_order: Vec<String>,
    pub fill_ins: Vec<(String, String)>,
    pub total_clique_weight: u64,
    pub cliques: Vec<CliqueReport>,
    pub links: Vec<LinkReport>,
    pub separators: Vec<SeparatorReport>,
    pub tree_weight: usize,
    pub tree_cost: u64,
    pub junction_budget: MarginalizationBudget,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub almond: Option<AlmondReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliqueReport {
    pub id: usize,
    pub vars: Vec<String>,
    pub table_size: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkReport {
    pub cliques: (usize, usize),
    pub separator: Vec<String>,
    pub cost: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparatorReport {
    pub vars: Vec<String>,
    pub table_size: u64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlmondReport {
    pub separator_nodes: Vec<AlmondSeparatorReport>,
    pub links: usize,
    pub total_cost: u64,
    pub budget: MarginalizationBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlmondSeparatorReport {
    pub vars: Vec<String>,
    pub multiplicity: usize,
    /// Node indices; cliques come first, numbered as in the junction tree.
    pub neighbours: Vec<usize>,
    pub stored_tables: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{case_rng, random_evidence, random_model};
    use crate::oracle::{joint_from_factors, oracle_distribution};
    use crate::Error;

    #[test]
    fn cycle_with_optimal_triangulation() {
        let g = UndirectedGraph::cycle(4);
        let c = compile_graph(
            &g,
            CompileOptions {
                optimal: true,
                almond: true,
                ..Default::default()
            },
        )
        .unwrap();
        let r = c.report(g.universe());
        assert_eq!(r.fill_ins.len(), 1);
        assert_eq!(r.cliques.len(), 2);
        assert_eq!(r.tree_weight, 2);
        assert_eq!(r.tree_cost, 16);
        assert_eq!(r.almond.unwrap().separator_nodes[0].stored_tables, 1);
    }

    #[test]
    fn inference_matches_the_oracle() {
        for i in 0..40 {
            let mut rng = case_rng(11, i);
            let m = random_model(&mut rng, 8);
            let ev = random_evidence(&mut rng, &m.universe, 2);
            let vars: Vec<VarId> = (0..m.universe.len()).collect();
            let joint = joint_from_factors(&m.universe, &m.factors)
                .unwrap()
                .with_evidence(&ev)
                .unwrap();
            for almond in [false, true] {
                let c = compile_graph(
                    &m.graph(),
                    CompileOptions {
                        almond,
                        ..Default::default()
                    },
                )
                .unwrap();
                match c.infer(&m.universe, &m.factors, &ev, &vars) {
                    Ok(got) => {
                        for (v, dist) in got.iter().enumerate() {
                            let want = oracle_distribution(&joint, v).unwrap();
                            for (x, y) in dist.iter().zip(&want) {
                                assert!(
                                    (x - y).abs() <= 1e-9 * y.abs().max(1e-300)
                                        || (x - y).abs() < 1e-12
                                );
                            }
                        }
                    }
                    Err(Error::ImpossibleEvidence) => assert_eq!(joint.total(), 0.0),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}
