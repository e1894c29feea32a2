//! Randomized checks of junction tree structure and of propagation, each run
//! against the brute-force [`oracle`](crate::oracle).
//!
//! Case `i` of a run with seed `s` draws from its own stream, so cases run in
//! parallel and any single case can be replayed.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::almond::{build_almond_tree, marginalization_budget};
use crate::error::Error;
use crate::generate::{
    case_rng, random_chordal_case, random_connected_graph, random_evidence, random_model,
    ChordalCase, RandomModel,
};
use crate::graph::{
    is_chordal, triangulate_heuristic, triangulate_optimal, Objective, UndirectedGraph, Universe,
};
use crate::junction::{
    build_junction_graph, kruskal_min_cost_tree, prim_min_cost_tree, separator_multiset,
    verify_junction_property, JunctionGraph,
};
use crate::model::{Model, ModelFile};
use crate::oracle::{
    enumerate_almond_trees, enumerate_spanning_trees, joint_from_factors, joint_pos,
    min_clique_weight, min_fill, oracle_marginal, EnumeratedTree,
};
use crate::pos::{
    build_cycle_counterexample, check_hidden_triangulation, fixpoint_local_propagation,
    junction_tree_projection, triangulated_scheme, PosRelation,
};
use crate::propagation::{
    assign_factors, propagate, propagate_almond, query_marginal, Evidence, Potential,
};
use crate::varset::VarSet;

pub const DEFAULT_CASES: usize = 200;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Maximal-weight spanning trees are exactly the junction trees.
    #[serde(rename = "theorem1")]
    MaxWeightTrees,
    /// All junction trees share one separator multiset.
    #[serde(rename = "corollary1")]
    SeparatorMultisets,
    /// The staged greedy tree has maximal weight and, among those, minimal cost.
    #[serde(rename = "theorem2")]
    CheapestTree,
    /// The four-cycle possibility counterexample and its longer variants.
    #[serde(rename = "example1")]
    CycleCounterexample,
    /// Junction tree marginals against the full joint.
    Propagation,
    /// Almond tree marginals, operation counts and storage.
    Almond,
    /// Heuristic triangulation against exhaustive search.
    Triangulation,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::MaxWeightTrees,
        Suite::SeparatorMultisets,
        Suite::CheapestTree,
        Suite::CycleCounterexample,
        Suite::Propagation,
        Suite::Almond,
        Suite::Triangulation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::MaxWeightTrees => "theorem1",
            Suite::SeparatorMultisets => "corollary1",
            Suite::CheapestTree => "theorem2",
            Suite::CycleCounterexample => "example1",
            Suite::Propagation => "propagation",
            Suite::Almond => "almond",
            Suite::Triangulation => "triangulation",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseFailure {
    pub case: usize,
    pub message: String,
    /// The failing instance, loadable by the `compile` and `query` commands.
    pub replay: Option<ModelFile>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<CaseFailure>,
    /// Human-readable observations, in case order.
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Uniform factors over the cliques, so the model's graph is `g` itself.
fn chordal_replay(case: &ChordalCase) -> ModelFile {
    let factors = case
        .cliques
        .iter()
        .map(|c| Potential::neutral(c.vars.clone(), case.graph.universe().cardinalities(&c.vars)))
        .collect();
    Model::from_parts(case.graph.universe().clone(), factors, None).to_file()
}

fn model_replay(m: &RandomModel) -> ModelFile {
    Model::from_parts(m.universe.clone(), m.factors.clone(), m.dag.clone()).to_file()
}

fn graph_replay(g: &UndirectedGraph) -> ModelFile {
    let factors = g
        .edges()
        .into_iter()
        .map(|(a, b)| {
            Potential::neutral(
                VarSet::from([a, b]),
                g.universe().cardinalities(&VarSet::from([a, b])),
            )
        })
        .collect();
    Model::from_parts(g.universe().clone(), factors, None).to_file()
}

/// Chordal graph of case `index`.
pub fn chordal_case(seed: u64, index: usize) -> ChordalCase {
    random_chordal_case(&mut case_rng(seed, index as u64), 3, 8)
}

/// Model and evidence of case `index`.
pub fn model_case(seed: u64, index: usize) -> (RandomModel, Evidence) {
    let mut rng = case_rng(seed, index as u64);
    let m = random_model(&mut rng, 12);
    let ev = random_evidence(&mut rng, &m.universe, 3);
    (m, ev)
}

fn spanning_trees(case: &ChordalCase) -> Result<(JunctionGraph, Vec<EnumeratedTree>), String> {
    let jg = build_junction_graph(case.graph.universe(), case.cliques.clone())
        .map_err(|e| e.to_string())?;
    let trees = enumerate_spanning_trees(&jg).map_err(|e| e.to_string())?;
    Ok((jg, trees))
}

/// A spanning tree has maximal weight iff it has the junction property; the
/// library's own junction check agrees with the oracle's.
pub fn check_max_weight_trees(case: &ChordalCase) -> Result<String, String> {
    let (jg, trees) = spanning_trees(case)?;
    let best = trees.iter().map(|t| t.weight).max().unwrap_or(0);
    let mut junction = 0;
    for t in &trees {
        if (t.weight == best) != t.is_junction_tree {
            return Err(format!(
                "tree {:?} has weight {} (max {best}) but junction property {}",
                t.links, t.weight, t.is_junction_tree
            ));
        }
        let tree = t.to_tree(&jg).map_err(|e| e.to_string())?;
        if verify_junction_property(&tree).holds() != t.is_junction_tree {
            return Err(format!("junction checks disagree on tree {:?}", t.links));
        }
        junction += usize::from(t.is_junction_tree);
    }
    Ok(format!(
        "{} cliques, {} spanning trees, {junction} of weight {best}",
        jg.cliques.len(),
        trees.len()
    ))
}

/// All maximal-weight spanning trees carry the same separators, with
/// multiplicity.
pub fn check_separator_multisets(case: &ChordalCase) -> Result<String, String> {
    let (jg, trees) = spanning_trees(case)?;
    let best = trees.iter().map(|t| t.weight).max().unwrap_or(0);
    let mut optimal = trees.iter().filter(|t| t.weight == best);
    let first = optimal.next().ok_or("no spanning tree")?.separators(&jg);
    for t in optimal {
        if t.separators(&jg) != first {
            return Err(format!(
                "trees {:?} and another maximal tree differ in separators",
                t.links
            ));
        }
    }
    Ok(format!("{} separators", first.len()))
}

/// The greedy trees reach (max weight, min cost among max-weight trees).
pub fn check_cheapest_tree(case: &ChordalCase) -> Result<String, String> {
    let (jg, trees) = spanning_trees(case)?;
    let best = trees.iter().map(|t| t.weight).max().unwrap_or(0);
    let cheapest = trees
        .iter()
        .filter(|t| t.weight == best)
        .map(|t| t.cost)
        .min()
        .unwrap_or(0);
    for (name, tree) in [
        ("kruskal", kruskal_min_cost_tree(&jg)),
        ("prim", prim_min_cost_tree(&jg)),
    ] {
        let tree = tree.map_err(|e| e.to_string())?;
        if (tree.total_weight, tree.total_cost) != (best, cheapest) {
            return Err(format!(
                "{name} tree has (weight, cost) = ({}, {}), optimum ({best}, {cheapest})",
                tree.total_weight, tree.total_cost
            ));
        }
    }
    Ok(format!("weight {best}, cost {cheapest}"))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn tables_close(a: &Potential, b: &Potential, rel: f64) -> bool {
    a.scope() == b.scope()
        && a.table()
            .iter()
            .zip(b.table())
            .all(|(&x, &y)| close(x, y, rel))
}

/// Every clique and separator table equals the joint marginal (1e-9
/// relative), the tree is calibrated and a second pass changes nothing
/// (1e-12 relative), and every clique gives the same variable marginals
/// (1e-12 absolute).
pub fn check_propagation(m: &RandomModel, ev: &Evidence) -> Result<String, String> {
    let joint = joint_from_factors(&m.universe, &m.factors)
        .and_then(|j| j.with_evidence(ev))
        .map_err(|e| e.to_string())?;
    let g = m.graph();
    let tri = triangulate_heuristic(&g).map_err(|e| e.to_string())?;
    let jg = build_junction_graph(
        &m.universe,
        crate::graph::cliques(&tri.graph).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let tree = kruskal_min_cost_tree(&jg).map_err(|e| e.to_string())?;
    let mut state = assign_factors(&m.universe, &m.factors, &tree).map_err(|e| e.to_string())?;
    match propagate(&mut state, ev) {
        Err(Error::ImpossibleEvidence) if joint.total() == 0.0 => {
            return Ok("impossible evidence detected".into())
        }
        Err(e) => return Err(e.to_string()),
        Ok(()) if joint.total() == 0.0 => return Err("impossible evidence went undetected".into()),
        Ok(()) => {}
    }
    let truth = |s: &VarSet| oracle_marginal(&joint, s).map_err(|e| e.to_string());
    for (i, p) in state.clique_potentials().iter().enumerate() {
        if !tables_close(p, &truth(p.scope())?, 1e-9) {
            return Err(format!(
                "clique {i} over {} differs from the joint marginal",
                p.scope()
            ));
        }
    }
    for (i, p) in state.separator_potentials().iter().enumerate() {
        if !tables_close(p, &truth(p.scope())?, 1e-9) {
            return Err(format!(
                "separator {i} over {} differs from the joint marginal",
                p.scope()
            ));
        }
    }
    for (i, l) in tree.links.iter().enumerate() {
        let s = state.separator_potential(i);
        for c in [l.a, l.b] {
            let proj = crate::propagation::marginalize(state.clique_potential(c), s.scope())
                .map_err(|e| e.to_string())?;
            if !tables_close(&proj, s, 1e-12) {
                return Err(format!("link {i} is not calibrated at clique {c}"));
            }
        }
    }
    for v in 0..m.universe.len() {
        let reference = query_marginal(&state, v).map_err(|e| e.to_string())?;
        for (c, clique) in tree
            .cliques
            .iter()
            .enumerate()
            .filter(|(_, c)| c.vars.contains(v))
        {
            let other = state.query_marginal_from(v, c).map_err(|e| e.to_string())?;
            if reference
                .iter()
                .zip(&other)
                .any(|(x, y)| (x - y).abs() > 1e-12)
            {
                return Err(format!("marginal of {v} from clique {} differs", clique.id));
            }
        }
    }
    let before = state.clone();
    propagate(&mut state, &Evidence::new()).map_err(|e| e.to_string())?;
    let stable = before
        .clique_potentials()
        .iter()
        .zip(state.clique_potentials())
        .all(|(a, b)| tables_close(a, b, 1e-12))
        && before
            .separator_potentials()
            .iter()
            .zip(state.separator_potentials())
            .all(|(a, b)| tables_close(a, b, 1e-12));
    if !stable {
        return Err("a second propagation changed the tables".into());
    }
    Ok(format!(
        "{} variables, {} cliques, {} findings",
        m.universe.len(),
        tree.cliques.len(),
        ev.len()
    ))
}

/// Almond tree marginals equal junction tree marginals (1e-12 absolute);
/// the Almond tree needs strictly fewer marginalizations whenever a
/// separator repeats, and its propagation performs exactly the budgeted
/// count; each separator node keeps one table fewer than its degree; and
/// the built tree has minimal cost among all Almond trees when those are
/// few enough to enumerate.
pub fn check_almond(m: &RandomModel, ev: &Evidence) -> Result<String, String> {
    let g = m.graph();
    let tri = triangulate_heuristic(&g).map_err(|e| e.to_string())?;
    let jg = build_junction_graph(
        &m.universe,
        crate::graph::cliques(&tri.graph).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let tree = kruskal_min_cost_tree(&jg).map_err(|e| e.to_string())?;
    let seps = separator_multiset(&tree);
    let almond = build_almond_tree(&tree.cliques, &seps).map_err(|e| e.to_string())?;

    let jt_budget = marginalization_budget(&tree);
    let a_budget = marginalization_budget(&almond);
    let repeated = seps.max_multiplicity() >= 2;
    if repeated && a_budget.marginalizations >= jt_budget.marginalizations {
        return Err(format!(
            "repeated separator but {} Almond marginalizations vs {}",
            a_budget.marginalizations, jt_budget.marginalizations
        ));
    }
    if !repeated && a_budget.marginalizations != jt_budget.marginalizations {
        return Err(format!(
            "no repeated separator but {} Almond marginalizations vs {}",
            a_budget.marginalizations, jt_budget.marginalizations
        ));
    }

    if jg.cliques.len() <= 8 {
        if let Ok(all) = enumerate_almond_trees(&tree.cliques, &seps) {
            let min = all
                .iter()
                .map(|t| t.total_cost())
                .min()
                .ok_or("no Almond tree enumerated")?;
            if almond.total_cost() != min {
                return Err(format!(
                    "Almond tree cost {} exceeds the minimum {min}",
                    almond.total_cost()
                ));
            }
        }
    }

    let mut state = assign_factors(&m.universe, &m.factors, &tree).map_err(|e| e.to_string())?;
    let jt = propagate(&mut state, ev);
    let cal = propagate_almond(&m.universe, &almond, &m.factors, ev);
    let cal = match (jt, cal) {
        (Err(Error::ImpossibleEvidence), Err(Error::ImpossibleEvidence)) => {
            return Ok("impossible evidence detected by both".into())
        }
        (Ok(()), Ok(cal)) => cal,
        (a, b) => {
            return Err(format!(
                "junction tree gave {a:?}, Almond tree gave {:?}",
                b.map(|_| ())
            ))
        }
    };
    if state.stats().marginalizations != jt_budget.marginalizations {
        return Err(format!(
            "junction tree propagation marginalized {} times, budget {}",
            state.stats().marginalizations,
            jt_budget.marginalizations
        ));
    }
    if cal.stats.marginalizations != a_budget.marginalizations {
        return Err(format!(
            "Almond propagation marginalized {} times, budget {}",
            cal.stats.marginalizations, a_budget.marginalizations
        ));
    }
    for s in almond.separator_nodes() {
        if cal.stored_tables[s] != almond.degree(s) - 1 {
            return Err(format!(
                "separator node {s} of degree {} stored {} tables",
                almond.degree(s),
                cal.stored_tables[s]
            ));
        }
    }
    for v in 0..m.universe.len() {
        let a = cal.query_marginal(v).map_err(|e| e.to_string())?;
        let b = query_marginal(&state, v).map_err(|e| e.to_string())?;
        if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-12) {
            return Err(format!(
                "marginal of variable {v}: Almond {a:?}, junction tree {b:?}"
            ));
        }
    }
    Ok(format!(
        "marginalizations {} vs {}, stored tables {} vs {}",
        a_budget.marginalizations,
        jt_budget.marginalizations,
        a_budget.stored_separator_tables,
        jt_budget.stored_separator_tables
    ))
}

/// Random connected graph on 4 to 8 binary variables.
pub fn triangulation_case(seed: u64, index: usize) -> UndirectedGraph {
    let mut rng = case_rng(seed, index as u64);
    let n = rand::Rng::gen_range(&mut rng, 4..=8);
    let density = rand::Rng::gen_range(&mut rng, 0.0..0.5);
    random_connected_graph(&mut rng, std::sync::Arc::new(Universe::binary(n)), density)
}

/// The heuristic yields a chordal graph with no fewer fill-ins than the
/// exhaustive optimum, and exhaustive search attains the oracle minimum for
/// both objectives.
pub fn check_triangulation(g: &UndirectedGraph) -> Result<String, String> {
    let h = triangulate_heuristic(g).map_err(|e| e.to_string())?;
    if !is_chordal(&h.graph).is_chordal() {
        return Err("heuristic output is not chordal".into());
    }
    let best = min_fill(g).map_err(|e| e.to_string())?;
    if h.fill_count() < best {
        return Err(format!(
            "heuristic fill {} below the optimum {best}",
            h.fill_count()
        ));
    }
    let opt = triangulate_optimal(g, Objective::FillIn).map_err(|e| e.to_string())?;
    if opt.fill_count() != best {
        return Err(format!(
            "exhaustive fill {} but oracle minimum {best}",
            opt.fill_count()
        ));
    }
    let best_weight = min_clique_weight(g).map_err(|e| e.to_string())?;
    let opt_w = triangulate_optimal(g, Objective::CliqueWeight).map_err(|e| e.to_string())?;
    if opt_w.total_clique_weight != best_weight {
        return Err(format!(
            "exhaustive clique weight {} but oracle minimum {best_weight}",
            opt_w.total_clique_weight
        ));
    }
    Ok(format!("fill {} (optimum {best})", h.fill_count()))
}

/// The local scheme on the cycle edges misses the constraint the evidence
/// creates, while a triangulated scheme and junction tree propagation find
/// it; the cycle scheme's graph hides no triangulation.
pub fn check_cycle_counterexample(n: usize) -> Result<Vec<String>, String> {
    let inst = build_cycle_counterexample(n).map_err(|e| e.to_string())?;
    let query = inst.scopes[inst.query_scope].clone();
    let names: Vec<String> = query
        .iter()
        .map(|v| inst.universe.variables()[v].name.clone())
        .collect();
    let label = format!("Pos'({})", names.join(","));
    let joint = joint_pos(&inst.universe, &inst.updated_relations()).map_err(|e| e.to_string())?;
    let truth = oracle_marginal(&joint, &query).map_err(|e| e.to_string())?;
    let truth = crate::pos::pos_of(&truth);
    let identity = PosRelation::equality(query.as_slice()[0], query.as_slice()[1], 2);
    if truth != identity {
        return Err(format!(
            "{label} by enumeration is {:?}, expected the identity",
            truth.bits()
        ));
    }

    let local = fixpoint_local_propagation(&inst.scheme(), inst.updated_relations())
        .map_err(|e| e.to_string())?;
    let local_q = &local.relations[inst.query_scope];
    if local_q.bits() != vec![1; 4] {
        return Err(format!(
            "local fixpoint left {label} = {:?}, expected all ones",
            local_q.bits()
        ));
    }

    let (scheme, rels) = triangulated_scheme(&inst).map_err(|e| e.to_string())?;
    let tri = fixpoint_local_propagation(&scheme, rels).map_err(|e| e.to_string())?;
    let home = scheme
        .scopes
        .iter()
        .position(|s| query.is_subset(s))
        .ok_or("query scope uncovered")?;
    let tri_q = tri.relations[home]
        .project(&query)
        .map_err(|e| e.to_string())?;
    if tri_q != truth {
        return Err(format!(
            "triangulated scheme gives {label} = {:?}",
            tri_q.bits()
        ));
    }
    let jt_q = junction_tree_projection(&inst).map_err(|e| e.to_string())?;
    if jt_q != truth {
        return Err(format!("junction tree gives {label} = {:?}", jt_q.bits()));
    }

    let g = inst.graph();
    let w = check_hidden_triangulation(&g, &inst.scheme()).map_err(|e| e.to_string())?;
    let cycle = match (w.contains_triangulation, &w.chordless_cycle) {
        (false, Some(c)) if c.len() == n => c.clone(),
        _ => return Err(format!("cycle scopes: unexpected verdict {w:?}")),
    };
    if !check_hidden_triangulation(&g, &scheme)
        .map_err(|e| e.to_string())?
        .contains_triangulation
    {
        return Err("triangulated scopes reported without a triangulation".into());
    }
    let cycle_names: Vec<&str> = cycle
        .iter()
        .map(|&v| inst.universe.variables()[v].name.as_str())
        .collect();
    Ok(vec![
        format!(
            "n = {n}: {label} local fixpoint {:?} after {} rounds",
            local_q.bits(),
            local.rounds
        ),
        format!(
            "n = {n}: {label} by enumeration {:?}, junction tree {:?}, triangulated scheme {:?}",
            truth.bits(),
            jt_q.bits(),
            tri_q.bits()
        ),
        format!(
            "n = {n}: cycle scopes hide no triangulation; chordless cycle ({})",
            cycle_names.join(",")
        ),
    ])
}

fn run_cases<F>(cases: usize, check: F) -> (Vec<CaseFailure>, Vec<String>)
where
    F: Fn(usize) -> Result<String, (String, Option<ModelFile>)> + Sync,
{
    let outcomes: Vec<_> = (0..cases).into_par_iter().map(&check).collect();
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (case, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(note) => notes.push(format!("case {case}: {note}")),
            Err((message, replay)) => failures.push(CaseFailure {
                case,
                message,
                replay,
            }),
        }
    }
    (failures, notes)
}

/// Runs `cases` random cases of a suite (the fixed cycle lengths 4, 5 and 6
/// for [`Suite::CycleCounterexample`], unless `cases` is zero).
pub fn run_suite(suite: Suite, seed: u64, cases: usize) -> SuiteReport {
    let (failures, notes) = match suite {
        Suite::MaxWeightTrees | Suite::SeparatorMultisets | Suite::CheapestTree => {
            run_cases(cases, |i| {
                let case = chordal_case(seed, i);
                let r = match suite {
                    Suite::MaxWeightTrees => check_max_weight_trees(&case),
                    Suite::SeparatorMultisets => check_separator_multisets(&case),
                    _ => check_cheapest_tree(&case),
                };
                r.map_err(|e| (e, Some(chordal_replay(&case))))
            })
        }
        Suite::Propagation | Suite::Almond => run_cases(cases, |i| {
            let (m, ev) = model_case(seed, i);
            let r = if suite == Suite::Propagation {
                check_propagation(&m, &ev)
            } else {
                check_almond(&m, &ev)
            };
            r.map_err(|e| {
                (
                    format!("{e} (evidence {:?})", ev.iter().collect::<Vec<_>>()),
                    Some(model_replay(&m)),
                )
            })
        }),
        Suite::Triangulation => {
            let (mut failures, mut notes) = (Vec::new(), Vec::new());
            if cases > 0 {
                for n in 4..=6 {
                    let g = UndirectedGraph::cycle(n);
                    let h = triangulate_heuristic(&g).map(|t| t.fill_count());
                    match (h, min_fill(&g)) {
                        (Ok(h), Ok(best)) if h == best => {
                            notes.push(format!("C{n}: heuristic fill {h} = optimum"))
                        }
                        (h, best) => failures.push(CaseFailure {
                            case: usize::MAX,
                            message: format!("C{n}: heuristic {h:?}, optimum {best:?}"),
                            replay: Some(graph_replay(&g)),
                        }),
                    }
                }
            }
            let (f, n) = run_cases(cases, |i| {
                let g = triangulation_case(seed, i);
                check_triangulation(&g).map_err(|e| (e, Some(graph_replay(&g))))
            });
            failures.extend(f);
            notes.extend(n);
            (failures, notes)
        }
        Suite::CycleCounterexample => {
            let (mut failures, mut notes) = (Vec::new(), Vec::new());
            if cases > 0 {
                for (case, n) in (4..=6).enumerate() {
                    match check_cycle_counterexample(n) {
                        Ok(lines) => notes.extend(lines),
                        Err(message) => failures.push(CaseFailure {
                            case,
                            message,
                            replay: None,
                        }),
                    }
                }
            }
            (failures, notes)
        }
    };
    SuiteReport {
        suite,
        seed,
        cases: match suite {
            Suite::CycleCounterexample if cases > 0 => 3,
            _ => cases,
        },
        failures,
        notes,
    }
}
