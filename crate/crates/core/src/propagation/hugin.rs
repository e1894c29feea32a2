use super::{divide, marginalize, multiply, Evidence, Potential, PropagationStats, Schedule};
use crate::error::{Error, Result};
use crate::graph::{Universe, VarId};
use crate::junction::{Clique, JunctionTree};
use crate::varset::VarSet;

/// Clique and separator potentials over a junction tree.
#[derive(Clone, Debug)]
pub struct JunctionState {
    tree: JunctionTree,
    cards: Vec<usize>,
    cliques: Vec<Potential>,
    separators: Vec<Potential>,
    schedule: Schedule,
    stats: PropagationStats,
}

/// Lowest-id clique containing `scope`.
pub(crate) fn home_clique(cliques: &[Clique], scope: &VarSet) -> Option<usize> {
    cliques.iter().position(|c| scope.is_subset(&c.vars))
}

/// Clique with the largest table, lowest id on ties.
pub(crate) fn largest_clique(cliques: &[Clique]) -> usize {
    cliques
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.table_size.cmp(&b.table_size).then(j.cmp(i)))
        .map_or(0, |(i, _)| i)
}

pub(crate) fn check_factor(universe: &Universe, f: &Potential) -> Result<()> {
    universe.check(f.scope())?;
    if universe.cardinalities(f.scope()) != f.cardinalities() {
        return Err(Error::ScopeMismatch(format!(
            "factor over {} disagrees with the universe cardinalities",
            f.scope()
        )));
    }
    Ok(())
}

/// Multiplies each factor into the lowest-id clique containing its scope;
/// every other table starts neutral.
pub fn assign_factors(
    universe: &Universe,
    factors: &[Potential],
    tree: &JunctionTree,
) -> Result<JunctionState> {
    let cards: Vec<usize> = universe.variables().iter().map(|v| v.cardinality).collect();
    let mut cliques: Vec<Potential> = tree
        .cliques
        .iter()
        .map(|c| Potential::neutral(c.vars.clone(), universe.cardinalities(&c.vars)))
        .collect();
    for f in factors {
        check_factor(universe, f)?;
        let home = home_clique(&tree.cliques, f.scope())
            .ok_or_else(|| Error::FactorNotCovered(f.scope().clone()))?;
        cliques[home] = multiply(&cliques[home], f)?;
    }
    let separators = tree
        .links
        .iter()
        .map(|l| {
            Potential::neutral(
                l.separator.vars.clone(),
                universe.cardinalities(&l.separator.vars),
            )
        })
        .collect();
    let adjacency: Vec<Vec<usize>> = tree
        .adjacency()
        .into_iter()
        .map(|n| n.into_iter().map(|(c, _)| c).collect())
        .collect();
    let schedule = Schedule::two_pass(&adjacency, largest_clique(&tree.cliques));
    Ok(JunctionState {
        tree: tree.clone(),
        cards,
        cliques,
        separators,
        schedule,
        stats: PropagationStats::default(),
    })
}

impl JunctionState {
    pub fn tree(&self) -> &JunctionTree {
        &self.tree
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn clique_potential(&self, clique: usize) -> &Potential {
        &self.cliques[clique]
    }

    pub fn clique_potentials(&self) -> &[Potential] {
        &self.cliques
    }

    pub fn separator_potential(&self, link: usize) -> &Potential {
        &self.separators[link]
    }

    pub fn separator_potentials(&self) -> &[Potential] {
        &self.separators
    }

    /// Operation counts accumulated over all propagations so far.
    pub fn stats(&self) -> PropagationStats {
        self.stats
    }

    fn link_between(&self, a: usize, b: usize) -> usize {
        self.tree
            .links
            .iter()
            .position(|l| (l.a, l.b) == (a.min(b), a.max(b)))
            .expect("schedule follows tree links")
    }

    /// Absorbs `from` into `to` through their separator.
    fn pass(&mut self, from: usize, to: usize) -> Result<()> {
        let link = self.link_between(from, to);
        let sep = self.tree.links[link].separator.vars.clone();
        let fresh = marginalize(&self.cliques[from], &sep)?;
        let ratio = divide(&fresh, &self.separators[link])?;
        self.cliques[to] = multiply(&self.cliques[to], &ratio)?;
        self.separators[link] = fresh;
        self.stats.marginalizations += 1;
        self.stats.divisions += 1;
        self.stats.multiplications += 1;
        Ok(())
    }

    /// Normalized marginal of `var` computed from a specific clique.
    pub fn query_marginal_from(&self, var: VarId, clique: usize) -> Result<Vec<f64>> {
        let c = self
            .tree
            .cliques
            .get(clique)
            .ok_or_else(|| Error::InvalidInstance(format!("no clique {clique}")))?;
        if !c.vars.contains(var) {
            return Err(Error::ScopeMismatch(format!(
                "variable {var} is not in clique {clique}"
            )));
        }
        marginalize(&self.cliques[clique], &VarSet::singleton(var))?
            .normalized()
            .ok_or(Error::ImpossibleEvidence)
    }
}

/// Enters `evidence` and runs one collect and one distribute pass. Afterwards
/// every clique and separator table holds the unnormalized marginal of the
/// product of all factors and findings.
///
/// On error the state is left partially updated and should be discarded.
pub fn propagate(state: &mut JunctionState, evidence: &Evidence) -> Result<()> {
    for ind in evidence.indicators(&state.cards)? {
        let home = home_clique(&state.tree.cliques, ind.scope())
            .ok_or_else(|| Error::UnknownVariable(ind.scope().as_slice()[0]))?;
        state.cliques[home] = multiply(&state.cliques[home], &ind)?;
        state.stats.multiplications += 1;
    }
    let schedule = state.schedule.clone();
    for m in schedule.collect() {
        state.pass(m.from, m.to)?;
    }
    if state.cliques[schedule.root].sum() <= 0.0 {
        return Err(Error::ImpossibleEvidence);
    }
    for m in schedule.distribute() {
        state.pass(m.from, m.to)?;
    }
    Ok(())
}

/// Normalized marginal of `var` from the lowest-id clique containing it.
pub fn query_marginal(state: &JunctionState, var: VarId) -> Result<Vec<f64>> {
    let clique = home_clique(&state.tree.cliques, &VarSet::singleton(var))
        .ok_or(Error::UnknownVariable(var))?;
    state.query_marginal_from(var, clique)
}
