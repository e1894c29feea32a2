use crate::error::{Error, Result};
use crate::graph::{Universe, VarId};
use crate::varset::VarSet;

/// Dense nonnegative table over the configurations of a sorted scope.
///
/// Configurations are laid out row-major over the scope in ascending variable
/// id, with the last variable varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    scope: VarSet,
    cards: Vec<usize>,
    table: Vec<f64>,
}

impl Potential {
    /// Validates length, entries (finite, nonnegative) and that the table
    /// does not vanish everywhere.
    pub fn new(scope: VarSet, cards: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        if cards.len() != scope.len() {
            return Err(Error::InvalidPotential(format!(
                "{} cardinalities for a scope of {} variables",
                cards.len(),
                scope.len()
            )));
        }
        if cards.contains(&0) {
            return Err(Error::InvalidPotential("zero cardinality".into()));
        }
        let size = cards
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .ok_or(Error::ModelTooLarge)?;
        if table.len() != size {
            return Err(Error::InvalidPotential(format!(
                "table over {scope} has {} entries, expected {size}",
                table.len()
            )));
        }
        if let Some(i) = table.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidPotential(format!(
                "entry {i} is {} (must be finite and nonnegative)",
                table[i]
            )));
        }
        if table.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidPotential(format!(
                "table over {scope} is all zero"
            )));
        }
        Ok(Potential {
            scope,
            cards,
            table,
        })
    }

    /// Like [`Potential::new`], taking cardinalities from the universe.
    pub fn over(universe: &Universe, scope: VarSet, table: Vec<f64>) -> Result<Self> {
        universe.check(&scope)?;
        let cards = universe.cardinalities(&scope);
        Potential::new(scope, cards, table)
    }

    /// The all-ones potential.
    pub fn neutral(scope: VarSet, cards: Vec<usize>) -> Self {
        let size = cards.iter().product();
        Potential {
            scope,
            cards,
            table: vec![1.0; size],
        }
    }

    /// Skips validation; results of table operations may legitimately vanish.
    pub(crate) fn from_raw(scope: VarSet, cards: Vec<usize>, table: Vec<f64>) -> Self {
        debug_assert_eq!(table.len(), cards.iter().product::<usize>());
        Potential {
            scope,
            cards,
            table,
        }
    }

    pub fn scope(&self) -> &VarSet {
        &self.scope
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn into_table(self) -> Vec<f64> {
        self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.table.iter().sum()
    }

    pub fn cardinality_of(&self, v: VarId) -> Option<usize> {
        self.scope.position(v).map(|i| self.cards[i])
    }

    /// The table scaled to sum to one, or `None` if it sums to zero.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        let z = self.sum();
        (z > 0.0).then(|| self.table.iter().map(|x| x / z).collect())
    }

    /// Cardinalities of `sub` as seen by this potential; errors if `sub` is
    /// not contained in the scope or the cardinalities disagree.
    fn check_sub(&self, sub: &VarSet, sub_cards: Option<&[usize]>, what: &str) -> Result<()> {
        if !sub.is_subset(&self.scope) {
            return Err(Error::ScopeMismatch(format!(
                "{what}: {sub} is not contained in {}",
                self.scope
            )));
        }
        if let Some(sc) = sub_cards {
            for (v, &c) in sub.iter().zip(sc) {
                if self.cardinality_of(v) != Some(c) {
                    return Err(Error::ScopeMismatch(format!(
                        "{what}: variable {v} has cardinality {c}, expected {:?}",
                        self.cardinality_of(v)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// For every configuration of `scope` (in table order), the index of its
/// restriction to `sub` in a table over `sub`. `sub` must be a subset.
pub(crate) fn projection_index(scope: &VarSet, cards: &[usize], sub: &VarSet) -> Vec<usize> {
    let k = scope.len();
    // stride in the sub-table of each scope variable (0 when projected out)
    let mut sub_stride = vec![0usize; k];
    let mut stride = 1;
    for (i, v) in scope.iter().enumerate().rev() {
        if sub.contains(v) {
            sub_stride[i] = stride;
            stride *= cards[i];
        }
    }
    let size: usize = cards.iter().product();
    let mut out = Vec::with_capacity(size);
    let mut digits = vec![0usize; k];
    let mut idx = 0usize;
    for _ in 0..size {
        out.push(idx);
        for i in (0..k).rev() {
            digits[i] += 1;
            idx += sub_stride[i];
            if digits[i] < cards[i] {
                break;
            }
            idx -= sub_stride[i] * cards[i];
            digits[i] = 0;
        }
    }
    out
}

fn finite(p: Potential) -> Result<Potential> {
    if p.table.iter().all(|x| x.is_finite()) {
        Ok(p)
    } else {
        Err(Error::NumericOverflow)
    }
}

/// Pointwise product of `p` with `q` broadcast over `p`'s scope. Requires
/// `scope(q) ⊆ scope(p)`.
pub fn multiply(p: &Potential, q: &Potential) -> Result<Potential> {
    p.check_sub(&q.scope, Some(&q.cards), "multiply")?;
    let idx = projection_index(&p.scope, &p.cards, &q.scope);
    let table = p
        .table
        .iter()
        .zip(idx)
        .map(|(&x, j)| x * q.table[j])
        .collect();
    finite(Potential::from_raw(p.scope.clone(), p.cards.clone(), table))
}

/// Sums out every variable not in `target`. Requires `target ⊆ scope(p)`.
pub fn marginalize(p: &Potential, target: &VarSet) -> Result<Potential> {
    p.check_sub(target, None, "marginalize")?;
    let cards: Vec<usize> = target
        .iter()
        .map(|v| p.cardinality_of(v).expect("checked subset"))
        .collect();
    let mut table = vec![0.0; cards.iter().product()];
    for (&x, j) in p
        .table
        .iter()
        .zip(projection_index(&p.scope, &p.cards, target))
    {
        table[j] += x;
    }
    finite(Potential::from_raw(target.clone(), cards, table))
}

/// Pointwise quotient over a common scope with `0 / 0 = 0`. A positive entry
/// over a zero is an inconsistency.
pub fn divide(num: &Potential, den: &Potential) -> Result<Potential> {
    if num.scope != den.scope || num.cards != den.cards {
        return Err(Error::ScopeMismatch(format!(
            "divide: {} over {}",
            num.scope, den.scope
        )));
    }
    let table = num
        .table
        .iter()
        .zip(&den.table)
        .enumerate()
        .map(|(i, (&n, &d))| {
            if d != 0.0 {
                Ok(n / d)
            } else if n == 0.0 {
                Ok(0.0)
            } else {
                Err(Error::Inconsistent { configuration: i })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    finite(Potential::from_raw(
        num.scope.clone(),
        num.cards.clone(),
        table,
    ))
}
