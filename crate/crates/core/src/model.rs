//! JSON model files.
//!
//! ```json
//! {
//!   "version": "junctionc/1",
//!   "variables": [{"name": "Rain", "states": ["no", "yes"]}, ...],
//!   "factors": [{"scope": ["Rain", "Wet"], "table": [0.9, 0.1, 0.2, 0.8],
//!                "ordering": "sorted-scope, last-fastest"}],
//!   "dag": [["Rain", "Wet"]]
//! }
//! ```
//!
//! A factor's scope lists variable names in declaration order, and its table
//! runs over their joint states with the last variable varying fastest. The
//! ordering tag is mandatory so files written under another convention are
//! rejected instead of silently misread.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{moralize, Dag, UndirectedGraph, Universe, VarId};
use crate::propagation::{Evidence, Potential};
use crate::varset::VarSet;

pub const FORMAT_VERSION: &str = "junctionc/1";
pub const TABLE_ORDERING: &str = "sorted-scope, last-fastest";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Semantic { field: String, message: String },
}

fn semantic(field: impl Into<String>, message: impl ToString) -> ModelError {
    ModelError::Semantic {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub states: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub scope: Vec<String>,
    pub table: Vec<f64>,
    pub ordering: String,
}

/// The document as written, before names are resolved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: String,
    pub variables: Vec<VariableSpec>,
    pub factors: Vec<FactorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dag: Option<Vec<(String, String)>>,
}

impl ModelFile {
    /// Syntax only; see [`ModelFile::resolve`].
    pub fn parse(text: &str) -> Result<ModelFile, ModelError> {
        serde_json::from_str(text).map_err(|e| {
            // serde_json appends the position, which is reported separately
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            ModelError::Parse {
                line: e.line(),
                column: e.column(),
                message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    pub fn resolve(&self) -> Result<Model, ModelError> {
        if self.version != FORMAT_VERSION {
            return Err(semantic(
                "version",
                format!("expected `{FORMAT_VERSION}`, found `{}`", self.version),
            ));
        }
        for (i, v) in self.variables.iter().enumerate() {
            let mut seen = BTreeSet::new();
            if let Some(s) = v.states.iter().find(|s| !seen.insert(*s)) {
                return Err(semantic(
                    format!("variables[{i}].states"),
                    format!("duplicate state `{s}`"),
                ));
            }
        }
        let universe = Universe::new(
            self.variables
                .iter()
                .map(|v| (v.name.clone(), v.states.len())),
        )
        .map_err(|e| semantic("variables", e))?;
        let universe = Arc::new(universe);
        let lookup = |field: String, name: &str| {
            universe
                .id_of(name)
                .ok_or_else(|| semantic(field, format!("unknown variable `{name}`")))
        };

        let mut factors = Vec::with_capacity(self.factors.len());
        for (i, f) in self.factors.iter().enumerate() {
            if f.ordering != TABLE_ORDERING {
                return Err(semantic(
                    format!("factors[{i}].ordering"),
                    format!("expected `{TABLE_ORDERING}`, found `{}`", f.ordering),
                ));
            }
            let ids = f
                .scope
                .iter()
                .map(|n| lookup(format!("factors[{i}].scope"), n))
                .collect::<Result<Vec<_>, _>>()?;
            if ids.windows(2).any(|w| w[0] >= w[1]) {
                return Err(semantic(
                    format!("factors[{i}].scope"),
                    "variables must be distinct and listed in declaration order",
                ));
            }
            let scope = VarSet::from(ids);
            universe
                .state_space(&scope)
                .map_err(|e| semantic(format!("factors[{i}].scope"), e))?;
            let p = Potential::over(&universe, scope, f.table.clone())
                .map_err(|e| semantic(format!("factors[{i}].table"), e))?;
            factors.push(p);
        }

        let dag = match &self.dag {
            None => None,
            Some(edges) => {
                let ids = edges
                    .iter()
                    .enumerate()
                    .map(|(i, (p, c))| {
                        Ok((
                            lookup(format!("dag[{i}]"), p)?,
                            lookup(format!("dag[{i}]"), c)?,
                        ))
                    })
                    .collect::<Result<Vec<_>, ModelError>>()?;
                Some(Dag::new(universe.clone(), ids).map_err(|e| semantic("dag", e))?)
            }
        };

        Ok(Model {
            universe,
            states: self.variables.iter().map(|v| v.states.clone()).collect(),
            factors,
            dag,
        })
    }
}

/// A resolved, validated model.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub universe: Arc<Universe>,
    /// State labels per variable.
    pub states: Vec<Vec<String>>,
    pub factors: Vec<Potential>,
    pub dag: Option<Dag>,
}

impl std::str::FromStr for Model {
    type Err = ModelError;

    fn from_str(text: &str) -> Result<Model, ModelError> {
        ModelFile::parse(text)?.resolve()
    }
}

impl Model {
    /// A model whose states are labelled by their index.
    pub fn from_parts(universe: Arc<Universe>, factors: Vec<Potential>, dag: Option<Dag>) -> Model {
        let states = universe
            .variables()
            .iter()
            .map(|v| (0..v.cardinality).map(|s| s.to_string()).collect())
            .collect();
        Model {
            universe,
            states,
            factors,
            dag,
        }
    }

    pub fn to_file(&self) -> ModelFile {
        let name = |v: VarId| self.universe.variables()[v].name.clone();
        ModelFile {
            version: FORMAT_VERSION.to_string(),
            variables: self
                .universe
                .variables()
                .iter()
                .map(|v| VariableSpec {
                    name: v.name.clone(),
                    states: self.states[v.id].clone(),
                })
                .collect(),
            factors: self
                .factors
                .iter()
                .map(|f| FactorSpec {
                    scope: f.scope().iter().map(name).collect(),
                    table: f.table().to_vec(),
                    ordering: TABLE_ORDERING.to_string(),
                })
                .collect(),
            dag: self.dag.as_ref().map(|d| {
                d.edges()
                    .into_iter()
                    .map(|(p, c)| (name(p), name(c)))
                    .collect()
            }),
        }
    }

    /// Links variables that share a factor, plus the moral graph of the DAG.
    pub fn markov_graph(&self) -> UndirectedGraph {
        let mut g = match &self.dag {
            Some(d) => moralize(d),
            None => UndirectedGraph::new(self.universe.clone()),
        };
        for f in &self.factors {
            let vs = f.scope().as_slice();
            for (i, &a) in vs.iter().enumerate() {
                for &b in &vs[i + 1..] {
                    g.add_edge(a, b)
                        .expect("scopes hold distinct known variables");
                }
            }
        }
        g
    }

    pub fn variable(&self, name: &str) -> Result<VarId, ModelError> {
        self.universe
            .id_of(name)
            .ok_or_else(|| semantic("evidence", format!("unknown variable `{name}`")))
    }

    /// State of `var` by label, or by index if no label matches.
    pub fn state(&self, var: VarId, label: &str) -> Result<usize, ModelError> {
        let labels = &self.states[var];
        labels
            .iter()
            .position(|l| l == label)
            .or_else(|| label.parse().ok().filter(|&i: &usize| i < labels.len()))
            .ok_or_else(|| {
                semantic(
                    "evidence",
                    format!(
                        "`{label}` is not a state of `{}` (states: {})",
                        self.universe.variables()[var].name,
                        labels.join(", ")
                    ),
                )
            })
    }

    /// Hard findings written `name=state`.
    pub fn parse_evidence<S: AsRef<str>>(&self, items: &[S]) -> Result<Evidence, ModelError> {
        let mut ev = Evidence::new();
        let mut seen = BTreeSet::new();
        for item in items {
            let item = item.as_ref();
            let (name, label) = item.split_once('=').ok_or_else(|| ModelError::Parse {
                line: 1,
                column: 1,
                message: format!("evidence `{item}` is not of the form name=state"),
            })?;
            let var = self.variable(name.trim())?;
            if !seen.insert(var) {
                return Err(semantic(
                    "evidence",
                    format!("`{}` observed twice", name.trim()),
                ));
            }
            ev = ev.with_state(var, self.state(var, label.trim())?);
        }
        Ok(ev)
    }
}
