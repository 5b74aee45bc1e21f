//! Evaluation of quantified goal expressions and goal flattening.

mod eval;
mod flatten;
pub mod matching;

use std::collections::{BTreeMap, BTreeSet};

pub use eval::{evaluate, evaluate_in_state};
pub use flatten::{activity_volume, flatten, GoalOptions, DEFAULT_CAP};

use crate::syntax::{
    AtomicFormula, CategoryName, ConstantName, DomainDefinition, Literal, Term, VariableName,
};
use crate::taxonomy::{Taxonomy, TaxonomyError};
use crate::world::{eval_atomic, FactSet, SceneState, WorldError};

/// Variables bound to constants by enclosing quantifiers.
pub type Binding = BTreeMap<VariableName, ConstantName>;

/// A literal whose formula has no variables.
pub type GroundLiteral = Literal;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LogicError {
    #[error("variable `{0}` is not bound")]
    FreeVariable(VariableName),
    #[error("unknown category `{0}`")]
    UnknownCategory(CategoryName),
    #[error("the goal has no options")]
    NoOptions,
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
}

/// Anything that can decide ground atomic formulas.
pub trait FactSource {
    fn holds(&self, atom: &AtomicFormula) -> Result<bool, LogicError>;
}

impl FactSource for FactSet {
    fn holds(&self, atom: &AtomicFormula) -> Result<bool, LogicError> {
        Ok(self.contains(atom))
    }
}

/// Decides atoms directly against a scene.
pub struct StateFacts<'a> {
    pub state: &'a SceneState,
    pub taxonomy: &'a Taxonomy,
    pub domain: &'a DomainDefinition,
}

impl FactSource for StateFacts<'_> {
    fn holds(&self, atom: &AtomicFormula) -> Result<bool, LogicError> {
        Ok(eval_atomic(self.state, atom, self.taxonomy, self.domain)?)
    }
}

/// The objects quantifiers range over, indexed by every category they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct Universe {
    instances: BTreeMap<CategoryName, Vec<ConstantName>>,
    /// `None` accepts any category (instances default to empty).
    known: Option<BTreeSet<CategoryName>>,
}

impl Universe {
    /// Instances of a category are all objects whose declared category is a
    /// descendant of it, in declaration order.
    pub fn new(
        objects: &[(ConstantName, CategoryName)],
        taxonomy: &Taxonomy,
    ) -> Result<Self, LogicError> {
        let mut instances = BTreeMap::new();
        let mut known = BTreeSet::new();
        for synset in taxonomy.synsets() {
            let found = taxonomy.instances_of(&synset.name, objects)?;
            if !found.is_empty() {
                instances.insert(synset.name.clone(), found.into_iter().cloned().collect());
            }
            known.insert(synset.name.clone());
        }
        for (_, cat) in objects {
            if !known.contains(cat) {
                return Err(LogicError::UnknownCategory(cat.clone()));
            }
        }
        Ok(Universe {
            instances,
            known: Some(known),
        })
    }

    /// Quantifiers match declared categories exactly; no taxonomy involved.
    pub fn exact(objects: &[(ConstantName, CategoryName)]) -> Self {
        let mut instances: BTreeMap<CategoryName, Vec<ConstantName>> = BTreeMap::new();
        for (c, cat) in objects {
            instances.entry(cat.clone()).or_default().push(c.clone());
        }
        Universe {
            instances,
            known: None,
        }
    }

    pub fn instances(&self, cat: &CategoryName) -> Result<&[ConstantName], LogicError> {
        if let Some(found) = self.instances.get(cat) {
            return Ok(found);
        }
        match &self.known {
            Some(known) if !known.contains(cat) => Err(LogicError::UnknownCategory(cat.clone())),
            _ => Ok(&[]),
        }
    }
}

/// Replaces bound variables by their constants.
pub fn substitute(atom: &AtomicFormula, binding: &Binding) -> Result<AtomicFormula, LogicError> {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Variable(v) => binding
                .get(v)
                .map(|c| Term::Constant(c.clone()))
                .ok_or_else(|| LogicError::FreeVariable(v.clone())),
            other => Ok(other.clone()),
        })
        .collect::<Result<_, _>>()?;
    Ok(AtomicFormula {
        predicate: atom.predicate.clone(),
        args,
    })
}

fn restore(b: &mut Binding, v: &VariableName, prev: Option<ConstantName>) {
    match prev {
        Some(c) => b.insert(v.clone(), c),
        None => b.remove(v),
    };
}
