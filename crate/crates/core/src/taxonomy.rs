//! WordNet-style category hierarchy with inheritable semantic properties.
//!
//! A predicate that is gated on a property (for example `cooked` on
//! `cookable`) applies to a category when that category or any of its
//! ancestors carries the property. Multiple parents are allowed; the
//! ancestor set is the union over all parent paths.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use crate::syntax::{CategoryName, ConstantName, DomainDefinition, ParamKind, PredicateSignature, Property};

pub const TAXONOMY_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaxonomyError {
    #[error("unknown category `{0}`")]
    UnknownCategory(CategoryName),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("synset `{0}` defined more than once")]
    DuplicateSynset(CategoryName),
    #[error("synset `{child}` names unknown parent `{parent}`")]
    UnresolvedParent {
        child: CategoryName,
        parent: CategoryName,
    },
    #[error("cycle in category hierarchy through `{0}`")]
    Cycle(CategoryName),
    #[error("unsupported taxonomy_version {0} (expected {TAXONOMY_VERSION})")]
    UnsupportedVersion(u32),
    #[error("malformed taxonomy file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Synset {
    pub name: CategoryName,
    #[serde(default)]
    pub parents: Vec<CategoryName>,
    #[serde(default)]
    pub properties: BTreeSet<Property>,
}

#[derive(Debug, Clone)]
pub struct Taxonomy {
    synsets: BTreeMap<CategoryName, Synset>,
    // Reflexive ancestor closure.
    ancestors: BTreeMap<CategoryName, BTreeSet<CategoryName>>,
    inherited: BTreeMap<CategoryName, BTreeSet<Property>>,
}

#[derive(Deserialize)]
struct TaxonomyFile {
    taxonomy_version: u32,
    #[serde(default)]
    synset: Vec<Synset>,
}

impl Taxonomy {
    pub fn new(synsets: impl IntoIterator<Item = Synset>) -> Result<Self, TaxonomyError> {
        let mut map = BTreeMap::new();
        for s in synsets {
            if map.contains_key(&s.name) {
                return Err(TaxonomyError::DuplicateSynset(s.name));
            }
            map.insert(s.name.clone(), s);
        }
        for s in map.values() {
            if let Some(p) = s.parents.iter().find(|p| !map.contains_key(*p)) {
                return Err(TaxonomyError::UnresolvedParent {
                    child: s.name.clone(),
                    parent: p.clone(),
                });
            }
        }

        // Depth-first post-order; a grey node reached again closes a cycle.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Grey,
            Black,
        }
        fn visit(
            name: &CategoryName,
            map: &BTreeMap<CategoryName, Synset>,
            marks: &mut BTreeMap<CategoryName, Mark>,
            ancestors: &mut BTreeMap<CategoryName, BTreeSet<CategoryName>>,
        ) -> Result<(), TaxonomyError> {
            match marks.get(name) {
                Some(Mark::Black) => return Ok(()),
                Some(Mark::Grey) => return Err(TaxonomyError::Cycle(name.clone())),
                None => {}
            }
            marks.insert(name.clone(), Mark::Grey);
            let mut closure = BTreeSet::from([name.clone()]);
            for p in &map[name].parents {
                visit(p, map, marks, ancestors)?;
                closure.extend(ancestors[p].iter().cloned());
            }
            marks.insert(name.clone(), Mark::Black);
            ancestors.insert(name.clone(), closure);
            Ok(())
        }

        let mut marks = BTreeMap::new();
        let mut ancestors = BTreeMap::new();
        for name in map.keys() {
            visit(name, &map, &mut marks, &mut ancestors)?;
        }
        let inherited = ancestors
            .iter()
            .map(|(name, ancs)| {
                let props = ancs
                    .iter()
                    .flat_map(|a| map[a].properties.iter().cloned())
                    .collect();
                (name.clone(), props)
            })
            .collect();
        Ok(Taxonomy {
            synsets: map,
            ancestors,
            inherited,
        })
    }

    /// Loads the TOML fixture format (`taxonomy_version` plus `[[synset]]` tables).
    pub fn from_toml(text: &str) -> Result<Self, TaxonomyError> {
        let file: TaxonomyFile =
            toml::from_str(text).map_err(|e| TaxonomyError::Format(e.to_string()))?;
        if file.taxonomy_version != TAXONOMY_VERSION {
            return Err(TaxonomyError::UnsupportedVersion(file.taxonomy_version));
        }
        Taxonomy::new(file.synset)
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn contains(&self, cat: &CategoryName) -> bool {
        self.synsets.contains_key(cat)
    }

    pub fn synset(&self, cat: &CategoryName) -> Option<&Synset> {
        self.synsets.get(cat)
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    fn closure(&self, cat: &CategoryName) -> Result<&BTreeSet<CategoryName>, TaxonomyError> {
        self.ancestors
            .get(cat)
            .ok_or_else(|| TaxonomyError::UnknownCategory(cat.clone()))
    }

    /// Reflexive, transitive reachability along parent edges.
    pub fn is_a(&self, child: &CategoryName, ancestor: &CategoryName) -> Result<bool, TaxonomyError> {
        if !self.contains(ancestor) {
            return Err(TaxonomyError::UnknownCategory(ancestor.clone()));
        }
        Ok(self.closure(child)?.contains(ancestor))
    }

    /// Properties carried by `cat` or any ancestor.
    pub fn properties(&self, cat: &CategoryName) -> Result<&BTreeSet<Property>, TaxonomyError> {
        self.inherited
            .get(cat)
            .ok_or_else(|| TaxonomyError::UnknownCategory(cat.clone()))
    }

    pub fn has_property(&self, cat: &CategoryName, prop: &str) -> Result<bool, TaxonomyError> {
        Ok(self.properties(cat)?.iter().any(|p| p.as_str() == prop))
    }

    /// Whether `pred` may be applied to an object of category `cat`.
    /// Ungated predicates apply to every category.
    pub fn applicable(
        &self,
        pred: &str,
        cat: &CategoryName,
        domain: &DomainDefinition,
    ) -> Result<bool, TaxonomyError> {
        let sig = domain
            .predicate(pred)
            .ok_or_else(|| TaxonomyError::UnknownPredicate(pred.to_string()))?;
        let props = self.properties(cat)?;
        Ok(sig.required_property().is_none_or(|p| props.contains(p)))
    }

    /// Checks every object argument's gate; `None` marks a room argument.
    pub fn applicable_to_args(
        &self,
        sig: &PredicateSignature,
        cats: &[Option<&CategoryName>],
    ) -> Result<bool, TaxonomyError> {
        for (kind, cat) in sig.params.iter().zip(cats) {
            if let (ParamKind::Object(gate), Some(cat)) = (kind, cat) {
                let props = self.properties(cat)?;
                if let Some(gate) = gate {
                    if !props.contains(gate) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Constants whose declared category is `cat` or a descendant, in declaration order.
    pub fn instances_of<'a>(
        &self,
        cat: &CategoryName,
        objects: &'a [(ConstantName, CategoryName)],
    ) -> Result<Vec<&'a ConstantName>, TaxonomyError> {
        if !self.contains(cat) {
            return Err(TaxonomyError::UnknownCategory(cat.clone()));
        }
        let mut out = Vec::new();
        for (constant, declared) in objects {
            if self.closure(declared)?.contains(cat) {
                out.push(constant);
            }
        }
        Ok(out)
    }
}
