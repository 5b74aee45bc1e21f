//! Typed syntax tree for activity (problem) and domain files.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A WordNet-style synset label, rendered `lemma.pos.NN` (e.g. `apple.n.01`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CategoryName {
    lemma: String,
    pos: char,
    index: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid {what} `{text}`: {reason}")]
pub struct NameError {
    pub what: &'static str,
    pub text: String,
    pub reason: &'static str,
}

impl NameError {
    fn new(what: &'static str, text: &str, reason: &'static str) -> Self {
        NameError {
            what,
            text: text.to_string(),
            reason,
        }
    }
}

impl CategoryName {
    pub fn new(lemma: &str, pos: char, index: u8) -> Result<Self, NameError> {
        let text = format!("{lemma}.{pos}.{index:02}");
        text.parse()
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn pos(&self) -> char {
        self.pos
    }

    pub fn index(&self) -> u8 {
        self.index
    }
}

impl FromStr for CategoryName {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        const WHAT: &str = "category name";
        let mut parts = s.split('.');
        let (Some(lemma), Some(pos), Some(index), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(NameError::new(WHAT, s, "expected `lemma.pos.NN`"));
        };
        if lemma.is_empty()
            || !lemma
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
        {
            return Err(NameError::new(
                WHAT,
                s,
                "lemma must be lowercase ASCII, digits or underscores",
            ));
        }
        let mut pos_chars = pos.chars();
        let pos = match (pos_chars.next(), pos_chars.next()) {
            (Some(c), None) if c.is_ascii_lowercase() => c,
            _ => return Err(NameError::new(WHAT, s, "part of speech must be one letter")),
        };
        if index.len() != 2 || !index.bytes().all(|b| b.is_ascii_digit()) {
            return Err(NameError::new(
                WHAT,
                s,
                "synset index must be two zero-padded digits",
            ));
        }
        Ok(CategoryName {
            lemma: lemma.to_string(),
            pos,
            index: index.parse().expect("two ascii digits"),
        })
    }
}

impl fmt::Display for CategoryName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{:02}", self.lemma, self.pos, self.index)
    }
}

impl TryFrom<String> for CategoryName {
    type Error = NameError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<CategoryName> for String {
    fn from(c: CategoryName) -> String {
        c.to_string()
    }
}

/// An object constant: a category plus a positive instance id, rendered `category_id`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConstantName {
    pub category: CategoryName,
    pub instance: u32,
}

impl ConstantName {
    pub fn new(category: CategoryName, instance: u32) -> Self {
        assert!(instance > 0, "instance ids are positive");
        ConstantName { category, instance }
    }
}

impl FromStr for ConstantName {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let Some((category, id)) = s.rsplit_once('_') else {
            return Err(NameError::new(
                "constant name",
                s,
                "missing `_id` instance suffix",
            ));
        };
        let category = category.parse()?;
        if id.is_empty() || !id.bytes().all(|b| b.is_ascii_digit()) {
            return Err(NameError::new(
                "constant name",
                s,
                "instance suffix must be a positive integer",
            ));
        }
        match id.parse::<u32>() {
            Ok(instance) if instance > 0 => Ok(ConstantName { category, instance }),
            _ => Err(NameError::new(
                "constant name",
                s,
                "instance suffix must be a positive integer",
            )),
        }
    }
}

impl fmt::Display for ConstantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.category, self.instance)
    }
}

impl TryFrom<String> for ConstantName {
    type Error = NameError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ConstantName> for String {
    fn from(c: ConstantName) -> String {
        c.to_string()
    }
}

/// A quantified variable. Variables are named by the category they range over;
/// the `?` sigil belongs to the surface syntax only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableName {
    pub category: CategoryName,
}

impl VariableName {
    pub fn new(category: CategoryName) -> Self {
        VariableName { category }
    }
}

impl fmt::Display for VariableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.category)
    }
}

/// Room names are plain lowercase identifiers (`kitchen`, `living_room`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RoomName(String);

impl RoomName {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for RoomName {
    type Err = NameError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if !s.is_empty()
            && s.bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
        {
            Ok(RoomName(s.to_string()))
        } else {
            Err(NameError::new(
                "room name",
                s,
                "must be lowercase ASCII, digits or underscores",
            ))
        }
    }
}

impl fmt::Display for RoomName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for RoomName {
    type Error = NameError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<RoomName> for String {
    fn from(r: RoomName) -> String {
        r.0
    }
}

/// A predicate argument.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Constant(ConstantName),
    Variable(VariableName),
    /// Room arguments (second slot of `inroom`) name a scene room, not an object.
    Room(RoomName),
}

impl Term {
    pub fn as_constant(&self) -> Option<&ConstantName> {
        match self {
            Term::Constant(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        !matches!(self, Term::Variable(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Constant(c) => c.fmt(f),
            Term::Variable(v) => v.fmt(f),
            Term::Room(r) => r.fmt(f),
        }
    }
}

impl FromStr for Term {
    type Err = NameError;

    /// Classifies a surface token by shape: `?category` is a variable,
    /// `category_id` (with or without a leading `?`) is a constant, and any
    /// other plain identifier is a room.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(body) = s.strip_prefix('?') {
            if let Ok(c) = body.parse::<ConstantName>() {
                return Ok(Term::Constant(c));
            }
            return Ok(Term::Variable(VariableName::new(body.parse()?)));
        }
        if s.contains('.') {
            return Ok(Term::Constant(s.parse()?));
        }
        Ok(Term::Room(s.parse()?))
    }
}

/// Predicate symbol as registered in the domain file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PredicateSymbol(String);

impl PredicateSymbol {
    pub fn new(s: impl Into<String>) -> Self {
        PredicateSymbol(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PredicateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AtomicFormula {
    pub predicate: PredicateSymbol,
    pub args: Vec<Term>,
}

impl AtomicFormula {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        AtomicFormula {
            predicate: PredicateSymbol::new(predicate),
            args,
        }
    }

    /// Convenience constructor for ground formulas over object constants.
    pub fn ground(predicate: &str, args: &[&ConstantName]) -> Self {
        AtomicFormula::new(
            predicate,
            args.iter().map(|c| Term::Constant((*c).clone())).collect(),
        )
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn constants(&self) -> impl Iterator<Item = &ConstantName> {
        self.args.iter().filter_map(Term::as_constant)
    }
}

impl fmt::Display for AtomicFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for AtomicFormula {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| NameError::new("atomic formula", s, "expected `(pred args...)`"))?;
        let mut tokens = inner.split_whitespace();
        let predicate = tokens
            .next()
            .ok_or_else(|| NameError::new("atomic formula", s, "missing predicate"))?;
        let args = tokens.map(str::parse).collect::<Result<Vec<Term>, _>>()?;
        Ok(AtomicFormula::new(predicate, args))
    }
}

impl TryFrom<String> for AtomicFormula {
    type Error = NameError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<AtomicFormula> for String {
    fn from(a: AtomicFormula) -> String {
        a.to_string()
    }
}

/// A possibly negated ground atomic formula.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub formula: AtomicFormula,
    pub negated: bool,
}

impl Literal {
    pub fn positive(formula: AtomicFormula) -> Self {
        Literal {
            formula,
            negated: false,
        }
    }

    pub fn negative(formula: AtomicFormula) -> Self {
        Literal {
            formula,
            negated: true,
        }
    }

    pub fn negate(&self) -> Self {
        Literal {
            formula: self.formula.clone(),
            negated: !self.negated,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "(not {})", self.formula)
        } else {
            self.formula.fmt(f)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Atom(AtomicFormula),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Imply(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    ForAll(VariableName, Box<Expr>),
    Exists(VariableName, Box<Expr>),
    ForN(usize, VariableName, Box<Expr>),
    ForPairs(VariableName, VariableName, Box<Expr>),
    ForNPairs(usize, VariableName, VariableName, Box<Expr>),
}

impl Expr {
    pub fn negate(e: Expr) -> Self {
        Expr::Not(Box::new(e))
    }

    /// Visits every atomic formula in the expression, in source order.
    pub fn atoms(&self) -> Vec<&AtomicFormula> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a AtomicFormula>) {
        match self {
            Expr::Atom(a) => out.push(a),
            Expr::Not(e)
            | Expr::ForAll(_, e)
            | Expr::Exists(_, e)
            | Expr::ForN(_, _, e)
            | Expr::ForPairs(_, _, e)
            | Expr::ForNPairs(_, _, _, e) => e.collect_atoms(out),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.collect_atoms(out)),
            Expr::Imply(a, b) | Expr::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Categories of all quantified variables, outermost first.
    pub fn quantified_categories(&self) -> Vec<&CategoryName> {
        let mut out = Vec::new();
        self.walk(&mut |e| match e {
            Expr::ForAll(v, _) | Expr::Exists(v, _) | Expr::ForN(_, v, _) => {
                out.push(&v.category)
            }
            Expr::ForPairs(a, b, _) | Expr::ForNPairs(_, a, b, _) => {
                out.push(&a.category);
                out.push(&b.category);
            }
            _ => {}
        });
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Atom(_) => {}
            Expr::Not(e)
            | Expr::ForAll(_, e)
            | Expr::Exists(_, e)
            | Expr::ForN(_, _, e)
            | Expr::ForPairs(_, _, e)
            | Expr::ForNPairs(_, _, _, e) => e.walk(f),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.walk(f)),
            Expr::Imply(a, b) | Expr::Iff(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }
}

/// A parsed problem file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityDefinition {
    pub problem_name: String,
    pub domain_name: String,
    pub objects: Vec<(ConstantName, CategoryName)>,
    pub init: Vec<Literal>,
    /// `None` for the degenerate empty goal `(:goal (and))`.
    pub goal: Option<Expr>,
}

impl ActivityDefinition {
    pub fn constants(&self) -> impl Iterator<Item = &ConstantName> {
        self.objects.iter().map(|(c, _)| c)
    }

    pub fn category_of(&self, constant: &ConstantName) -> Option<&CategoryName> {
        self.objects
            .iter()
            .find(|(c, _)| c == constant)
            .map(|(_, cat)| cat)
    }
}

/// A semantic property tag such as `cookable` or `openable`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Property(String);

impl Property {
    pub fn new(s: impl Into<String>) -> Self {
        Property(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamKind {
    /// An object argument, optionally gated on a semantic property of its category.
    Object(Option<Property>),
    Room,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSignature {
    pub symbol: PredicateSymbol,
    pub params: Vec<ParamKind>,
}

impl PredicateSignature {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// The property gate on the first gated argument, if any.
    pub fn required_property(&self) -> Option<&Property> {
        self.params.iter().find_map(|p| match p {
            ParamKind::Object(Some(prop)) => Some(prop),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainDefinition {
    pub name: String,
    pub predicates: Vec<PredicateSignature>,
}

impl DomainDefinition {
    pub fn predicate(&self, symbol: &str) -> Option<&PredicateSignature> {
        self.predicates.iter().find(|p| p.symbol.as_str() == symbol)
    }
}
