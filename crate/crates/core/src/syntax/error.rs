use std::fmt;

/// 1-based line/column of a token in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedCharacter(char),
    #[error("unbalanced parentheses: `(` is never closed")]
    UnbalancedOpen,
    #[error("unbalanced parentheses: unexpected `)`")]
    UnbalancedClose,
    #[error("input after the closing parenthesis of the definition")]
    TrailingInput,
    #[error("empty input")]
    EmptyInput,
    #[error("expected a parenthesized list")]
    ExpectedList,
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unknown section `{0}`")]
    UnknownSection(String),
    #[error("duplicate section `{0}`")]
    DuplicateSection(String),
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{predicate}` takes {expected} argument(s), found {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("free variable `{0}`")]
    FreeVariable(String),
    #[error("variable `{0}` shadows an enclosing quantifier over the same category")]
    ShadowedVariable(String),
    #[error("variable `{name}` must be named after its category `{category}`")]
    VariableCategoryMismatch { name: String, category: String },
    #[error("constant `{0}` used without declaration in :objects")]
    UndeclaredConstant(String),
    #[error("constant `{0}` declared more than once")]
    DuplicateConstant(String),
    #[error("constant `{constant}` declared with category `{declared}`")]
    ConstantCategoryMismatch { constant: String, declared: String },
    #[error("{0}")]
    InvalidName(String),
    #[error("initial condition literals must be ground")]
    NonGroundInit,
    #[error("argument {index} of `{predicate}` must be a room name")]
    ExpectedRoom { predicate: String, index: usize },
    #[error("argument {index} of `{predicate}` must be an object, not a room")]
    UnexpectedRoom { predicate: String, index: usize },
    #[error("`{0}` requires at least one operand")]
    EmptyOperator(String),
    #[error("`{operator}` takes {expected} operand(s), found {found}")]
    OperatorArity {
        operator: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate predicate `{0}`")]
    DuplicatePredicate(String),
    #[error("malformed predicate signature: {0}")]
    MalformedSignature(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {kind}")]
pub struct SyntaxError {
    pub kind: SyntaxErrorKind,
    pub pos: Position,
}

impl SyntaxError {
    pub fn new(kind: SyntaxErrorKind, pos: Position) -> Self {
        SyntaxError { kind, pos }
    }
}
