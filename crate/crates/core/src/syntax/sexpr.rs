//! Tokenizer and s-expression reader shared by problem and domain files.

use super::error::{Position, SyntaxError, SyntaxErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom { text: String, pos: Position },
    List { items: Vec<SExpr>, pos: Position },
}

impl SExpr {
    pub fn pos(&self) -> Position {
        match self {
            SExpr::Atom { pos, .. } | SExpr::List { pos, .. } => *pos,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Atom { .. } => None,
        }
    }

    /// The leading atom of a list, e.g. `and` in `(and ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open(Position),
    Close(Position),
    Atom(String, Position),
}

fn is_atom_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '?' | ':' | '-')
}

fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Position { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                tokens.push(Token::Open(pos));
            }
            ')' => {
                chars.next();
                col += 1;
                tokens.push(Token::Close(pos));
            }
            c if is_atom_char(c) => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_atom_char(c) {
                        break;
                    }
                    atom.push(c.to_ascii_lowercase());
                    chars.next();
                    col += 1;
                }
                tokens.push(Token::Atom(atom, pos));
            }
            other => {
                return Err(SyntaxError::new(
                    SyntaxErrorKind::UnexpectedCharacter(other),
                    pos,
                ))
            }
        }
    }
    Ok(tokens)
}

/// Reads exactly one top-level s-expression from `text`.
pub fn read(text: &str) -> Result<SExpr, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut stack: Vec<(Position, Vec<SExpr>)> = Vec::new();
    let mut top: Option<SExpr> = None;
    for tok in tokens {
        if top.is_some() {
            let pos = match tok {
                Token::Open(p) | Token::Close(p) | Token::Atom(_, p) => p,
            };
            return Err(SyntaxError::new(SyntaxErrorKind::TrailingInput, pos));
        }
        match tok {
            Token::Open(pos) => stack.push((pos, Vec::new())),
            Token::Close(pos) => {
                let Some((open, items)) = stack.pop() else {
                    return Err(SyntaxError::new(SyntaxErrorKind::UnbalancedClose, pos));
                };
                let list = SExpr::List { items, pos: open };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(list),
                    None => top = Some(list),
                }
            }
            Token::Atom(text, pos) => match stack.last_mut() {
                Some((_, parent)) => parent.push(SExpr::Atom { text, pos }),
                None => return Err(SyntaxError::new(SyntaxErrorKind::ExpectedList, pos)),
            },
        }
    }
    if let Some((open, _)) = stack.pop() {
        return Err(SyntaxError::new(SyntaxErrorKind::UnbalancedOpen, open));
    }
    top.ok_or(SyntaxError::new(
        SyntaxErrorKind::EmptyInput,
        Position { line: 1, col: 1 },
    ))
}
