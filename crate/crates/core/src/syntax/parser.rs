//! Problem and domain file parsing.
//!
//! Both file kinds are read as a single s-expression and then interpreted
//! into the typed tree in [`super::ast`]. Every rejection carries the
//! line/column of the offending token.

use std::collections::BTreeMap;

use super::ast::*;
use super::error::{Position, SyntaxError, SyntaxErrorKind as K};
use super::sexpr::{self, SExpr};

type Result<T> = std::result::Result<T, SyntaxError>;

fn err<T>(kind: K, pos: Position) -> Result<T> {
    Err(SyntaxError::new(kind, pos))
}

fn expect_list<'a>(s: &'a SExpr, what: &'static str) -> Result<&'a [SExpr]> {
    s.as_list()
        .ok_or_else(|| SyntaxError::new(K::Expected(what), s.pos()))
}

fn expect_atom<'a>(s: &'a SExpr, what: &'static str) -> Result<&'a str> {
    s.as_atom()
        .ok_or_else(|| SyntaxError::new(K::Expected(what), s.pos()))
}

/// Checks `(keyword value)` and returns `value`.
fn keyed_name<'a>(s: &'a SExpr, keyword: &'static str, what: &'static str) -> Result<&'a str> {
    match s.as_list() {
        Some([head, value]) if head.as_atom() == Some(keyword) => expect_atom(value, what),
        _ => err(K::Expected(what), s.pos()),
    }
}

pub fn parse_domain(text: &str) -> Result<DomainDefinition> {
    let root = sexpr::read(text)?;
    let items = expect_list(&root, "`(define ...)`")?;
    if items.first().and_then(SExpr::as_atom) != Some("define") {
        return err(K::Expected("`(define ...)`"), root.pos());
    }
    let name = keyed_name(
        items.get(1).ok_or_else(|| SyntaxError::new(K::Expected("`(domain name)`"), root.pos()))?,
        "domain",
        "`(domain name)`",
    )?
    .to_string();

    let mut predicates: Vec<PredicateSignature> = Vec::new();
    let mut seen_predicates = false;
    for section in &items[2..] {
        let entries = expect_list(section, "a domain section")?;
        let head = entries
            .first()
            .and_then(SExpr::as_atom)
            .ok_or_else(|| SyntaxError::new(K::Expected("a section keyword"), section.pos()))?;
        match head {
            ":requirements" => {}
            ":predicates" => {
                if seen_predicates {
                    return err(K::DuplicateSection(head.to_string()), section.pos());
                }
                seen_predicates = true;
                for sig in &entries[1..] {
                    let parsed = parse_signature(sig)?;
                    if predicates.iter().any(|p| p.symbol == parsed.symbol) {
                        return err(K::DuplicatePredicate(parsed.symbol.to_string()), sig.pos());
                    }
                    predicates.push(parsed);
                }
            }
            other => return err(K::UnknownSection(other.to_string()), section.pos()),
        }
    }
    Ok(DomainDefinition { name, predicates })
}

fn parse_signature(sig: &SExpr) -> Result<PredicateSignature> {
    let malformed = |why: &str| SyntaxError::new(K::MalformedSignature(why.to_string()), sig.pos());
    let items = sig
        .as_list()
        .ok_or_else(|| malformed("expected `(symbol ?arg - type ...)`"))?;
    let symbol = items
        .first()
        .and_then(SExpr::as_atom)
        .filter(|s| !s.starts_with('?') && !s.starts_with(':') && *s != "-")
        .ok_or_else(|| malformed("missing predicate symbol"))?;
    let mut params = Vec::new();
    let mut rest = items[1..].iter().peekable();
    while let Some(arg) = rest.next() {
        arg.as_atom()
            .filter(|a| a.starts_with('?') && a.len() > 1)
            .ok_or_else(|| malformed("parameters are written `?name - type`"))?;
        let kind = if rest.peek().and_then(|s| s.as_atom()) == Some("-") {
            rest.next();
            let ty = rest
                .next()
                .and_then(SExpr::as_atom)
                .ok_or_else(|| malformed("missing type after `-`"))?;
            match ty {
                "object" => ParamKind::Object(None),
                "room" => ParamKind::Room,
                prop if !prop.starts_with('?') => ParamKind::Object(Some(Property::new(prop))),
                _ => return Err(malformed("missing type after `-`")),
            }
        } else {
            ParamKind::Object(None)
        };
        params.push(kind);
    }
    if !(1..=2).contains(&params.len()) {
        return Err(malformed("predicates are unary or binary"));
    }
    Ok(PredicateSignature {
        symbol: PredicateSymbol::new(symbol),
        params,
    })
}

/// Parses a problem file, checking predicate symbols and arities against `domain`.
pub fn parse_problem(text: &str, domain: &DomainDefinition) -> Result<ActivityDefinition> {
    let root = sexpr::read(text)?;
    let items = expect_list(&root, "`(define ...)`")?;
    if items.first().and_then(SExpr::as_atom) != Some("define") {
        return err(K::Expected("`(define ...)`"), root.pos());
    }
    let problem_name = keyed_name(
        items.get(1).ok_or_else(|| SyntaxError::new(K::Expected("`(problem name)`"), root.pos()))?,
        "problem",
        "`(problem name)`",
    )?
    .to_string();

    let mut domain_name = None;
    let mut sections: BTreeMap<&str, &SExpr> = BTreeMap::new();
    for section in &items[2..] {
        let entries = expect_list(section, "a problem section")?;
        let head = entries
            .first()
            .and_then(SExpr::as_atom)
            .ok_or_else(|| SyntaxError::new(K::Expected("a section keyword"), section.pos()))?;
        match head {
            ":domain" => {
                if domain_name.is_some() {
                    return err(K::DuplicateSection(head.to_string()), section.pos());
                }
                domain_name = Some(keyed_name(section, ":domain", "`(:domain name)`")?.to_string());
            }
            ":objects" | ":init" | ":goal" => {
                if sections.insert(head, section).is_some() {
                    return err(K::DuplicateSection(head.to_string()), section.pos());
                }
            }
            other => return err(K::UnknownSection(other.to_string()), section.pos()),
        }
    }
    let missing = |name: &'static str| SyntaxError::new(K::MissingSection(name), root.pos());
    let domain_name = domain_name.ok_or_else(|| missing(":domain"))?;
    let objects = parse_objects(sections.get(":objects").ok_or_else(|| missing(":objects"))?)?;

    let ctx = Context {
        domain,
        objects: &objects,
    };
    let init_section = sections.get(":init").ok_or_else(|| missing(":init"))?;
    let init = expect_list(init_section, "`(:init ...)`")?[1..]
        .iter()
        .map(|lit| ctx.init_literal(lit))
        .collect::<Result<Vec<_>>>()?;

    let goal_section = sections.get(":goal").ok_or_else(|| missing(":goal"))?;
    let goal = match expect_list(goal_section, "`(:goal expr)`")? {
        [_, expr] => {
            if expr.as_list().map(<[SExpr]>::len) == Some(1) && expr.head() == Some("and") {
                None
            } else {
                Some(ctx.expr(expr, &mut Vec::new())?)
            }
        }
        items => {
            return err(
                K::OperatorArity {
                    operator: ":goal".into(),
                    expected: 1,
                    found: items.len() - 1,
                },
                goal_section.pos(),
            )
        }
    };

    Ok(ActivityDefinition {
        problem_name,
        domain_name,
        objects,
        init,
        goal,
    })
}

fn parse_objects(section: &SExpr) -> Result<Vec<(ConstantName, CategoryName)>> {
    let items = expect_list(section, "`(:objects ...)`")?;
    let mut objects: Vec<(ConstantName, CategoryName)> = Vec::new();
    let mut pending: Vec<(ConstantName, Position)> = Vec::new();
    let mut iter = items[1..].iter();
    while let Some(item) = iter.next() {
        let text = expect_atom(item, "an object constant")?;
        if text == "-" {
            let ty = iter
                .next()
                .ok_or_else(|| SyntaxError::new(K::Expected("a category after `-`"), item.pos()))?;
            let category = name::<CategoryName>(expect_atom(ty, "a category")?, ty.pos())?;
            if pending.is_empty() {
                return err(K::Expected("object constants before `-`"), item.pos());
            }
            for (constant, pos) in pending.drain(..) {
                if constant.category != category {
                    return err(
                        K::ConstantCategoryMismatch {
                            constant: constant.to_string(),
                            declared: category.to_string(),
                        },
                        pos,
                    );
                }
                if objects.iter().any(|(c, _)| *c == constant) {
                    return err(K::DuplicateConstant(constant.to_string()), pos);
                }
                objects.push((constant, category.clone()));
            }
        } else {
            pending.push((name::<ConstantName>(text, item.pos())?, item.pos()));
        }
    }
    if let Some((_, pos)) = pending.first() {
        return err(K::Expected("`- category` after object constants"), *pos);
    }
    Ok(objects)
}

fn name<T>(text: &str, pos: Position) -> Result<T>
where
    T: std::str::FromStr<Err = NameError>,
{
    text.parse()
        .map_err(|e: NameError| SyntaxError::new(K::InvalidName(e.to_string()), pos))
}

struct Context<'a> {
    domain: &'a DomainDefinition,
    objects: &'a [(ConstantName, CategoryName)],
}

impl Context<'_> {
    fn init_literal(&self, s: &SExpr) -> Result<Literal> {
        self.init_literal_inner(s).map_err(|e| match e.kind {
            K::FreeVariable(_) => SyntaxError::new(K::NonGroundInit, e.pos),
            _ => e,
        })
    }

    fn init_literal_inner(&self, s: &SExpr) -> Result<Literal> {
        let lit = if s.head() == Some("not") {
            match expect_list(s, "a literal")? {
                [_, inner] => Literal::negative(self.atom(inner, &[])?),
                items => {
                    return err(
                        K::OperatorArity {
                            operator: "not".into(),
                            expected: 1,
                            found: items.len() - 1,
                        },
                        s.pos(),
                    )
                }
            }
        } else {
            Literal::positive(self.atom(s, &[])?)
        };
        Ok(lit)
    }

    fn expr(&self, s: &SExpr, scope: &mut Vec<CategoryName>) -> Result<Expr> {
        let items = expect_list(s, "an expression")?;
        let head = items
            .first()
            .and_then(SExpr::as_atom)
            .ok_or_else(|| SyntaxError::new(K::Expected("an operator or predicate"), s.pos()))?;
        let args = &items[1..];
        let exactly = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                err(
                    K::OperatorArity {
                        operator: head.to_string(),
                        expected: n,
                        found: args.len(),
                    },
                    s.pos(),
                )
            }
        };
        Ok(match head {
            "and" | "or" => {
                if args.is_empty() {
                    return err(K::EmptyOperator(head.to_string()), s.pos());
                }
                let children = args
                    .iter()
                    .map(|a| self.expr(a, scope))
                    .collect::<Result<Vec<_>>>()?;
                if head == "and" {
                    Expr::And(children)
                } else {
                    Expr::Or(children)
                }
            }
            "not" => {
                exactly(1)?;
                Expr::Not(Box::new(self.expr(&args[0], scope)?))
            }
            "imply" | "iff" => {
                exactly(2)?;
                let a = Box::new(self.expr(&args[0], scope)?);
                let b = Box::new(self.expr(&args[1], scope)?);
                if head == "imply" {
                    Expr::Imply(a, b)
                } else {
                    Expr::Iff(a, b)
                }
            }
            "forall" | "exists" => {
                exactly(2)?;
                let var = self.var_decl(&args[0], scope)?;
                let body = self.scoped(&[&var], &args[1], scope)?;
                if head == "forall" {
                    Expr::ForAll(var, body)
                } else {
                    Expr::Exists(var, body)
                }
            }
            "for_n" => {
                exactly(3)?;
                let n = count(&args[0])?;
                let var = self.var_decl(&args[1], scope)?;
                let body = self.scoped(&[&var], &args[2], scope)?;
                Expr::ForN(n, var, body)
            }
            "for_pairs" => {
                exactly(3)?;
                let a = self.var_decl(&args[0], scope)?;
                let b = self.var_decl(&args[1], scope)?;
                self.check_distinct(&a, &b, &args[1])?;
                let body = self.scoped(&[&a, &b], &args[2], scope)?;
                Expr::ForPairs(a, b, body)
            }
            "for_n_pairs" => {
                exactly(4)?;
                let n = count(&args[0])?;
                let a = self.var_decl(&args[1], scope)?;
                let b = self.var_decl(&args[2], scope)?;
                self.check_distinct(&a, &b, &args[2])?;
                let body = self.scoped(&[&a, &b], &args[3], scope)?;
                Expr::ForNPairs(n, a, b, body)
            }
            _ => Expr::Atom(self.atom(s, scope)?),
        })
    }

    fn check_distinct(&self, a: &VariableName, b: &VariableName, at: &SExpr) -> Result<()> {
        if a == b {
            return err(K::ShadowedVariable(b.to_string()), at.pos());
        }
        Ok(())
    }

    fn scoped(
        &self,
        vars: &[&VariableName],
        body: &SExpr,
        scope: &mut Vec<CategoryName>,
    ) -> Result<Box<Expr>> {
        let depth = scope.len();
        scope.extend(vars.iter().map(|v| v.category.clone()));
        let result = self.expr(body, scope);
        scope.truncate(depth);
        result.map(Box::new)
    }

    /// `(?category - category)`
    fn var_decl(&self, s: &SExpr, scope: &[CategoryName]) -> Result<VariableName> {
        let items = match s.as_list() {
            Some(items @ [_, dash, _]) if dash.as_atom() == Some("-") => items,
            _ => return err(K::Expected("a variable declaration `(?category - category)`"), s.pos()),
        };
        let var_text = expect_atom(&items[0], "a variable")?;
        let Some(body) = var_text.strip_prefix('?') else {
            return err(K::Expected("a variable starting with `?`"), items[0].pos());
        };
        let category: CategoryName = name(expect_atom(&items[2], "a category")?, items[2].pos())?;
        if body != category.to_string() {
            return err(
                K::VariableCategoryMismatch {
                    name: var_text.to_string(),
                    category: category.to_string(),
                },
                items[0].pos(),
            );
        }
        if scope.contains(&category) {
            return err(K::ShadowedVariable(var_text.to_string()), items[0].pos());
        }
        Ok(VariableName::new(category))
    }

    fn atom(&self, s: &SExpr, scope: &[CategoryName]) -> Result<AtomicFormula> {
        let items = expect_list(s, "an atomic formula")?;
        let head = items
            .first()
            .ok_or_else(|| SyntaxError::new(K::Expected("a predicate"), s.pos()))?;
        let symbol = expect_atom(head, "a predicate")?;
        let sig = self
            .domain
            .predicate(symbol)
            .ok_or_else(|| SyntaxError::new(K::UnknownPredicate(symbol.to_string()), head.pos()))?;
        let args = &items[1..];
        if args.len() != sig.arity() {
            return err(
                K::ArityMismatch {
                    predicate: symbol.to_string(),
                    expected: sig.arity(),
                    found: args.len(),
                },
                s.pos(),
            );
        }
        let terms = args
            .iter()
            .zip(&sig.params)
            .enumerate()
            .map(|(i, (arg, kind))| self.term(symbol, i + 1, arg, kind, scope))
            .collect::<Result<Vec<_>>>()?;
        Ok(AtomicFormula {
            predicate: sig.symbol.clone(),
            args: terms,
        })
    }

    fn term(
        &self,
        predicate: &str,
        index: usize,
        arg: &SExpr,
        kind: &ParamKind,
        scope: &[CategoryName],
    ) -> Result<Term> {
        let text = expect_atom(arg, "a predicate argument")?;
        let term: Term = name(text, arg.pos())?;
        match (kind, term) {
            (ParamKind::Room, Term::Room(r)) => Ok(Term::Room(r)),
            (ParamKind::Room, _) => err(
                K::ExpectedRoom {
                    predicate: predicate.to_string(),
                    index,
                },
                arg.pos(),
            ),
            (ParamKind::Object(_), Term::Room(_)) => err(
                K::UnexpectedRoom {
                    predicate: predicate.to_string(),
                    index,
                },
                arg.pos(),
            ),
            (ParamKind::Object(_), Term::Variable(v)) => {
                if scope.contains(&v.category) {
                    Ok(Term::Variable(v))
                } else {
                    err(K::FreeVariable(text.to_string()), arg.pos())
                }
            }
            (ParamKind::Object(_), Term::Constant(c)) => {
                if self.objects.iter().any(|(d, _)| *d == c) {
                    Ok(Term::Constant(c))
                } else {
                    err(K::UndeclaredConstant(c.to_string()), arg.pos())
                }
            }
        }
    }
}

/// `(n)` or a bare non-negative integer.
fn count(s: &SExpr) -> Result<usize> {
    let atom = match s {
        SExpr::List { items, .. } if items.len() == 1 => &items[0],
        SExpr::Atom { .. } => s,
        _ => return err(K::Expected("a count `(n)`"), s.pos()),
    };
    expect_atom(atom, "a count `(n)`")?
        .parse()
        .map_err(|_| SyntaxError::new(K::Expected("a non-negative integer count"), atom.pos()))
}
