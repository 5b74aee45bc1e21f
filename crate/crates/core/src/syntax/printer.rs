use std::fmt::Write;

use super::ast::{ActivityDefinition, Expr, VariableName};

const INDENT: &str = "  ";

/// Renders a definition in canonical form: 2-space indentation, one object
/// declaration and one literal per line, counts as `(n)`.
pub fn print_canonical(def: &ActivityDefinition) -> String {
    let mut out = String::new();
    out.push_str("(define\n");
    let _ = writeln!(out, "{INDENT}(problem {})", def.problem_name);
    let _ = writeln!(out, "{INDENT}(:domain {})", def.domain_name);

    section(&mut out, ":objects", def.objects.is_empty(), |out| {
        for (constant, category) in &def.objects {
            let _ = writeln!(out, "{INDENT}{INDENT}{constant} - {category}");
        }
    });
    section(&mut out, ":init", def.init.is_empty(), |out| {
        for lit in &def.init {
            let _ = writeln!(out, "{INDENT}{INDENT}{lit}");
        }
    });
    match &def.goal {
        None => {
            let _ = writeln!(out, "{INDENT}(:goal (and))");
        }
        Some(goal) => section(&mut out, ":goal", false, |out| expr(out, goal, 2)),
    }
    out.push_str(")\n");
    out
}

fn section(out: &mut String, name: &str, empty: bool, body: impl FnOnce(&mut String)) {
    if empty {
        let _ = writeln!(out, "{INDENT}({name})");
        return;
    }
    let _ = writeln!(out, "{INDENT}({name}");
    body(out);
    let _ = writeln!(out, "{INDENT})");
}

fn decl(v: &VariableName) -> String {
    format!("({v} - {})", v.category)
}

/// Writes `e` at `depth` levels of indentation; atoms and negated atoms fit on one line.
pub(crate) fn expr(out: &mut String, e: &Expr, depth: usize) {
    let pad = INDENT.repeat(depth);
    if let Some(line) = one_line(e) {
        let _ = writeln!(out, "{pad}{line}");
        return;
    }
    let (head, children): (String, Vec<&Expr>) = match e {
        Expr::Atom(_) => unreachable!("atoms print on one line"),
        Expr::Not(c) => ("not".into(), vec![c]),
        Expr::And(cs) => ("and".into(), cs.iter().collect()),
        Expr::Or(cs) => ("or".into(), cs.iter().collect()),
        Expr::Imply(a, b) => ("imply".into(), vec![a, b]),
        Expr::Iff(a, b) => ("iff".into(), vec![a, b]),
        Expr::ForAll(v, c) => (format!("forall {}", decl(v)), vec![c]),
        Expr::Exists(v, c) => (format!("exists {}", decl(v)), vec![c]),
        Expr::ForN(n, v, c) => (format!("for_n ({n}) {}", decl(v)), vec![c]),
        Expr::ForPairs(a, b, c) => (format!("for_pairs {} {}", decl(a), decl(b)), vec![c]),
        Expr::ForNPairs(n, a, b, c) => (
            format!("for_n_pairs ({n}) {} {}", decl(a), decl(b)),
            vec![c],
        ),
    };
    let _ = writeln!(out, "{pad}({head}");
    for c in children {
        expr(out, c, depth + 1);
    }
    let _ = writeln!(out, "{pad})");
}

fn one_line(e: &Expr) -> Option<String> {
    match e {
        Expr::Atom(a) => Some(a.to_string()),
        Expr::Not(inner) => match inner.as_ref() {
            Expr::Atom(a) => Some(format!("(not {a})")),
            _ => None,
        },
        _ => None,
    }
}

/// Renders a bare expression (no activity wrapper) in canonical layout.
pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}
