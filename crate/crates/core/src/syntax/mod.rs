//! Lexing, parsing and canonical printing of activity and domain files.

pub mod ast;
mod error;
mod parser;
mod printer;
mod sexpr;

pub use ast::*;
pub use error::{Position, SyntaxError, SyntaxErrorKind};
pub use parser::{parse_domain, parse_problem};
pub use printer::{print_canonical, print_expr};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn domain() -> DomainDefinition {
        corpus::domain()
    }

    fn parse_err(text: &str) -> SyntaxError {
        parse_problem(text, &domain()).unwrap_err()
    }

    #[test]
    fn packing_lunches_listing_parses() {
        let def = parse_problem(corpus::PACKING_LUNCHES, &domain()).unwrap();
        assert_eq!(def.problem_name, "packing_lunches_1");
        assert_eq!(def.domain_name, "igibson");
        assert_eq!(def.objects.len(), 7);
        assert_eq!(def.init.len(), 7);
        assert_eq!(
            def.init[0].to_string(),
            "(ontop water.n.06_1 countertop.n.01_1)"
        );
        let Some(Expr::And(conjuncts)) = &def.goal else {
            panic!("goal should be a conjunction");
        };
        assert_eq!(conjuncts.len(), 4);
        assert!(matches!(conjuncts[0], Expr::ForNPairs(1, _, _, _)));
        // `?countertop.n.01_1` in the listing denotes the constant.
        let Expr::ForAll(_, body) = &conjuncts[3] else {
            panic!("last conjunct is a forall")
        };
        let Expr::Atom(a) = body.as_ref() else { panic!() };
        assert_eq!(a.to_string(), "(ontop ?basket.n.01 countertop.n.01_1)");
    }

    #[test]
    fn serving_listing_parses() {
        let def = parse_problem(corpus::SERVING_HORS_DOEUVRES, &domain()).unwrap();
        assert_eq!(def.objects.len(), 9);
        assert_eq!(def.init.len(), 9);
        let Some(Expr::And(conjuncts)) = &def.goal else {
            panic!("goal should be a conjunction");
        };
        assert_eq!(conjuncts.len(), 2);
        assert!(conjuncts.iter().all(|c| matches!(c, Expr::Exists(..))));
    }

    #[test]
    fn empty_activity_is_accepted() {
        let def = parse_problem(
            "(define (problem p) (:domain igibson) (:objects) (:init) (:goal (and)))",
            &domain(),
        )
        .unwrap();
        assert!(def.objects.is_empty() && def.init.is_empty());
        assert_eq!(def.goal, None);
        let printed = print_canonical(&def);
        assert_eq!(parse_problem(&printed, &domain()).unwrap(), def);
    }

    #[test]
    fn canonical_print_round_trips_listings() {
        for text in [corpus::PACKING_LUNCHES, corpus::SERVING_HORS_DOEUVRES] {
            let def = parse_problem(text, &domain()).unwrap();
            let printed = print_canonical(&def);
            assert_eq!(parse_problem(&printed, &domain()).unwrap(), def);
            assert_eq!(print_canonical(&parse_problem(&printed, &domain()).unwrap()), printed);
        }
    }

    #[test]
    fn canonical_layout() {
        let def = parse_problem(corpus::PACKING_LUNCHES, &domain()).unwrap();
        let printed = print_canonical(&def);
        assert!(printed.contains("\n  (:init\n    (ontop water.n.06_1 countertop.n.01_1)\n"));
        assert!(printed.contains("for_n_pairs (1) (?hamburger.n.01 - hamburger.n.01) (?basket.n.01 - basket.n.01)"));
        assert!(!printed.contains("(and)"));
    }

    const HEAD: &str = "(define (problem p) (:domain igibson)\n (:objects apple.n.01_1 - apple.n.01 table.n.02_1 - table.n.02)\n";

    #[test]
    fn unknown_predicate_with_empty_registry() {
        let empty = DomainDefinition {
            name: "igibson".into(),
            predicates: vec![],
        };
        let e = parse_problem(
            &format!("{HEAD} (:init (ontop apple.n.01_1 table.n.02_1)) (:goal (and)))"),
            &empty,
        )
        .unwrap_err();
        assert_eq!(e.kind, SyntaxErrorKind::UnknownPredicate("ontop".into()));
        assert_eq!(e.pos, Position { line: 3, col: 10 });
    }

    #[test]
    fn arity_mismatch() {
        let e = parse_err(&format!(
            "{HEAD} (:init) (:goal (ontop apple.n.01_1 table.n.02_1 apple.n.01_1)))"
        ));
        assert!(matches!(e.kind, SyntaxErrorKind::ArityMismatch { expected: 2, found: 3, .. }));
    }

    #[test]
    fn free_variable() {
        let e = parse_err(&format!("{HEAD} (:init) (:goal (cooked ?apple.n.01)))"));
        assert_eq!(e.kind, SyntaxErrorKind::FreeVariable("?apple.n.01".into()));
        assert_eq!(e.pos.line, 3);
    }

    #[test]
    fn undeclared_constant() {
        let e = parse_err(&format!("{HEAD} (:init (cooked apple.n.01_2)) (:goal (and)))"));
        assert_eq!(e.kind, SyntaxErrorKind::UndeclaredConstant("apple.n.01_2".into()));
    }

    #[test]
    fn shadowing_is_rejected() {
        let e = parse_err(&format!(
            "{HEAD} (:init) (:goal (forall (?apple.n.01 - apple.n.01) (exists (?apple.n.01 - apple.n.01) (cooked ?apple.n.01)))))"
        ));
        assert!(matches!(e.kind, SyntaxErrorKind::ShadowedVariable(_)));
    }

    #[test]
    fn section_errors() {
        let e = parse_err("(define (problem p) (:domain igibson) (:objects) (:init) (:actions) (:goal (and)))");
        assert_eq!(e.kind, SyntaxErrorKind::UnknownSection(":actions".into()));
        let e = parse_err("(define (problem p) (:domain igibson) (:objects) (:goal (and)))");
        assert_eq!(e.kind, SyntaxErrorKind::MissingSection(":init"));
        let e = parse_err("(define (problem p) (:domain igibson) (:objects) (:init) (:goal (and))");
        assert_eq!(e.kind, SyntaxErrorKind::UnbalancedOpen);
    }

    #[test]
    fn init_must_be_ground() {
        let e = parse_err(&format!("{HEAD} (:init (cooked ?apple.n.01)) (:goal (and)))"));
        assert_eq!(e.kind, SyntaxErrorKind::NonGroundInit);
    }

    #[test]
    fn constant_category_must_match_declaration() {
        let e = parse_err("(define (problem p) (:domain igibson) (:objects apple.n.01_1 - table.n.02) (:init) (:goal (and)))");
        assert!(matches!(e.kind, SyntaxErrorKind::ConstantCategoryMismatch { .. }));
    }

    #[test]
    fn room_slots_are_checked() {
        let e = parse_err(&format!("{HEAD} (:init (inroom apple.n.01_1 table.n.02_1)) (:goal (and)))"));
        assert!(matches!(e.kind, SyntaxErrorKind::ExpectedRoom { index: 2, .. }));
        let e = parse_err(&format!("{HEAD} (:init (ontop apple.n.01_1 kitchen)) (:goal (and)))"));
        assert!(matches!(e.kind, SyntaxErrorKind::UnexpectedRoom { index: 2, .. }));
    }

    #[test]
    fn imply_iff_and_counts() {
        let def = parse_problem(
            &format!(
                "{HEAD} (:init) (:goal (and (imply (cooked apple.n.01_1) (not (burnt apple.n.01_1))) \
                 (iff (sliced apple.n.01_1) (dusty table.n.02_1)) \
                 (for_n 0 (?apple.n.01 - apple.n.01) (cooked ?apple.n.01)))))"
            ),
            &domain(),
        )
        .unwrap();
        let Some(Expr::And(cs)) = def.goal else { panic!() };
        assert!(matches!(cs[0], Expr::Imply(..)));
        assert!(matches!(cs[1], Expr::Iff(..)));
        assert!(matches!(cs[2], Expr::ForN(0, ..)));
        let e = parse_err(&format!("{HEAD} (:init) (:goal (or)))"));
        assert_eq!(e.kind, SyntaxErrorKind::EmptyOperator("or".into()));
    }

    #[test]
    fn domain_errors() {
        let e = parse_domain("(define (domain d) (:predicates (a ?x - object) (a ?y - object)))").unwrap_err();
        assert_eq!(e.kind, SyntaxErrorKind::DuplicatePredicate("a".into()));
        let e = parse_domain("(define (domain d) (:predicates (a ?x ?y ?z)))").unwrap_err();
        assert!(matches!(e.kind, SyntaxErrorKind::MalformedSignature(_)));
        let e = parse_domain("(define (domain d) (:predicates (a x)))").unwrap_err();
        assert!(matches!(e.kind, SyntaxErrorKind::MalformedSignature(_)));
    }

    #[test]
    fn shipped_domain_has_fifteen_predicates() {
        let d = domain();
        assert_eq!(d.predicates.len(), 15);
        let gated: Vec<_> = d
            .predicates
            .iter()
            .filter_map(|p| p.required_property().map(|prop| (p.symbol.as_str(), prop.as_str())))
            .collect();
        assert!(gated.contains(&("cooked", "cookable")));
        assert!(gated.contains(&("toggled_on", "toggleable")));
        assert_eq!(gated.len(), 9);
        assert_eq!(d.predicate("inroom").unwrap().params[1], ParamKind::Room);
    }
}
