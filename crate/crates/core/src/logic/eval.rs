use super::matching::maximum_matching;
use super::{restore, substitute, Binding, FactSource, LogicError, StateFacts, Universe};
use crate::syntax::{DomainDefinition, Expr, VariableName};
use crate::taxonomy::Taxonomy;
use crate::world::SceneState;

/// Truth value of `expr` under `binding`.
///
/// Quantifiers range over the universe's instances of the variable's category.
/// `for_pairs` holds when a one-to-one mapping covering the smaller category
/// exists with the body true on every mapped pair; `for_n_pairs (n)` when such
/// a mapping of at least `n` pairs exists.
pub fn evaluate(
    expr: &Expr,
    facts: &impl FactSource,
    binding: &Binding,
    universe: &Universe,
) -> Result<bool, LogicError> {
    let mut binding = binding.clone();
    Evaluator { facts, universe }.eval(expr, &mut binding)
}

/// [`evaluate`] with atoms decided directly against a scene.
pub fn evaluate_in_state(
    expr: &Expr,
    state: &SceneState,
    binding: &Binding,
    universe: &Universe,
    taxonomy: &Taxonomy,
    domain: &DomainDefinition,
) -> Result<bool, LogicError> {
    let facts = StateFacts {
        state,
        taxonomy,
        domain,
    };
    evaluate(expr, &facts, binding, universe)
}

struct Evaluator<'a, F> {
    facts: &'a F,
    universe: &'a Universe,
}

impl<F: FactSource> Evaluator<'_, F> {
    fn eval(&self, expr: &Expr, b: &mut Binding) -> Result<bool, LogicError> {
        Ok(match expr {
            Expr::Atom(a) => self.facts.holds(&substitute(a, b)?)?,
            Expr::Not(e) => !self.eval(e, b)?,
            Expr::And(es) => {
                for e in es {
                    if !self.eval(e, b)? {
                        return Ok(false);
                    }
                }
                true
            }
            Expr::Or(es) => {
                for e in es {
                    if self.eval(e, b)? {
                        return Ok(true);
                    }
                }
                false
            }
            Expr::Imply(p, q) => !self.eval(p, b)? || self.eval(q, b)?,
            Expr::Iff(p, q) => self.eval(p, b)? == self.eval(q, b)?,
            Expr::ForAll(v, body) => self.all_hold(v, body, b)?,
            Expr::Exists(v, body) => self.count_true(v, body, b, 1)? >= 1,
            Expr::ForN(n, v, body) => self.count_true(v, body, b, *n)? >= *n,
            Expr::ForPairs(v1, v2, body) => {
                let (size, left, right) = self.matching(v1, v2, body, b)?;
                size == left.min(right)
            }
            Expr::ForNPairs(n, v1, v2, body) => self.matching(v1, v2, body, b)?.0 >= *n,
        })
    }

    fn all_hold(&self, v: &VariableName, body: &Expr, b: &mut Binding) -> Result<bool, LogicError> {
        for c in self.universe.instances(&v.category)? {
            let prev = b.insert(v.clone(), c.clone());
            let r = self.eval(body, b);
            restore(b, v, prev);
            if !r? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Number of instances on which `body` holds, stopping once `enough` are found.
    fn count_true(
        &self,
        v: &VariableName,
        body: &Expr,
        b: &mut Binding,
        enough: usize,
    ) -> Result<usize, LogicError> {
        let mut n = 0;
        for c in self.universe.instances(&v.category)? {
            if n >= enough {
                break;
            }
            let prev = b.insert(v.clone(), c.clone());
            let r = self.eval(body, b);
            restore(b, v, prev);
            if r? {
                n += 1;
            }
        }
        Ok(n)
    }

    /// Maximum matching on the pair-satisfaction graph: (size, |C1|, |C2|).
    fn matching(
        &self,
        v1: &VariableName,
        v2: &VariableName,
        body: &Expr,
        b: &mut Binding,
    ) -> Result<(usize, usize, usize), LogicError> {
        let c1 = self.universe.instances(&v1.category)?;
        let c2 = self.universe.instances(&v2.category)?;
        let mut adj = vec![Vec::new(); c1.len()];
        for (i, x) in c1.iter().enumerate() {
            let p1 = b.insert(v1.clone(), x.clone());
            for (j, y) in c2.iter().enumerate() {
                let p2 = b.insert(v2.clone(), y.clone());
                let r = self.eval(body, b);
                restore(b, v2, p2);
                if r? {
                    adj[i].push(j);
                }
            }
            restore(b, v1, p1);
        }
        Ok((maximum_matching(&adj, c2.len()).size, c1.len(), c2.len()))
    }
}

