//! Goal flattening: rewriting a quantified goal into a disjunction of
//! conjunctions of ground literals.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{restore, substitute, Binding, GroundLiteral, LogicError, Universe};
use crate::syntax::{AtomicFormula, Expr, Literal, VariableName};

pub const DEFAULT_CAP: usize = 1000;

/// A flattened goal. Satisfying every literal of any one option satisfies the goal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalOptions {
    pub options: Vec<Vec<GroundLiteral>>,
    /// Enumeration stopped at the cap; more options may exist.
    pub truncated: bool,
}

impl GoalOptions {
    /// The flattening of an empty goal: one option with no literals.
    pub fn trivial() -> Self {
        GoalOptions {
            options: vec![Vec::new()],
            truncated: false,
        }
    }
}

/// Length of the shortest option.
pub fn activity_volume(opts: &GoalOptions) -> Result<usize, LogicError> {
    match opts.options.iter().map(Vec::len).min() {
        Some(n) if n > 0 => Ok(n),
        _ => Err(LogicError::NoOptions),
    }
}

/// Ground goal in negation normal form.
#[derive(Debug)]
enum Node {
    Lit(Literal),
    All(Vec<Node>),
    Any(Vec<Node>),
    /// At least `n` of the items.
    Choose(usize, Vec<Node>),
    /// Some injective mapping of `k` pairs with every mapped cell true;
    /// `k = None` means the size of the smaller side.
    Match(Option<usize>, Grid),
    /// Every injective mapping of `k` pairs has at least one true cell.
    Cover(Option<usize>, Grid),
}

#[derive(Debug)]
struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<Node>,
}

impl Grid {
    fn cell(&self, r: usize, c: usize) -> &Node {
        &self.cells[r * self.cols + c]
    }

    fn pairs(&self, k: Option<usize>) -> usize {
        k.unwrap_or(self.rows.min(self.cols))
    }

    /// Injective mappings of `k` pairs: a sorted row subset zipped with an
    /// ordered column selection, so each mapping appears once.
    fn mappings(&self, k: usize) -> impl Iterator<Item = Vec<(usize, usize)>> + '_ {
        (0..self.rows).combinations(k).flat_map(move |rows| {
            (0..self.cols)
                .permutations(k)
                .map(move |cols| rows.iter().copied().zip(cols).collect())
        })
    }

    fn mapping_count(&self, k: usize) -> u128 {
        if k > self.rows.min(self.cols) {
            return 0;
        }
        let choose = (0..k).fold(1u128, |acc, i| acc * (self.rows - i) as u128 / (i as u128 + 1));
        let arrange = (0..k).fold(1u128, |acc, i| acc.saturating_mul((self.cols - i) as u128));
        choose.saturating_mul(arrange)
    }
}

struct Grounder<'a> {
    universe: &'a Universe,
}

impl Grounder<'_> {
    fn ground(&self, e: &Expr, b: &mut Binding, pos: bool) -> Result<Node, LogicError> {
        Ok(match e {
            Expr::Atom(a) => {
                let f = substitute(a, b)?;
                Node::Lit(if pos {
                    Literal::positive(f)
                } else {
                    Literal::negative(f)
                })
            }
            Expr::Not(inner) => self.ground(inner, b, !pos)?,
            Expr::And(es) | Expr::Or(es) => {
                let kids = es
                    .iter()
                    .map(|e| self.ground(e, b, pos))
                    .collect::<Result<_, _>>()?;
                if matches!(e, Expr::And(_)) == pos {
                    Node::All(kids)
                } else {
                    Node::Any(kids)
                }
            }
            Expr::Imply(p, q) => {
                let np = self.ground(p, b, !pos)?;
                let q = self.ground(q, b, pos)?;
                if pos {
                    Node::Any(vec![np, q])
                } else {
                    Node::All(vec![np, q])
                }
            }
            Expr::Iff(p, q) => {
                let forward = Expr::Imply(p.clone(), q.clone());
                let backward = Expr::Imply(q.clone(), p.clone());
                self.ground(&Expr::And(vec![forward, backward]), b, pos)?
            }
            Expr::ForAll(v, body) | Expr::Exists(v, body) => {
                let kids = self.each(v, body, b, pos)?;
                if matches!(e, Expr::ForAll(..)) == pos {
                    Node::All(kids)
                } else {
                    Node::Any(kids)
                }
            }
            Expr::ForN(n, v, body) => {
                let kids = self.each(v, body, b, pos)?;
                // fewer than n true  <=>  at least |C| - n + 1 false
                let need = if pos { *n } else { (kids.len() + 1).saturating_sub(*n) };
                Node::Choose(need, kids)
            }
            Expr::ForPairs(v1, v2, body) | Expr::ForNPairs(_, v1, v2, body) => {
                let k = match e {
                    Expr::ForNPairs(n, ..) => Some(*n),
                    _ => None,
                };
                let grid = self.grid(v1, v2, body, b, pos)?;
                if pos {
                    Node::Match(k, grid)
                } else {
                    Node::Cover(k, grid)
                }
            }
        })
    }

    fn each(
        &self,
        v: &VariableName,
        body: &Expr,
        b: &mut Binding,
        pos: bool,
    ) -> Result<Vec<Node>, LogicError> {
        let mut out = Vec::new();
        for c in self.universe.instances(&v.category)? {
            let prev = b.insert(v.clone(), c.clone());
            let r = self.ground(body, b, pos);
            restore(b, v, prev);
            out.push(r?);
        }
        Ok(out)
    }

    fn grid(
        &self,
        v1: &VariableName,
        v2: &VariableName,
        body: &Expr,
        b: &mut Binding,
        pos: bool,
    ) -> Result<Grid, LogicError> {
        let rows = self.universe.instances(&v1.category)?;
        let mut cells = Vec::new();
        let mut cols = 0;
        for x in rows {
            let prev = b.insert(v1.clone(), x.clone());
            let r = self.each(v2, body, b, pos);
            restore(b, v1, prev);
            let row = r?;
            cols = row.len();
            cells.extend(row);
        }
        if rows.is_empty() {
            cols = self.universe.instances(&v2.category)?.len();
        }
        Ok(Grid {
            rows: rows.len(),
            cols,
            cells,
        })
    }
}

/// Pending work in the option search.
enum Task<'a> {
    Node(&'a Node),
    AnyOf(Vec<&'a Node>),
}

struct Search {
    assignment: BTreeMap<AtomicFormula, bool>,
    seen: BTreeSet<Vec<Literal>>,
    options: Vec<Vec<Literal>>,
    cap: usize,
    truncated: bool,
}

impl Search {
    /// Depth-first over alternatives; returns false once the search must stop.
    fn run<'a>(&mut self, stack: &mut Vec<Task<'a>>) -> bool {
        let Some(task) = stack.pop() else {
            return self.emit();
        };
        let go_on = match &task {
            Task::AnyOf(nodes) => self.branch(stack, nodes.iter().map(|n| vec![*n])),
            Task::Node(node) => self.step(stack, node),
        };
        stack.push(task);
        go_on
    }

    fn step<'a>(&mut self, stack: &mut Vec<Task<'a>>, node: &'a Node) -> bool {
        match node {
            Node::Lit(l) => {
                let value = !l.negated;
                match self.assignment.get(&l.formula) {
                    Some(v) if *v == value => self.run(stack),
                    Some(_) => true,
                    None => {
                        self.assignment.insert(l.formula.clone(), value);
                        let go_on = self.run(stack);
                        self.assignment.remove(&l.formula);
                        go_on
                    }
                }
            }
            Node::All(kids) => self.with(stack, kids.iter().map(Task::Node).collect()),
            Node::Any(kids) => self.branch(stack, kids.iter().map(|k| vec![k])),
            Node::Choose(n, kids) => self.branch(
                stack,
                kids.iter().combinations(*n),
            ),
            Node::Match(k, grid) => {
                let k = grid.pairs(*k);
                let alternatives = grid
                    .mappings(k)
                    .map(|m| m.into_iter().map(|(r, c)| grid.cell(r, c)).collect());
                self.branch(stack, alternatives)
            }
            Node::Cover(k, grid) => {
                let k = grid.pairs(*k);
                if grid.mapping_count(k) > self.cap as u128 {
                    self.truncated = true;
                    return false;
                }
                let tasks = grid
                    .mappings(k)
                    .map(|m| Task::AnyOf(m.into_iter().map(|(r, c)| grid.cell(r, c)).collect()))
                    .collect();
                self.with(stack, tasks)
            }
        }
    }

    fn with<'a>(&mut self, stack: &mut Vec<Task<'a>>, tasks: Vec<Task<'a>>) -> bool {
        let len = stack.len();
        stack.extend(tasks.into_iter().rev());
        let go_on = self.run(stack);
        stack.truncate(len);
        go_on
    }

    fn branch<'a>(
        &mut self,
        stack: &mut Vec<Task<'a>>,
        alternatives: impl Iterator<Item = Vec<&'a Node>>,
    ) -> bool {
        for alt in alternatives {
            if !self.with(stack, alt.into_iter().map(Task::Node).collect()) {
                return false;
            }
        }
        true
    }

    fn emit(&mut self) -> bool {
        let option: Vec<Literal> = self
            .assignment
            .iter()
            .map(|(f, v)| Literal {
                formula: f.clone(),
                negated: !v,
            })
            .collect();
        if self.seen.contains(&option) {
            return true;
        }
        if self.options.len() == self.cap {
            self.truncated = true;
            return false;
        }
        self.seen.insert(option.clone());
        self.options.push(option);
        true
    }
}

/// Flattens `goal` into options over `universe`.
///
/// Options are produced lazily in declaration order; branches that would
/// assert a literal and its negation are pruned, and duplicates dropped.
/// Stops with `truncated` set once more than `cap` distinct options exist.
pub fn flatten(goal: &Expr, universe: &Universe, cap: usize) -> Result<GoalOptions, LogicError> {
    let root = Grounder { universe }.ground(goal, &mut Binding::new(), true)?;
    let mut search = Search {
        assignment: BTreeMap::new(),
        seen: BTreeSet::new(),
        options: Vec::new(),
        cap,
        truncated: false,
    };
    search.run(&mut vec![Task::Node(&root)]);
    Ok(GoalOptions {
        options: search.options,
        truncated: search.truncated,
    })
}
