//! Independent reference implementations used to check the library.
//!
//! Everything here is deliberately naive: quantifiers are expanded by brute
//! force straight from the taxonomy, pairs quantifiers enumerate every
//! injective mapping, and activity volume comes from minimum implicants found
//! by exhaustive search over partial truth assignments.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use bddl::syntax::{AtomicFormula, CategoryName, ConstantName, Expr, Term, VariableName};
use bddl::taxonomy::Taxonomy;
use bddl::world::FactSet;
use rand::seq::IndexedRandom;
use rand::Rng;

pub type Objects = Vec<(ConstantName, CategoryName)>;
pub type Env = BTreeMap<VariableName, ConstantName>;

pub fn cat(s: &str) -> CategoryName {
    s.parse().unwrap()
}

pub fn constant(s: &str) -> ConstantName {
    s.parse().unwrap()
}

/// `n` instances of each category, named `<category>_1..n`.
pub fn objects(spec: &[(&str, usize)]) -> Objects {
    spec.iter()
        .flat_map(|(c, n)| (1..=*n).map(move |i| (constant(&format!("{c}_{i}")), cat(c))))
        .collect()
}

/// Constants whose declared category descends from `c`, by walking parents.
pub fn members(c: &CategoryName, objs: &Objects, tax: &Taxonomy) -> Vec<ConstantName> {
    objs.iter()
        .filter(|(_, declared)| descends(declared, c, tax))
        .map(|(k, _)| k.clone())
        .collect()
}

fn descends(child: &CategoryName, ancestor: &CategoryName, tax: &Taxonomy) -> bool {
    if child == ancestor {
        return true;
    }
    let synset = tax.synset(child).expect("known category");
    synset.parents.iter().any(|p| descends(p, ancestor, tax))
}

pub fn ground(atom: &AtomicFormula, env: &Env) -> AtomicFormula {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Variable(v) => Term::Constant(env[v].clone()),
            other => other.clone(),
        })
        .collect();
    AtomicFormula { predicate: atom.predicate.clone(), args }
}

/// Reference semantics by exhaustive expansion.
pub fn naive_eval(e: &Expr, facts: &FactSet, env: &mut Env, objs: &Objects, tax: &Taxonomy) -> bool {
    let with = |v: &VariableName, c: &ConstantName, body: &Expr, env: &mut Env| {
        let saved = env.insert(v.clone(), c.clone());
        let r = naive_eval(body, facts, env, objs, tax);
        match saved {
            Some(s) => env.insert(v.clone(), s),
            None => env.remove(v),
        };
        r
    };
    match e {
        Expr::Atom(a) => facts.contains(&ground(a, env)),
        Expr::Not(x) => !naive_eval(x, facts, env, objs, tax),
        Expr::And(xs) => xs.iter().all(|x| naive_eval(x, facts, env, objs, tax)),
        Expr::Or(xs) => xs.iter().any(|x| naive_eval(x, facts, env, objs, tax)),
        Expr::Imply(p, q) => !naive_eval(p, facts, env, objs, tax) || naive_eval(q, facts, env, objs, tax),
        Expr::Iff(p, q) => naive_eval(p, facts, env, objs, tax) == naive_eval(q, facts, env, objs, tax),
        Expr::ForAll(v, body) => members(&v.category, objs, tax).iter().all(|c| with(v, c, body, env)),
        Expr::Exists(v, body) => members(&v.category, objs, tax).iter().any(|c| with(v, c, body, env)),
        Expr::ForN(n, v, body) => {
            members(&v.category, objs, tax).iter().filter(|c| with(v, c, body, env)).count() >= *n
        }
        Expr::ForPairs(v1, v2, body) | Expr::ForNPairs(_, v1, v2, body) => {
            let xs = members(&v1.category, objs, tax);
            let ys = members(&v2.category, objs, tax);
            let mut table = vec![vec![false; ys.len()]; xs.len()];
            for (i, x) in xs.iter().enumerate() {
                for (j, y) in ys.iter().enumerate() {
                    let mut env2 = env.clone();
                    env2.insert(v1.clone(), x.clone());
                    env2.insert(v2.clone(), y.clone());
                    table[i][j] = naive_eval(body, facts, &mut env2, objs, tax);
                }
            }
            let need = match e {
                Expr::ForNPairs(n, ..) => *n,
                _ => xs.len().min(ys.len()),
            };
            best_injective(&table, 0, &mut vec![false; ys.len()], need) >= need
        }
    }
}

/// Largest number of true cells picked by an injective row→column mapping,
/// found by trying every mapping (rows may stay unmapped). Stops early at `need`.
fn best_injective(table: &[Vec<bool>], row: usize, used: &mut Vec<bool>, need: usize) -> usize {
    if row == table.len() || need == 0 {
        return 0;
    }
    let mut best = best_injective(table, row + 1, used, need);
    for col in 0..used.len() {
        if table[row][col] && !used[col] {
            used[col] = true;
            best = best.max(1 + best_injective(table, row + 1, used, need - 1));
            used[col] = false;
            if best >= need {
                break;
            }
        }
    }
    best
}

/// Every ground atom an expression can mention, found by expansion.
pub fn ground_atoms(e: &Expr, objs: &Objects, tax: &Taxonomy) -> BTreeSet<AtomicFormula> {
    fn go(e: &Expr, env: &mut Env, objs: &Objects, tax: &Taxonomy, out: &mut BTreeSet<AtomicFormula>) {
        let vars: Vec<(&VariableName, &Expr)> = match e {
            Expr::Atom(a) => {
                out.insert(ground(a, env));
                return;
            }
            Expr::Not(x) => return go(x, env, objs, tax, out),
            Expr::And(xs) | Expr::Or(xs) => {
                xs.iter().for_each(|x| go(x, env, objs, tax, out));
                return;
            }
            Expr::Imply(p, q) | Expr::Iff(p, q) => {
                go(p, env, objs, tax, out);
                return go(q, env, objs, tax, out);
            }
            Expr::ForAll(v, b) | Expr::Exists(v, b) | Expr::ForN(_, v, b) => vec![(v, b)],
            Expr::ForPairs(v1, v2, b) | Expr::ForNPairs(_, v1, v2, b) => {
                for x in members(&v1.category, objs, tax) {
                    for y in members(&v2.category, objs, tax) {
                        let mut env2 = env.clone();
                        env2.insert(v1.clone(), x.clone());
                        env2.insert(v2.clone(), y);
                        go(b, &mut env2, objs, tax, out);
                    }
                }
                return;
            }
        };
        for (v, b) in vars {
            for c in members(&v.category, objs, tax) {
                let mut env2 = env.clone();
                env2.insert(v.clone(), c);
                go(b, &mut env2, objs, tax, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(e, &mut Env::new(), objs, tax, &mut out);
    out
}

/// Minimum implicants of `e` over its ground atoms: the smallest partial
/// assignments all of whose completions satisfy `e`. Returns their size and
/// how many there are.
pub fn minimum_implicants(e: &Expr, objs: &Objects, tax: &Taxonomy) -> Option<(usize, usize)> {
    let atoms: Vec<AtomicFormula> = ground_atoms(e, objs, tax).into_iter().collect();
    let n = atoms.len();
    assert!(n <= 12, "too many atoms for exhaustive search: {n}");
    // truth table over all full assignments
    let sat: Vec<bool> = (0..1u32 << n)
        .map(|bits| {
            let facts: FactSet = (0..n).filter(|i| bits >> i & 1 == 1).map(|i| atoms[i].clone()).collect();
            naive_eval(e, &facts, &mut Env::new(), objs, tax)
        })
        .collect();
    for size in 0..=n {
        let mut count = 0;
        for fixed in subsets(n, size) {
            let mask: u32 = fixed.iter().map(|i| 1 << i).sum();
            for values in 0..1u32 << size {
                let base: u32 = fixed.iter().enumerate().filter(|(k, _)| values >> k & 1 == 1).map(|(_, i)| 1 << i).sum();
                // every completion of the free atoms
                let free = !mask & ((1u32 << n) - 1);
                let mut sub = free;
                let mut all = true;
                loop {
                    if !sat[(base | sub) as usize] {
                        all = false;
                        break;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & free;
                }
                if all {
                    count += 1;
                }
            }
        }
        if count > 0 {
            return Some((size, count));
        }
    }
    None
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Random goal expressions over a fixed vocabulary.
pub struct ExprGen<'a> {
    pub objs: &'a Objects,
    /// Categories quantifiers may range over.
    pub categories: Vec<CategoryName>,
    pub unary: Vec<&'static str>,
    pub binary: Vec<&'static str>,
    pub max_depth: usize,
}

impl ExprGen<'_> {
    pub fn expr(&self, rng: &mut impl Rng, depth: usize, scope: &mut Vec<VariableName>) -> Expr {
        if depth >= self.max_depth || rng.random_bool(0.25) {
            return Expr::Atom(self.atom(rng, scope));
        }
        let free: Vec<CategoryName> = self
            .categories
            .iter()
            .filter(|c| !scope.iter().any(|v| &v.category == *c))
            .cloned()
            .collect();
        let kind = rng.random_range(0..11);
        let sub = |rng: &mut _, scope: &mut Vec<VariableName>| Box::new(self.expr(rng, depth + 1, scope));
        match kind {
            0 => Expr::Not(sub(rng, scope)),
            1 | 2 => {
                let n = rng.random_range(1..=3);
                let kids = (0..n).map(|_| *sub(rng, scope)).collect();
                if kind == 1 {
                    Expr::And(kids)
                } else {
                    Expr::Or(kids)
                }
            }
            3 => Expr::Imply(sub(rng, scope), sub(rng, scope)),
            4 => Expr::Iff(sub(rng, scope), sub(rng, scope)),
            _ if free.is_empty() => Expr::Atom(self.atom(rng, scope)),
            5..=8 => {
                let v = VariableName::new(free.choose(rng).unwrap().clone());
                scope.push(v.clone());
                let body = sub(rng, scope);
                scope.pop();
                match kind {
                    5 => Expr::ForAll(v, body),
                    6 => Expr::Exists(v, body),
                    _ => Expr::ForN(rng.random_range(0..=3), v, body),
                }
            }
            _ if free.len() < 2 => Expr::Atom(self.atom(rng, scope)),
            _ => {
                let mut pick = free.clone();
                let a = pick.remove(rng.random_range(0..pick.len()));
                let b = pick.remove(rng.random_range(0..pick.len()));
                let (v1, v2) = (VariableName::new(a), VariableName::new(b));
                scope.push(v1.clone());
                scope.push(v2.clone());
                let body = sub(rng, scope);
                scope.truncate(scope.len() - 2);
                if kind == 9 {
                    Expr::ForPairs(v1, v2, body)
                } else {
                    Expr::ForNPairs(rng.random_range(0..=3), v1, v2, body)
                }
            }
        }
    }

    fn term(&self, rng: &mut impl Rng, scope: &[VariableName]) -> Term {
        if !scope.is_empty() && rng.random_bool(0.7) {
            Term::Variable(scope.choose(rng).unwrap().clone())
        } else {
            Term::Constant(self.objs.choose(rng).unwrap().0.clone())
        }
    }

    fn atom(&self, rng: &mut impl Rng, scope: &[VariableName]) -> AtomicFormula {
        if rng.random_bool(0.5) {
            let p = self.unary.choose(rng).unwrap();
            AtomicFormula::new(p, vec![self.term(rng, scope)])
        } else {
            let p = self.binary.choose(rng).unwrap();
            AtomicFormula::new(p, vec![self.term(rng, scope), self.term(rng, scope)])
        }
    }
}

/// Every unary and binary ground atom over the objects.
pub fn all_atoms(objs: &Objects, unary: &[&str], binary: &[&str]) -> Vec<AtomicFormula> {
    let mut out = Vec::new();
    for (a, _) in objs {
        for p in unary {
            out.push(AtomicFormula::new(p, vec![Term::Constant(a.clone())]));
        }
        for (b, _) in objs {
            for p in binary {
                out.push(AtomicFormula::new(p, vec![Term::Constant(a.clone()), Term::Constant(b.clone())]));
            }
        }
    }
    out
}

pub fn random_facts(rng: &mut impl Rng, atoms: &[AtomicFormula], density: f64) -> FactSet {
    atoms.iter().filter(|_| rng.random_bool(density)).cloned().collect()
}
