//! Exhaustive enumeration of small closed terms.
//!
//! Terms are generated bottom-up by exact size and number of variables in
//! scope, with binders named after their scope depth; duplicates modulo
//! renaming (e.g. permuted `letrec` bindings) are removed afterwards by
//! canonical form.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::alpha::canonical;
use crate::name::Name;
use crate::signature::Signature;
use crate::syntax::{rename_apart, Alt, Binding, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Features {
    pub choice: bool,
    pub case: bool,
    pub letrec: bool,
    pub constructors: bool,
}

impl Features {
    pub const ALL: Features = Features { choice: true, case: true, letrec: true, constructors: true };
    pub const NONE: Features = Features { choice: false, case: false, letrec: false, constructors: false };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumParams {
    pub sig: Signature,
    pub max_size: usize,
    pub max_letrec_bindings: usize,
    /// Largest number of variables in scope at any point.
    pub max_binders: usize,
    pub features: Features,
    /// Also generate constructors applied to fewer arguments than their
    /// arity.
    pub partial_constructors: bool,
}

impl EnumParams {
    pub fn new(sig: Signature, max_size: usize) -> Self {
        EnumParams {
            sig,
            max_size,
            max_letrec_bindings: 2,
            max_binders: 2,
            features: Features::ALL,
            partial_constructors: false,
        }
    }
}

/// Name of the `i`-th variable in scope.
pub(crate) fn level(i: usize) -> Name {
    Name::from(format!("v{i}"))
}

/// All ways to write `total` as an ordered sum of `parts` positive sizes.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Level naming fixes every binder name except the order of names within a
/// `letrec` group, so only terms with a group of two or more bindings can
/// have alpha-equivalent twins.
pub(crate) fn may_have_twins(e: &Expr) -> bool {
    let mut found = false;
    e.visit(&mut |n| {
        if let Expr::Letrec(bs, _) = n {
            found |= bs.len() > 1;
        }
    });
    found
}

fn fingerprint(e: &Expr) -> (u64, u64) {
    let c = canonical(e);
    let mut a = DefaultHasher::new();
    c.hash(&mut a);
    let mut b = DefaultHasher::new();
    0x9e37_79b9_7f4a_7c15_u64.hash(&mut b);
    c.hash(&mut b);
    (a.finish(), b.finish())
}

pub(crate) struct Gen<'a> {
    p: &'a EnumParams,
    memo: HashMap<(usize, usize), Vec<Expr>>,
}

impl<'a> Gen<'a> {
    pub(crate) fn new(p: &'a EnumParams) -> Self {
        Gen { p, memo: HashMap::new() }
    }

    /// Terms of exactly size `n` over `k` variables in scope, deduplicated.
    pub(crate) fn exact(&mut self, n: usize, k: usize) -> &[Expr] {
        if !self.memo.contains_key(&(n, k)) {
            let mut seen = HashSet::new();
            let mut v = Vec::new();
            self.each(n, k, &mut |e| {
                if !may_have_twins(&e) || seen.insert(canonical(&e)) {
                    v.push(e);
                }
            });
            self.memo.insert((n, k), v);
        }
        &self.memo[&(n, k)]
    }

    /// Calls `emit` on each combination of one term per shape.
    fn product(&mut self, shapes: &[(usize, usize)], emit: &mut dyn FnMut(Vec<Expr>)) {
        for &(n, k) in shapes {
            if self.exact(n, k).is_empty() {
                return;
            }
        }
        let lists: Vec<&[Expr]> = shapes.iter().map(|s| self.memo[s].as_slice()).collect();
        let mut idx = vec![0; lists.len()];
        loop {
            emit(idx.iter().zip(&lists).map(|(&i, l)| l[i].clone()).collect());
            let mut d = lists.len();
            loop {
                if d == 0 {
                    return;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < lists[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    fn each(&mut self, n: usize, k: usize, emit: &mut dyn FnMut(Expr)) {
        let p = self.p;
        let f = p.features;
        if n == 1 {
            (0..k).for_each(|i| emit(Expr::Var(level(i))));
        }
        if f.constructors {
            for c in p.sig.constructors() {
                let least = if p.partial_constructors { 0 } else { c.arity };
                for m in least..=c.arity {
                    for parts in compositions(n - 1, m) {
                        let shapes: Vec<_> = parts.iter().map(|&s| (s, k)).collect();
                        self.product(&shapes, &mut |args| emit(Expr::Con(c.clone(), args)));
                    }
                }
            }
        }
        if n >= 2 && k < p.max_binders {
            for b in self.exact(n - 1, k + 1).to_vec() {
                emit(Expr::lam(level(k), b));
            }
        }
        if n >= 3 {
            for parts in compositions(n - 1, 2) {
                let shapes = [(parts[0], k), (parts[1], k)];
                self.product(&shapes, &mut |pair| {
                    let [fun, arg]: [Expr; 2] = pair.try_into().expect("two");
                    // A constructor with spare arity absorbs the argument,
                    // which is generated as a constructor term already.
                    if let Expr::Con(c, args) = &fun {
                        if args.len() < c.arity {
                            return;
                        }
                    }
                    emit(Expr::App(Box::new(fun), Box::new(arg)));
                });
                if f.choice {
                    self.product(&shapes, &mut |pair| {
                        let [l, r]: [Expr; 2] = pair.try_into().expect("two");
                        emit(Expr::choice(l, r));
                    });
                }
            }
        }
        if f.case {
            for ty in p.sig.types() {
                let cons = &ty.constructors;
                if cons.iter().any(|c| k + c.arity > p.max_binders) || n < 2 + cons.len() {
                    continue;
                }
                for parts in compositions(n - 1, 1 + cons.len()) {
                    let mut shapes = vec![(parts[0], k)];
                    shapes.extend(cons.iter().zip(&parts[1..]).map(|(c, &s)| (s, k + c.arity)));
                    self.product(&shapes, &mut |row| {
                        let mut it = row.into_iter();
                        let scrut = it.next().expect("scrutinee");
                        let alts = cons
                            .iter()
                            .zip(it)
                            .map(|(c, rhs)| Alt {
                                con: c.name.clone(),
                                vars: (k..k + c.arity).map(level).collect(),
                                rhs,
                            })
                            .collect();
                        emit(Expr::case(ty.name.clone(), scrut, alts));
                    });
                }
            }
        }
        if f.letrec {
            for m in 1..=p.max_letrec_bindings {
                if k + m > p.max_binders || n < 2 * m + 2 {
                    continue;
                }
                for parts in compositions(n - 1 - m, m + 1) {
                    let shapes: Vec<_> = parts.iter().map(|&s| (s, k + m)).collect();
                    self.product(&shapes, &mut |row| {
                        let mut it = row.into_iter();
                        let bs = (k..k + m).map(|i| Binding::new(level(i), it.next().expect("rhs"))).collect();
                        emit(Expr::Letrec(bs, Box::new(it.next().expect("body"))));
                    });
                }
            }
        }
    }
}

/// Calls `f` on every closed term up to `p.max_size`, one per alpha class,
/// by increasing size and then in a fixed generation order.
pub fn for_each_term(p: &EnumParams, mut f: impl FnMut(Expr)) {
    let mut g = Gen::new(p);
    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    for n in 1..=p.max_size {
        g.each(n, 0, &mut |e| {
            if !may_have_twins(&e) || seen.insert(fingerprint(&e)) {
                f(rename_apart(&e));
            }
        });
    }
}

pub fn enumerate_terms(p: &EnumParams) -> Vec<Expr> {
    let mut out = Vec::new();
    for_each_term(p, |e| out.push(e));
    out
}

pub fn count_terms(p: &EnumParams) -> usize {
    let mut n = 0;
    for_each_term(p, |_| n += 1);
    n
}
