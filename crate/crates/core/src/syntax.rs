//! Abstract syntax of expressions.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::name::{FreshSupply, Name};

/// A constructor together with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Constructor {
    pub name: Name,
    pub arity: usize,
}

impl Constructor {
    pub fn new(name: &str, arity: usize) -> Self {
        Constructor { name: Name::new(name), arity }
    }
}

/// One `letrec` binding `name = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binding {
    pub name: Name,
    pub rhs: Expr,
}

impl Binding {
    pub fn new(name: impl Into<Name>, rhs: Expr) -> Self {
        Binding { name: name.into(), rhs }
    }
}

/// A case alternative `(C y1 .. yn) -> rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alt {
    pub con: Name,
    pub vars: Vec<Name>,
    pub rhs: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Var(Name),
    /// Constructor application with at most `arity` arguments.
    Con(Constructor, Vec<Expr>),
    Choice(Box<Expr>, Box<Expr>),
    /// `case[T] scrutinee of {alts}`; alternatives are kept in declaration order.
    Case(Name, Box<Expr>, Vec<Alt>),
    App(Box<Expr>, Box<Expr>),
    Lam(Name, Box<Expr>),
    /// Never has an empty binding list.
    Letrec(Vec<Binding>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<Name>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn con(c: &Constructor, args: Vec<Expr>) -> Expr {
        Expr::Con(c.clone(), args)
    }

    pub fn lam(x: impl Into<Name>, body: Expr) -> Expr {
        Expr::Lam(x.into(), Box::new(body))
    }

    pub fn choice(l: Expr, r: Expr) -> Expr {
        Expr::Choice(Box::new(l), Box::new(r))
    }

    pub fn case(ty: impl Into<Name>, scrut: Expr, alts: Vec<Alt>) -> Expr {
        Expr::Case(ty.into(), Box::new(scrut), alts)
    }

    /// Application. A constructor application with room for another argument
    /// absorbs it, since `((c t1) t2)` and `(c t1 t2)` denote the same term.
    pub fn app(f: Expr, a: Expr) -> Expr {
        match f {
            Expr::Con(c, mut args) if args.len() < c.arity => {
                args.push(a);
                Expr::Con(c, args)
            }
            f => Expr::App(Box::new(f), Box::new(a)),
        }
    }

    /// `letrec`; an empty binding list yields the body itself.
    pub fn letrec(bindings: Vec<Binding>, body: Expr) -> Expr {
        if bindings.is_empty() {
            body
        } else {
            Expr::Letrec(bindings, Box::new(body))
        }
    }

    pub fn is_lam(&self) -> bool {
        matches!(self, Expr::Lam(..))
    }

    pub fn is_letrec(&self) -> bool {
        matches!(self, Expr::Letrec(..))
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Expr::Var(x) => Some(x),
            _ => None,
        }
    }

    /// Node count; a `letrec` counts one extra node per binding.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) => 1,
            Expr::Con(_, args) => 1 + args.iter().map(Expr::size).sum::<usize>(),
            Expr::Choice(l, r) | Expr::App(l, r) => 1 + l.size() + r.size(),
            Expr::Case(_, s, alts) => 1 + s.size() + alts.iter().map(|a| a.rhs.size()).sum::<usize>(),
            Expr::Lam(_, b) => 1 + b.size(),
            Expr::Letrec(bs, body) => 1 + body.size() + bs.iter().map(|b| 1 + b.rhs.size()).sum::<usize>(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every binder occurrence (lambda, letrec, pattern), in pre-order.
    pub fn binders(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.visit(&mut |e| match e {
            Expr::Lam(x, _) => out.push(x.clone()),
            Expr::Letrec(bs, _) => out.extend(bs.iter().map(|b| b.name.clone())),
            Expr::Case(_, _, alts) => {
                for a in alts {
                    out.extend(a.vars.iter().cloned());
                }
            }
            _ => {}
        });
        out
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_names(&self) -> HashSet<Name> {
        let mut out: HashSet<Name> = self.binders().into_iter().collect();
        self.visit(&mut |e| {
            if let Expr::Var(x) = e {
                out.insert(x.clone());
            }
        });
        out
    }

    /// The distinct-variable convention: binders pairwise distinct and
    /// disjoint from the free variables.
    pub fn satisfies_dvc(&self) -> bool {
        let free = self.free_vars();
        let mut seen = HashSet::new();
        self.binders().into_iter().all(|b| !free.contains(&b) && seen.insert(b))
    }

    /// Number of free occurrences of `x`.
    pub fn count_free(&self, x: &Name) -> usize {
        match self {
            Expr::Var(y) => usize::from(y == x),
            Expr::Con(_, args) => args.iter().map(|a| a.count_free(x)).sum(),
            Expr::Choice(l, r) | Expr::App(l, r) => l.count_free(x) + r.count_free(x),
            Expr::Case(_, s, alts) => {
                s.count_free(x)
                    + alts.iter().filter(|a| !a.vars.contains(x)).map(|a| a.rhs.count_free(x)).sum::<usize>()
            }
            Expr::Lam(y, b) => {
                if y == x {
                    0
                } else {
                    b.count_free(x)
                }
            }
            Expr::Letrec(bs, body) => {
                if bs.iter().any(|b| &b.name == x) {
                    0
                } else {
                    body.count_free(x) + bs.iter().map(|b| b.rhs.count_free(x)).sum::<usize>()
                }
            }
        }
    }

    pub fn occurs_free(&self, x: &Name) -> bool {
        self.count_free(x) > 0
    }

    /// Pre-order traversal over all subexpressions.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Var(_) => {}
            Expr::Con(_, args) => args.iter().for_each(|a| a.visit(f)),
            Expr::Choice(l, r) | Expr::App(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Expr::Case(_, s, alts) => {
                s.visit(f);
                alts.iter().for_each(|a| a.rhs.visit(f));
            }
            Expr::Lam(_, b) => b.visit(f),
            Expr::Letrec(bs, body) => {
                bs.iter().for_each(|b| b.rhs.visit(f));
                body.visit(f);
            }
        }
    }

    pub fn count_nodes(&self, pred: impl Fn(&Expr) -> bool) -> usize {
        let mut n = 0;
        self.visit(&mut |e| {
            if pred(e) {
                n += 1
            }
        });
        n
    }

    /// Replaces free occurrences of variables according to `map`, without
    /// capture avoidance (callers guarantee the convention).
    pub fn rename_free(&self, map: &HashMap<Name, Name>) -> Expr {
        let mut scoped = map.clone();
        rename(self, &mut scoped)
    }
}

fn collect_free(e: &Expr, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match e {
        Expr::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Expr::Con(_, args) => args.iter().for_each(|a| collect_free(a, bound, out)),
        Expr::Choice(l, r) | Expr::App(l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
        Expr::Case(_, s, alts) => {
            collect_free(s, bound, out);
            for a in alts {
                let n = bound.len();
                bound.extend(a.vars.iter().cloned());
                collect_free(&a.rhs, bound, out);
                bound.truncate(n);
            }
        }
        Expr::Lam(x, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        Expr::Letrec(bs, body) => {
            let n = bound.len();
            bound.extend(bs.iter().map(|b| b.name.clone()));
            bs.iter().for_each(|b| collect_free(&b.rhs, bound, out));
            collect_free(body, bound, out);
            bound.truncate(n);
        }
    }
}

fn rename(e: &Expr, map: &mut HashMap<Name, Name>) -> Expr {
    // Binders shadow entries of the map for the duration of their scope.
    fn shadow(map: &mut HashMap<Name, Name>, names: &[Name]) -> Vec<(Name, Option<Name>)> {
        names.iter().map(|x| (x.clone(), map.remove(x))).collect()
    }
    fn restore(map: &mut HashMap<Name, Name>, saved: Vec<(Name, Option<Name>)>) {
        for (k, v) in saved.into_iter().rev() {
            if let Some(v) = v {
                map.insert(k, v);
            }
        }
    }
    match e {
        Expr::Var(x) => Expr::Var(map.get(x).cloned().unwrap_or_else(|| x.clone())),
        Expr::Con(c, args) => Expr::Con(c.clone(), args.iter().map(|a| rename(a, map)).collect()),
        Expr::Choice(l, r) => Expr::choice(rename(l, map), rename(r, map)),
        Expr::App(l, r) => Expr::App(Box::new(rename(l, map)), Box::new(rename(r, map))),
        Expr::Case(t, s, alts) => {
            let s = rename(s, map);
            let alts = alts
                .iter()
                .map(|a| {
                    let saved = shadow(map, &a.vars);
                    let rhs = rename(&a.rhs, map);
                    restore(map, saved);
                    Alt { con: a.con.clone(), vars: a.vars.clone(), rhs }
                })
                .collect();
            Expr::Case(t.clone(), Box::new(s), alts)
        }
        Expr::Lam(x, b) => {
            let saved = shadow(map, std::slice::from_ref(x));
            let b = rename(b, map);
            restore(map, saved);
            Expr::lam(x.clone(), b)
        }
        Expr::Letrec(bs, body) => {
            let names: Vec<Name> = bs.iter().map(|b| b.name.clone()).collect();
            let saved = shadow(map, &names);
            let bs = bs.iter().map(|b| Binding::new(b.name.clone(), rename(&b.rhs, map))).collect();
            let body = rename(body, map);
            restore(map, saved);
            Expr::Letrec(bs, Box::new(body))
        }
    }
}

/// Alpha-renames every binder of `e` to a name that is fresh with respect to
/// `avoid`, to the names of `e`, and to every name handed out before.
pub fn freshen(e: &Expr, avoid: &HashSet<Name>) -> Expr {
    let mut supply = FreshSupply::with_used(avoid.iter().cloned().chain(e.all_names()));
    freshen_with(e, &mut supply)
}

/// [`freshen`] drawing names from an existing supply.
pub fn freshen_with(e: &Expr, supply: &mut FreshSupply) -> Expr {
    rebind(e, &mut HashMap::new(), &mut |x| supply.fresh(x))
}

/// Restores the distinct-variable convention: binders that clash with a free
/// variable or an earlier binder are renamed; all others keep their name.
pub fn rename_apart(e: &Expr) -> Expr {
    let mut supply = FreshSupply::with_used(e.all_names());
    let mut seen: HashSet<Name> = e.free_vars().into_iter().collect();
    rebind(e, &mut HashMap::new(), &mut |x| {
        if seen.insert(x.clone()) {
            x.clone()
        } else {
            let y = supply.fresh(x);
            seen.insert(y.clone());
            y
        }
    })
}

fn rebind(e: &Expr, env: &mut HashMap<Name, Name>, pick: &mut impl FnMut(&Name) -> Name) -> Expr {
    fn enter(env: &mut HashMap<Name, Name>, x: &Name, y: Name) -> (Name, Option<Name>) {
        (x.clone(), env.insert(x.clone(), y))
    }
    fn leave(env: &mut HashMap<Name, Name>, saved: Vec<(Name, Option<Name>)>) {
        for (k, v) in saved.into_iter().rev() {
            match v {
                Some(v) => env.insert(k, v),
                None => env.remove(&k),
            };
        }
    }
    match e {
        Expr::Var(x) => Expr::Var(env.get(x).cloned().unwrap_or_else(|| x.clone())),
        Expr::Con(c, args) => Expr::Con(c.clone(), args.iter().map(|a| rebind(a, env, pick)).collect()),
        Expr::Choice(l, r) => Expr::choice(rebind(l, env, pick), rebind(r, env, pick)),
        Expr::App(l, r) => Expr::App(Box::new(rebind(l, env, pick)), Box::new(rebind(r, env, pick))),
        Expr::Case(t, s, alts) => {
            let s = rebind(s, env, pick);
            let alts = alts
                .iter()
                .map(|a| {
                    let vars: Vec<Name> = a.vars.iter().map(&mut *pick).collect();
                    let saved = a.vars.iter().zip(&vars).map(|(x, y)| enter(env, x, y.clone())).collect();
                    let rhs = rebind(&a.rhs, env, pick);
                    leave(env, saved);
                    Alt { con: a.con.clone(), vars, rhs }
                })
                .collect();
            Expr::Case(t.clone(), Box::new(s), alts)
        }
        Expr::Lam(x, b) => {
            let y = pick(x);
            let saved = vec![enter(env, x, y.clone())];
            let b = rebind(b, env, pick);
            leave(env, saved);
            Expr::lam(y, b)
        }
        Expr::Letrec(bs, body) => {
            let names: Vec<Name> = bs.iter().map(|b| pick(&b.name)).collect();
            let saved = bs.iter().zip(&names).map(|(b, y)| enter(env, &b.name, y.clone())).collect();
            let bs = bs.iter().zip(names).map(|(b, y)| Binding::new(y, rebind(&b.rhs, env, pick))).collect();
            let body = rebind(body, env, pick);
            leave(env, saved);
            Expr::Letrec(bs, Box::new(body))
        }
    }
}
