//! Alpha-equivalence modulo permutation of `letrec` bindings.
//!
//! [`canonical`] renames every bound variable to `%<n>`, numbering binders in
//! traversal order, and reorders `letrec` bindings by the order in which the
//! body (and then the already placed bindings) first reference them. Bindings
//! unreachable from the body are placed by comparing their canonical
//! right-hand sides. Two expressions are alpha-equal iff their canonical forms
//! are structurally equal.

use crate::name::Name;
use crate::syntax::{Alt, Binding, Expr};

#[derive(Clone)]
struct Slot {
    assigned: Option<Name>,
    frame: usize,
    index: usize,
}

#[derive(Clone, Default)]
struct State {
    slots: Vec<Slot>,
    env: Vec<(Name, usize)>,
    queues: Vec<Vec<usize>>,
    counter: usize,
}

impl State {
    fn next_name(&mut self) -> Name {
        let n = Name::from(format!("%{}", self.counter));
        self.counter += 1;
        n
    }

    fn bind_now(&mut self, x: &Name) -> Name {
        let n = self.next_name();
        let slot = self.slots.len();
        self.slots.push(Slot { assigned: Some(n.clone()), frame: usize::MAX, index: 0 });
        self.env.push((x.clone(), slot));
        n
    }

    fn lookup(&mut self, x: &Name) -> Option<Name> {
        let slot = self.env.iter().rev().find(|(y, _)| y == x).map(|&(_, s)| s)?;
        if let Some(n) = &self.slots[slot].assigned {
            return Some(n.clone());
        }
        let n = self.next_name();
        self.slots[slot].assigned = Some(n.clone());
        let frame = self.slots[slot].frame;
        self.queues[frame].push(slot);
        Some(n)
    }

    fn canon(&mut self, e: &Expr) -> Expr {
        match e {
            Expr::Var(x) => Expr::Var(self.lookup(x).unwrap_or_else(|| x.clone())),
            Expr::Con(c, args) => Expr::Con(c.clone(), args.iter().map(|a| self.canon(a)).collect()),
            Expr::Choice(l, r) => Expr::choice(self.canon(l), self.canon(r)),
            Expr::App(l, r) => Expr::App(Box::new(self.canon(l)), Box::new(self.canon(r))),
            Expr::Lam(x, b) => {
                let n = self.bind_now(x);
                let b = self.canon(b);
                self.env.pop();
                Expr::lam(n, b)
            }
            Expr::Case(t, s, alts) => {
                let s = self.canon(s);
                let alts = alts
                    .iter()
                    .map(|a| {
                        let vars: Vec<Name> = a.vars.iter().map(|x| self.bind_now(x)).collect();
                        let rhs = self.canon(&a.rhs);
                        self.env.truncate(self.env.len() - vars.len());
                        Alt { con: a.con.clone(), vars, rhs }
                    })
                    .collect();
                Expr::Case(t.clone(), Box::new(s), alts)
            }
            Expr::Letrec(bs, body) => self.canon_letrec(bs, body),
        }
    }

    fn canon_letrec(&mut self, bs: &[Binding], body: &Expr) -> Expr {
        let frame = self.queues.len();
        self.queues.push(Vec::new());
        let first_slot = self.slots.len();
        for (index, b) in bs.iter().enumerate() {
            let slot = self.slots.len();
            self.slots.push(Slot { assigned: None, frame, index });
            self.env.push((b.name.clone(), slot));
        }
        let body = self.canon(body);
        let mut out: Vec<Binding> = Vec::with_capacity(bs.len());
        let mut head = 0;
        loop {
            while head < self.queues[frame].len() {
                let slot = self.queues[frame][head];
                head += 1;
                let Slot { assigned, index, .. } = self.slots[slot].clone();
                let rhs = self.canon(&bs[index].rhs);
                out.push(Binding::new(assigned.expect("queued slots are assigned"), rhs));
            }
            if out.len() == bs.len() {
                break;
            }
            // Unreferenced bindings: pick the one with the least canonical rhs.
            let mut best: Option<(Expr, usize)> = None;
            for slot in first_slot..first_slot + bs.len() {
                if self.slots[slot].assigned.is_some() {
                    continue;
                }
                let mut probe = self.clone();
                probe.slots[slot].assigned = Some(Name::new("%?"));
                let key = probe.canon(&bs[self.slots[slot].index].rhs);
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, slot));
                }
            }
            let (_, slot) = best.expect("some binding is unassigned");
            let n = self.next_name();
            self.slots[slot].assigned = Some(n);
            self.queues[frame].push(slot);
        }
        self.env.truncate(self.env.len() - bs.len());
        Expr::Letrec(out, Box::new(body))
    }
}

/// Canonical representative of the alpha/permutation class of `e`.
pub fn canonical(e: &Expr) -> Expr {
    State::default().canon(e)
}

pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    a == b || canonical(a) == canonical(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Expr {
        Expr::var(x)
    }

    #[test]
    fn identity_classes() {
        assert!(alpha_eq(&Expr::lam("x", v("x")), &Expr::lam("y", v("y"))));
        assert!(!alpha_eq(&Expr::lam("x", Expr::lam("y", v("x"))), &Expr::lam("x", Expr::lam("y", v("y")))));
        assert!(!alpha_eq(&Expr::lam("x", v("z")), &Expr::lam("x", v("w"))));
    }

    #[test]
    fn letrec_permutation() {
        let t = Expr::var("t");
        let f = Expr::var("f");
        let a = Expr::letrec(vec![Binding::new("a", t.clone()), Binding::new("b", f.clone())], v("a"));
        let b = Expr::letrec(vec![Binding::new("b", f), Binding::new("a", t)], v("a"));
        assert!(alpha_eq(&a, &b));
    }

    #[test]
    fn garbage_bindings_are_ordered_by_shape() {
        let a = Expr::letrec(
            vec![Binding::new("p", Expr::lam("u", v("u"))), Binding::new("q", v("q")), Binding::new("r", v("z"))],
            v("z"),
        );
        let b = Expr::letrec(
            vec![Binding::new("r2", v("z")), Binding::new("q2", v("q2")), Binding::new("p2", Expr::lam("w", v("w")))],
            v("z"),
        );
        assert!(alpha_eq(&a, &b));
    }

    #[test]
    fn shadowing_is_respected() {
        let a = Expr::lam("x", Expr::lam("x", v("x")));
        let b = Expr::lam("y", Expr::lam("z", v("z")));
        let c = Expr::lam("y", Expr::lam("z", v("y")));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
    }
}
