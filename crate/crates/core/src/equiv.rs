//! Bounded falsification of the contextual preorder.
//!
//! `s ≤c t` fails when some context `C` and nd-count `D` give a converging
//! standard reduction of `C[s]` with nd-count `D` while `C[t]` has none with
//! nd-count at least `D`. Contexts are enumerated up to a size bound and
//! convergence is explored up to a step bound, so a verdict without a
//! counterexample proves nothing.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::alpha::canonical;
use crate::context::is_reduction_context;
use crate::enumerate::{compositions, for_each_term, level, may_have_twins, EnumParams, Features, Gen};
use crate::name::Name;
use crate::position::{replace_at, Position, Step};
use crate::redex::Rule;
use crate::signature::Signature;
use crate::standard::{converges_set, ConvergenceSet};
use crate::step::find_redexes;
use crate::step::merge_con_apps;
use crate::syntax::{rename_apart, Alt, Binding, Expr};

/// Name of the hole variable inside a context.
pub const HOLE: &str = "[]";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Restrict {
    AllContexts,
    ReductionContexts,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtxSpec {
    pub sig: Signature,
    pub max_ctx_size: usize,
    pub restrict_to: Restrict,
    /// Variables in scope at any point, including those the hole sees.
    pub max_binders: usize,
    pub max_letrec_bindings: usize,
    /// Branches explored per convergence check.
    pub branch_cap: usize,
}

impl CtxSpec {
    pub fn new(sig: Signature, max_ctx_size: usize, restrict_to: Restrict) -> Self {
        CtxSpec { sig, max_ctx_size, restrict_to, max_binders: 2, max_letrec_bindings: 1, branch_cap: 64 }
    }
}

/// A one-hole context: an expression with exactly one occurrence of the
/// hole variable, at `hole`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub expr: Expr,
    pub hole: Position,
}

impl Context {
    /// `C[e]`, capturing free variables of `e`; the result is renamed apart.
    pub fn plug(&self, e: &Expr) -> Expr {
        let filled = replace_at(&self.expr, &self.hole, e.clone()).expect("hole position is valid");
        rename_apart(&merge_con_apps(&filled))
    }

    pub fn size(&self) -> usize {
        self.expr.size()
    }
}

impl std::fmt::Display for Context {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.expr.fmt(f)
    }
}

fn hole() -> Expr {
    Expr::Var(Name::from(HOLE))
}

struct CtxGen<'a> {
    terms: Gen<'a>,
    p: &'a EnumParams,
    memo: HashMap<(usize, usize), Vec<Expr>>,
}

impl CtxGen<'_> {
    /// Contexts of exactly size `n` whose free variables are among the
    /// first `k` levels.
    fn exact(&mut self, n: usize, k: usize) -> Vec<Expr> {
        if let Some(v) = self.memo.get(&(n, k)) {
            return v.clone();
        }
        let mut out = Vec::new();
        self.each(n, k, &mut |e| out.push(e));
        let mut seen = HashSet::new();
        out.retain(|e| !may_have_twins(e) || seen.insert(canonical(e)));
        self.memo.insert((n, k), out.clone());
        out
    }

    /// For each choice of hole child among `shapes`, every combination of
    /// a context there and terms elsewhere.
    fn fill(&mut self, shapes: &[(usize, usize)], emit: &mut dyn FnMut(Vec<Expr>)) {
        for h in 0..shapes.len() {
            let lists: Vec<Vec<Expr>> = shapes
                .iter()
                .enumerate()
                .map(|(i, &(n, k))| if i == h { self.exact(n, k) } else { self.terms.exact(n, k).to_vec() })
                .collect();
            if lists.iter().any(Vec::is_empty) {
                continue;
            }
            let mut idx = vec![0; lists.len()];
            'odo: loop {
                emit(idx.iter().zip(&lists).map(|(&i, l)| l[i].clone()).collect());
                let mut d = lists.len();
                loop {
                    if d == 0 {
                        break 'odo;
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
    }

    fn each(&mut self, n: usize, k: usize, emit: &mut dyn FnMut(Expr)) {
        let p = self.p;
        if n == 1 {
            emit(hole());
            return;
        }
        if k < p.max_binders {
            for b in self.exact(n - 1, k + 1) {
                emit(Expr::lam(level(k), b));
            }
        }
        for c in p.sig.constructors() {
            for parts in compositions(n - 1, c.arity) {
                let shapes: Vec<_> = parts.iter().map(|&s| (s, k)).collect();
                self.fill(&shapes, &mut |args| emit(Expr::Con(c.clone(), args)));
            }
        }
        for parts in compositions(n - 1, 2) {
            let shapes = [(parts[0], k), (parts[1], k)];
            self.fill(&shapes, &mut |pair| {
                let [f, a]: [Expr; 2] = pair.try_into().expect("two");
                emit(Expr::App(Box::new(f), Box::new(a)));
            });
            self.fill(&shapes, &mut |pair| {
                let [l, r]: [Expr; 2] = pair.try_into().expect("two");
                emit(Expr::choice(l, r));
            });
        }
        for ty in p.sig.types() {
            let cons = &ty.constructors;
            if cons.iter().any(|c| k + c.arity > p.max_binders) || n < 2 + cons.len() {
                continue;
            }
            for parts in compositions(n - 1, 1 + cons.len()) {
                let mut shapes = vec![(parts[0], k)];
                shapes.extend(cons.iter().zip(&parts[1..]).map(|(c, &s)| (s, k + c.arity)));
                self.fill(&shapes, &mut |row| {
                    let mut it = row.into_iter();
                    let scrut = it.next().expect("scrutinee");
                    let alts = cons
                        .iter()
                        .zip(it)
                        .map(|(c, rhs)| Alt { con: c.name.clone(), vars: (k..k + c.arity).map(level).collect(), rhs })
                        .collect();
                    emit(Expr::case(ty.name.clone(), scrut, alts));
                });
            }
        }
        for m in 1..=p.max_letrec_bindings {
            if k + m > p.max_binders || n < 2 * m + 2 {
                continue;
            }
            for parts in compositions(n - 1 - m, m + 1) {
                let shapes: Vec<_> = parts.iter().map(|&s| (s, k + m)).collect();
                self.fill(&shapes, &mut |row| {
                    let mut it = row.into_iter();
                    let bs = (k..k + m).map(|i| Binding::new(level(i), it.next().expect("rhs"))).collect();
                    emit(Expr::Letrec(bs, Box::new(it.next().expect("body"))));
                });
            }
        }
    }
}

fn hole_position(e: &Expr) -> Position {
    fn go(e: &Expr, here: &Position) -> Option<Position> {
        if e.as_var().is_some_and(|x| x.as_str() == HOLE) {
            return Some(here.clone());
        }
        crate::position::children(e).into_iter().find_map(|(s, c): (Step, &Expr)| go(c, &here.child(s)))
    }
    go(e, &Position::root()).expect("context has a hole")
}

/// All one-hole contexts up to `spec.max_ctx_size`, by increasing size.
pub fn enumerate_contexts(spec: &CtxSpec) -> Vec<Context> {
    let p = EnumParams {
        sig: spec.sig.clone(),
        max_size: spec.max_ctx_size,
        max_letrec_bindings: spec.max_letrec_bindings,
        max_binders: spec.max_binders,
        features: Features::ALL,
        partial_constructors: false,
    };
    let mut g = CtxGen { terms: Gen::new(&p), p: &p, memo: HashMap::new() };
    let mut out = Vec::new();
    for n in 1..=spec.max_ctx_size {
        for e in g.exact(n, 0) {
            let hole = hole_position(&e);
            if spec.restrict_to == Restrict::ReductionContexts && !is_reduction_context(&e, &hole).unwrap_or(false) {
                continue;
            }
            out.push(Context { expr: e, hole });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum EquivVerdict {
    NoCounterexample {
        contexts_checked: usize,
        /// Contexts skipped because a convergence search hit its bounds.
        exhausted: usize,
    },
    Counterexample {
        context: String,
        d: usize,
        detail: String,
    },
}

impl EquivVerdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, EquivVerdict::Counterexample { .. })
    }

    pub fn exhausted(&self) -> bool {
        matches!(self, EquivVerdict::NoCounterexample { exhausted, .. } if *exhausted > 0)
    }
}

/// The least nd-count observed for `left` with no count at least as large
/// for `right`.
fn unmatched(left: &ConvergenceSet, right: &ConvergenceSet) -> Option<usize> {
    let best = right.max_count();
    left.counts().into_iter().find(|&d| best.is_none_or(|b| b < d))
}

/// Accumulates one direction of the comparison.
struct Side {
    checked: usize,
    exhausted: usize,
    found: Option<EquivVerdict>,
}

impl Side {
    fn new() -> Self {
        Side { checked: 0, exhausted: 0, found: None }
    }

    fn record(&mut self, c: &Context, left: &ConvergenceSet, right: &ConvergenceSet, names: (&Expr, &Expr)) {
        if self.found.is_some() {
            return;
        }
        self.checked += 1;
        if left.exhausted || right.exhausted {
            self.exhausted += 1;
            return;
        }
        if let Some(d) = unmatched(left, right) {
            let detail = format!(
                "{} converges with nd-count {d} (arms {:?}); {} converges with nd-counts {:?}",
                c.plug(names.0),
                left.witnesses[&d][0],
                c.plug(names.1),
                right.counts()
            );
            self.found = Some(EquivVerdict::Counterexample { context: c.to_string(), d, detail });
        }
    }

    fn verdict(self) -> EquivVerdict {
        self.found
            .unwrap_or(EquivVerdict::NoCounterexample { contexts_checked: self.checked, exhausted: self.exhausted })
    }
}

/// Both directions at once: the verdicts for `s ≤c t` and `t ≤c s`.
pub fn compare(
    s: &Expr,
    t: &Expr,
    contexts: &[Context],
    step_bound: usize,
    branch_cap: usize,
) -> (EquivVerdict, EquivVerdict) {
    let (mut st, mut ts) = (Side::new(), Side::new());
    for c in contexts {
        if st.found.is_some() && ts.found.is_some() {
            break;
        }
        let cs = converges_set(&c.plug(s), step_bound, branch_cap);
        let ct = converges_set(&c.plug(t), step_bound, branch_cap);
        st.record(c, &cs, &ct, (s, t));
        ts.record(c, &ct, &cs, (t, s));
    }
    (st.verdict(), ts.verdict())
}

/// Searches for a context refuting `s ≤c t`.
pub fn check_le_c(s: &Expr, t: &Expr, spec: &CtxSpec, step_bound: usize) -> EquivVerdict {
    check_le_c_in(s, t, &enumerate_contexts(spec), step_bound, spec.branch_cap)
}

pub fn check_le_c_in(s: &Expr, t: &Expr, contexts: &[Context], step_bound: usize, branch_cap: usize) -> EquivVerdict {
    let mut side = Side::new();
    for c in contexts {
        let cs = converges_set(&c.plug(s), step_bound, branch_cap);
        if !cs.converges() && !cs.exhausted {
            side.checked += 1;
            continue;
        }
        let ct = converges_set(&c.plug(t), step_bound, branch_cap);
        side.record(c, &cs, &ct, (s, t));
        if side.found.is_some() {
            break;
        }
    }
    side.verdict()
}

/// Up to `limit` redex/reduct pairs of `rule` at any position, from the
/// enumerated terms in order, distinct modulo renaming.
pub fn redex_pairs(rule: Rule, p: &EnumParams, limit: usize) -> Vec<(Expr, Expr)> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut n = 1;
    while out.len() < limit && n <= p.max_size {
        let q = EnumParams { max_size: n, ..p.clone() };
        let mut size_n = Vec::new();
        for_each_term(&q, |e| {
            if e.size() == n {
                size_n.push(e);
            }
        });
        for e in size_n {
            for (_, t) in find_redexes(&e, rule) {
                if out.len() < limit && seen.insert((canonical(&e), canonical(&t))) {
                    out.push((e.clone(), t));
                }
            }
        }
        n += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContextLemmaReport {
    pub reduction_contexts: EquivVerdict,
    pub all_contexts: EquivVerdict,
    /// Reduction contexts found nothing but some context did.
    pub violation: bool,
}

/// Compares the verdicts of `s ≤c t` over reduction contexts and over all
/// contexts with the same bounds.
pub fn check_context_lemma_instance(s: &Expr, t: &Expr, spec: &CtxSpec, step_bound: usize) -> ContextLemmaReport {
    let r = check_le_c(s, t, &CtxSpec { restrict_to: Restrict::ReductionContexts, ..spec.clone() }, step_bound);
    let a = check_le_c(s, t, &CtxSpec { restrict_to: Restrict::AllContexts, ..spec.clone() }, step_bound);
    let violation = matches!(r, EquivVerdict::NoCounterexample { exhausted: 0, .. }) && a.is_counterexample();
    ContextLemmaReport { reduction_contexts: r, all_contexts: a, violation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn p(s: &str) -> Expr {
        parse(s, &Signature::bool_list()).unwrap()
    }

    fn spec(n: usize, r: Restrict) -> CtxSpec {
        CtxSpec::new(Signature::bool_list(), n, r)
    }

    #[test]
    fn context_shapes() {
        let all = enumerate_contexts(&spec(5, Restrict::AllContexts));
        assert_eq!(all[0].expr, hole());
        assert_eq!(all.iter().filter(|c| c.size() == 1).count(), 1);
        let shown: Vec<String> = all.iter().map(|c| c.to_string()).collect();
        assert!(shown.iter().any(|s| s == "\\v0.[]"), "{shown:?}");
        assert!(shown.iter().any(|s| s.starts_with("case[Bool] [] of")), "{shown:?}");
        let red = enumerate_contexts(&spec(5, Restrict::ReductionContexts));
        assert!(red.len() < all.len());
        assert!(red.iter().all(|c| !matches!(c.expr, Expr::Lam(..))));
        assert!(red.iter().any(|c| c.to_string() == "([] True)"));
        for c in &all {
            assert_eq!(c.expr.count_free(&Name::from(HOLE)), 1, "{c}");
        }
    }

    #[test]
    fn plugging_captures() {
        let c = Context { expr: Expr::lam("v0", hole()), hole: Position::root().child(Step::LamBody) };
        let e = c.plug(&Expr::var("v0"));
        assert!(e.is_closed(), "{e}");
    }

    #[test]
    fn reflexive_and_nd() {
        let sp = spec(5, Restrict::AllContexts);
        let s = p("choice True False");
        assert!(!check_le_c(&s, &s, &sp, 100).is_counterexample());
        let v = check_le_c(&s, &p("True"), &sp, 100);
        assert!(v.is_counterexample(), "{v:?}");
        let rep = check_context_lemma_instance(&p("True"), &p("False"), &spec(6, Restrict::AllContexts), 100);
        assert!(rep.reduction_contexts.is_counterexample() && rep.all_contexts.is_counterexample());
        assert!(!rep.violation);
    }

    #[test]
    fn ldel_pair_survives() {
        let sp = spec(5, Restrict::AllContexts);
        let (s, t) = (p("((letrec x=c in \\y.y) d)"), p("((\\y.y) d)"));
        let contexts = enumerate_contexts(&sp);
        let (a, b) = compare(&s, &t, &contexts, 200, 64);
        assert!(!a.is_counterexample() && !b.is_counterexample(), "{a:?} {b:?}");
    }
}
