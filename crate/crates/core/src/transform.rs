//! Program transformations outside the base calculus: garbage collection,
//! reference compression and copying.

use std::collections::BTreeSet;

use crate::name::{FreshSupply, Name};
use crate::position::{replace_at, subterm, Position, Step};
use crate::redex::{Label, RuleError};
use crate::rules::target_letrec;
use crate::syntax::{freshen_with, Binding, Expr};

fn letrec_at<'a>(e: &'a Expr, pos: &Position, rule: &'static str) -> Result<(&'a [Binding], &'a Expr), RuleError> {
    match subterm(e, pos)? {
        Expr::Letrec(bs, body) => Ok((bs, body)),
        _ => Err(RuleError::shape(rule, "not a letrec")),
    }
}

/// Drops the binding at `pos` (a `letB(x)` position) when `x` occurs
/// nowhere else; drops the whole `letrec` if it was the only binding.
pub fn apply_ldel(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    let Some(Step::LetBind(x)) = pos.last() else {
        return Err(RuleError::shape("ldel", "position is not a binding"));
    };
    let lpos = pos.parent().expect("binding position has a parent");
    let (bs, body) = letrec_at(e, &lpos, "ldel")?;
    if !bs.iter().any(|b| &b.name == x) {
        return Err(RuleError::shape("ldel", format!("no binding for `{x}`")));
    }
    let used = body.occurs_free(x) || bs.iter().filter(|b| &b.name != x).any(|b| b.rhs.occurs_free(x));
    if used {
        return Err(RuleError::side("ldel", format!("`{x}` is still referenced")));
    }
    let kept = bs.iter().filter(|b| &b.name != x).cloned().collect();
    Ok(replace_at(e, &lpos, Expr::letrec(kept, body.clone()))?)
}

/// Drops the group of bindings `group` from the `letrec` at `pos`. The
/// remaining bindings and the body must not mention the group. Returns
/// `ldelcyc2` when every binding is dropped.
pub fn apply_ldelcyc(e: &Expr, pos: &Position, group: &[Name]) -> Result<(Expr, Label), RuleError> {
    let (bs, body) = letrec_at(e, pos, "ldelcyc")?;
    if group.is_empty() {
        return Err(RuleError::shape("ldelcyc", "empty group"));
    }
    for x in group {
        if !bs.iter().any(|b| &b.name == x) {
            return Err(RuleError::shape("ldelcyc", format!("no binding for `{x}`")));
        }
    }
    let kept: Vec<Binding> = bs.iter().filter(|b| !group.contains(&b.name)).cloned().collect();
    for x in group {
        if body.occurs_free(x) || kept.iter().any(|b| b.rhs.occurs_free(x)) {
            return Err(RuleError::side("ldelcyc", format!("`{x}` is referenced from the kept part")));
        }
    }
    let label = if kept.is_empty() { Label::Ldelcyc2 } else { Label::Ldelcyc1 };
    Ok((replace_at(e, pos, Expr::letrec(kept, body.clone()))?, label))
}

/// Removable groups of the `letrec` at `pos`: for each unreachable binder,
/// the smallest group containing it, plus the set of all unreachable
/// binders.
pub fn ldelcyc_groups(bs: &[Binding], body: &Expr) -> Vec<Vec<Name>> {
    let refs = |e: &Expr| -> BTreeSet<Name> {
        let fv = e.free_vars();
        bs.iter().map(|b| b.name.clone()).filter(|x| fv.contains(x)).collect()
    };
    let mut live: BTreeSet<Name> = refs(body);
    let mut todo: Vec<Name> = live.iter().cloned().collect();
    while let Some(x) = todo.pop() {
        let b = bs.iter().find(|b| b.name == x).expect("bound");
        for y in refs(&b.rhs) {
            if live.insert(y.clone()) {
                todo.push(y);
            }
        }
    }
    let dead: Vec<&Binding> = bs.iter().filter(|b| !live.contains(&b.name)).collect();
    let mut out: Vec<Vec<Name>> = Vec::new();
    for d in &dead {
        // Everything that refers to `d`, transitively, has to go with it.
        let mut g: BTreeSet<Name> = BTreeSet::from([d.name.clone()]);
        loop {
            let before = g.len();
            for b in &dead {
                if !g.contains(&b.name) && refs(&b.rhs).iter().any(|y| g.contains(y)) {
                    g.insert(b.name.clone());
                }
            }
            if g.len() == before {
                break;
            }
        }
        let g: Vec<Name> = bs.iter().map(|b| b.name.clone()).filter(|x| g.contains(x)).collect();
        if !out.contains(&g) {
            out.push(g);
        }
    }
    let all: Vec<Name> = dead.iter().map(|b| b.name.clone()).collect();
    if !all.is_empty() && !out.contains(&all) {
        out.push(all);
    }
    out
}

/// Replaces the occurrence of `x` at `pos` by `y`, where `x = y` is a
/// binding of the enclosing `letrec`.
pub fn apply_lcv(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    let (x, _, bs) = target_letrec(e, pos, "lcv")?;
    let b = bs.iter().find(|b| b.name == x).expect("bound");
    match &b.rhs {
        Expr::Var(y) if *y == x => Err(RuleError::side("lcv", "self-referential binding")),
        Expr::Var(y) => Ok(replace_at(e, pos, Expr::Var(y.clone()))?),
        _ => Err(RuleError::side("lcv", format!("`{x}` is not bound to a variable"))),
    }
}

/// Steps from the `letrec` at `lpos` down to `pos`.
fn relative<'a>(lpos: &Position, pos: &'a Position) -> &'a [Step] {
    &pos.steps()[lpos.len()..]
}

/// Copies the abstraction bound to the variable at `pos` into that
/// occurrence. The step is `cpt` if the occurrence is not under a lambda
/// below the `letrec`, `cpd` otherwise.
pub fn apply_cp(e: &Expr, pos: &Position) -> Result<(Expr, Label), RuleError> {
    let (x, lpos, bs) = target_letrec(e, pos, "cp")?;
    let b = bs.iter().find(|b| b.name == x).expect("bound");
    if !b.rhs.is_lam() {
        return Err(RuleError::side("cp", format!("`{x}` is not bound to an abstraction")));
    }
    let mut supply = FreshSupply::with_used(e.all_names());
    let copy = freshen_with(&b.rhs, &mut supply);
    let under_lambda = relative(&lpos, pos).iter().any(|s| matches!(s, Step::LamBody));
    let label = if under_lambda { Label::Cpd } else { Label::Cpt };
    Ok((replace_at(e, pos, copy)?, label))
}

/// Moves the right-hand side bound to the variable at `pos` into its only
/// occurrence and removes the binding.
pub fn apply_ucp(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    let (x, lpos, bs) = target_letrec(e, pos, "ucp")?;
    let rel = relative(&lpos, pos);
    let (container, inside) = rel.split_first().expect("occurrence is below its letrec");
    if inside.iter().any(|s| matches!(s, Step::LamBody)) {
        return Err(RuleError::side("ucp", "occurrence is not in a surface context"));
    }
    if *container == Step::LetBind(x.clone()) {
        return Err(RuleError::side("ucp", "occurrence is in its own binding"));
    }
    let Expr::Letrec(_, body) = subterm(e, &lpos)? else { unreachable!() };
    let total = body.count_free(&x) + bs.iter().map(|b| b.rhs.count_free(&x)).sum::<usize>();
    if total != 1 {
        return Err(RuleError::side("ucp", format!("`{x}` occurs {total} times")));
    }
    let s = bs.iter().find(|b| b.name == x).expect("bound").rhs.clone();
    let moved = replace_at(e, pos, s)?;
    let Expr::Letrec(bs, body) = subterm(&moved, &lpos)? else { unreachable!() };
    let kept = bs.iter().filter(|b| b.name != x).cloned().collect();
    Ok(replace_at(&moved, &lpos, Expr::letrec(kept, (**body).clone()))?)
}

/// Termination measure for `lll` steps: the number of `letrec` nodes, then
/// the sum over `letrec` nodes of the application-function and
/// case-scrutinee steps on their path. Compared lexicographically.
pub fn lll_measure(e: &Expr) -> (usize, usize) {
    fn go(e: &Expr, depth: usize, acc: &mut (usize, usize)) {
        if let Expr::Letrec(..) = e {
            acc.0 += 1;
            acc.1 += depth;
        }
        for (s, c) in crate::position::children(e) {
            let d = depth + usize::from(matches!(s, Step::AppFun | Step::CaseScrut));
            go(c, d, acc);
        }
    }
    let mut acc = (0, 0);
    go(e, 0, &mut acc);
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_eq;
    use crate::parse::parse;
    use crate::signature::Signature;

    fn p(s: &str) -> Expr {
        parse(s, &Signature::bool_list()).unwrap()
    }

    fn pos(s: &str) -> Position {
        s.parse().unwrap()
    }

    fn assert_alpha(a: &Expr, b: &str) {
        assert!(alpha_eq(a, &p(b)), "got {a}, expected {b}");
        assert!(a.satisfies_dvc());
    }

    #[test]
    fn ldel() {
        assert_alpha(&apply_ldel(&p("((letrec x=c in \\y.y) d)"), &pos("appF.letB(x)")).unwrap(), "((\\y.y) d)");
        assert_alpha(&apply_ldel(&p("letrec x=a, y=b in y"), &pos("letB(x)")).unwrap(), "letrec y=b in y");
        assert!(apply_ldel(&p("letrec x=x in x"), &pos("letB(x)")).is_err());
        assert!(apply_ldel(&p("letrec x=a, y=x in y"), &pos("letB(x)")).is_err());
    }

    #[test]
    fn ldelcyc() {
        let e = p("letrec x=x, y=b in y");
        let (r, l) = apply_ldelcyc(&e, &pos("ε"), &[Name::new("x")]).unwrap();
        assert_alpha(&r, "letrec y=b in y");
        assert_eq!(l, Label::Ldelcyc1);
        let e = p("letrec x=y, y=x in True");
        let (r, l) = apply_ldelcyc(&e, &pos("ε"), &[Name::new("x"), Name::new("y")]).unwrap();
        assert_alpha(&r, "True");
        assert_eq!(l, Label::Ldelcyc2);
        assert!(apply_ldelcyc(&p("letrec x=a in x"), &pos("ε"), &[Name::new("x")]).is_err());
        assert!(apply_ldelcyc(&e, &pos("ε"), &[Name::new("x")]).is_err());
    }

    #[test]
    fn groups() {
        let Expr::Letrec(bs, body) = p("letrec a=b, b=a, c=a, d=d, k=True in k") else { panic!() };
        let gs = ldelcyc_groups(&bs, &body);
        let names = |v: &[&str]| v.iter().map(|s| Name::new(s)).collect::<Vec<_>>();
        assert!(gs.contains(&names(&["a", "b", "c"])));
        assert!(gs.contains(&names(&["c"])));
        assert!(gs.contains(&names(&["d"])));
        assert!(gs.contains(&names(&["a", "b", "c", "d"])));
    }

    #[test]
    fn lcv() {
        assert_alpha(&apply_lcv(&p("letrec x=y in (x z)"), &pos("letIn.appF")).unwrap(), "letrec x=y in (y z)");
        let e = p("letrec x1=y, x2=(f x1) in t");
        assert_alpha(&apply_lcv(&e, &pos("letB(x2).appA")).unwrap(), "letrec x1=y, x2=(f y) in t");
        assert!(apply_lcv(&p("letrec x=\\u.u in (x z)"), &pos("letIn.appF")).is_err());
        assert!(apply_lcv(&p("letrec x=x in x"), &pos("letIn")).is_err());
    }

    #[test]
    fn cp() {
        let (r, l) = apply_cp(&p("letrec x=\\u.u in (x a)"), &pos("letIn.appF")).unwrap();
        assert_alpha(&r, "letrec x=\\u.u in ((\\v.v) a)");
        assert_eq!(l, Label::Cpt);
        let (r, l) = apply_cp(&p("letrec x=\\u.u, y=b in \\z.(x z)"), &pos("letIn.lam.appF")).unwrap();
        assert_alpha(&r, "letrec x=\\u.u, y=b in \\z.((\\v.v) z)");
        assert_eq!(l, Label::Cpd);
        // Surface relative to the letrec, even though the letrec is under a lambda.
        let (_, l) = apply_cp(&p("\\w.letrec x=\\u.u in (x w)"), &pos("lam.letIn.appF")).unwrap();
        assert_eq!(l, Label::Cpt);
        assert!(apply_cp(&p("letrec x=True in (x a)"), &pos("letIn.appF")).is_err());
    }

    #[test]
    fn ucp() {
        assert_alpha(&apply_ucp(&p("letrec x=s in (x a)"), &pos("letIn.appF")).unwrap(), "(s a)");
        let e = p("letrec x=s, y=(x b), w=True in t");
        assert_alpha(&apply_ucp(&e, &pos("letB(y).appF")).unwrap(), "letrec y=(s b), w=True in t");
        assert!(apply_ucp(&p("letrec x=s in \\z.x"), &pos("letIn.lam")).is_err());
        assert!(apply_ucp(&p("letrec x=s in (x x)"), &pos("letIn.appF")).is_err());
        assert!(apply_ucp(&p("letrec x=(f x) in x"), &pos("letIn")).is_err());
    }

    #[test]
    fn measure() {
        assert_eq!(lll_measure(&p("letrec x=a in (letrec y=b in r)")), (2, 0));
        assert_eq!(lll_measure(&p("letrec x=a, y=b in r")), (1, 0));
        assert_eq!(lll_measure(&p("((letrec x=c in f) d)")), (1, 1));
        assert_eq!(lll_measure(&p("letrec x=c in (f d)")), (1, 0));
        assert_eq!(lll_measure(&p("\\x.x")), (0, 0));
        let before = lll_measure(&p("((letrec x=c in f) (letrec y=d in g))"));
        let after = lll_measure(&p("letrec x=c in (f (letrec y=d in g))"));
        assert!(after < before);
    }
}
