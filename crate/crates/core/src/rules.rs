//! The reduction rules of the base calculus.
//!
//! Each `apply_*` function rewrites the redex at the given position (see
//! [`Redex`](crate::redex::Redex) for the position conventions) and returns
//! the whole rewritten term. Copies are freshened immediately, so results
//! keep the distinct-variable convention.

use crate::name::{FreshSupply, Name};
use crate::position::{binding_letrec, replace_at, subterm, Position, Step};
use crate::redex::RuleError;
use crate::syntax::{freshen_with, Binding, Expr};

/// `((\x.s) t) -> (letrec x = t in s)`
pub fn apply_lbeta(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    match subterm(e, pos)? {
        Expr::App(f, t) => match &**f {
            Expr::Lam(x, s) => {
                let r = Expr::letrec(vec![Binding::new(x.clone(), (**t).clone())], (**s).clone());
                Ok(replace_at(e, pos, r)?)
            }
            _ => Err(RuleError::shape("lbeta", "function part is not an abstraction")),
        },
        _ => Err(RuleError::shape("lbeta", "not an application")),
    }
}

/// The abstraction reached from variable `x` through var-to-var bindings of
/// the `letrec` at `lpos`.
fn follow_indirections<'a>(bs: &'a [Binding], x: &Name, rule: &'static str) -> Result<&'a Expr, RuleError> {
    let mut seen = vec![x];
    let mut cur = x;
    loop {
        let b = bs
            .iter()
            .find(|b| &b.name == cur)
            .ok_or_else(|| RuleError::shape(rule, format!("`{cur}` is not bound here")))?;
        match &b.rhs {
            Expr::Var(y) if bs.iter().any(|b| &b.name == y) => {
                if seen.contains(&y) {
                    return Err(RuleError::side(rule, "indirection chain is cyclic"));
                }
                seen.push(y);
                cur = y;
            }
            rhs @ Expr::Lam(..) => return Ok(rhs),
            _ => return Err(RuleError::side(rule, "chain does not end in an abstraction")),
        }
    }
}

/// Locates the `letrec` binding the variable at `pos`.
pub(crate) fn target_letrec<'a>(
    e: &'a Expr,
    pos: &Position,
    rule: &'static str,
) -> Result<(Name, Position, &'a [Binding]), RuleError> {
    let Expr::Var(x) = subterm(e, pos)? else {
        return Err(RuleError::shape(rule, "target is not a variable"));
    };
    let lpos = binding_letrec(e, pos, x).ok_or_else(|| RuleError::shape(rule, format!("`{x}` is not letrec-bound")))?;
    let Expr::Letrec(bs, _) = subterm(e, &lpos)? else { unreachable!("binding_letrec returns letrecs") };
    Ok((x.clone(), lpos, bs))
}

/// `(letrec x1 = \.., x2 = x1, .., xj = x(j-1) .. in C[xj]) -> (.. in C[\..])`,
/// where `pos` is the occurrence of `xj` (in the body or a binding).
pub fn apply_cpn(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    let (x, _, bs) = target_letrec(e, pos, "cpn")?;
    let lam = follow_indirections(bs, &x, "cpn")?;
    let mut supply = FreshSupply::with_used(e.all_names());
    let copy = freshen_with(lam, &mut supply);
    Ok(replace_at(e, pos, copy)?)
}

/// Merges the `letrec` at `pos` into its parent `letrec`, from either the
/// parent's body or one of its bindings.
pub fn apply_llet(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    let parent = pos.parent().ok_or_else(|| RuleError::shape("llet", "no enclosing letrec"))?;
    let Expr::Letrec(outer, body) = subterm(e, &parent)? else {
        return Err(RuleError::shape("llet", "parent is not a letrec"));
    };
    let Expr::Letrec(inner, inner_body) = subterm(e, pos)? else {
        return Err(RuleError::shape("llet", "no nested letrec"));
    };
    let merged = match pos.last() {
        Some(Step::LetBody) => {
            let mut bs = outer.clone();
            bs.extend(inner.iter().cloned());
            Expr::Letrec(bs, inner_body.clone())
        }
        Some(Step::LetBind(x)) => {
            let mut bs: Vec<Binding> = outer
                .iter()
                .map(|b| if &b.name == x { Binding::new(x.clone(), (**inner_body).clone()) } else { b.clone() })
                .collect();
            bs.extend(inner.iter().cloned());
            Expr::Letrec(bs, body.clone())
        }
        _ => return Err(RuleError::shape("llet", "nested letrec is not a body or binding")),
    };
    Ok(replace_at(e, &parent, merged)?)
}

/// `((letrec E in t) s) -> (letrec E in (t s))`
pub fn apply_lapp(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    let Expr::App(f, s) = subterm(e, pos)? else {
        return Err(RuleError::shape("lapp", "not an application"));
    };
    let Expr::Letrec(bs, t) = &**f else {
        return Err(RuleError::shape("lapp", "function part is not a letrec"));
    };
    let r = Expr::Letrec(bs.clone(), Box::new(Expr::app((**t).clone(), (**s).clone())));
    Ok(replace_at(e, pos, r)?)
}

/// `(case (letrec E in t) alts) -> (letrec E in (case t alts))`
pub fn apply_lcase(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    let Expr::Case(ty, s, alts) = subterm(e, pos)? else {
        return Err(RuleError::shape("lcase", "not a case expression"));
    };
    let Expr::Letrec(bs, t) = &**s else {
        return Err(RuleError::shape("lcase", "scrutinee is not a letrec"));
    };
    let r = Expr::Letrec(bs.clone(), Box::new(Expr::case(ty.clone(), (**t).clone(), alts.clone())));
    Ok(replace_at(e, pos, r)?)
}

/// `case` on a constructor application written directly as the scrutinee.
pub fn apply_case_direct(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    let Expr::Case(_, s, alts) = subterm(e, pos)? else {
        return Err(RuleError::shape("case", "not a case expression"));
    };
    let Expr::Con(c, args) = &**s else {
        return Err(RuleError::shape("case", "scrutinee is not a constructor application"));
    };
    if args.len() != c.arity {
        return Err(RuleError::side("case", format!("`{}` is not saturated", c.name)));
    }
    let alt = alts
        .iter()
        .find(|a| a.con == c.name)
        .ok_or_else(|| RuleError::side("case", format!("no alternative for `{}`", c.name)))?;
    let bs = alt.vars.iter().zip(args).map(|(y, t)| Binding::new(y.clone(), t.clone())).collect();
    Ok(replace_at(e, pos, Expr::letrec(bs, alt.rhs.clone()))?)
}

/// Splits an application spine `(h a1 .. an)` into `h` and its arguments.
pub(crate) fn unspine(e: &Expr) -> (&Expr, Vec<&Expr>) {
    let mut args = Vec::new();
    let mut cur = e;
    while let Expr::App(f, a) = cur {
        args.push(&**a);
        cur = f;
    }
    args.reverse();
    (cur, args)
}

/// Shape of a virtually assembled constructor application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct CaseChain {
    /// Position of the `letrec` holding the chain.
    pub letrec: Position,
    /// Chain binders from the constructor binding `x1` to `xm`.
    pub links: Vec<Name>,
    pub con: crate::syntax::Constructor,
    /// Total number of arguments gathered, including the scrutinee's own.
    pub total_args: usize,
}

/// Analyses the scrutinee `(xm t ..)` of the case at `pos`, following
/// bindings `xm = (x(m-1) t ..)`, .., `x1 = (c t ..)`.
pub(crate) fn case_chain(e: &Expr, pos: &Position) -> Result<CaseChain, RuleError> {
    let Expr::Case(_, s, _) = subterm(e, pos)? else {
        return Err(RuleError::shape("case", "not a case expression"));
    };
    let (head, case_args) = unspine(s);
    let Expr::Var(xm) = head else {
        return Err(RuleError::shape("case", "scrutinee head is not a variable"));
    };
    let lpos = binding_letrec(e, &pos.child(Step::CaseScrut), xm)
        .ok_or_else(|| RuleError::shape("case", format!("`{xm}` is not letrec-bound")))?;
    let Expr::Letrec(bs, _) = subterm(e, &lpos)? else { unreachable!() };
    let mut total = case_args.len();
    let mut links = vec![xm.clone()];
    let mut cur = xm;
    loop {
        let b =
            bs.iter().find(|b| &b.name == cur).ok_or_else(|| RuleError::shape("case", "chain leaves the letrec"))?;
        let (h, args) = unspine(&b.rhs);
        total += args.len();
        match h {
            Expr::Con(c, cargs) => {
                if !args.is_empty() {
                    return Err(RuleError::side("case", "constructor applied to too many arguments"));
                }
                total += cargs.len();
                links.reverse();
                return Ok(CaseChain { letrec: lpos, links, con: c.clone(), total_args: total });
            }
            Expr::Var(y) if bs.iter().any(|b| &b.name == y) => {
                if links.contains(y) {
                    return Err(RuleError::side("case", "binding chain is cyclic"));
                }
                links.push(y.clone());
                cur = y;
            }
            _ => return Err(RuleError::shape("case", "no chain to a constructor application")),
        }
    }
}

/// `case` whose scrutinee reaches a constructor application through a chain
/// of `letrec` bindings. Every argument on the chain is bound to a fresh
/// variable, and the alternative's pattern variables are bound to those.
pub fn apply_case_chain(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    let chain = case_chain(e, pos)?;
    if chain.total_args != chain.con.arity {
        return Err(RuleError::side("case", format!("assembled application of `{}` is not saturated", chain.con.name)));
    }
    let Expr::Case(_, s, alts) = subterm(e, pos)? else { unreachable!() };
    let alt = alts
        .iter()
        .find(|a| a.con == chain.con.name)
        .ok_or_else(|| RuleError::side("case", format!("no alternative for `{}`", chain.con.name)))?;
    let mut supply = FreshSupply::with_used(e.all_names());
    let y = Name::new("y");

    let letrec = subterm(e, &chain.letrec)?.clone();
    let rel = Position(pos.steps()[chain.letrec.len()..].to_vec());

    // The chain arguments in order t1 .. tn get fresh names y1 .. yn; the
    // names for the chain bindings are drawn first so the numbering follows
    // the arguments.
    let Expr::Letrec(bs, _) = &letrec else { unreachable!() };
    let mut link_ys: Vec<Vec<Name>> = Vec::new();
    for x in &chain.links {
        let rhs = &bs.iter().find(|b| &b.name == x).expect("chain binder").rhs;
        let (h, args) = unspine(rhs);
        let n = match h {
            Expr::Con(_, cargs) => cargs.len(),
            _ => args.len(),
        };
        link_ys.push((0..n).map(|_| supply.fresh(&y)).collect());
    }
    let (_, case_args) = unspine(s);
    let case_ys: Vec<Name> = case_args.iter().map(|_| supply.fresh(&y)).collect();
    let all_ys: Vec<&Name> = link_ys.iter().flatten().chain(case_ys.iter()).collect();

    let mut inner: Vec<Binding> =
        case_ys.iter().zip(&case_args).map(|(y, t)| Binding::new(y.clone(), (*t).clone())).collect();
    inner.extend(alt.vars.iter().zip(&all_ys).map(|(z, y)| Binding::new(z.clone(), Expr::Var((*y).clone()))));
    let replacement = Expr::letrec(inner, alt.rhs.clone());

    let letrec = replace_at(&letrec, &rel, replacement)?;
    let Expr::Letrec(bs, body) = letrec else { unreachable!() };
    let mut new_bs: Vec<Binding> = Vec::with_capacity(bs.len() + all_ys.len());
    let mut extra: Vec<Binding> = Vec::new();
    for b in bs {
        let Some(k) = chain.links.iter().position(|x| x == &b.name) else {
            new_bs.push(b);
            continue;
        };
        let ys = &link_ys[k];
        let (h, args) = unspine(&b.rhs);
        let (rhs, moved): (Expr, Vec<Expr>) = match h {
            Expr::Con(c, cargs) => {
                (Expr::Con(c.clone(), ys.iter().map(|y| Expr::Var(y.clone())).collect()), cargs.clone())
            }
            head => {
                let rhs = ys.iter().fold(head.clone(), |f, y| Expr::app(f, Expr::Var(y.clone())));
                (rhs, args.into_iter().cloned().collect())
            }
        };
        new_bs.push(Binding::new(b.name.clone(), rhs));
        extra.extend(ys.iter().cloned().zip(moved).map(|(y, t)| Binding::new(y, t)));
    }
    new_bs.extend(extra);
    Ok(replace_at(e, &chain.letrec, Expr::Letrec(new_bs, body))?)
}

/// Dispatches `case` to the direct or the chained form.
pub fn apply_case(e: &Expr, pos: &Position) -> Result<Expr, RuleError> {
    match subterm(e, pos)? {
        Expr::Case(_, s, _) => match unspine(s).0 {
            Expr::Var(_) => apply_case_chain(e, pos),
            _ => apply_case_direct(e, pos),
        },
        _ => Err(RuleError::shape("case", "not a case expression")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Arm {
    Left,
    Right,
}

/// `(choice s t) -> s` or `-> t`.
pub fn apply_nd(e: &Expr, pos: &Position, arm: Arm) -> Result<Expr, RuleError> {
    let Expr::Choice(l, r) = subterm(e, pos)? else {
        return Err(RuleError::shape(if arm == Arm::Left { "ndl" } else { "ndr" }, "not a choice"));
    };
    let picked = match arm {
        Arm::Left => (**l).clone(),
        Arm::Right => (**r).clone(),
    };
    Ok(replace_at(e, pos, picked)?)
}
