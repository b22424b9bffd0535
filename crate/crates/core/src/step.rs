//! Applying any rule by label, finding all redexes of a rule, and
//! classifying a step against the standard reduction.

use serde::Serialize;

use crate::context::is_reduction_context;
use crate::position::{positions, subterm, Position, Step};
use crate::redex::{Label, Redex, Rule, RuleError};
use crate::rules::{self, Arm};
use crate::standard::{select, Selection};
use crate::syntax::Expr;
use crate::transform;

/// Rebuilds application nodes so that arguments applied to a constructor
/// with spare arity are absorbed into it. Rules can expose such a
/// constructor in function position (e.g. dropping a `letrec` around it).
pub fn merge_con_apps(e: &Expr) -> Expr {
    fn needs(e: &Expr) -> bool {
        let mut found = false;
        e.visit(&mut |n| {
            if let Expr::App(f, _) = n {
                if let Expr::Con(c, args) = &**f {
                    found |= args.len() < c.arity;
                }
            }
        });
        found
    }
    fn go(e: &Expr) -> Expr {
        match e {
            Expr::Var(_) => e.clone(),
            Expr::Con(c, args) => Expr::Con(c.clone(), args.iter().map(go).collect()),
            Expr::Choice(l, r) => Expr::choice(go(l), go(r)),
            Expr::App(f, a) => Expr::app(go(f), go(a)),
            Expr::Case(t, s, alts) => Expr::Case(
                t.clone(),
                Box::new(go(s)),
                alts.iter().map(|a| crate::syntax::Alt { rhs: go(&a.rhs), ..a.clone() }).collect(),
            ),
            Expr::Lam(x, b) => Expr::lam(x.clone(), go(b)),
            Expr::Letrec(bs, b) => Expr::Letrec(
                bs.iter().map(|x| crate::syntax::Binding::new(x.name.clone(), go(&x.rhs))).collect(),
                Box::new(go(b)),
            ),
        }
    }
    if needs(e) {
        go(e)
    } else {
        e.clone()
    }
}

/// Applies the rule instance `r` to `e`. Returns the result and the exact
/// label of the step (which for `cp` and `ldelcyc` depends on the instance
/// rather than on `r.label`).
pub fn apply(e: &Expr, r: &Redex) -> Result<(Expr, Label), RuleError> {
    let (out, label) = match r.label {
        Label::Lbeta => (rules::apply_lbeta(e, &r.pos)?, Label::Lbeta),
        Label::Cpn => (rules::apply_cpn(e, &r.pos)?, Label::Cpn),
        Label::Llet => (rules::apply_llet(e, &r.pos)?, Label::Llet),
        Label::Lapp => (rules::apply_lapp(e, &r.pos)?, Label::Lapp),
        Label::Lcase => (rules::apply_lcase(e, &r.pos)?, Label::Lcase),
        Label::Case => (rules::apply_case(e, &r.pos)?, Label::Case),
        Label::Ndl => (rules::apply_nd(e, &r.pos, Arm::Left)?, Label::Ndl),
        Label::Ndr => (rules::apply_nd(e, &r.pos, Arm::Right)?, Label::Ndr),
        Label::Ldel => (transform::apply_ldel(e, &r.pos)?, Label::Ldel),
        Label::Ldelcyc1 | Label::Ldelcyc2 => transform::apply_ldelcyc(e, &r.pos, &r.group)?,
        Label::Lcv => (transform::apply_lcv(e, &r.pos)?, Label::Lcv),
        Label::Cpt | Label::Cpd => transform::apply_cp(e, &r.pos)?,
        Label::Ucp => (transform::apply_ucp(e, &r.pos)?, Label::Ucp),
    };
    Ok((merge_con_apps(&out), label))
}

/// Applies a user-level rule (which may be a family) at `pos`.
pub fn apply_rule(e: &Expr, rule: Rule, pos: &Position, group: &[crate::Name]) -> Result<(Expr, Label), RuleError> {
    let label = match rule {
        Rule::Exact(l) => l,
        Rule::Cp => Label::Cpt,
        Rule::Ldelcyc => Label::Ldelcyc1,
        Rule::Nd => Label::Ndl,
    };
    let mut r = Redex::new(label, pos.clone());
    r.group = group.to_vec();
    let (out, got) = apply(e, &r)?;
    if !rule.admits(got) {
        return Err(RuleError::side("apply", format!("instance is a `{got}` step, not `{rule}`")));
    }
    Ok((out, got))
}

/// Whether `label` could possibly match at a node of this shape.
fn plausible(label: Label, node: &Expr, last: Option<&Step>) -> bool {
    match label {
        Label::Lbeta | Label::Lapp => matches!(node, Expr::App(..)),
        Label::Lcase | Label::Case => matches!(node, Expr::Case(..)),
        Label::Ndl | Label::Ndr => matches!(node, Expr::Choice(..)),
        Label::Llet => matches!(node, Expr::Letrec(..)) && matches!(last, Some(Step::LetBody | Step::LetBind(_))),
        Label::Ldel => matches!(last, Some(Step::LetBind(_))),
        Label::Ldelcyc1 | Label::Ldelcyc2 => matches!(node, Expr::Letrec(..)),
        Label::Cpn | Label::Lcv | Label::Cpt | Label::Cpd | Label::Ucp => matches!(node, Expr::Var(_)),
    }
}

/// All instances of `rule` in `e`, in pre-order of position, with results.
pub fn find_redexes(e: &Expr, rule: Rule) -> Vec<(Redex, Expr)> {
    let mut out = Vec::new();
    let labels: Vec<Label> = match rule {
        Rule::Cp => vec![Label::Cpt],
        Rule::Ldelcyc => vec![Label::Ldelcyc1],
        r => r.labels(),
    };
    for pos in positions(e) {
        let node = subterm(e, &pos).expect("own position");
        for &l in &labels {
            if !plausible(l, node, pos.last()) {
                continue;
            }
            if matches!(l, Label::Ldelcyc1 | Label::Ldelcyc2) {
                let Expr::Letrec(bs, body) = node else { continue };
                for g in transform::ldelcyc_groups(bs, body) {
                    let r = Redex { label: l, pos: pos.clone(), group: g };
                    if let Ok((t, got)) = apply(e, &r) {
                        if rule.admits(got) {
                            out.push((Redex { label: got, ..r }, t));
                        }
                    }
                }
                continue;
            }
            let r = Redex::new(l, pos.clone());
            if let Ok((t, got)) = apply(e, &r) {
                if rule.admits(got) {
                    out.push((Redex { label: got, ..r }, t));
                }
            }
        }
    }
    out
}

/// All instances of all labels in `labels`.
pub fn find_all(e: &Expr, labels: &[Label]) -> Vec<(Redex, Expr)> {
    let mut out = Vec::new();
    for &l in labels {
        let rule = match l {
            Label::Cpt | Label::Cpd => Rule::Cp,
            Label::Ldelcyc1 | Label::Ldelcyc2 => Rule::Ldelcyc,
            l => Rule::Exact(l),
        };
        for (r, t) in find_redexes(e, rule) {
            if r.label == l && !out.iter().any(|(q, _): &(Redex, Expr)| q == &r) {
                out.push((r, t));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepClass {
    Standard,
    Internal,
    NotInReductionContext,
}

/// Classifies the step `r` of `e` whose result is `after`. A step is
/// standard if it rewrites the standard redex to the standard result (up
/// to renaming), so e.g. a `cpt` step coinciding with the standard `cpn`
/// counts as standard.
pub fn classify(e: &Expr, r: &Redex, after: &Expr) -> Result<StepClass, RuleError> {
    if is_standard(e, r, after) {
        return Ok(StepClass::Standard);
    }
    let root = r.root(e)?;
    if is_reduction_context(e, &root)? {
        Ok(StepClass::Internal)
    } else {
        Ok(StepClass::NotInReductionContext)
    }
}

pub fn is_standard(e: &Expr, r: &Redex, after: &Expr) -> bool {
    match select(e) {
        Selection::Stuck(_) => false,
        Selection::Nd(pos) => pos == r.pos && r.label.is_nd(),
        Selection::Redex(s) => {
            if s.pos != r.pos {
                return false;
            }
            if s.label == r.label {
                return true;
            }
            match apply(e, &s) {
                Ok((t, _)) => crate::alpha::alpha_eq(&t, after),
                Err(_) => false,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::signature::Signature;

    fn p(s: &str) -> Expr {
        parse(s, &Signature::bool_list()).unwrap()
    }

    #[test]
    fn merges_exposed_constructor() {
        let e = p("((letrec x=c in Cons) a)");
        let r = Redex::new(Label::Ldel, "appF.letB(x)".parse().unwrap());
        let (t, _) = apply(&e, &r).unwrap();
        assert_eq!(t.to_string(), "Cons a");
    }

    #[test]
    fn classification() {
        let e = p("((letrec x=c in \\y.y) d)");
        let r = Redex::new(Label::Lapp, Position::root());
        let (t, _) = apply(&e, &r).unwrap();
        assert_eq!(classify(&e, &r, &t).unwrap(), StepClass::Standard);
        let r = Redex::new(Label::Ldel, "appF.letB(x)".parse().unwrap());
        let (t, _) = apply(&e, &r).unwrap();
        assert_eq!(classify(&e, &r, &t).unwrap(), StepClass::Internal);

        let e = p("\\z.((\\y.y) z)");
        let r = Redex::new(Label::Lbeta, "lam".parse().unwrap());
        let (t, _) = apply(&e, &r).unwrap();
        assert_eq!(classify(&e, &r, &t).unwrap(), StepClass::NotInReductionContext);

        let e = p("letrec x=a, z=(letrec y=b in y) in x");
        let found = find_redexes(&e, Rule::Exact(Label::Llet));
        assert_eq!(found.len(), 1);
        let (r, t) = &found[0];
        assert_eq!(classify(&e, r, t).unwrap(), StepClass::Internal);
    }

    #[test]
    fn cpt_matching_standard_cpn_is_standard() {
        let e = p("letrec x=\\u.u in (x a)");
        let found = find_redexes(&e, Rule::Cp);
        assert_eq!(found.len(), 1);
        let (r, t) = &found[0];
        assert_eq!(r.label, Label::Cpt);
        assert_eq!(classify(&e, r, t).unwrap(), StepClass::Standard);
    }

    #[test]
    fn finds_all_groups() {
        let e = p("letrec x=x, y=y, k=True in k");
        let found = find_redexes(&e, Rule::Ldelcyc);
        assert_eq!(found.len(), 3);
        assert_eq!(find_redexes(&e, Rule::Exact(Label::Ldelcyc2)).len(), 0);
    }
}
