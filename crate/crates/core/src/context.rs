//! Context classes and the maximal reduction context.
//!
//! Weak reduction contexts descend only through the function part of an
//! application and the scrutinee of a `case`. Reduction contexts additionally
//! look through a top-level `letrec`: into its body, and from a variable at
//! the end of the body's weak spine into the binding of that variable, and so
//! on along the chain of bindings. Surface contexts are all positions not
//! under a lambda.

use serde::Serialize;

use crate::name::Name;
use crate::position::{subterm, Position, PositionError, Step};
use crate::syntax::Expr;

/// Classes a position can belong to. Each is tested by its own predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContextClass {
    General,
    Weak,
    Reduction,
    Surface,
}

/// Result of searching for the hole of the maximal reduction context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaxRedexLocus {
    Found {
        pos: Position,
        subterm: Expr,
    },
    /// The binding chain revisits a binder; no standard redex exists.
    CycleDetected(Vec<Name>),
    /// The weak descent ends at a variable not bound by the top `letrec`.
    NoReductionPosition,
}

fn is_weak_step(s: &Step) -> bool {
    matches!(s, Step::AppFun | Step::CaseScrut)
}

/// The maximal weak spine of `e`: the steps taken and the term reached.
pub fn weak_spine(e: &Expr) -> (Vec<Step>, &Expr) {
    let mut steps = Vec::new();
    let mut cur = e;
    loop {
        match cur {
            Expr::App(f, _) => {
                steps.push(Step::AppFun);
                cur = f;
            }
            Expr::Case(_, s, _) => {
                steps.push(Step::CaseScrut);
                cur = s;
            }
            _ => return (steps, cur),
        }
    }
}

pub fn is_weak_reduction_context(e: &Expr, pos: &Position) -> Result<bool, PositionError> {
    subterm(e, pos)?;
    Ok(pos.steps().iter().all(is_weak_step))
}

pub fn is_surface_context(e: &Expr, pos: &Position) -> Result<bool, PositionError> {
    subterm(e, pos)?;
    Ok(!pos.steps().iter().any(|s| matches!(s, Step::LamBody)))
}

pub fn classes(e: &Expr, pos: &Position) -> Result<Vec<ContextClass>, PositionError> {
    let mut out = vec![ContextClass::General];
    if is_weak_reduction_context(e, pos)? {
        out.push(ContextClass::Weak);
    }
    if is_reduction_context(e, pos)? {
        out.push(ContextClass::Reduction);
    }
    if is_surface_context(e, pos)? {
        out.push(ContextClass::Surface);
    }
    Ok(out)
}

/// One container visited while following the binding chain of a top-level
/// `letrec`: the body (`LetBody`) or a binding (`LetBind(x)`), the weak spine
/// inside it, and what the spine ends at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLink {
    pub container: Step,
    pub spine: Vec<Step>,
    pub end: Expr,
}

impl ChainLink {
    pub fn end_position(&self) -> Position {
        let mut p = vec![self.container.clone()];
        p.extend(self.spine.iter().cloned());
        Position(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descent {
    /// Empty when the root is not a `letrec`.
    pub links: Vec<ChainLink>,
    pub locus: MaxRedexLocus,
}

/// Follows the maximal reduction context of `e`, recording the chain.
pub fn descend(e: &Expr) -> Descent {
    let Expr::Letrec(bs, body) = e else {
        let (spine, end) = weak_spine(e);
        let locus = match end {
            Expr::Var(_) => MaxRedexLocus::NoReductionPosition,
            t => MaxRedexLocus::Found { pos: Position(spine), subterm: t.clone() },
        };
        return Descent { links: Vec::new(), locus };
    };
    let mut links = Vec::new();
    let mut visited: Vec<Name> = Vec::new();
    let mut container = Step::LetBody;
    let mut cur: &Expr = body;
    loop {
        let (spine, end) = weak_spine(cur);
        let link = ChainLink { container: container.clone(), spine, end: end.clone() };
        let pos = link.end_position();
        links.push(link);
        match end {
            Expr::Var(x) => match bs.iter().find(|b| &b.name == x) {
                Some(b) => {
                    if visited.contains(x) {
                        return Descent { links, locus: MaxRedexLocus::CycleDetected(visited) };
                    }
                    visited.push(x.clone());
                    container = Step::LetBind(x.clone());
                    cur = &b.rhs;
                }
                None => return Descent { links, locus: MaxRedexLocus::NoReductionPosition },
            },
            t => return Descent { links, locus: MaxRedexLocus::Found { pos, subterm: t.clone() } },
        }
    }
}

pub fn maximal_reduction_locus(e: &Expr) -> MaxRedexLocus {
    descend(e).locus
}

/// Whether `pos` is the hole of some (not necessarily maximal) reduction
/// context of `e`.
pub fn is_reduction_context(e: &Expr, pos: &Position) -> Result<bool, PositionError> {
    subterm(e, pos)?;
    let steps = pos.steps();
    if steps.iter().all(is_weak_step) {
        return Ok(true);
    }
    let Expr::Letrec(bs, body) = e else { return Ok(false) };
    let (first, rest) = steps.split_first().expect("non-weak path is non-empty");
    if !rest.iter().all(is_weak_step) {
        return Ok(false);
    }
    match first {
        Step::LetBody => Ok(true),
        Step::LetBind(target) => {
            // Walk the chain from the body; each weak spine is unique, so the
            // chain is a single path.
            let mut seen: Vec<&Name> = Vec::new();
            let mut cur: &Expr = body;
            loop {
                let (_, end) = weak_spine(cur);
                let Expr::Var(x) = end else { return Ok(false) };
                let Some(b) = bs.iter().find(|b| &b.name == x) else { return Ok(false) };
                if x == target {
                    return Ok(true);
                }
                if seen.contains(&x) {
                    return Ok(false);
                }
                seen.push(x);
                cur = &b.rhs;
            }
        }
        _ => Ok(false),
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

    fn pos(s: &str) -> Position {
        s.parse().unwrap()
    }

    #[test]
    fn weak_examples() {
        let e = p("(x a)");
        assert!(is_weak_reduction_context(&e, &pos("appF")).unwrap());
        assert!(!is_weak_reduction_context(&e, &pos("appA")).unwrap());
        let e = p("case[Bool] x of {True -> True; False -> False}");
        assert!(is_weak_reduction_context(&e, &pos("caseS")).unwrap());
        assert!(is_weak_reduction_context(&e, &pos("lam")).is_err());
    }

    #[test]
    fn surface_examples() {
        let e = p("\\x.(y z)");
        assert!(!is_surface_context(&e, &pos("lam.appF")).unwrap());
        let e = p("letrec x=(y z) in w");
        assert!(is_surface_context(&e, &pos("letB(x).appF")).unwrap());
        let e = p("case[Bool] b of {True -> y; False -> False}");
        assert!(is_surface_context(&e, &pos("alt(0)")).unwrap());
        let e = p("choice a b");
        assert!(is_surface_context(&e, &pos("chR")).unwrap());
        assert!(!is_reduction_context(&e, &pos("chR")).unwrap());
    }

    #[test]
    fn maximal_context_follows_chain() {
        let e = p("letrec x2=\\x.x, x1=(x2 x1) in x1");
        assert_eq!(maximal_reduction_locus(&e), MaxRedexLocus::Found { pos: pos("letB(x2)"), subterm: p("\\x.x") });
        assert!(is_reduction_context(&e, &pos("letB(x2)")).unwrap());
        assert!(is_reduction_context(&e, &pos("letB(x1).appF")).unwrap());
        assert!(is_reduction_context(&e, &pos("letIn")).unwrap());
        assert!(!is_reduction_context(&e, &pos("letB(x1).appA")).unwrap());
    }

    #[test]
    fn cycles() {
        let e = p("letrec x=x in x");
        assert_eq!(maximal_reduction_locus(&e), MaxRedexLocus::CycleDetected(vec![Name::new("x")]));
        let e = p("letrec a=(b True), b=(a False) in a");
        assert!(matches!(maximal_reduction_locus(&e), MaxRedexLocus::CycleDetected(_)));
    }

    #[test]
    fn plain_application() {
        let e = p("((\\y.y) d)");
        assert_eq!(maximal_reduction_locus(&e), MaxRedexLocus::Found { pos: pos("appF"), subterm: p("\\y.y") });
        assert_eq!(maximal_reduction_locus(&p("(f a)")), MaxRedexLocus::NoReductionPosition);
        let e = p("letrec a=True in (f a)");
        assert_eq!(maximal_reduction_locus(&e), MaxRedexLocus::NoReductionPosition);
    }

    #[test]
    fn reduction_context_excludes_lambda_and_unreached_bindings() {
        let e = p("letrec a=(f True), b=True in a");
        assert!(is_reduction_context(&e, &pos("letB(a).appF")).unwrap());
        assert!(!is_reduction_context(&e, &pos("letB(b)")).unwrap());
        let e = p("\\x.x");
        assert!(!is_reduction_context(&e, &pos("lam")).unwrap());
    }
}
