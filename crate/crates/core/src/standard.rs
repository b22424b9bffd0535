//! Standard redex selection and standard reduction.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::context::{descend, ChainLink, MaxRedexLocus};
use crate::position::{Position, Step};
use crate::redex::{Label, Redex};
use crate::rules::Arm;
use crate::step::apply;
use crate::syntax::{Constructor, Expr};

/// Why a term has no standard redex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StuckClass {
    /// A case on an abstraction, an unsaturated or unmatched constructor,
    /// an abstraction applied after a constructor, or a free variable in
    /// head position.
    TypeError,
    /// The binding chain loops.
    Cycle,
    /// A weak head normal form.
    Value,
}

impl fmt::Display for StuckClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StuckClass::TypeError => "TypeError",
            StuckClass::Cycle => "Cycle",
            StuckClass::Value => "Value",
        })
    }
}

/// The outcome of standard redex selection, without performing the step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    Stuck(StuckClass),
    /// A `choice` at this position; both arms are standard.
    Nd(Position),
    Redex(Redex),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Flag {
    #[serde(rename = "st")]
    St,
    #[serde(rename = "i")]
    I,
    #[serde(rename = "plain")]
    Plain,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::St => "st",
            Flag::I => "i",
            Flag::Plain => "plain",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    pub label: Label,
    pub flag: Flag,
    pub pos: Position,
    pub before: Expr,
    pub after: Expr,
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} @{} => {}", self.label, self.flag, self.pos, self.after)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StandardRedex {
    None(StuckClass),
    Deterministic(ReductionStep),
    NdChoice(ReductionStep, ReductionStep),
}

fn redex(label: Label, pos: Position) -> Selection {
    Selection::Redex(Redex::new(label, pos))
}

fn saturated_with_alt(e: &Expr, case: &Expr) -> bool {
    let (Expr::Con(c, args), Expr::Case(_, _, alts)) = (e, case) else { return false };
    args.len() == c.arity && alts.iter().any(|a| a.con == c.name)
}

/// Selects the standard redex of `e`.
pub fn select(e: &Expr) -> Selection {
    let d = descend(e);
    let (pos, t) = match d.locus {
        MaxRedexLocus::CycleDetected(_) => return Selection::Stuck(StuckClass::Cycle),
        MaxRedexLocus::NoReductionPosition => return Selection::Stuck(StuckClass::TypeError),
        MaxRedexLocus::Found { pos, subterm } => (pos, subterm),
    };
    if let Expr::Choice(..) = t {
        return Selection::Nd(pos);
    }
    match pos.last() {
        Some(Step::AppFun) => {
            let parent = pos.parent().expect("non-root");
            match t {
                Expr::Letrec(..) => redex(Label::Lapp, parent),
                Expr::Lam(..) => redex(Label::Lbeta, parent),
                _ => Selection::Stuck(StuckClass::TypeError),
            }
        }
        Some(Step::CaseScrut) => {
            let parent = pos.parent().expect("non-root");
            let case = crate::position::subterm(e, &parent).expect("own position");
            match t {
                Expr::Letrec(..) => redex(Label::Lcase, parent),
                Expr::Con(..) if saturated_with_alt(&t, case) => redex(Label::Case, parent),
                _ => Selection::Stuck(StuckClass::TypeError),
            }
        }
        Some(Step::LetBody) => match t {
            Expr::Letrec(..) => redex(Label::Llet, pos),
            _ => Selection::Stuck(StuckClass::Value),
        },
        Some(Step::LetBind(_)) => match t {
            Expr::Letrec(..) => redex(Label::Llet, pos),
            Expr::Lam(..) => redex(Label::Cpn, cpn_target(&d.links)),
            Expr::Con(c, args) => chain_case(e, &d.links, &c, args.len()),
            _ => unreachable!("weak spine ends at a lambda, constructor, letrec or choice"),
        },
        None => match t {
            Expr::Lam(..) | Expr::Con(..) => Selection::Stuck(StuckClass::Value),
            _ => unreachable!("a root letrec is never the locus"),
        },
        Some(_) => unreachable!("the maximal reduction context uses weak and letrec steps only"),
    }
}

fn is_indirection(l: &ChainLink) -> bool {
    l.spine.is_empty() && matches!(l.container, Step::LetBind(_))
}

/// The occurrence receiving the copy: the first link, walking back from the
/// abstraction, that is not a plain `x = y` indirection.
fn cpn_target(links: &[ChainLink]) -> Position {
    let n = links.len();
    links[..n - 1]
        .iter()
        .rev()
        .find(|l| !is_indirection(l))
        .expect("the body link is never an indirection")
        .end_position()
}

/// Looks for the `case` consuming the constructor at the end of the chain,
/// counting arguments supplied along the way.
fn chain_case(e: &Expr, links: &[ChainLink], con: &Constructor, own: usize) -> Selection {
    let arity = con.arity;
    let mut args = own;
    for l in links[..links.len() - 1].iter().rev() {
        match l.spine.iter().rposition(|s| *s == Step::CaseScrut) {
            Some(k) => {
                args += l.spine.len() - k - 1;
                if args != arity {
                    return Selection::Stuck(StuckClass::TypeError);
                }
                let mut p = vec![l.container.clone()];
                p.extend(l.spine[..k].iter().cloned());
                let pos = Position(p);
                let case = crate::position::subterm(e, &pos).expect("own position");
                let Expr::Case(_, _, alts) = case else { unreachable!("spine step into a case scrutinee") };
                if !alts.iter().any(|a| a.con == con.name) {
                    return Selection::Stuck(StuckClass::TypeError);
                }
                return Selection::Redex(Redex::new(Label::Case, pos));
            }
            None => args += l.spine.len(),
        }
    }
    if args <= arity {
        Selection::Stuck(StuckClass::Value)
    } else {
        Selection::Stuck(StuckClass::TypeError)
    }
}

/// Selects and performs the standard step.
pub fn standard_redex(e: &Expr) -> StandardRedex {
    let mk = |r: &Redex| {
        let (after, label) = apply(e, r).unwrap_or_else(|err| panic!("selected redex {r} fails on {e}: {err}"));
        ReductionStep { label, flag: Flag::St, pos: r.pos.clone(), before: e.clone(), after }
    };
    match select(e) {
        Selection::Stuck(c) => StandardRedex::None(c),
        Selection::Nd(pos) => {
            StandardRedex::NdChoice(mk(&Redex::new(Label::Ndl, pos.clone())), mk(&Redex::new(Label::Ndr, pos)))
        }
        Selection::Redex(r) => match apply(e, &r) {
            Ok(_) => StandardRedex::Deterministic(mk(&r)),
            // A case whose alternative is missing or whose chain is broken.
            Err(_) => StandardRedex::None(StuckClass::TypeError),
        },
    }
}

/// Whether `e` is a weak head normal form.
pub fn is_value(e: &Expr) -> bool {
    select(e) == Selection::Stuck(StuckClass::Value)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NdPolicy {
    Left,
    Right,
    /// Arms in order; once used up, left arms are taken.
    Sequence(Vec<Arm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalResult {
    Converged { result: Expr, nd_count: usize },
    Stuck { result: Expr, class: StuckClass, nd_count: usize },
    Exhausted { steps: usize },
}

impl EvalResult {
    pub fn summary(&self) -> String {
        match self {
            EvalResult::Converged { nd_count, .. } => format!("RESULT Converged nd={nd_count}"),
            EvalResult::Stuck { class, nd_count, .. } => format!("RESULT Stuck:{class} nd={nd_count}"),
            EvalResult::Exhausted { .. } => "RESULT Exhausted nd=0".to_string(),
        }
    }
}

/// Runs standard reduction for at most `bound` steps.
pub fn standard_reduce(e: &Expr, policy: &NdPolicy, bound: usize) -> (EvalResult, Vec<ReductionStep>) {
    let mut trace = Vec::new();
    let mut cur = e.clone();
    let mut nd = 0;
    let mut choices = 0;
    for _ in 0..bound {
        let step = match standard_redex(&cur) {
            StandardRedex::None(StuckClass::Value) => {
                return (EvalResult::Converged { result: cur, nd_count: nd }, trace)
            }
            StandardRedex::None(class) => return (EvalResult::Stuck { result: cur, class, nd_count: nd }, trace),
            StandardRedex::Deterministic(s) => s,
            StandardRedex::NdChoice(l, r) => {
                let arm = match policy {
                    NdPolicy::Left => Arm::Left,
                    NdPolicy::Right => Arm::Right,
                    NdPolicy::Sequence(v) => v.get(choices).copied().unwrap_or(Arm::Left),
                };
                choices += 1;
                nd += 1;
                if arm == Arm::Left {
                    l
                } else {
                    r
                }
            }
        };
        cur = step.after.clone();
        trace.push(step);
    }
    match standard_redex(&cur) {
        StandardRedex::None(StuckClass::Value) => (EvalResult::Converged { result: cur, nd_count: nd }, trace),
        StandardRedex::None(class) => (EvalResult::Stuck { result: cur, class, nd_count: nd }, trace),
        _ => (EvalResult::Exhausted { steps: bound }, trace),
    }
}

/// The nd-counts with which a term converges, with witnesses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConvergenceSet {
    /// For each nd-count, the arm sequences of the converging runs found.
    pub witnesses: BTreeMap<usize, Vec<Vec<Arm>>>,
    /// Some branch hit the step bound or the branch cap, so the set may be
    /// incomplete.
    pub exhausted: bool,
}

impl ConvergenceSet {
    pub fn counts(&self) -> Vec<usize> {
        self.witnesses.keys().copied().collect()
    }

    pub fn converges(&self) -> bool {
        !self.witnesses.is_empty()
    }

    pub fn max_count(&self) -> Option<usize> {
        self.witnesses.keys().next_back().copied()
    }
}

/// Explores both arms of every `choice` breadth-first. Each branch may take
/// `bound` steps; at most `branch_cap` branches are explored in total.
pub fn converges_set(e: &Expr, bound: usize, branch_cap: usize) -> ConvergenceSet {
    let mut out = ConvergenceSet::default();
    let mut queue: VecDeque<(Expr, usize, Vec<Arm>)> = VecDeque::from([(e.clone(), 0, Vec::new())]);
    let mut branches = 1;
    while let Some((mut cur, mut steps, arms)) = queue.pop_front() {
        loop {
            if steps >= bound {
                if !matches!(crate::standard::select(&cur), Selection::Stuck(_)) {
                    out.exhausted = true;
                } else if is_value(&cur) {
                    out.witnesses.entry(arms.len()).or_default().push(arms.clone());
                }
                break;
            }
            match standard_redex(&cur) {
                StandardRedex::None(StuckClass::Value) => {
                    out.witnesses.entry(arms.len()).or_default().push(arms.clone());
                    break;
                }
                StandardRedex::None(_) => break,
                StandardRedex::Deterministic(s) => {
                    cur = s.after;
                    steps += 1;
                }
                StandardRedex::NdChoice(l, r) => {
                    if branches + 2 > branch_cap {
                        out.exhausted = true;
                        break;
                    }
                    branches += 2;
                    let mut la = arms.clone();
                    la.push(Arm::Left);
                    let mut ra = arms;
                    ra.push(Arm::Right);
                    queue.push_back((l.after, steps + 1, la));
                    queue.push_back((r.after, steps + 1, ra));
                    break;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::signature::Signature;

    fn p(s: &str) -> Expr {
        parse(s, &Signature::bool_list()).unwrap()
    }

    fn sel(s: &str) -> Selection {
        select(&p(s))
    }

    fn at(label: Label, pos: &str) -> Selection {
        Selection::Redex(Redex::new(label, pos.parse().unwrap()))
    }

    #[test]
    fn selection_cases() {
        assert_eq!(sel("((letrec x=c in \\y.y) d)"), at(Label::Lapp, "ε"));
        assert_eq!(sel("letrec x=x in x"), Selection::Stuck(StuckClass::Cycle));
        let wrong_type = "letrec x=Nil in case[Bool] x of {True -> x; False -> True}";
        assert_eq!(sel(wrong_type), Selection::Stuck(StuckClass::TypeError));
        assert_eq!(sel("choice a b"), Selection::Nd(Position::root()));
        assert_eq!(sel("((\\y.y) d)"), at(Label::Lbeta, "ε"));
        assert_eq!(sel("letrec x=a in (letrec y=b in y)"), at(Label::Llet, "letIn"));
        assert_eq!(sel("letrec x=(letrec y=b in y) in x"), at(Label::Llet, "letB(x)"));
        assert_eq!(sel("letrec x=\\u.u, y=x in (y a)"), at(Label::Cpn, "letIn.appF"));
        assert_eq!(sel("letrec x=\\u.u, y=(x b) in y"), at(Label::Cpn, "letB(y).appF"));
        assert_eq!(sel("letrec x=\\u.u, y=x in y"), at(Label::Cpn, "letIn"));
        assert_eq!(sel("\\x.x"), Selection::Stuck(StuckClass::Value));
        assert_eq!(sel("Cons True Nil"), Selection::Stuck(StuckClass::Value));
        assert_eq!(sel("letrec x=a in \\y.y"), Selection::Stuck(StuckClass::Value));
        assert_eq!(
            sel("case[Bool] (\\x.x) of {True -> True; False -> False}"),
            Selection::Stuck(StuckClass::TypeError)
        );
        assert_eq!(sel("case[List] True of {Nil -> True; Cons a b -> False}"), Selection::Stuck(StuckClass::TypeError));
        assert_eq!(sel("(f a)"), Selection::Stuck(StuckClass::TypeError));
        assert_eq!(sel("((Nil) a)"), Selection::Stuck(StuckClass::TypeError));
    }

    #[test]
    fn chain_cases() {
        let src = "letrec x=Cons a, y=(x b) in case[List] y of {Nil -> True; Cons u v -> u}";
        assert_eq!(sel(src), at(Label::Case, "letIn"));
        let src = "letrec x=Cons a in case[List] (x b) of {Nil -> True; Cons u v -> u}";
        assert_eq!(sel(src), at(Label::Case, "letIn"));
        let src = "letrec x=Cons a in case[List] x of {Nil -> True; Cons u v -> u}";
        assert_eq!(sel(src), Selection::Stuck(StuckClass::TypeError));
        assert_eq!(sel("letrec x=Cons a in (x b)"), Selection::Stuck(StuckClass::Value));
        assert_eq!(sel("letrec x=Nil in (x b)"), Selection::Stuck(StuckClass::TypeError));
        let src = "letrec x=Nil, r=case[List] x of {Nil -> True; Cons u v -> u} in r";
        assert_eq!(sel(src), at(Label::Case, "letB(r)"));
    }

    #[test]
    fn reduce_examples() {
        let (r, trace) = standard_reduce(&p("((letrec x=c in \\y.y) d)"), &NdPolicy::Left, 10);
        assert_eq!(trace[0].label, Label::Lapp);
        assert!(matches!(r, EvalResult::Stuck { class: StuckClass::TypeError, nd_count: 0, .. }));
        let (r, _) = standard_reduce(&p("((letrec x=True in \\y.y) False)"), &NdPolicy::Left, 10);
        assert!(matches!(r, EvalResult::Converged { nd_count: 0, .. }));
        let (r, _) = standard_reduce(&p("choice True False"), &NdPolicy::Left, 10);
        assert_eq!(r, EvalResult::Converged { result: p("True"), nd_count: 1 });
        let (r, _) = standard_reduce(&p("letrec x=x in x"), &NdPolicy::Left, 10);
        assert!(matches!(r, EvalResult::Stuck { class: StuckClass::Cycle, nd_count: 0, .. }));
        let omega = "letrec w=\\x.(x x) in (w w)";
        let (r, _) = standard_reduce(&p(omega), &NdPolicy::Left, 50);
        assert_eq!(r, EvalResult::Exhausted { steps: 50 });
        assert_eq!(r.summary(), "RESULT Exhausted nd=0");
    }

    #[test]
    fn convergence_sets() {
        let s = converges_set(&p("True"), 10, 100);
        assert_eq!(s.counts(), vec![0]);
        let s = converges_set(&p("choice True False"), 10, 100);
        assert_eq!(s.counts(), vec![1]);
        assert_eq!(s.witnesses[&1].len(), 2);
        let s = converges_set(&p("choice True (letrec x=x in x)"), 10, 100);
        assert_eq!(s.counts(), vec![1]);
        assert_eq!(s.witnesses[&1], vec![vec![Arm::Left]]);
        assert!(!s.exhausted);
        let s = converges_set(&p("letrec w=\\x.(x x) in (w w)"), 20, 100);
        assert!(s.exhausted && !s.converges());
    }
}
