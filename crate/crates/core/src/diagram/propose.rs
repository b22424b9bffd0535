//! Proposing diagram sets from concrete joinings.
//!
//! Instances are visited in enumeration order. An instance already covered
//! by the candidates found so far is skipped; otherwise the standard branch
//! that is not covered is followed and, at the shortest prefix where one
//! exists, a concrete joining is searched for. The joining is turned into a
//! diagram by replacing a label shared by the two sides with a
//! meta-variable and runs of `lll` labels with `lll+`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::alpha::canonical;
use crate::diagram::check::{check_branches, red_instances, BranchOutcome, CheckParams};
use crate::diagram::dsl::{DiagramRule, Family, Flag, Kind, Mult, RuleRef, SeqAtom};
use crate::enumerate::{for_each_term, EnumParams};
use crate::redex::{Label, Redex, Rule};
use crate::standard::{standard_redex, StandardRedex};
use crate::step::{classify, find_redexes, StepClass};
use crate::syntax::Expr;

/// One concrete step of a joining, as a diagram atom would see it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Concrete {
    flag: Flag,
    label: Label,
}

/// Score, forward steps and standard labels back from `t`.
type Joining = ((usize, usize), Vec<Concrete>, Vec<Label>);

#[derive(Debug, Clone, Default)]
pub struct Proposal {
    pub diagrams: Vec<DiagramRule>,
    /// Instances for which no joining was found within the bounds.
    pub unresolved: usize,
}

fn std_steps(e: &Expr) -> Vec<(Label, Expr)> {
    match standard_redex(e) {
        StandardRedex::None(_) => vec![],
        StandardRedex::Deterministic(s) => vec![(s.label, s.after)],
        StandardRedex::NdChoice(l, r) => vec![(l.label, l.after), (r.label, r.after)],
    }
}

/// Standard steps plus non-standard steps with labels in `extra`.
fn steps(e: &Expr, extra: &[Label], with_std: bool) -> Vec<(Concrete, Expr)> {
    let mut out = Vec::new();
    if with_std {
        for (l, t) in std_steps(e) {
            out.push((Concrete { flag: Flag::St, label: l }, t));
        }
    }
    let rules: BTreeSet<Rule> = extra
        .iter()
        .map(|&l| match l {
            Label::Cpt | Label::Cpd => Rule::Cp,
            Label::Ldelcyc1 | Label::Ldelcyc2 => Rule::Ldelcyc,
            l => Rule::Exact(l),
        })
        .collect();
    for rule in rules {
        for (r, t) in find_redexes(e, rule) {
            if !extra.contains(&r.label) {
                continue;
            }
            match classify(e, &r, &t) {
                Ok(StepClass::Internal) => out.push((Concrete { flag: Flag::I, label: r.label }, t)),
                Ok(StepClass::NotInReductionContext) => out.push((Concrete { flag: Flag::Plain, label: r.label }, t)),
                _ => {}
            }
        }
    }
    out
}

/// Shortest sequence from `e` to a term with canonical form `goal`; among
/// those, one whose standard labels best repeat `prefer`. With `need_std`,
/// the sequence must contain a standard step.
fn search(
    e: &Expr,
    goal: &Expr,
    extra: &[Label],
    with_std: bool,
    need_std: bool,
    prefer: &[Label],
    budget: usize,
) -> Option<Vec<Concrete>> {
    struct S<'a> {
        goal: &'a Expr,
        extra: &'a [Label],
        with_std: bool,
        need_std: bool,
    }
    fn go(s: &S<'_>, e: &Expr, left: usize, acc: &mut Vec<Concrete>, out: &mut Vec<Vec<Concrete>>) {
        if left == 0 {
            if (!s.need_std || acc.iter().any(|c| c.flag == Flag::St)) && canonical(e) == *s.goal {
                out.push(acc.clone());
            }
            return;
        }
        for (c, t) in steps(e, s.extra, s.with_std) {
            acc.push(c);
            go(s, &t, left - 1, acc, out);
            acc.pop();
        }
    }
    let s = S { goal, extra, with_std, need_std };
    (0..=budget).find_map(|n| {
        let mut found = Vec::new();
        go(&s, e, n, &mut Vec::new(), &mut found);
        found.into_iter().min_by_key(|seq| {
            let st: Vec<Label> = seq.iter().filter(|c| c.flag == Flag::St).map(|c| c.label).collect();
            mismatch(prefer, &st)
        })
    })
}

/// Terms reachable from `e` by at most `budget` standard steps, with every
/// label sequence of minimal length reaching each.
fn std_reach(e: &Expr, budget: usize) -> HashMap<Expr, Vec<Vec<Label>>> {
    let mut seen: HashMap<Expr, Vec<Vec<Label>>> = HashMap::new();
    let mut frontier = vec![(e.clone(), Vec::new())];
    seen.insert(canonical(e), vec![Vec::new()]);
    for _ in 0..budget {
        let mut next = Vec::new();
        for (x, path) in frontier {
            for (l, t) in std_steps(&x) {
                let c = canonical(&t);
                let mut p: Vec<Label> = path.clone();
                p.push(l);
                match seen.get_mut(&c) {
                    Some(ps) if ps[0].len() == p.len() => ps.push(p),
                    Some(_) => {}
                    None => {
                        seen.insert(c, vec![p.clone()]);
                        next.push((t, p));
                    }
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Labels of `b` not matched by a label of `a`.
fn mismatch(a: &[Label], b: &[Label]) -> usize {
    let mut rest = a.to_vec();
    b.iter()
        .filter(|l| match rest.iter().position(|m| m == *l) {
            Some(i) => {
                rest.swap_remove(i);
                false
            }
            None => true,
        })
        .count()
}

fn atom(c: Concrete) -> SeqAtom {
    SeqAtom { flag: c.flag, rule: RuleRef::Named(c.label), mult: Mult::One }
}

fn st(l: Label) -> Concrete {
    Concrete { flag: Flag::St, label: l }
}

/// Abstracts a concrete diagram into a pattern plus the label bound to the
/// meta-variable, if any.
fn generalize(lhs: Vec<Concrete>, rhs: Vec<Concrete>, kind: Kind) -> (DiagramRule, Option<Label>) {
    let lhs_st: Vec<Label> = lhs.iter().filter(|c| c.flag == Flag::St).map(|c| c.label).collect();
    let rhs_st: Vec<Label> = rhs.iter().filter(|c| c.flag == Flag::St).map(|c| c.label).collect();
    // A label occurring once as a standard step on each side becomes `a`.
    let shared = lhs_st
        .iter()
        .copied()
        .find(|l| lhs_st.iter().filter(|m| *m == l).count() == 1 && rhs_st.iter().filter(|m| *m == l).count() == 1);
    let conv = |seq: &[Concrete]| -> Vec<SeqAtom> {
        let mut out: Vec<SeqAtom> = Vec::new();
        for &c in seq {
            if c.flag == Flag::St && Some(c.label) == shared {
                out.push(SeqAtom { flag: Flag::St, rule: RuleRef::MetaVar("a".into()), mult: Mult::One });
                continue;
            }
            if c.flag == Flag::St && Family::Lll.labels().contains(&c.label) {
                let lll = SeqAtom { flag: Flag::St, rule: RuleRef::Family(Family::Lll), mult: Mult::Plus };
                if out.last() != Some(&lll) {
                    out.push(lll);
                }
                continue;
            }
            out.push(atom(c));
        }
        out
    };
    let rule = DiagramRule { lhs: conv(&lhs), rhs: conv(&rhs), kind, constraints: BTreeMap::new() };
    (rule, shared)
}

/// Follows the standard steps labelled by `path` from `e`.
fn follow(e: &Expr, path: &[Label]) -> Vec<Expr> {
    let mut out = vec![e.clone()];
    let mut cur = e.clone();
    for &l in path {
        match std_steps(&cur).into_iter().find(|(m, _)| *m == l) {
            Some((_, t)) => {
                cur = t;
                out.push(cur.clone());
            }
            None => break,
        }
    }
    out
}

struct Builder {
    kind: Kind,
    extra: Vec<Label>,
    params: CheckParams,
    /// Pattern (printed without constraints) to (rule, observed labels).
    found: Vec<(String, DiagramRule, BTreeSet<Label>)>,
    unresolved: usize,
}

impl Builder {
    fn current(&self) -> Vec<DiagramRule> {
        self.found
            .iter()
            .map(|(_, d, ls)| {
                let mut d = d.clone();
                if !ls.is_empty() && ls.len() < Label::BASE.len() {
                    d.constraints.insert("a".into(), ls.iter().copied().collect());
                }
                d
            })
            .collect()
    }

    fn add(&mut self, d: DiagramRule, l: Option<Label>) {
        let key = d.to_string();
        match self.found.iter_mut().find(|(k, _, _)| *k == key) {
            Some((_, _, ls)) => ls.extend(l),
            None => self.found.push((key, d, l.into_iter().collect())),
        }
    }

    /// Finds a joining for one uncovered branch and records its diagram.
    fn resolve(&mut self, src: &Expr, red: &Redex, t: &Expr, path: &[Label]) -> bool {
        let budget = self.params.depth + self.params.slack;
        let red_atom = Concrete { flag: Flag::I, label: red.label };
        match self.kind {
            Kind::Commuting => {
                for (k, x) in follow(t, path).iter().enumerate() {
                    if let Some(rhs) = search(src, &canonical(x), &self.extra, true, k == 0, &path[..k], budget) {
                        let mut lhs = vec![red_atom];
                        lhs.extend(path[..k].iter().map(|&l| st(l)));
                        let (d, l) = generalize(lhs, rhs, self.kind);
                        self.add(d, l);
                        return true;
                    }
                }
            }
            Kind::Forking => {
                let reach = std_reach(t, budget);
                for (k, x) in follow(src, path).iter().enumerate().skip(1) {
                    // Shortest joining, preferring standard steps from `t`
                    // that repeat those from `u` (the same nd arm, say).
                    let mut best: Option<Joining> = None;
                    for (w, backs) in &reach {
                        let Some(fwd) = search(x, w, &self.extra, false, false, &[], 2) else { continue };
                        for back in backs {
                            let score = (fwd.len() + back.len(), mismatch(&path[..k], back));
                            if best.as_ref().is_none_or(|(s, _, _)| score < *s) {
                                best = Some((score, fwd.clone(), back.clone()));
                            }
                        }
                    }
                    if let Some((_, fwd, back)) = best {
                        let mut lhs: Vec<Concrete> = path[..k].iter().rev().map(|&l| st(l)).collect();
                        lhs.push(red_atom);
                        let mut rhs = fwd;
                        rhs.extend(back.iter().rev().map(|&l| st(l)));
                        let (d, l) = generalize(lhs, rhs, self.kind);
                        self.add(d, l);
                        return true;
                    }
                }
            }
        }
        false
    }

    fn visit(&mut self, e: &Expr, red: Rule) {
        for (r, t) in red_instances(e, red) {
            // Each resolution covers at least one more branch; bound the
            // rounds by the branch count of the first check.
            let mut rounds = None;
            loop {
                let set = self.current();
                let branches = check_branches(&set, self.params, self.kind, e, &r, &t);
                let limit = *rounds.get_or_insert(branches.len() + 1);
                let open = branches.iter().find_map(|b| match b {
                    BranchOutcome::Uncovered { path } | BranchOutcome::BoundLimited { path } => Some(path.clone()),
                    _ => None,
                });
                let Some(path) = open else { break };
                if limit == 0 || !self.resolve(e, &r, &t, &path) {
                    self.unresolved += 1;
                    break;
                }
                rounds = Some(limit - 1);
            }
        }
    }
}

/// Proposes a diagram set for `red` from the enumerated terms. Joinings use
/// standard steps and non-standard steps labelled by `red` or `extra`.
pub fn propose_diagrams(
    red: Rule,
    kind: Kind,
    extra: &[Label],
    enum_params: &EnumParams,
    params: CheckParams,
) -> Proposal {
    let mut labels = red.labels();
    labels.extend(extra.iter().copied().filter(|l| !red.admits(*l)));
    let mut b = Builder { kind, extra: labels, params, found: Vec::new(), unresolved: 0 };
    for_each_term(enum_params, |e| b.visit(&e, red));
    Proposal { diagrams: b.current(), unresolved: b.unresolved }
}
