//! Checking complete sets of commuting and forking diagrams on concrete
//! instances.
//!
//! A red step is an instance of the rule under test that is not standard
//! and whose redex lies in a reduction context. For a commuting instance
//! `s -red-> s1` the standard reductions of `s1` are followed; for a forking
//! instance `u -red-> t` those of `u`. Every branch must reach, within the
//! depth bound, a prefix that some diagram closes: its left-hand side
//! matches the labels of the prefix and its right-hand side can be realised
//! by concrete steps joining the endpoints up to renaming. If the branch
//! stops at once (no standard redex at the start), both sides must be stuck
//! for the same reason.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::alpha::canonical;
use crate::diagram::dsl::{DiagramRule, Flag, Kind, RuleRef, SeqAtom};
use crate::enumerate::{for_each_term, EnumParams};
use crate::redex::{Label, Redex, Rule};
use crate::standard::{standard_redex, ReductionStep, StandardRedex, StuckClass};
use crate::step::{classify, find_redexes, StepClass};
use crate::syntax::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckParams {
    /// Longest standard prefix examined (prolongation bound).
    pub depth: usize,
    /// Extra steps the right-hand side may take beyond the depth bound.
    pub slack: usize,
    /// Counterexamples kept in a report (all are counted).
    pub keep_counterexamples: usize,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams { depth: 6, slack: 2, keep_counterexamples: 20 }
    }
}

type Bindings = BTreeMap<String, Label>;

/// Called with the endpoint, bindings, witness and remaining budget.
type Finish<'f, S> = dyn FnMut(&mut S, &Expr, &Bindings, &[WitnessStep], usize) -> bool + 'f;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessStep {
    pub label: Label,
    pub standard: bool,
    pub redex: Redex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum BranchOutcome {
    Matched {
        diagram: usize,
        /// Length of the standard prefix the diagram was applied to.
        k: usize,
        path: Vec<Label>,
        /// Steps from `s`; for forking diagrams, the transformation part.
        from_s: Vec<WitnessStep>,
        /// Forking diagrams only: standard steps from `t`.
        from_t: Vec<WitnessStep>,
        /// Whether (transformation steps, length) decreased.
        measure_decreased: bool,
    },
    Terminal {
        class: StuckClass,
    },
    Uncovered {
        path: Vec<Label>,
    },
    BoundLimited {
        path: Vec<Label>,
    },
}

impl BranchOutcome {
    pub fn is_covered(&self) -> bool {
        matches!(self, BranchOutcome::Matched { .. } | BranchOutcome::Terminal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceRecord {
    pub source: Expr,
    pub red: Redex,
    pub target: Expr,
    pub branches: Vec<BranchOutcome>,
}

impl InstanceRecord {
    pub fn is_covered(&self) -> bool {
        self.branches.iter().all(BranchOutcome::is_covered)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub rule: String,
    pub kind: &'static str,
    pub terms_checked: usize,
    pub instances_checked: usize,
    pub branches_checked: usize,
    /// Branches closed by each diagram, in file order.
    pub matches: Vec<usize>,
    pub terminal: usize,
    pub prolongations_used: usize,
    /// Commuting matches whose right-hand side did not decrease the
    /// (transformation steps, length) measure.
    pub measure_increases: usize,
    pub counterexample_count: usize,
    pub bound_limited: usize,
    pub counterexamples: Vec<InstanceRecord>,
}

impl CheckReport {
    fn new(rule: Rule, kind: Kind, n: usize) -> Self {
        CheckReport {
            rule: rule.to_string(),
            kind: match kind {
                Kind::Commuting => "commuting",
                Kind::Forking => "forking",
            },
            terms_checked: 0,
            instances_checked: 0,
            branches_checked: 0,
            matches: vec![0; n],
            terminal: 0,
            prolongations_used: 0,
            measure_increases: 0,
            counterexample_count: 0,
            bound_limited: 0,
            counterexamples: Vec::new(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.counterexample_count == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{} {}: {} terms, {} instances, {} branches, matches {:?}, terminal {}, prolonged {}, counterexamples {} ({} bound-limited), measure increases {}",
            self.rule,
            self.kind,
            self.terms_checked,
            self.instances_checked,
            self.branches_checked,
            self.matches,
            self.terminal,
            self.prolongations_used,
            self.counterexample_count,
            self.bound_limited,
            self.measure_increases
        )
    }
}

/// Red steps of `rule` in `e`: non-standard instances inside a reduction
/// context.
pub fn red_instances(e: &Expr, rule: Rule) -> Vec<(Redex, Expr)> {
    find_redexes(e, rule).into_iter().filter(|(r, t)| classify(e, r, t) == Ok(StepClass::Internal)).collect()
}

/// A standard step and a red step from the same term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForkInstance {
    pub source: Expr,
    pub std_branch: ReductionStep,
    pub red_branch: ReductionStep,
}

pub fn find_forks(e: &Expr, rule: Rule) -> Vec<ForkInstance> {
    let std_steps = match standard_redex(e) {
        StandardRedex::None(_) => vec![],
        StandardRedex::Deterministic(s) => vec![s],
        StandardRedex::NdChoice(l, r) => vec![l, r],
    };
    let mut out = Vec::new();
    for (r, t) in red_instances(e, rule) {
        let red_branch = ReductionStep {
            label: r.label,
            flag: crate::standard::Flag::I,
            pos: r.pos.clone(),
            before: e.clone(),
            after: t,
        };
        for s in &std_steps {
            out.push(ForkInstance { source: e.clone(), std_branch: s.clone(), red_branch: red_branch.clone() });
        }
    }
    out
}

/// One candidate step with its class.
#[derive(Clone)]
struct Candidate {
    label: Label,
    redex: Redex,
    after: Expr,
    standard: bool,
    internal: bool,
}

struct Engine<'a> {
    diagrams: &'a [DiagramRule],
    params: CheckParams,
    cache: HashMap<(Expr, Label), Vec<Candidate>>,
    std_cache: HashMap<Expr, Vec<ReductionStep>>,
}

fn std_steps_of(e: &Expr) -> Vec<ReductionStep> {
    match standard_redex(e) {
        StandardRedex::None(_) => vec![],
        StandardRedex::Deterministic(s) => vec![s],
        StandardRedex::NdChoice(l, r) => vec![l, r],
    }
}

fn stuck_class(e: &Expr) -> Option<StuckClass> {
    match standard_redex(e) {
        StandardRedex::None(c) => Some(c),
        _ => None,
    }
}

/// All ways the labels `path` match the atom sequence, as meta-variable
/// bindings.
fn match_seq(d: &DiagramRule, atoms: &[SeqAtom], path: &[Label], b: &mut Bindings, out: &mut Vec<Bindings>) {
    let Some((a, rest)) = atoms.split_first() else {
        if path.is_empty() {
            out.push(b.clone());
        }
        return;
    };
    let max = a.mult.max().unwrap_or(path.len()).min(path.len());
    for n in a.mult.min()..=max {
        let taken = &path[..n];
        let mut local = b.clone();
        if taken.iter().all(|&l| admits(d, &a.rule, l, &mut local)) {
            match_seq(d, rest, &path[n..], &mut local, out);
        }
    }
}

/// Whether `rule` admits `l`, binding a meta-variable on first use.
fn admits(d: &DiagramRule, rule: &RuleRef, l: Label, b: &mut Bindings) -> bool {
    match rule {
        RuleRef::MetaVar(v) => match b.get(v) {
            Some(&bound) => bound == l,
            None => {
                if d.allowed(rule).contains(&l) {
                    b.insert(v.clone(), l);
                    true
                } else {
                    false
                }
            }
        },
        _ => d.allowed(rule).contains(&l),
    }
}

impl Engine<'_> {
    fn std_steps(&mut self, e: &Expr) -> Vec<ReductionStep> {
        if let Some(v) = self.std_cache.get(e) {
            return v.clone();
        }
        let v = std_steps_of(e);
        self.std_cache.insert(e.clone(), v.clone());
        v
    }

    fn instances(&mut self, e: &Expr, l: Label) -> Vec<Candidate> {
        let key = (e.clone(), l);
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let rule = match l {
            Label::Cpt | Label::Cpd => Rule::Cp,
            Label::Ldelcyc1 | Label::Ldelcyc2 => Rule::Ldelcyc,
            l => Rule::Exact(l),
        };
        let v: Vec<Candidate> = find_redexes(e, rule)
            .into_iter()
            .filter(|(r, _)| r.label == l)
            .map(|(r, t)| {
                let class = classify(e, &r, &t).unwrap_or(StepClass::NotInReductionContext);
                Candidate {
                    label: l,
                    redex: r,
                    after: t,
                    standard: class == StepClass::Standard,
                    internal: class == StepClass::Internal,
                }
            })
            .collect();
        self.cache.insert(key, v.clone());
        v
    }

    /// Steps from `e` that `atom` admits, given the current bindings.
    fn options(&mut self, d: &DiagramRule, atom: &SeqAtom, e: &Expr, b: &Bindings) -> Vec<Candidate> {
        let labels = match &atom.rule {
            RuleRef::MetaVar(v) => match b.get(v) {
                Some(&l) => vec![l],
                None => d.allowed(&atom.rule),
            },
            r => d.allowed(r),
        };
        let mut out = Vec::new();
        if atom.flag == Flag::St {
            for s in self.std_steps(e) {
                if labels.contains(&s.label) {
                    let redex = Redex::new(s.label, s.pos.clone());
                    out.push(Candidate { label: s.label, redex, after: s.after, standard: true, internal: false });
                }
            }
            // A transformation step can coincide with the standard step.
            for &l in labels.iter().filter(|l| !l.is_base()) {
                out.extend(self.instances(e, l).into_iter().filter(|c| c.standard));
            }
            return out;
        }
        if matches!(atom.flag, Flag::Either | Flag::Plain) {
            for s in self.std_steps(e) {
                if labels.contains(&s.label) {
                    let redex = Redex::new(s.label, s.pos.clone());
                    out.push(Candidate { label: s.label, redex, after: s.after, standard: true, internal: false });
                }
            }
        }
        for &l in &labels {
            for c in self.instances(e, l) {
                let ok = match atom.flag {
                    Flag::I => c.internal,
                    Flag::Either => c.internal || (c.standard && !l.is_base()),
                    Flag::Plain => !(c.standard && l.is_base()),
                    Flag::St => unreachable!(),
                };
                if ok {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Searches for concrete steps from `e` instantiating `atoms`; calls
    /// `end` on each endpoint until it returns true.
    #[allow(clippy::too_many_arguments)]
    fn realize(
        &mut self,
        d: &DiagramRule,
        atoms: &[SeqAtom],
        count: usize,
        e: &Expr,
        b: &mut Bindings,
        budget: usize,
        steps: &mut Vec<WitnessStep>,
        end: &mut Finish<'_, Self>,
    ) -> bool {
        let Some((a, rest)) = atoms.split_first() else {
            return end(self, e, b, steps, budget);
        };
        if count >= a.mult.min() && self.realize(d, rest, 0, e, b, budget, steps, end) {
            return true;
        }
        let more = a.mult.max().is_none_or(|m| count < m);
        if !more || budget == 0 {
            return false;
        }
        for c in self.options(d, a, e, b) {
            let mut local = b.clone();
            if let RuleRef::MetaVar(v) = &a.rule {
                local.insert(v.clone(), c.label);
            }
            steps.push(WitnessStep { label: c.label, standard: c.standard, redex: c.redex.clone() });
            let found = self.realize(d, atoms, count + 1, &c.after, &mut local, budget - 1, steps, end);
            if found {
                *b = local;
                return true;
            }
            steps.pop();
        }
        false
    }

    fn red_admitted(&self, d: &DiagramRule, red: Label) -> bool {
        let a = d.red();
        a.flag != Flag::St && d.allowed(&a.rule).contains(&red)
    }

    /// Tries every diagram on a prefix with labels `path` from the fork or
    /// commute source `src`, red step to `t`, standard prefix ending at `x`.
    fn try_close(
        &mut self,
        kind: Kind,
        red: Label,
        src: &Expr,
        t: &Expr,
        x: &Expr,
        path: &[Label],
    ) -> Option<BranchOutcome> {
        let diagrams = self.diagrams;
        let k = path.len();
        let budget = self.params.depth + self.params.slack;
        for (i, d) in diagrams.iter().enumerate() {
            if d.kind != kind || !self.red_admitted(d, red) {
                continue;
            }
            let mut sols = Vec::new();
            match_seq(d, &d.lhs_standard(), path, &mut Bindings::new(), &mut sols);
            for mut b in sols {
                let mut steps = Vec::new();
                match kind {
                    Kind::Commuting => {
                        let goal = canonical(x);
                        let mut done: Option<Vec<WitnessStep>> = None;
                        let ok =
                            self.realize(d, &d.rhs, 0, src, &mut b, budget, &mut steps, &mut |_, end, _, st, _| {
                                // With no standard steps on the left the right
                                // side must not just repeat the red step.
                                let trivial = k == 0 && !st.iter().any(|w| w.standard);
                                if !trivial && canonical(end) == goal {
                                    done = Some(st.to_vec());
                                    true
                                } else {
                                    false
                                }
                            });
                        if ok {
                            let from_s = done.expect("set on success");
                            let transforms = from_s.iter().filter(|w| !w.standard).count();
                            let measure_decreased = (transforms, from_s.len()) < (1, 1 + k);
                            return Some(BranchOutcome::Matched {
                                diagram: i,
                                k,
                                path: path.to_vec(),
                                from_s,
                                from_t: vec![],
                                measure_decreased,
                            });
                        }
                    }
                    Kind::Forking => {
                        let split = d.rhs.iter().rposition(|a| a.flag != Flag::St).map_or(0, |p| p + 1);
                        let fwd: Vec<SeqAtom> = d.rhs[..split].to_vec();
                        let back: Vec<SeqAtom> = d.rhs[split..].iter().rev().cloned().collect();
                        let mut witness: Option<(Vec<WitnessStep>, Vec<WitnessStep>)> = None;
                        let s = x.clone();
                        let ok =
                            self.realize(d, &back, 0, t, &mut b, budget, &mut steps, &mut |eng, w, bt, st_t, left| {
                                let goal = canonical(w);
                                let mut b2 = bt.clone();
                                let mut fsteps = Vec::new();
                                let mut found: Option<Vec<WitnessStep>> = None;
                                let ok =
                                    eng.realize(d, &fwd, 0, &s, &mut b2, left, &mut fsteps, &mut |_, end, _, st, _| {
                                        if canonical(end) == goal {
                                            found = Some(st.to_vec());
                                            true
                                        } else {
                                            false
                                        }
                                    });
                                if ok {
                                    witness = Some((found.expect("set on success"), st_t.to_vec()));
                                }
                                ok
                            });
                        if ok {
                            let (from_s, from_t) = witness.expect("set on success");
                            let transforms = from_s.iter().filter(|w| !w.standard).count();
                            let measure_decreased = (transforms, from_s.len() + from_t.len()) < (1, 1 + k);
                            return Some(BranchOutcome::Matched {
                                diagram: i,
                                k,
                                path: path.to_vec(),
                                from_s,
                                from_t,
                                measure_decreased,
                            });
                        }
                    }
                }
            }
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn explore(
        &mut self,
        kind: Kind,
        red: Label,
        src: &Expr,
        t: &Expr,
        x: &Expr,
        path: &mut Vec<Label>,
        out: &mut Vec<BranchOutcome>,
    ) {
        let k = path.len();
        let may_close = kind == Kind::Commuting || k >= 1;
        if may_close {
            if let Some(m) = self.try_close(kind, red, src, t, x, path) {
                out.push(m);
                return;
            }
        }
        let steps = self.std_steps(x);
        if steps.is_empty() {
            if k == 0 {
                // The other side of the red step must be stuck alike.
                let other = match kind {
                    Kind::Commuting => src,
                    Kind::Forking => t,
                };
                if let Some(a) = stuck_class(x) {
                    let budget = self.params.depth + self.params.slack;
                    let ok = match a {
                        StuckClass::Value => stuck_class(other) == Some(StuckClass::Value),
                        _ => self.reaches_stuck(other, a, budget),
                    };
                    if ok {
                        out.push(BranchOutcome::Terminal { class: a });
                        return;
                    }
                }
            }
            out.push(BranchOutcome::Uncovered { path: path.clone() });
            return;
        }
        if k >= self.params.depth {
            out.push(BranchOutcome::BoundLimited { path: path.clone() });
            return;
        }
        for s in steps {
            path.push(s.label);
            self.explore(kind, red, src, t, &s.after, path, out);
            path.pop();
        }
    }

    /// Whether some standard reduction of `e` within `budget` steps ends
    /// stuck in class `c`.
    fn reaches_stuck(&mut self, e: &Expr, c: StuckClass, budget: usize) -> bool {
        let steps = self.std_steps(e);
        if steps.is_empty() {
            return stuck_class(e) == Some(c);
        }
        budget > 0 && steps.iter().any(|s| self.reaches_stuck(&s.after, c, budget - 1))
    }

    fn check(&mut self, kind: Kind, src: &Expr, red: &Redex, t: &Expr) -> Vec<BranchOutcome> {
        self.cache.clear();
        self.std_cache.clear();
        let mut out = Vec::new();
        let start = match kind {
            Kind::Commuting => t,
            Kind::Forking => src,
        };
        self.explore(kind, red.label, src, t, start, &mut Vec::new(), &mut out);
        out
    }
}

/// The branch outcomes of one instance.
pub(crate) fn check_branches(
    diagrams: &[DiagramRule],
    params: CheckParams,
    kind: Kind,
    src: &Expr,
    red: &Redex,
    t: &Expr,
) -> Vec<BranchOutcome> {
    let mut eng = Engine { diagrams, params, cache: HashMap::new(), std_cache: HashMap::new() };
    eng.check(kind, src, red, t)
}

/// Checks the commuting instance `src -red-> t` followed by standard
/// reduction of `t`.
pub fn check_commuting(
    src: &Expr,
    red: &Redex,
    t: &Expr,
    diagrams: &[DiagramRule],
    params: CheckParams,
) -> InstanceRecord {
    let mut eng = Engine { diagrams, params, cache: HashMap::new(), std_cache: HashMap::new() };
    let branches = eng.check(Kind::Commuting, src, red, t);
    InstanceRecord { source: src.clone(), red: red.clone(), target: t.clone(), branches }
}

/// Checks the fork between the standard reduction of `src` and the red
/// step `src -red-> t`.
pub fn close_fork(src: &Expr, red: &Redex, t: &Expr, diagrams: &[DiagramRule], params: CheckParams) -> InstanceRecord {
    let mut eng = Engine { diagrams, params, cache: HashMap::new(), std_cache: HashMap::new() };
    let branches = eng.check(Kind::Forking, src, red, t);
    InstanceRecord { source: src.clone(), red: red.clone(), target: t.clone(), branches }
}

fn min_k(kind: Kind) -> usize {
    match kind {
        Kind::Commuting => 0,
        Kind::Forking => 1,
    }
}

/// Checks every red instance in `terms`, feeding each record to `sink`.
pub fn verify_terms(
    terms: impl IntoIterator<Item = Expr>,
    red: Rule,
    diagrams: &[DiagramRule],
    kind: Kind,
    params: CheckParams,
    sink: &mut dyn FnMut(&InstanceRecord),
) -> CheckReport {
    let mut report = CheckReport::new(red, kind, diagrams.len());
    let mut eng = Engine { diagrams, params, cache: HashMap::new(), std_cache: HashMap::new() };
    for e in terms {
        check_term(&mut eng, &e, red, kind, &mut report, sink);
    }
    report
}

fn check_term(
    eng: &mut Engine<'_>,
    e: &Expr,
    red: Rule,
    kind: Kind,
    report: &mut CheckReport,
    sink: &mut dyn FnMut(&InstanceRecord),
) {
    report.terms_checked += 1;
    for (r, t) in red_instances(e, red) {
        let branches = eng.check(kind, e, &r, &t);
        report.instances_checked += 1;
        for b in &branches {
            report.branches_checked += 1;
            match b {
                BranchOutcome::Matched { diagram, k, measure_decreased, .. } => {
                    report.matches[*diagram] += 1;
                    if *k > min_k(kind) {
                        report.prolongations_used += 1;
                    }
                    if kind == Kind::Commuting && !measure_decreased {
                        report.measure_increases += 1;
                    }
                }
                BranchOutcome::Terminal { .. } => report.terminal += 1,
                BranchOutcome::BoundLimited { .. } => report.bound_limited += 1,
                BranchOutcome::Uncovered { .. } => {}
            }
        }
        let rec = InstanceRecord { source: e.clone(), red: r, target: t, branches };
        if !rec.is_covered() {
            report.counterexample_count += 1;
            if report.counterexamples.len() < eng.params.keep_counterexamples {
                report.counterexamples.push(rec.clone());
            }
        }
        sink(&rec);
    }
}

/// Enumerates closed terms and checks every red instance in them.
pub fn verify_complete_set(
    red: Rule,
    diagrams: &[DiagramRule],
    kind: Kind,
    enum_params: &EnumParams,
    params: CheckParams,
    sink: &mut dyn FnMut(&InstanceRecord),
) -> CheckReport {
    let mut report = CheckReport::new(red, kind, diagrams.len());
    let mut eng = Engine { diagrams, params, cache: HashMap::new(), std_cache: HashMap::new() };
    for_each_term(enum_params, |e| check_term(&mut eng, &e, red, kind, &mut report, sink));
    report
}

/// Whether a diagram set is commuting or forking; `None` if mixed or empty.
pub fn kind_of(diagrams: &[DiagramRule]) -> Option<Kind> {
    let k = diagrams.first()?.kind;
    diagrams.iter().all(|d| d.kind == k).then_some(k)
}

/// Replays a matched branch and returns the endpoints reached from `s`
/// (and from `t` for forking witnesses).
pub fn replay(start: &Expr, steps: &[WitnessStep]) -> Result<Expr, crate::redex::RuleError> {
    let mut cur = start.clone();
    for w in steps {
        cur = crate::step::apply(&cur, &w.redex)?.0;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::dsl::{parse_diagram, parse_diagram_file};
    use crate::parse::parse;
    use crate::signature::Signature;

    fn p(s: &str) -> Expr {
        parse(s, &Signature::bool_list()).unwrap()
    }

    #[test]
    fn example_fork_and_commute() {
        let e = p("((letrec x=c in \\y.y) d)");
        let forks = find_forks(&e, Rule::Exact(Label::Ldel));
        assert_eq!(forks.len(), 1);
        assert_eq!(forks[0].std_branch.label, Label::Lapp);
        assert_eq!(forks[0].red_branch.label, Label::Ldel);

        let set = parse_diagram_file("ldel . st,a ~> st,a . ldel\nldel ~> st,lll+ . ldel\n").unwrap();
        let (r, t) = red_instances(&e, Rule::Exact(Label::Ldel)).remove(0);
        let rec = check_commuting(&e, &r, &t, &set, CheckParams::default());
        assert!(rec.is_covered());
        let BranchOutcome::Matched { diagram, k, from_s, .. } = &rec.branches[0] else { panic!("{rec:?}") };
        assert_eq!((*diagram, *k), (1, 0));
        assert!(crate::alpha::alpha_eq(&replay(&e, from_s).unwrap(), &t));
    }

    #[test]
    fn empty_set_gives_counterexample() {
        let e = p("((letrec x=c in \\y.y) d)");
        let (r, t) = red_instances(&e, Rule::Exact(Label::Ldel)).remove(0);
        assert!(!close_fork(&e, &r, &t, &[], CheckParams::default()).is_covered());
        assert!(!check_commuting(&e, &r, &t, &[], CheckParams::default()).is_covered());
    }

    #[test]
    fn disjoint_square() {
        // A garbage binding next to an unrelated standard step.
        let e = p("letrec g=True, f=\\u.u in (f True)");
        let set = vec![parse_diagram("st,a . ldel ~> ldel . st,a").unwrap()];
        let (r, t) = red_instances(&e, Rule::Exact(Label::Ldel)).remove(0);
        let rec = close_fork(&e, &r, &t, &set, CheckParams::default());
        assert!(rec.is_covered(), "{rec:?}");
    }

    #[test]
    fn ucp_then_cpn() {
        let e = p("letrec x=\\u.u in (x True)");
        let set = vec![parse_diagram("ucp ~> st,cpn . ldel").unwrap()];
        let (r, t) = red_instances(&e, Rule::Exact(Label::Ucp)).remove(0);
        let rec = check_commuting(&e, &r, &t, &set, CheckParams::default());
        assert!(rec.is_covered(), "{rec:?}");
    }
}
