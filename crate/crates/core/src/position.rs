//! Paths into expressions.
//!
//! Serialized as dot-separated selectors, e.g. `letB(x1).appF`; the root is
//! written `ε`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::name::Name;
use crate::syntax::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    AppFun,
    AppArg,
    CaseScrut,
    CaseAlt(usize),
    LetBind(Name),
    LetBody,
    LamBody,
    ConArg(usize),
    ChoiceLeft,
    ChoiceRight,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::AppFun => f.write_str("appF"),
            Step::AppArg => f.write_str("appA"),
            Step::CaseScrut => f.write_str("caseS"),
            Step::CaseAlt(i) => write!(f, "alt({i})"),
            Step::LetBind(x) => write!(f, "letB({x})"),
            Step::LetBody => f.write_str("letIn"),
            Step::LamBody => f.write_str("lam"),
            Step::ConArg(i) => write!(f, "conA({i})"),
            Step::ChoiceLeft => f.write_str("chL"),
            Step::ChoiceRight => f.write_str("chR"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PositionError {
    #[error("position `{0}` does not exist in the term")]
    Invalid(Position),
    #[error("malformed position `{0}`")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Position(pub Vec<Step>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, step: Step) -> Position {
        let mut p = self.0.clone();
        p.push(step);
        Position(p)
    }

    pub fn join(&self, rest: &[Step]) -> Position {
        let mut p = self.0.clone();
        p.extend_from_slice(rest);
        Position(p)
    }

    pub fn parent(&self) -> Option<Position> {
        let (_, init) = self.0.split_last()?;
        Some(Position(init.to_vec()))
    }

    pub fn last(&self) -> Option<&Step> {
        self.0.last()
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Position {
    type Err = PositionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" || s == "root" {
            return Ok(Position::root());
        }
        let bad = || PositionError::Malformed(s.to_string());
        let mut steps = Vec::new();
        // Binder names never contain '.', so splitting on it is safe.
        for tok in s.split('.') {
            let arg = |prefix: &str| -> Option<&str> { tok.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')') };
            let step = match tok {
                "appF" => Step::AppFun,
                "appA" => Step::AppArg,
                "caseS" => Step::CaseScrut,
                "letIn" => Step::LetBody,
                "lam" => Step::LamBody,
                "chL" => Step::ChoiceLeft,
                "chR" => Step::ChoiceRight,
                _ => {
                    if let Some(x) = arg("letB") {
                        Step::LetBind(Name::new(x))
                    } else if let Some(i) = arg("alt") {
                        Step::CaseAlt(i.parse().map_err(|_| bad())?)
                    } else if let Some(i) = arg("conA") {
                        Step::ConArg(i.parse().map_err(|_| bad())?)
                    } else {
                        return Err(bad());
                    }
                }
            };
            steps.push(step);
        }
        Ok(Position(steps))
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Position {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn child<'a>(e: &'a Expr, step: &Step) -> Option<&'a Expr> {
    match (e, step) {
        (Expr::App(f, _), Step::AppFun) => Some(f),
        (Expr::App(_, a), Step::AppArg) => Some(a),
        (Expr::Case(_, s, _), Step::CaseScrut) => Some(s),
        (Expr::Case(_, _, alts), Step::CaseAlt(i)) => alts.get(*i).map(|a| &a.rhs),
        (Expr::Letrec(bs, _), Step::LetBind(x)) => bs.iter().find(|b| &b.name == x).map(|b| &b.rhs),
        (Expr::Letrec(_, body), Step::LetBody) => Some(body),
        (Expr::Lam(_, b), Step::LamBody) => Some(b),
        (Expr::Con(_, args), Step::ConArg(i)) => args.get(*i),
        (Expr::Choice(l, _), Step::ChoiceLeft) => Some(l),
        (Expr::Choice(_, r), Step::ChoiceRight) => Some(r),
        _ => None,
    }
}

fn child_mut<'a>(e: &'a mut Expr, step: &Step) -> Option<&'a mut Expr> {
    match (e, step) {
        (Expr::App(f, _), Step::AppFun) => Some(f),
        (Expr::App(_, a), Step::AppArg) => Some(a),
        (Expr::Case(_, s, _), Step::CaseScrut) => Some(s),
        (Expr::Case(_, _, alts), Step::CaseAlt(i)) => alts.get_mut(*i).map(|a| &mut a.rhs),
        (Expr::Letrec(bs, _), Step::LetBind(x)) => bs.iter_mut().find(|b| &b.name == x).map(|b| &mut b.rhs),
        (Expr::Letrec(_, body), Step::LetBody) => Some(body),
        (Expr::Lam(_, b), Step::LamBody) => Some(b),
        (Expr::Con(_, args), Step::ConArg(i)) => args.get_mut(*i),
        (Expr::Choice(l, _), Step::ChoiceLeft) => Some(l),
        (Expr::Choice(_, r), Step::ChoiceRight) => Some(r),
        _ => None,
    }
}

/// The immediate children of `e`, with their selectors.
pub fn children(e: &Expr) -> Vec<(Step, &Expr)> {
    match e {
        Expr::Var(_) => vec![],
        Expr::Con(_, args) => args.iter().enumerate().map(|(i, a)| (Step::ConArg(i), a)).collect(),
        Expr::Choice(l, r) => vec![(Step::ChoiceLeft, &**l), (Step::ChoiceRight, &**r)],
        Expr::App(f, a) => vec![(Step::AppFun, &**f), (Step::AppArg, &**a)],
        Expr::Case(_, s, alts) => {
            let mut v = vec![(Step::CaseScrut, &**s)];
            v.extend(alts.iter().enumerate().map(|(i, a)| (Step::CaseAlt(i), &a.rhs)));
            v
        }
        Expr::Lam(_, b) => vec![(Step::LamBody, &**b)],
        Expr::Letrec(bs, body) => {
            let mut v: Vec<(Step, &Expr)> = bs.iter().map(|b| (Step::LetBind(b.name.clone()), &b.rhs)).collect();
            v.push((Step::LetBody, &**body));
            v
        }
    }
}

/// All positions of `e` in pre-order.
pub fn positions(e: &Expr) -> Vec<Position> {
    fn go(e: &Expr, path: &mut Vec<Step>, out: &mut Vec<Position>) {
        out.push(Position(path.clone()));
        for (s, c) in children(e) {
            path.push(s);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

pub fn subterm<'a>(e: &'a Expr, pos: &Position) -> Result<&'a Expr, PositionError> {
    let mut cur = e;
    for s in &pos.0 {
        cur = child(cur, s).ok_or_else(|| PositionError::Invalid(pos.clone()))?;
    }
    Ok(cur)
}

pub fn subterm_mut<'a>(e: &'a mut Expr, pos: &Position) -> Result<&'a mut Expr, PositionError> {
    let mut cur = e;
    for s in &pos.0 {
        cur = child_mut(cur, s).ok_or_else(|| PositionError::Invalid(pos.clone()))?;
    }
    Ok(cur)
}

/// `e` with the subterm at `pos` replaced by `new`.
pub fn replace_at(e: &Expr, pos: &Position, new: Expr) -> Result<Expr, PositionError> {
    let mut out = e.clone();
    *subterm_mut(&mut out, pos)? = new;
    Ok(out)
}

/// Names bound by binders strictly above `pos`, innermost last.
pub fn binders_above(e: &Expr, pos: &Position) -> Result<Vec<(Position, Name)>, PositionError> {
    let mut cur = e;
    let mut out = Vec::new();
    for (i, s) in pos.0.iter().enumerate() {
        let here = Position(pos.0[..i].to_vec());
        match (cur, s) {
            (Expr::Lam(x, _), Step::LamBody) => out.push((here, x.clone())),
            (Expr::Letrec(bs, _), Step::LetBind(_) | Step::LetBody) => {
                out.extend(bs.iter().map(|b| (here.clone(), b.name.clone())))
            }
            (Expr::Case(_, _, alts), Step::CaseAlt(k)) => {
                if let Some(a) = alts.get(*k) {
                    out.extend(a.vars.iter().map(|x| (here.clone(), x.clone())))
                }
            }
            _ => {}
        }
        cur = child(cur, s).ok_or_else(|| PositionError::Invalid(pos.clone()))?;
    }
    Ok(out)
}

/// Position of the innermost `letrec` above `pos` that binds `x`.
pub fn binding_letrec(e: &Expr, pos: &Position, x: &Name) -> Option<Position> {
    let bs = binders_above(e, pos).ok()?;
    let (p, _) = bs.into_iter().rev().find(|(_, y)| y == x)?;
    match subterm(e, &p).ok()? {
        Expr::Letrec(..) => Some(p),
        _ => None,
    }
}
