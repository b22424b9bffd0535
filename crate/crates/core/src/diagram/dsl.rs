//! Textual diagram rules.
//!
//! One rule per line: `LHS ~> RHS`, optionally followed by constraints
//! `| a in {case,cpn}`. A sequence is a ` . `-separated list of atoms
//! `flag,rule[mult]` where the flag is `i`, `st`, `either` or `plain`
//! (a bare rule means `plain`) and the multiplicity is `+`, `*` or `?`.
//! `ε` stands for the empty sequence. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::redex::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flag {
    St,
    I,
    Either,
    Plain,
}

impl Flag {
    fn as_str(self) -> &'static str {
        match self {
            Flag::St => "st",
            Flag::I => "i",
            Flag::Either => "either",
            Flag::Plain => "plain",
        }
    }

    pub fn allows_standard(self) -> bool {
        matches!(self, Flag::St | Flag::Either | Flag::Plain)
    }

    pub fn allows_internal(self) -> bool {
        matches!(self, Flag::I | Flag::Either | Flag::Plain)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Lll,
    Cp,
    Nd,
    Ldelcyc,
}

impl Family {
    pub fn labels(self) -> &'static [Label] {
        match self {
            Family::Lll => &Label::LLL,
            Family::Cp => &[Label::Cpt, Label::Cpd],
            Family::Nd => &[Label::Ndl, Label::Ndr],
            Family::Ldelcyc => &[Label::Ldelcyc1, Label::Ldelcyc2],
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Family::Lll => "lll",
            Family::Cp => "cp",
            Family::Nd => "nd",
            Family::Ldelcyc => "ldelcyc",
        }
    }

    fn parse(s: &str) -> Option<Family> {
        match s {
            "lll" | "ll" | "ill" => Some(Family::Lll),
            "cp" => Some(Family::Cp),
            "nd" => Some(Family::Nd),
            "ldelcyc" => Some(Family::Ldelcyc),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleRef {
    Named(Label),
    Family(Family),
    MetaVar(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mult {
    One,
    Plus,
    Star,
    ZeroOrOne,
}

impl Mult {
    pub fn min(self) -> usize {
        match self {
            Mult::One | Mult::Plus => 1,
            Mult::Star | Mult::ZeroOrOne => 0,
        }
    }

    pub fn max(self) -> Option<usize> {
        match self {
            Mult::One | Mult::ZeroOrOne => Some(1),
            Mult::Plus | Mult::Star => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeqAtom {
    pub flag: Flag,
    pub rule: RuleRef,
    pub mult: Mult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Commuting,
    Forking,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramRule {
    pub lhs: Vec<SeqAtom>,
    pub rhs: Vec<SeqAtom>,
    pub kind: Kind,
    /// Allowed labels per meta-variable; unconstrained ones default to the
    /// base-calculus labels.
    pub constraints: BTreeMap<String, Vec<Label>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

fn err(line: usize, msg: impl Into<String>) -> DslError {
    DslError::Syntax { line, msg: msg.into() }
}

/// Labels denoted by a name in a constraint set.
fn set_member(name: &str) -> Option<Vec<Label>> {
    if let Some(f) = Family::parse(name) {
        return Some(f.labels().to_vec());
    }
    name.parse::<Label>().ok().map(|l| vec![l])
}

fn parse_atom(text: &str, line: usize) -> Result<SeqAtom, DslError> {
    let text = text.trim();
    let (flag, rest) = match text.split_once(',') {
        Some((f, r)) => {
            let flag = match f.trim() {
                "i" => Flag::I,
                "st" => Flag::St,
                "either" => Flag::Either,
                "plain" => Flag::Plain,
                other => return Err(err(line, format!("unknown flag `{other}`"))),
            };
            (flag, r.trim())
        }
        None => (Flag::Plain, text),
    };
    let (name, mult) = match rest.chars().last() {
        Some('+') => (&rest[..rest.len() - 1], Mult::Plus),
        Some('*') => (&rest[..rest.len() - 1], Mult::Star),
        Some('?') => (&rest[..rest.len() - 1], Mult::ZeroOrOne),
        _ => (rest, Mult::One),
    };
    let name = name.trim();
    if name.is_empty() {
        return Err(err(line, format!("missing rule in atom `{text}`")));
    }
    if name.ends_with(['+', '*', '?']) {
        return Err(err(line, format!("repeated multiplicity in `{text}`")));
    }
    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(err(line, format!("malformed atom `{text}`")));
    }
    let rule = if let Ok(l) = name.parse::<Label>() {
        RuleRef::Named(l)
    } else if let Some(f) = Family::parse(name) {
        RuleRef::Family(f)
    } else if name.chars().next().is_some_and(|c| c.is_ascii_lowercase()) && name.len() <= 2 {
        RuleRef::MetaVar(name.to_string())
    } else {
        return Err(err(line, format!("unknown rule `{name}`")));
    };
    if matches!(mult, Mult::Plus | Mult::Star) && matches!(rule, RuleRef::Named(_)) {
        return Err(err(
            line,
            format!(
                "`{}` repetition needs a family or meta-variable in `{text}`",
                if mult == Mult::Plus { "+" } else { "*" }
            ),
        ));
    }
    Ok(SeqAtom { flag, rule, mult })
}

fn parse_seq(text: &str, line: usize) -> Result<Vec<SeqAtom>, DslError> {
    let text = text.trim();
    if text == "ε" || text == "eps" {
        return Ok(vec![]);
    }
    if text.is_empty() {
        return Err(err(line, "empty sequence (write `ε`)"));
    }
    text.split(" . ").map(|a| parse_atom(a, line)).collect()
}

/// Parses one rule; `line` is used in error messages.
pub fn parse_diagram_line(text: &str, line: usize) -> Result<DiagramRule, DslError> {
    let mut parts = text.split('|');
    let main = parts.next().unwrap_or_default();
    let (lhs, rhs) = main.split_once("~>").ok_or_else(|| err(line, "missing `~>`"))?;
    let lhs = parse_seq(lhs, line)?;
    let rhs = parse_seq(rhs, line)?;
    let mut constraints = BTreeMap::new();
    for c in parts {
        let (var, set) =
            c.split_once(" in ").ok_or_else(|| err(line, format!("malformed constraint `{}`", c.trim())))?;
        let set = set.trim();
        let inner = set
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| err(line, format!("constraint set must be braced: `{set}`")))?;
        let mut labels = Vec::new();
        for m in inner.split(',') {
            let m = m.trim();
            labels.extend(set_member(m).ok_or_else(|| err(line, format!("unknown label `{m}`")))?);
        }
        constraints.insert(var.trim().to_string(), labels);
    }
    let kind = match lhs.first() {
        None => return Err(err(line, "empty left-hand side")),
        Some(a) if a.flag == Flag::St => Kind::Forking,
        Some(_) => Kind::Commuting,
    };
    let well_formed = match kind {
        Kind::Commuting => lhs[0].mult == Mult::One && lhs[1..].iter().all(|a| a.flag == Flag::St),
        Kind::Forking => {
            let (red, st) = lhs.split_last().expect("non-empty");
            red.flag != Flag::St && red.mult == Mult::One && st.iter().all(|a| a.flag == Flag::St)
        }
    };
    if !well_formed {
        return Err(err(line, "left-hand side must be a transformation step and standard steps"));
    }
    for v in constraints.keys() {
        let used = lhs.iter().chain(&rhs).any(|a| a.rule == RuleRef::MetaVar(v.clone()));
        if !used {
            return Err(err(line, format!("constraint on unused meta-variable `{v}`")));
        }
    }
    Ok(DiagramRule { lhs, rhs, kind, constraints })
}

pub fn parse_diagram(text: &str) -> Result<DiagramRule, DslError> {
    parse_diagram_line(text, 1)
}

/// Parses a diagram file, skipping blank lines and comments.
pub fn parse_diagram_file(text: &str) -> Result<Vec<DiagramRule>, DslError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_diagram_line(line, i + 1)?);
    }
    Ok(out)
}

impl DiagramRule {
    /// The transformation atom of the left-hand side.
    pub fn red(&self) -> &SeqAtom {
        match self.kind {
            Kind::Commuting => &self.lhs[0],
            Kind::Forking => self.lhs.last().expect("non-empty"),
        }
    }

    /// The standard part of the left-hand side in reduction order: for a
    /// forking rule, starting next to the shared source.
    pub fn lhs_standard(&self) -> Vec<SeqAtom> {
        match self.kind {
            Kind::Commuting => self.lhs[1..].to_vec(),
            Kind::Forking => self.lhs[..self.lhs.len() - 1].iter().rev().cloned().collect(),
        }
    }

    pub fn allowed(&self, r: &RuleRef) -> Vec<Label> {
        match r {
            RuleRef::Named(l) => vec![*l],
            RuleRef::Family(f) => f.labels().to_vec(),
            RuleRef::MetaVar(v) => self.constraints.get(v).cloned().unwrap_or_else(|| Label::BASE.to_vec()),
        }
    }
}

impl fmt::Display for SeqAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.flag != Flag::Plain {
            write!(f, "{},", self.flag.as_str())?;
        }
        match &self.rule {
            RuleRef::Named(l) => write!(f, "{l}")?,
            RuleRef::Family(fam) => f.write_str(fam.as_str())?,
            RuleRef::MetaVar(v) => f.write_str(v)?,
        }
        f.write_str(match self.mult {
            Mult::One => "",
            Mult::Plus => "+",
            Mult::Star => "*",
            Mult::ZeroOrOne => "?",
        })
    }
}

fn write_seq(f: &mut fmt::Formatter<'_>, seq: &[SeqAtom]) -> fmt::Result {
    if seq.is_empty() {
        return f.write_str("ε");
    }
    for (i, a) in seq.iter().enumerate() {
        if i > 0 {
            f.write_str(" . ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for DiagramRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_seq(f, &self.lhs)?;
        f.write_str(" ~> ")?;
        write_seq(f, &self.rhs)?;
        for (v, ls) in &self.constraints {
            let names: Vec<&str> = ls.iter().map(|l| l.as_str()).collect();
            write!(f, " | {v} in {{{}}}", names.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let d = parse_diagram("i,llet . st,a ~> st,a . i,llet").unwrap();
        assert_eq!(d.kind, Kind::Commuting);
        assert_eq!(d.lhs[1].rule, RuleRef::MetaVar("a".into()));
        let d = parse_diagram("ldel ~> st,lll+ . ldel").unwrap();
        assert_eq!(d.lhs[0].flag, Flag::Plain);
        assert_eq!(d.rhs[0], SeqAtom { flag: Flag::St, rule: RuleRef::Family(Family::Lll), mult: Mult::Plus });
        let d = parse_diagram("i,cpd . st,cpn ~> st,cpn . i,cpd . i,cpd").unwrap();
        assert_eq!(d.rhs.len(), 3);
        let d = parse_diagram("st,llet . st,a . i,llet ~> st,a").unwrap();
        assert_eq!(d.kind, Kind::Forking);
        assert_eq!(d.lhs_standard()[0].rule, RuleRef::MetaVar("a".into()));
    }

    #[test]
    fn constraints_and_round_trip() {
        let src = "ucp . st,a ~> st,a | a in {case,nd}";
        let d = parse_diagram(src).unwrap();
        assert_eq!(d.constraints["a"], vec![Label::Case, Label::Ndl, Label::Ndr]);
        let again = parse_diagram(&d.to_string()).unwrap();
        assert_eq!(again, d);
        let d = parse_diagram("i,llet . st,lll+ ~> st,lll+ . i,llet?").unwrap();
        assert_eq!(parse_diagram(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_diagram("i,llet ~>").is_err());
        assert!(parse_diagram("i,llet . st,a").is_err());
        assert!(parse_diagram("i,llet ~> st,llet+").is_err());
        assert!(parse_diagram("i,llet ~> st,a++").is_err());
        assert!(parse_diagram("x,llet ~> st,a").is_err());
        assert!(parse_diagram("st,a . i,llet . st,a ~> st,a").is_err());
        assert!(parse_diagram("ldel ~> st,a | b in {case}").is_err());
        let e = parse_diagram_file("# c\nldel ~> ldel\n\nldel ~> Foo\n").unwrap_err();
        assert_eq!(e, DslError::Syntax { line: 4, msg: "unknown rule `Foo`".into() });
    }
}
