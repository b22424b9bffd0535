//! Rule labels, redex descriptors and rule errors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::name::Name;
use crate::position::{binding_letrec, subterm, Position, PositionError};
use crate::syntax::Expr;

/// Labels of reduction and transformation steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Lbeta,
    Cpn,
    Llet,
    Lapp,
    Lcase,
    Case,
    Ndl,
    Ndr,
    Ldel,
    Ldelcyc1,
    Ldelcyc2,
    Lcv,
    Cpt,
    Cpd,
    Ucp,
}

impl Label {
    pub const ALL: [Label; 15] = [
        Label::Lbeta,
        Label::Cpn,
        Label::Llet,
        Label::Lapp,
        Label::Lcase,
        Label::Case,
        Label::Ndl,
        Label::Ndr,
        Label::Ldel,
        Label::Ldelcyc1,
        Label::Ldelcyc2,
        Label::Lcv,
        Label::Cpt,
        Label::Cpd,
        Label::Ucp,
    ];

    /// The rules of the base calculus.
    pub const BASE: [Label; 8] =
        [Label::Lbeta, Label::Cpn, Label::Llet, Label::Lapp, Label::Lcase, Label::Case, Label::Ndl, Label::Ndr];

    pub const LLL: [Label; 3] = [Label::Llet, Label::Lapp, Label::Lcase];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Lbeta => "lbeta",
            Label::Cpn => "cpn",
            Label::Llet => "llet",
            Label::Lapp => "lapp",
            Label::Lcase => "lcase",
            Label::Case => "case",
            Label::Ndl => "ndl",
            Label::Ndr => "ndr",
            Label::Ldel => "ldel",
            Label::Ldelcyc1 => "ldelcyc1",
            Label::Ldelcyc2 => "ldelcyc2",
            Label::Lcv => "lcv",
            Label::Cpt => "cpt",
            Label::Cpd => "cpd",
            Label::Ucp => "ucp",
        }
    }

    pub fn is_base(self) -> bool {
        Label::BASE.contains(&self)
    }

    pub fn is_nd(self) -> bool {
        matches!(self, Label::Ndl | Label::Ndr)
    }

    pub fn is_lll(self) -> bool {
        Label::LLL.contains(&self)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown rule label `{0}`")]
pub struct UnknownLabel(pub String);

impl FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL.iter().copied().find(|l| l.as_str() == s).ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rules as requested by a user: a concrete label, or one of the families
/// whose concrete label is decided by the redex (`cp`, `ldelcyc`, `nd`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Exact(Label),
    Cp,
    Ldelcyc,
    Nd,
}

impl Rule {
    pub fn admits(self, l: Label) -> bool {
        match self {
            Rule::Exact(k) => k == l,
            Rule::Cp => matches!(l, Label::Cpt | Label::Cpd),
            Rule::Ldelcyc => matches!(l, Label::Ldelcyc1 | Label::Ldelcyc2),
            Rule::Nd => l.is_nd(),
        }
    }

    pub fn labels(self) -> Vec<Label> {
        Label::ALL.iter().copied().filter(|&l| self.admits(l)).collect()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Exact(l) => write!(f, "{l}"),
            Rule::Cp => f.write_str("cp"),
            Rule::Ldelcyc => f.write_str("ldelcyc"),
            Rule::Nd => f.write_str("nd"),
        }
    }
}

impl FromStr for Rule {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cp" => Ok(Rule::Cp),
            "ldelcyc" => Ok(Rule::Ldelcyc),
            "nd" => Ok(Rule::Nd),
            _ => s.parse().map(Rule::Exact),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error(transparent)]
    Position(#[from] PositionError),
    #[error("{rule}: redex shape mismatch: {msg}")]
    Shape { rule: &'static str, msg: String },
    #[error("{rule}: {msg}")]
    SideCondition { rule: &'static str, msg: String },
}

impl RuleError {
    pub(crate) fn shape(rule: &'static str, msg: impl Into<String>) -> Self {
        RuleError::Shape { rule, msg: msg.into() }
    }

    pub(crate) fn side(rule: &'static str, msg: impl Into<String>) -> Self {
        RuleError::SideCondition { rule, msg: msg.into() }
    }
}

/// A rule instance in a term.
///
/// `pos` conventions: the application node for `lbeta`/`lapp`, the `case`
/// node for `lcase`/`case`, the `choice` node for `ndl`/`ndr`, the inner
/// `letrec` for `llet`, the target variable occurrence for
/// `cpn`/`cpt`/`cpd`/`lcv`/`ucp`, the binding for `ldel`, and the `letrec`
/// node for `ldelcyc1`/`ldelcyc2` (with the dropped binders in `group`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Redex {
    pub label: Label,
    pub pos: Position,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub group: Vec<Name>,
}

impl Redex {
    pub fn new(label: Label, pos: Position) -> Self {
        Redex { label, pos, group: Vec::new() }
    }

    /// Position deciding whether the step happens inside a reduction
    /// context: the node the rule's left-hand side matches, except that a
    /// `case` reaching its constructor through bindings is placed at the
    /// `case` itself.
    pub fn root(&self, e: &Expr) -> Result<Position, RuleError> {
        match self.label {
            Label::Llet | Label::Ldel => {
                Ok(self.pos.parent().ok_or_else(|| RuleError::shape(self.label.as_str(), "no parent"))?)
            }
            Label::Cpn | Label::Cpt | Label::Cpd | Label::Lcv | Label::Ucp => {
                let Expr::Var(x) = subterm(e, &self.pos)? else {
                    return Err(RuleError::shape(self.label.as_str(), "target is not a variable"));
                };
                binding_letrec(e, &self.pos, x)
                    .ok_or_else(|| RuleError::shape(self.label.as_str(), "variable not letrec-bound"))
            }
            _ => Ok(self.pos.clone()),
        }
    }
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @{}", self.label, self.pos)?;
        if !self.group.is_empty() {
            let g: Vec<String> = self.group.iter().map(|x| x.to_string()).collect();
            write!(f, " {{{}}}", g.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for l in Label::ALL {
            assert_eq!(l.as_str().parse::<Label>().unwrap(), l);
        }
        assert_eq!("cp".parse::<Rule>().unwrap(), Rule::Cp);
        assert!(Rule::Cp.admits(Label::Cpd));
        assert_eq!(Rule::Ldelcyc.labels(), vec![Label::Ldelcyc1, Label::Ldelcyc2]);
        assert!("foo".parse::<Label>().is_err());
    }
}
