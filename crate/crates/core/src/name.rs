//! Variable and constructor names, plus a fresh-name supply.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// An identifier. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The name with any trailing `_<digits>` suffix removed.
    pub fn base(&self) -> &str {
        let s = self.as_str();
        match s.rfind('_') {
            Some(i) if i > 0 && i + 1 < s.len() && s[i + 1..].bytes().all(|b| b.is_ascii_digit()) => &s[..i],
            _ => s,
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl PartialEq<str> for Name {
    fn eq(&self, other: &str) -> bool {
        self.as_str() == other
    }
}

impl PartialEq<&str> for Name {
    fn eq(&self, other: &&str) -> bool {
        self.as_str() == *other
    }
}

/// Generates names that collide with nothing seen so far.
///
/// A supply is seeded with every name occurring in the term being rewritten,
/// so fresh names are deterministic for a given input term and no global
/// state is shared between workers.
#[derive(Debug, Clone, Default)]
pub struct FreshSupply {
    used: HashSet<Name>,
    next: usize,
}

impl FreshSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_used<I: IntoIterator<Item = Name>>(names: I) -> Self {
        let mut s = Self::new();
        s.used.extend(names);
        s
    }

    pub fn reserve(&mut self, name: &Name) {
        self.used.insert(name.clone());
    }

    pub fn is_used(&self, name: &Name) -> bool {
        self.used.contains(name)
    }

    /// A new name of the form `<base>_<n>`.
    pub fn fresh(&mut self, hint: &Name) -> Name {
        let base = hint.base();
        loop {
            self.next += 1;
            let candidate = Name::from(format!("{}_{}", base, self.next));
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_strips_numeric_suffix() {
        assert_eq!(Name::new("x_12").base(), "x");
        assert_eq!(Name::new("x_").base(), "x_");
        assert_eq!(Name::new("x1").base(), "x1");
        assert_eq!(Name::new("_3").base(), "_3");
    }

    #[test]
    fn fresh_avoids_used() {
        let mut s = FreshSupply::with_used([Name::new("x_1"), Name::new("x_2")]);
        let a = s.fresh(&Name::new("x"));
        let b = s.fresh(&Name::new("x_1"));
        assert_eq!(a.as_str(), "x_3");
        assert_eq!(b.as_str(), "x_4");
    }
}
