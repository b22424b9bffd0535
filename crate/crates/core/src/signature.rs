//! Data type declarations: type names, their constructors and arities.
//!
//! File format, one declaration per line:
//!
//! ```text
//! type Bool = True/0 | False/0
//! type List = Nil/0 | Cons/2
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::name::Name;
use crate::syntax::Constructor;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDecl {
    pub name: Name,
    pub constructors: Vec<Constructor>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("constructor `{0}` declared more than once")]
    DuplicateConstructor(Name),
    #[error("type `{0}` declared more than once")]
    DuplicateType(Name),
    #[error("type `{0}` has no constructors")]
    EmptyType(Name),
}

/// A set of data types. Constructor names are globally unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    types: Vec<TypeDecl>,
    by_con: HashMap<Name, (usize, usize)>,
    by_type: HashMap<Name, usize>,
}

impl Signature {
    pub fn new(types: Vec<TypeDecl>) -> Result<Self, SignatureError> {
        let mut by_con = HashMap::new();
        let mut by_type = HashMap::new();
        for (ti, t) in types.iter().enumerate() {
            if t.constructors.is_empty() {
                return Err(SignatureError::EmptyType(t.name.clone()));
            }
            if by_type.insert(t.name.clone(), ti).is_some() {
                return Err(SignatureError::DuplicateType(t.name.clone()));
            }
            for (ci, c) in t.constructors.iter().enumerate() {
                if by_con.insert(c.name.clone(), (ti, ci)).is_some() {
                    return Err(SignatureError::DuplicateConstructor(c.name.clone()));
                }
            }
        }
        Ok(Signature { types, by_con, by_type })
    }

    /// `Bool` and `List`, the signature used throughout the test suites.
    pub fn bool_list() -> Self {
        Self::parse("type Bool = True/0 | False/0\ntype List = Nil/0 | Cons/2\n").expect("builtin signature")
    }

    pub fn bool_only() -> Self {
        Self::parse("type Bool = True/0 | False/0\n").expect("builtin signature")
    }

    pub fn parse(text: &str) -> Result<Self, SignatureError> {
        let mut types = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| SignatureError::Syntax { line: line_no, msg: msg.to_string() };
            let rest = line.strip_prefix("type").ok_or_else(|| err("expected `type`"))?;
            let (name, cons) = rest.split_once('=').ok_or_else(|| err("expected `=`"))?;
            let name = name.trim();
            if !is_upper_ident(name) {
                return Err(err("type name must be an uppercase identifier"));
            }
            let mut constructors = Vec::new();
            for part in cons.split('|') {
                let part = part.trim();
                let (c, ar) = part.split_once('/').ok_or_else(|| err("constructor must be written `Name/arity`"))?;
                let c = c.trim();
                if !is_upper_ident(c) {
                    return Err(err("constructor name must be an uppercase identifier"));
                }
                let arity: usize = ar.trim().parse().map_err(|_| err("arity must be a natural number"))?;
                constructors.push(Constructor::new(c, arity));
            }
            types.push(TypeDecl { name: Name::new(name), constructors });
        }
        Signature::new(types)
    }

    pub fn types(&self) -> &[TypeDecl] {
        &self.types
    }

    pub fn type_decl(&self, name: &Name) -> Option<&TypeDecl> {
        self.by_type.get(name).map(|&i| &self.types[i])
    }

    pub fn constructor(&self, name: &Name) -> Option<&Constructor> {
        self.by_con.get(name).map(|&(t, c)| &self.types[t].constructors[c])
    }

    /// The type a constructor belongs to.
    pub fn type_of(&self, con: &Name) -> Option<&TypeDecl> {
        self.by_con.get(con).map(|&(t, _)| &self.types[t])
    }

    pub fn constructors(&self) -> impl Iterator<Item = &Constructor> {
        self.types.iter().flat_map(|t| t.constructors.iter())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.types {
            let cons: Vec<String> = t.constructors.iter().map(|c| format!("{}/{}", c.name, c.arity)).collect();
            out.push_str(&format!("type {} = {}\n", t.name, cons.join(" | ")));
        }
        out
    }
}

pub(crate) fn is_upper_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bool_list() {
        let sig = Signature::bool_list();
        assert_eq!(sig.types().len(), 2);
        assert_eq!(sig.constructor(&Name::new("Cons")).unwrap().arity, 2);
        assert_eq!(sig.type_of(&Name::new("Nil")).unwrap().name, "List");
        assert_eq!(Signature::parse(&sig.to_text()).unwrap(), sig);
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert_eq!(
            Signature::parse("type A = X/0\ntype B = X/1"),
            Err(SignatureError::DuplicateConstructor(Name::new("X")))
        );
        assert!(matches!(Signature::parse("type A = X/-1"), Err(SignatureError::Syntax { line: 1, .. })));
        assert!(matches!(Signature::parse("data A = X/0"), Err(SignatureError::Syntax { .. })));
    }
}
