//! A workbench for a non-deterministic call-by-need lambda calculus with
//! `letrec`, `case`, constructors and erratic `choice`.

pub mod alpha;
pub mod context;
pub mod diagram;
pub mod enumerate;
pub mod equiv;
pub mod name;
pub mod parse;
pub mod position;
pub mod pretty;
pub mod redex;
pub mod rules;
pub mod signature;
pub mod standard;
pub mod step;
pub mod syntax;
pub mod transform;

pub use alpha::{alpha_eq, canonical};
pub use enumerate::{count_terms, enumerate_terms, EnumParams, Features};
pub use name::Name;
pub use parse::{parse, ParseError};
pub use position::{Position, Step};
pub use pretty::pretty;
pub use redex::{Label, Redex, Rule, RuleError};
pub use signature::Signature;
pub use standard::{converges_set, select, standard_redex, standard_reduce, EvalResult, NdPolicy, StuckClass};
pub use step::{apply, find_redexes, StepClass};
pub use syntax::{freshen, rename_apart, Alt, Binding, Constructor, Expr};
