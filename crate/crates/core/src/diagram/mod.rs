//! Commuting and forking diagrams: the rule language, the checker and the
//! proposal mode.

pub mod check;
pub mod dsl;
pub mod propose;

pub use check::{
    check_commuting, close_fork, find_forks, kind_of, red_instances, replay, verify_complete_set, verify_terms,
    BranchOutcome, CheckParams, CheckReport, ForkInstance, InstanceRecord, WitnessStep,
};
pub use dsl::{parse_diagram, parse_diagram_file, DiagramRule, DslError, Kind};
pub use propose::{propose_diagrams, Proposal};
