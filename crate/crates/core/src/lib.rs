//! Dialog specification engine: expressions, staging, reduction, enumeration and mining.
//!
//! `no_std` with `alloc`. File IO, the CLI and the HTTP service live in the companion crate.

#![no_std]

extern crate alloc;

pub mod engine;
pub mod episodes;
pub mod experiment;
pub mod expr;
pub mod generate;
pub mod miner;
pub mod simplify;
pub mod stage;
pub mod syntax;
pub mod utterance;
pub mod validate;

pub use engine::{
    candidates, is_complete, is_complete_with, is_prefix, membership, membership_with, reduce_one, stage_response,
    Completion, DialogContext, Frontier, ReductionState,
};
pub use episodes::{enumerate, enumerate_capped, equivalent, equivalent_capped, EnumError, EnumeratedSpec, Equivalence};
pub use expr::{atom, node, union, union_all, Dialog, Mnemonic, Name, Path};
pub use simplify::{canonical, canonicalize, simplify_step, RewriteRule, RewriteStep, RewriteTrace};
pub use stage::{run_episode, stage, Rejection, StagingOutcome};
pub use syntax::{parse_episode, parse_expr, parse_spec_file, parse_utterance, print_expr, ParseError, SyntaxError};
pub use utterance::{Episode, Utterance};
pub use validate::{validate, RuleId, ValidationReport, Violation};
