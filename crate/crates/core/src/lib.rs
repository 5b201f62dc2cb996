//! Exact expected-recourse evaluation and MILP emission for two-stage
//! network problems whose decisions shift edge survival probabilities.
//!
//! The pipeline: a [`NetworkInstance`] is enumerated into a
//! [`CriticalLadder`] of recourse values and their minimal survivable
//! scenarios, each level is compiled into a reduced ordered [`Bdd`], and
//! the diagrams yield exact probabilities ([`probability`]), an exact
//! mixed-integer model ([`mip`], [`lp`]) and a reference optimizer
//! ([`optimize`]). [`oracle`] recomputes everything by brute force.

pub mod bdd;
pub mod bench;
pub mod cli;

pub mod error;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod lp;
pub mod mip;
pub mod optimize;
pub mod oracle;
pub mod order;
pub mod pipeline;
pub mod probability;
pub mod recourse;
pub mod scenario;

pub use bdd::{compile_monotone, Bdd, BddStats, NodeRef, DEFAULT_NODE_CAP};
pub use error::{Error, Result};
pub use instance::{parse_instance, serialize_instance, Decision, Mode, NetworkInstance};
pub use mip::{emit_mip, MipModel};
pub use optimize::{solve_by_enumeration, Solution};
pub use oracle::{oracle_best_decision, oracle_expected, OracleResult};
pub use order::OrderingHeuristic;
pub use pipeline::{compile_ladder, evaluate, CompiledLadder, OrderScope};
pub use probability::ProbabilityReport;
pub use recourse::{enumerate_ladder, load_ladder, write_ladder, CriticalLadder, EnumerationLimits, Sense};
pub use scenario::Scenario;
