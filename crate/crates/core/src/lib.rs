//! Anchored value alignment over finite world models.
//!
//! Action plans are checked against the generalization, autonomy and
//! utilitarian principles; arguments are linted for drawing normative
//! conclusions from descriptive premises alone; and poll or ballot data
//! is used only as evidence about the world, never as a verdict.

#![forbid(unsafe_code)]

pub mod cli;
pub mod dsl;
pub mod fallacy;
pub mod hybrid;
pub mod mimesis;
pub mod model;
pub mod principles;
pub mod utility;
pub mod welfare;

pub use dsl::{parse_plan, parse_plans, print_plan, ParseError};
pub use fallacy::{lint_argument, Argument, LintVerdict, Statement};
pub use model::{
    ActionPlan, AgentId, Atom, ModelError, PredicateKind, PredicateSymbol, PrincipleVerdict,
    Scenario, VerdictStatus, World, WorldId,
};
pub use principles::{
    check_autonomy, check_generalization, check_utilitarian, evaluate_all, AutonomyContext,
    EthicsReport, Overall, PrincipleSet,
};
pub use utility::UtilityMatrix;
pub use welfare::{select_plan, SelectionRule};
