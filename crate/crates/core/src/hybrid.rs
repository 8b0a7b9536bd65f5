//! Hybrid pipeline: a poll is turned into an empirical premise, the premise
//! narrows the actor's beliefs, and the anchored principles are evaluated
//! on the narrowed scenario.

use serde::Serialize;
use thiserror::Error;

use crate::mimesis::{apply_premise, estimate_premise, MimesisError, Poll, PremiseEstimate};
use crate::model::{ActionPlan, AgentId, Atom, WorldId};
use crate::principles::{evaluate_all, AutonomyContext, EngineError, EthicsReport, PrincipleSet};
use crate::utility::UtilityMatrix;

#[derive(Debug, Error)]
pub enum HybridError {
    #[error(transparent)]
    Mimesis(#[from] MimesisError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremiseSummary {
    pub proposition: Atom,
    pub yes: u64,
    pub no: u64,
    pub threshold: f64,
    pub estimate: PremiseEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefDelta {
    pub actor: AgentId,
    pub kept: Vec<WorldId>,
    pub removed: Vec<WorldId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridReport {
    pub premise: PremiseSummary,
    pub belief_delta: BeliefDelta,
    pub report: EthicsReport,
}

pub struct HybridInput<'a> {
    pub plans: &'a [ActionPlan],
    pub scenario: &'a crate::model::Scenario,
    pub actor: &'a AgentId,
    pub poll: &'a Poll,
    pub threshold: f64,
    pub autonomy: &'a AutonomyContext,
    pub utilities: Option<&'a UtilityMatrix>,
    pub principles: PrincipleSet,
}

pub fn run_hybrid(input: &HybridInput<'_>) -> Result<HybridReport, HybridError> {
    let estimate = estimate_premise(input.poll, input.threshold)?;
    let update = apply_premise(input.scenario, input.actor, estimate, &input.poll.proposition)?;
    let report = evaluate_all(
        input.plans,
        &update.scenario,
        input.actor,
        input.autonomy,
        input.utilities,
        input.principles,
    )?;
    Ok(HybridReport {
        premise: PremiseSummary {
            proposition: input.poll.proposition.clone(),
            yes: input.poll.yes,
            no: input.poll.no,
            threshold: input.threshold,
            estimate,
        },
        belief_delta: BeliefDelta {
            actor: input.actor.clone(),
            kept: update.kept,
            removed: update.removed,
            warning: update.warning,
        },
        report,
    })
}
