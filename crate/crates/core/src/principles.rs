//! The three anchored principles and their composition.
//!
//! * Generalization: the actor must be able to rationally believe it
//!   physically possible that the plan's reasons and action hold for the
//!   actor while every agent to whom the reasons apply takes the action.
//!   The nested "can rationally believe it physically possible" modality is
//!   evaluated as one search over the actor's belief base restricted to
//!   physically possible worlds.
//! * Autonomy: a plan must not interfere with another agent's ethical plan
//!   without informed or implied consent. Interference and consent are
//!   input data; non-ethical plans of others are not protected.
//! * Utilitarian: among plans satisfying generalization and autonomy, a plan
//!   must reach the highest total utility (within an absolute tolerance).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ActionPlan, AgentId, ModelError, PrincipleVerdict, Scenario, VerdictStatus};
use crate::utility::{UtilityError, UtilityMatrix};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error("plan `{0}` is not declared in the autonomy context")]
    UndeclaredPlan(String),
    #[error("plan `{0}` is not in the admissible set")]
    NotAdmissible(String),
    #[error("plan `{0}` appears more than once in the plan set")]
    DuplicatePlan(String),
    #[error("unknown principle `{0}`; expected gen, auto, util or all")]
    UnknownPrinciple(String),
    #[error("invalid autonomy document: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Consent {
    Informed,
    Implied,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interference {
    pub actor_plan: String,
    pub affected_agent: AgentId,
    pub affected_plan: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConsentEntry {
    agent: AgentId,
    plan: String,
    consent: Consent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutonomyDoc {
    ethical_flags: BTreeMap<String, bool>,
    #[serde(default)]
    interferences: Vec<Interference>,
    #[serde(default)]
    consent: Vec<ConsentEntry>,
}

/// Who interferes with whom, who consented, and which affected plans are
/// themselves ethical. The declared plans are the keys of `ethical_flags`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutonomyContext {
    interferences: Vec<Interference>,
    consent: BTreeMap<(AgentId, String), Consent>,
    ethical_flags: BTreeMap<String, bool>,
}

impl AutonomyContext {
    pub fn new(
        interferences: Vec<Interference>,
        consent: BTreeMap<(AgentId, String), Consent>,
        ethical_flags: BTreeMap<String, bool>,
    ) -> Result<Self, EngineError> {
        let declared = |plan: &str| -> Result<(), EngineError> {
            if ethical_flags.contains_key(plan) {
                Ok(())
            } else {
                Err(EngineError::UndeclaredPlan(plan.to_string()))
            }
        };
        for i in &interferences {
            declared(&i.actor_plan)?;
            declared(&i.affected_plan)?;
        }
        for (_, plan) in consent.keys() {
            declared(plan)?;
        }
        Ok(AutonomyContext {
            interferences,
            consent,
            ethical_flags,
        })
    }

    /// A context with no interference that declares `plans` as ethical.
    pub fn unconstrained<'a>(plans: impl IntoIterator<Item = &'a str>) -> Self {
        AutonomyContext {
            interferences: Vec::new(),
            consent: BTreeMap::new(),
            ethical_flags: plans.into_iter().map(|p| (p.to_string(), true)).collect(),
        }
    }

    pub fn from_json(src: &str) -> Result<Self, EngineError> {
        let doc: AutonomyDoc = serde_json::from_str(src)?;
        let consent = doc
            .consent
            .into_iter()
            .map(|c| ((c.agent, c.plan), c.consent))
            .collect();
        AutonomyContext::new(doc.interferences, consent, doc.ethical_flags)
    }

    pub fn to_json(&self) -> String {
        let doc = AutonomyDoc {
            ethical_flags: self.ethical_flags.clone(),
            interferences: self.interferences.clone(),
            consent: self
                .consent
                .iter()
                .map(|((agent, plan), consent)| ConsentEntry {
                    agent: agent.clone(),
                    plan: plan.clone(),
                    consent: *consent,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("autonomy context serializes")
    }

    pub fn interferences(&self) -> &[Interference] {
        &self.interferences
    }

    pub fn is_declared(&self, plan: &str) -> bool {
        self.ethical_flags.contains_key(plan)
    }

    pub fn consent(&self, agent: &AgentId, actor_plan: &str) -> Consent {
        self.consent
            .get(&(agent.clone(), actor_plan.to_string()))
            .copied()
            .unwrap_or(Consent::None)
    }

    pub fn with_consent(&self, agent: &AgentId, actor_plan: &str, consent: Consent) -> Self {
        let mut next = self.clone();
        next.consent
            .insert((agent.clone(), actor_plan.to_string()), consent);
        next
    }

    /// Adds `plans` that are not yet declared, flagged as ethical.
    pub fn declare_missing<'a>(&self, plans: impl IntoIterator<Item = &'a str>) -> Self {
        let mut next = self.clone();
        for plan in plans {
            next.ethical_flags.entry(plan.to_string()).or_insert(true);
        }
        next
    }

    /// Checks every affected agent against the scenario.
    pub fn validate_agents(&self, scenario: &Scenario) -> Result<(), EngineError> {
        let agents = self
            .interferences
            .iter()
            .map(|i| &i.affected_agent)
            .chain(self.consent.keys().map(|(a, _)| a));
        for agent in agents {
            if !scenario.has_agent(agent) {
                return Err(ModelError::UnknownAgent(agent.to_string()).into());
            }
        }
        Ok(())
    }
}

pub fn check_generalization(
    plan: &ActionPlan,
    scenario: &Scenario,
    actor: &AgentId,
) -> Result<PrincipleVerdict, EngineError> {
    scenario.validate_plan(plan)?;
    let believed = scenario.believed_worlds(actor)?;
    if believed.is_empty() {
        return Ok(PrincipleVerdict::indeterminate(format!(
            "`{actor}` has an empty belief base; no world can be examined"
        )));
    }
    for world in &believed {
        if world.physically_possible()
            && scenario.holds_at(world, plan, actor)?
            && scenario.universally_adopted(world, plan)?
        {
            return Ok(PrincipleVerdict::satisfies(
                Some(world.id().clone()),
                format!(
                    "in believed world `{}` the reasons and action hold for `{actor}` and every agent meeting the reasons takes the action",
                    world.id()
                ),
            ));
        }
    }
    Ok(PrincipleVerdict::violates(format!(
        "none of the {} world(s) `{actor}` believes possible is physically possible with the reasons and action holding for `{actor}` under universal adoption",
        believed.len()
    )))
}

pub fn check_autonomy(plan_id: &str, ctx: &AutonomyContext) -> Result<PrincipleVerdict, EngineError> {
    if !ctx.is_declared(plan_id) {
        return Err(EngineError::UndeclaredPlan(plan_id.to_string()));
    }
    let violations: Vec<String> = ctx
        .interferences
        .iter()
        .filter(|i| i.actor_plan == plan_id)
        .filter(|i| ctx.ethical_flags[&i.affected_plan])
        .filter(|i| ctx.consent(&i.affected_agent, plan_id) == Consent::None)
        .map(|i| format!("`{}` of `{}`", i.affected_plan, i.affected_agent))
        .collect();
    if violations.is_empty() {
        Ok(PrincipleVerdict::satisfies(
            None,
            "every interference with an ethical plan has informed or implied consent".to_string(),
        ))
    } else {
        Ok(PrincipleVerdict::violates(format!(
            "interferes without consent with ethical plan(s) {}",
            violations.join(", ")
        )))
    }
}

pub fn check_utilitarian(
    plan_id: &str,
    admissible: &[String],
    util: &UtilityMatrix,
) -> Result<PrincipleVerdict, EngineError> {
    if !admissible.iter().any(|p| p == plan_id) {
        return Err(EngineError::NotAdmissible(plan_id.to_string()));
    }
    let total = util.total(plan_id)?;
    let mut best: Option<(&str, f64)> = None;
    for p in admissible {
        let t = util.total(p)?;
        if best.map_or(true, |(_, b)| t > b) {
            best = Some((p, t));
        }
    }
    let (best_plan, best_total) = best.expect("admissible set contains plan_id");
    if total >= best_total - util.tolerance() {
        Ok(PrincipleVerdict::satisfies(
            None,
            format!(
                "total utility {total} is maximal among {} admissible plan(s)",
                admissible.len()
            ),
        ))
    } else {
        Ok(PrincipleVerdict::violates(format!(
            "total utility {total} is below `{best_plan}` with {best_total}"
        )))
    }
}

/// Which principles an evaluation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrincipleSet {
    pub generalization: bool,
    pub autonomy: bool,
    pub utilitarian: bool,
}

impl PrincipleSet {
    pub const ALL: PrincipleSet = PrincipleSet {
        generalization: true,
        autonomy: true,
        utilitarian: true,
    };

    pub fn only(name: &str) -> Result<Self, EngineError> {
        let none = PrincipleSet {
            generalization: false,
            autonomy: false,
            utilitarian: false,
        };
        match name {
            "gen" => Ok(PrincipleSet {
                generalization: true,
                ..none
            }),
            "auto" => Ok(PrincipleSet {
                autonomy: true,
                ..none
            }),
            "util" => Ok(PrincipleSet {
                utilitarian: true,
                ..none
            }),
            "all" => Ok(PrincipleSet::ALL),
            other => Err(EngineError::UnknownPrinciple(other.to_string())),
        }
    }
}

impl Default for PrincipleSet {
    fn default() -> Self {
        PrincipleSet::ALL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Overall {
    Ethical,
    Unethical,
    Indeterminate,
}

impl fmt::Display for Overall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Overall::Ethical => "Ethical",
            Overall::Unethical => "Unethical",
            Overall::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanReport {
    pub plan: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generalization: Option<PrincipleVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub autonomy: Option<PrincipleVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utilitarian: Option<PrincipleVerdict>,
    pub overall: Overall,
}

impl PlanReport {
    pub fn verdicts(&self) -> impl Iterator<Item = (&'static str, &PrincipleVerdict)> {
        [
            ("generalization", self.generalization.as_ref()),
            ("autonomy", self.autonomy.as_ref()),
            ("utilitarian", self.utilitarian.as_ref()),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.map(|v| (name, v)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EthicsReport {
    pub actor: AgentId,
    pub plans: Vec<PlanReport>,
}

impl EthicsReport {
    pub fn all_ethical(&self) -> bool {
        self.plans.iter().all(|p| p.overall == Overall::Ethical)
    }

    pub fn plan(&self, name: &str) -> Option<&PlanReport> {
        self.plans.iter().find(|p| p.plan == name)
    }
}

fn overall(verdicts: &[&PrincipleVerdict]) -> Overall {
    if verdicts.iter().any(|v| v.status() == VerdictStatus::Violates) {
        Overall::Unethical
    } else if verdicts.iter().all(|v| v.status() == VerdictStatus::Satisfies) {
        Overall::Ethical
    } else {
        Overall::Indeterminate
    }
}

/// Runs the selected principles over `plans`, all attributed to `actor`.
///
/// Generalization and autonomy decide admissibility; the utilitarian check
/// then compares each admissible plan against the admissible set. A plan
/// that is not admissible gets an Indeterminate utilitarian verdict. When
/// no utility matrix is supplied, a sole admissible plan satisfies the
/// utilitarian check trivially and anything else is Indeterminate.
pub fn evaluate_all(
    plans: &[ActionPlan],
    scenario: &Scenario,
    actor: &AgentId,
    ctx: &AutonomyContext,
    util: Option<&UtilityMatrix>,
    principles: PrincipleSet,
) -> Result<EthicsReport, EngineError> {
    let mut names = BTreeSet::new();
    for plan in plans {
        if !names.insert(plan.name()) {
            return Err(EngineError::DuplicatePlan(plan.name().to_string()));
        }
    }
    if !scenario.has_agent(actor) {
        return Err(ModelError::UnknownAgent(actor.to_string()).into());
    }
    if principles.autonomy {
        ctx.validate_agents(scenario)?;
    }

    let mut partial = Vec::with_capacity(plans.len());
    for plan in plans {
        let generalization = if principles.generalization {
            Some(check_generalization(plan, scenario, actor)?)
        } else {
            None
        };
        let autonomy = if principles.autonomy {
            Some(check_autonomy(plan.name(), ctx)?)
        } else {
            None
        };
        partial.push((plan.name(), generalization, autonomy));
    }

    let admissible: Vec<String> = partial
        .iter()
        .filter(|(_, g, a)| {
            [g, a]
                .iter()
                .all(|v| v.as_ref().map_or(true, |v| v.status() == VerdictStatus::Satisfies))
        })
        .map(|(name, _, _)| name.to_string())
        .collect();

    let mut reports = Vec::with_capacity(plans.len());
    for (name, generalization, autonomy) in partial {
        let utilitarian = if !principles.utilitarian {
            None
        } else if !admissible.iter().any(|p| p == name) {
            Some(PrincipleVerdict::indeterminate(
                "not admissible: the utilitarian comparison covers only plans satisfying generalization and autonomy".to_string(),
            ))
        } else if let Some(util) = util {
            Some(check_utilitarian(name, &admissible, util)?)
        } else if admissible.len() == 1 {
            Some(PrincipleVerdict::satisfies(
                None,
                "sole admissible plan; no alternative to compare".to_string(),
            ))
        } else {
            Some(PrincipleVerdict::indeterminate(
                "no utility data to compare admissible plans".to_string(),
            ))
        };
        let verdicts: Vec<&PrincipleVerdict> = [&generalization, &autonomy, &utilitarian]
            .into_iter()
            .flatten()
            .collect();
        let overall = overall(&verdicts);
        reports.push(PlanReport {
            plan: name.to_string(),
            generalization,
            autonomy,
            utilitarian,
            overall,
        });
    }
    Ok(EthicsReport {
        actor: actor.clone(),
        plans: reports,
    })
}
