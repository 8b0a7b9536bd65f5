//! Shared domain vocabulary: agents, predicates, worlds, belief bases and
//! action plans, plus the two world-level evaluations every principle is
//! built from.
//!
//! Worlds are explicit finite assignments of unary ground atoms
//! (`predicate(agent)`) together with a physical-possibility flag. An
//! agent's belief base is the set of worlds that agent cannot rationally
//! rule out. Belief bases are single-level: beliefs about beliefs are not
//! modelled.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("scenario declares no agents")]
    NoAgents,
    #[error("scenario declares no worlds")]
    NoWorlds,
    #[error("duplicate agent `{0}`")]
    DuplicateAgent(String),
    #[error("duplicate predicate `{0}`")]
    DuplicatePredicate(String),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("world `{world}` does not assign atom `{atom}`")]
    MissingAtom { world: String, atom: String },
    #[error("atom `{0}` has more than one argument; only unary predicates are supported")]
    UnsupportedArity(String),
    #[error("malformed atom `{0}`, expected `predicate(agent)`")]
    MalformedAtom(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("predicate `{name}` is declared as {found} but used as {expected}")]
    KindMismatch {
        name: String,
        expected: PredicateKind,
        found: PredicateKind,
    },
    #[error("action plan has no reasons")]
    EmptyReasons,
    #[error("reason `{0}` appears more than once")]
    DuplicateReason(String),
    #[error("cannot remove `{0}`: a scenario needs at least one agent")]
    LastAgent(String),
    #[error("invalid scenario document: {0}")]
    Json(#[from] serde_json::Error),
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn identifier(s: impl Into<String>) -> Result<String, ModelError> {
    let s = s.into();
    if is_identifier(&s) {
        Ok(s)
    } else {
        Err(ModelError::InvalidIdentifier(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(id: impl Into<String>) -> Result<Self, ModelError> {
        identifier(id).map(AgentId)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WorldId(String);

impl WorldId {
    pub fn new(id: impl Into<String>) -> Self {
        WorldId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredicateKind {
    Reason,
    Action,
}

impl fmt::Display for PredicateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateKind::Reason => f.write_str("reason"),
            PredicateKind::Action => f.write_str("action"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateSymbol {
    pub name: String,
    pub kind: PredicateKind,
}

impl PredicateSymbol {
    pub fn new(name: impl Into<String>, kind: PredicateKind) -> Result<Self, ModelError> {
        Ok(PredicateSymbol {
            name: identifier(name)?,
            kind,
        })
    }
}

/// A unary ground atom, written `predicate(agent)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub agent: AgentId,
}

impl Atom {
    pub fn new(predicate: &str, agent: &AgentId) -> Self {
        Atom {
            predicate: predicate.to_string(),
            agent: agent.clone(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.agent)
    }
}

impl FromStr for Atom {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || ModelError::MalformedAtom(s.to_string());
        let trimmed = s.trim();
        let open = trimmed.find('(').ok_or_else(malformed)?;
        let inner = trimmed
            .strip_suffix(')')
            .ok_or_else(malformed)?
            .get(open + 1..)
            .ok_or_else(malformed)?;
        if inner.contains(',') {
            return Err(ModelError::UnsupportedArity(s.to_string()));
        }
        let predicate = trimmed[..open].trim();
        let agent = inner.trim();
        if !is_identifier(predicate) || !is_identifier(agent) {
            return Err(malformed());
        }
        Ok(Atom {
            predicate: predicate.to_string(),
            agent: AgentId(agent.to_string()),
        })
    }
}

impl Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    id: WorldId,
    physically_possible: bool,
    atoms: BTreeMap<Atom, bool>,
}

impl World {
    pub fn new(id: WorldId, physically_possible: bool, atoms: BTreeMap<Atom, bool>) -> Self {
        World {
            id,
            physically_possible,
            atoms,
        }
    }

    pub fn id(&self) -> &WorldId {
        &self.id
    }

    pub fn physically_possible(&self) -> bool {
        self.physically_possible
    }

    pub fn atoms(&self) -> &BTreeMap<Atom, bool> {
        &self.atoms
    }

    pub fn atom(&self, predicate: &str, agent: &AgentId) -> Result<bool, ModelError> {
        let key = Atom::new(predicate, agent);
        self.atoms
            .get(&key)
            .copied()
            .ok_or_else(|| ModelError::MissingAtom {
                world: self.id.to_string(),
                atom: key.to_string(),
            })
    }
}

/// An action plan `(C1(a) ∧ … ∧ Cn(a)) ⇒a A(a)`.
///
/// The justification arrow is structural: the plan records which reasons
/// the agent takes as justifying the action, it does not claim the reasons
/// entail it. Reason order is kept as written; evaluation treats reasons
/// as a set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionPlan {
    name: String,
    agent_var: String,
    reasons: Vec<String>,
    action: String,
}

impl ActionPlan {
    pub fn new(
        name: impl Into<String>,
        agent_var: impl Into<String>,
        reasons: Vec<String>,
        action: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let name = identifier(name)?;
        let agent_var = identifier(agent_var)?;
        let action = identifier(action)?;
        if reasons.is_empty() {
            return Err(ModelError::EmptyReasons);
        }
        let mut seen = BTreeSet::new();
        for reason in &reasons {
            identifier(reason.as_str())?;
            if !seen.insert(reason.as_str()) {
                return Err(ModelError::DuplicateReason(reason.clone()));
            }
        }
        Ok(ActionPlan {
            name,
            agent_var,
            reasons,
            action,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn agent_var(&self) -> &str {
        &self.agent_var
    }

    pub fn reasons(&self) -> &[String] {
        &self.reasons
    }

    pub fn action(&self) -> &str {
        &self.action
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VerdictStatus {
    Satisfies,
    Violates,
    Indeterminate,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VerdictStatus::Satisfies => "Satisfies",
            VerdictStatus::Violates => "Violates",
            VerdictStatus::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

/// Outcome of checking one principle for one plan.
///
/// Only the principle engine can construct verdicts; preference data can
/// change what an agent believes but never decides a verdict directly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrincipleVerdict {
    status: VerdictStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WorldId>,
    explanation: String,
}

impl PrincipleVerdict {
    pub(crate) fn satisfies(witness: Option<WorldId>, explanation: String) -> Self {
        PrincipleVerdict {
            status: VerdictStatus::Satisfies,
            witness,
            explanation,
        }
    }

    pub(crate) fn violates(explanation: String) -> Self {
        PrincipleVerdict {
            status: VerdictStatus::Violates,
            witness: None,
            explanation,
        }
    }

    pub(crate) fn indeterminate(explanation: String) -> Self {
        PrincipleVerdict {
            status: VerdictStatus::Indeterminate,
            witness: None,
            explanation,
        }
    }

    pub fn status(&self) -> VerdictStatus {
        self.status
    }

    pub fn witness(&self) -> Option<&WorldId> {
        self.witness.as_ref()
    }

    pub fn explanation(&self) -> &str {
        &self.explanation
    }
}

/// A finite world model.
///
/// Every world assigns every `predicate(agent)` atom; every agent has a
/// (possibly empty) belief base of world ids drawn from the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    agents: Vec<AgentId>,
    predicates: Vec<PredicateSymbol>,
    worlds: Vec<World>,
    beliefs: BTreeMap<AgentId, BTreeSet<WorldId>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    agents: Vec<String>,
    predicates: Vec<PredicateSymbol>,
    worlds: Vec<WorldDoc>,
    #[serde(default)]
    beliefs: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldDoc {
    id: String,
    physically_possible: bool,
    atoms: BTreeMap<Atom, bool>,
}

impl Scenario {
    pub fn new(
        agents: Vec<AgentId>,
        predicates: Vec<PredicateSymbol>,
        worlds: Vec<World>,
        beliefs: BTreeMap<AgentId, BTreeSet<WorldId>>,
    ) -> Result<Self, ModelError> {
        if agents.is_empty() {
            return Err(ModelError::NoAgents);
        }
        if worlds.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        let mut agent_set = BTreeSet::new();
        for agent in &agents {
            if !agent_set.insert(agent) {
                return Err(ModelError::DuplicateAgent(agent.to_string()));
            }
        }
        let mut predicate_set = BTreeSet::new();
        for p in &predicates {
            identifier(p.name.as_str())?;
            if !predicate_set.insert(p.name.as_str()) {
                return Err(ModelError::DuplicatePredicate(p.name.clone()));
            }
        }
        let mut world_set = BTreeSet::new();
        for world in &worlds {
            if !world_set.insert(&world.id) {
                return Err(ModelError::DuplicateWorld(world.id.to_string()));
            }
            for atom in world.atoms.keys() {
                if !predicate_set.contains(atom.predicate.as_str()) {
                    return Err(ModelError::UnknownPredicate(atom.predicate.clone()));
                }
                if !agent_set.contains(&atom.agent) {
                    return Err(ModelError::UnknownAgent(atom.agent.to_string()));
                }
            }
            // every declared key is known, so equal size means total
            if world.atoms.len() != predicates.len() * agents.len() {
                for p in &predicates {
                    for agent in &agents {
                        world.atom(&p.name, agent)?;
                    }
                }
            }
        }
        for (agent, believed) in &beliefs {
            if !agent_set.contains(agent) {
                return Err(ModelError::UnknownAgent(agent.to_string()));
            }
            if let Some(missing) = believed.iter().find(|w| !world_set.contains(w)) {
                return Err(ModelError::UnknownWorld(missing.to_string()));
            }
        }
        let mut beliefs = beliefs;
        for agent in &agents {
            beliefs.entry(agent.clone()).or_default();
        }
        Ok(Scenario {
            agents,
            predicates,
            worlds,
            beliefs,
        })
    }

    /// Loads a scenario from its JSON document form.
    pub fn from_json(src: &str) -> Result<Self, ModelError> {
        let doc: ScenarioDoc = serde_json::from_str(src)?;
        let agents = doc
            .agents
            .into_iter()
            .map(AgentId::new)
            .collect::<Result<Vec<_>, _>>()?;
        let worlds = doc
            .worlds
            .into_iter()
            .map(|w| World::new(WorldId::new(w.id), w.physically_possible, w.atoms))
            .collect();
        let beliefs = doc
            .beliefs
            .into_iter()
            .map(|(agent, ids)| {
                Ok((
                    AgentId::new(agent)?,
                    ids.into_iter().map(WorldId::new).collect(),
                ))
            })
            .collect::<Result<BTreeMap<_, _>, ModelError>>()?;
        Scenario::new(agents, doc.predicates, worlds, beliefs)
    }

    pub fn to_json(&self) -> String {
        let doc = ScenarioDoc {
            agents: self.agents.iter().map(|a| a.to_string()).collect(),
            predicates: self.predicates.clone(),
            worlds: self
                .worlds
                .iter()
                .map(|w| WorldDoc {
                    id: w.id.to_string(),
                    physically_possible: w.physically_possible,
                    atoms: w.atoms.clone(),
                })
                .collect(),
            beliefs: self
                .beliefs
                .iter()
                .map(|(a, ws)| (a.to_string(), ws.iter().map(|w| w.to_string()).collect()))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("scenario serializes")
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn predicates(&self) -> &[PredicateSymbol] {
        &self.predicates
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn world(&self, id: &WorldId) -> Option<&World> {
        self.worlds.iter().find(|w| &w.id == id)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateSymbol> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn has_agent(&self, agent: &AgentId) -> bool {
        self.agents.contains(agent)
    }

    pub fn agent(&self, id: &str) -> Result<&AgentId, ModelError> {
        self.agents
            .iter()
            .find(|a| a.as_str() == id)
            .ok_or_else(|| ModelError::UnknownAgent(id.to_string()))
    }

    pub fn beliefs(&self, agent: &AgentId) -> Result<&BTreeSet<WorldId>, ModelError> {
        self.beliefs
            .get(agent)
            .ok_or_else(|| ModelError::UnknownAgent(agent.to_string()))
    }

    /// Believed worlds of `agent`, in scenario declaration order.
    pub fn believed_worlds(&self, agent: &AgentId) -> Result<Vec<&World>, ModelError> {
        let believed = self.beliefs(agent)?;
        Ok(self
            .worlds
            .iter()
            .filter(|w| believed.contains(&w.id))
            .collect())
    }

    /// Checks that every reason of `plan` is a declared reason predicate and
    /// its action a declared action predicate.
    pub fn validate_plan(&self, plan: &ActionPlan) -> Result<(), ModelError> {
        let expect = |name: &str, expected: PredicateKind| -> Result<(), ModelError> {
            let p = self
                .predicate(name)
                .ok_or_else(|| ModelError::UnknownPredicate(name.to_string()))?;
            if p.kind != expected {
                return Err(ModelError::KindMismatch {
                    name: name.to_string(),
                    expected,
                    found: p.kind,
                });
            }
            Ok(())
        };
        for reason in plan.reasons() {
            expect(reason, PredicateKind::Reason)?;
        }
        expect(plan.action(), PredicateKind::Action)
    }

    fn check_binding(&self, plan: &ActionPlan, binding: &AgentId) -> Result<(), ModelError> {
        if !self.has_agent(binding) {
            return Err(ModelError::UnknownAgent(binding.to_string()));
        }
        self.validate_plan(plan)
    }

    /// The reasons and the action of `plan` all hold at `world` for `binding`.
    pub fn holds_at(
        &self,
        world: &World,
        plan: &ActionPlan,
        binding: &AgentId,
    ) -> Result<bool, ModelError> {
        self.check_binding(plan, binding)?;
        Ok(reasons_hold(world, plan, binding)? && world.atom(plan.action(), binding)?)
    }

    /// Every agent for whom all reasons hold at `world` also takes the action
    /// there (material implication, per agent).
    pub fn universally_adopted(&self, world: &World, plan: &ActionPlan) -> Result<bool, ModelError> {
        self.validate_plan(plan)?;
        for agent in &self.agents {
            if reasons_hold(world, plan, agent)? && !world.atom(plan.action(), agent)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Returns a copy with `agent`'s belief base replaced.
    pub fn with_beliefs(
        &self,
        agent: &AgentId,
        believed: BTreeSet<WorldId>,
    ) -> Result<Scenario, ModelError> {
        let mut beliefs = self.beliefs.clone();
        beliefs.insert(agent.clone(), believed);
        Scenario::new(
            self.agents.clone(),
            self.predicates.clone(),
            self.worlds.clone(),
            beliefs,
        )
    }

    /// Returns a copy with `world` appended, optionally added to the belief
    /// bases of `believers`.
    pub fn with_world(&self, world: World, believers: &[AgentId]) -> Result<Scenario, ModelError> {
        let mut worlds = self.worlds.clone();
        let mut beliefs = self.beliefs.clone();
        for agent in believers {
            beliefs
                .get_mut(agent)
                .ok_or_else(|| ModelError::UnknownAgent(agent.to_string()))?
                .insert(world.id.clone());
        }
        worlds.push(world);
        Scenario::new(self.agents.clone(), self.predicates.clone(), worlds, beliefs)
    }

    /// Returns a copy with `agent` and all of its atoms and beliefs removed.
    pub fn without_agent(&self, agent: &AgentId) -> Result<Scenario, ModelError> {
        if !self.has_agent(agent) {
            return Err(ModelError::UnknownAgent(agent.to_string()));
        }
        if self.agents.len() == 1 {
            return Err(ModelError::LastAgent(agent.to_string()));
        }
        let agents = self.agents.iter().filter(|a| *a != agent).cloned().collect();
        let worlds = self
            .worlds
            .iter()
            .map(|w| {
                let atoms = w
                    .atoms
                    .iter()
                    .filter(|(atom, _)| &atom.agent != agent)
                    .map(|(atom, v)| (atom.clone(), *v))
                    .collect();
                World::new(w.id.clone(), w.physically_possible, atoms)
            })
            .collect();
        let mut beliefs = self.beliefs.clone();
        beliefs.remove(agent);
        Scenario::new(agents, self.predicates.clone(), worlds, beliefs)
    }
}

fn reasons_hold(world: &World, plan: &ActionPlan, agent: &AgentId) -> Result<bool, ModelError> {
    for reason in plan.reasons() {
        if !world.atom(reason, agent)? {
            return Ok(false);
        }
    }
    Ok(true)
}
