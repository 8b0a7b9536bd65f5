//! Random instance generators and brute-force oracles shared by the
//! integration tests. Oracles work on the raw generated data, never on the
//! library's evaluation paths.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use valign::mimesis::{Ballot, PreferenceProfile};
use valign::{
    ActionPlan, AgentId, Atom, PredicateKind, PredicateSymbol, Scenario, UtilityMatrix, World,
    WorldId,
};

pub fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

pub fn read_data(rel: &str) -> String {
    std::fs::read_to_string(data(rel)).unwrap()
}

// ---------------------------------------------------------------- scenarios

#[derive(Debug, Clone)]
pub struct RawWorld {
    pub possible: bool,
    /// `reasons[r][x]`: reason predicate `r` holds for agent `x`.
    pub reasons: Vec<Vec<bool>>,
    pub action: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct RawScenario {
    pub agents: usize,
    pub reason_predicates: usize,
    pub worlds: Vec<RawWorld>,
    /// `believed[x][w]`
    pub believed: Vec<Vec<bool>>,
    pub actor: usize,
    /// Indices into the reason predicates, in plan order.
    pub plan_reasons: Vec<usize>,
}

fn random_world<R: Rng>(rng: &mut R, agents: usize, reasons: usize) -> RawWorld {
    let p = rng.gen_range(0.5..0.95);
    RawWorld {
        possible: rng.gen_bool(0.75),
        reasons: (0..reasons)
            .map(|_| (0..agents).map(|_| rng.gen_bool(p)).collect())
            .collect(),
        action: (0..agents).map(|_| rng.gen_bool(p)).collect(),
    }
}

impl RawScenario {
    /// At most 3 agents, 8 worlds and 3 reasons.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let agents = rng.gen_range(1..=3);
        let reason_predicates = rng.gen_range(1..=3);
        let n_worlds = rng.gen_range(1..=8);
        let worlds = (0..n_worlds)
            .map(|_| random_world(rng, agents, reason_predicates))
            .collect();
        let believed = (0..agents)
            .map(|_| (0..n_worlds).map(|_| rng.gen_bool(0.7)).collect())
            .collect();
        let mut plan_reasons: Vec<usize> = (0..reason_predicates).collect();
        plan_reasons.shuffle(rng);
        plan_reasons.truncate(rng.gen_range(1..=reason_predicates));
        RawScenario {
            agents,
            reason_predicates,
            worlds,
            believed,
            actor: rng.gen_range(0..agents),
            plan_reasons,
        }
    }

    pub fn random_world<R: Rng>(&self, rng: &mut R) -> RawWorld {
        random_world(rng, self.agents, self.reason_predicates)
    }

    /// Adds a world believed by the actor.
    pub fn with_believed_world(&self, world: RawWorld) -> Self {
        let mut next = self.clone();
        next.worlds.push(world);
        for (x, row) in next.believed.iter_mut().enumerate() {
            row.push(x == self.actor);
        }
        next
    }

    pub fn agent(x: usize) -> AgentId {
        AgentId::new(format!("ag{x}")).unwrap()
    }

    pub fn world_id(w: usize) -> WorldId {
        WorldId::new(format!("w{w}"))
    }

    pub fn actor_id(&self) -> AgentId {
        Self::agent(self.actor)
    }

    pub fn build(&self) -> Scenario {
        let agents: Vec<AgentId> = (0..self.agents).map(Self::agent).collect();
        let mut predicates: Vec<PredicateSymbol> = (0..self.reason_predicates)
            .map(|r| PredicateSymbol::new(format!("r{r}"), PredicateKind::Reason).unwrap())
            .collect();
        predicates.push(PredicateSymbol::new("act", PredicateKind::Action).unwrap());
        let worlds = self
            .worlds
            .iter()
            .enumerate()
            .map(|(w, raw)| {
                let mut atoms = BTreeMap::new();
                for (x, agent) in agents.iter().enumerate() {
                    for r in 0..self.reason_predicates {
                        atoms.insert(Atom::new(&format!("r{r}"), agent), raw.reasons[r][x]);
                    }
                    atoms.insert(Atom::new("act", agent), raw.action[x]);
                }
                World::new(Self::world_id(w), raw.possible, atoms)
            })
            .collect();
        let beliefs = agents
            .iter()
            .enumerate()
            .map(|(x, agent)| {
                let set: BTreeSet<WorldId> = (0..self.worlds.len())
                    .filter(|&w| self.believed[x][w])
                    .map(Self::world_id)
                    .collect();
                (agent.clone(), set)
            })
            .collect();
        Scenario::new(agents, predicates, worlds, beliefs).unwrap()
    }

    pub fn plan(&self) -> ActionPlan {
        ActionPlan::new(
            "p",
            "x",
            self.plan_reasons.iter().map(|r| format!("r{r}")).collect(),
            "act",
        )
        .unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenOutcome {
    Satisfies(usize),
    Violates,
    Indeterminate,
}

/// Exhaustive scan of the actor's believed worlds for one where the plan's
/// reasons and action hold for the actor and every agent meeting the
/// reasons acts. Returns the first such world in declaration order.
pub fn generalization_oracle(raw: &RawScenario) -> GenOutcome {
    let actor = raw.actor;
    let believed: Vec<usize> = (0..raw.worlds.len())
        .filter(|&w| raw.believed[actor][w])
        .collect();
    if believed.is_empty() {
        return GenOutcome::Indeterminate;
    }
    for &w in &believed {
        let world = &raw.worlds[w];
        let reasons_for = |x: usize| raw.plan_reasons.iter().all(|&r| world.reasons[r][x]);
        let conjunction = reasons_for(actor) && world.action[actor];
        let mut universal = true;
        for x in 0..raw.agents {
            if reasons_for(x) && !world.action[x] {
                universal = false;
            }
        }
        if world.possible && conjunction && universal {
            return GenOutcome::Satisfies(w);
        }
    }
    GenOutcome::Violates
}

// -------------------------------------------------------------- preferences

pub fn random_profile<R: Rng>(rng: &mut R, max_candidates: usize, max_ballots: usize) -> PreferenceProfile {
    let k = rng.gen_range(1..=max_candidates);
    let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
    let ballots = (0..rng.gen_range(1..=max_ballots))
        .map(|_| {
            let mut ranking = names.clone();
            ranking.shuffle(rng);
            Ballot {
                ranking,
                count: rng.gen_range(1..=50),
            }
        })
        .collect();
    PreferenceProfile::new(names, ballots).unwrap()
}

/// Borda score as a count of pairwise wins: each ballot gives a candidate
/// one point (times its count) for every candidate ranked below it.
pub fn borda_oracle(profile: &PreferenceProfile) -> Vec<(String, u64)> {
    profile
        .candidates()
        .iter()
        .map(|c| {
            let mut score = 0;
            for ballot in profile.ballots() {
                let pos = |name: &String| ballot.ranking.iter().position(|r| r == name).unwrap();
                let beaten = profile
                    .candidates()
                    .iter()
                    .filter(|d| pos(d) > pos(c))
                    .count() as u64;
                score += beaten * ballot.count;
            }
            (c.clone(), score)
        })
        .collect()
}

// ------------------------------------------------------------------ welfare

pub fn random_matrix<R: Rng>(rng: &mut R, max_plans: usize, max_agents: usize) -> Vec<Vec<f64>> {
    let plans = rng.gen_range(1..=max_plans);
    let agents = rng.gen_range(1..=max_agents);
    (0..plans)
        .map(|_| (0..agents).map(|_| rng.gen_range(-4..=4) as f64).collect())
        .collect()
}

pub fn matrix(rows: &[Vec<f64>]) -> (Vec<String>, UtilityMatrix) {
    let plans: Vec<String> = (0..rows.len()).map(|i| format!("plan{i}")).collect();
    let agents = (0..rows[0].len())
        .map(|j| AgentId::new(format!("ag{j}")).unwrap())
        .collect();
    let m = UtilityMatrix::new(plans.clone(), agents, rows.to_vec()).unwrap();
    (plans, m)
}

/// Sorts all plans by (highest minimum, highest total, earliest index) and
/// takes the first. Exact comparisons; callers use integer-valued data.
pub fn maximin_lex_oracle(rows: &[Vec<f64>]) -> usize {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let min = |i: usize| rows[i].iter().cloned().fold(f64::INFINITY, f64::min);
    let total = |i: usize| rows[i].iter().sum::<f64>();
    order.sort_by(|&a, &b| {
        min(b)
            .partial_cmp(&min(a))
            .unwrap()
            .then(total(b).partial_cmp(&total(a)).unwrap())
            .then(a.cmp(&b))
    });
    order[0]
}

pub fn utility_only_oracle(rows: &[Vec<f64>]) -> usize {
    let total = |i: usize| rows[i].iter().sum::<f64>();
    let mut best = 0;
    for i in 1..rows.len() {
        if total(i) > total(best) {
            best = i;
        }
    }
    best
}

// ------------------------------------------------------------------ plans

pub fn random_identifier<R: Rng>(rng: &mut R) -> String {
    const HEAD: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    const TAIL: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789";
    let len = rng.gen_range(0..10);
    let mut s = String::new();
    s.push(HEAD[rng.gen_range(0..HEAD.len())] as char);
    for _ in 0..len {
        s.push(TAIL[rng.gen_range(0..TAIL.len())] as char);
    }
    s
}

pub fn random_plan<R: Rng>(rng: &mut R) -> ActionPlan {
    let n = rng.gen_range(1..=4);
    let mut reasons: Vec<String> = Vec::new();
    while reasons.len() < n {
        let r = random_identifier(rng);
        if !reasons.contains(&r) {
            reasons.push(r);
        }
    }
    ActionPlan::new(
        random_identifier(rng),
        random_identifier(rng),
        reasons,
        random_identifier(rng),
    )
    .unwrap()
}

// ----------------------------------------------------------------- fallacy

/// Expected verdict name from the schema, evaluated directly:
/// fallacy iff ¬(¬Np → (¬Nc ∨ ¬Gc)); groundless iff Nc ∧ ¬Gc.
pub fn fallacy_oracle(premises: &[bool], nc: bool, gc: bool) -> &'static str {
    let np = premises.iter().any(|&n| n);
    let schema_holds = np || !nc || !gc;
    if !schema_holds {
        "FallacyDetected"
    } else if nc && !gc {
        "GroundlessNormativeElement"
    } else {
        "NoFallacy"
    }
}
