//! The mimetic side of hybrid alignment: ballots, polls, and the
//! conversion of poll results into empirical premises.
//!
//! Nothing here produces a principle verdict. Aggregated preferences and
//! poll majorities only narrow what an agent believes about the world;
//! the principle engine then evaluates plans against those beliefs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fallacy::{lint_argument, Argument, LintVerdict, Statement};
use crate::model::{AgentId, Atom, ModelError, Scenario, WorldId};
use crate::principles::{AutonomyContext, Consent};

#[derive(Debug, Error)]
pub enum MimesisError {
    #[error("profile has no candidates")]
    NoCandidates,
    #[error("duplicate candidate `{0}`")]
    DuplicateCandidate(String),
    #[error("ballot {ballot}: {message}")]
    InvalidBallot { ballot: usize, message: String },
    #[error("ballot {0} has a zero count")]
    ZeroCount(usize),
    #[error("ballot file has no ballots")]
    NoBallots,
    #[error("ballot header must be `count,rank1,rank2,...`, found `{0}`")]
    Header(String),
    #[error("line {line}: `{value}` is not a positive integer count")]
    Count { line: u64, value: String },
    #[error("poll for `{0}` has no responses")]
    EmptyPoll(Atom),
    #[error("threshold must lie in (0, 1], got {0}")]
    Threshold(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid ballot CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid poll document: {0}")]
    Json(#[from] serde_json::Error),
}

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ballot {
    pub ranking: Vec<String>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    candidates: Vec<String>,
    ballots: Vec<Ballot>,
}

impl PreferenceProfile {
    pub fn new(candidates: Vec<String>, ballots: Vec<Ballot>) -> Result<Self, MimesisError> {
        if candidates.is_empty() {
            return Err(MimesisError::NoCandidates);
        }
        let set: BTreeSet<&str> = candidates.iter().map(String::as_str).collect();
        if set.len() != candidates.len() {
            let dup = candidates
                .iter()
                .enumerate()
                .find(|(i, c)| candidates[..*i].contains(c))
                .map(|(_, c)| c.clone())
                .unwrap_or_default();
            return Err(MimesisError::DuplicateCandidate(dup));
        }
        for (i, ballot) in ballots.iter().enumerate() {
            let n = i + 1;
            if ballot.count == 0 {
                return Err(MimesisError::ZeroCount(n));
            }
            let mut seen = BTreeSet::new();
            for c in &ballot.ranking {
                if !set.contains(c.as_str()) {
                    return Err(MimesisError::InvalidBallot {
                        ballot: n,
                        message: format!("unknown candidate `{c}`"),
                    });
                }
                if !seen.insert(c.as_str()) {
                    return Err(MimesisError::InvalidBallot {
                        ballot: n,
                        message: format!("candidate `{c}` ranked twice"),
                    });
                }
            }
            if let Some(missing) = candidates.iter().find(|c| !seen.contains(c.as_str())) {
                return Err(MimesisError::InvalidBallot {
                    ballot: n,
                    message: format!("candidate `{missing}` is not ranked"),
                });
            }
        }
        Ok(PreferenceProfile { candidates, ballots })
    }

    /// Reads `count,rank1,rank2,...` CSV. Candidates are listed in order of
    /// first appearance.
    pub fn from_csv(src: &str) -> Result<Self, MimesisError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(src.as_bytes());
        let header = reader.headers()?.clone();
        let well_formed = header.len() >= 2
            && &header[0] == "count"
            && header
                .iter()
                .skip(1)
                .enumerate()
                .all(|(i, h)| h == format!("rank{}", i + 1));
        if !well_formed {
            return Err(MimesisError::Header(header.iter().collect::<Vec<_>>().join(",")));
        }
        let mut candidates: Vec<String> = Vec::new();
        let mut ballots = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let count = record[0].parse::<u64>().map_err(|_| MimesisError::Count {
                line,
                value: record[0].to_string(),
            })?;
            let ranking: Vec<String> = record.iter().skip(1).map(str::to_string).collect();
            for c in &ranking {
                if !candidates.contains(c) {
                    candidates.push(c.clone());
                }
            }
            ballots.push(Ballot { ranking, count });
        }
        if ballots.is_empty() {
            return Err(MimesisError::NoBallots);
        }
        PreferenceProfile::new(candidates, ballots)
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateScore {
    pub candidate: String,
    pub score: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BordaResult {
    /// In candidate order.
    pub scores: Vec<CandidateScore>,
    pub winners: Vec<String>,
}

impl BordaResult {
    pub fn score(&self, candidate: &str) -> Option<u64> {
        self.scores
            .iter()
            .find(|s| s.candidate == candidate)
            .map(|s| s.score)
    }
}

/// Each ballot awards `k-1, k-2, ..., 0` points down its ranking, times its
/// count.
pub fn borda_count(profile: &PreferenceProfile) -> BordaResult {
    let k = profile.candidates.len() as u64;
    let mut scores: Vec<CandidateScore> = profile
        .candidates
        .iter()
        .map(|c| CandidateScore {
            candidate: c.clone(),
            score: 0,
        })
        .collect();
    for ballot in &profile.ballots {
        for (place, c) in ballot.ranking.iter().enumerate() {
            let entry = scores
                .iter_mut()
                .find(|s| &s.candidate == c)
                .expect("validated ranking");
            entry.score += (k - 1 - place as u64) * ballot.count;
        }
    }
    let top = scores.iter().map(|s| s.score).max().unwrap_or(0);
    let winners = scores
        .iter()
        .filter(|s| s.score == top)
        .map(|s| s.candidate.clone())
        .collect();
    BordaResult { scores, winners }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Poll {
    pub proposition: Atom,
    pub yes: u64,
    pub no: u64,
}

impl Poll {
    pub fn from_json(src: &str) -> Result<Self, MimesisError> {
        Ok(serde_json::from_str(src)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PremiseEstimate {
    True,
    False,
    Indeterminate,
}

impl fmt::Display for PremiseEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PremiseEstimate::True => "True",
            PremiseEstimate::False => "False",
            PremiseEstimate::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

pub fn check_threshold(threshold: f64) -> Result<f64, MimesisError> {
    if threshold > 0.0 && threshold <= 1.0 {
        Ok(threshold)
    } else {
        Err(MimesisError::Threshold(threshold))
    }
}

/// True when only the yes share strictly exceeds `threshold`, False when
/// only the no share does, Indeterminate otherwise.
pub fn estimate_premise(poll: &Poll, threshold: f64) -> Result<PremiseEstimate, MimesisError> {
    let threshold = check_threshold(threshold)?;
    let total = poll.yes + poll.no;
    if total == 0 {
        return Err(MimesisError::EmptyPoll(poll.proposition.clone()));
    }
    let exceeds = |n: u64| n as f64 > threshold * total as f64;
    // below 0.5 both shares can exceed the threshold; that is no evidence either way
    Ok(match (exceeds(poll.yes), exceeds(poll.no)) {
        (true, false) => PremiseEstimate::True,
        (false, true) => PremiseEstimate::False,
        _ => PremiseEstimate::Indeterminate,
    })
}

/// A scenario whose actor beliefs have been narrowed by an estimated premise.
#[derive(Debug, Clone)]
pub struct PremiseUpdate {
    pub scenario: Scenario,
    pub actor: AgentId,
    pub proposition: Atom,
    pub estimate: PremiseEstimate,
    pub kept: Vec<WorldId>,
    pub removed: Vec<WorldId>,
    pub warning: Option<String>,
}

/// Restricts `actor`'s belief base to worlds where `proposition` has the
/// estimated truth value. Indeterminate leaves the scenario unchanged.
pub fn apply_premise(
    scenario: &Scenario,
    actor: &AgentId,
    estimate: PremiseEstimate,
    proposition: &Atom,
) -> Result<PremiseUpdate, MimesisError> {
    if scenario.predicate(&proposition.predicate).is_none() {
        return Err(ModelError::UnknownPredicate(proposition.predicate.clone()).into());
    }
    if !scenario.has_agent(&proposition.agent) {
        return Err(ModelError::UnknownAgent(proposition.agent.to_string()).into());
    }
    let believed = scenario.believed_worlds(actor)?;
    let wanted = match estimate {
        PremiseEstimate::True => Some(true),
        PremiseEstimate::False => Some(false),
        PremiseEstimate::Indeterminate => None,
    };
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for world in believed {
        let value = world.atom(&proposition.predicate, &proposition.agent)?;
        if wanted.map_or(true, |w| w == value) {
            kept.push(world.id().clone());
        } else {
            removed.push(world.id().clone());
        }
    }
    let next = if removed.is_empty() {
        scenario.clone()
    } else {
        scenario.with_beliefs(actor, kept.iter().cloned().collect())?
    };
    let warning = (kept.is_empty() && !removed.is_empty()).then(|| {
        format!(
            "estimate {estimate} for `{proposition}` contradicts every world `{actor}` believed possible; the belief base is now empty"
        )
    });
    Ok(PremiseUpdate {
        scenario: next,
        actor: actor.clone(),
        proposition: proposition.clone(),
        estimate,
        kept,
        removed,
        warning,
    })
}

/// Records implied consent from every agent affected by `actor_plan` when a
/// poll establishes that the interference is accepted practice.
pub fn imply_consent(
    ctx: &AutonomyContext,
    actor_plan: &str,
    estimate: PremiseEstimate,
) -> AutonomyContext {
    if estimate != PremiseEstimate::True {
        return ctx.clone();
    }
    ctx.interferences()
        .iter()
        .filter(|i| i.actor_plan == actor_plan)
        .filter(|i| ctx.consent(&i.affected_agent, actor_plan) == Consent::None)
        .fold(ctx.clone(), |acc, i| {
            acc.with_consent(&i.affected_agent, actor_plan, Consent::Implied)
        })
}

pub const AGGREGATION_CAVEAT: &str = "the argument is valid in form, but its bridge premise \
equating the most-preferred option with the right one is itself contestable: \
a majority can prefer what is wrong";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AggregationLint {
    pub verdict: LintVerdict,
    pub argument: Argument,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<&'static str>,
}

/// Lints the argument from a Borda outcome to a conclusion about the
/// winner. `normative_premise_present` adds the bridge premise that the
/// highest-scoring option is the right one; `normative_conclusion` chooses
/// between "X is the right thing to do" and "X received the most points".
pub fn lint_aggregation_argument(
    result: &BordaResult,
    normative_premise_present: bool,
    normative_conclusion: bool,
) -> AggregationLint {
    let winner = result.winners.join(" / ");
    let mut premises = vec![Statement::descriptive(format!(
        "Voters collectively awarded the most points to {winner}."
    ))];
    if normative_premise_present {
        premises.push(Statement::normative(
            "The option with the most points is the right thing to do.",
        ));
    }
    let conclusion = if normative_conclusion {
        Statement::normative(format!("Therefore, {winner} is the right thing to do."))
    } else {
        Statement::descriptive(format!("Therefore, {winner} received the most points."))
    };
    let argument = Argument::new(premises, conclusion, true);
    let verdict = lint_argument(&argument).expect("aggregation argument has premises");
    let caveat = (normative_premise_present && normative_conclusion && verdict.is_clean())
        .then_some(AGGREGATION_CAVEAT);
    AggregationLint {
        verdict,
        argument,
        caveat,
    }
}
