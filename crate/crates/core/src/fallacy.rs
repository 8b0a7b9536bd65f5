//! Naturalistic-fallacy linting over annotated arguments.
//!
//! An argument is checked against `Nc ∧ Gc → Np`: a normative conclusion
//! that is fully grounded by its premises needs at least one normative
//! premise. Normativity and grounding are supplied by the caller; nothing
//! here classifies text or proves entailment. The grounding relation is
//! taken as given because it has no operational definition to compute.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArgumentError {
    #[error("an argument without premises cannot have a grounded conclusion")]
    GroundedWithoutPremises,
    #[error("invalid argument document: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Statement {
    pub text: String,
    pub normative: bool,
}

impl Statement {
    pub fn normative(text: impl Into<String>) -> Self {
        Statement {
            text: text.into(),
            normative: true,
        }
    }

    pub fn descriptive(text: impl Into<String>) -> Self {
        Statement {
            text: text.into(),
            normative: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Argument {
    pub premises: Vec<Statement>,
    pub conclusion: Statement,
    #[serde(rename = "grounded")]
    pub conclusion_grounded: bool,
    /// Grounding of the normative disjunct of a disjunctive conclusion, when
    /// the conclusion carries one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normative_disjunct_grounded: Option<bool>,
}

impl Argument {
    pub fn new(premises: Vec<Statement>, conclusion: Statement, grounded: bool) -> Self {
        Argument {
            premises,
            conclusion,
            conclusion_grounded: grounded,
            normative_disjunct_grounded: None,
        }
    }

    pub fn from_json(src: &str) -> Result<Self, ArgumentError> {
        let arg: Argument = serde_json::from_str(src)?;
        arg.validate()?;
        Ok(arg)
    }

    pub fn validate(&self) -> Result<(), ArgumentError> {
        if self.premises.is_empty() && self.conclusion_grounded {
            return Err(ArgumentError::GroundedWithoutPremises);
        }
        Ok(())
    }

    pub fn has_normative_premise(&self) -> bool {
        self.premises.iter().any(|p| p.normative)
    }

    fn normative_component(&self) -> Option<bool> {
        match self.normative_disjunct_grounded {
            Some(grounded) => Some(grounded),
            None if self.conclusion.normative => Some(self.conclusion_grounded),
            None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LintVerdict {
    NoFallacy,
    FallacyDetected,
    GroundlessNormativeElement,
}

impl LintVerdict {
    /// The clause of the schema that produced this verdict.
    pub fn clause(self) -> &'static str {
        match self {
            LintVerdict::NoFallacy => {
                "Nc ∧ Gc → Np holds: no grounded normative conclusion lacks a normative premise"
            }
            LintVerdict::FallacyDetected => {
                "Nc ∧ Gc ∧ ¬Np: a grounded normative conclusion drawn from descriptive premises only"
            }
            LintVerdict::GroundlessNormativeElement => {
                "¬Gc: the conclusion's normative element is not grounded by the premises"
            }
        }
    }

    pub fn is_clean(self) -> bool {
        self == LintVerdict::NoFallacy
    }
}

impl fmt::Display for LintVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LintVerdict::NoFallacy => "NoFallacy",
            LintVerdict::FallacyDetected => "FallacyDetected",
            LintVerdict::GroundlessNormativeElement => "GroundlessNormativeElement",
        };
        f.write_str(s)
    }
}

pub fn lint_argument(arg: &Argument) -> Result<LintVerdict, ArgumentError> {
    arg.validate()?;
    let verdict = match arg.normative_component() {
        Some(true) if !arg.has_normative_premise() => LintVerdict::FallacyDetected,
        Some(false) => LintVerdict::GroundlessNormativeElement,
        _ => LintVerdict::NoFallacy,
    };
    Ok(verdict)
}
