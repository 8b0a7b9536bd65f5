//! Per-plan, per-agent utilities.
//!
//! CSV layout: a header `plan,<agent>,<agent>,...` followed by one row per
//! plan holding its id and one real value per agent column.

use thiserror::Error;

use crate::model::{AgentId, ModelError};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum UtilityError {
    #[error("utility matrix has no agent columns")]
    NoAgents,
    #[error("duplicate plan `{0}` in utility matrix")]
    DuplicatePlan(String),
    #[error("duplicate agent column `{0}` in utility matrix")]
    DuplicateAgent(String),
    #[error("row for plan `{plan}` has {found} values, expected {expected}")]
    RowLength {
        plan: String,
        expected: usize,
        found: usize,
    },
    #[error("utility for plan `{plan}`, agent `{agent}` is not a finite number")]
    NotFinite { plan: String, agent: String },
    #[error("tolerance must be a non-negative finite number, got {0}")]
    Tolerance(f64),
    #[error("no utilities for plan `{0}`")]
    UnknownPlan(String),
    #[error("invalid agent column: {0}")]
    Agent(#[from] ModelError),
    #[error("line {line}: `{value}` is not a number")]
    Number { line: u64, value: String },
    #[error("invalid utility CSV: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityMatrix {
    plans: Vec<String>,
    agents: Vec<AgentId>,
    rows: Vec<Vec<f64>>,
    tolerance: f64,
}

impl UtilityMatrix {
    pub fn new(
        plans: Vec<String>,
        agents: Vec<AgentId>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, UtilityError> {
        if agents.is_empty() {
            return Err(UtilityError::NoAgents);
        }
        for (i, agent) in agents.iter().enumerate() {
            if agents[..i].contains(agent) {
                return Err(UtilityError::DuplicateAgent(agent.to_string()));
            }
        }
        for (i, plan) in plans.iter().enumerate() {
            if plans[..i].contains(plan) {
                return Err(UtilityError::DuplicatePlan(plan.clone()));
            }
        }
        if plans.len() != rows.len() {
            return Err(UtilityError::RowLength {
                plan: plans.get(rows.len()).cloned().unwrap_or_default(),
                expected: agents.len(),
                found: 0,
            });
        }
        for (plan, row) in plans.iter().zip(&rows) {
            if row.len() != agents.len() {
                return Err(UtilityError::RowLength {
                    plan: plan.clone(),
                    expected: agents.len(),
                    found: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(UtilityError::NotFinite {
                    plan: plan.clone(),
                    agent: agents[j].to_string(),
                });
            }
        }
        Ok(UtilityMatrix {
            plans,
            agents,
            rows,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self, UtilityError> {
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(UtilityError::Tolerance(tolerance));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn from_csv(src: &str) -> Result<Self, UtilityError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(src.as_bytes());
        let agents = reader
            .headers()?
            .iter()
            .skip(1)
            .map(AgentId::new)
            .collect::<Result<Vec<_>, _>>()?;
        let mut plans = Vec::new();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let mut fields = record.iter();
            plans.push(fields.next().unwrap_or_default().to_string());
            let row = fields
                .map(|v| {
                    v.parse::<f64>().map_err(|_| UtilityError::Number {
                        line,
                        value: v.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        UtilityMatrix::new(plans, agents, rows)
    }

    pub fn plans(&self) -> &[String] {
        &self.plans
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn row(&self, plan: &str) -> Result<&[f64], UtilityError> {
        self.plans
            .iter()
            .position(|p| p == plan)
            .map(|i| self.rows[i].as_slice())
            .ok_or_else(|| UtilityError::UnknownPlan(plan.to_string()))
    }

    pub fn total(&self, plan: &str) -> Result<f64, UtilityError> {
        Ok(self.row(plan)?.iter().sum())
    }

    pub fn minimum(&self, plan: &str) -> Result<f64, UtilityError> {
        Ok(self
            .row(plan)?
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min))
    }

    /// Applies `f` to every entry, keeping the tolerance.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, UtilityError> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&v| f(v)).collect())
            .collect();
        UtilityMatrix::new(self.plans.clone(), self.agents.clone(), rows)?
            .with_tolerance(self.tolerance)
    }

    /// Reorders agent columns by `order` (a permutation of column indices).
    pub fn permute_agents(&self, order: &[usize]) -> Result<Self, UtilityError> {
        let agents = order.iter().map(|&j| self.agents[j].clone()).collect();
        let rows = self
            .rows
            .iter()
            .map(|r| order.iter().map(|&j| r[j]).collect())
            .collect();
        UtilityMatrix::new(self.plans.clone(), agents, rows)?.with_tolerance(self.tolerance)
    }
}
