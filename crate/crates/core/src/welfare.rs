//! Plan selection combining utility with maximin fairness.
//!
//! `MaximinLex` picks the plan whose worst-off agent fares best, breaks
//! ties by total utility and then by input order. `UtilityOnly` maximises
//! total utility with the same positional tie-break. Values within the
//! matrix tolerance of each other count as tied.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::utility::{UtilityError, UtilityMatrix};

#[derive(Debug, Error)]
pub enum WelfareError {
    #[error("no plans to select from")]
    NoPlans,
    #[error(transparent)]
    Utility(#[from] UtilityError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    #[default]
    MaximinLex,
    UtilityOnly,
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionRule::MaximinLex => f.write_str("maximin_lex"),
            SelectionRule::UtilityOnly => f.write_str("utility_only"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanScore {
    pub plan: String,
    pub minimum: f64,
    pub total: f64,
}

pub fn plan_scores(plans: &[String], util: &UtilityMatrix) -> Result<Vec<PlanScore>, WelfareError> {
    plans
        .iter()
        .map(|p| {
            Ok(PlanScore {
                plan: p.clone(),
                minimum: util.minimum(p)?,
                total: util.total(p)?,
            })
        })
        .collect()
}

/// Keeps the entries whose `key` is within `tol` of the best.
fn keep_best<'a>(
    candidates: Vec<&'a PlanScore>,
    key: impl Fn(&PlanScore) -> f64,
    tol: f64,
) -> Vec<&'a PlanScore> {
    let best = candidates
        .iter()
        .map(|s| key(s))
        .fold(f64::NEG_INFINITY, f64::max);
    candidates
        .into_iter()
        .filter(|s| key(s) >= best - tol)
        .collect()
}

pub fn select_plan(
    plans: &[String],
    util: &UtilityMatrix,
    rule: SelectionRule,
) -> Result<String, WelfareError> {
    if plans.is_empty() {
        return Err(WelfareError::NoPlans);
    }
    let scores = plan_scores(plans, util)?;
    let tol = util.tolerance();
    let mut candidates: Vec<&PlanScore> = scores.iter().collect();
    if rule == SelectionRule::MaximinLex {
        candidates = keep_best(candidates, |s| s.minimum, tol);
    }
    candidates = keep_best(candidates, |s| s.total, tol);
    Ok(candidates[0].plan.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AgentId;

    fn matrix(rows: &[&[f64]]) -> (Vec<String>, UtilityMatrix) {
        let plans: Vec<String> = (0..rows.len()).map(|i| format!("p{i}")).collect();
        let agents = (0..rows[0].len())
            .map(|j| AgentId::new(format!("a{j}")).unwrap())
            .collect();
        let m = UtilityMatrix::new(plans.clone(), agents, rows.iter().map(|r| r.to_vec()).collect())
            .unwrap();
        (plans, m)
    }

    #[test]
    fn single_plan() {
        let (plans, m) = matrix(&[&[3.0, -1.0]]);
        assert_eq!(select_plan(&plans, &m, SelectionRule::MaximinLex).unwrap(), "p0");
        assert_eq!(select_plan(&plans, &m, SelectionRule::UtilityOnly).unwrap(), "p0");
    }

    #[test]
    fn maximin_and_utility_disagree() {
        let (plans, m) = matrix(&[&[1.0, 1.0], &[0.0, 5.0]]);
        assert_eq!(select_plan(&plans, &m, SelectionRule::MaximinLex).unwrap(), "p0");
        assert_eq!(select_plan(&plans, &m, SelectionRule::UtilityOnly).unwrap(), "p1");
    }

    #[test]
    fn ties_break_by_total_then_position() {
        let (plans, m) = matrix(&[&[1.0, 2.0], &[1.0, 4.0], &[4.0, 1.0]]);
        assert_eq!(select_plan(&plans, &m, SelectionRule::MaximinLex).unwrap(), "p1");
        let (plans, m) = matrix(&[&[2.0, 2.0], &[2.0, 2.0]]);
        assert_eq!(select_plan(&plans, &m, SelectionRule::MaximinLex).unwrap(), "p0");
        let reversed: Vec<String> = plans.iter().rev().cloned().collect();
        assert_eq!(select_plan(&reversed, &m, SelectionRule::UtilityOnly).unwrap(), "p1");
    }

    #[test]
    fn empty_and_unknown_plans() {
        let (_, m) = matrix(&[&[1.0]]);
        assert!(matches!(
            select_plan(&[], &m, SelectionRule::MaximinLex),
            Err(WelfareError::NoPlans)
        ));
        assert!(matches!(
            select_plan(&["zz".to_string()], &m, SelectionRule::MaximinLex),
            Err(WelfareError::Utility(_))
        ));
    }
}
