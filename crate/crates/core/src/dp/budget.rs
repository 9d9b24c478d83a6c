//! Per-community ε bookkeeping, the budget/utility constraint check, and a
//! grid search over mapping parameters.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DpError, EpsilonMapping, MappingParams, SigmoidForm};
use crate::community::CommunityPartition;

/// Relative slack when comparing a total against the budget.
const BUDGET_SLACK: f64 = 1e-12;

/// Direction of the budget (and utility) constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetDirection {
    /// `Σε ≤ B` and `RMSE ≤ bound` (sequential composition).
    #[default]
    AtMost,
    /// `Σε ≥ B` and `RMSE ≥ bound`, the constraints as printed.
    AtLeast,
}

impl FromStr for BudgetDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "at-most" | "<=" | "le" => Ok(Self::AtMost),
            "at-least" | ">=" | "ge" => Ok(Self::AtLeast),
            other => Err(format!("unknown budget direction `{other}`")),
        }
    }
}

impl BudgetDirection {
    fn holds(self, value: f64, bound: f64) -> bool {
        let slack = BUDGET_SLACK * bound.abs().max(1.0);
        match self {
            BudgetDirection::AtMost => value <= bound + slack,
            BudgetDirection::AtLeast => value >= bound - slack,
        }
    }
}

/// ε per community plus the network-wide budget `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyAssignment {
    pub per_community_epsilon: BTreeMap<usize, f64>,
    pub budget: f64,
    pub total_epsilon: f64,
}

impl PrivacyAssignment {
    pub fn new(per_community_epsilon: BTreeMap<usize, f64>, budget: f64) -> Self {
        let total_epsilon = per_community_epsilon.values().sum();
        PrivacyAssignment { per_community_epsilon, budget, total_epsilon }
    }

    pub fn from_densities(
        densities: &BTreeMap<usize, f64>,
        mapping: &EpsilonMapping,
        budget: f64,
    ) -> Result<Self, DpError> {
        let eps = densities
            .iter()
            .map(|(&id, &d)| mapping.epsilon(d).map(|e| (id, e)))
            .collect::<Result<_, _>>()?;
        Ok(Self::new(eps, budget))
    }

    pub fn from_partition(p: &CommunityPartition, mapping: &EpsilonMapping, budget: f64) -> Result<Self, DpError> {
        Self::from_densities(&partition_densities(p), mapping, budget)
    }

    pub fn epsilon(&self, community: usize) -> Option<f64> {
        self.per_community_epsilon.get(&community).copied()
    }
}

pub fn partition_densities(p: &CommunityPartition) -> BTreeMap<usize, f64> {
    p.communities.iter().map(|c| (c.id, c.density)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffReport {
    pub direction: BudgetDirection,
    pub total_epsilon: f64,
    pub budget: f64,
    pub budget_ok: bool,
    pub observed_rmse: f64,
    pub rmse_bound: f64,
    pub utility_ok: bool,
}

impl TradeoffReport {
    pub fn feasible(&self) -> bool {
        self.budget_ok && self.utility_ok
    }
}

pub fn check_tradeoff(
    assignment: &PrivacyAssignment,
    rmse_bound: f64,
    observed_rmse: f64,
    direction: BudgetDirection,
) -> TradeoffReport {
    TradeoffReport {
        direction,
        total_epsilon: assignment.total_epsilon,
        budget: assignment.budget,
        budget_ok: direction.holds(assignment.total_epsilon, assignment.budget),
        observed_rmse,
        rmse_bound,
        utility_ok: direction.holds(observed_rmse, rmse_bound),
    }
}

/// Candidate values for each mapping parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingGrid {
    pub omega: Vec<f64>,
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl MappingGrid {
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.omega.len() * self.theta.len() * self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in `omega`-major, then `theta`, then `alpha` order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.omega
            .iter()
            .flat_map(move |&o| self.theta.iter().flat_map(move |&t| self.alpha.iter().map(move |&a| (o, t, a))))
    }
}

impl Default for MappingGrid {
    fn default() -> Self {
        MappingGrid {
            omega: Self::linspace(0.5, 4.0, 8),
            theta: Self::linspace(0.25, 2.0, 8),
            alpha: Self::linspace(-1.0, 2.0, 13),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TuneOutcome {
    Feasible { params: MappingParams, total_epsilon: f64 },
    /// No grid point satisfied the budget constraint.
    Infeasible { closest_total: f64 },
}

/// Grid search for the parameters maximizing `Σ ε_c` under the budget
/// constraint. The first grid point wins ties.
pub fn tune_mapping(
    densities: &BTreeMap<usize, f64>,
    budget: f64,
    grid: &MappingGrid,
    direction: BudgetDirection,
    form: SigmoidForm,
) -> Result<TuneOutcome, DpError> {
    if grid.is_empty() {
        return Err(DpError::InvalidParams("empty parameter grid".into()));
    }
    let mut best: Option<(MappingParams, f64)> = None;
    let mut closest = f64::NAN;
    for (omega, theta, alpha) in grid.points() {
        let params = MappingParams::new(omega, theta, alpha)?;
        let mapping = EpsilonMapping { params, form, floor: None };
        let total: f64 = densities.values().map(|&d| mapping.epsilon(d)).sum::<Result<f64, _>>()?;
        if closest.is_nan() || (total - budget).abs() < (closest - budget).abs() {
            closest = total;
        }
        if direction.holds(total, budget) && best.is_none_or(|(_, t)| total > t) {
            best = Some((params, total));
        }
    }
    Ok(match best {
        Some((params, total_epsilon)) => TuneOutcome::Feasible { params, total_epsilon },
        None => TuneOutcome::Infeasible { closest_total: closest },
    })
}
