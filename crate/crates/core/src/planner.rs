//! Picks the longest gateway sleep that still meets a delay budget.
//!
//! For a duty-cycle length `C_L` the planner scans `S = C_L - 1` down to 0
//! and keeps the first `S` with `gcd(C_L, 1 + S) = 1` whose objective delay
//! fits the budget. The objective is either the worst delay `W_delay` or the
//! collision-adjusted expectation `W_delay / Pr(s)` for `N` sensors.
//!
//! Candidate lengths are handled in one of two ways:
//!
//! * an explicit list is tried in the caller's order and the first feasible
//!   entry wins;
//! * a range is searched exhaustively and the plan with the largest `S`
//!   wins, ties going to the larger `C_L` (or the smaller one when
//!   `prefer_smaller_cl` is set).

use serde::Serialize;

use crate::analytics::{self, DutyCycleConfig, Truncation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    BoundWorstDelay,
    BoundExpectedDelay,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidates {
    Fixed(u64),
    Ordered(Vec<u64>),
    Range { min: u64, max: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanRequest {
    /// Slots.
    pub delay_budget: u64,
    pub n_sensors: u64,
    pub candidates: Candidates,
    pub objective: Objective,
    pub prefer_smaller_cl: bool,
}

impl PlanRequest {
    pub fn fixed(delay_budget: u64, c_l: u64, objective: Objective) -> Self {
        PlanRequest {
            delay_budget,
            n_sensors: 1,
            candidates: Candidates::Fixed(c_l),
            objective,
            prefer_smaller_cl: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.delay_budget == 0 {
            return Err(Error::InvalidArgument("delay budget must be at least 1 slot".into()));
        }
        if self.n_sensors == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        let lengths: Vec<u64> = match &self.candidates {
            Candidates::Fixed(c) => vec![*c],
            Candidates::Ordered(v) => v.clone(),
            Candidates::Range { min, max } if min > max => {
                return Err(Error::InvalidArgument(format!("empty C_L range {min}..={max}")))
            }
            Candidates::Range { min, .. } => vec![*min],
        };
        if lengths.is_empty() {
            return Err(Error::InvalidArgument("no candidate C_L given".into()));
        }
        if let Some(c) = lengths.iter().find(|&&c| c < 2) {
            return Err(Error::InvalidArgument(format!("C_L must be at least 2, got {c}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanResult {
    pub c_l: u64,
    pub s: u64,
    /// Objective delay in slots at `(c_l, s)`.
    pub achieved_delay: f64,
    pub power_saving_ratio: f64,
    pub feasible: bool,
}

/// Objective delay for `(c_l, s)`, or `None` when the closed forms do not apply.
pub fn objective_delay(c_l: u64, s: u64, n_sensors: u64, objective: Objective) -> Option<f64> {
    let config = DutyCycleConfig::new(c_l, s).ok()?.with_sensors(n_sensors).ok()?;
    match objective {
        Objective::BoundWorstDelay => analytics::worst_delay(&config).ok().map(|d| d as f64),
        Objective::BoundExpectedDelay => {
            analytics::expected_worst_delay(&config, Truncation::ClosedForm).ok()
        }
    }
}

/// Largest feasible sleep length for one `C_L`, with its objective delay.
pub fn max_sleep_for(c_l: u64, delay_budget: u64, n_sensors: u64, objective: Objective) -> Option<(u64, f64)> {
    // W_delay >= C_L for every S, so nothing fits a smaller budget.
    if c_l > delay_budget {
        return None;
    }
    (0..c_l).rev().find_map(|s| {
        objective_delay(c_l, s, n_sensors, objective)
            .filter(|&d| d <= delay_budget as f64)
            .map(|d| (s, d))
    })
}

pub fn plan(request: &PlanRequest) -> Result<PlanResult> {
    request.validate()?;
    let found = |c_l: u64| {
        max_sleep_for(c_l, request.delay_budget, request.n_sensors, request.objective)
            .map(|(s, d)| (c_l, s, d))
    };

    let (first, best) = match &request.candidates {
        Candidates::Fixed(c_l) => (*c_l, found(*c_l)),
        Candidates::Ordered(list) => (list[0], list.iter().find_map(|&c| found(c))),
        Candidates::Range { min, max } => {
            let best = (*min..=*max).filter_map(found).max_by(|a, b| {
                let by_cl = if request.prefer_smaller_cl { b.0.cmp(&a.0) } else { a.0.cmp(&b.0) };
                a.1.cmp(&b.1).then(by_cl)
            });
            (*min, best)
        }
    };

    match best {
        Some((c_l, s, achieved_delay)) => Ok(PlanResult {
            c_l,
            s,
            achieved_delay,
            power_saving_ratio: analytics::power_saving_ratio(1, s)?,
            feasible: true,
        }),
        None => Ok(PlanResult {
            c_l: first,
            s: 0,
            achieved_delay: objective_delay(first, 0, request.n_sensors, request.objective)
                .unwrap_or(f64::INFINITY),
            power_saving_ratio: 0.0,
            feasible: false,
        }),
    }
}
