//! Brute-force slot walking.
//!
//! Nothing here uses gcds or closed forms: every verdict comes from stepping
//! through arrival slots `n, n + C_L, n + 2 C_L, ...` and testing the wake
//! predicate directly. That makes it the reference the closed forms are
//! checked against, and the only source of truth when `W > 1`.
//!
//! # Safe horizon
//!
//! Arrival `n + k C_L` is awake iff `(n - 1 + k C_L) mod (W + S) < W`. The
//! residue of `n - 1 + k C_L` modulo `W + S` is periodic in `k` with period
//! at most `W + S`, so if none of `k = 0..=W+S` is awake none ever will be.
//! Walking up to slot `n + (W + S) C_L` therefore makes `NeverReceived` an
//! exact verdict rather than a timeout.

use serde::Serialize;

use crate::analytics::{DutyCycleConfig, WorstCase};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    /// `n + (W + S) * C_L`, the smallest horizon with exact verdicts.
    Safe,
    /// Caller-supplied horizon that must be at least the safe bound.
    Exact(u64),
    /// Caller-supplied horizon; `NeverReceived` only means "not by then".
    Truncated(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReceptionRecord {
    /// Absolute reception slot, slot 1 being the gateway's first wake slot.
    pub delay: u64,
    /// Sensor duty-cycles elapsed before reception.
    pub c_cycles: u64,
    /// Complete wake/sleep cycles elapsed before the reception slot.
    pub wake_cycles: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseOutcome {
    Received(ReceptionRecord),
    NeverReceived,
}

impl PhaseOutcome {
    pub fn record(&self) -> Option<&ReceptionRecord> {
        match self {
            PhaseOutcome::Received(r) => Some(r),
            PhaseOutcome::NeverReceived => None,
        }
    }
}

fn validate(c_l: u64, w: u64) -> Result<()> {
    if c_l < 2 {
        return Err(Error::InvalidArgument(format!("C_L must be at least 2, got {c_l}")));
    }
    if w == 0 {
        return Err(Error::InvalidArgument("W must be at least 1".into()));
    }
    Ok(())
}

pub fn safe_horizon(n: u64, c_l: u64, w: u64, s: u64) -> Result<u64> {
    w.checked_add(s)
        .and_then(|p| p.checked_mul(c_l))
        .and_then(|v| v.checked_add(n))
        .ok_or(Error::Overflow)
}

pub fn delay_for_phase(n: u64, c_l: u64, w: u64, s: u64, horizon: Horizon) -> Result<PhaseOutcome> {
    validate(c_l, w)?;
    if n == 0 || n > c_l {
        return Err(Error::InvalidPhase { n, c_l });
    }
    let safe = safe_horizon(n, c_l, w, s)?;
    let limit = match horizon {
        Horizon::Safe => safe,
        Horizon::Exact(h) if h < safe => {
            return Err(Error::InsufficientHorizon { given: h, required: safe })
        }
        Horizon::Exact(h) | Horizon::Truncated(h) => h,
    };
    let period = w + s;

    let mut t = n;
    let mut k = 0;
    while t <= limit {
        if (t - 1) % period < w {
            return Ok(PhaseOutcome::Received(ReceptionRecord {
                delay: t,
                c_cycles: k,
                wake_cycles: (t - 1) / period,
            }));
        }
        t = match t.checked_add(c_l) {
            Some(next) => next,
            None => break,
        };
        k += 1;
    }
    Ok(PhaseOutcome::NeverReceived)
}

/// Reception outcome for every arrival phase `1..=C_L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDelayTable {
    pub c_l: u64,
    pub w: u64,
    pub s: u64,
    /// `entries[n - 1]` is the outcome for phase `n`.
    pub entries: Vec<PhaseOutcome>,
}

impl PhaseDelayTable {
    pub fn entry(&self, n: u64) -> Option<&PhaseOutcome> {
        n.checked_sub(1).and_then(|i| self.entries.get(i as usize))
    }

    pub fn all_received(&self) -> bool {
        self.entries.iter().all(|e| e.record().is_some())
    }

    pub fn never_received(&self) -> Vec<u64> {
        self.phases()
            .filter(|(_, e)| e.record().is_none())
            .map(|(n, _)| n)
            .collect()
    }

    /// Arg-max phase and its record. `None` if any phase is never received,
    /// since the worst delay is then unbounded.
    pub fn worst(&self) -> Option<(u64, ReceptionRecord)> {
        let mut best: Option<(u64, ReceptionRecord)> = None;
        for (n, e) in self.phases() {
            let r = *e.record()?;
            if best.is_none_or(|(_, b)| r.delay > b.delay) {
                best = Some((n, r));
            }
        }
        best
    }

    pub fn max_delay(&self) -> Option<u64> {
        self.worst().map(|(_, r)| r.delay)
    }

    pub fn mean_delay(&self) -> Option<f64> {
        let total = self
            .entries
            .iter()
            .map(|e| e.record().map(|r| r.delay))
            .sum::<Option<u64>>()?;
        Some(total as f64 / self.entries.len() as f64)
    }

    fn phases(&self) -> impl Iterator<Item = (u64, &PhaseOutcome)> {
        (1u64..).zip(self.entries.iter())
    }
}

pub fn build_phase_table(c_l: u64, w: u64, s: u64) -> Result<PhaseDelayTable> {
    validate(c_l, w)?;
    let entries = (1..=c_l)
        .map(|n| delay_for_phase(n, c_l, w, s, Horizon::Safe))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseDelayTable { c_l, w, s, entries })
}

/// Field-by-field agreement between a table and a closed-form model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub c_l: u64,
    pub s: u64,
    pub finiteness_match: bool,
    pub t_max_match: bool,
    pub w_delay_match: bool,
    pub c_l_min_match: bool,
    pub n_sleep_min_match: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.finiteness_match
            && self.t_max_match
            && self.w_delay_match
            && self.c_l_min_match
            && self.n_sleep_min_match
    }
}

/// Checks the closed forms in [`crate::analytics`] against the slot walk for `W = 1`.
pub fn verify_against_analytic(c_l: u64, s: u64) -> Result<VerificationReport> {
    verify_with(c_l, s, crate::analytics::worst_case)
}

/// Same as [`verify_against_analytic`] but against an arbitrary model, so a
/// deliberately wrong one can exercise the mismatch path.
pub fn verify_with<F>(c_l: u64, s: u64, model: F) -> Result<VerificationReport>
where
    F: Fn(&DutyCycleConfig) -> Result<WorstCase>,
{
    let config = DutyCycleConfig::new(c_l, s)?;
    let table = build_phase_table(c_l, 1, s)?;
    let analytic = match model(&config) {
        Ok(wc) => Some(wc),
        Err(Error::NotFinite { .. }) => None,
        Err(e) => return Err(e),
    };

    let report = match (table.worst(), analytic) {
        (Some((n, rec)), Some(wc)) => VerificationReport {
            c_l,
            s,
            finiteness_match: true,
            t_max_match: n == wc.t_max,
            w_delay_match: rec.delay == wc.w_delay,
            c_l_min_match: rec.c_cycles == wc.c_l_min,
            n_sleep_min_match: rec.wake_cycles == wc.n_sleep_min,
        },
        (None, None) => VerificationReport {
            c_l,
            s,
            finiteness_match: true,
            t_max_match: true,
            w_delay_match: true,
            c_l_min_match: true,
            n_sleep_min_match: true,
        },
        _ => VerificationReport {
            c_l,
            s,
            finiteness_match: false,
            t_max_match: false,
            w_delay_match: false,
            c_l_min_match: false,
            n_sleep_min_match: false,
        },
    };
    Ok(report)
}
