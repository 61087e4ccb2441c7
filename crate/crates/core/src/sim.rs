//! Seeded slot-level Monte Carlo of `N` sensors sharing one duty-cycled gateway.
//!
//! Model, per slot `t = 1, 2, ...`:
//!
//! * every sensor not yet heard transmits in the slots `a + p + k C_L`,
//!   where `a` is its last (re)activation slot (0 at the start) and `p` its
//!   phase in `1..=C_L`;
//! * two or more transmissions in one slot destroy each other, whether or
//!   not the gateway is listening; that slot counts as one collision event;
//! * a lone transmission in a wake slot is received and the sensor's delay
//!   is `t`;
//! * a sensor still unheard `W_delay` slots after its last activation is
//!   re-activated in that slot with a fresh uniform phase.
//!
//! Slot 1 is a wake slot. Trials are independent and each draws from its
//! own ChaCha8 stream seeded by [`trial_seed`], so results do not depend on
//! how trials are scheduled across threads.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{self, DutyCycleConfig};
use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index`: the `(index + 1)`-th output of a SplitMix64
/// generator whose state starts at `base_seed`.
pub fn trial_seed(base_seed: u64, index: u64) -> u64 {
    mix64(base_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// Slots an unheard sensor waits before re-activation. For schedules
/// without a closed form this falls back to `C_L (W + S)`, which bounds
/// every reachable phase's delay.
pub fn reactivation_threshold(config: &DutyCycleConfig) -> u64 {
    analytics::worst_delay(config).unwrap_or_else(|_| config.c_l().saturating_mul(config.period()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SensorState {
    /// 1-based sensor index.
    pub id: u64,
    pub phase: u64,
    pub initial_phase: u64,
    pub activated_at: u64,
    pub received: bool,
    pub first_success_slot: Option<u64>,
    pub collision_count: u64,
    pub reactivations: u64,
}

impl SensorState {
    pub fn slots_since_activation(&self, now: u64) -> u64 {
        now.saturating_sub(self.activated_at)
    }

    fn bucket(&self, c_l: u64) -> usize {
        ((self.activated_at + self.phase) % c_l) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SensorOutcome {
    pub id: u64,
    pub initial_phase: u64,
    /// Absolute reception slot; `None` if not heard within the trial.
    pub delay: Option<u64>,
    /// Slots between the last activation and reception.
    pub activation_latency: Option<u64>,
    pub collisions: u64,
    pub reactivations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialMetrics {
    pub per_sensor: Vec<SensorOutcome>,
    /// Largest delay among received sensors.
    pub worst_delay_observed: Option<u64>,
    pub mean_delay: Option<f64>,
    /// Slots in which two or more sensors transmitted.
    pub total_collision_events: u64,
    /// Whether sensor 1's first transmission collided.
    pub tagged_first_round_collided: bool,
    pub slots_simulated: u64,
}

pub fn run_trial(config: &DutyCycleConfig, seed: u64, max_slots: Option<u64>) -> TrialMetrics {
    let c_l = config.c_l();
    let threshold = reactivation_threshold(config);
    let max_slots = max_slots.unwrap_or_else(|| threshold.saturating_mul(64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut sensors: Vec<SensorState> = (1..=config.n_sensors())
        .map(|id| {
            let phase = rng.gen_range(1..=c_l);
            SensorState {
                id,
                phase,
                initial_phase: phase,
                activated_at: 0,
                received: false,
                first_success_slot: None,
                collision_count: 0,
                reactivations: 0,
            }
        })
        .collect();

    // Unheard sensors grouped by the residue of their transmit slots mod C_L.
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); c_l as usize];
    for (i, s) in sensors.iter().enumerate() {
        buckets[s.bucket(c_l)].push(i);
    }
    // Deadlines are pushed in non-decreasing order, so a FIFO stays sorted.
    let mut deadlines: VecDeque<(u64, usize)> = (0..sensors.len()).map(|i| (threshold, i)).collect();

    let tagged_first_tx = sensors[0].initial_phase;
    let mut tagged_first_round_collided = false;
    let mut total_collision_events = 0;
    let mut remaining = sensors.len();
    let mut t = 0;

    while remaining > 0 && t < max_slots {
        t += 1;
        let slot = &mut buckets[(t % c_l) as usize];
        match slot.len() {
            0 => {}
            1 => {
                if config.is_awake(t) {
                    let idx = slot.pop().expect("one transmitter");
                    let s = &mut sensors[idx];
                    s.received = true;
                    s.first_success_slot = Some(t);
                    remaining -= 1;
                }
            }
            _ => {
                total_collision_events += 1;
                for &idx in slot.iter() {
                    sensors[idx].collision_count += 1;
                    if idx == 0 && t == tagged_first_tx {
                        tagged_first_round_collided = true;
                    }
                }
            }
        }

        while let Some(&(deadline, idx)) = deadlines.front() {
            if deadline > t {
                break;
            }
            deadlines.pop_front();
            if sensors[idx].received {
                continue;
            }
            let old = sensors[idx].bucket(c_l);
            buckets[old].retain(|&i| i != idx);
            let s = &mut sensors[idx];
            s.activated_at = t;
            s.phase = rng.gen_range(1..=c_l);
            s.reactivations += 1;
            buckets[s.bucket(c_l)].push(idx);
            deadlines.push_back((t.saturating_add(threshold), idx));
        }
    }

    let per_sensor: Vec<SensorOutcome> = sensors
        .iter()
        .map(|s| SensorOutcome {
            id: s.id,
            initial_phase: s.initial_phase,
            delay: s.first_success_slot,
            activation_latency: s.first_success_slot.map(|t| s.slots_since_activation(t)),
            collisions: s.collision_count,
            reactivations: s.reactivations,
        })
        .collect();
    let delays: Vec<u64> = per_sensor.iter().filter_map(|o| o.delay).collect();

    TrialMetrics {
        worst_delay_observed: delays.iter().copied().max(),
        mean_delay: (!delays.is_empty())
            .then(|| delays.iter().sum::<u64>() as f64 / delays.len() as f64),
        per_sensor,
        total_collision_events,
        tagged_first_round_collided,
        slots_simulated: t,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExperimentOptions {
    pub parallel: bool,
    pub max_slots: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateMetrics {
    pub trials: u64,
    /// Mean over trials of the per-trial worst delay.
    pub expected_worst_delay: f64,
    /// Mean delay over every received sensor in every trial.
    pub average_delay: f64,
    /// Largest per-trial worst delay.
    pub worst_delay: u64,
    pub power_saving_ratio: f64,
    /// 95% normal-approximation half-width of `expected_worst_delay`.
    pub confidence_halfwidth: f64,
    /// Largest gap between a sensor's last activation and its reception.
    pub worst_activation_latency: u64,
    pub average_activation_latency: f64,
    /// Fraction of trials in which sensor 1's first transmission collided.
    pub first_round_collision_rate: f64,
    pub collision_events: u64,
    pub unreceived_sensors: u64,
}

pub fn run_experiment(config: &DutyCycleConfig, trials: u64, base_seed: u64) -> Result<AggregateMetrics> {
    run_experiment_with(config, trials, base_seed, ExperimentOptions::default())
}

pub fn run_experiment_with(
    config: &DutyCycleConfig,
    trials: u64,
    base_seed: u64,
    options: ExperimentOptions,
) -> Result<AggregateMetrics> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let one = |i: u64| run_trial(config, trial_seed(base_seed, i), options.max_slots);
    let results: Vec<TrialMetrics> = if options.parallel {
        (0..trials).into_par_iter().map(one).collect()
    } else {
        (0..trials).map(one).collect()
    };
    aggregate(config, &results)
}

/// Folds trial results in index order.
pub fn aggregate(config: &DutyCycleConfig, results: &[TrialMetrics]) -> Result<AggregateMetrics> {
    if results.is_empty() {
        return Err(Error::EmptyInput);
    }
    let worsts: Vec<f64> = results
        .iter()
        .filter_map(|r| r.worst_delay_observed)
        .map(|w| w as f64)
        .collect();
    let (mean_worst, halfwidth) = mean_and_halfwidth(&worsts);

    let mut delay_sum = 0u64;
    let mut latency_sum = 0u64;
    let mut received = 0u64;
    let mut unreceived = 0u64;
    let mut worst_latency = 0u64;
    for o in results.iter().flat_map(|r| r.per_sensor.iter()) {
        match (o.delay, o.activation_latency) {
            (Some(d), Some(l)) => {
                delay_sum += d;
                latency_sum += l;
                worst_latency = worst_latency.max(l);
                received += 1;
            }
            _ => unreceived += 1,
        }
    }
    let per_received = |sum: u64| if received == 0 { f64::NAN } else { sum as f64 / received as f64 };

    Ok(AggregateMetrics {
        trials: results.len() as u64,
        expected_worst_delay: mean_worst,
        average_delay: per_received(delay_sum),
        worst_delay: results.iter().filter_map(|r| r.worst_delay_observed).max().unwrap_or(0),
        power_saving_ratio: analytics::power_saving_ratio(config.w(), config.s())?,
        confidence_halfwidth: halfwidth,
        worst_activation_latency: worst_latency,
        average_activation_latency: per_received(latency_sum),
        first_round_collision_rate: results.iter().filter(|r| r.tagged_first_round_collided).count()
            as f64
            / results.len() as f64,
        collision_events: results.iter().map(|r| r.total_collision_events).sum(),
        unreceived_sensors: unreceived,
    })
}

fn mean_and_halfwidth(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}
