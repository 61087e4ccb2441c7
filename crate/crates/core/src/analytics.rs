//! Closed-form worst-case delay analysis for a single-slot wake window.
//!
//! All quantities are in slots. Slot 1 is the gateway's first wake slot and
//! a delay is the absolute slot index at which a transmission is heard, so
//! the worst arrival phase `C_L - S` is heard in slot `C_L (S + 1) - S`.

use serde::Serialize;

use crate::cycle;
use crate::error::{Error, Result};

/// One gateway/sensor configuration.
///
/// Construction only enforces the basic ranges; the coprimality and
/// `C_L > S` requirements of the closed forms are checked per call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DutyCycleConfig {
    c_l: u64,
    w: u64,
    s: u64,
    n_sensors: u64,
    slot_duration: f64,
}

impl DutyCycleConfig {
    /// `W = 1`, one sensor, one-second slots.
    pub fn new(c_l: u64, s: u64) -> Result<Self> {
        Self::general(c_l, 1, s, 1)
    }

    pub fn general(c_l: u64, w: u64, s: u64, n_sensors: u64) -> Result<Self> {
        if c_l < 2 {
            return Err(Error::InvalidArgument(format!("C_L must be at least 2, got {c_l}")));
        }
        if w == 0 {
            return Err(Error::InvalidArgument("W must be at least 1".into()));
        }
        if n_sensors == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        w.checked_add(s).ok_or(Error::Overflow)?;
        Ok(DutyCycleConfig { c_l, w, s, n_sensors, slot_duration: 1.0 })
    }

    pub fn with_sensors(self, n_sensors: u64) -> Result<Self> {
        Self::general(self.c_l, self.w, self.s, n_sensors)
            .map(|c| c.with_duration_unchecked(self.slot_duration))
    }

    pub fn with_slot_duration(self, seconds: f64) -> Result<Self> {
        if !(seconds.is_finite() && seconds > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "slot duration must be positive, got {seconds}"
            )));
        }
        Ok(self.with_duration_unchecked(seconds))
    }

    fn with_duration_unchecked(mut self, seconds: f64) -> Self {
        self.slot_duration = seconds;
        self
    }

    pub fn c_l(&self) -> u64 {
        self.c_l
    }
    pub fn w(&self) -> u64 {
        self.w
    }
    pub fn s(&self) -> u64 {
        self.s
    }
    pub fn n_sensors(&self) -> u64 {
        self.n_sensors
    }
    pub fn slot_duration(&self) -> f64 {
        self.slot_duration
    }

    /// Gateway wake/sleep cycle length `W + S`.
    pub fn period(&self) -> u64 {
        self.w + self.s
    }

    /// Whether the gateway listens in (1-based) slot `t`.
    pub fn is_awake(&self, t: u64) -> bool {
        t >= 1 && (t - 1) % self.period() < self.w
    }

    pub fn to_seconds(&self, slots: f64) -> f64 {
        slots * self.slot_duration
    }
}

/// Worst arrival phase and its reception data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WorstCase {
    pub t_max: u64,
    pub c_l_min: u64,
    pub n_sleep_min: u64,
    pub w_delay: u64,
}

/// True iff every arrival phase eventually meets a wake slot.
///
/// Arrivals of phase `n` visit exactly the residues `≡ n - 1 (mod g)` of the
/// wake/sleep cycle, `g = gcd(C_L, W + S)`, so all phases are heard iff each
/// residue class mod `g` contains a wake offset, i.e. `g <= W`. For the
/// single-slot window this is plain coprimality.
pub fn check_finite(config: &DutyCycleConfig) -> bool {
    gcd_of(config) <= config.w
}

fn gcd_of(config: &DutyCycleConfig) -> u64 {
    cycle::gcd(config.c_l, config.period()).expect("validated at construction")
}

fn require_closed_form(config: &DutyCycleConfig) -> Result<()> {
    if config.w != 1 {
        return Err(Error::UnsupportedWake(config.w));
    }
    let g = gcd_of(config);
    if g != 1 {
        return Err(Error::NotFinite { c_l: config.c_l, period: config.period(), gcd: g });
    }
    if config.c_l <= config.s {
        return Err(Error::DegenerateConfig { c_l: config.c_l, s: config.s });
    }
    Ok(())
}

/// `T^max = C_L - S`.
pub fn worst_arrival(config: &DutyCycleConfig) -> Result<u64> {
    require_closed_form(config)?;
    Ok(config.c_l - config.s)
}

/// `W_delay = C_L (S + 1) - S`.
pub fn worst_delay(config: &DutyCycleConfig) -> Result<u64> {
    require_closed_form(config)?;
    config
        .s
        .checked_add(1)
        .and_then(|v| v.checked_mul(config.c_l))
        .map(|v| v - config.s)
        .ok_or(Error::Overflow)
}

pub fn worst_case(config: &DutyCycleConfig) -> Result<WorstCase> {
    Ok(WorstCase {
        t_max: worst_arrival(config)?,
        c_l_min: config.s,
        n_sleep_min: config.c_l - 1,
        w_delay: worst_delay(config)?,
    })
}

/// Probability that none of the other `N - 1` sensors picks the same slot.
pub fn success_probability(c_l: u64, n_sensors: u64) -> Result<f64> {
    if c_l < 2 || n_sensors == 0 {
        return Err(Error::InvalidArgument(format!(
            "need C_L >= 2 and N >= 1, got C_L={c_l}, N={n_sensors}"
        )));
    }
    let base = (c_l - 1) as f64 / c_l as f64;
    Ok(base.powf((n_sensors - 1) as f64))
}

pub fn collision_probability(c_l: u64, n_sensors: u64) -> Result<f64> {
    Ok(1.0 - success_probability(c_l, n_sensors)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// `W_delay / Pr(s)`.
    ClosedForm,
    /// First `terms` terms of `W_delay Pr(s) Σ (t+1) Pr(c)^t`.
    Series(u64),
}

/// Expected worst delay when every collision costs another full `W_delay`
/// and collisions are independent with probability `Pr(c)`.
pub fn expected_worst_delay(config: &DutyCycleConfig, truncation: Truncation) -> Result<f64> {
    let w_delay = worst_delay(config)? as f64;
    let ps = success_probability(config.c_l, config.n_sensors)?;
    match truncation {
        Truncation::ClosedForm => Ok(w_delay / ps),
        Truncation::Series(0) => {
            Err(Error::InvalidArgument("series truncation needs at least one term".into()))
        }
        Truncation::Series(terms) => {
            let pc = 1.0 - ps;
            let mut sum = 0.0;
            let mut pc_pow = 1.0;
            for t in 0..terms {
                sum += (t + 1) as f64 * pc_pow;
                pc_pow *= pc;
                if pc_pow == 0.0 {
                    break;
                }
            }
            Ok(w_delay * ps * sum)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageMode {
    CollisionFree,
    /// Phase mean scaled by `1 / Pr(s)`, the same geometric factor the
    /// worst-case expectation uses. This is an extension: only the worst
    /// sensor's collision accounting is derived in closed form.
    WithCollisions,
}

/// Mean reception slot over uniformly distributed arrival phases.
///
/// With `gcd(C_L, 1 + S) = 1` the `C_L` phases are heard in pairwise distinct
/// wake slots no later than `W_delay`, and there are exactly `C_L` wake slots
/// in `1..=W_delay`, so the phase delays are precisely those slots and their
/// mean is `(W_delay + 1) / 2`.
pub fn average_delay_over_phases(config: &DutyCycleConfig, mode: AverageMode) -> Result<f64> {
    let mean = (worst_delay(config)? as f64 + 1.0) / 2.0;
    match mode {
        AverageMode::CollisionFree => Ok(mean),
        AverageMode::WithCollisions => {
            Ok(mean / success_probability(config.c_l, config.n_sensors)?)
        }
    }
}

/// Percentage of each wake/sleep cycle the gateway spends asleep.
pub fn power_saving_ratio(w: u64, s: u64) -> Result<f64> {
    if w == 0 {
        return Err(Error::InvalidArgument("W must be at least 1".into()));
    }
    Ok(100.0 * s as f64 / (w + s) as f64)
}

/// Cumulative correctness rate: `100 * mean(analytic) / mean(measured)`.
pub fn ccr(analytic: &[f64], measured: &[f64]) -> Result<f64> {
    if analytic.is_empty() || measured.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let denom = mean(measured);
    if denom == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(100.0 * mean(analytic) / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayAnalysis {
    pub config: DutyCycleConfig,
    pub finite: bool,
    pub t_max: Option<u64>,
    pub c_l_min: Option<u64>,
    pub n_sleep_min: Option<u64>,
    pub w_delay: Option<u64>,
    /// `W_delay - T^max`: slots between the worst arrival and its reception.
    pub wait_after_arrival: Option<u64>,
    pub pr_success: f64,
    pub pr_collision: f64,
    pub expected_worst_delay: Option<f64>,
    pub average_delay: Option<f64>,
    pub power_saving_ratio: f64,
    pub w_delay_seconds: Option<f64>,
    pub expected_worst_delay_seconds: Option<f64>,
}

/// Full analysis of one configuration. A non-finite schedule is reported
/// with `finite = false` rather than as an error.
pub fn analyze(config: &DutyCycleConfig) -> Result<DelayAnalysis> {
    if config.w != 1 {
        return Err(Error::UnsupportedWake(config.w));
    }
    let pr_success = success_probability(config.c_l, config.n_sensors)?;
    let mut analysis = DelayAnalysis {
        config: *config,
        finite: check_finite(config),
        t_max: None,
        c_l_min: None,
        n_sleep_min: None,
        w_delay: None,
        wait_after_arrival: None,
        pr_success,
        pr_collision: 1.0 - pr_success,
        expected_worst_delay: None,
        average_delay: None,
        power_saving_ratio: power_saving_ratio(config.w, config.s)?,
        w_delay_seconds: None,
        expected_worst_delay_seconds: None,
    };
    if !analysis.finite {
        return Ok(analysis);
    }

    let wc = worst_case(config)?;
    let expected = expected_worst_delay(config, Truncation::ClosedForm)?;
    analysis.t_max = Some(wc.t_max);
    analysis.c_l_min = Some(wc.c_l_min);
    analysis.n_sleep_min = Some(wc.n_sleep_min);
    analysis.w_delay = Some(wc.w_delay);
    analysis.wait_after_arrival = Some(wc.w_delay - wc.t_max);
    analysis.expected_worst_delay = Some(expected);
    analysis.average_delay = Some(average_delay_over_phases(config, AverageMode::WithCollisions)?);
    analysis.w_delay_seconds = Some(config.to_seconds(wc.w_delay as f64));
    analysis.expected_worst_delay_seconds = Some(config.to_seconds(expected));
    Ok(analysis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn cfg(c_l: u64, s: u64) -> DutyCycleConfig {
        DutyCycleConfig::new(c_l, s).unwrap()
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn config_validation() {
        assert!(DutyCycleConfig::new(1, 0).is_err());
        assert!(DutyCycleConfig::general(8, 0, 1, 1).is_err());
        assert!(DutyCycleConfig::general(8, 1, 1, 0).is_err());
        assert!(cfg(8, 1).with_slot_duration(0.0).is_err());
        assert!(cfg(8, 1).with_slot_duration(f64::NAN).is_err());
        let c = cfg(8, 2).with_slot_duration(0.5).unwrap().with_sensors(4).unwrap();
        assert_eq!((c.n_sensors(), c.slot_duration()), (4, 0.5));
    }

    #[test]
    fn finiteness_examples() {
        assert!(check_finite(&cfg(32, 2)));
        assert!(!check_finite(&cfg(32, 3)));
        assert!(check_finite(&cfg(5, 2)));
    }

    #[test]
    fn finiteness_with_wider_wake_window() {
        // gcd(32, 4) = 4 > W = 2: two residue classes never meet a wake slot.
        let c = DutyCycleConfig::general(32, 2, 2, 1).unwrap();
        assert!(!check_finite(&c));
        // gcd(12, 9) = 3 = W: every class has a wake offset.
        let c = DutyCycleConfig::general(12, 3, 6, 1).unwrap();
        assert!(check_finite(&c));
        assert!(crate::oracle::build_phase_table(12, 3, 6).unwrap().all_received());
        assert!(!crate::oracle::build_phase_table(32, 2, 2).unwrap().all_received());
    }

    #[test]
    fn worst_arrival_examples() {
        assert_eq!(worst_arrival(&cfg(32, 2)).unwrap(), 30);
        assert_eq!(worst_arrival(&cfg(5, 2)).unwrap(), 3);
        assert!(matches!(worst_arrival(&cfg(32, 3)), Err(Error::NotFinite { gcd: 4, .. })));
        assert_eq!(
            worst_arrival(&cfg(2, 2)),
            Err(Error::DegenerateConfig { c_l: 2, s: 2 })
        );
        let wide = DutyCycleConfig::general(5, 2, 2, 1).unwrap();
        assert_eq!(worst_arrival(&wide), Err(Error::UnsupportedWake(2)));
    }

    #[test]
    fn worst_delay_examples() {
        assert_eq!(worst_delay(&cfg(32, 2)).unwrap(), 94);
        assert_eq!(worst_delay(&cfg(5, 2)).unwrap(), 13);
        for c_l in 2..40 {
            assert_eq!(worst_delay(&cfg(c_l, 0)).unwrap(), c_l);
        }
        assert_eq!(worst_delay(&cfg(u64::MAX - 1, 2)), Err(Error::Overflow));
    }

    #[test]
    fn success_probability_examples() {
        assert_eq!(success_probability(32, 1).unwrap(), 1.0);
        assert_eq!(success_probability(7, 1).unwrap(), 1.0);
        assert_eq!(success_probability(32, 2).unwrap(), 0.96875);
        assert!((success_probability(32, 32).unwrap() - 0.373_73).abs() < 5e-6);
        assert!(success_probability(1, 2).is_err());
        assert!(success_probability(4, 0).is_err());
    }

    #[test]
    fn expected_worst_delay_examples() {
        let c = cfg(32, 2);
        assert_eq!(expected_worst_delay(&c, Truncation::ClosedForm).unwrap(), 94.0);
        assert_eq!(expected_worst_delay(&c, Truncation::Series(1)).unwrap(), 94.0);

        let n32 = c.with_sensors(32).unwrap();
        let closed = expected_worst_delay(&n32, Truncation::ClosedForm).unwrap();
        assert!((closed - 251.52).abs() < 0.01, "{closed}");
        let series = expected_worst_delay(&n32, Truncation::Series(10_000)).unwrap();
        assert!(rel_err(series, closed) < 1e-6);

        let n4 = c.with_sensors(4).unwrap();
        let closed = expected_worst_delay(&n4, Truncation::ClosedForm).unwrap();
        assert!((closed - 103.39).abs() < 0.01, "{closed}");

        assert!(expected_worst_delay(&n4, Truncation::Series(0)).is_err());
    }

    #[test]
    fn average_delay_examples() {
        let c = cfg(5, 2);
        assert_eq!(average_delay_over_phases(&c, AverageMode::CollisionFree).unwrap(), 7.0);
        let two = c.with_sensors(2).unwrap();
        let with = average_delay_over_phases(&two, AverageMode::WithCollisions).unwrap();
        assert!((with - 7.0 / 0.8).abs() < 1e-12);
        assert_eq!(
            average_delay_over_phases(&cfg(32, 0), AverageMode::CollisionFree).unwrap(),
            16.5
        );
    }

    #[test]
    fn average_delay_matches_oracle_table_mean() {
        for c_l in 2..=64u64 {
            for s in 0..c_l {
                let c = cfg(c_l, s);
                if !check_finite(&c) {
                    continue;
                }
                let table = oracle::build_phase_table(c_l, 1, s).unwrap();
                let closed = average_delay_over_phases(&c, AverageMode::CollisionFree).unwrap();
                assert_eq!(Some(closed), table.mean_delay(), "c_l={c_l} s={s}");
            }
        }
    }

    #[test]
    fn power_saving_examples() {
        assert!((power_saving_ratio(1, 2).unwrap() - 66.7).abs() < 0.05);
        assert!((power_saving_ratio(1, 30).unwrap() - 96.77).abs() < 0.005);
        assert_eq!(power_saving_ratio(1, 0).unwrap(), 0.0);
        assert!(power_saving_ratio(0, 3).is_err());
    }

    #[test]
    fn ccr_examples() {
        let v = [94.0, 218.0, 962.0];
        assert_eq!(ccr(&v, &v).unwrap(), 100.0);
        let r = ccr(&[94.0], &[96.0]).unwrap();
        assert!((r - 97.92).abs() < 0.005);
        assert_eq!(ccr(&[], &[1.0]), Err(Error::EmptyInput));
        assert_eq!(ccr(&[1.0], &[]), Err(Error::EmptyInput));
        assert_eq!(ccr(&[1.0], &[1.0, -1.0]), Err(Error::ZeroDenominator));
    }

    #[test]
    fn analyze_worked_example() {
        let a = analyze(&cfg(32, 2)).unwrap();
        assert!(a.finite);
        assert_eq!(a.t_max, Some(30));
        assert_eq!(a.c_l_min, Some(2));
        assert_eq!(a.n_sleep_min, Some(31));
        assert_eq!(a.w_delay, Some(94));
        assert_eq!(a.wait_after_arrival, Some(64));
        assert_eq!(a.expected_worst_delay, Some(94.0));

        let a = analyze(&cfg(32, 3)).unwrap();
        assert!(!a.finite);
        assert_eq!(a.w_delay, None);

        let a = analyze(&cfg(5, 2).with_sensors(2).unwrap()).unwrap();
        assert_eq!(a.w_delay, Some(13));
        assert!((a.expected_worst_delay.unwrap() - 16.25).abs() < 1e-12);
    }

    #[test]
    fn closed_form_n_sleep_matches_solver() {
        for c_l in 2..=64u64 {
            for s in 0..c_l {
                let c = cfg(c_l, s);
                if let Ok(wc) = worst_case(&c) {
                    let sol = cycle::solve_min_cycles(wc.t_max, c_l, 1, s).unwrap();
                    assert_eq!((sol.c_min, sol.n_sleep_min), (wc.c_l_min, wc.n_sleep_min));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn probabilities_are_complementary(c_l in 2u64..=256, n in 1u64..=256) {
            let ps = success_probability(c_l, n).unwrap();
            let pc = collision_probability(c_l, n).unwrap();
            prop_assert!(ps > 0.0 && ps <= 1.0);
            prop_assert_eq!(ps + pc, 1.0);
            prop_assert!(success_probability(c_l, n + 1).unwrap() <= ps);
        }

        #[test]
        fn series_rises_to_closed_form(n in 1u64..=32, terms in 1u64..200, s_idx in 0usize..3) {
            let s = [2u64, 6, 30][s_idx];
            let c = cfg(32, s).with_sensors(n).unwrap();
            let a = expected_worst_delay(&c, Truncation::Series(terms)).unwrap();
            let b = expected_worst_delay(&c, Truncation::Series(terms + 1)).unwrap();
            let closed = expected_worst_delay(&c, Truncation::ClosedForm).unwrap();
            prop_assert!(a <= b);
            prop_assert!(b <= closed * (1.0 + 1e-12));
        }

        #[test]
        fn worst_delay_increases_with_sleep(c_l in 3u64..=128, s1 in 0u64..128, s2 in 0u64..128) {
            prop_assume!(s1 < s2);
            let (a, b) = (cfg(c_l, s1), cfg(c_l, s2));
            if let (Ok(d1), Ok(d2)) = (worst_delay(&a), worst_delay(&b)) {
                prop_assert!(d1 < d2);
            }
            prop_assert!(power_saving_ratio(1, s1).unwrap() < power_saving_ratio(1, s2).unwrap());
        }

        #[test]
        fn expected_not_below_worst(c_l in 2u64..=64, s in 0u64..64, n in 1u64..=64) {
            let c = cfg(c_l, s).with_sensors(n).unwrap();
            if let Ok(w) = worst_delay(&c) {
                let e = expected_worst_delay(&c, Truncation::ClosedForm).unwrap();
                if n == 1 {
                    prop_assert_eq!(e, w as f64);
                } else {
                    prop_assert!(e > w as f64);
                }
            }
        }
    }
}
