//! Evaluation sweeps, dataset I/O and the exhaustive verification run.
//!
//! # Dataset schema
//!
//! CSV columns, in order:
//!
//! ```text
//! s,n,cl,trials,analytic_worst,analytic_expected,analytic_avg,sim_worst,
//! sim_expected,sim_expected_ci,sim_avg,power_saving_pct,
//! analytic_worst_sec,analytic_expected_sec,analytic_avg_sec,
//! sim_worst_sec,sim_expected_sec,sim_avg_sec
//! ```
//!
//! The first twelve columns are in slots (percent for `power_saving_pct`);
//! the `_sec` columns repeat the delay columns multiplied by the slot
//! duration. Reals are printed with four decimals. Analytic columns of a
//! schedule without a finite worst case hold `n/a`.
//!
//! The JSON form is `{"c_l", "trials", "base_seed", "slot_duration", "rows"}`
//! where each row carries the same field names, with `null` for `n/a`.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{self, AverageMode, DutyCycleConfig, Truncation};
use crate::error::{Error, Result};
use crate::oracle::{self, VerificationReport};
use crate::sim::{self, ExperimentOptions};

pub const CSV_COLUMNS: [&str; 18] = [
    "s",
    "n",
    "cl",
    "trials",
    "analytic_worst",
    "analytic_expected",
    "analytic_avg",
    "sim_worst",
    "sim_expected",
    "sim_expected_ci",
    "sim_avg",
    "power_saving_pct",
    "analytic_worst_sec",
    "analytic_expected_sec",
    "analytic_avg_sec",
    "sim_worst_sec",
    "sim_expected_sec",
    "sim_avg_sec",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub s_values: Vec<u64>,
    pub n_values: Vec<u64>,
    pub c_l: u64,
    pub trials: u64,
    pub base_seed: u64,
    pub slot_duration: f64,
    /// Run schedules with unreachable phases; analytic columns become `n/a`.
    pub allow_infinite: bool,
    pub parallel: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            s_values: vec![2, 6, 30],
            n_values: (4..=32).step_by(4).collect(),
            c_l: 32,
            trials: 10_000,
            base_seed: 1,
            slot_duration: 1.0,
            allow_infinite: false,
            parallel: true,
        }
    }
}

impl SweepSpec {
    fn configs(&self) -> Result<Vec<DutyCycleConfig>> {
        if self.s_values.is_empty() || self.n_values.is_empty() {
            return Err(Error::InvalidArgument("sweep needs at least one S and one N".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        let mut out = Vec::new();
        for &s in &self.s_values {
            let base = DutyCycleConfig::new(self.c_l, s)?.with_slot_duration(self.slot_duration)?;
            if !self.allow_infinite {
                analytics::worst_delay(&base)?;
            }
            for &n in &self.n_values {
                out.push(base.with_sensors(n)?);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s: u64,
    pub n: u64,
    pub cl: u64,
    pub trials: u64,
    pub analytic_worst: Option<f64>,
    pub analytic_expected: Option<f64>,
    pub analytic_avg: Option<f64>,
    pub sim_worst: f64,
    pub sim_expected: f64,
    pub sim_expected_ci: f64,
    pub sim_avg: f64,
    pub power_saving_pct: f64,
    pub analytic_worst_sec: Option<f64>,
    pub analytic_expected_sec: Option<f64>,
    pub analytic_avg_sec: Option<f64>,
    pub sim_worst_sec: f64,
    pub sim_expected_sec: f64,
    pub sim_avg_sec: f64,
}

impl SweepRow {
    /// `(analytic, simulated)` for `worst`, `expected` or `avg`.
    pub fn metric(&self, name: &str) -> Result<(Option<f64>, f64)> {
        match name {
            "worst" => Ok((self.analytic_worst, self.sim_worst)),
            "expected" => Ok((self.analytic_expected, self.sim_expected)),
            "avg" => Ok((self.analytic_avg, self.sim_avg)),
            other => Err(Error::InvalidArgument(format!(
                "unknown metric `{other}` (expected worst, expected or avg)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub c_l: u64,
    pub trials: u64,
    pub base_seed: u64,
    pub slot_duration: f64,
    pub rows: Vec<SweepRow>,
}

fn sweep_row(config: &DutyCycleConfig, spec: &SweepSpec) -> Result<SweepRow> {
    let options = ExperimentOptions { parallel: spec.parallel, max_slots: None };
    let agg = sim::run_experiment_with(config, spec.trials, spec.base_seed, options)?;

    let finite = analytics::worst_delay(config).is_ok();
    let analytic_worst = finite.then(|| analytics::worst_delay(config).map(|d| d as f64)).transpose()?;
    let analytic_expected = finite
        .then(|| analytics::expected_worst_delay(config, Truncation::ClosedForm))
        .transpose()?;
    let analytic_avg = finite
        .then(|| analytics::average_delay_over_phases(config, AverageMode::WithCollisions))
        .transpose()?;
    let secs = |v: f64| config.to_seconds(v);

    Ok(SweepRow {
        s: config.s(),
        n: config.n_sensors(),
        cl: config.c_l(),
        trials: spec.trials,
        analytic_worst,
        analytic_expected,
        analytic_avg,
        sim_worst: agg.worst_delay as f64,
        sim_expected: agg.expected_worst_delay,
        sim_expected_ci: agg.confidence_halfwidth,
        sim_avg: agg.average_delay,
        power_saving_pct: agg.power_saving_ratio,
        analytic_worst_sec: analytic_worst.map(secs),
        analytic_expected_sec: analytic_expected.map(secs),
        analytic_avg_sec: analytic_avg.map(secs),
        sim_worst_sec: secs(agg.worst_delay as f64),
        sim_expected_sec: secs(agg.expected_worst_delay),
        sim_avg_sec: secs(agg.average_delay),
    })
}

/// Runs every `(S, N)` cell, ordered by `S` then `N` as given.
pub fn run_sweep(spec: &SweepSpec) -> Result<Dataset> {
    let rows = spec
        .configs()?
        .iter()
        .map(|c| sweep_row(c, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        c_l: spec.c_l,
        trials: spec.trials,
        base_seed: spec.base_seed,
        slot_duration: spec.slot_duration,
        rows,
    })
}

fn fmt_real(v: f64) -> String {
    format!("{v:.4}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), fmt_real)
}

pub fn write_csv<W: Write>(dataset: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Dataset(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in &dataset.rows {
        w.write_record([
            r.s.to_string(),
            r.n.to_string(),
            r.cl.to_string(),
            r.trials.to_string(),
            fmt_opt(r.analytic_worst),
            fmt_opt(r.analytic_expected),
            fmt_opt(r.analytic_avg),
            fmt_real(r.sim_worst),
            fmt_real(r.sim_expected),
            fmt_real(r.sim_expected_ci),
            fmt_real(r.sim_avg),
            fmt_real(r.power_saving_pct),
            fmt_opt(r.analytic_worst_sec),
            fmt_opt(r.analytic_expected_sec),
            fmt_opt(r.analytic_avg_sec),
            fmt_real(r.sim_worst_sec),
            fmt_real(r.sim_expected_sec),
            fmt_real(r.sim_avg_sec),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Dataset(e.to_string()))
}

pub fn write_json<W: Write>(dataset: &Dataset, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, dataset).map_err(|e| Error::Dataset(e.to_string()))?;
    writeln!(out).map_err(|e| Error::Dataset(e.to_string()))
}

fn parse_cell(raw: &str, column: &str) -> Result<Option<f64>> {
    if raw == "n/a" {
        return Ok(None);
    }
    raw.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::Dataset(format!("column `{column}`: cannot parse `{raw}`")))
}

/// Reads a dataset written by [`write_csv`] or [`write_json`].
///
/// CSV carries no header metadata, so `c_l`, `trials` and `base_seed` come
/// from the first row (and 0 for the seed); `slot_duration` is recovered
/// from the seconds columns.
pub fn read_dataset<R: Read>(mut input: R) -> Result<Dataset> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| Error::Dataset(e.to_string()))?;
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(&text).map_err(|e| Error::Dataset(e.to_string()));
    }

    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Dataset(e.to_string()))?.clone();
    if headers.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Error::Dataset(format!("unexpected CSV header: {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Dataset(e.to_string()))?;
        let cell = |i: usize| parse_cell(&record[i], CSV_COLUMNS[i]);
        let int = |i: usize| {
            record[i]
                .parse::<u64>()
                .map_err(|_| Error::Dataset(format!("column `{}`: cannot parse `{}`", CSV_COLUMNS[i], &record[i])))
        };
        let req = |i: usize| cell(i)?.ok_or_else(|| Error::Dataset(format!("column `{}` is n/a", CSV_COLUMNS[i])));
        rows.push(SweepRow {
            s: int(0)?,
            n: int(1)?,
            cl: int(2)?,
            trials: int(3)?,
            analytic_worst: cell(4)?,
            analytic_expected: cell(5)?,
            analytic_avg: cell(6)?,
            sim_worst: req(7)?,
            sim_expected: req(8)?,
            sim_expected_ci: req(9)?,
            sim_avg: req(10)?,
            power_saving_pct: req(11)?,
            analytic_worst_sec: cell(12)?,
            analytic_expected_sec: cell(13)?,
            analytic_avg_sec: cell(14)?,
            sim_worst_sec: req(15)?,
            sim_expected_sec: req(16)?,
            sim_avg_sec: req(17)?,
        });
    }
    let first = rows.first();
    Ok(Dataset {
        c_l: first.map_or(0, |r| r.cl),
        trials: first.map_or(0, |r| r.trials),
        base_seed: 0,
        slot_duration: first
            .filter(|r| r.sim_expected != 0.0)
            .map_or(1.0, |r| r.sim_expected_sec / r.sim_expected),
        rows,
    })
}

/// CCR of one metric over every row with an analytic value.
pub fn dataset_ccr(dataset: &Dataset, metric: &str) -> Result<f64> {
    let mut analytic = Vec::new();
    let mut measured = Vec::new();
    for row in &dataset.rows {
        if let (Some(a), m) = row.metric(metric)? {
            analytic.push(a);
            measured.push(m);
        }
    }
    analytics::ccr(&analytic, &measured)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub max_cl: u64,
    pub checked: u64,
    pub finite: u64,
    pub mismatches: Vec<VerificationReport>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Oracle-vs-closed-form check of every `(C_L, S)` with `2 <= C_L <= max_cl`
/// and `S < C_L`. With `inject_fault` the closed-form worst delay is
/// deliberately off by one, which must surface as mismatches.
pub fn verify_range(max_cl: u64, inject_fault: bool) -> Result<VerifySummary> {
    if max_cl < 2 {
        return Err(Error::InvalidArgument(format!("max C_L must be at least 2, got {max_cl}")));
    }
    let pairs: Vec<(u64, u64)> = (2..=max_cl).flat_map(|c| (0..c).map(move |s| (c, s))).collect();
    let reports = pairs
        .par_iter()
        .map(|&(c_l, s)| {
            if inject_fault {
                oracle::verify_with(c_l, s, |cfg| {
                    let mut wc = analytics::worst_case(cfg)?;
                    wc.w_delay += 1;
                    Ok(wc)
                })
            } else {
                oracle::verify_against_analytic(c_l, s)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let finite = pairs
        .iter()
        .filter(|&&(c, s)| DutyCycleConfig::new(c, s).is_ok_and(|cfg| analytics::check_finite(&cfg)))
        .count() as u64;
    Ok(VerifySummary {
        max_cl,
        checked: reports.len() as u64,
        finite,
        mismatches: reports.into_iter().filter(|r| !r.passed()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            s_values: vec![2, 6],
            n_values: vec![1, 4],
            trials: 200,
            base_seed: 11,
            slot_duration: 0.5,
            ..SweepSpec::default()
        }
    }

    #[test]
    fn default_spec_matches_evaluation_grid() {
        let spec = SweepSpec::default();
        assert_eq!(spec.s_values, vec![2, 6, 30]);
        assert_eq!(spec.n_values, vec![4, 8, 12, 16, 20, 24, 28, 32]);
        assert_eq!((spec.c_l, spec.trials), (32, 10_000));
    }

    #[test]
    fn sweep_rows_carry_closed_forms() {
        let data = run_sweep(&small_spec()).unwrap();
        assert_eq!(data.rows.len(), 4);
        let row = &data.rows[1];
        assert_eq!((row.s, row.n), (2, 4));
        assert_eq!(row.analytic_worst, Some(94.0));
        assert!((row.analytic_expected.unwrap() - 103.39).abs() < 0.01);
        assert_eq!(row.sim_worst_sec, row.sim_worst * 0.5);
        for r in &data.rows {
            let expected = 100.0 * r.s as f64 / (r.s + 1) as f64;
            assert_eq!(r.power_saving_pct, expected);
        }
    }

    #[test]
    fn non_finite_pairs_need_opt_in() {
        let mut spec = small_spec();
        spec.s_values = vec![3];
        assert!(matches!(run_sweep(&spec), Err(Error::NotFinite { .. })));
        spec.allow_infinite = true;
        spec.trials = 20;
        let data = run_sweep(&spec).unwrap();
        assert!(data.rows.iter().all(|r| r.analytic_worst.is_none()));
        let mut csv = Vec::new();
        write_csv(&data, &mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().contains("n/a"));
    }

    #[test]
    fn csv_and_json_round_trip_through_reader() {
        let data = run_sweep(&small_spec()).unwrap();
        let mut csv = Vec::new();
        write_csv(&data, &mut csv).unwrap();
        let back = read_dataset(csv.as_slice()).unwrap();
        assert_eq!(back.rows.len(), data.rows.len());
        assert_eq!(back.slot_duration, 0.5);
        for (a, b) in back.rows.iter().zip(&data.rows) {
            assert_eq!(a.analytic_worst, b.analytic_worst);
            assert!((a.sim_expected - b.sim_expected).abs() < 1e-4);
        }

        let mut json = Vec::new();
        write_json(&data, &mut json).unwrap();
        assert_eq!(read_dataset(json.as_slice()).unwrap(), data);
    }

    #[test]
    fn reader_rejects_foreign_header() {
        assert!(read_dataset("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn ccr_over_dataset() {
        let data = run_sweep(&small_spec()).unwrap();
        let worst = dataset_ccr(&data, "worst").unwrap();
        assert!(worst > 0.0);
        assert!(dataset_ccr(&data, "latency").is_err());
    }

    #[test]
    fn tiny_verification_passes() {
        let summary = verify_range(2, false).unwrap();
        assert_eq!(summary.checked, 2);
        assert!(summary.passed());
    }

    #[test]
    fn injected_fault_is_reported() {
        let summary = verify_range(8, true).unwrap();
        assert!(!summary.passed());
        assert_eq!(summary.mismatches.len() as u64, summary.finite);
        assert!(verify_range(1, false).is_err());
    }
}
