//! The default (S, N) grid written as CSV to stdout, then summarized by CCR.
//!
//! ```text
//! cargo run --release --example evaluation_sweep > sweep.csv
//! ```

use tpms_delay::experiment::{self, SweepSpec};

fn main() -> tpms_delay::Result<()> {
    let spec = SweepSpec { trials: 2_000, ..SweepSpec::default() };
    let dataset = experiment::run_sweep(&spec)?;
    experiment::write_csv(&dataset, std::io::stdout().lock())?;
    for metric in ["worst", "expected", "avg"] {
        eprintln!("CCR {metric:>8}: {:.2}%", experiment::dataset_ccr(&dataset, metric)?);
    }
    Ok(())
}
