//! Worst case for C_L = 32 and S = 2, with the per-phase delays that produce it.
//!
//! ```text
//! cargo run --example worked_example
//! ```

use tpms_delay::analytics::{self, DutyCycleConfig};
use tpms_delay::oracle;

fn main() -> tpms_delay::Result<()> {
    let config = DutyCycleConfig::new(32, 2)?;
    let wc = analytics::worst_case(&config)?;
    println!("worst arrival phase  T_max = {}", wc.t_max);
    println!("sensor cycles        C_min = {}", wc.c_l_min);
    println!("gateway cycles       N_min = {}", wc.n_sleep_min);
    println!("worst delay        W_delay = {} slots", wc.w_delay);

    let table = oracle::build_phase_table(32, 1, 2)?;
    println!("\nphase  delay  sensor cycles");
    for (i, entry) in table.entries.iter().enumerate() {
        if let Some(r) = entry.record() {
            let marker = if r.delay == wc.w_delay { "  <- worst" } else { "" };
            println!("{:>5}  {:>5}  {:>13}{marker}", i + 1, r.delay, r.c_cycles);
        }
    }
    println!("\nmean over phases: {:.2} slots", table.mean_delay().unwrap_or(f64::NAN));
    Ok(())
}
