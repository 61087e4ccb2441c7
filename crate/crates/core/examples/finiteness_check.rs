//! Which sleep lengths leave some sensor phases unheard forever.
//!
//! ```text
//! cargo run --example finiteness_check -- 32
//! ```

use tpms_delay::analytics::{self, DutyCycleConfig};
use tpms_delay::oracle;

fn main() -> tpms_delay::Result<()> {
    let c_l: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(32);
    println!("C_L = {c_l}");
    println!("{:>3}  {:>6}  {:>8}  {:>10}", "S", "finite", "W_delay", "unheard");
    for s in 0..c_l.min(16) {
        let config = DutyCycleConfig::new(c_l, s)?;
        let table = oracle::build_phase_table(c_l, 1, s)?;
        let w_delay = analytics::worst_delay(&config).map_or("-".to_string(), |d| d.to_string());
        println!(
            "{s:>3}  {:>6}  {w_delay:>8}  {:>10}",
            analytics::check_finite(&config),
            table.never_received().len()
        );
    }
    Ok(())
}
