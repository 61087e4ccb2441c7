//! Simulated delays with colliding sensors next to the closed forms.
//!
//! ```text
//! cargo run --release --example collision_monte_carlo -- 10000
//! ```

use tpms_delay::analytics::{self, AverageMode, DutyCycleConfig, Truncation};
use tpms_delay::sim;

fn main() -> tpms_delay::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10_000);
    println!(
        "{:>3}  {:>10}  {:>16}  {:>9}  {:>10}  {:>10}  {:>9}",
        "N", "E[worst]", "sim mean worst", "avg", "sim avg", "Pr(c)", "sim Pr(c)"
    );
    for n in [1, 4, 8, 16, 32] {
        let config = DutyCycleConfig::new(32, 2)?.with_sensors(n)?;
        let agg = sim::run_experiment(&config, trials, 1)?;
        println!(
            "{n:>3}  {:>10.2}  {:>9.2} ± {:>4.2}  {:>9.2}  {:>10.2}  {:>10.4}  {:>9.4}",
            analytics::expected_worst_delay(&config, Truncation::ClosedForm)?,
            agg.expected_worst_delay,
            agg.confidence_halfwidth,
            analytics::average_delay_over_phases(&config, AverageMode::WithCollisions)?,
            agg.average_delay,
            analytics::collision_probability(32, n)?,
            agg.first_round_collision_rate,
        );
    }
    Ok(())
}
