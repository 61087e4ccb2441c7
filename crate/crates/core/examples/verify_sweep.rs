//! Exhaustive check of the closed forms against slot walking, plus a
//! deliberately broken model to show mismatches are caught.
//!
//! ```text
//! cargo run --release --example verify_sweep -- 64
//! ```

use tpms_delay::experiment;

fn main() -> tpms_delay::Result<()> {
    let max_cl: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(64);

    let clean = experiment::verify_range(max_cl, false)?;
    println!(
        "C_L <= {max_cl}: {} configurations, {} finite, {} mismatches",
        clean.checked,
        clean.finite,
        clean.mismatches.len()
    );

    let faulty = experiment::verify_range(max_cl.min(8), true)?;
    println!("with an off-by-one worst delay: {} mismatches", faulty.mismatches.len());
    if let Some(first) = faulty.mismatches.first() {
        println!("  first: C_L={} S={} w_delay_match={}", first.c_l, first.s, first.w_delay_match);
    }
    Ok(())
}
