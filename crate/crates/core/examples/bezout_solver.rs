//! Bézout coefficients and the minimal cycle counts for each arrival phase.
//!
//! ```text
//! cargo run --example bezout_solver -- 32 2
//! ```

use tpms_delay::cycle;

fn main() -> tpms_delay::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>());
    let c_l = args.next().and_then(Result::ok).unwrap_or(32);
    let s = args.next().and_then(Result::ok).unwrap_or(2);

    let t = cycle::bezout(c_l, 1 + s)?;
    println!("{} * {c_l} + {} * {} = {}", t.alpha, t.beta, 1 + s, t.g);

    println!("\nphase  sensor cycles  gateway cycles");
    for n in 1..=c_l {
        match cycle::solve_min_cycles(n, c_l, 1, s) {
            Ok(sol) => println!("{n:>5}  {:>13}  {:>14}", sol.c_min, sol.n_sleep_min),
            Err(e) => println!("{n:>5}  {e}"),
        }
    }
    Ok(())
}
