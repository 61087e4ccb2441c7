//! Exact integer arithmetic behind schedule feasibility.
//!
//! A sensor that first transmits in slot `n` is heard again at
//! `n + k * C_L`; the gateway listens in slot `t` iff `(t - 1) mod (W + S) < W`.
//! With `W = 1` a reception needs `n + k * C_L = 1 + m * (W + S)`, a linear
//! congruence in `k` that is solvable for every `n` exactly when `C_L` and
//! `W + S` are coprime.

use serde::Serialize;

use crate::error::{Error, Result};

/// `alpha * a + beta * b = g` with `g = gcd(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BezoutTriple {
    pub g: u64,
    pub alpha: i64,
    pub beta: i64,
}

impl BezoutTriple {
    /// Re-evaluates the identity in 128-bit arithmetic.
    pub fn holds_for(&self, a: u64, b: u64) -> bool {
        i128::from(self.alpha) * i128::from(a) + i128::from(self.beta) * i128::from(b)
            == i128::from(self.g)
    }
}

/// Least non-negative `(c_min, n_sleep_min)` with
/// `n + c_min * C_L = W + n_sleep_min * (W + S)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinCycleSolution {
    /// Sensor duty-cycles waited before the transmission meets a wake slot.
    pub c_min: u64,
    /// Gateway wake/sleep cycles elapsed at reception.
    pub n_sleep_min: u64,
}

fn require_positive(a: u64, b: u64) -> Result<()> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidArgument(format!(
            "gcd operands must be positive, got ({a}, {b})"
        )));
    }
    Ok(())
}

fn euclid(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd(a: u64, b: u64) -> Result<u64> {
    require_positive(a, b)?;
    Ok(euclid(a, b))
}

/// Extended Euclid. Operands must fit in `i64`.
pub fn bezout(a: u64, b: u64) -> Result<BezoutTriple> {
    require_positive(a, b)?;
    let to_signed = |v: u64| i64::try_from(v).map_err(|_| Error::Overflow);
    let (mut old_r, mut r) = (to_signed(a)?, to_signed(b)?);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);

    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        // |s|, |t| stay bounded by b/g and a/g, so these cannot overflow.
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }

    Ok(BezoutTriple {
        g: old_r as u64,
        alpha: old_s,
        beta: old_t,
    })
}

/// Inverse of `a` modulo `m` for coprime `a`, `m` (with `m >= 1`).
pub(crate) fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    if m == 1 {
        return Ok(0);
    }
    let reduced = a % m;
    let triple = bezout(reduced.max(1), m)?;
    if reduced == 0 || triple.g != 1 {
        return Err(Error::InvalidArgument(format!("{a} is not invertible mod {m}")));
    }
    Ok(triple.alpha.rem_euclid(m as i64) as u64)
}

/// Solves for the least number of duty-cycles after which an arrival at
/// phase `n` lands on the gateway's wake slot.
///
/// Only the single-slot wake window (`w == 1`) is handled in closed form;
/// other wake lengths go through [`crate::oracle`]. When `gcd(C_L, 1 + S)`
/// is not 1 the phase may still be reachable, in which case its solution is
/// returned; otherwise [`Error::NotFinite`].
pub fn solve_min_cycles(n: u64, c_l: u64, w: u64, s: u64) -> Result<MinCycleSolution> {
    if w != 1 {
        return Err(Error::UnsupportedWake(w));
    }
    if c_l < 2 {
        return Err(Error::InvalidArgument(format!("C_L must be at least 2, got {c_l}")));
    }
    if n == 0 || n > c_l {
        return Err(Error::InvalidPhase { n, c_l });
    }
    let period = w.checked_add(s).ok_or(Error::Overflow)?;
    let g = euclid(c_l, period);

    // Need k * C_L ≡ (W - n) (mod P). Solvable iff g | (n - W).
    let offset = n - w;
    if !offset.is_multiple_of(g) {
        return Err(Error::NotFinite { c_l, period, gcd: g });
    }
    let reduced_mod = period / g;
    let target = (reduced_mod - (offset / g) % reduced_mod) % reduced_mod;
    let inv = mod_inverse((c_l / g) % reduced_mod, reduced_mod)?;
    let c_min = ((u128::from(target) * u128::from(inv)) % u128::from(reduced_mod)) as u64;

    let reception = c_min
        .checked_mul(c_l)
        .and_then(|v| v.checked_add(n))
        .ok_or(Error::Overflow)?;
    debug_assert_eq!((reception - w) % period, 0);
    Ok(MinCycleSolution {
        c_min,
        n_sleep_min: (reception - w) / period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Walks n, n + C_L, ... until a wake slot (W = 1) and counts the steps.
    fn slot_walk(n: u64, c_l: u64, s: u64) -> Option<(u64, u64)> {
        let period = 1 + s;
        (0..=period).find_map(|k| {
            let t = n + k * c_l;
            (t - 1).is_multiple_of(period).then_some((k, (t - 1) / period))
        })
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(32, 3).unwrap(), 1);
        assert_eq!(gcd(32, 4).unwrap(), 4);
        assert_eq!(gcd(7, 7).unwrap(), 7);
        assert_eq!(gcd(4, 32).unwrap(), gcd(32, 4).unwrap());
    }

    #[test]
    fn gcd_rejects_zero() {
        assert!(matches!(gcd(0, 5), Err(Error::InvalidArgument(_))));
        assert!(matches!(gcd(5, 0), Err(Error::InvalidArgument(_))));
        assert!(bezout(0, 3).is_err());
    }

    #[test]
    fn bezout_examples() {
        let t = bezout(3, 32).unwrap();
        assert_eq!(t.g, 1);
        assert!(t.holds_for(3, 32));
        // 11 * 3 - 1 * 32 = 1 is one valid pair.
        assert_eq!(11 * 3 - 32, 1);

        let t = bezout(5, 5).unwrap();
        assert_eq!(t.g, 5);
        assert!(t.holds_for(5, 5));

        let t = bezout(32, 4).unwrap();
        assert_eq!(t.g, 4);
        assert!(t.holds_for(32, 4));
    }

    #[test]
    fn min_cycles_examples() {
        assert_eq!(
            solve_min_cycles(30, 32, 1, 2).unwrap(),
            MinCycleSolution { c_min: 2, n_sleep_min: 31 }
        );
        assert_eq!(
            solve_min_cycles(1, 32, 1, 2).unwrap(),
            MinCycleSolution { c_min: 0, n_sleep_min: 0 }
        );
        assert_eq!(
            solve_min_cycles(3, 5, 1, 2).unwrap(),
            MinCycleSolution { c_min: 2, n_sleep_min: 4 }
        );
    }

    #[test]
    fn min_cycles_errors() {
        assert_eq!(
            solve_min_cycles(2, 32, 1, 3),
            Err(Error::NotFinite { c_l: 32, period: 4, gcd: 4 })
        );
        // Reachable phase of a non-coprime schedule still resolves.
        assert_eq!(solve_min_cycles(1, 32, 1, 3).unwrap().c_min, 0);
        assert_eq!(solve_min_cycles(0, 32, 1, 2), Err(Error::InvalidPhase { n: 0, c_l: 32 }));
        assert_eq!(solve_min_cycles(33, 32, 1, 2), Err(Error::InvalidPhase { n: 33, c_l: 32 }));
        assert_eq!(solve_min_cycles(1, 32, 2, 2), Err(Error::UnsupportedWake(2)));
    }

    #[test]
    fn always_awake_gateway() {
        for n in 1..=16 {
            let sol = solve_min_cycles(n, 16, 1, 0).unwrap();
            assert_eq!(sol, MinCycleSolution { c_min: 0, n_sleep_min: n - 1 });
        }
    }

    #[test]
    fn matches_slot_walk_exhaustively() {
        for c_l in 2..=64u64 {
            for s in 0..c_l {
                for n in 1..=c_l {
                    let walked = slot_walk(n, c_l, s);
                    match solve_min_cycles(n, c_l, 1, s) {
                        Ok(sol) => assert_eq!(Some((sol.c_min, sol.n_sleep_min)), walked),
                        Err(Error::NotFinite { .. }) => assert_eq!(walked, None),
                        Err(e) => panic!("unexpected {e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn residue_classes_share_cycle_count() {
        // For coprime (C_L, 1+S) every count 0..=S occurs, and the phases
        // sharing a count are exactly n ≡ 1 - θ (mod 1+S), θ = c·C_L mod (1+S).
        for c_l in 2..=64u64 {
            for s in 0..c_l {
                let period = 1 + s;
                if euclid(c_l, period) != 1 {
                    continue;
                }
                let mut seen = vec![false; period as usize];
                for n in 1..=c_l {
                    let c = solve_min_cycles(n, c_l, 1, s).unwrap().c_min;
                    assert!(c <= s);
                    seen[c as usize] = true;
                    let theta = (c * c_l) % period;
                    assert_eq!((n - 1 + theta) % period, 0, "c_l={c_l} s={s} n={n}");
                }
                assert!(seen.iter().all(|&v| v));
            }
        }
    }

    proptest! {
        #[test]
        fn bezout_identity(a in 1u64..=512, b in 1u64..=512) {
            let t = bezout(a, b).unwrap();
            prop_assert_eq!(t.g, gcd(a, b).unwrap());
            prop_assert!(t.holds_for(a, b));
            prop_assert_eq!(a % t.g, 0);
            prop_assert_eq!(b % t.g, 0);
        }

        #[test]
        fn bezout_large_operands(a in 1u64..=(i64::MAX as u64), b in 1u64..=(i64::MAX as u64)) {
            let t = bezout(a, b).unwrap();
            prop_assert!(t.holds_for(a, b));
        }

        #[test]
        fn min_cycle_equation_and_bound(c_l in 2u64..=64, s_frac in 0.0f64..1.0, n_frac in 0.0f64..1.0) {
            let s = ((c_l as f64) * s_frac) as u64 % c_l;
            let n = 1 + ((c_l as f64) * n_frac) as u64 % c_l;
            prop_assume!(euclid(c_l, 1 + s) == 1);
            let sol = solve_min_cycles(n, c_l, 1, s).unwrap();
            prop_assert_eq!(n + sol.c_min * c_l, 1 + sol.n_sleep_min * (1 + s));
            prop_assert!(sol.c_min <= s);
        }
    }
}
