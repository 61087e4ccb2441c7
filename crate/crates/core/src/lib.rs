//! Worst-case delivery delay for tire-pressure sensors reporting to a
//! duty-cycled gateway.
//!
//! Each sensor transmits once every `C_L` slots at its own phase; the
//! gateway listens for `W` slots and then sleeps for `S`. This crate
//! answers whether every sensor is eventually heard, how long the unluckiest
//! one waits, and what collisions between `N` sensors add on top:
//!
//! * [`cycle`]: gcd, Bézout coefficients and the minimal-cycle congruence.
//! * [`analytics`]: closed forms for the worst phase, worst delay, collision
//!   probability, expected worst delay, power saving and CCR.
//! * [`oracle`]: exhaustive slot walking that checks the closed forms.
//! * [`sim`]: seeded Monte Carlo with collisions and re-activation.
//! * [`planner`]: longest sleep meeting a delay budget.
//! * [`frame`]: the 10-byte sensor frame codec.
//! * [`experiment`] and [`cli`]: sweeps, datasets and the `tpms-delay` binary.
//!
//! ```
//! use tpms_delay::analytics::{self, DutyCycleConfig};
//!
//! let config = DutyCycleConfig::new(32, 2).unwrap();
//! assert_eq!(analytics::worst_arrival(&config).unwrap(), 30);
//! assert_eq!(analytics::worst_delay(&config).unwrap(), 94);
//! ```

pub mod analytics;
pub mod cli;
pub mod cycle;
pub mod error;
pub mod experiment;
pub mod frame;
pub mod oracle;
pub mod planner;
pub mod sim;

pub use analytics::{DelayAnalysis, DutyCycleConfig};
pub use error::{Error, Result};
