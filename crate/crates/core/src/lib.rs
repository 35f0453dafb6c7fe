//! Two-point boundary value solver for a variable-mass rocket climbing
//! through an exponential atmosphere.
//!
//! Given launch and arrival altitudes and a flight time, the trajectory is
//! found as a fixed point of a Green's-function integral operator after
//! subtracting the straight chord between the endpoints. The crate also
//! evaluates sufficient conditions for a solution to exist (an invariant
//! ball of the operator) and ships two independent solvers, RK4 shooting and
//! finite-difference Newton, for cross-validation.
//!
//! ```no_run
//! use rocketbvp::{ExhaustProfile, MassProfile, ScenarioConfig};
//!
//! let mass = MassProfile::linear_burn(1000.0, 9000.0, 50.0, 0.0, None)?;
//! let exhaust = ExhaustProfile::constant(-3000.0)?;
//! let config = ScenarioConfig::new(0.0, 60.0, 0.0, 15_000.0, mass, exhaust).with_drag(1.0, 0.75);
//! let (z, report) = rocketbvp::solver::picard_solve(&config)?;
//! println!("{} iterations, residual {:?}", report.iterations, report.final_residual);
//! # Ok::<(), rocketbvp::Error>(())
//! ```

pub mod error;
pub mod green;
pub mod model;
pub mod operator;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use model::{ExhaustProfile, MassProfile, ScenarioConfig, Side};
pub use operator::{Coefficients, Grid, GridFunction};
