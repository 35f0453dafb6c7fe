//! Scenario files, run reports and sweeps behind the `rocketbvp` binary.

pub mod run;
pub mod scenario;
pub mod sweep;
