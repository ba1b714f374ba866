//! Configuration-driven execution behind the `zeno-chain` binary.

pub mod config;
pub mod output;
pub mod scenario;
pub mod verify;

pub use config::{ConfigError, OutputFormat, ScenarioKind, ScenarioSpec, Sweep, SweepVariable};
pub use scenario::{convergence_scan, execute, run_scenario, sweep, ConvergenceScan, Evaluated, ResultRow};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ZENO_CHAIN_OUT_DIR";
