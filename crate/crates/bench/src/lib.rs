//! Scenario definitions, drivers, and result emission for the fibril
//! beam engine.
//!
//! This crate is the applied layer on top of the mechanics stack: it
//! maps declarative TOML scenario files onto solver models, marches
//! them through static load paths or dynamic time intervals, and emits
//! per-step CSV records plus centerline geometry dumps.  Built-in
//! generators produce the standard scenarios (cantilever arc
//! refinement, rope twisting, helical spring release, crossing
//! fibers), and the studies module layers mesh-refinement analysis on
//! top.  Everything is deterministic: the same config yields the same
//! bytes.

pub mod config;
pub mod emit;
pub mod fd;
pub mod norms;
pub mod run;
pub mod scenarios;
pub mod studies;
pub mod translate;

pub use config::{ConfigError, ScenarioConfig};
pub use run::{run_scenario, BenchError, RunOutcome};
pub use translate::{build, BuildError, RunPlan};
