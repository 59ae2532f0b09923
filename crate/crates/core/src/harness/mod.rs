//! Experiment plumbing: adversaries, hindsight comparators, regret traces,
//! decay-rate fits and the simulate/analyze drivers behind the CLI.

pub mod adversary;
pub mod experiment;
pub mod hindsight;
pub mod slope;
pub mod stream;
pub mod svg;
pub mod trace;

pub use adversary::{AdversaryConfig, AdversaryKind};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutput, LearnerKind};
pub use hindsight::{best_in_hindsight, brute_force_best, HindsightTracker};
pub use slope::{fit_slope, SlopeFit};
pub use trace::{RegretTrace, TraceRow};
