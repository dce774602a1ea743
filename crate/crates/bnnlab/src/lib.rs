//! Experiment harness for BNN learning dynamics in two-player zero-sum
//! games: run matrices over {game, algorithm, noise level, step schedule,
//! seeds}, deterministic CSV traces, JSON summaries, algorithm comparisons
//! and plot-ready data.

pub mod compare;
pub mod config;
pub mod error;
pub mod figures;
pub mod plotdata;
pub mod runner;
pub mod trace;

pub use config::{AlgoSpec, ExperimentConfig, GameSpec, RawConfig};
pub use error::{HarnessError, Result};
