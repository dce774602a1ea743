//! Brown-von Neumann-Nash (BNN) learning dynamics in two-player zero-sum
//! games, under exact and noisy payoff feedback.
//!
//! The crate provides:
//!
//! - normal-form games ([`nfg`]) with the biased rock-paper-scissors family
//!   and nonstationary payoff schedules;
//! - extensive-form games ([`efg`]) with Kuhn and Leduc poker builders, reach
//!   probabilities, counterfactual values and exact exploitability;
//! - the BNN vector field, its noisy stochastic-approximation update, and
//!   replicator/regularized-replicator baselines ([`dynamics`]);
//! - Lyapunov diagnostics: the potential, its dissipation identity, bias and
//!   Jensen-gap estimation, drift checking and rate fitting ([`lyapunov`]);
//! - a tabular actor-critic realization of the extensive-form dynamics
//!   ([`bnnac`]);
//! - reference oracles used by the test suites ([`oracle`]).
//!
//! All numeric types are generic over a [`scalar::Scalar`] (`f32` or `f64`)
//! and default to `f64`.

pub mod bnnac;
pub mod dynamics;
pub mod efg;
pub mod error;
pub mod lyapunov;
pub mod nfg;
pub mod oracle;
pub mod player;
pub mod scalar;
pub mod schedule;
pub mod simplex;

pub use error::{Error, Result};
pub use player::Player;
pub use scalar::Scalar;

/// Default double-precision aliases for the core types.
pub type NormalFormGame = nfg::NormalFormGame<f64>;
pub type MixedProfile = nfg::MixedProfile<f64>;
pub type RpsParams = nfg::RpsParams<f64>;
pub type GameTree = efg::GameTree<f64>;
pub type BehaviorProfile = efg::BehaviorProfile<f64>;
pub type NoiseModel = dynamics::NoiseModel<f64>;
pub type StepSchedule = dynamics::StepSchedule<f64>;
