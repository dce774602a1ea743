//! Reference oracles used by the test suites.
//!
//! Everything here recomputes game quantities along independent code paths:
//! support enumeration for normal-form equilibria, exhaustive root-to-leaf
//! enumeration for counterfactual values, pure-strategy enumeration for best
//! responses, and a sequence-form linear program for extensive-form
//! equilibria. None of it shares logic with the implementations it checks.

mod efg_enum;
mod linalg;
mod lp;
mod seqform;
mod support_enum;

pub use efg_enum::{
    best_response_by_enumeration, cf_values_by_enumeration, expected_value_by_walk,
    nash_conv_by_enumeration,
};
pub use linalg::solve_linear;
pub use lp::{solve_lp, LpConstraint, LpProblem, LpSolution};
pub use seqform::{solve_zero_sum_efg, SequenceForm};
pub use support_enum::{enumerate_equilibria, find_equilibrium};
