//! Multiple-choice polynomial programming via an annealed softmax ODE.
//!
//! Variables are grouped into blocks; each block must pick exactly one entry. The
//! solver follows `dy/dt = −y + softmax(−Φ(y); 1/T)` through a cooling schedule, rounds
//! the last equilibrium and finishes with a greedy pass.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kernels;
pub mod maxcut;
pub mod model;
pub mod polynomial;
pub mod solver;
pub mod stardisc;
pub mod validation;

pub use error::{Error, Result};
pub use model::{
    replace_block, BooleanSolution, ExtendedRounding, Objective, Partition, SimplexState,
};
pub use solver::{AnnealSchedule, SolveFlags, SolveTrace, StepController};
