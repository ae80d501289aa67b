//! The annealed integrator: variable-step forward Euler, per-temperature equilibrium
//! detection, geometric cooling, rounding into `X̄` and greedy booleanization.

mod anneal;
mod init;
mod integrate;
mod rounding;
mod step;
mod trials;

pub use anneal::{anneal, AnnealSchedule, SolveFlags, SolveTrace, TemperatureRecord};
pub use init::sample_initial;
pub use integrate::{integrate_to_equilibrium, Equilibrium, EquilibriumLimits};
pub use rounding::{greedy_booleanize, round_to_extended};
pub use step::{error_estimate, fe_step, StepChange, StepController};
pub use trials::{best_trial, run_trials, trial_seed, TrialOutcome};
