use rayon::prelude::*;

use crate::error::Result;
use crate::model::Objective;

use super::anneal::{anneal, AnnealSchedule, SolveTrace};
use super::init::sample_initial;
use super::step::StepController;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    pub trace: SolveTrace,
}

/// Seed of trial `index`: `base + index`.
pub fn trial_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

/// Runs `trials` independent anneals from seeded random starts, in parallel on the
/// current rayon pool. Results are in trial order regardless of scheduling.
pub fn run_trials<O: Objective + ?Sized>(
    obj: &O,
    schedule: &AnnealSchedule,
    ctrl: &StepController,
    base_seed: u64,
    trials: usize,
) -> Result<Vec<TrialOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(base_seed, t);
            let y0 = sample_initial(obj.partition(), seed);
            anneal(obj, &y0, schedule, ctrl).map(|trace| TrialOutcome { seed, trace })
        })
        .collect()
}

/// Lowest objective value wins; ties go to the lowest seed.
pub fn best_trial(outcomes: &[TrialOutcome]) -> Option<&TrialOutcome> {
    outcomes.iter().min_by(|a, b| {
        a.trace
            .solution_value
            .total_cmp(&b.trace.solution_value)
            .then(a.seed.cmp(&b.seed))
    })
}
