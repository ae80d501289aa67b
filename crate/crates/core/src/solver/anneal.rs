use crate::error::{Error, Result};
use crate::model::{BooleanSolution, ExtendedRounding, Objective, SimplexState};

use super::integrate::{integrate_to_equilibrium, EquilibriumLimits};
use super::rounding::{greedy_booleanize, round_to_extended};
use super::step::StepController;

/// Geometric cooling `T_s = γ^{s−1} T_1` plus the stopping parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    pub t1: f64,
    pub gamma: f64,
    /// Stop once the rounding distance `ε` drops below this.
    pub eps0: f64,
    pub max_temps: usize,
    pub limits: EquilibriumLimits,
    /// Stop after this many consecutive temperatures with an unchanged rounding.
    pub stall_limit: usize,
}

impl AnnealSchedule {
    pub fn new(t1: f64, gamma: f64, eps0: f64) -> Result<Self> {
        let s = AnnealSchedule {
            t1,
            gamma,
            eps0,
            max_temps: 1000,
            limits: EquilibriumLimits::default(),
            stall_limit: 5,
        };
        s.validate()?;
        Ok(s)
    }

    /// `T_1 = 3` (MAX-k-CUT defaults).
    pub fn maxcut_default() -> Self {
        AnnealSchedule::new(3.0, 0.95, 1e-3).unwrap()
    }

    /// `T_1 = 1e-4` (star-discrepancy defaults).
    pub fn stardisc_default() -> Self {
        AnnealSchedule::new(1e-4, 0.95, 1e-3).unwrap()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t1 > 0.0 && self.t1.is_finite()) {
            return Err(Error::invalid(format!(
                "t1 must be positive, got {}",
                self.t1
            )));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::invalid(format!(
                "gamma must lie in (0,1), got {}",
                self.gamma
            )));
        }
        if !(self.eps0 > 0.0) {
            return Err(Error::invalid(format!(
                "eps0 must be positive, got {}",
                self.eps0
            )));
        }
        if !(self.limits.tol_eq > 0.0) {
            return Err(Error::invalid("tol_eq must be positive"));
        }
        if self.max_temps == 0 || self.limits.max_steps == 0 || self.stall_limit == 0 {
            return Err(Error::invalid(
                "step, temperature and stall limits must be positive",
            ));
        }
        Ok(())
    }

    pub fn temperature(&self, s: usize) -> f64 {
        self.t1 * self.gamma.powi(s as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureRecord {
    pub temperature: f64,
    pub steps: usize,
    /// `‖rhs‖_∞` at the equilibrium estimate.
    pub residual: f64,
    pub converged: bool,
    /// `‖ŷ − ȳ‖_∞` for the rounding of this equilibrium.
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveFlags {
    /// `ε < ε_0` was reached.
    pub certified: bool,
    /// The temperature budget ran out before `ε < ε_0`.
    pub budget_exhausted: bool,
    /// Stopped because the rounding stopped changing.
    pub stalled: bool,
    /// Number of temperatures whose integration hit the step limit.
    pub step_limit_hits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub records: Vec<TemperatureRecord>,
    pub total_steps: usize,
    /// Last equilibrium `ȳ`.
    pub equilibrium: Vec<f64>,
    /// Its rounding `ŷ ∈ X̄`.
    pub rounding: ExtendedRounding,
    /// Greedy Boolean point `x`.
    pub solution: BooleanSolution,
    pub rounding_value: f64,
    pub solution_value: f64,
    pub flags: SolveFlags,
}

impl SolveTrace {
    pub fn temperatures_visited(&self) -> usize {
        self.records.len()
    }
}

/// Cools through `T_1, γT_1, …`, warm-starting each temperature from the previous
/// equilibrium, until the rounding distance drops below `ε_0` (or a budget or stall
/// limit triggers), then booleanizes greedily.
pub fn anneal<O: Objective + ?Sized>(
    obj: &O,
    y0: &SimplexState,
    schedule: &AnnealSchedule,
    ctrl: &StepController,
) -> Result<SolveTrace> {
    schedule.validate()?;
    let p = obj.partition();
    p.check_len(y0.as_slice())?;
    let mut ctrl = ctrl.clone();
    let mut y = y0.as_slice().to_vec();
    let mut records = Vec::new();
    let mut flags = SolveFlags::default();
    let mut last: Option<ExtendedRounding> = None;
    let mut stall = 0;

    for s in 0..schedule.max_temps {
        let t = schedule.temperature(s);
        let eq = integrate_to_equilibrium(obj, &y, t, &mut ctrl, &schedule.limits)?;
        y = eq.state;
        if !eq.converged {
            flags.step_limit_hits += 1;
        }
        let rounding = round_to_extended(p, &y);
        let eps = rounding.distance_inf(p, &y);
        records.push(TemperatureRecord {
            temperature: t,
            steps: eq.steps,
            residual: eq.residual,
            converged: eq.converged,
            epsilon: eps,
        });

        if eps < schedule.eps0 {
            flags.certified = true;
            last = Some(rounding);
            break;
        }
        // greedy is a function of ŷ alone, so an unchanged ŷ means an unchanged x
        match &last {
            Some(prev) if *prev == rounding => stall += 1,
            _ => stall = 0,
        }
        last = Some(rounding);
        if stall >= schedule.stall_limit {
            flags.stalled = true;
            break;
        }
    }
    if !flags.certified && !flags.stalled {
        flags.budget_exhausted = true;
    }

    let rounding = last.expect("at least one temperature is visited");
    let solution = greedy_booleanize(&rounding, obj);
    let rounding_value = obj.value(&rounding.to_dense(p));
    let solution_value = obj.value(&solution.to_dense(p));
    Ok(SolveTrace {
        total_steps: records.iter().map(|r| r.steps).sum(),
        records,
        equilibrium: y,
        rounding,
        solution,
        rounding_value,
        solution_value,
        flags,
    })
}
