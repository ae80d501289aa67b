use crate::error::Result;
use crate::kernels::{norm_inf, rhs_into};
use crate::model::Objective;

use super::step::{error_estimate, fe_step_into, StepController};

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumLimits {
    /// Equilibrium is declared once `‖rhs(y)‖_∞ ≤ tol_eq`.
    pub tol_eq: f64,
    /// FE steps allowed at one temperature.
    pub max_steps: usize,
}

impl Default for EquilibriumLimits {
    fn default() -> Self {
        EquilibriumLimits {
            tol_eq: 1e-6,
            max_steps: 50_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub state: Vec<f64>,
    pub steps: usize,
    /// `‖rhs‖_∞` at the returned state.
    pub residual: f64,
    /// False when the step limit was hit first.
    pub converged: bool,
}

/// Integrates at fixed temperature until the first iterate whose right-hand side has
/// sup-norm at most `limits.tol_eq`, or until `limits.max_steps` FE steps.
///
/// Steps come in pairs of equal size; after each pair the controller sees the
/// extrapolation error of the pair.
pub fn integrate_to_equilibrium<O: Objective + ?Sized>(
    obj: &O,
    y0: &[f64],
    temperature: f64,
    ctrl: &mut StepController,
    limits: &EquilibriumLimits,
) -> Result<Equilibrium> {
    let p = obj.partition();
    p.check_len(y0)?;
    let n = p.len();
    let mut grad = vec![0.0; n];
    let mut y = y0.to_vec();
    let mut f = vec![0.0; n];
    let mut y_mid = vec![0.0; n];
    let mut f_mid = vec![0.0; n];
    let mut y_end = vec![0.0; n];

    rhs_into(obj, &y, temperature, &mut grad, &mut f)?;
    let mut residual = norm_inf(&f);
    let mut steps = 0;

    let done = |state: Vec<f64>, steps, residual, converged| {
        Ok(Equilibrium {
            state,
            steps,
            residual,
            converged,
        })
    };

    loop {
        if residual <= limits.tol_eq {
            return done(y, steps, residual, true);
        }
        if steps >= limits.max_steps {
            return done(y, steps, residual, false);
        }
        let h = ctrl.h;

        fe_step_into(&y, h, &f, &mut y_mid);
        steps += 1;
        rhs_into(obj, &y_mid, temperature, &mut grad, &mut f_mid)?;
        let mid_residual = norm_inf(&f_mid);
        if mid_residual <= limits.tol_eq || steps >= limits.max_steps {
            return done(y_mid, steps, mid_residual, mid_residual <= limits.tol_eq);
        }

        fe_step_into(&y_mid, h, &f_mid, &mut y_end);
        steps += 1;
        let theta = error_estimate(&y, &f, &y_end, h);
        ctrl.adjust(theta);

        std::mem::swap(&mut y, &mut y_end);
        rhs_into(obj, &y, temperature, &mut grad, &mut f)?;
        residual = norm_inf(&f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::softmax;
    use crate::model::Partition;
    use crate::polynomial::Polynomial;
    use crate::solver::sample_initial;

    fn ctrl() -> StepController {
        StepController::new(1e-5, 1.1).unwrap()
    }

    #[test]
    fn converges_to_closed_form_for_constant_gradient() {
        let p = Partition::new(vec![2]).unwrap();
        let c = 1.3;
        let f = Polynomial::linear(p, &[c, 0.0]).unwrap();
        for &t in &[0.1, 0.5, 2.0] {
            let limits = EquilibriumLimits::default();
            let eq = integrate_to_equilibrium(&f, &[0.9, 0.1], t, &mut ctrl(), &limits).unwrap();
            assert!(eq.converged);
            let expect = softmax(&[-c, 0.0], 1.0 / t).unwrap();
            assert!((eq.state[0] - expect[0]).abs() <= 1e-6);
        }
    }

    #[test]
    fn zero_objective_relaxes_to_uniform() {
        let p = Partition::new(vec![2, 3, 4]).unwrap();
        let f = Polynomial::zero(p.clone());
        let y0 = sample_initial(&p, 4);
        let eq = integrate_to_equilibrium(
            &f,
            y0.as_slice(),
            1.0,
            &mut ctrl(),
            &EquilibriumLimits::default(),
        )
        .unwrap();
        assert!(eq.converged);
        for (j, r) in p.blocks() {
            let u = 1.0 / p.block_size(j) as f64;
            assert!(eq.state[r].iter().all(|v| (v - u).abs() <= 1e-6));
        }
    }

    #[test]
    fn step_limit_is_flagged_not_an_error() {
        let p = Partition::new(vec![3]).unwrap();
        let f = Polynomial::linear(p, &[0.0, 1.0, 2.0]).unwrap();
        let limits = EquilibriumLimits {
            tol_eq: 1e-14,
            max_steps: 7,
        };
        let eq = integrate_to_equilibrium(&f, &[0.1, 0.2, 0.7], 0.5, &mut ctrl(), &limits).unwrap();
        assert!(!eq.converged);
        assert_eq!(eq.steps, 7);
    }

    #[test]
    fn trajectory_stays_interior_and_on_the_constraint() {
        let p = Partition::new(vec![3, 2, 4]).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let f = Polynomial::random(&p, 3, 15, &mut rng);
        let y0 = sample_initial(&p, 2);
        let limits = EquilibriumLimits {
            tol_eq: 0.0,
            max_steps: 2000,
        };
        let eq = integrate_to_equilibrium(&f, y0.as_slice(), 0.05, &mut ctrl(), &limits).unwrap();
        assert!(eq.state.iter().all(|&v| v > 0.0 && v < 1.0));
        assert!(p.max_sum_violation(&eq.state) <= 1e-12);
    }
}
