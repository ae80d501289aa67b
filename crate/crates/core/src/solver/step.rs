//! Forward Euler with an extrapolation-based error estimate and two-way step control.

use crate::error::{Error, Result};

/// One forward Euler step, `y + h·F`.
pub fn fe_step(y: &[f64], h: f64, f: &[f64]) -> Vec<f64> {
    y.iter().zip(f).map(|(yi, fi)| yi + h * fi).collect()
}

pub(crate) fn fe_step_into(y: &[f64], h: f64, f: &[f64], out: &mut [f64]) {
    for ((o, yi), fi) in out.iter_mut().zip(y).zip(f) {
        *o = yi + h * fi;
    }
}

/// `θ = ‖ỹ − y_curr‖₂` where `ỹ = y_prev2 + 2h·F_prev2` is the single double-length
/// step over the same interval as the two steps that produced `y_curr`.
/// `θ/2` estimates the per-step truncation error.
pub fn error_estimate(y_prev2: &[f64], f_prev2: &[f64], y_curr: &[f64], h: f64) -> f64 {
    y_prev2
        .iter()
        .zip(f_prev2)
        .zip(y_curr)
        .map(|((y0, f0), y2)| {
            let d = y0 + 2.0 * h * f0 - y2;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepChange {
    Shrink,
    Grow,
    Keep,
}

/// Step size state. Steps are taken in pairs of equal length; `adjust` is called once per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct StepController {
    pub h: f64,
    /// Error tolerance `Θ`.
    pub tolerance: f64,
    /// Adjust ratio `ρ > 1`.
    pub rho: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl StepController {
    pub const DEFAULT_H0: f64 = 1e-2;
    pub const DEFAULT_H_MIN: f64 = 1e-6;
    /// Keeps `1 − h > 0`, so every FE step is a convex combination of the state and a softmax.
    pub const DEFAULT_H_MAX: f64 = 0.5;

    pub fn new(tolerance: f64, rho: f64) -> Result<Self> {
        Self::with_bounds(
            tolerance,
            rho,
            Self::DEFAULT_H0,
            Self::DEFAULT_H_MIN,
            Self::DEFAULT_H_MAX,
        )
    }

    pub fn with_bounds(tolerance: f64, rho: f64, h0: f64, h_min: f64, h_max: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::invalid(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if !(rho > 1.0 && rho.is_finite()) {
            return Err(Error::invalid(format!("rho must exceed 1, got {rho}")));
        }
        if !(h_min > 0.0 && h_min <= h0 && h0 <= h_max && h_max < 1.0) {
            return Err(Error::invalid(format!(
                "step bounds must satisfy 0 < h_min <= h0 <= h_max < 1, got {h_min}, {h0}, {h_max}"
            )));
        }
        Ok(StepController {
            h: h0,
            tolerance,
            rho,
            h_min,
            h_max,
        })
    }

    /// Two-way adjustment: shrink by `ρ` when `θ > Θρ²`, grow by `ρ` when `θ < Θ/ρ²`.
    pub fn adjust(&mut self, theta: f64) -> StepChange {
        let band = self.rho * self.rho;
        let change = if theta > self.tolerance * band {
            self.h /= self.rho;
            StepChange::Shrink
        } else if theta < self.tolerance / band {
            self.h *= self.rho;
            StepChange::Grow
        } else {
            StepChange::Keep
        };
        self.h = self.h.clamp(self.h_min, self.h_max);
        change
    }

    pub fn adjusted(mut self, theta: f64) -> Self {
        self.adjust(theta);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fe_step_examples() {
        let y = fe_step(&[0.5, 0.5], 0.1, &[0.1, -0.1]);
        assert!((y[0] - 0.51).abs() < 1e-15 && (y[1] - 0.49).abs() < 1e-15);
        assert_eq!(fe_step(&[1.0, 0.0], 0.5, &[0.0, 0.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn error_estimate_on_linear_decay() {
        // F(y) = −y, y = 1: two steps of 0.1 give 0.81, the double step gives 0.8.
        let h: f64 = 0.1;
        let y1 = 1.0 - h;
        let y2 = y1 - h * y1;
        assert!((y2 - 0.81).abs() < 1e-15);
        let theta = error_estimate(&[1.0], &[-1.0], &[y2], h);
        assert!((theta - 0.01).abs() < 1e-15);

        let h = 0.05;
        let y1 = 1.0 - h;
        let y2 = y1 - h * y1;
        let theta_half = error_estimate(&[1.0], &[-1.0], &[y2], h);
        assert!((theta_half - 0.0025).abs() < 1e-15);
        assert!((theta / theta_half - 4.0).abs() < 1e-9);
    }

    #[test]
    fn error_estimate_vanishes_for_constant_slope() {
        let f = [0.3, -0.3];
        let y0 = [0.4, 0.6];
        let y2 = fe_step(&fe_step(&y0, 0.2, &f), 0.2, &f);
        assert!(error_estimate(&y0, &f, &y2, 0.2) < 1e-16);
    }

    #[test]
    fn adjust_examples() {
        let base = StepController::with_bounds(1e-5, 1.1, 0.01, 1e-6, 0.5).unwrap();
        let mut c = base.clone();
        assert_eq!(c.adjust(1e-3), StepChange::Shrink);
        assert!((c.h - 0.01 / 1.1).abs() < 1e-18);
        let mut c = base.clone();
        assert_eq!(c.adjust(1e-7), StepChange::Grow);
        assert!((c.h - 0.011).abs() < 1e-15);
        let mut c = base.clone();
        assert_eq!(c.adjust(1e-5), StepChange::Keep);
        assert_eq!(c.h, 0.01);
    }

    #[test]
    fn adjust_clamps_to_bounds() {
        let mut c = StepController::with_bounds(1e-5, 2.0, 0.4, 0.1, 0.5).unwrap();
        c.adjust(0.0);
        assert_eq!(c.h, 0.5);
        for _ in 0..10 {
            c.adjust(1.0);
        }
        assert_eq!(c.h, 0.1);
    }

    #[test]
    fn controller_rejects_bad_parameters() {
        assert!(StepController::new(0.0, 1.1).is_err());
        assert!(StepController::new(1e-5, 1.0).is_err());
        assert!(StepController::with_bounds(1e-5, 1.1, 1.0, 1e-6, 1.0).is_err());
    }
}
