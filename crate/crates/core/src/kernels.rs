//! Softmax/hardmax kernels and the right-hand side of the annealed ODE
//! `dy/dt = −y + σ(−Φ(y); 1/T)`.

use crate::error::{Error, Result};
use crate::model::Objective;

/// Writes `σ(z; β)` into `out`. Shifted by `max z` before exponentiation.
pub fn softmax_into(z: &[f64], beta: f64, out: &mut [f64]) -> Result<()> {
    if z.is_empty() {
        return Err(Error::invalid("softmax of an empty vector"));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::invalid(format!(
            "softmax needs beta > 0, got {beta}"
        )));
    }
    let mut max = f64::NEG_INFINITY;
    for &v in z {
        if !v.is_finite() {
            return Err(Error::invalid(format!("non-finite softmax input {v}")));
        }
        max = max.max(v);
    }
    let mut sum = 0.0;
    for (o, &v) in out.iter_mut().zip(z) {
        let e = (beta * (v - max)).exp();
        *o = e;
        sum += e;
    }
    let inv = 1.0 / sum;
    out.iter_mut().for_each(|o| *o *= inv);
    Ok(())
}

pub fn softmax(z: &[f64], beta: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; z.len()];
    softmax_into(z, beta, &mut out)?;
    Ok(out)
}

/// The `β → ∞` limit of softmax: `1/r` on the `r` maximal entries (exact ties), 0 elsewhere.
pub fn hardmax(z: &[f64]) -> Result<Vec<f64>> {
    if z.is_empty() {
        return Err(Error::invalid("hardmax of an empty vector"));
    }
    if let Some(v) = z.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite hardmax input {v}")));
    }
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let r = z.iter().filter(|&&v| v == max).count();
    let w = 1.0 / r as f64;
    Ok(z.iter().map(|&v| if v == max { w } else { 0.0 }).collect())
}

/// Evaluates the ODE right-hand side at `y` for temperature `temperature`.
///
/// `grad` is scratch space of length `n` and holds `Φ(y)` on return.
pub fn rhs_into<O: Objective + ?Sized>(
    obj: &O,
    y: &[f64],
    temperature: f64,
    grad: &mut [f64],
    out: &mut [f64],
) -> Result<()> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::invalid(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let p = obj.partition();
    obj.gradient(y, grad);
    let beta = 1.0 / temperature;
    for (_, r) in p.blocks() {
        let phi = &grad[r.clone()];
        let mut min = f64::INFINITY;
        for &v in phi {
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite block gradient {v}")));
            }
            min = min.min(v);
        }
        // σ(−Φ; β) with the shift taken at max(−Φ) = −min Φ
        let o = &mut out[r.clone()];
        let mut sum = 0.0;
        for (oi, &v) in o.iter_mut().zip(phi) {
            let e = (-beta * (v - min)).exp();
            *oi = e;
            sum += e;
        }
        let inv = 1.0 / sum;
        for (oi, &yi) in o.iter_mut().zip(&y[r]) {
            *oi = *oi * inv - yi;
        }
    }
    Ok(())
}

pub fn rhs<O: Objective + ?Sized>(obj: &O, y: &[f64], temperature: f64) -> Result<Vec<f64>> {
    let n = obj.partition().len();
    obj.partition().check_len(y)?;
    let mut grad = vec![0.0; n];
    let mut out = vec![0.0; n];
    rhs_into(obj, y, temperature, &mut grad, &mut out)?;
    Ok(out)
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Partition;
    use crate::polynomial::Polynomial;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn softmax_examples() {
        assert_eq!(softmax(&[0.0, 0.0], 1.0).unwrap(), vec![0.5, 0.5]);
        let s = softmax(&[2f64.ln(), 0.0], 1.0).unwrap();
        assert!(close(&s, &[2.0 / 3.0, 1.0 / 3.0], 1e-15));
        let s = softmax(&[1000.0, 0.0], 1.0).unwrap();
        assert!(close(&s, &[1.0, 0.0], 1e-12));
        assert!(s.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn softmax_rejects_bad_input() {
        assert!(softmax(&[f64::NAN, 0.0], 1.0).is_err());
        assert!(softmax(&[f64::INFINITY, 0.0], 1.0).is_err());
        assert!(softmax(&[0.0, 0.0], 0.0).is_err());
        assert!(softmax(&[], 1.0).is_err());
    }

    #[test]
    fn hardmax_examples() {
        assert_eq!(hardmax(&[3.0, 1.0, 3.0]).unwrap(), vec![0.5, 0.0, 0.5]);
        assert_eq!(hardmax(&[0.0, 0.0, 0.0]).unwrap(), vec![1.0 / 3.0; 3]);
        assert_eq!(hardmax(&[5.0, 1.0, 2.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert!(hardmax(&[f64::NAN]).is_err());
    }

    #[test]
    fn rhs_examples() {
        let p = Partition::new(vec![2]).unwrap();
        let zero = Polynomial::zero(p.clone());
        assert_eq!(rhs(&zero, &[0.5, 0.5], 0.3).unwrap(), vec![0.0, 0.0]);
        let r = rhs(&zero, &[0.9, 0.1], 1.0).unwrap();
        assert!(close(&r, &[-0.4, 0.4], 1e-15));

        // Φ = (c, 0) constant: the equilibrium is softmax((−c, 0); 1/T)
        let c = 0.7;
        let t = 0.25;
        let lin = Polynomial::linear(p.clone(), &[c, 0.0]).unwrap();
        let ystar = softmax(&[-c, 0.0], 1.0 / t).unwrap();
        assert!(norm_inf(&rhs(&lin, &ystar, t).unwrap()) <= 1e-15);
    }

    #[test]
    fn rhs_rejects_nonpositive_temperature() {
        let p = Partition::new(vec![2]).unwrap();
        let zero = Polynomial::zero(p);
        assert!(rhs(&zero, &[0.5, 0.5], 0.0).is_err());
        assert!(rhs(&zero, &[0.5, 0.5], -1.0).is_err());
    }

    proptest! {
        #[test]
        fn softmax_translation_invariant(
            z in prop::collection::vec(-20.0f64..20.0, 1..8),
            c in -50.0f64..50.0,
            beta in 0.01f64..10.0,
        ) {
            let a = softmax(&z, beta).unwrap();
            let shifted: Vec<f64> = z.iter().map(|v| v + c).collect();
            let b = softmax(&shifted, beta).unwrap();
            prop_assert!(close(&a, &b, 1e-14));
            prop_assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-15 * a.len() as f64);
        }

        #[test]
        fn hardmax_is_the_cold_limit(z in prop::collection::vec(-5.0f64..5.0, 2..7)) {
            let mut sorted = z.clone();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let gap = sorted[0] - sorted[1];
            prop_assume!(gap > 1e-6);
            let soft = softmax(&z, 1e4 / gap).unwrap();
            prop_assert!(close(&soft, &hardmax(&z).unwrap(), 1e-6));
        }

        #[test]
        fn rhs_block_sums_vanish(
            seed in any::<u64>(),
            t in 0.01f64..10.0,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = Partition::new((0..rng.random_range(1..6)).map(|_| rng.random_range(2..6)).collect()).unwrap();
            let f = Polynomial::random(&p, 3, 12, &mut rng);
            let y = crate::solver::sample_initial(&p, seed);
            let r = rhs(&f, y.as_slice(), t).unwrap();
            for s in p.block_sums(&r) {
                prop_assert!(s.abs() <= 1e-12);
            }
        }
    }
}
