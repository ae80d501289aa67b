use mcpp_core::kernels::rhs;
use mcpp_core::polynomial::Polynomial;
use mcpp_core::solver::{anneal, error_estimate, fe_step, sample_initial, StepChange};
use mcpp_core::{AnnealSchedule, Objective, Partition, StepController};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_instance(rng: &mut impl Rng, max_blocks: usize, max_d: usize) -> Polynomial {
    let sizes = (0..rng.random_range(1..=max_blocks))
        .map(|_| rng.random_range(2..=max_d))
        .collect();
    let p = Partition::new(sizes).unwrap();
    Polynomial::random(&p, 3, 4 * p.num_blocks(), rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn forward_euler_keeps_block_sums(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_instance(&mut rng, 10, 5);
        let p = f.partition().clone();
        let mut y = sample_initial(&p, seed).into_vec();
        for step in 0..2000 {
            let t = [5.0, 0.3, 0.01][step % 3];
            let h = rng.random_range(1e-3..0.5);
            y = fe_step(&y, h, &rhs(&f, &y, t).unwrap());
            prop_assert!(p.max_sum_violation(&y) <= 1e-12);
            prop_assert!(y.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn anneal_is_deterministic_and_greedy_never_worsens(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_instance(&mut rng, 5, 4);
        let y0 = sample_initial(f.partition(), seed);
        let s = AnnealSchedule::new(0.5, 0.9, 1e-3).unwrap();
        let c = StepController::new(1e-5, 1.1).unwrap();
        let a = anneal(&f, &y0, &s, &c).unwrap();
        prop_assert_eq!(&a, &anneal(&f, &y0, &s, &c).unwrap());
        prop_assert!(a.solution_value <= a.rounding_value + 1e-12);
    }
}

/// On `y' = −y` the controller changes `h` only by `ρ^{±1}` once per pair, and after the
/// initial shrink every measured `θ` lies in the band, or on a pair that triggers a change
/// just below it by at most that pair's decay `(1−h)^4`.
#[test]
fn step_size_law_on_linear_decay() {
    let (tol, rho) = (1e-6, 1.1);
    let mut ctrl = StepController::with_bounds(tol, rho, 1e-2, 1e-8, 0.5).unwrap();
    let mut y = vec![1.0, -0.5, 0.25];
    let minus = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<f64>>();
    let mut thetas = Vec::new();
    let mut changes = Vec::new();
    let mut steps = Vec::new();
    for _ in 0..20_000 {
        let h = ctrl.h;
        let f0 = minus(&y);
        let y1 = fe_step(&y, h, &f0);
        let y2 = fe_step(&y1, h, &minus(&y1));
        let theta = error_estimate(&y, &f0, &y2, h);
        let change = ctrl.adjust(theta);
        let ratio = ctrl.h / h;
        match change {
            StepChange::Grow => assert!((ratio - rho).abs() < 1e-12),
            StepChange::Shrink => assert!((ratio - 1.0 / rho).abs() < 1e-12),
            StepChange::Keep => assert_eq!(ratio, 1.0),
        }
        thetas.push(theta);
        changes.push(change);
        steps.push(h);
        y = y2;
        if ctrl.h >= 0.05 {
            break;
        }
    }
    let warm = changes
        .iter()
        .position(|c| *c != StepChange::Shrink)
        .unwrap();
    let band = tol / (rho * rho)..=tol * rho * rho;
    for k in warm..thetas.len() {
        let theta = thetas[k];
        if changes[k] == StepChange::Keep {
            assert!(band.contains(&theta), "{theta:e}");
        } else {
            let decay = (1.0 - steps[k]).powi(4);
            assert!(
                theta >= tol / (rho * rho) * decay && theta <= tol * rho * rho,
                "{theta:e}"
            );
        }
    }
    assert!(changes[warm..].contains(&StepChange::Grow));
}
