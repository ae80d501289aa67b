use std::path::PathBuf;

use mcpp_core::solver::{sample_initial, AnnealSchedule, StepController};
use mcpp_core::stardisc::{
    default_theta, delta_objective, deltabar_objective, max_d_over_grid, max_dbar_over_grid,
    parse_points, preprocess, solve_stardisc, DiscrepancyObjective, PointSet,
};
use mcpp_core::{BooleanSolution, Objective};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_set(rng: &mut impl Rng, n: usize, d: usize, levels: Option<u32>) -> PointSet {
    let coord = |rng: &mut dyn rand::RngCore| match levels {
        Some(l) => rng.random_range(0..l) as f64 / l as f64,
        None => rng.random::<f64>(),
    };
    PointSet::new(
        (0..n)
            .map(|_| (0..d).map(|_| coord(rng)).collect())
            .collect(),
    )
    .unwrap()
}

/// Maximum of `−f` over all Boolean points of the objective.
fn boolean_max(obj: &DiscrepancyObjective) -> f64 {
    let p = obj.partition();
    let (m, b) = (p.num_blocks(), p.block_size(0));
    let mut best = f64::NEG_INFINITY;
    let mut choices = vec![0; m];
    loop {
        let x = BooleanSolution {
            choices: choices.clone(),
        };
        best = best.max(-obj.value(&x.to_dense(p)));
        let mut j = m;
        loop {
            if j == 0 {
                return best;
            }
            j -= 1;
            choices[j] += 1;
            if choices[j] < b {
                break;
            }
            choices[j] = 0;
        }
    }
}

proptest! {
    #[test]
    fn box_problems_match_grid_maxima(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let levels = if seed % 2 == 0 { Some(4) } else { None };
        let u = random_set(&mut rng, n, 2, levels);
        let g = preprocess(&u);
        prop_assert_eq!(boolean_max(&delta_objective(&g)), max_d_over_grid(&u).unwrap().value);
        if n > 1 {
            prop_assert_eq!(boolean_max(&deltabar_objective(&g)), max_dbar_over_grid(&u).unwrap().value);
        }
    }

    /// `f(y) = y^(j)·Φ^(j)(y) + f(y with block j zeroed)` at interior points.
    #[test]
    fn affine_law_holds(seed in any::<u64>(), n in 2usize..10, d in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_set(&mut rng, n, d, None);
        let g = preprocess(&u);
        for obj in [delta_objective(&g), deltabar_objective(&g)] {
            let p = obj.partition();
            let y = sample_initial(p, seed).into_vec();
            let j = rng.random_range(0..d);
            let r = p.block(j);
            let phi = obj.gradient_vec(&y);
            let mut zeroed = y.clone();
            zeroed[r.clone()].iter_mut().for_each(|v| *v = 0.0);
            let dot: f64 = r.clone().map(|i| y[i] * phi[i]).sum();
            prop_assert!((obj.value(&y) - dot - obj.value(&zeroed)).abs() <= 1e-12);
        }
    }
}

#[test]
fn gradient_equivalence_up_to_fifty_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, d) in [(50, 5), (37, 4), (50, 2), (8, 5)] {
        let u = random_set(&mut rng, n, d, Some(20));
        let g = preprocess(&u);
        for obj in [delta_objective(&g), deltabar_objective(&g)] {
            let p = obj.partition();
            let y = sample_initial(p, n as u64).into_vec();
            let fast = obj.gradient_vec(&y);
            // Φ is the partial derivative of a multilinear f; block j is absent from Φ^(j),
            // so f(y with y_k ← 1) − f(y with y_k ← 0) is exact
            for k in 0..y.len() {
                let (mut hi, mut lo) = (y.clone(), y.clone());
                hi[k] = 1.0;
                lo[k] = 0.0;
                let diff = obj.value(&hi) - obj.value(&lo);
                assert!(
                    (fast[k] - diff).abs() <= 1e-10,
                    "{n}x{d} coord {k}: {} vs {diff}",
                    fast[k]
                );
            }
        }
    }
}

/// Optional regression on a supplied good-lattice-point file (the 145-point, 4-D set),
/// located by `MCPP_GLP_145_4` or at `tests/data/glp_145_4.txt`.
#[test]
fn glp_145_4_regression_when_data_is_present() {
    let path = std::env::var_os("MCPP_GLP_145_4")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/glp_145_4.txt")
        });
    let Ok(text) = std::fs::read_to_string(&path) else {
        eprintln!("skipped: no GLP data at {}", path.display());
        return;
    };
    let u = parse_points(&text).unwrap();
    let schedule = AnnealSchedule::stardisc_default();
    let ctrl = StepController::new(default_theta(&u), 1.1).unwrap();
    let r = solve_stardisc(&u, 100, &schedule, &ctrl, 0).unwrap();
    // reference 0.0731 printed to four decimals
    assert!(r.lower_bound() >= 0.07305, "{}", r.lower_bound());
}
