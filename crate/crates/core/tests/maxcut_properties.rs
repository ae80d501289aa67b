use mcpp_core::maxcut::{cut_value, CutAssignment, Graph, MaxKCut};
use mcpp_core::solver::sample_initial;
use mcpp_core::validation::finite_difference_gradient;
use mcpp_core::{BooleanSolution, Objective};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut impl Rng, nv: usize, ne: usize) -> Graph {
    let edges: Vec<_> = (0..ne)
        .map(|_| {
            (
                rng.random_range(0..nv),
                rng.random_range(0..nv),
                rng.random_range(-2.0..3.0),
            )
        })
        .filter(|(a, b, _)| a != b)
        .collect();
    Graph::from_edges(nv, edges).unwrap()
}

fn dense_w(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.num_vertices();
    let mut w = vec![vec![0.0; n]; n];
    for &(a, b, x) in g.edges() {
        w[a][b] += x;
        w[b][a] += x;
    }
    w
}

/// `Φ_{v,r} = Σ_u W[v][u] y_{u,r}` with a dense `W`.
fn dense_gradient(w: &[Vec<f64>], k: usize, y: &[f64]) -> Vec<f64> {
    let n = w.len();
    let mut out = vec![0.0; n * k];
    for v in 0..n {
        for r in 0..k {
            out[v * k + r] = (0..n).map(|u| w[v][u] * y[u * k + r]).sum();
        }
    }
    out
}

/// `½ tr(P W Pᵀ) − w_tot` with `P[r][v] = y_{v,r}`.
fn trace_value(w: &[Vec<f64>], k: usize, y: &[f64], w_tot: f64) -> f64 {
    let n = w.len();
    let mut tr = 0.0;
    for r in 0..k {
        for a in 0..n {
            for b in 0..n {
                tr += y[a * k + r] * w[a][b] * y[b * k + r];
            }
        }
    }
    0.5 * tr - w_tot
}

proptest! {
    #[test]
    fn objective_and_cut_are_dual(seed in any::<u64>(), nv in 2usize..12, k in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, nv, 3 * nv);
        let obj = MaxKCut::new(&g, k).unwrap();
        let labels: Vec<usize> = (0..nv).map(|_| rng.random_range(0..k)).collect();
        let x = BooleanSolution::new(obj.partition(), labels.clone()).unwrap();
        let cut = cut_value(&g, &CutAssignment { labels });
        prop_assert!((obj.value(&x.to_dense(obj.partition())) + cut).abs() <= 1e-12);

        let y = sample_initial(obj.partition(), seed);
        let w = dense_w(&g);
        let tv = trace_value(&w, k, y.as_slice(), g.total_weight());
        prop_assert!((obj.value(y.as_slice()) - tv).abs() <= 1e-10);
    }

    #[test]
    fn sparse_gradient_matches_dense_and_finite_differences(seed in any::<u64>(), nv in 2usize..=50, k in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, nv, 4 * nv);
        let obj = MaxKCut::new(&g, k).unwrap();
        let y = sample_initial(obj.partition(), seed ^ 1);
        let fast = obj.gradient_vec(y.as_slice());
        let dense = dense_gradient(&dense_w(&g), k, y.as_slice());
        let fd = finite_difference_gradient(&obj, y.as_slice(), 1e-5);
        for i in 0..fast.len() {
            prop_assert!((fast[i] - dense[i]).abs() <= 1e-10);
            prop_assert!((fast[i] - fd[i]).abs() <= 1e-6 * fast[i].abs().max(1.0));
        }
    }

    /// Changing block `j` alone never changes `Φ^(j)`.
    #[test]
    fn block_gradient_ignores_its_own_block(seed in any::<u64>(), nv in 2usize..15) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, nv, 3 * nv);
        let obj = MaxKCut::new(&g, 3).unwrap();
        let y = sample_initial(obj.partition(), seed).into_vec();
        let j = rng.random_range(0..nv);
        let z = mcpp_core::replace_block(obj.partition(), &y, j, &[0.1, 0.7, 0.2]);
        let (mut a, mut b) = (vec![0.0; 3], vec![0.0; 3]);
        obj.block_gradient(&y, j, &mut a);
        obj.block_gradient(&z, j, &mut b);
        for r in 0..3 {
            prop_assert!((a[r] - b[r]).abs() <= 1e-12);
        }
    }
}

#[test]
fn gradient_cost_is_linear_in_k_times_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ratios = Vec::new();
    for (nv, ne, k) in [(50, 200, 2), (100, 800, 2), (200, 400, 5), (400, 3000, 3)] {
        let g = random_graph(&mut rng, nv, ne);
        let obj = MaxKCut::new(&g, k).unwrap();
        let y = sample_initial(obj.partition(), 0);
        obj.gradient_vec(y.as_slice());
        let size = k * (g.num_edges() + g.num_vertices());
        ratios.push(obj.mult_adds() as f64 / size as f64);
    }
    // 2|E| + |V| operations per label: the ratio to k(|E|+|V|) stays within [1, 2]
    assert!(
        ratios.iter().all(|&r| (1.0..=2.0).contains(&r)),
        "{ratios:?}"
    );
}
