use crate::model::Objective;

/// Central differences `(f(y + h e_k) − f(y − h e_k)) / 2h` for every coordinate.
///
/// Evaluates the multilinear extension off the constraint surface; on a multilinear `f`
/// this is exact up to rounding.
pub fn finite_difference_gradient<O: Objective + ?Sized>(
    obj: &O,
    y: &[f64],
    step: f64,
) -> Vec<f64> {
    let mut probe = y.to_vec();
    (0..y.len())
        .map(|k| {
            probe[k] = y[k] + step;
            let up = obj.value(&probe);
            probe[k] = y[k] - step;
            let down = obj.value(&probe);
            probe[k] = y[k];
            (up - down) / (2.0 * step)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxcut::{Graph, MaxKCut};
    use crate::model::Partition;
    use crate::polynomial::Polynomial;
    use crate::solver::sample_initial;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_on_linear_objectives() {
        let p = Partition::new(vec![3, 2]).unwrap();
        let c = [0.3, -1.2, 2.0, 0.5, -0.25];
        let f = Polynomial::linear(p.clone(), &c).unwrap();
        // no truncation error on affine f; a wider step keeps cancellation under 1e-12
        let g = finite_difference_gradient(&f, sample_initial(&p, 4).as_slice(), 1e-3);
        for (a, b) in g.iter().zip(&c) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn matches_maxcut_gradient() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let edges: Vec<_> = (0..60)
            .map(|_| {
                (
                    rng.random_range(0..20),
                    rng.random_range(0..20),
                    rng.random_range(-1.0..2.0),
                )
            })
            .filter(|(a, b, _)| a != b)
            .collect();
        let graph = Graph::from_edges(20, edges).unwrap();
        let obj = MaxKCut::new(&graph, 3).unwrap();
        let y = sample_initial(obj.partition(), 9);
        let exact = obj.gradient_vec(y.as_slice());
        let fd = finite_difference_gradient(&obj, y.as_slice(), 1e-5);
        for (a, b) in exact.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0));
        }
    }
}
