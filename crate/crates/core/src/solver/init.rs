use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::model::{Partition, SimplexState};

/// Per block, a uniform sample from the open simplex (symmetric Dirichlet, unit
/// concentration), deterministic in `seed`.
pub fn sample_initial(partition: &Partition, seed: u64) -> SimplexState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; partition.len()];
    for (_, r) in partition.blocks() {
        let block = &mut values[r];
        let mut sum = 0.0;
        for v in block.iter_mut() {
            let e: f64 = Exp1.sample(&mut rng);
            // Exp1 is positive almost surely; guard the measure-zero case
            *v = e.max(f64::MIN_POSITIVE);
            sum += *v;
        }
        block.iter_mut().for_each(|v| *v /= sum);
    }
    SimplexState::from_vec_unchecked(values)
}
