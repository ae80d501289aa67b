//! Rounding an equilibrium into `X̄` and greedily turning that into a Boolean point.

use crate::model::{BooleanSolution, ExtendedRounding, Objective, Partition};

/// Per block: `η = max entry`, `r = ⌊1/η + ½⌋`, support = indices of the `r`
/// largest entries (ties to the lowest index).
pub fn round_to_extended(partition: &Partition, y: &[f64]) -> ExtendedRounding {
    let supports = partition
        .blocks()
        .map(|(j, r)| {
            let block = &y[r];
            let d = partition.block_size(j);
            let eta = block.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // η ≥ 1/d on the simplex; the clamp only matters for off-simplex input
            let mult = if eta > 0.0 {
                ((1.0 / eta + 0.5).floor() as usize).clamp(1, d)
            } else {
                d
            };
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| block[b].total_cmp(&block[a]).then(a.cmp(&b)));
            let mut support = order[..mult].to_vec();
            support.sort_unstable();
            support
        })
        .collect();
    ExtendedRounding { supports }
}

fn argmin_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Upper bound on full sweeps; each sweep after the first strictly lowers `f`,
/// so this only trips on floating-point cycling.
const MAX_SWEEPS: usize = 100_000;

/// Starting from `x ← ŷ`, sweeps the blocks and sets each to the unit vector minimizing
/// `Φ^(j)(x)` until a sweep changes nothing.
///
/// A fractional block is always replaced. A block that is already a unit vector only
/// moves on a strict decrease, so the returned point admits no improving single-block
/// unit move and `f(x) ≤ f(ŷ)`.
pub fn greedy_booleanize<O: Objective + ?Sized>(
    rounding: &ExtendedRounding,
    obj: &O,
) -> BooleanSolution {
    let p = obj.partition();
    let mut x = rounding.to_dense(p);
    let mut chosen: Vec<Option<usize>> = rounding
        .supports
        .iter()
        .map(|s| if s.len() == 1 { Some(s[0]) } else { None })
        .collect();
    let mut phi = vec![0.0; p.max_block_size()];

    for _ in 0..MAX_SWEEPS {
        let mut changed = false;
        for (j, r) in p.blocks() {
            let phi = &mut phi[..r.len()];
            obj.block_gradient(&x, j, phi);
            let best = argmin_lowest(phi);
            let moved = match chosen[j] {
                None => true,
                Some(cur) => phi[best] < phi[cur],
            };
            if moved {
                let block = &mut x[r];
                block.iter_mut().for_each(|v| *v = 0.0);
                block[best] = 1.0;
                chosen[j] = Some(best);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    BooleanSolution {
        choices: chosen.into_iter().map(|c| c.unwrap()).collect(),
    }
}
