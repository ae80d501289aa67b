use crate::error::{Error, Result};
use crate::model::{ExtendedRounding, Objective};

/// Objective values closer than this count as no improvement.
pub const LOCAL_TOL: f64 = 1e-10;

/// Largest `Σ_j 2^{d_j}` the extended-move enumeration accepts.
pub const LOCAL_BUDGET: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveSet {
    /// Every nonempty support in one block (local optimality in `X̄`).
    Extended,
    /// Unit vectors in one block only.
    Units,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalVerdict {
    Optimal,
    /// Replacing block `block` by the uniform vector on `support` lowers `f` by
    /// `improvement`.
    Improvable {
        block: usize,
        support: Vec<usize>,
        improvement: f64,
    },
}

impl LocalVerdict {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LocalVerdict::Optimal)
    }
}

/// Tries every single-block move from `x`, evaluating `f` directly, and reports the
/// first one that improves by more than [`LOCAL_TOL`].
pub fn check_local_optimality<O: Objective + ?Sized>(
    x: &ExtendedRounding,
    obj: &O,
    moves: MoveSet,
) -> Result<LocalVerdict> {
    let p = obj.partition();
    if x.supports.len() != p.num_blocks() {
        return Err(Error::invalid("rounding does not match the partition"));
    }
    if moves == MoveSet::Extended {
        let required: f64 = p.block_sizes().iter().map(|&d| 2f64.powi(d as i32)).sum();
        if required > LOCAL_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "local-optimality enumeration Σ 2^d_j",
                required,
                limit: LOCAL_BUDGET,
            });
        }
    }
    let mut y = x.to_dense(p);
    let f0 = obj.value(&y);
    for (j, r) in p.blocks() {
        let d = r.len();
        let saved = y[r.clone()].to_vec();
        let candidates: Box<dyn Iterator<Item = Vec<usize>>> = match moves {
            MoveSet::Units => Box::new((0..d).map(|i| vec![i])),
            MoveSet::Extended => Box::new(
                (1u64..1 << d).map(move |mask| (0..d).filter(|i| mask >> i & 1 == 1).collect()),
            ),
        };
        for support in candidates {
            let w = 1.0 / support.len() as f64;
            y[r.clone()].iter_mut().for_each(|v| *v = 0.0);
            for &i in &support {
                y[r.start + i] = w;
            }
            let improvement = f0 - obj.value(&y);
            if improvement > LOCAL_TOL {
                return Ok(LocalVerdict::Improvable {
                    block: j,
                    support,
                    improvement,
                });
            }
        }
        y[r].copy_from_slice(&saved);
    }
    Ok(LocalVerdict::Optimal)
}
