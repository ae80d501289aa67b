use crate::error::{Error, Result};
use crate::kernels::{norm_inf, rhs};
use crate::model::{ExtendedRounding, Objective, Partition};
use crate::solver::round_to_extended;

/// Two block-gradient entries within this relative distance count as equal when
/// computing the minimal gap.
pub const GAP_REL_TOL: f64 = 1e-12;

/// Largest `n` for the `2^n` vertex enumeration behind `L`.
pub const VERTEX_BUDGET_BITS: usize = 16;

/// Largest `|X̄| = Π (2^{d_j} − 1)` enumerated for the gap.
pub const EXTENDED_BUDGET: f64 = 1e6;

/// Quantities of the closeness test between an equilibrium and its rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub rounding: ExtendedRounding,
    /// `ε = ‖ŷ − ȳ‖_∞`.
    pub epsilon: f64,
    pub temperature: f64,
    /// Upper bound on the `∞`-norm Lipschitz constant of every `Φ^(j)_i` over `[0,1]^n`.
    pub lipschitz: f64,
    /// Smallest nonzero separation of block-gradient entries over `X̄`; `None` when no
    /// two entries ever differ.
    pub gap: Option<f64>,
    pub dhat: usize,
    /// `‖rhs(ȳ)‖_∞`; the conditions assume this is zero.
    pub residual: f64,
    /// `d̂ε < 1/2`.
    pub distance_ok: bool,
    /// `ε / ln(1/(d̂ε) − 1) < T/(2L)`.
    pub separation_ok: bool,
    /// `T ln((1+d̂ε)/(1−d̂ε)) + 2Lε < g`; `None` when the gap is vacuous.
    pub gap_ok: Option<bool>,
    /// `min{1/(4d̂), T/(2L), g/(3d̂T + 2L)}`.
    pub simple_bound: f64,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.distance_ok && self.separation_ok && self.gap_ok.unwrap_or(true)
    }

    /// `ε` is below the single combined bound.
    pub fn simple_bound_holds(&self) -> bool {
        self.epsilon < self.simple_bound
    }
}

fn lipschitz_bound<O: Objective + ?Sized>(obj: &O) -> Result<f64> {
    let n = obj.partition().len();
    if n > VERTEX_BUDGET_BITS {
        return Err(Error::BudgetExceeded {
            what: "Lipschitz vertex enumeration 2^n",
            required: 2f64.powi(n as i32),
            limit: 2f64.powi(VERTEX_BUDGET_BITS as i32),
        });
    }
    // Φ_i is multilinear, so its partial in x_k is Φ_i(v with x_k=1) − Φ_i(v with x_k=0)
    // and the ℓ1 norm of its gradient peaks at a vertex
    let vertices = 1usize << n;
    let mut grads = vec![0.0; vertices * n];
    let mut v = vec![0.0; n];
    for mask in 0..vertices {
        for (k, e) in v.iter_mut().enumerate() {
            *e = (mask >> k & 1) as f64;
        }
        obj.gradient(&v, &mut grads[mask * n..(mask + 1) * n]);
    }
    let mut best: f64 = 0.0;
    for mask in 0..vertices {
        let here = &grads[mask * n..(mask + 1) * n];
        for i in 0..n {
            let total: f64 = (0..n)
                .map(|k| (here[i] - grads[(mask ^ (1 << k)) * n + i]).abs())
                .sum();
            best = best.max(total);
        }
    }
    Ok(best)
}

fn extended_points(p: &Partition) -> Result<Vec<ExtendedRounding>> {
    let required: f64 = p
        .block_sizes()
        .iter()
        .map(|&d| 2f64.powi(d as i32) - 1.0)
        .product();
    if required > EXTENDED_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "extended set enumeration Π (2^d_j − 1)",
            required,
            limit: EXTENDED_BUDGET,
        });
    }
    let masks = |d: usize| -> Vec<Vec<usize>> {
        (1u64..1 << d)
            .map(|m| (0..d).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    };
    let per_block: Vec<Vec<Vec<usize>>> = p.block_sizes().iter().map(|&d| masks(d)).collect();
    let mut out = Vec::with_capacity(required as usize);
    let mut idx = vec![0; per_block.len()];
    loop {
        out.push(ExtendedRounding {
            supports: idx
                .iter()
                .zip(&per_block)
                .map(|(&i, b)| b[i].clone())
                .collect(),
        });
        let mut j = idx.len();
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < per_block[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

fn minimal_gap<O: Objective + ?Sized>(obj: &O) -> Result<Option<f64>> {
    let p = obj.partition();
    let mut phi = vec![0.0; p.len()];
    let mut gap: Option<f64> = None;
    for point in extended_points(p)? {
        obj.gradient(&point.to_dense(p), &mut phi);
        for (_, r) in p.blocks() {
            let mut block = phi[r].to_vec();
            block.sort_by(f64::total_cmp);
            for w in block.windows(2) {
                let diff = w[1] - w[0];
                let scale = w[0].abs().max(w[1].abs()).max(1.0);
                if diff > GAP_REL_TOL * scale {
                    gap = Some(gap.map_or(diff, |g| g.min(diff)));
                }
            }
        }
    }
    Ok(gap)
}

/// The instance constants `(g, L)`, by enumerating `X̄` and the vertices of `[0,1]^n`.
pub fn gap_and_lipschitz<O: Objective + ?Sized>(obj: &O) -> Result<(Option<f64>, f64)> {
    Ok((minimal_gap(obj)?, lipschitz_bound(obj)?))
}

/// Checks whether the rounding of the equilibrium `y_bar` at temperature `T` is close
/// enough to be a guaranteed local optimum in `X̄`.
pub fn certify_equilibrium<O: Objective + ?Sized>(
    y_bar: &[f64],
    obj: &O,
    temperature: f64,
) -> Result<Certificate> {
    let p = obj.partition();
    p.check_len(y_bar)?;
    let residual = norm_inf(&rhs(obj, y_bar, temperature)?);
    let rounding = round_to_extended(p, y_bar);
    let epsilon = rounding.distance_inf(p, y_bar);
    let (gap, lipschitz) = gap_and_lipschitz(obj)?;
    let dhat = p.max_block_size();
    let de = dhat as f64 * epsilon;
    let t = temperature;

    let distance_ok = de < 0.5;
    let log_ratio = (1.0 / de - 1.0).ln();
    let separation_ok = log_ratio > 0.0
        && (lipschitz == 0.0 || epsilon == 0.0 || epsilon / log_ratio < t / (2.0 * lipschitz));
    let gap_ok =
        gap.map(|g| de < 1.0 && t * ((1.0 + de) / (1.0 - de)).ln() + 2.0 * lipschitz * epsilon < g);

    let by_l = if lipschitz > 0.0 {
        t / (2.0 * lipschitz)
    } else {
        f64::INFINITY
    };
    let by_g = gap.map_or(f64::INFINITY, |g| {
        g / (3.0 * dhat as f64 * t + 2.0 * lipschitz)
    });
    let simple_bound = (1.0 / (4.0 * dhat as f64)).min(by_l).min(by_g);

    Ok(Certificate {
        rounding,
        epsilon,
        temperature,
        lipschitz,
        gap,
        dhat,
        residual,
        distance_ok,
        separation_ok,
        gap_ok,
        simple_bound,
    })
}
