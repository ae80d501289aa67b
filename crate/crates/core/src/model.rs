//! Problem-independent data model.
//!
//! A multiple choice polynomial program minimizes `f(x)` over Boolean vectors
//! `x ∈ {0,1}^n` whose indices are split into `m` contiguous blocks, with
//! exactly one unit entry per block. All states are stored flat (length `n`)
//! and addressed per block through [`Partition`] offsets.

use std::ops::Range;

use crate::error::{Error, Result};

/// Tolerance on per-block sums for anything claiming to live on the simplex product.
pub const BLOCK_SUM_TOL: f64 = 1e-12;

/// Block structure `d_1..d_m` over `n = Σ d_j` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl Partition {
    /// Every block needs at least two choices and there must be at least one block.
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::invalid("partition needs at least one block"));
        }
        if let Some(j) = sizes.iter().position(|&d| d < 2) {
            return Err(Error::invalid(format!(
                "block {j} has size {}, every block needs at least 2 choices",
                sizes[j]
            )));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &d in &sizes {
            acc += d;
            offsets.push(acc);
        }
        Ok(Partition { sizes, offsets })
    }

    /// `m` blocks of identical size `d`.
    pub fn uniform(m: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; m])
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    /// Total number of variables `n`.
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block_size(&self, j: usize) -> usize {
        self.sizes[j]
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn offset(&self, j: usize) -> usize {
        self.offsets[j]
    }

    /// Flat index range of block `j`.
    pub fn block(&self, j: usize) -> Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    /// Largest block size, `d̂`.
    pub fn max_block_size(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    /// Number of Boolean feasible points, `Π d_j`, as a float to avoid overflow.
    pub fn num_feasible(&self) -> f64 {
        self.sizes.iter().map(|&d| d as f64).product()
    }

    /// Iterator over `(block, range)` pairs.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, Range<usize>)> + '_ {
        (0..self.num_blocks()).map(move |j| (j, self.block(j)))
    }

    /// Per-block sums `S_j` of a flat vector.
    pub fn block_sums(&self, y: &[f64]) -> Vec<f64> {
        self.blocks().map(|(_, r)| y[r].iter().sum()).collect()
    }

    /// `max_j |S_j - 1|`.
    pub fn max_sum_violation(&self, y: &[f64]) -> f64 {
        self.block_sums(y)
            .into_iter()
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_len(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.len() {
            return Err(Error::invalid(format!(
                "vector has length {}, partition expects {}",
                y.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

/// Fractional point on the product of simplices; the ODE state.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexState {
    values: Vec<f64>,
}

impl SimplexState {
    /// Validates entries in `[0,1]` and unit block sums.
    pub fn new(partition: &Partition, values: Vec<f64>) -> Result<Self> {
        partition.check_len(&values)?;
        if let Some(i) = values
            .iter()
            .position(|v| !v.is_finite() || *v < 0.0 || *v > 1.0)
        {
            return Err(Error::invalid(format!(
                "entry {i} = {} is outside [0,1]",
                values[i]
            )));
        }
        let violation = partition.max_sum_violation(&values);
        if violation > BLOCK_SUM_TOL {
            return Err(Error::invalid(format!(
                "block sums deviate from 1 by {violation:e}"
            )));
        }
        Ok(SimplexState { values })
    }

    /// Per-block uniform point `1/d_j`.
    pub fn uniform(partition: &Partition) -> Self {
        let mut values = vec![0.0; partition.len()];
        for (j, r) in partition.blocks() {
            let v = 1.0 / partition.block_size(j) as f64;
            values[r].iter_mut().for_each(|y| *y = v);
        }
        SimplexState { values }
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        SimplexState { values }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn block<'a>(&'a self, partition: &Partition, j: usize) -> &'a [f64] {
        &self.values[partition.block(j)]
    }
}

/// Boolean feasible point: one chosen index per block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanSolution {
    pub choices: Vec<usize>,
}

impl BooleanSolution {
    pub fn new(partition: &Partition, choices: Vec<usize>) -> Result<Self> {
        if choices.len() != partition.num_blocks() {
            return Err(Error::invalid(format!(
                "{} choices for {} blocks",
                choices.len(),
                partition.num_blocks()
            )));
        }
        for (j, &c) in choices.iter().enumerate() {
            if c >= partition.block_size(j) {
                return Err(Error::invalid(format!(
                    "choice {c} out of range for block {j} of size {}",
                    partition.block_size(j)
                )));
            }
        }
        Ok(BooleanSolution { choices })
    }

    /// Dense `x ∈ X`, with `x^(j) = e_{s_j}`.
    pub fn to_dense(&self, partition: &Partition) -> Vec<f64> {
        let mut x = vec![0.0; partition.len()];
        for (j, &c) in self.choices.iter().enumerate() {
            x[partition.offset(j) + c] = 1.0;
        }
        x
    }

    /// Inverse of [`to_dense`](Self::to_dense); fails unless every block is a unit vector.
    pub fn from_dense(partition: &Partition, x: &[f64]) -> Result<Self> {
        partition.check_len(x)?;
        let mut choices = Vec::with_capacity(partition.num_blocks());
        for (j, r) in partition.blocks() {
            let block = &x[r];
            let ones: Vec<usize> = (0..block.len()).filter(|&i| block[i] == 1.0).collect();
            let zeros = block.iter().filter(|&&v| v == 0.0).count();
            if ones.len() != 1 || zeros + 1 != block.len() {
                return Err(Error::invalid(format!("block {j} is not a unit vector")));
            }
            choices.push(ones[0]);
        }
        Ok(BooleanSolution { choices })
    }
}

/// Element of the extended set `X̄`: per block a nonempty support `A_j`,
/// representing `χ^{A_j} / |A_j|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedRounding {
    /// Sorted, nonempty support per block.
    pub supports: Vec<Vec<usize>>,
}

impl ExtendedRounding {
    pub fn new(partition: &Partition, mut supports: Vec<Vec<usize>>) -> Result<Self> {
        if supports.len() != partition.num_blocks() {
            return Err(Error::invalid("one support per block required"));
        }
        for (j, s) in supports.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return Err(Error::invalid(format!("block {j} has empty support")));
            }
            if *s.last().unwrap() >= partition.block_size(j) {
                return Err(Error::invalid(format!("block {j} support out of range")));
            }
        }
        Ok(ExtendedRounding { supports })
    }

    /// Multiplicities `r_j = |A_j|`.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.supports.iter().map(Vec::len).collect()
    }

    pub fn is_boolean(&self) -> bool {
        self.supports.iter().all(|s| s.len() == 1)
    }

    pub fn to_dense(&self, partition: &Partition) -> Vec<f64> {
        let mut y = vec![0.0; partition.len()];
        for (j, s) in self.supports.iter().enumerate() {
            let v = 1.0 / s.len() as f64;
            for &i in s {
                y[partition.offset(j) + i] = v;
            }
        }
        y
    }

    /// `‖ŷ − y‖_∞`.
    pub fn distance_inf(&self, partition: &Partition, y: &[f64]) -> f64 {
        self.to_dense(partition)
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<&BooleanSolution> for ExtendedRounding {
    fn from(x: &BooleanSolution) -> Self {
        ExtendedRounding {
            supports: x.choices.iter().map(|&c| vec![c]).collect(),
        }
    }
}

/// The contract every MCPP objective fulfils.
///
/// `f` must be affine in each block: `f(y) = y^(j)·Φ^(j)(y) + f(y with block j zeroed)`,
/// where `Φ^(j) = ∂f/∂y^(j)` does not depend on `y^(j)`. [`value`](Objective::value)
/// evaluates the multilinear extension, so fractional points are valid inputs.
pub trait Objective: Send + Sync {
    fn partition(&self) -> &Partition;

    /// Writes the flat vector of all block gradients `Φ(y)` into `out`.
    fn gradient(&self, y: &[f64], out: &mut [f64]);

    fn value(&self, y: &[f64]) -> f64;

    /// Writes `Φ^(j)(y)` into `out` (length `d_j`). Implementations with a cheaper
    /// per-block path should override this.
    fn block_gradient(&self, y: &[f64], block: usize, out: &mut [f64]) {
        let mut full = vec![0.0; self.partition().len()];
        self.gradient(y, &mut full);
        out.copy_from_slice(&full[self.partition().block(block)]);
    }

    fn gradient_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.partition().len()];
        self.gradient(y, &mut out);
        out
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn partition(&self) -> &Partition {
        (**self).partition()
    }
    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        (**self).gradient(y, out)
    }
    fn value(&self, y: &[f64]) -> f64 {
        (**self).value(y)
    }
    fn block_gradient(&self, y: &[f64], block: usize, out: &mut [f64]) {
        (**self).block_gradient(y, block, out)
    }
}

/// Copy of `y` with block `j` replaced by `v`.
pub fn replace_block(partition: &Partition, y: &[f64], j: usize, v: &[f64]) -> Vec<f64> {
    let mut out = y.to_vec();
    out[partition.block(j)].copy_from_slice(v);
    out
}
