//! Box-discrepancy objectives on the critical grid.
//!
//! Block `j` picks the `j`-th coordinate of the box corner among the sorted grid
//! values. With `z_pj` the mass of block `j` at or beyond the rank of point `p`:
//!
//! * `ν = Π_j b_j`, `b_j = Σ_i y_ji ū_ij` (box volume),
//! * `α = Σ_p Π_j z_pj` (points counted inside the box),
//!
//! and `f = α/N − ν` for the open box (`δ`), `f = ν − α/N` for the closed one (`δ̄`).

use crate::model::{BooleanSolution, Objective, Partition};

use super::grid::GridIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxKind {
    /// `[0,u)`, blocks of size `N + 1` (the grid includes `1`).
    Open,
    /// `[0,u]`, blocks of size `N`.
    Closed,
}

#[derive(Debug, Clone)]
pub struct DiscrepancyObjective<'g> {
    grid: &'g GridIndex,
    kind: BoxKind,
    partition: Partition,
}

/// `f = −δ` over `B_{N+1}^d`.
pub fn delta_objective(grid: &GridIndex) -> DiscrepancyObjective<'_> {
    DiscrepancyObjective::new(grid, BoxKind::Open)
}

/// `f = −δ̄` over `B_N^d`.
pub fn deltabar_objective(grid: &GridIndex) -> DiscrepancyObjective<'_> {
    DiscrepancyObjective::new(grid, BoxKind::Closed)
}

/// Writes `out[i] = Π_{k≠i} v[k]` using prefix and suffix products.
fn products_except_one(v: &[f64], out: &mut [f64]) {
    let mut acc = 1.0;
    for (o, x) in out.iter_mut().zip(v) {
        *o = acc;
        acc *= x;
    }
    acc = 1.0;
    for (o, x) in out.iter_mut().zip(v).rev() {
        *o *= acc;
        acc *= x;
    }
}

impl<'g> DiscrepancyObjective<'g> {
    pub fn new(grid: &'g GridIndex, kind: BoxKind) -> Self {
        let n = grid.num_points();
        let size = match kind {
            BoxKind::Open => n + 1,
            BoxKind::Closed => n,
        };
        // a single point with a closed box would give one-entry blocks; a second slot at
        // u_j = 1 keeps every block a real choice and is still a valid corner
        let partition = Partition::uniform(grid.dim(), size.max(2))
            .expect("non-empty grid gives a valid partition");
        DiscrepancyObjective {
            grid,
            kind,
            partition,
        }
    }

    pub fn kind(&self) -> BoxKind {
        self.kind
    }

    pub fn grid(&self) -> &GridIndex {
        self.grid
    }

    fn block_len(&self) -> usize {
        self.partition.block_size(0)
    }

    /// First suffix index counted for a point of rank `r`.
    fn first_counted(&self, r: usize) -> usize {
        match self.kind {
            BoxKind::Open => r + 1,
            BoxKind::Closed => r,
        }
    }

    fn grid_value(&self, j: usize, i: usize) -> f64 {
        // padded slot of a one-point closed grid sits at 1, outside Γ
        self.grid.sorted(j)[i.min(self.grid.num_points())]
    }

    /// `b_j = Σ_i y_ji ū_ij`.
    fn coords(&self, y: &[f64]) -> Vec<f64> {
        self.partition
            .blocks()
            .map(|(j, r)| {
                y[r].iter()
                    .enumerate()
                    .map(|(i, v)| v * self.grid_value(j, i))
                    .sum()
            })
            .collect()
    }

    /// `z` as an `N × d` row-major matrix.
    fn masses(&self, y: &[f64]) -> Vec<f64> {
        let (n, d, b) = (self.grid.num_points(), self.grid.dim(), self.block_len());
        let mut z = vec![0.0; n * d];
        let mut suffix = vec![0.0; b + 1];
        for (j, r) in self.partition.blocks() {
            let block = &y[r];
            for i in (0..b).rev() {
                suffix[i] = suffix[i + 1] + block[i];
            }
            for p in 0..n {
                z[p * d + j] = suffix[self.first_counted(self.grid.rank(p, j)).min(b)];
            }
        }
        z
    }

    /// `ν(y)`, the multilinear box volume.
    pub fn nu(&self, y: &[f64]) -> f64 {
        self.coords(y).iter().product()
    }

    /// `α(y)`, the multilinear point count.
    pub fn alpha(&self, y: &[f64]) -> f64 {
        let d = self.grid.dim();
        self.masses(y)
            .chunks(d)
            .map(|row| row.iter().product::<f64>())
            .sum()
    }

    /// `δ` or `δ̄` at `y`, i.e. `−f(y)`.
    pub fn discrepancy(&self, y: &[f64]) -> f64 {
        -self.value(y)
    }

    /// Box corner selected by a Boolean point.
    pub fn decode(&self, x: &BooleanSolution) -> Vec<f64> {
        x.choices
            .iter()
            .enumerate()
            .map(|(j, &s)| self.grid_value(j, s))
            .collect()
    }

    /// Preimage of `u` whose point count is exact: the smallest matching grid index per
    /// dimension for the open box, the largest for the closed one. `None` if `u` is not
    /// a corner of this objective's grid.
    pub fn canonical_preimage(&self, u: &[f64]) -> Option<BooleanSolution> {
        let b = self.block_len();
        let choices = u
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let mut hits = (0..b).filter(|&i| self.grid_value(j, i) == v);
                match self.kind {
                    BoxKind::Open => hits.next(),
                    BoxKind::Closed => hits.next_back(),
                }
            })
            .collect::<Option<Vec<usize>>>()?;
        Some(BooleanSolution { choices })
    }
}

impl Objective for DiscrepancyObjective<'_> {
    fn partition(&self) -> &Partition {
        &self.partition
    }

    fn value(&self, y: &[f64]) -> f64 {
        let delta_like = self.nu(y) - self.alpha(y) / self.grid.num_points() as f64;
        match self.kind {
            BoxKind::Open => -delta_like,
            BoxKind::Closed => delta_like,
        }
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        let (n, d, b) = (self.grid.num_points(), self.grid.dim(), self.block_len());
        let inv_n = 1.0 / n as f64;
        let sign = match self.kind {
            BoxKind::Open => -1.0,
            BoxKind::Closed => 1.0,
        };

        let coords = self.coords(y);
        let mut other_coords = vec![0.0; d];
        products_except_one(&coords, &mut other_coords);

        let z = self.masses(y);
        let mut g = vec![0.0; n * d];
        for (zr, gr) in z.chunks(d).zip(g.chunks_mut(d)) {
            products_except_one(zr, gr);
        }

        let mut by_rank = vec![0.0; b];
        for (j, r) in self.partition.blocks() {
            // ∂α/∂y_ji = Σ over points whose first counted index is ≤ i
            by_rank.iter_mut().for_each(|v| *v = 0.0);
            for rank in 0..n {
                let p = self.grid.point_at_rank(j, rank);
                let k = self.first_counted(rank);
                if k < b {
                    by_rank[k] += g[p * d + j];
                }
            }
            let o = &mut out[r];
            let mut dalpha = 0.0;
            for i in 0..b {
                dalpha += by_rank[i];
                let dnu = self.grid_value(j, i) * other_coords[j];
                o[i] = sign * (dnu - inv_n * dalpha);
            }
        }
    }
}
