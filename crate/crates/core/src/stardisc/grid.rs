use super::points::PointSet;

/// Per-dimension sorted coordinates with `1` appended, plus each point's 0-based rank.
#[derive(Debug, Clone, PartialEq)]
pub struct GridIndex {
    n: usize,
    d: usize,
    /// `sorted[j]` has `N + 1` entries, the last being `1`.
    sorted: Vec<Vec<f64>>,
    /// `rank[p * d + j]`: position of `u^p_j` in `sorted[j]`.
    rank: Vec<usize>,
    /// `at_rank[j][r]`: the point holding rank `r` in dimension `j`.
    at_rank: Vec<Vec<usize>>,
}

/// Sorts every dimension stably, so equal coordinates keep their original point order.
pub fn preprocess(u: &PointSet) -> GridIndex {
    let (n, d) = (u.len(), u.dim());
    let mut sorted = Vec::with_capacity(d);
    let mut at_rank = Vec::with_capacity(d);
    let mut rank = vec![0; n * d];
    for j in 0..d {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| u.point(a)[j].total_cmp(&u.point(b)[j]));
        let mut col: Vec<f64> = order.iter().map(|&p| u.point(p)[j]).collect();
        col.push(1.0);
        for (r, &p) in order.iter().enumerate() {
            rank[p * d + j] = r;
        }
        sorted.push(col);
        at_rank.push(order);
    }
    GridIndex {
        n,
        d,
        sorted,
        rank,
        at_rank,
    }
}

impl GridIndex {
    pub fn num_points(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn sorted(&self, j: usize) -> &[f64] {
        &self.sorted[j]
    }

    pub fn rank(&self, p: usize, j: usize) -> usize {
        self.rank[p * self.d + j]
    }

    pub fn point_at_rank(&self, j: usize, r: usize) -> usize {
        self.at_rank[j][r]
    }

    /// Grid point selected by per-dimension indices `s_j` into `sorted(j)`.
    pub fn decode(&self, choices: &[usize]) -> Vec<f64> {
        choices
            .iter()
            .enumerate()
            .map(|(j, &s)| self.sorted[j][s])
            .collect()
    }

    /// Smallest index `s_j` with `sorted(j)[s_j] = u_j`, per dimension; `None` if some
    /// `u_j` is not a grid value.
    pub fn canonical_indices(&self, u: &[f64]) -> Option<Vec<usize>> {
        u.iter()
            .enumerate()
            .map(|(j, &v)| self.sorted[j].iter().position(|&s| s == v))
            .collect()
    }
}
