use crate::error::{Error, Result};

use super::points::PointSet;

/// Largest `(N+1)^d` the exact enumeration accepts.
pub const ENUMERATION_LIMIT: f64 = 1e7;

fn volume(u: &[f64]) -> f64 {
    u.iter().product()
}

/// `vol(u) − |[0,u) ∩ U| / N`.
pub fn eval_d(u: &[f64], points: &PointSet) -> f64 {
    let a = points
        .points()
        .filter(|p| p.iter().zip(u).all(|(c, b)| c < b))
        .count();
    volume(u) - a as f64 / points.len() as f64
}

/// `|[0,u] ∩ U| / N − vol(u)`.
pub fn eval_dbar(u: &[f64], points: &PointSet) -> f64 {
    let a = points
        .points()
        .filter(|p| p.iter().zip(u).all(|(c, b)| c <= b))
        .count();
    a as f64 / points.len() as f64 - volume(u)
}

/// Maximizer of `D` or `D̄` over a critical grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMaximum {
    pub value: f64,
    pub point: Vec<f64>,
}

struct Sweep<'a> {
    points: &'a PointSet,
    closed: bool,
    /// distinct candidate values per dimension, ascending
    candidates: Vec<Vec<f64>>,
    best: GridMaximum,
    u: Vec<f64>,
}

impl Sweep<'_> {
    /// `inside` holds the points already inside the box in dimensions `< j`.
    fn run(&mut self, j: usize, inside: &[usize], vol: f64) {
        let d = self.points.dim();
        let n = self.points.len() as f64;
        let mut members = inside.to_vec();
        members.sort_by(|&a, &b| self.points.point(a)[j].total_cmp(&self.points.point(b)[j]));
        let mut taken = 0;
        for ci in 0..self.candidates[j].len() {
            let c = self.candidates[j][ci];
            while taken < members.len() {
                let x = self.points.point(members[taken])[j];
                if x < c || (self.closed && x == c) {
                    taken += 1;
                } else {
                    break;
                }
            }
            self.u[j] = c;
            let v = vol * c;
            if j + 1 == d {
                let val = if self.closed {
                    taken as f64 / n - v
                } else {
                    v - taken as f64 / n
                };
                if val > self.best.value {
                    self.best = GridMaximum {
                        value: val,
                        point: self.u.clone(),
                    };
                }
            } else {
                let next = members[..taken].to_vec();
                self.run(j + 1, &next, v);
            }
        }
    }
}

fn check_budget(points: &PointSet) -> Result<()> {
    let required = (points.len() as f64 + 1.0).powi(points.dim() as i32);
    if required > ENUMERATION_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "exact star-discrepancy enumeration (N+1)^d",
            required,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn grid_max(points: &PointSet, closed: bool) -> Result<GridMaximum> {
    check_budget(points)?;
    let d = points.dim();
    let candidates = (0..d)
        .map(|j| {
            let mut c: Vec<f64> = points.points().map(|p| p[j]).collect();
            if !closed {
                c.push(1.0);
            }
            c.sort_by(f64::total_cmp);
            c.dedup();
            c
        })
        .collect();
    let mut sweep = Sweep {
        points,
        closed,
        candidates,
        best: GridMaximum {
            value: f64::NEG_INFINITY,
            point: vec![],
        },
        u: vec![0.0; d],
    };
    let all: Vec<usize> = (0..points.len()).collect();
    sweep.run(0, &all, 1.0);
    Ok(sweep.best)
}

/// `max D(u)` over `Γ̄(U)` (coordinates of the points, plus `1`).
pub fn max_d_over_grid(points: &PointSet) -> Result<GridMaximum> {
    grid_max(points, false)
}

/// `max D̄(u)` over `Γ(U)` (coordinates of the points).
pub fn max_dbar_over_grid(points: &PointSet) -> Result<GridMaximum> {
    grid_max(points, true)
}

/// Exact `d*_∞(U)` by enumerating both critical grids. Refuses when
/// `(N+1)^d > ENUMERATION_LIMIT`.
pub fn exact_star_discrepancy(points: &PointSet) -> Result<f64> {
    Ok(max_d_over_grid(points)?
        .value
        .max(max_dbar_over_grid(points)?.value))
}
