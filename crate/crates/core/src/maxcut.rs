//! MAX-k-CUT as an MCPP instance.
//!
//! Vertex `v` is a block of `k` choices; `f(x) = −Σ_{i<j} w_ij (1 − x^(i)·x^(j))`, so
//! minimizing `f` maximizes the cut. With `P` the `k × |V|` label matrix,
//! `f = −w_tot + ½ tr(P W Pᵀ)` and `∂f/∂P = P W`, evaluated row by row over the sparse
//! adjacency in `O(k|E|)`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::model::{BooleanSolution, Objective, Partition};
use crate::solver::{best_trial, run_trials, AnnealSchedule, SolveFlags, StepController};

/// Undirected weighted graph with 0-based vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_vertices: usize,
    /// Merged edges `(i, j, w)` with `i < j`, sorted.
    edges: Vec<(usize, usize, f64)>,
    row_start: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    total_weight: f64,
}

impl Graph {
    /// Builds a graph from 0-based edges. Self-loops are rejected; parallel edges are
    /// merged by summing weights.
    pub fn from_edges(
        num_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (a, b, w) in edges {
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::invalid(format!(
                    "edge ({a}, {b}) out of range for {num_vertices} vertices"
                )));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            if !w.is_finite() {
                return Err(Error::invalid("non-finite edge weight"));
            }
            *merged.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
        }
        let edges: Vec<(usize, usize, f64)> =
            merged.into_iter().map(|((a, b), w)| (a, b, w)).collect();

        let mut degree = vec![0usize; num_vertices];
        for &(a, b, _) in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut row_start = vec![0; num_vertices + 1];
        for v in 0..num_vertices {
            row_start[v + 1] = row_start[v] + degree[v];
        }
        let mut fill = row_start.clone();
        let mut neighbors = vec![0; 2 * edges.len()];
        let mut weights = vec![0.0; 2 * edges.len()];
        for &(a, b, w) in &edges {
            neighbors[fill[a]] = b;
            weights[fill[a]] = w;
            fill[a] += 1;
            neighbors[fill[b]] = a;
            weights[fill[b]] = w;
            fill[b] += 1;
        }
        let total_weight = edges.iter().map(|e| e.2).sum();
        Ok(Graph {
            num_vertices,
            edges,
            row_start,
            neighbors,
            weights,
            total_weight,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// `w_tot = Σ w_ij`.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// `(neighbor, weight)` pairs of row `v` of `W`.
    pub fn row(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_start[v]..self.row_start[v + 1];
        self.neighbors[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }

    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.row(v).map(|(_, w)| w).sum()
    }
}

/// Parses the G-Set text format: a `|V| |E|` header followed by `|E|` lines `i j w`
/// with 1-based vertices. Blank lines are skipped.
pub fn parse_gset(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `|V| |E|` header"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(Error::parse(hline, "header must be `|V| |E|`"));
    }
    let nv: usize = head[0]
        .parse()
        .map_err(|_| Error::parse(hline, format!("bad vertex count `{}`", head[0])))?;
    let ne: usize = head[1]
        .parse()
        .map_err(|_| Error::parse(hline, format!("bad edge count `{}`", head[1])))?;

    let mut edges = Vec::with_capacity(ne);
    for (lineno, line) in lines {
        if edges.len() == ne {
            return Err(Error::parse(
                lineno,
                format!("more than the declared {ne} edges"),
            ));
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(lineno, "edge line must be `i j w`"));
        }
        let vertex = |s: &str| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad vertex `{s}`")))?;
            if v == 0 || v > nv {
                return Err(Error::parse(lineno, format!("vertex {v} outside 1..={nv}")));
            }
            Ok(v - 1)
        };
        let a = vertex(f[0])?;
        let b = vertex(f[1])?;
        if a == b {
            return Err(Error::parse(
                lineno,
                format!("self-loop at vertex {}", a + 1),
            ));
        }
        let w: f64 = f[2]
            .parse()
            .ok()
            .filter(|w: &f64| w.is_finite())
            .ok_or_else(|| Error::parse(lineno, format!("bad weight `{}`", f[2])))?;
        edges.push((a, b, w));
    }
    if edges.len() != ne {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!("expected {ne} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(nv, edges)
}

/// Vertex labels in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutAssignment {
    pub labels: Vec<usize>,
}

impl CutAssignment {
    pub fn from_solution(x: &BooleanSolution) -> Self {
        CutAssignment {
            labels: x.choices.clone(),
        }
    }

    pub fn to_solution(&self) -> BooleanSolution {
        BooleanSolution {
            choices: self.labels.clone(),
        }
    }
}

/// Total weight of edges whose endpoints carry different labels.
pub fn cut_value(g: &Graph, a: &CutAssignment) -> f64 {
    assert_eq!(a.labels.len(), g.num_vertices(), "one label per vertex");
    g.edges()
        .iter()
        .filter(|(i, j, _)| a.labels[*i] != a.labels[*j])
        .map(|e| e.2)
        .sum()
}

/// Temperature above which the all-uniform state is a stable equilibrium.
///
/// Linearising at `y = 1/k` gives `δ' = −δ − Wδ/(kT)` on the sum-zero directions, so
/// the uniform point is stable exactly for `T > |λ_min(W)|/k` (zero if `W ⪰ 0`). A
/// starting temperature above this yields the uninformative equilibrium from any start.
/// Dense eigendecomposition, `O(|V|³)`.
pub fn uniform_critical_temperature(g: &Graph, k: usize) -> f64 {
    let n = g.num_vertices();
    let mut w = nalgebra::DMatrix::<f64>::zeros(n, n);
    for &(a, b, x) in g.edges() {
        w[(a, b)] += x;
        w[(b, a)] += x;
    }
    let lmin = w
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(0.0, f64::min);
    -lmin / k as f64
}

/// The MAX-k-CUT defaults with `T_1` lowered to `0.9·T_c` when `T_c` (see
/// [`uniform_critical_temperature`]) lies below the default, so the first equilibrium
/// carries information.
pub fn informative_schedule(g: &Graph, k: usize) -> AnnealSchedule {
    let mut s = AnnealSchedule::maxcut_default();
    let tc = uniform_critical_temperature(g, k);
    if tc > 0.0 {
        s.t1 = s.t1.min(0.9 * tc);
    }
    s
}

/// MCPP objective of MAX-k-CUT on a borrowed graph.
#[derive(Debug)]
pub struct MaxKCut<'g> {
    graph: &'g Graph,
    k: usize,
    partition: Partition,
    mult_adds: AtomicU64,
}

impl<'g> MaxKCut<'g> {
    pub fn new(graph: &'g Graph, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!("k must be at least 2, got {k}")));
        }
        if graph.num_vertices() == 0 {
            return Err(Error::invalid("graph has no vertices"));
        }
        Ok(MaxKCut {
            graph,
            k,
            partition: Partition::uniform(graph.num_vertices(), k)?,
            mult_adds: AtomicU64::new(0),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    /// Arithmetic operations spent in full gradient evaluations so far: one per stored
    /// adjacency entry and label, plus one per output entry.
    pub fn mult_adds(&self) -> u64 {
        self.mult_adds.load(Ordering::Relaxed)
    }
}

impl Objective for MaxKCut<'_> {
    fn partition(&self) -> &Partition {
        &self.partition
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        let k = self.k;
        for v in 0..self.graph.num_vertices() {
            let o = &mut out[v * k..(v + 1) * k];
            o.iter_mut().for_each(|x| *x = 0.0);
            for (u, w) in self.graph.row(v) {
                for (oi, yi) in o.iter_mut().zip(&y[u * k..(u + 1) * k]) {
                    *oi += w * yi;
                }
            }
        }
        self.mult_adds.fetch_add(
            ((2 * self.graph.num_edges() + self.graph.num_vertices()) * k) as u64,
            Ordering::Relaxed,
        );
    }

    fn block_gradient(&self, y: &[f64], v: usize, out: &mut [f64]) {
        let k = self.k;
        out.iter_mut().for_each(|x| *x = 0.0);
        for (u, w) in self.graph.row(v) {
            for (oi, yi) in out.iter_mut().zip(&y[u * k..(u + 1) * k]) {
                *oi += w * yi;
            }
        }
    }

    fn value(&self, y: &[f64]) -> f64 {
        let k = self.k;
        let same: f64 = self
            .graph
            .edges()
            .iter()
            .map(|&(a, b, w)| {
                let dot: f64 = y[a * k..(a + 1) * k]
                    .iter()
                    .zip(&y[b * k..(b + 1) * k])
                    .map(|(p, q)| p * q)
                    .sum();
                w * dot
            })
            .sum();
        same - self.graph.total_weight()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxCutTrial {
    pub seed: u64,
    pub cut: f64,
    pub steps: usize,
    pub temperatures: usize,
    pub flags: SolveFlags,
    pub assignment: CutAssignment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxCutReport {
    pub trials: Vec<MaxCutTrial>,
    pub best_index: usize,
}

impl MaxCutReport {
    pub fn best(&self) -> &MaxCutTrial {
        &self.trials[self.best_index]
    }
}

/// Anneals from `trials` seeded random starts (seeds `seed, seed+1, …`) and keeps the
/// largest cut.
pub fn solve_maxkcut(
    g: &Graph,
    k: usize,
    trials: usize,
    schedule: &AnnealSchedule,
    ctrl: &StepController,
    seed: u64,
) -> Result<MaxCutReport> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let obj = MaxKCut::new(g, k)?;
    let outcomes = run_trials(&obj, schedule, ctrl, seed, trials)?;
    let best_seed = best_trial(&outcomes).map(|o| o.seed).unwrap();
    let trials: Vec<MaxCutTrial> = outcomes
        .into_iter()
        .map(|o| {
            let assignment = CutAssignment::from_solution(&o.trace.solution);
            MaxCutTrial {
                seed: o.seed,
                cut: cut_value(g, &assignment),
                steps: o.trace.total_steps,
                temperatures: o.trace.temperatures_visited(),
                flags: o.trace.flags,
                assignment,
            }
        })
        .collect();
    let best_index = trials.iter().position(|t| t.seed == best_seed).unwrap();
    Ok(MaxCutReport { trials, best_index })
}
