//! Exact master-equation machinery for small instances: the single-block jump chain
//! whose stationary law is the Boltzmann distribution `∝ e^{−f/T}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::softmax_into;
use crate::model::{BooleanSolution, Objective, Partition};
use crate::solver::{integrate_to_equilibrium, EquilibriumLimits, StepController};

/// Largest `|X|` for which the chain is built.
pub const STATE_BUDGET: f64 = 1e4;

/// Largest `|X|` for the dense stationary solve.
pub const DENSE_BUDGET: usize = 4096;

/// Every Boolean feasible point, last block varying fastest.
pub fn enumerate_states(partition: &Partition) -> Result<Vec<BooleanSolution>> {
    let required = partition.num_feasible();
    if required > STATE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "CTMC state space Π d_j",
            required,
            limit: STATE_BUDGET,
        });
    }
    let sizes = partition.block_sizes();
    let mut out = Vec::with_capacity(required as usize);
    let mut choices = vec![0; sizes.len()];
    loop {
        out.push(BooleanSolution {
            choices: choices.clone(),
        });
        let mut j = sizes.len();
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            choices[j] += 1;
            if choices[j] < sizes[j] {
                break;
            }
            choices[j] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtmcInstance {
    partition: Partition,
    temperature: f64,
    states: Vec<BooleanSolution>,
    values: Vec<f64>,
    /// Off-diagonal rates per state, `(target, q)`.
    transitions: Vec<Vec<(usize, f64)>>,
    /// `q(x→x) = −Σ_{x'≠x} q(x→x')`.
    diagonal: Vec<f64>,
}

/// Rates `q(x→x') = σ_{i'}(−Φ^(j)(x); 1/T)` for moves that change block `j` to choice
/// `i'`, zero for anything else.
pub fn build_ctmc<O: Objective + ?Sized>(obj: &O, temperature: f64) -> Result<CtmcInstance> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::invalid(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let p = obj.partition().clone();
    let states = enumerate_states(&p)?;
    let sizes = p.block_sizes().to_vec();
    let mut strides = vec![1usize; sizes.len()];
    for j in (0..sizes.len().saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * sizes[j + 1];
    }

    let mut values = Vec::with_capacity(states.len());
    let mut transitions = Vec::with_capacity(states.len());
    let mut diagonal = Vec::with_capacity(states.len());
    let mut phi = vec![0.0; p.max_block_size()];
    let mut sigma = vec![0.0; p.max_block_size()];
    for (s, x) in states.iter().enumerate() {
        let dense = x.to_dense(&p);
        values.push(obj.value(&dense));
        let mut row = Vec::new();
        for (j, r) in p.blocks() {
            let d = r.len();
            let (phi, sigma) = (&mut phi[..d], &mut sigma[..d]);
            obj.block_gradient(&dense, j, phi);
            phi.iter_mut().for_each(|v| *v = -*v);
            softmax_into(phi, 1.0 / temperature, sigma)?;
            let cur = x.choices[j];
            for (i, &q) in sigma.iter().enumerate() {
                if i != cur {
                    let target = s - cur * strides[j] + i * strides[j];
                    row.push((target, q));
                }
            }
        }
        diagonal.push(-row.iter().map(|t| t.1).sum::<f64>());
        transitions.push(row);
    }
    Ok(CtmcInstance {
        partition: p,
        temperature,
        states,
        values,
        transitions,
        diagonal,
    })
}

impl CtmcInstance {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BooleanSolution] {
        &self.states
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn transitions(&self, s: usize) -> &[(usize, f64)] {
        &self.transitions[s]
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// `q(from→to)`, including the diagonal.
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        if from == to {
            return self.diagonal[from];
        }
        self.transitions[from]
            .iter()
            .find(|t| t.0 == to)
            .map_or(0.0, |t| t.1)
    }

    /// Dense `Q` with `Q[x][x'] = q(x→x')`.
    pub fn q_matrix(&self) -> DMatrix<f64> {
        let n = self.num_states();
        let mut q = DMatrix::zeros(n, n);
        for s in 0..n {
            q[(s, s)] = self.diagonal[s];
            for &(t, r) in &self.transitions[s] {
                q[(s, t)] += r;
            }
        }
        q
    }

    /// Expected state vector in `[0,1]^n` under distribution `p`.
    pub fn mean_of(&self, p: &[f64]) -> Vec<f64> {
        let mut m = vec![0.0; self.partition.len()];
        for (x, &w) in self.states.iter().zip(p) {
            for (j, &c) in x.choices.iter().enumerate() {
                m[self.partition.offset(j) + c] += w;
            }
        }
        m
    }

    fn shifted_weights(&self) -> Vec<f64> {
        let fmin = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        self.values
            .iter()
            .map(|f| (-(f - fmin) / self.temperature).exp())
            .collect()
    }

    #[cfg(test)]
    pub(crate) fn set_rate(&mut self, from: usize, to: usize, q: f64) {
        let t = self.transitions[from]
            .iter_mut()
            .find(|t| t.0 == to)
            .unwrap();
        self.diagonal[from] += t.1 - q;
        t.1 = q;
    }
}

/// `max |e^{−f(x)/T} q(x→x') − e^{−f(x')/T} q(x'→x)|` over allowed transitions, with `f`
/// shifted by its minimum.
pub fn check_detailed_balance(ctmc: &CtmcInstance) -> f64 {
    let w = ctmc.shifted_weights();
    let mut worst: f64 = 0.0;
    for s in 0..ctmc.num_states() {
        for &(t, q) in ctmc.transitions(s) {
            worst = worst.max((w[s] * q - w[t] * ctmc.rate(t, s)).abs());
        }
    }
    worst
}

/// `e^{−f(x)/T} / Σ e^{−f/T}` per state.
pub fn boltzmann_distribution(ctmc: &CtmcInstance) -> Vec<f64> {
    let w = ctmc.shifted_weights();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// `Σ_x x e^{−f(x)/T} / Σ_x e^{−f(x)/T}`.
pub fn boltzmann_mean(ctmc: &CtmcInstance) -> Vec<f64> {
    ctmc.mean_of(&boltzmann_distribution(ctmc))
}

/// Solves `Qᵀπ = 0`, `Σπ = 1` by dense LU.
pub fn stationary_distribution(ctmc: &CtmcInstance) -> Result<Vec<f64>> {
    let n = ctmc.num_states();
    if n > DENSE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "dense stationary solve |X|",
            required: n as f64,
            limit: DENSE_BUDGET as f64,
        });
    }
    let mut a = ctmc.q_matrix().transpose();
    a.row_mut(n - 1).fill(1.0);
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu()
        .solve(&b)
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::invalid("singular generator: chain is not irreducible"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrajectory {
    pub times: Vec<f64>,
    /// Mean state at each recorded time.
    pub means: Vec<Vec<f64>>,
    /// Distribution at `t_end`.
    pub distribution: Vec<f64>,
}

/// Explicit Euler on `dp/dt = Qᵀp` with `⌈t_end/dt⌉` equal steps.
pub fn integrate_forward_equation(
    ctmc: &CtmcInstance,
    p0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<ForwardTrajectory> {
    let n = ctmc.num_states();
    if p0.len() != n {
        return Err(Error::invalid(format!(
            "distribution has {} entries, expected {n}",
            p0.len()
        )));
    }
    if p0.iter().any(|&v| !(v >= 0.0)) || (p0.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(
            "initial distribution must be nonnegative and sum to 1",
        ));
    }
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(Error::invalid("need dt > 0 and t_end ≥ 0"));
    }
    let steps = (t_end / dt).ceil() as usize;
    let h = if steps == 0 {
        0.0
    } else {
        t_end / steps as f64
    };
    let min_diag = ctmc.diagonal().iter().copied().fold(0.0, f64::min);
    if 1.0 + h * min_diag < 0.0 {
        return Err(Error::invalid(format!(
            "unstable step: 1 + dt·min q(x→x) = {} < 0",
            1.0 + h * min_diag
        )));
    }

    let mut p = p0.to_vec();
    let mut next = vec![0.0; n];
    let mut times = vec![0.0];
    let mut means = vec![ctmc.mean_of(&p)];
    for k in 0..steps {
        for (s, v) in next.iter_mut().enumerate() {
            *v = p[s] * (1.0 + h * ctmc.diagonal[s]);
        }
        for (s, &ps) in p.iter().enumerate() {
            for &(t, q) in ctmc.transitions(s) {
                next[t] += h * q * ps;
            }
        }
        std::mem::swap(&mut p, &mut next);
        times.push((k + 1) as f64 * h);
        means.push(ctmc.mean_of(&p));
    }
    Ok(ForwardTrajectory {
        times,
        means,
        distribution: p,
    })
}

/// `‖ȳ − E_Boltzmann[x]‖_∞` for the ODE equilibrium reached from `y0` at the chain's
/// temperature. Measures the mean-field closure error; there is no bound to check it
/// against.
pub fn mean_field_gap<O: Objective + ?Sized>(
    obj: &O,
    ctmc: &CtmcInstance,
    y0: &[f64],
) -> Result<f64> {
    let mut ctrl = StepController::new(1e-8, 1.1)?;
    let limits = EquilibriumLimits {
        tol_eq: 1e-13,
        max_steps: 1_000_000,
    };
    let eq = integrate_to_equilibrium(obj, y0, ctmc.temperature(), &mut ctrl, &limits)?;
    let exact = boltzmann_mean(ctmc);
    Ok(eq
        .state
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
