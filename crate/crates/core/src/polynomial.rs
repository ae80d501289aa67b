//! Programmatic multilinear polynomials, usable directly as MCPP objectives.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Objective, Partition};

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    /// Sorted flat variable indices, at most one per block.
    pub vars: Vec<usize>,
}

/// `f(y) = Σ c_t Π_{i ∈ t} y_i`, normalized so that no monomial touches a block twice.
#[derive(Debug, Clone)]
pub struct Polynomial {
    partition: Partition,
    terms: Vec<Monomial>,
    block_of: Vec<usize>,
}

fn block_index(partition: &Partition) -> Vec<usize> {
    let mut block_of = vec![0; partition.len()];
    for (j, r) in partition.blocks() {
        block_of[r].iter_mut().for_each(|b| *b = j);
    }
    block_of
}

impl Polynomial {
    /// Builds the polynomial from `(coefficient, variables)` pairs.
    ///
    /// Repeated variables collapse (`x² = x` on Booleans) and monomials holding two
    /// distinct variables of the same block are dropped, since they vanish on the
    /// feasible set. This is the affine normal form.
    pub fn new(partition: Partition, terms: Vec<(f64, Vec<usize>)>) -> Result<Self> {
        let block_of = block_index(&partition);
        let mut out = Vec::with_capacity(terms.len());
        'terms: for (coeff, mut vars) in terms {
            if !coeff.is_finite() {
                return Err(Error::invalid("non-finite polynomial coefficient"));
            }
            if let Some(&v) = vars.iter().find(|&&v| v >= partition.len()) {
                return Err(Error::invalid(format!("variable {v} out of range")));
            }
            vars.sort_unstable();
            vars.dedup();
            for w in vars.windows(2) {
                if block_of[w[0]] == block_of[w[1]] {
                    continue 'terms;
                }
            }
            if coeff != 0.0 {
                out.push(Monomial { coeff, vars });
            }
        }
        Ok(Polynomial {
            partition,
            terms: out,
            block_of,
        })
    }

    pub fn zero(partition: Partition) -> Self {
        Polynomial::new(partition, Vec::new()).unwrap()
    }

    /// `f(y) = c·y`.
    pub fn linear(partition: Partition, coeffs: &[f64]) -> Result<Self> {
        partition.check_len(coeffs)?;
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, vec![i]))
            .collect();
        Polynomial::new(partition, terms)
    }

    /// Random polynomial with `num_terms` monomials of degree `0..=max_degree`,
    /// coefficients uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(
        partition: &Partition,
        max_degree: usize,
        num_terms: usize,
        rng: &mut R,
    ) -> Self {
        let m = partition.num_blocks();
        let mut terms = Vec::with_capacity(num_terms);
        for _ in 0..num_terms {
            let degree = rng.random_range(0..=max_degree.min(m));
            let mut blocks: Vec<usize> = (0..m).collect();
            // partial Fisher-Yates for `degree` distinct blocks
            for k in 0..degree {
                let pick = rng.random_range(k..m);
                blocks.swap(k, pick);
            }
            let vars = blocks[..degree]
                .iter()
                .map(|&j| partition.offset(j) + rng.random_range(0..partition.block_size(j)))
                .collect();
            terms.push((rng.random_range(-1.0..=1.0), vars));
        }
        Polynomial::new(partition.clone(), terms).unwrap()
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.vars.len()).max().unwrap_or(0)
    }
}

impl Objective for Polynomial {
    fn partition(&self) -> &Partition {
        &self.partition
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for t in &self.terms {
            for (p, &v) in t.vars.iter().enumerate() {
                let mut prod = t.coeff;
                for (q, &w) in t.vars.iter().enumerate() {
                    if q != p {
                        prod *= y[w];
                    }
                }
                out[v] += prod;
            }
        }
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.vars.iter().fold(t.coeff, |acc, &v| acc * y[v]))
            .sum()
    }

    fn block_gradient(&self, y: &[f64], block: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let off = self.partition.offset(block);
        for t in &self.terms {
            if let Some(p) = t.vars.iter().position(|&v| self.block_of[v] == block) {
                let prod = t
                    .vars
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != p)
                    .fold(t.coeff, |acc, (_, &w)| acc * y[w]);
                out[t.vars[p] - off] += prod;
            }
        }
    }
}

/// A pseudo-Boolean function of free (unconstrained) variables.
pub trait BooleanFunction: Send + Sync {
    fn num_vars(&self) -> usize;
    /// `∂f/∂x_i` for all `i`, written into `out`.
    fn partials(&self, x: &[f64], out: &mut [f64]);
    fn value(&self, x: &[f64]) -> f64;
}

/// Multilinear polynomial over free Boolean variables.
#[derive(Debug, Clone)]
pub struct FreePolynomial {
    num_vars: usize,
    terms: Vec<Monomial>,
}

impl FreePolynomial {
    pub fn new(num_vars: usize, terms: Vec<(f64, Vec<usize>)>) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for (coeff, mut vars) in terms {
            if vars.iter().any(|&v| v >= num_vars) {
                return Err(Error::invalid("variable out of range"));
            }
            vars.sort_unstable();
            vars.dedup();
            out.push(Monomial { coeff, vars });
        }
        Ok(FreePolynomial {
            num_vars,
            terms: out,
        })
    }
}

impl BooleanFunction for FreePolynomial {
    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn partials(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for t in &self.terms {
            for (p, &v) in t.vars.iter().enumerate() {
                let prod = t
                    .vars
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != p)
                    .fold(t.coeff, |acc, (_, &w)| acc * x[w]);
                out[v] += prod;
            }
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.vars.iter().fold(t.coeff, |acc, &v| acc * x[v]))
            .sum()
    }
}

/// MCPP form of an unconstrained problem `min f(x), x ∈ {0,1}^n`.
///
/// Each free variable `x_j` becomes a block of size two holding `(x_j, 1 − x_j)`,
/// stored contiguously at flat indices `2j, 2j+1`. Then `Φ^(j) = (∂f/∂x_j, 0)`
/// and the first coordinate follows `dy/dt = −y + ½(tanh(−∂f/∂x / 2T) + 1)`.
#[derive(Debug, Clone)]
pub struct Unconstrained<F> {
    inner: F,
    partition: Partition,
}

pub fn reformulate_unconstrained<F: BooleanFunction>(f: F) -> Result<Unconstrained<F>> {
    let partition = Partition::uniform(f.num_vars(), 2)?;
    Ok(Unconstrained {
        inner: f,
        partition,
    })
}

impl<F: BooleanFunction> Unconstrained<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }

    /// Projects a flat MCPP state onto the free variables (first entry of each block).
    pub fn free_vars(&self, y: &[f64]) -> Vec<f64> {
        y.iter().step_by(2).copied().collect()
    }
}

impl<F: BooleanFunction> Objective for Unconstrained<F> {
    fn partition(&self) -> &Partition {
        &self.partition
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        let x = self.free_vars(y);
        let mut partials = vec![0.0; x.len()];
        self.inner.partials(&x, &mut partials);
        for (j, g) in partials.into_iter().enumerate() {
            out[2 * j] = g;
            out[2 * j + 1] = 0.0;
        }
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.inner.value(&self.free_vars(y))
    }
}
