use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

use super::NetworkInstance;

/// Mean, covariance, safety factor and demand of one cut constraint,
/// indexed locally over the arcs of the cut.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityModel {
    pub mu: Vec<f64>,
    pub cov: SymMatrix,
    pub omega: f64,
    pub demand: f64,
}

impl CapacityModel {
    pub fn new(mu: Vec<f64>, cov: SymMatrix, omega: f64, demand: f64) -> Result<Self> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("omega must be >= 0, got {omega}")));
        }
        if cov.dim() != mu.len() {
            return Err(Error::domain("covariance and mean dimensions differ"));
        }
        Ok(CapacityModel {
            mu,
            cov,
            omega,
            demand,
        })
    }

    /// Model restricted to the arcs `arc_ids` of `inst`. Local index `k`
    /// refers to arc `arc_ids[k]`.
    pub fn for_arcs(inst: &NetworkInstance, arc_ids: &[usize], omega: f64) -> Self {
        CapacityModel {
            mu: arc_ids.iter().map(|&a| inst.arcs[a].mu).collect(),
            cov: inst.cov().restrict(arc_ids),
            omega,
            demand: inst.demand,
        }
    }

    /// Model over all arcs of `inst`.
    pub fn full(inst: &NetworkInstance, omega: f64) -> Self {
        let ids: Vec<usize> = (0..inst.num_arcs()).collect();
        Self::for_arcs(inst, &ids, omega)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.cov.is_diagonal()
    }

    pub fn sigma(&self, i: usize) -> f64 {
        self.cov.get(i, i).max(0.0).sqrt()
    }

    pub fn mean(&self, x: &[f64]) -> f64 {
        self.mu.iter().zip(x).map(|(m, v)| m * v).sum()
    }

    /// `x' Sigma x`, clamped at zero against round-off.
    pub fn variance(&self, x: &[f64]) -> f64 {
        self.cov.quad(x).max(0.0)
    }

    /// Cut capacity `f(x) = mu'x - Omega sqrt(x' Sigma x)`.
    pub fn eval_f(&self, x: &[f64]) -> f64 {
        self.mean(x) - self.omega * self.variance(x).sqrt()
    }

    /// `f` at the indicator vector of `set`.
    pub fn eval_f_set(&self, set: &[bool]) -> f64 {
        self.eval_f(&indicator(set))
    }

    /// Whether `x` meets demand within `tol`.
    pub fn satisfied(&self, x: &[f64], tol: f64) -> bool {
        self.eval_f(x) >= self.demand - tol
    }

    /// Coefficients of `q(x) = Omega^2 x'Sigma x - (mu'x - d)^2` on binaries.
    pub fn quadratic_form(&self) -> QuadraticForm {
        let n = self.len();
        let w2 = self.omega * self.omega;
        let d = self.demand;
        let alpha = (0..n)
            .map(|i| w2 * self.cov.get(i, i) + 2.0 * self.mu[i] * d - self.mu[i] * self.mu[i])
            .collect();
        let mut beta = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                beta.set_sym(i, j, w2 * self.cov.get(i, j) - self.mu[i] * self.mu[j]);
            }
        }
        QuadraticForm {
            alpha,
            beta,
            constant: -d * d,
        }
    }

    /// Arcs violating `mu_a >= Omega sigma_a`.
    pub fn check_cv(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.mu[i] < self.omega * self.sigma(i))
            .collect()
    }
}

fn indicator(set: &[bool]) -> Vec<f64> {
    set.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
}

/// `q(x) = sum alpha_i x_i + 2 sum_{i<j} beta_ij x_i x_j + constant` on binaries.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub alpha: Vec<f64>,
    /// Symmetric, zero diagonal; only `i < j` is meaningful.
    pub beta: SymMatrix,
    pub constant: f64,
}

impl QuadraticForm {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn beta(&self, i: usize, j: usize) -> f64 {
        self.beta.get(i, j)
    }

    pub fn eval(&self, set: &[bool]) -> f64 {
        self.eval_shifted(set) + self.constant
    }

    /// Value without the constant, i.e. `q + d^2`, which vanishes on the empty set.
    pub fn eval_shifted(&self, set: &[bool]) -> f64 {
        let n = self.len();
        let mut total = 0.0;
        for i in 0..n {
            if !set[i] {
                continue;
            }
            total += self.alpha[i];
            let row = self.beta.row(i);
            for j in i + 1..n {
                if set[j] {
                    total += 2.0 * row[j];
                }
            }
        }
        total
    }

    /// Pairs `(i, j)`, `i < j`, with `beta_ij > tol`.
    pub fn positive_pairs(&self, tol: f64) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.beta(i, j) > tol {
                    out.push((i, j));
                }
            }
        }
        out
    }
}
