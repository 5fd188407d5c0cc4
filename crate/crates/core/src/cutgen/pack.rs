use crate::error::{Error, Result};
use crate::lp::RowSense;
use crate::model::CapacityModel;

use super::{by_xbar_desc, CutKind, LinearCut};

/// Largest pack whose variables are lifted; bigger packs keep the plain
/// pack inequality.
pub const PACK_LIFT_LIMIT: usize = 14;
/// Up to this many free arcs the lifting subproblem is solved exactly;
/// beyond it a valid relaxation bound is used.
const EXACT_FREE_LIMIT: usize = 8;
const FEAS_TOL: f64 = 1e-9;

/// A set `P` with `f(P) < d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pack {
    /// Local arc indices, in the order they were added.
    pub arcs: Vec<usize>,
    /// `d - f(P)`, strictly positive.
    pub slack: f64,
    pub maximal: bool,
}

impl Pack {
    pub fn contains(&self, i: usize) -> bool {
        self.arcs.contains(&i)
    }

    /// `x(N \ P) >= 1`.
    pub fn inequality(&self, n: usize, origin: u64) -> LinearCut {
        let coefs: Vec<f64> = (0..n)
            .map(|i| if self.contains(i) { 0.0 } else { 1.0 })
            .collect();
        LinearCut::new(&coefs, RowSense::Ge, 1.0, CutKind::Pack, origin)
    }
}

fn check_pack_model(model: &CapacityModel) -> Result<()> {
    if !model.is_diagonal() {
        return Err(Error::Inapplicable("pack", "covariance is not diagonal".into()));
    }
    let bad = model.check_cv();
    if !bad.is_empty() {
        return Err(Error::Inapplicable(
            "pack",
            format!("mean below Omega*sigma on {} arc(s)", bad.len()),
        ));
    }
    Ok(())
}

/// Greedy maximal pack: arcs in non-increasing `xbar` order are added while
/// `f` stays below `d`. Because `f` is non-decreasing under the
/// coefficient-of-variation condition, one pass is already maximal.
pub fn find_pack(model: &CapacityModel, xbar: &[f64]) -> Result<Option<Pack>> {
    check_pack_model(model)?;
    let d = model.demand;
    if d <= 0.0 {
        return Ok(None);
    }
    let mut mu = 0.0;
    let mut var = 0.0;
    let mut arcs = Vec::new();
    for i in by_xbar_desc(xbar, 0..model.len()) {
        let (m2, v2) = (mu + model.mu[i], var + model.cov.get(i, i));
        if m2 - model.omega * v2.max(0.0).sqrt() < d {
            mu = m2;
            var = v2;
            arcs.push(i);
        }
    }
    let slack = d - (mu - model.omega * var.max(0.0).sqrt());
    Ok(Some(Pack {
        arcs,
        slack,
        maximal: true,
    }))
}

/// Minimum number of free arcs that complete a fixed part `(mu, var)` to
/// `f >= d`, or `None` when no completion exists.
struct Completion {
    omega: f64,
    demand: f64,
    /// Exact: every subset as (size, mu, var), sorted by size.
    subsets: Option<Vec<(usize, f64, f64)>>,
    /// Relaxation: prefix sums of the largest means and smallest variances.
    best_mu: Vec<f64>,
    best_var: Vec<f64>,
}

impl Completion {
    fn new(model: &CapacityModel, free: &[usize]) -> Self {
        let k = free.len();
        let subsets = (k <= EXACT_FREE_LIMIT).then(|| {
            let mut all: Vec<(usize, f64, f64)> = (0u32..1 << k)
                .map(|mask| {
                    let mut s = (mask.count_ones() as usize, 0.0, 0.0);
                    for (b, &i) in free.iter().enumerate() {
                        if mask >> b & 1 == 1 {
                            s.1 += model.mu[i];
                            s.2 += model.cov.get(i, i);
                        }
                    }
                    s
                })
                .collect();
            all.sort_by_key(|s| s.0);
            all
        });
        let mut mus: Vec<f64> = free.iter().map(|&i| model.mu[i]).collect();
        mus.sort_by(|a, b| b.total_cmp(a));
        let mut vars: Vec<f64> = free.iter().map(|&i| model.cov.get(i, i)).collect();
        vars.sort_by(|a, b| a.total_cmp(b));
        let prefix = |v: Vec<f64>| {
            let mut acc = 0.0;
            std::iter::once(0.0)
                .chain(v.into_iter().map(|x| {
                    acc += x;
                    acc
                }))
                .collect::<Vec<f64>>()
        };
        Completion {
            omega: model.omega,
            demand: model.demand,
            subsets,
            best_mu: prefix(mus),
            best_var: prefix(vars),
        }
    }

    fn min_count(&self, mu: f64, var: f64) -> Option<usize> {
        let ok = |m: f64, v: f64| m - self.omega * v.max(0.0).sqrt() >= self.demand - FEAS_TOL;
        match &self.subsets {
            Some(all) => all.iter().find(|s| ok(mu + s.1, var + s.2)).map(|s| s.0),
            None => (0..self.best_mu.len()).find(|&k| ok(mu + self.best_mu[k], var + self.best_var[k])),
        }
    }
}

/// Extended pack inequality
/// `x(N \ P) >= 1 + sum_{i in P} alpha_i (1 - x_i)`.
///
/// The pack inequality is valid on the face `x_P = 1`; the pack variables
/// are then lifted one by one in non-increasing `1 - xbar` order, each with
/// the largest coefficient that keeps the inequality valid. The lifting
/// subproblem enumerates the already-lifted pack variables and counts the
/// fewest arcs of `N \ P` needed to reach `d`.
pub fn lift_pack(pack: &Pack, model: &CapacityModel, xbar: &[f64], origin: u64) -> Result<LinearCut> {
    check_pack_model(model)?;
    let n = model.len();
    if pack.arcs.len() > PACK_LIFT_LIMIT {
        return Ok(pack.inequality(n, origin));
    }
    let free: Vec<usize> = (0..n).filter(|&i| !pack.contains(i)).collect();
    let completion = Completion::new(model, &free);
    let cap = free.len() as f64;

    let mut order = pack.arcs.clone();
    order.sort_by(|&a, &b| xbar[a].total_cmp(&xbar[b]).then(a.cmp(&b)));
    let mut alpha = vec![0.0; n];
    for t in 0..order.len() {
        let lifted = &order[..t];
        let (mut mu_fixed, mut var_fixed) = (0.0, 0.0);
        for &i in &order[t + 1..] {
            mu_fixed += model.mu[i];
            var_fixed += model.cov.get(i, i);
        }
        let mut best = f64::INFINITY;
        for mask in 0u32..1 << lifted.len() {
            let (mut mu, mut var, mut penalty) = (mu_fixed, var_fixed, 0.0);
            for (b, &k) in lifted.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    mu += model.mu[k];
                    var += model.cov.get(k, k);
                } else {
                    penalty += alpha[k];
                }
            }
            if let Some(h) = completion.min_count(mu, var) {
                best = best.min(h as f64 - penalty);
            }
        }
        alpha[order[t]] = (best - 1.0).clamp(0.0, cap);
    }

    let mut coefs = vec![1.0; n];
    let mut rhs = 1.0;
    for &i in &pack.arcs {
        coefs[i] = alpha[i];
        rhs += alpha[i];
    }
    Ok(LinearCut::new(&coefs, RowSense::Ge, rhs, CutKind::ExtendedPack, origin))
}
