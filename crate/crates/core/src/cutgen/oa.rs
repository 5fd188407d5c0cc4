use crate::lp::RowSense;
use crate::model::CapacityModel;

use super::{CutKind, LinearCut};

/// Below this, `sqrt(x' Sigma x)` is treated as zero.
const NORM_EPS: f64 = 1e-12;

/// Supporting hyperplane of the conic constraint at `xbar`:
/// `mu'x - Omega (Sigma u)'x / sqrt(u' Sigma u) >= d` with `u = xbar`.
///
/// Valid for any `u` with `u' Sigma u > 0` by Cauchy-Schwarz in the
/// `Sigma` inner product. When `xbar` has zero variance the all-ones
/// direction is used instead, and when that also vanishes the cut reduces
/// to `mu'x >= d`.
pub fn oa_gradient_cut(model: &CapacityModel, xbar: &[f64], origin: u64) -> LinearCut {
    let n = model.len();
    let mut dir = xbar.to_vec();
    let mut norm2 = model.cov.quad(&dir);
    if norm2 <= NORM_EPS * NORM_EPS {
        dir = vec![1.0; n];
        norm2 = model.cov.quad(&dir);
    }
    let grad = if norm2 > NORM_EPS * NORM_EPS {
        let norm = norm2.sqrt();
        model.cov.mul_vec(&dir).into_iter().map(|g| g / norm).collect()
    } else {
        vec![0.0; n]
    };
    let coefs: Vec<f64> = (0..n).map(|i| model.mu[i] - model.omega * grad[i]).collect();
    LinearCut::new(&coefs, RowSense::Ge, model.demand, CutKind::Oa, origin)
}

/// `mu'x >= d`.
pub fn nominal_cut(model: &CapacityModel, origin: u64) -> LinearCut {
    LinearCut::new(&model.mu, RowSense::Ge, model.demand, CutKind::Nominal, origin)
}
