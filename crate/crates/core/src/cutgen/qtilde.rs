use crate::linalg::SymMatrix;
use crate::lp::RowSense;
use crate::model::QuadraticForm;

use super::{CutKind, LinearCut};

/// `q` with every positive bilinear term `2 beta_ij x_i x_j` replaced by the
/// linear term `2 beta_ij z_ij`, where `z_ij` stands for `x_i x_j`.
///
/// Ground set: the `n` original variables followed by one `z` per entry of
/// `pairs`. The result has only non-positive bilinear coefficients and is
/// therefore submodular on the enlarged ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct QTilde {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    pub form: QuadraticForm,
}

/// Linearizes the positive-`beta` pairs of `q`. With no positive pair the
/// form is returned unchanged.
pub fn build_q_tilde(q: &QuadraticForm) -> QTilde {
    let n = q.len();
    let pairs = q.positive_pairs(0.0);
    let m = n + pairs.len();
    let mut alpha = q.alpha.clone();
    alpha.resize(m, 0.0);
    let mut beta = SymMatrix::zeros(m);
    for i in 0..n {
        for j in i + 1..n {
            let b = q.beta(i, j);
            if b < 0.0 {
                beta.set_sym(i, j, b);
            }
        }
    }
    for (k, &(i, j)) in pairs.iter().enumerate() {
        alpha[n + k] = 2.0 * q.beta(i, j);
    }
    QTilde {
        n,
        pairs,
        form: QuadraticForm {
            alpha,
            beta,
            constant: q.constant,
        },
    }
}

impl QTilde {
    pub fn num_aux(&self) -> usize {
        self.pairs.len()
    }

    /// Extends a point on the original variables with `z_ij = x_i x_j`.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x[..self.n].to_vec();
        out.extend(self.pairs.iter().map(|&(i, j)| x[i] * x[j]));
        out
    }

    pub fn expand_set(&self, x: &[bool]) -> Vec<bool> {
        let mut out = x[..self.n].to_vec();
        out.extend(self.pairs.iter().map(|&(i, j)| x[i] && x[j]));
        out
    }

    /// The three McCormick rows per pair: `z >= x_i + x_j - 1`,
    /// `z <= x_i`, `z <= x_j`, over the local ground set.
    pub fn links(&self, origin: u64) -> Vec<LinearCut> {
        let mut out = Vec::with_capacity(3 * self.pairs.len());
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            let z = self.n + k;
            let kind = CutKind::McCormickLink;
            out.push(LinearCut::from_sparse(
                vec![(z, 1.0), (i, -1.0), (j, -1.0)],
                RowSense::Ge,
                -1.0,
                kind,
                origin,
            ));
            out.push(LinearCut::from_sparse(vec![(z, 1.0), (i, -1.0)], RowSense::Le, 0.0, kind, origin));
            out.push(LinearCut::from_sparse(vec![(z, 1.0), (j, -1.0)], RowSense::Le, 0.0, kind, origin));
        }
        out
    }
}
