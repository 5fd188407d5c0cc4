//! Valid inequalities for the cut-capacity constraints.
//!
//! Generators work in a local index space (the arcs of one cut, possibly
//! followed by auxiliary product variables) and return [`LinearCut`]s over
//! that space; [`LinearCut::remap`] moves them to master columns.

mod cover;
mod oa;
mod pack;
mod qtilde;

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::lp::{Row, RowSense};

pub use cover::{
    aggregate_and_cover, find_cover, knapsack_max, lift_cover_superadditive, Cover, Knapsack,
    SuperadditiveLifting,
};
pub use oa::{nominal_cut, oa_gradient_cut};
pub use pack::{find_pack, lift_pack, Pack, PACK_LIFT_LIMIT};
pub use qtilde::{build_q_tilde, QTilde};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutKind {
    /// `mu_C'x >= d`, the deterministic relaxation of a cut constraint.
    Nominal,
    Oa,
    Pack,
    ExtendedPack,
    Polymatroid,
    Cover,
    LiftedCover,
    AggregatedCover,
    McCormickLink,
}

impl CutKind {
    pub const ALL: [CutKind; 9] = [
        CutKind::Nominal,
        CutKind::Oa,
        CutKind::Pack,
        CutKind::ExtendedPack,
        CutKind::Polymatroid,
        CutKind::Cover,
        CutKind::LiftedCover,
        CutKind::AggregatedCover,
        CutKind::McCormickLink,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CutKind::Nominal => "nominal",
            CutKind::Oa => "oa",
            CutKind::Pack => "pack",
            CutKind::ExtendedPack => "extended-pack",
            CutKind::Polymatroid => "polymatroid",
            CutKind::Cover => "cover",
            CutKind::LiftedCover => "lifted-cover",
            CutKind::AggregatedCover => "aggregated-cover",
            CutKind::McCormickLink => "mccormick-link",
        }
    }
}

impl fmt::Display for CutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `sum coefs_j x_j (<= | >=) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCut {
    /// Sparse, sorted by index, no explicit zeros.
    pub coefs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
    pub kind: CutKind,
    /// Identifies the originating constraint (e.g. a cut's source-side mask).
    pub origin: u64,
}

impl LinearCut {
    pub fn new(dense: &[f64], sense: RowSense, rhs: f64, kind: CutKind, origin: u64) -> Self {
        let coefs = dense
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0.0)
            .map(|(j, &a)| (j, a))
            .collect();
        LinearCut {
            coefs,
            sense,
            rhs,
            kind,
            origin,
        }
    }

    pub fn from_sparse(
        mut coefs: Vec<(usize, f64)>,
        sense: RowSense,
        rhs: f64,
        kind: CutKind,
        origin: u64,
    ) -> Self {
        coefs.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coefs.len());
        for (j, a) in coefs {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        LinearCut {
            coefs: merged,
            sense,
            rhs,
            kind,
            origin,
        }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Positive amount by which `x` violates the cut, 0 if satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.to_row().violation(x)
    }

    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        self.violation(x) <= tol
    }

    /// Local index `k` becomes `map[k]`.
    pub fn remap(&self, map: &[usize]) -> LinearCut {
        LinearCut::from_sparse(
            self.coefs.iter().map(|&(k, a)| (map[k], a)).collect(),
            self.sense,
            self.rhs,
            self.kind,
            self.origin,
        )
    }

    pub fn to_row(&self) -> Row {
        Row::new(self.coefs.clone(), self.sense, self.rhs)
    }

    /// Whether all data are finite.
    pub fn is_finite(&self) -> bool {
        self.rhs.is_finite() && self.coefs.iter().all(|e| e.1.is_finite())
    }

    /// Hash of the rounded row, used to suppress duplicates in a cut pool.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        let round = |v: f64| (v * 1e9).round() as i64;
        self.sense.hash(&mut h);
        round(self.rhs).hash(&mut h);
        for &(j, a) in &self.coefs {
            j.hash(&mut h);
            round(a).hash(&mut h);
        }
        h.finish()
    }
}

/// Candidate ordering shared by the greedy generators: non-increasing
/// `xbar`, ties by lower index.
pub(crate) fn by_xbar_desc(xbar: &[f64], items: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = items.into_iter().collect();
    v.sort_by(|&a, &b| xbar[b].total_cmp(&xbar[a]).then(a.cmp(&b)));
    v
}
