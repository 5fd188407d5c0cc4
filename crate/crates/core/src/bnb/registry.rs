//! Cut constraints found violated at some point of the search, with the
//! per-constraint data the strengthening generators need.

use std::collections::HashMap;

use crate::cutgen::{
    aggregate_and_cover, build_q_tilde, find_cover, find_pack, lift_cover_superadditive, lift_pack,
    oa_gradient_cut, CutKind, Knapsack, LinearCut, QTilde,
};
use crate::lp::RowSense;
use crate::model::{CapacityModel, Cut, NetworkInstance};
use crate::submodular::{separate_polymatroid, ShiftedQuadratic};

use super::CutFamily;

/// Polymatroid knapsacks kept per constraint for aggregation.
const KNAPSACK_MEMORY: usize = 8;

#[derive(Debug)]
pub(super) struct Constraint {
    pub arcs: Vec<usize>,
    pub model: CapacityModel,
    pub origin: u64,
    pub diagonal: bool,
    pub cv: bool,
    /// Relaxed form with one linearized variable per positive pair, when
    /// the coefficient-of-variation bound fails.
    pub qtilde: Option<QTilde>,
    /// Global LP column of each local index of the (possibly extended)
    /// ground set.
    pub columns: Vec<usize>,
    knapsacks: Vec<Knapsack>,
}

#[derive(Debug, Default)]
pub(super) struct Registry {
    pub list: Vec<Constraint>,
    index: HashMap<Vec<usize>, usize>,
}

/// Request for an auxiliary LP column standing for `x_a x_b`.
pub(super) trait ColumnSource {
    fn product_column(&mut self, a: usize, b: usize) -> usize;
}

impl Registry {
    /// Registers the constraint of `cut` and returns its index and whether
    /// it is new.
    pub fn register(
        &mut self,
        inst: &NetworkInstance,
        omega: f64,
        cut: &Cut,
        cols: &mut dyn ColumnSource,
    ) -> (usize, bool) {
        if let Some(&k) = self.index.get(&cut.arc_ids) {
            return (k, false);
        }
        let model = CapacityModel::for_arcs(inst, &cut.arc_ids, omega);
        let cv = model.check_cv().is_empty();
        let q = model.quadratic_form();
        let positive = q.positive_pairs(0.0);
        let mut columns = cut.arc_ids.clone();
        let qtilde = if positive.is_empty() {
            None
        } else {
            let qt = build_q_tilde(&q);
            for &(i, j) in &qt.pairs {
                columns.push(cols.product_column(cut.arc_ids[i], cut.arc_ids[j]));
            }
            Some(qt)
        };
        let k = self.list.len();
        self.list.push(Constraint {
            arcs: cut.arc_ids.clone(),
            diagonal: model.is_diagonal(),
            cv,
            model,
            origin: k as u64,
            qtilde,
            columns,
            knapsacks: Vec::new(),
        });
        self.index.insert(cut.arc_ids.clone(), k);
        (k, true)
    }
}

/// Cuts worth adding at `x`: violated by more than `tol` relative to the
/// largest coefficient.
pub(super) fn efficacious(cut: &LinearCut, x: &[f64], tol: f64) -> bool {
    let scale = cut.coefs.iter().map(|e| e.1.abs()).fold(1.0, f64::max);
    cut.violation(x) > tol * scale
}

impl Constraint {
    fn local(&self, x: &[f64]) -> Vec<f64> {
        self.columns.iter().map(|&c| x[c]).collect()
    }

    pub fn violated_at(&self, x: &[f64], tol: f64) -> bool {
        let xl: Vec<f64> = self.arcs.iter().map(|&a| x[a]).collect();
        self.model.eval_f(&xl) < self.model.demand - tol
    }

    /// Outer-approximation cut at `x` in global columns.
    pub fn oa_cut(&self, x: &[f64]) -> LinearCut {
        let xl: Vec<f64> = self.arcs.iter().map(|&a| x[a]).collect();
        oa_gradient_cut(&self.model, &xl, self.origin).remap(&self.arcs)
    }

    /// Strengthening cuts at `x` (global columns) for the enabled families.
    pub fn strengthen(&mut self, x: &[f64], families: &[CutFamily], tol: f64) -> Vec<LinearCut> {
        let has = |f: CutFamily| families.contains(&f);
        let mut out = Vec::new();
        let xl = self.local(x);
        let n = self.arcs.len();

        if (has(CutFamily::Pack) || has(CutFamily::XPack)) && self.diagonal && self.cv {
            if let Ok(Some(pack)) = find_pack(&self.model, &xl[..n]) {
                let cut = if has(CutFamily::XPack) {
                    lift_pack(&pack, &self.model, &xl[..n], self.origin).ok()
                } else {
                    Some(pack.inequality(n, self.origin))
                };
                out.extend(cut.map(|c| c.remap(&self.columns)));
            }
        }

        if has(CutFamily::Polymatroid) {
            let d2 = self.model.demand * self.model.demand;
            let form = match &self.qtilde {
                Some(qt) => qt.form.clone(),
                None => self.model.quadratic_form(),
            };
            // Without the coefficient-of-variation bound `q` is submodular
            // only through the relaxed form.
            if self.cv || self.qtilde.is_some() {
                let pc = separate_polymatroid(&xl, &ShiftedQuadratic(&form), d2);
                let knap = Knapsack::new(pc.vertex.v.clone(), d2);
                let cut = LinearCut::new(&pc.vertex.v, RowSense::Le, d2, CutKind::Polymatroid, self.origin);
                if efficacious(&cut, &xl, tol) {
                    out.push(cut.remap(&self.columns));
                }
                if has(CutFamily::Cover) {
                    if let Some(cover) = find_cover(&knap, &xl) {
                        let lifted = lift_cover_superadditive(&cover, &knap, &xl, self.origin);
                        if efficacious(&lifted, &xl, tol) {
                            out.push(lifted.remap(&self.columns));
                        }
                    }
                }
                if !self.knapsacks.iter().any(|k| k == &knap) {
                    if self.knapsacks.len() == KNAPSACK_MEMORY {
                        self.knapsacks.remove(0);
                    }
                    self.knapsacks.push(knap);
                }
                if has(CutFamily::Aggregate) && self.knapsacks.len() >= 2 {
                    if let Some(agg) = aggregate_and_cover(&self.knapsacks, &xl, self.origin) {
                        if efficacious(&agg, &xl, tol) {
                            out.push(agg.remap(&self.columns));
                        }
                    }
                }
            }
        }
        out
    }
}
