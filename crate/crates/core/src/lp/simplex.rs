use crate::error::{Error, Result};

use super::{
    LinearProgram, LpSolution, LpStatus, Row, RowSense, BLAND_AFTER_DEGENERATE, DUAL_FEAS_TOL,
    INFINITE_BOX, PIVOT_TOL, PRIMAL_FEAS_TOL, REFACTOR_INTERVAL,
};

const NONBASIC: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    /// Structural column `j`.
    Col(usize),
    /// Slack of row `i`, with `a_i x + s_i = b_i`.
    Slack(usize),
}

/// Dual simplex with an explicit dense basis inverse.
///
/// Internally every problem is a minimization; a maximizing objective is
/// negated on entry and the reported objective and duals are flipped back.
#[derive(Debug, Clone)]
pub struct Simplex {
    maximize: bool,
    /// Structural columns, sparse `(row, value)`.
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    sense: Vec<RowSense>,
    vars: Vec<Var>,
    col_var: Vec<usize>,
    slack_var: Vec<usize>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    /// Whether a structural bound stands in for an infinite one.
    boxed_lo: Vec<bool>,
    boxed_up: Vec<bool>,
    x: Vec<f64>,
    d: Vec<f64>,
    /// Basis position of each variable, or `NONBASIC`.
    pos: Vec<usize>,
    head: Vec<usize>,
    /// Row-major `m x m`; rows follow basis positions, columns follow rows.
    binv: Vec<f64>,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
    iteration_limit: Option<usize>,
    iterations: usize,
    dirty: bool,
    /// Bounds changed since the last solve; reduced costs must be
    /// refreshed and dual feasibility restored by bound flips.
    bounds_changed: bool,
}

impl Simplex {
    pub fn new(lp: &LinearProgram) -> Self {
        let n = lp.num_cols();
        assert_eq!(lp.lower.len(), n, "lower bound length");
        assert_eq!(lp.upper.len(), n, "upper bound length");
        let mut s = Simplex {
            maximize: lp.maximize,
            cols: vec![Vec::new(); n],
            rhs: Vec::new(),
            sense: Vec::new(),
            vars: Vec::new(),
            col_var: Vec::new(),
            slack_var: Vec::new(),
            cost: Vec::new(),
            lo: Vec::new(),
            up: Vec::new(),
            boxed_lo: Vec::new(),
            boxed_up: Vec::new(),
            x: Vec::new(),
            d: Vec::new(),
            pos: Vec::new(),
            head: Vec::new(),
            binv: Vec::new(),
            since_refactor: 0,
            degenerate_run: 0,
            bland: false,
            iteration_limit: None,
            iterations: 0,
            dirty: true,
            bounds_changed: false,
        };
        for j in 0..n {
            let c = if lp.maximize {
                -lp.objective[j]
            } else {
                lp.objective[j]
            };
            let v = s.vars.len();
            s.vars.push(Var::Col(j));
            s.col_var.push(v);
            s.cost.push(c);
            s.lo.push(0.0);
            s.up.push(0.0);
            s.x.push(0.0);
            s.d.push(c);
            s.pos.push(NONBASIC);
            s.boxed_lo.push(false);
            s.boxed_up.push(false);
            s.store_bounds(j, lp.lower[j], lp.upper[j]);
            s.x[v] = s.lo[v];
        }
        for row in &lp.rows {
            s.push_row(row);
        }
        s.cold_basis();
        s
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn set_iteration_limit(&mut self, limit: Option<usize>) {
        self.iteration_limit = limit;
    }

    /// Current value of structural `j`.
    pub fn value(&self, j: usize) -> f64 {
        self.x[self.col_var[j]]
    }

    /// Row activity `a_i x` at the current point.
    pub fn row_activity(&self, i: usize) -> f64 {
        self.rhs[i] - self.x[self.slack_var[i]]
    }

    /// Whether row `i` holds with equality at the current point.
    pub fn row_is_tight(&self, i: usize, tol: f64) -> bool {
        self.x[self.slack_var[i]].abs() <= tol
    }

    pub fn row_slack_is_basic(&self, i: usize) -> bool {
        self.pos[self.slack_var[i]] != NONBASIC
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        let v = self.col_var[j];
        (
            if self.boxed_lo[j] { f64::NEG_INFINITY } else { self.lo[v] },
            if self.boxed_up[j] { f64::INFINITY } else { self.up[v] },
        )
    }

    fn store_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        let v = self.col_var[j];
        self.boxed_lo[j] = !lower.is_finite();
        self.boxed_up[j] = !upper.is_finite();
        self.lo[v] = if lower.is_finite() { lower } else { -INFINITE_BOX };
        self.up[v] = if upper.is_finite() { upper } else { INFINITE_BOX };
    }

    fn m(&self) -> usize {
        self.rhs.len()
    }

    /// Appends a row with a nonbasic slack; callers fix up the basis.
    fn push_row(&mut self, row: &Row) -> usize {
        let i = self.rhs.len();
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.coefs.len());
        let mut sorted = row.coefs.clone();
        sorted.sort_by_key(|&(j, _)| j);
        for (j, a) in sorted {
            assert!(j < self.cols.len(), "row references column {j} out of range");
            match merged.last_mut() {
                Some((k, v)) if *k == j => *v += a,
                _ => merged.push((j, a)),
            }
        }
        for (j, a) in merged {
            if a != 0.0 {
                self.cols[j].push((i, a));
            }
        }
        self.rhs.push(row.rhs);
        self.sense.push(row.sense);
        let (lo, up) = match row.sense {
            RowSense::Le => (0.0, f64::INFINITY),
            RowSense::Ge => (f64::NEG_INFINITY, 0.0),
            RowSense::Eq => (0.0, 0.0),
        };
        let v = self.vars.len();
        self.vars.push(Var::Slack(i));
        self.slack_var.push(v);
        self.cost.push(0.0);
        self.lo.push(lo);
        self.up.push(up);
        self.x.push(0.0);
        self.d.push(0.0);
        self.pos.push(NONBASIC);
        v
    }

    /// Slack basis with every structural at the bound its cost prefers.
    fn cold_basis(&mut self) {
        let m = self.m();
        for v in 0..self.vars.len() {
            self.pos[v] = NONBASIC;
        }
        self.head = self.slack_var.clone();
        for (k, &v) in self.head.iter().enumerate() {
            self.pos[v] = k;
        }
        for j in 0..self.cols.len() {
            let v = self.col_var[j];
            self.x[v] = if self.cost[v] >= 0.0 { self.lo[v] } else { self.up[v] };
        }
        self.binv = vec![0.0; m * m];
        for k in 0..m {
            self.binv[k * m + k] = 1.0;
        }
        self.recompute();
        self.since_refactor = 0;
        self.dirty = false;
    }

    fn col_entries(&self, v: usize) -> ColIter<'_> {
        match self.vars[v] {
            Var::Col(j) => ColIter::Sparse(self.cols[j].iter()),
            Var::Slack(i) => ColIter::Unit(Some(i)),
        }
    }

    fn dot_col(&self, v: usize, y: &[f64]) -> f64 {
        self.col_entries(v).map(|(i, a)| a * y[i]).sum()
    }

    /// `B^-1 a_v`.
    fn ftran(&self, v: usize) -> Vec<f64> {
        let m = self.m();
        let mut out = vec![0.0; m];
        for (i, a) in self.col_entries(v) {
            for (k, o) in out.iter_mut().enumerate() {
                *o += a * self.binv[k * m + i];
            }
        }
        out
    }

    /// Simplex multipliers `c_B' B^-1`.
    fn duals_internal(&self) -> Vec<f64> {
        let m = self.m();
        let mut y = vec![0.0; m];
        for (k, &v) in self.head.iter().enumerate() {
            let c = self.cost[v];
            if c != 0.0 {
                let row = &self.binv[k * m..(k + 1) * m];
                for (yi, b) in y.iter_mut().zip(row) {
                    *yi += c * b;
                }
            }
        }
        y
    }

    /// Recomputes basic values and reduced costs from the current inverse.
    fn recompute(&mut self) {
        let m = self.m();
        let mut r = self.rhs.clone();
        for v in 0..self.vars.len() {
            if self.pos[v] == NONBASIC && self.x[v] != 0.0 {
                let xv = self.x[v];
                for (i, a) in self.col_entries(v) {
                    r[i] -= a * xv;
                }
            }
        }
        for k in 0..m {
            let row = &self.binv[k * m..(k + 1) * m];
            let val: f64 = row.iter().zip(&r).map(|(b, ri)| b * ri).sum();
            let v = self.head[k];
            self.x[v] = val;
        }
        let y = self.duals_internal();
        for v in 0..self.vars.len() {
            self.d[v] = if self.pos[v] == NONBASIC {
                self.cost[v] - self.dot_col(v, &y)
            } else {
                0.0
            };
        }
    }

    /// Rebuilds `B^-1` from scratch. Falls back to the slack basis if the
    /// current basis has become numerically singular.
    fn refactor(&mut self) {
        match self.block_inverse() {
            Some(inv) => {
                self.binv = inv;
                self.recompute();
                self.since_refactor = 0;
            }
            None => self.cold_basis(),
        }
    }

    /// Inverse of the basis through its structural block. With the rows
    /// split into those whose slack is basic (`S`) and the rest (`N`), and
    /// `J` the basic structurals, `B = [I A_SJ; 0 A_NJ]` up to permutation,
    /// so only the square `K = A_NJ` has to be inverted:
    /// `x_J = K^-1 r_N` and `s_S = r_S - A_SJ K^-1 r_N`.
    fn block_inverse(&self) -> Option<Vec<f64>> {
        let m = self.m();
        let structural: Vec<(usize, usize)> = self
            .head
            .iter()
            .enumerate()
            .filter(|(_, &v)| matches!(self.vars[v], Var::Col(_)))
            .map(|(k, &v)| (k, v))
            .collect();
        let mut slack_basic = vec![false; m];
        for &v in &self.head {
            if let Var::Slack(i) = self.vars[v] {
                slack_basic[i] = true;
            }
        }
        let n_rows: Vec<usize> = (0..m).filter(|&i| !slack_basic[i]).collect();
        let k = structural.len();
        if n_rows.len() != k {
            return None;
        }
        let mut local = vec![usize::MAX; m];
        for (t, &i) in n_rows.iter().enumerate() {
            local[i] = t;
        }
        let mut kmat = vec![0.0; k * k];
        for (t, &(_, v)) in structural.iter().enumerate() {
            for (i, a) in self.col_entries(v) {
                if local[i] != usize::MAX {
                    kmat[local[i] * k + t] = a;
                }
            }
        }
        let kinv = invert(&kmat, k)?;
        let mut binv = vec![0.0; m * m];
        for (t, &(pos, _)) in structural.iter().enumerate() {
            for (c, &i) in n_rows.iter().enumerate() {
                binv[pos * m + i] = kinv[t * k + c];
            }
        }
        for (pos, &v) in self.head.iter().enumerate() {
            let Var::Slack(i) = self.vars[v] else { continue };
            let row = &mut binv[pos * m..(pos + 1) * m];
            row[i] = 1.0;
            // Row i of A_SJ K^-1, with the sign of the elimination.
            for (t, &(_, sv)) in structural.iter().enumerate() {
                let a = self.coef(sv, i);
                if a != 0.0 {
                    for (c, &r) in n_rows.iter().enumerate() {
                        row[r] -= a * kinv[t * k + c];
                    }
                }
            }
        }
        Some(binv)
    }

    /// Entry `(i, v)` of the constraint matrix.
    fn coef(&self, v: usize, i: usize) -> f64 {
        match self.vars[v] {
            Var::Col(j) => self.cols[j]
                .binary_search_by_key(&i, |e| e.0)
                .map(|p| self.cols[j][p].1)
                .unwrap_or(0.0),
            Var::Slack(r) => f64::from(u8::from(r == i)),
        }
    }

    fn infeasibility(&self, v: usize) -> f64 {
        let x = self.x[v];
        if x < self.lo[v] - PRIMAL_FEAS_TOL {
            self.lo[v] - x
        } else if x > self.up[v] + PRIMAL_FEAS_TOL {
            x - self.up[v]
        } else {
            0.0
        }
    }

    fn choose_leaving(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (k, &v) in self.head.iter().enumerate() {
            let inf = self.infeasibility(v);
            if inf <= 0.0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bk, bi)) => {
                    if self.bland {
                        v < self.head[bk]
                    } else {
                        inf > bi
                    }
                }
            };
            if better {
                best = Some((k, inf));
            }
        }
        best.map(|(k, _)| k)
    }

    /// Solves from the current basis.
    pub fn solve(&mut self) -> LpSolution {
        if self.dirty {
            self.refactor();
            self.dirty = false;
        } else if self.bounds_changed {
            self.restore_dual_feasibility();
        }
        self.bounds_changed = false;
        let m = self.m();
        let limit = self
            .iteration_limit
            .unwrap_or(20_000 + 50 * (m + self.cols.len()));
        let mut iters = 0usize;
        let mut alpha_row = vec![0.0; self.vars.len()];
        let mut clean = false;
        loop {
            if self.since_refactor >= REFACTOR_INTERVAL {
                self.refactor();
            }
            let Some(r) = self.choose_leaving() else {
                if self.since_refactor > 0 && !clean {
                    // Confirm optimality on values recomputed from the inverse.
                    self.recompute();
                    clean = true;
                    continue;
                }
                return self.finish(LpStatus::Optimal, iters);
            };
            clean = false;
            if iters >= limit {
                return self.finish(LpStatus::IterationLimit, iters);
            }
            iters += 1;
            self.iterations += 1;

            let p = self.head[r];
            let to_lower = self.x[p] < self.lo[p];
            let delta = if to_lower {
                self.x[p] - self.lo[p]
            } else {
                self.x[p] - self.up[p]
            };
            let rho: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();

            // Dual ratio test (Harris two-pass, or Bland when cycling is suspected).
            let mut t_max = f64::INFINITY;
            let mut eligible: Vec<(usize, f64, f64)> = Vec::new();
            for v in 0..self.vars.len() {
                alpha_row[v] = 0.0;
                if self.pos[v] != NONBASIC || self.lo[v] == self.up[v] {
                    continue;
                }
                let a = self.dot_col(v, &rho);
                alpha_row[v] = a;
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let at_lower = self.x[v] <= self.lo[v];
                let ok = if delta < 0.0 {
                    (at_lower && a < 0.0) || (!at_lower && a > 0.0)
                } else {
                    (at_lower && a > 0.0) || (!at_lower && a < 0.0)
                };
                if !ok {
                    continue;
                }
                let dv = if at_lower {
                    self.d[v].max(0.0)
                } else {
                    (-self.d[v]).max(0.0)
                };
                t_max = t_max.min((dv + DUAL_FEAS_TOL) / a.abs());
                eligible.push((v, a, dv / a.abs()));
            }
            if eligible.is_empty() {
                return self.finish(LpStatus::Infeasible, iters);
            }
            let q = if self.bland {
                let min = eligible.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
                eligible
                    .iter()
                    .filter(|e| e.2 <= min + 1e-12)
                    .map(|e| e.0)
                    .min()
                    .unwrap()
            } else {
                let mut best = eligible[0];
                let mut found = false;
                for &e in &eligible {
                    if e.2 <= t_max && (!found || e.1.abs() > best.1.abs()) {
                        best = e;
                        found = true;
                    }
                }
                best.0
            };

            let col = self.ftran(q);
            let piv = col[r];
            if piv.abs() <= PIVOT_TOL
                || (piv - alpha_row[q]).abs() > 1e-6 * (1.0 + piv.abs())
            {
                if self.since_refactor > 0 {
                    self.refactor();
                    continue;
                }
                if piv.abs() <= PIVOT_TOL {
                    return self.finish(LpStatus::NumericalFailure, iters);
                }
            }
            let theta_d = self.d[q] / piv;
            for v in 0..self.vars.len() {
                if self.pos[v] == NONBASIC && alpha_row[v] != 0.0 {
                    self.d[v] -= theta_d * alpha_row[v];
                }
            }
            self.d[q] = 0.0;
            self.d[p] = -theta_d;

            let dx = delta / piv;
            for (k, &c) in col.iter().enumerate() {
                if c != 0.0 {
                    let v = self.head[k];
                    self.x[v] -= dx * c;
                }
            }
            self.x[q] += dx;
            self.x[p] = if to_lower { self.lo[p] } else { self.up[p] };

            // Eta update of the explicit inverse.
            let pr: Vec<f64> = self.binv[r * m..(r + 1) * m].iter().map(|b| b / piv).collect();
            for (k, &c) in col.iter().enumerate() {
                if k == r || c == 0.0 {
                    continue;
                }
                let row = &mut self.binv[k * m..(k + 1) * m];
                for (b, pv) in row.iter_mut().zip(&pr) {
                    *b -= c * pv;
                }
            }
            self.binv[r * m..(r + 1) * m].copy_from_slice(&pr);

            self.pos[p] = NONBASIC;
            self.pos[q] = r;
            self.head[r] = q;
            self.since_refactor += 1;

            if theta_d.abs() <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run >= BLAND_AFTER_DEGENERATE {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
                self.bland = false;
            }
        }
    }

    fn finish(&mut self, mut status: LpStatus, iterations: usize) -> LpSolution {
        let n = self.cols.len();
        let x: Vec<f64> = (0..n).map(|j| self.x[self.col_var[j]]).collect();
        if status == LpStatus::Optimal {
            for j in 0..n {
                let v = self.col_var[j];
                let hit_lo = self.boxed_lo[j] && x[j] <= -0.5 * INFINITE_BOX;
                let hit_up = self.boxed_up[j] && x[j] >= 0.5 * INFINITE_BOX;
                if (hit_lo || hit_up) && self.cost[v] != 0.0 {
                    status = LpStatus::Unbounded;
                }
            }
        }
        let sign = if self.maximize { -1.0 } else { 1.0 };
        let y = self.duals_internal();
        let duals = y.iter().map(|v| sign * v).collect();
        let reduced_costs = (0..n).map(|j| sign * self.d[self.col_var[j]]).collect();
        let objective = (0..n)
            .map(|j| self.cost[self.col_var[j]] * x[j])
            .sum::<f64>()
            * sign;
        LpSolution {
            status,
            x,
            duals,
            reduced_costs,
            objective,
            iterations,
        }
    }

    /// Appends rows with basic slacks. The basis stays dual feasible, so the
    /// next [`solve`](Self::solve) is a warm start.
    pub fn add_rows(&mut self, rows: &[Row]) {
        if rows.is_empty() {
            return;
        }
        let m_old = self.m();
        let first_new = self.vars.len();
        for row in rows {
            self.push_row(row);
        }
        let m = self.m();
        let mut binv = vec![0.0; m * m];
        for k in 0..m_old {
            binv[k * m..k * m + m_old].copy_from_slice(&self.binv[k * m_old..(k + 1) * m_old]);
        }
        for (t, row) in rows.iter().enumerate() {
            let i = m_old + t;
            let v = first_new + t;
            self.head.push(v);
            self.pos[v] = i;
            // Row of the new inverse: e_i - sum_k a_{B_k} (B^-1 row k).
            for &(j, a) in &row.coefs {
                let cv = self.col_var[j];
                let k = self.pos[cv];
                if k != NONBASIC && k < m_old {
                    for c in 0..m_old {
                        binv[i * m + c] -= a * self.binv[k * m_old + c];
                    }
                }
            }
            binv[i * m + i] = 1.0;
            self.x[v] = row.rhs - row.activity_of(|j| self.x[self.col_var[j]]);
            self.d[v] = 0.0;
        }
        self.binv = binv;
    }

    /// Adds a structural column and returns its index.
    pub fn add_column(
        &mut self,
        objective: f64,
        lower: f64,
        upper: f64,
        coefs: &[(usize, f64)],
    ) -> usize {
        let j = self.cols.len();
        let c = if self.maximize { -objective } else { objective };
        let v = self.vars.len();
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for &(i, a) in coefs {
            assert!(i < self.m(), "column references row {i} out of range");
            match entries.iter_mut().find(|e| e.0 == i) {
                Some(e) => e.1 += a,
                None => entries.push((i, a)),
            }
        }
        entries.retain(|e| e.1 != 0.0);
        entries.sort_by_key(|e| e.0);
        self.cols.push(entries);
        self.vars.push(Var::Col(j));
        self.col_var.push(v);
        self.cost.push(c);
        self.lo.push(0.0);
        self.up.push(0.0);
        self.x.push(0.0);
        self.d.push(0.0);
        self.pos.push(NONBASIC);
        self.boxed_lo.push(false);
        self.boxed_up.push(false);
        self.store_bounds(j, lower, upper);
        if self.dirty {
            self.x[v] = if c >= 0.0 { self.lo[v] } else { self.up[v] };
            return j;
        }
        let y = self.duals_internal();
        self.d[v] = c - self.dot_col(v, &y);
        let val = if self.d[v] >= 0.0 { self.lo[v] } else { self.up[v] };
        self.shift_nonbasic(v, val);
        j
    }

    /// Moves nonbasic `v` to `val` and updates the basic values.
    fn shift_nonbasic(&mut self, v: usize, val: f64) {
        let delta = val - self.x[v];
        self.x[v] = val;
        if delta != 0.0 {
            let col = self.ftran(v);
            for (k, c) in col.iter().enumerate() {
                let b = self.head[k];
                self.x[b] -= delta * c;
            }
        }
    }

    /// Puts every nonbasic variable at the bound its reduced cost asks for.
    /// All variables are boxed, so this always yields a dual feasible basis.
    fn restore_dual_feasibility(&mut self) {
        self.recompute();
        let mut moved = false;
        for v in 0..self.vars.len() {
            if self.pos[v] != NONBASIC {
                continue;
            }
            let want = if self.d[v] > DUAL_FEAS_TOL {
                self.lo[v]
            } else if self.d[v] < -DUAL_FEAS_TOL {
                self.up[v]
            } else {
                self.x[v].clamp(self.lo[v], self.up[v])
            };
            if want != self.x[v] {
                self.x[v] = want;
                moved = true;
            }
        }
        if moved {
            self.recompute();
        }
    }

    /// Changes the bounds of structural `j`, keeping the basis.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.store_bounds(j, lower, upper);
        self.bounds_changed = true;
        let v = self.col_var[j];
        if self.pos[v] != NONBASIC {
            return;
        }
        if self.dirty {
            self.x[v] = if self.cost[v] >= 0.0 { self.lo[v] } else { self.up[v] };
            return;
        }
        let val = if self.d[v] > 0.0 {
            self.lo[v]
        } else if self.d[v] < 0.0 {
            self.up[v]
        } else if (self.x[v] - self.up[v]).abs() < (self.x[v] - self.lo[v]).abs() {
            self.up[v]
        } else {
            self.lo[v]
        };
        self.shift_nonbasic(v, val);
    }

    /// Deletes rows whose slack is basic. Rows are given by index; the
    /// remaining rows keep their relative order.
    pub fn remove_rows(&mut self, rows: &[usize]) -> Result<()> {
        let m = self.m();
        let mut drop = vec![false; m];
        for &i in rows {
            if i >= m {
                return Err(Error::Lp(format!("row {i} out of range")));
            }
            if self.pos[self.slack_var[i]] == NONBASIC {
                return Err(Error::Lp(format!("row {i} is binding; its slack is nonbasic")));
            }
            drop[i] = true;
        }
        if !drop.iter().any(|&b| b) {
            return Ok(());
        }
        // With the dropped slacks basic, the reduced inverse is the old one
        // without their basis rows and without the dropped row columns.
        let mut drop_pos = vec![false; m];
        for i in 0..m {
            if drop[i] {
                drop_pos[self.pos[self.slack_var[i]]] = true;
            }
        }
        if !self.dirty {
            let keep_rows: Vec<usize> = (0..m).filter(|&i| !drop[i]).collect();
            let mut binv = Vec::with_capacity(keep_rows.len() * keep_rows.len());
            for k in (0..m).filter(|&k| !drop_pos[k]) {
                let row = &self.binv[k * m..(k + 1) * m];
                binv.extend(keep_rows.iter().map(|&i| row[i]));
            }
            self.binv = binv;
        }

        let mut new_row = vec![usize::MAX; m];
        let mut next = 0;
        for i in 0..m {
            if !drop[i] {
                new_row[i] = next;
                next += 1;
            }
        }
        for col in &mut self.cols {
            col.retain(|e| !drop[e.0]);
            for e in col.iter_mut() {
                e.0 = new_row[e.0];
            }
        }
        let keep_var: Vec<bool> = self
            .vars
            .iter()
            .map(|v| match *v {
                Var::Slack(i) => !drop[i],
                Var::Col(_) => true,
            })
            .collect();
        let mut new_var = vec![usize::MAX; self.vars.len()];
        let mut nv = 0;
        for (v, &k) in keep_var.iter().enumerate() {
            if k {
                new_var[v] = nv;
                nv += 1;
            }
        }
        macro_rules! compact {
            ($f:expr) => {{
                let old = std::mem::take(&mut $f);
                $f = old
                    .into_iter()
                    .enumerate()
                    .filter(|(v, _)| keep_var[*v])
                    .map(|(_, x)| x)
                    .collect();
            }};
        }
        compact!(self.vars);
        compact!(self.cost);
        compact!(self.lo);
        compact!(self.up);
        compact!(self.x);
        compact!(self.d);
        for v in &mut self.vars {
            if let Var::Slack(i) = v {
                *i = new_row[*i];
            }
        }
        self.col_var = self.col_var.iter().map(|&v| new_var[v]).collect();
        self.slack_var = (0..m)
            .filter(|&i| !drop[i])
            .map(|i| new_var[self.slack_var[i]])
            .collect();
        self.rhs = (0..m).filter(|&i| !drop[i]).map(|i| self.rhs[i]).collect();
        self.sense = (0..m).filter(|&i| !drop[i]).map(|i| self.sense[i]).collect();
        self.head = self
            .head
            .iter()
            .filter(|&&v| keep_var[v])
            .map(|&v| new_var[v])
            .collect();
        self.pos = vec![NONBASIC; self.vars.len()];
        for (k, &v) in self.head.iter().enumerate() {
            self.pos[v] = k;
        }
        Ok(())
    }
}

impl Row {
    fn activity_of(&self, value: impl Fn(usize) -> f64) -> f64 {
        self.coefs.iter().map(|&(j, a)| a * value(j)).sum()
    }
}

enum ColIter<'a> {
    Sparse(std::slice::Iter<'a, (usize, f64)>),
    Unit(Option<usize>),
}

impl Iterator for ColIter<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            ColIter::Sparse(it) => it.next().copied(),
            ColIter::Unit(i) => i.take().map(|i| (i, 1.0)),
        }
    }
}

/// Gauss-Jordan inverse with partial pivoting; `None` when singular.
fn invert(a: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut a = a.to_vec();
    let mut inv = vec![0.0; m * m];
    for k in 0..m {
        inv[k * m + k] = 1.0;
    }
    for c in 0..m {
        let (p, best) = (c..m)
            .map(|r| (r, a[r * m + c].abs()))
            .fold((c, -1.0), |acc, e| if e.1 > acc.1 { e } else { acc });
        if best < 1e-11 {
            return None;
        }
        if p != c {
            for k in 0..m {
                a.swap(p * m + k, c * m + k);
                inv.swap(p * m + k, c * m + k);
            }
        }
        let piv = a[c * m + c];
        for k in 0..m {
            a[c * m + k] /= piv;
            inv[c * m + k] /= piv;
        }
        for r in 0..m {
            if r == c {
                continue;
            }
            let f = a[r * m + c];
            if f == 0.0 {
                continue;
            }
            for k in 0..m {
                a[r * m + k] -= f * a[c * m + k];
                inv[r * m + k] -= f * inv[c * m + k];
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-7 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn small_max_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = LinearProgram::minimize(vec![3.0, 5.0], vec![0.0; 2], vec![f64::INFINITY; 2]);
        lp.maximize = true;
        lp.add_row(Row::le(vec![(0, 1.0)], 4.0));
        lp.add_row(Row::le(vec![(1, 2.0)], 12.0));
        lp.add_row(Row::le(vec![(0, 3.0), (1, 2.0)], 18.0));
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, 36.0));
        assert!(close(s.x[0], 2.0) && close(s.x[1], 6.0));
        assert!(close(s.duals[0], 0.0));
        assert!(close(s.duals[1], 1.5));
        assert!(close(s.duals[2], 1.0));
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LinearProgram::minimize(vec![1.0], vec![0.0], vec![1.0]);
        lp.add_row(Row::ge(vec![(0, 1.0)], 2.0));
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::minimize(vec![-1.0, 0.0], vec![0.0; 2], vec![f64::INFINITY; 2]);
        lp.add_row(Row::ge(vec![(0, 1.0), (1, -1.0)], 0.0));
        assert_eq!(solve(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_rows_and_free_variables() {
        // min x + y, x - y = 1, x + y >= 3, y free
        let mut lp = LinearProgram::minimize(
            vec![1.0, 1.0],
            vec![0.0, f64::NEG_INFINITY],
            vec![f64::INFINITY; 2],
        );
        lp.add_row(Row::new(vec![(0, 1.0), (1, -1.0)], RowSense::Eq, 1.0));
        lp.add_row(Row::ge(vec![(0, 1.0), (1, 1.0)], 3.0));
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, 3.0));
        assert!(close(s.x[0] - s.x[1], 1.0));
    }

    #[test]
    fn warm_start_add_rows_and_bounds() {
        let mut lp = LinearProgram::minimize(vec![1.0, 2.0, 3.0], vec![0.0; 3], vec![1.0; 3]);
        lp.add_row(Row::ge(vec![(0, 1.0), (1, 1.0), (2, 1.0)], 1.5));
        let mut sx = Simplex::new(&lp);
        let s1 = sx.solve();
        assert!(close(s1.objective, 2.0));
        let extra = Row::ge(vec![(1, 1.0), (2, 1.0)], 1.2);
        let s2 = resolve_with_new_rows(&mut sx, &[extra.clone()]);
        lp.add_row(extra);
        let cold = solve(&lp);
        assert!(close(s2.objective, cold.objective));
        sx.set_bounds(0, 0.0, 0.0);
        let s3 = sx.solve();
        lp.upper[0] = 0.0;
        assert!(close(s3.objective, solve(&lp).objective));
    }

    #[test]
    fn add_column_and_remove_rows() {
        let mut lp = LinearProgram::minimize(vec![2.0], vec![0.0], vec![10.0]);
        lp.add_row(Row::ge(vec![(0, 1.0)], 3.0));
        lp.add_row(Row::le(vec![(0, 1.0)], 9.0));
        let mut sx = Simplex::new(&lp);
        assert!(close(sx.solve().objective, 6.0));
        let j = sx.add_column(1.0, 0.0, 10.0, &[(0, 1.0)]);
        assert_eq!(j, 1);
        let s = sx.solve();
        assert!(close(s.objective, 3.0));
        assert!(close(s.x[1], 3.0));
        assert!(sx.row_slack_is_basic(1));
        sx.remove_rows(&[1]).unwrap();
        assert_eq!(sx.num_rows(), 1);
        assert!(close(sx.solve().objective, 3.0));
        assert!(sx.remove_rows(&[0]).is_err());
    }
}
