//! Two-stage separation. A max-flow on the mean capacities settles the case
//! where even the deterministic cut value is below the level; otherwise a
//! branch-and-bound minimizes `mu_x'z` over cuts and checks each integral
//! cut against the quadratic condition
//! `(mu_x'z - d)^2 <= Omega^2 z' Sigma_x z` lazily, cutting off the ones
//! that pass with a no-good inequality in `z`.

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::lp::{LpStatus, Row, Simplex};
use crate::model::Cut;

use super::search::{base, fixing_bounds, side_from, weighted_degree};
use super::{SeparationConfig, SeparationProblem, SeparationResult, VIOLATION_TOL};

const INTEGRAL_TOL: f64 = 1e-6;
/// Strict decrease required between successive levels when minimizing.
const DESCENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BqcMode {
    /// Stop at the first violated cut.
    FirstViolated,
    /// Lower the level to each cut found until none is left, which yields
    /// the minimum of `Theta` whenever some cut is violated.
    #[default]
    Minimize,
}

struct Search<'p, 'a> {
    p: &'p SeparationProblem<'a>,
    solver: Simplex,
    w_col: Vec<usize>,
    z_col: Vec<usize>,
    deg: Vec<f64>,
    nodes: usize,
    node_limit: usize,
    deadline: Option<Instant>,
    limited: bool,
}

impl Search<'_, '_> {
    fn out_of_budget(&mut self) -> bool {
        if self.nodes >= self.node_limit || self.deadline.is_some_and(|d| Instant::now() > d) {
            self.limited = true;
        }
        self.limited
    }

    fn apply(&mut self, fix: &[Option<bool>]) {
        let inst = self.p.inst;
        for (v, f) in fix.iter().enumerate() {
            if v == inst.source || v == inst.sink {
                continue;
            }
            let (lo, hi) = match f {
                Some(true) => (1.0, 1.0),
                Some(false) => (0.0, 0.0),
                None => (0.0, 1.0),
            };
            self.solver.set_bounds(self.w_col[v], lo, hi);
        }
    }

    /// `z`-space no-good excluding exactly the arc set `z`.
    fn no_good(&self, z: &[bool]) -> Row {
        let mut coefs = Vec::with_capacity(z.len());
        let mut rhs = 1.0;
        for (l, &on) in z.iter().enumerate() {
            if on {
                coefs.push((self.z_col[l], -1.0));
                rhs -= 1.0;
            } else {
                coefs.push((self.z_col[l], 1.0));
            }
        }
        Row::ge(coefs, rhs)
    }

    /// Depth-first search for a cut with `Theta < level`. Returns the
    /// source side and `Theta` of the first one found.
    fn find_below(&mut self, level: f64) -> Option<(Vec<bool>, f64)> {
        let p = self.p;
        let inst = p.inst;
        let mut stack: Vec<Vec<Option<bool>>> = vec![vec![None; inst.nodes]];
        while let Some(fix) = stack.pop() {
            if self.out_of_budget() {
                return None;
            }
            self.nodes += 1;
            self.apply(&fix);
            let (_, var_ub) = fixing_bounds(p, &fix);
            let spread = p.omega * var_ub.sqrt();
            loop {
                let sol = self.solver.solve();
                if sol.status == LpStatus::Infeasible {
                    break;
                }
                let usable = sol.status == LpStatus::Optimal;
                let (mean_lb, _) = fixing_bounds(p, &fix);
                let mean_bound = if usable { sol.objective.max(mean_lb) } else { mean_lb };
                if mean_bound - spread >= level {
                    break;
                }
                let w: Vec<f64> = self.w_col.iter().map(|&c| if usable { sol.x[c] } else { 0.5 }).collect();
                let side = side_from(p, &fix, &w);
                let z = p.local_indicator(&side);
                let theta = p.theta_local(&z);
                if theta < level {
                    return Some((side, theta));
                }
                let branch = (0..inst.nodes)
                    .filter(|&v| v != inst.source && v != inst.sink && fix[v].is_none())
                    .filter(|&v| !usable || (w[v] - w[v].round()).abs() > INTEGRAL_TOL)
                    .fold(None, |acc: Option<usize>, v| match acc {
                        Some(b) if self.deg[b] >= self.deg[v] => Some(b),
                        _ => Some(v),
                    });
                match branch {
                    Some(v) => {
                        for val in [false, true] {
                            let mut child = fix.clone();
                            child[v] = Some(val);
                            stack.push(child);
                        }
                        break;
                    }
                    None => {
                        if !usable {
                            self.limited = true;
                            break;
                        }
                        // Integral and not violated: exclude this arc set.
                        let row = self.no_good(&z);
                        self.solver.add_rows(&[row]);
                    }
                }
            }
        }
        None
    }
}

pub(super) fn separate_bqc(p: &SeparationProblem, config: &SeparationConfig) -> Result<SeparationResult> {
    let start = Instant::now();
    let inst = p.inst;

    // Stage 1: deterministic min cut.
    let caps: Vec<f64> = (0..inst.num_arcs()).map(|a| p.xbar[a] * inst.arcs[a].mu).collect();
    let (_, first) = super::max_flow_min_cut(inst, &caps);
    let mut best_theta = p.theta_of_cut(&first);
    let mut best_side = first.source_side;
    let mut level = p.demand - VIOLATION_TOL;
    if best_theta < level {
        if config.bqc_mode == BqcMode::FirstViolated {
            let cut = Cut::from_source_side(inst, best_side).expect("labels keep s and t apart");
            return Ok(p.result(Some(cut), best_theta, 0, start, false));
        }
        level = best_theta - DESCENT_TOL * (1.0 + best_theta.abs());
    }

    // Stage 2.
    let b = base(p);
    let mut lp = b.lp;
    for (l, &c) in b.z_col.iter().enumerate() {
        lp.objective[c] = p.mu_x()[l];
    }
    let mut search = Search {
        p,
        solver: Simplex::new(&lp),
        w_col: b.w_col,
        z_col: b.z_col,
        deg: weighted_degree(p),
        nodes: 0,
        node_limit: config.node_limit,
        deadline: config.time_limit.map(|t| start + t),
        limited: false,
    };
    while let Some((side, theta)) = search.find_below(level) {
        best_theta = theta;
        best_side = side;
        if config.bqc_mode == BqcMode::FirstViolated {
            break;
        }
        level = theta - DESCENT_TOL * (1.0 + theta.abs());
    }
    let cut = Cut::from_source_side(inst, best_side).expect("labels keep s and t apart");
    Ok(p.result(Some(cut), best_theta, search.nodes, start, search.limited))
}
