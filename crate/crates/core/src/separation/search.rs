//! Best-first branch-and-bound over node labels with strategy-specific LP
//! relaxations of `min Theta`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::Result;
use crate::lp::{LinearProgram, LpStatus, Row, Simplex};
use crate::model::Cut;
use crate::submodular::{nw_inequality, FnSetFunction, NwVariant};

use super::{SepStrategy, SeparationConfig, SeparationProblem, SeparationResult};

const MAX_OA_ROUNDS: usize = 60;
const INTEGRAL_TOL: f64 = 1e-6;
const PRUNE_TOL: f64 = 1e-9;

/// Node labels and arc indicators shared by all formulations:
/// `z_a >= w_u - w_v`, `z_a <= w_u`, `z_a <= 1 - w_v` for each support arc.
pub(super) struct Base {
    pub w_col: Vec<usize>,
    pub z_col: Vec<usize>,
    pub ncols: usize,
    pub lp: LinearProgram,
}

pub(super) fn base(p: &SeparationProblem) -> Base {
    let inst = p.inst;
    let nodes = inst.nodes;
    let k = p.support().len();
    let w_col: Vec<usize> = (0..nodes).collect();
    let z_col: Vec<usize> = (nodes..nodes + k).collect();
    let mut lower = vec![0.0; nodes + k];
    let mut upper = vec![1.0; nodes + k];
    lower[inst.source] = 1.0;
    upper[inst.sink] = 0.0;
    let mut lp = LinearProgram::minimize(vec![0.0; nodes + k], lower, upper);
    for (l, &a) in p.support().iter().enumerate() {
        let (u, v) = (inst.arcs[a].tail, inst.arcs[a].head);
        let z = z_col[l];
        lp.add_row(Row::ge(vec![(z, 1.0), (u, -1.0), (v, 1.0)], 0.0));
        lp.add_row(Row::le(vec![(z, 1.0), (u, -1.0)], 0.0));
        lp.add_row(Row::le(vec![(z, 1.0), (v, 1.0)], 1.0));
    }
    Base {
        w_col,
        z_col,
        ncols: nodes + k,
        lp,
    }
}

fn push_col(b: &mut Base, cost: f64, lo: f64, hi: f64) -> usize {
    b.lp.objective.push(cost);
    b.lp.lower.push(lo);
    b.lp.upper.push(hi);
    b.ncols += 1;
    b.ncols - 1
}

/// `t <= sqrt(L)` with `L` linear, enforced by tangent planes.
struct SqrtLink {
    t: usize,
    /// `L = sum coef * col`.
    terms: Vec<(usize, f64)>,
    floor: f64,
}

impl SqrtLink {
    fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Tangent of `sqrt` at `lbar`: `t - L / (2r) <= r / 2`.
    fn tangent(&self, lbar: f64) -> Row {
        let r = lbar.max(self.floor).sqrt();
        let mut coefs = vec![(self.t, 1.0)];
        coefs.extend(self.terms.iter().map(|&(j, a)| (j, -a / (2.0 * r))));
        Row::le(coefs, r / 2.0)
    }

    fn violated(&self, x: &[f64]) -> bool {
        let l = self.value(x).max(0.0);
        x[self.t] > l.sqrt() + 1e-9 * (1.0 + l.sqrt())
    }
}

enum Extra<'a> {
    Sqrt(SqrtLink),
    Nw {
        eta: usize,
        theta: FnSetFunction<Box<dyn Fn(&[bool]) -> f64 + 'a>>,
    },
}

struct Relaxation<'a> {
    solver: Simplex,
    /// Rows below this index are the fixed formulation.
    base_rows: usize,
    w_col: Vec<usize>,
    z_col: Vec<usize>,
    extra: Extra<'a>,
}

fn build<'a>(p: &'a SeparationProblem, strategy: SepStrategy) -> Relaxation<'a> {
    let mut b = base(p);
    let k = p.support().len();
    let mu = p.mu_x().to_vec();
    let cov = p.cov_x();
    let extra = match strategy {
        SepStrategy::Qcqp => {
            for l in 0..k {
                b.lp.objective[b.z_col[l]] = mu[l];
            }
            let terms: Vec<(usize, f64)> = (0..k)
                .map(|l| (b.z_col[l], cov.get(l, l).max(0.0)))
                .filter(|e| e.1 > 0.0)
                .collect();
            let total: f64 = terms.iter().map(|e| e.1).sum();
            let t = push_col(&mut b, -p.omega, 0.0, total.sqrt());
            Extra::Sqrt(SqrtLink {
                t,
                terms,
                floor: 1e-10 * total + 1e-14,
            })
        }
        SepStrategy::Mc => {
            for l in 0..k {
                b.lp.objective[b.z_col[l]] = mu[l];
            }
            let mut terms: Vec<(usize, f64)> = (0..k)
                .map(|l| (b.z_col[l], cov.get(l, l)))
                .filter(|e| e.1 != 0.0)
                .collect();
            let mut abs_total: f64 = terms.iter().map(|e| e.1.abs()).sum();
            for i in 0..k {
                for j in i + 1..k {
                    let c = cov.get(i, j);
                    if c == 0.0 {
                        continue;
                    }
                    // Only the McCormick side that can bind is needed: a
                    // larger `L` only helps the objective, so positive terms
                    // push `y` up against `y <= z` and negative ones push it
                    // down against `y >= z_i + z_j - 1`.
                    let y = push_col(&mut b, 0.0, 0.0, 1.0);
                    let (zi, zj) = (b.z_col[i], b.z_col[j]);
                    if c < 0.0 {
                        b.lp.add_row(Row::ge(vec![(y, 1.0), (zi, -1.0), (zj, -1.0)], -1.0));
                    } else {
                        b.lp.add_row(Row::le(vec![(y, 1.0), (zi, -1.0)], 0.0));
                        b.lp.add_row(Row::le(vec![(y, 1.0), (zj, -1.0)], 0.0));
                    }
                    terms.push((y, 2.0 * c));
                    abs_total += 2.0 * c.abs();
                }
            }
            if !terms.is_empty() {
                b.lp.add_row(Row::ge(terms.clone(), 0.0));
            }
            let t = push_col(&mut b, -p.omega, 0.0, abs_total.sqrt());
            Extra::Sqrt(SqrtLink {
                t,
                terms,
                floor: 1e-10 * abs_total + 1e-14,
            })
        }
        SepStrategy::Nw => {
            let hi: f64 = mu.iter().map(|m| m.max(0.0)).sum();
            let var_all: f64 = (0..k).map(|l| cov.get(l, l).max(0.0)).sum();
            let lo = -p.omega * var_all.sqrt() + mu.iter().map(|m| m.min(0.0)).sum::<f64>();
            let eta = push_col(&mut b, 1.0, lo - 1.0, hi + 1.0);
            let f: Box<dyn Fn(&[bool]) -> f64 + 'a> = Box::new(move |s: &[bool]| p.theta_local(s));
            Extra::Nw {
                eta,
                theta: FnSetFunction::new(k, f),
            }
        }
        SepStrategy::Enumeration | SepStrategy::Bqc => unreachable!("not a relaxation strategy"),
    };
    let mut rel = Relaxation {
        base_rows: b.lp.rows.len(),
        solver: Simplex::new(&b.lp),
        w_col: b.w_col,
        z_col: b.z_col,
        extra,
    };
    // Seed the outer approximation.
    let seed_rows: Vec<Row> = match &rel.extra {
        Extra::Sqrt(link) => {
            let all = link.terms.iter().map(|e| e.1).sum::<f64>();
            if link.terms.is_empty() { vec![] } else { vec![link.tangent(all.max(link.floor))] }
        }
        Extra::Nw { eta, theta } => {
            let empty = vec![false; k];
            let full = vec![true; k];
            [NwVariant::First, NwVariant::Second]
                .iter()
                .flat_map(|&v| [nw_row(*eta, &rel.z_col, theta, &empty, v), nw_row(*eta, &rel.z_col, theta, &full, v)])
                .collect()
        }
    };
    rel.solver.add_rows(&seed_rows);
    rel
}

fn nw_row<G: crate::submodular::SetFunction>(eta: usize, z_col: &[usize], theta: &G, s: &[bool], v: NwVariant) -> Row {
    let ineq = nw_inequality(theta, s, v);
    let mut coefs = vec![(eta, 1.0)];
    coefs.extend(z_col.iter().zip(&ineq.coef).map(|(&c, &a)| (c, -a)));
    Row::ge(coefs, ineq.constant)
}

struct NodeLp {
    bound: f64,
    w: Vec<f64>,
}

impl Relaxation<'_> {
    fn apply(&mut self, fix: &[Option<bool>], inst_source: usize, inst_sink: usize) {
        for (v, f) in fix.iter().enumerate() {
            if v == inst_source || v == inst_sink {
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

    /// Drops generated rows that are slack at the current basis once they
    /// outnumber the formulation rows.
    fn purge(&mut self) {
        let extra = self.solver.num_rows() - self.base_rows;
        if extra <= self.base_rows.max(50) {
            return;
        }
        let slack: Vec<usize> = (self.base_rows..self.solver.num_rows())
            .filter(|&i| self.solver.row_slack_is_basic(i))
            .collect();
        self.solver.remove_rows(&slack).expect("only basic slacks are removed");
    }

    /// LP bound after refining the outer approximation. `None` when the
    /// node is infeasible.
    fn solve(&mut self) -> Option<NodeLp> {
        self.purge();
        let mut last = None;
        for _ in 0..MAX_OA_ROUNDS {
            let sol = self.solver.solve();
            match sol.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => return None,
                _ => return last,
            }
            let w = self.w_col.iter().map(|&c| sol.x[c]).collect();
            last = Some(NodeLp {
                bound: sol.objective,
                w,
            });
            let new_rows: Vec<Row> = match &self.extra {
                Extra::Sqrt(link) => {
                    if link.terms.is_empty() || !link.violated(&sol.x) {
                        vec![]
                    } else {
                        let row = link.tangent(link.value(&sol.x));
                        if row.violation(&sol.x) > 1e-9 { vec![row] } else { vec![] }
                    }
                }
                Extra::Nw { eta, theta } => {
                    let zbar: Vec<f64> = self.z_col.iter().map(|&c| sol.x[c]).collect();
                    let s: Vec<bool> = zbar.iter().map(|&v| v > 0.5).collect();
                    [NwVariant::First, NwVariant::Second]
                        .iter()
                        .map(|&v| nw_row(*eta, &self.z_col, theta, &s, v))
                        .filter(|r| r.violation(&sol.x) > 1e-9)
                        .collect()
                }
            };
            if new_rows.is_empty() {
                break;
            }
            self.solver.add_rows(&new_rows);
        }
        last
    }
}

#[derive(Debug)]
struct Node {
    bound: f64,
    id: usize,
    fix: Vec<Option<bool>>,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    // Max-heap: smaller bound first, then older node.
    fn cmp(&self, o: &Self) -> Ordering {
        o.bound.total_cmp(&self.bound).then(o.id.cmp(&self.id))
    }
}

/// For cuts consistent with `fix`: a lower bound on the mean over the
/// support and an upper bound on the variance.
pub(super) fn fixing_bounds(p: &SeparationProblem, fix: &[Option<bool>]) -> (f64, f64) {
    let inst = p.inst;
    let label = |v: usize| -> Option<bool> {
        if v == inst.source {
            Some(true)
        } else if v == inst.sink {
            Some(false)
        } else {
            fix[v]
        }
    };
    let mu = p.mu_x();
    let cov = p.cov_x();
    let mut mean = 0.0;
    let mut possible = Vec::new();
    for (l, &a) in p.support().iter().enumerate() {
        let (u, v) = (inst.arcs[a].tail, inst.arcs[a].head);
        let (lu, lv) = (label(u), label(v));
        if lu == Some(false) || lv == Some(true) {
            continue;
        }
        possible.push(l);
        if lu == Some(true) && lv == Some(false) {
            mean += mu[l];
        } else {
            mean += mu[l].min(0.0);
        }
    }
    let mut var = 0.0;
    for &i in &possible {
        for &j in &possible {
            var += cov.get(i, j).max(0.0);
        }
    }
    (mean, var)
}

/// Lower bound on `Theta` for all cuts consistent with `fix`.
pub(super) fn trivial_bound(p: &SeparationProblem, fix: &[Option<bool>]) -> f64 {
    let (mean, var) = fixing_bounds(p, fix);
    mean - p.omega * var.sqrt()
}

/// Capacity-weighted degree of every node over the support.
pub(super) fn weighted_degree(p: &SeparationProblem) -> Vec<f64> {
    let mut deg = vec![0.0; p.inst.nodes];
    for (l, &a) in p.support().iter().enumerate() {
        let arc = &p.inst.arcs[a];
        deg[arc.tail] += p.mu_x()[l].abs();
        deg[arc.head] += p.mu_x()[l].abs();
    }
    deg
}

pub(super) fn side_from(p: &SeparationProblem, fix: &[Option<bool>], w: &[f64]) -> Vec<bool> {
    let inst = p.inst;
    (0..inst.nodes)
        .map(|v| {
            if v == inst.source {
                true
            } else if v == inst.sink {
                false
            } else {
                fix[v].unwrap_or(w[v] > 0.5)
            }
        })
        .collect()
}

pub(super) fn separate_bnb(p: &SeparationProblem, strategy: SepStrategy, config: &SeparationConfig) -> Result<SeparationResult> {
    let start = Instant::now();
    let inst = p.inst;
    let nodes = inst.nodes;
    let deg = weighted_degree(p);

    // Incumbent from the linear min cut.
    let caps: Vec<f64> = (0..inst.num_arcs())
        .map(|a| p.xbar[a] * inst.arcs[a].mu.max(0.0))
        .collect();
    let (_, first) = super::max_flow_min_cut(inst, &caps);
    let mut best_theta = p.theta_of_cut(&first);
    let mut best_side = first.source_side;

    let mut rel = build(p, strategy);
    let mut heap = BinaryHeap::new();
    let root_fix: Vec<Option<bool>> = vec![None; nodes];
    heap.push(Node {
        bound: trivial_bound(p, &root_fix),
        id: 0,
        fix: root_fix,
    });
    let mut next_id = 1;
    let mut explored = 0usize;
    let mut limited = false;

    while let Some(node) = heap.pop() {
        if node.bound >= best_theta - PRUNE_TOL {
            break;
        }
        if explored >= config.node_limit || config.time_limit.is_some_and(|t| start.elapsed() > t) {
            limited = true;
            break;
        }
        explored += 1;
        rel.apply(&node.fix, inst.source, inst.sink);
        let Some(lp) = rel.solve() else { continue };
        let bound = lp.bound.max(trivial_bound(p, &node.fix)).max(node.bound);

        let side = side_from(p, &node.fix, &lp.w);
        let theta = p.theta_local(&p.local_indicator(&side));
        if theta < best_theta - 1e-12 {
            best_theta = theta;
            best_side = side;
        }
        if bound >= best_theta - PRUNE_TOL {
            continue;
        }
        let unfixed: Vec<usize> = (0..nodes)
            .filter(|&v| v != inst.source && v != inst.sink && node.fix[v].is_none())
            .collect();
        if unfixed.is_empty() {
            continue;
        }
        let pick = |cands: &mut dyn Iterator<Item = usize>| {
            cands.fold(None, |acc: Option<usize>, v| match acc {
                Some(b) if deg[b] >= deg[v] => Some(b),
                _ => Some(v),
            })
        };
        let fractional = unfixed
            .iter()
            .copied()
            .filter(|&v| (lp.w[v] - lp.w[v].round()).abs() > INTEGRAL_TOL);
        let var = pick(&mut fractional.into_iter())
            .or_else(|| pick(&mut unfixed.iter().copied()))
            .expect("unfixed is non-empty");
        for val in [true, false] {
            let mut fix = node.fix.clone();
            fix[var] = Some(val);
            let tb = trivial_bound(p, &fix);
            heap.push(Node {
                bound: bound.max(tb),
                id: next_id,
                fix,
            });
            next_id += 1;
        }
    }

    let cut = Cut::from_source_side(inst, best_side).expect("labels keep s and t apart");
    Ok(p.result(Some(cut), best_theta, explored, start, limited))
}
