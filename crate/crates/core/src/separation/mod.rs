//! Finding a cut whose capacity constraint a candidate design violates.
//!
//! For a fractional design `xbar` the effective capacities are
//! `mu_x = diag(xbar) mu` and `Sigma_x = diag(xbar) Sigma diag(xbar)`, and a
//! cut with arc indicator `z` has value
//! `Theta(z) = mu_x'z - Omega sqrt(z' Sigma_x z)`. A cut is violated when
//! `Theta < d`. Arcs with `xbar_a <= 1e-9` contribute nothing, so all
//! strategies work on the support of `xbar` only.

mod bqc;
mod search;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::config::DEFAULT_ENUM_LIMIT;
use crate::error::{Error, Result};
use crate::flow;
use crate::linalg::SymMatrix;
use crate::model::{internal_nodes, Cut, NetworkInstance};

pub use bqc::BqcMode;

/// Arcs with `xbar` at or below this are dropped from separation.
pub const SUPPORT_TOL: f64 = 1e-9;
/// A cut is reported violated when `Theta < d - VIOLATION_TOL`.
pub const VIOLATION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SepStrategy {
    /// Exhaustive enumeration of all s-t cuts.
    Enumeration,
    /// Squared auxiliary with tangent cuts; diagonal covariance only.
    Qcqp,
    /// McCormick linearization of every bilinear `z_a z_b`.
    Mc,
    /// Nemhauser-Wolsey lower-bounding inequalities; requires a supermodular
    /// `Theta`, i.e. diagonal covariance.
    Nw,
    /// Max-flow stage followed by the binary quadratic feasibility search.
    Bqc,
}

impl SepStrategy {
    pub const ALL: [SepStrategy; 5] = [
        SepStrategy::Enumeration,
        SepStrategy::Bqc,
        SepStrategy::Qcqp,
        SepStrategy::Mc,
        SepStrategy::Nw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SepStrategy::Enumeration => "enum",
            SepStrategy::Qcqp => "qcqp",
            SepStrategy::Mc => "mc",
            SepStrategy::Nw => "nw",
            SepStrategy::Bqc => "bqc",
        }
    }

    /// Whether the strategy is exact for this covariance structure.
    pub fn applicable(self, diagonal: bool) -> bool {
        diagonal || !matches!(self, SepStrategy::Qcqp | SepStrategy::Nw)
    }
}

impl fmt::Display for SepStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SepStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let key = key.strip_prefix("sep-").unwrap_or(&key);
        Ok(match key {
            "enum" | "enumeration" => SepStrategy::Enumeration,
            "qcqp" => SepStrategy::Qcqp,
            "mc" => SepStrategy::Mc,
            "nw" | "d" => SepStrategy::Nw,
            "bqc" => SepStrategy::Bqc,
            _ => return Err(Error::domain(format!("unknown separation strategy '{s}'"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SeparationConfig {
    pub strategy: SepStrategy,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
    /// Largest internal-node count enumerated exhaustively.
    pub enum_limit: usize,
    pub bqc_mode: BqcMode,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        SeparationConfig {
            strategy: SepStrategy::Enumeration,
            node_limit: 1_000_000,
            time_limit: None,
            enum_limit: DEFAULT_ENUM_LIMIT,
            bqc_mode: BqcMode::Minimize,
        }
    }
}

impl SeparationConfig {
    pub fn with_strategy(strategy: SepStrategy) -> Self {
        SeparationConfig {
            strategy,
            ..Self::default()
        }
    }
}

/// Separation data for one candidate design.
#[derive(Debug, Clone)]
pub struct SeparationProblem<'a> {
    pub inst: &'a NetworkInstance,
    pub xbar: Vec<f64>,
    pub omega: f64,
    pub demand: f64,
    /// Arcs with positive `xbar`, increasing id.
    support: Vec<usize>,
    /// `xbar_a mu_a` over the support.
    mu_x: Vec<f64>,
    /// `xbar_a xbar_b Sigma_ab` over the support.
    cov_x: SymMatrix,
    diagonal: bool,
}

impl<'a> SeparationProblem<'a> {
    pub fn new(inst: &'a NetworkInstance, xbar: &[f64], omega: f64) -> Result<Self> {
        if xbar.len() != inst.num_arcs() {
            return Err(Error::domain(format!(
                "xbar has {} entries, instance has {} arcs",
                xbar.len(),
                inst.num_arcs()
            )));
        }
        if let Some(v) = xbar.iter().find(|v| !(-1e-6..=1.0 + 1e-6).contains(*v)) {
            return Err(Error::domain(format!("xbar entry {v} outside [0, 1]")));
        }
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("omega must be >= 0, got {omega}")));
        }
        let xbar: Vec<f64> = xbar.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let support: Vec<usize> = (0..xbar.len()).filter(|&a| xbar[a] > SUPPORT_TOL).collect();
        let mu_x = support.iter().map(|&a| xbar[a] * inst.arcs[a].mu).collect();
        let scale: Vec<f64> = support.iter().map(|&a| xbar[a]).collect();
        let cov_x = inst.cov().restrict(&support).scaled(&scale);
        let diagonal = cov_x.is_diagonal();
        Ok(SeparationProblem {
            inst,
            xbar,
            omega,
            demand: inst.demand,
            support,
            mu_x,
            cov_x,
            diagonal,
        })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub(crate) fn mu_x(&self) -> &[f64] {
        &self.mu_x
    }

    pub(crate) fn cov_x(&self) -> &SymMatrix {
        &self.cov_x
    }

    /// Support arcs crossing from `source_side`, as a local indicator.
    pub(crate) fn local_indicator(&self, source_side: &[bool]) -> Vec<bool> {
        self.support
            .iter()
            .map(|&a| {
                let arc = &self.inst.arcs[a];
                source_side[arc.tail] && !source_side[arc.head]
            })
            .collect()
    }

    /// `Theta` over a local support indicator.
    pub(crate) fn theta_local(&self, z: &[bool]) -> f64 {
        let mut mean = 0.0;
        let mut var = 0.0;
        for k in 0..z.len() {
            if !z[k] {
                continue;
            }
            mean += self.mu_x[k];
            if self.diagonal {
                var += self.cov_x.get(k, k);
            } else {
                let row = self.cov_x.row(k);
                for l in 0..z.len() {
                    if z[l] {
                        var += row[l];
                    }
                }
            }
        }
        mean - self.omega * var.max(0.0).sqrt()
    }

    /// `Theta(z)` for a full arc indicator.
    pub fn eval_theta(&self, z: &[bool]) -> f64 {
        let local: Vec<bool> = self.support.iter().map(|&a| z[a]).collect();
        self.theta_local(&local)
    }

    /// `Theta` after checking that `z` is exactly the arc set induced by the
    /// node labels `w`.
    pub fn eval_theta_labeled(&self, w: &[bool], z: &[bool]) -> Result<f64> {
        let inst = self.inst;
        if w.len() != inst.nodes || z.len() != inst.num_arcs() {
            return Err(Error::domain("label vectors have wrong length"));
        }
        if !w[inst.source] || w[inst.sink] {
            return Err(Error::domain("labels must put s on the source side and t off it"));
        }
        for (k, arc) in inst.arcs.iter().enumerate() {
            if z[k] != (w[arc.tail] && !w[arc.head]) {
                return Err(Error::domain(format!("arc {k} label inconsistent with node labels")));
            }
        }
        Ok(self.eval_theta(z))
    }

    pub fn theta_of_cut(&self, cut: &Cut) -> f64 {
        self.theta_local(&self.local_indicator(&cut.source_side))
    }

    fn result(&self, cut: Option<Cut>, theta: f64, nodes: usize, start: Instant, limit: bool) -> SeparationResult {
        let violated = cut.is_some() && theta < self.demand - VIOLATION_TOL;
        let status = if violated {
            SeparationStatus::ViolatedCut
        } else if limit {
            SeparationStatus::Limit
        } else {
            SeparationStatus::NoneViolated
        };
        SeparationResult {
            status,
            cut,
            theta,
            violation: self.demand - theta,
            nodes,
            elapsed: start.elapsed(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparationStatus {
    ViolatedCut,
    NoneViolated,
    /// Node or time limit hit before a violated cut was found or ruled out.
    Limit,
}

impl SeparationStatus {
    pub fn name(self) -> &'static str {
        match self {
            SeparationStatus::ViolatedCut => "violated-cut",
            SeparationStatus::NoneViolated => "none-violated",
            SeparationStatus::Limit => "limit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeparationResult {
    pub status: SeparationStatus,
    /// The minimizing cut (or, for first-found searches, the cut found).
    pub cut: Option<Cut>,
    pub theta: f64,
    /// `d - Theta`.
    pub violation: f64,
    pub nodes: usize,
    pub elapsed: Duration,
}

impl SeparationResult {
    pub fn is_violated(&self) -> bool {
        self.status == SeparationStatus::ViolatedCut
    }
}

/// Max flow with the given per-arc capacities and a minimum cut.
pub fn max_flow_min_cut(inst: &NetworkInstance, caps: &[f64]) -> (f64, Cut) {
    let arcs: Vec<(usize, usize)> = inst.arcs.iter().map(|a| (a.tail, a.head)).collect();
    let mc = flow::min_cut(inst.nodes, &arcs, caps, inst.source, inst.sink);
    let cut = Cut::from_source_side(inst, mc.source_side).expect("residual reachability is an s-t cut");
    (mc.value, cut)
}

/// Exact minimum of `Theta` over all cuts; ties go to the smallest
/// source-side mask over the internal nodes.
pub fn separate_enumeration(p: &SeparationProblem, enum_limit: usize) -> Result<SeparationResult> {
    let start = Instant::now();
    let best = enumerate_min(p, enum_limit, 1)?;
    let (theta, cut, count) = match best.into_iter().next() {
        Some((t, c, n)) => (t, Some(c), n),
        None => (f64::INFINITY, None, 0),
    };
    Ok(p.result(cut, theta, count, start, false))
}

/// Up to `max_cuts` violated cuts in increasing `Theta` order.
pub fn violated_cuts_enumeration(p: &SeparationProblem, enum_limit: usize, max_cuts: usize) -> Result<Vec<(Cut, f64)>> {
    let all = enumerate_min(p, enum_limit, max_cuts)?;
    Ok(all
        .into_iter()
        .filter(|(t, _, _)| *t < p.demand - VIOLATION_TOL)
        .map(|(t, c, _)| (c, t))
        .collect())
}

/// The `keep` smallest `(Theta, cut, cuts_enumerated)` triples.
fn enumerate_min(p: &SeparationProblem, enum_limit: usize, keep: usize) -> Result<Vec<(f64, Cut, usize)>> {
    let inst = p.inst;
    let internal = internal_nodes(inst);
    if internal.len() > enum_limit || internal.len() >= 63 {
        return Err(Error::Size {
            what: "internal node count for cut enumeration",
            size: internal.len(),
            limit: enum_limit,
        });
    }
    let total = 1u64 << internal.len();
    let mut side = vec![false; inst.nodes];
    side[inst.source] = true;
    let ends: Vec<(usize, usize)> = p.support.iter().map(|&a| (inst.arcs[a].tail, inst.arcs[a].head)).collect();
    let mut z = vec![false; p.support.len()];
    let mut best: Vec<(f64, u64)> = Vec::with_capacity(keep + 1);
    for mask in 0..total {
        for (k, &v) in internal.iter().enumerate() {
            side[v] = mask >> k & 1 == 1;
        }
        for (k, &(u, v)) in ends.iter().enumerate() {
            z[k] = side[u] && !side[v];
        }
        let theta = p.theta_local(&z);
        if best.len() < keep || theta < best[best.len() - 1].0 {
            let pos = best.partition_point(|e| e.0 <= theta);
            best.insert(pos, (theta, mask));
            best.truncate(keep);
        }
    }
    let count = total as usize;
    Ok(best
        .into_iter()
        .map(|(t, mask)| (t, Cut::from_mask(inst, &internal, mask), count))
        .collect())
}

/// Runs the configured strategy. Strategies that are not exact for the
/// covariance structure return an `Inapplicable` error.
pub fn separate(p: &SeparationProblem, config: &SeparationConfig) -> Result<SeparationResult> {
    match config.strategy {
        SepStrategy::Enumeration => separate_enumeration(p, config.enum_limit),
        SepStrategy::Bqc => bqc::separate_bqc(p, config),
        s => {
            if !s.applicable(p.is_diagonal()) {
                return Err(Error::Inapplicable(
                    s.name(),
                    "requires a diagonal covariance matrix".into(),
                ));
            }
            search::separate_bnb(p, s, config)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, REFERENCE_DESIGNS};

    fn ones(n: usize) -> Vec<f64> {
        vec![1.0; n]
    }

    #[test]
    fn max_flow_on_table1_means() {
        let inst = fixtures::table1();
        let (phi, cut) = max_flow_min_cut(&inst, &inst.mu());
        assert!((phi - 326.0).abs() < 1e-9);
        assert_eq!(cut.source_nodes(), vec![0, 4]);
    }

    #[test]
    fn two_node_flow() {
        use crate::linalg::SymMatrix;
        use crate::model::Arc;
        let inst = NetworkInstance::new(2, 0, 1, 1.0, vec![Arc { tail: 0, head: 1, cost: 1.0, mu: 5.0 }], SymMatrix::zeros(1)).unwrap();
        assert_eq!(max_flow_min_cut(&inst, &[5.0]).0, 5.0);
    }

    #[test]
    fn theta_of_source_cut() {
        let inst = fixtures::table1();
        let p = SeparationProblem::new(&inst, &ones(15), 1.95996).unwrap();
        let mut z = vec![false; 15];
        for a in 0..5 {
            z[a] = true;
        }
        let t = p.eval_theta(&z);
        assert!((t - 275.21).abs() < 0.01, "{t}");
        let mut w = vec![false; 6];
        w[0] = true;
        assert_eq!(p.eval_theta_labeled(&w, &z).unwrap(), t);
        z[7] = true;
        assert!(p.eval_theta_labeled(&w, &z).is_err());
    }

    #[test]
    fn omega_zero_enumeration_matches_max_flow() {
        let inst = fixtures::table1();
        let p = SeparationProblem::new(&inst, &ones(15), 0.0).unwrap();
        let r = separate_enumeration(&p, 22).unwrap();
        assert!((r.theta - 326.0).abs() < 1e-9);
        assert_eq!(r.cut.unwrap().source_nodes(), vec![0, 4]);
    }

    #[test]
    fn median_design_min_mean_cut() {
        let inst = fixtures::table1();
        let x: Vec<f64> = REFERENCE_DESIGNS[0].indicator(15).iter().map(|&b| b as u8 as f64).collect();
        let p = SeparationProblem::new(&inst, &x, 0.0).unwrap();
        let r = separate_enumeration(&p, 22).unwrap();
        assert!((r.theta - 233.0).abs() < 1e-9);
        assert_eq!(r.cut.unwrap().source_nodes(), vec![0, 4]);
        assert_eq!(r.status, SeparationStatus::NoneViolated);
    }

    #[test]
    fn strategy_names_parse() {
        for s in SepStrategy::ALL {
            assert_eq!(s.name().parse::<SepStrategy>().unwrap(), s);
            assert_eq!(format!("sep-{}", s.name()).parse::<SepStrategy>().unwrap(), s);
        }
        assert!("foo".parse::<SepStrategy>().is_err());
    }
}
