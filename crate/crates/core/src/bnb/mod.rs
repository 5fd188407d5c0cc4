//! Branch-and-cut for the design problem.
//!
//! The LP starts with only the arc bounds. At each node the LP point is
//! separated in rounds: a linear min cut on the mean capacities first, then
//! the probabilistic separation oracle, then outer-approximation cuts for
//! every constraint registered so far and the enabled strengthening
//! families. Integral points are accepted only when the oracle certifies
//! them. Nodes are selected best-bound and branched on the most fractional
//! arc.

mod pool;
mod registry;

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::config::DEFAULT_ENUM_LIMIT;
use crate::cutgen::{nominal_cut, CutKind, LinearCut};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Row, Simplex};
use crate::model::{internal_nodes, CapacityModel, Cut, NetworkInstance};
use crate::separation::{
    self, BqcMode, SepStrategy, SeparationConfig, SeparationProblem, SeparationStatus,
};

use pool::CutPool;
use registry::{efficacious, ColumnSource, Registry};

/// Minimum scaled violation for a generated cut to enter the LP.
pub const CUT_TOL: f64 = 1e-6;
/// Relative optimality tolerance between bound and incumbent.
pub const GAP_TOL: f64 = 1e-6;
const INTEGRAL_TOL: f64 = 1e-6;
/// Cut rounds at a fractional point stop once the bound stalls.
const TAIL_ROUNDS: usize = 5;
const TAIL_TOL: f64 = 1e-4;

/// User-selectable cut families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutFamily {
    /// Outer-approximation gradient cuts. Always on: they are how the conic
    /// constraints enter the LP.
    Oa,
    Pack,
    /// Extended (lifted) pack inequalities.
    XPack,
    Polymatroid,
    /// Lifted covers of the polymatroid knapsacks.
    Cover,
    /// Lifted covers of aggregated polymatroid knapsacks.
    Aggregate,
}

impl CutFamily {
    pub const ALL: [CutFamily; 6] = [
        CutFamily::Oa,
        CutFamily::Pack,
        CutFamily::XPack,
        CutFamily::Polymatroid,
        CutFamily::Cover,
        CutFamily::Aggregate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CutFamily::Oa => "oa",
            CutFamily::Pack => "pack",
            CutFamily::XPack => "xpack",
            CutFamily::Polymatroid => "polymatroid",
            CutFamily::Cover => "cover",
            CutFamily::Aggregate => "aggregate",
        }
    }

    /// Parses a comma-separated list; `oa` is implied.
    pub fn parse_list(s: &str) -> Result<BTreeSet<CutFamily>> {
        let mut out = BTreeSet::from([CutFamily::Oa]);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            out.insert(part.parse()?);
        }
        Ok(out)
    }

    pub fn list_name(set: &BTreeSet<CutFamily>) -> String {
        set.iter().map(|f| f.name()).collect::<Vec<_>>().join(",")
    }

    pub fn oa_only() -> BTreeSet<CutFamily> {
        BTreeSet::from([CutFamily::Oa])
    }

    /// Extended packs for diagonal covariance, polymatroid cuts with
    /// aggregated lifted covers otherwise.
    pub fn recommended(diagonal: bool) -> BTreeSet<CutFamily> {
        if diagonal {
            BTreeSet::from([CutFamily::Oa, CutFamily::XPack])
        } else {
            BTreeSet::from([
                CutFamily::Oa,
                CutFamily::Polymatroid,
                CutFamily::Cover,
                CutFamily::Aggregate,
            ])
        }
    }
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "oa" => CutFamily::Oa,
            "pack" => CutFamily::Pack,
            "xpack" | "extended-pack" => CutFamily::XPack,
            "polymatroid" => CutFamily::Polymatroid,
            "cover" => CutFamily::Cover,
            "aggregate" | "aggregated-cover" => CutFamily::Aggregate,
            _ => return Err(Error::domain(format!("unknown cut family '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchRule {
    /// Closest to 1/2, ties by larger cost.
    MostFractional,
    /// Lowest fractional arc index.
    FirstFractional,
}

impl FromStr for BranchRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "most-fractional" => Ok(BranchRule::MostFractional),
            "first-fractional" => Ok(BranchRule::FirstFractional),
            _ => Err(Error::domain(format!("unknown branching rule '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveConfig {
    pub omega: f64,
    /// Separation strategy. Enumeration falls back to the two-stage search
    /// when the network has more than `enum_limit` internal nodes.
    pub separation: SepStrategy,
    pub cuts: BTreeSet<CutFamily>,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
    /// Cap on the estimated memory of the open node list.
    pub memory_mb: usize,
    pub branching: BranchRule,
    /// Recorded for reproducibility; the search itself is deterministic.
    pub seed: u64,
    /// Cut rounds at the root node.
    pub root_rounds: usize,
    /// Cut rounds at other nodes with a fractional LP point.
    pub node_rounds: usize,
    /// Violated cut constraints registered per enumeration round.
    pub cuts_per_round: usize,
    pub enum_limit: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            omega: 0.0,
            separation: SepStrategy::Enumeration,
            cuts: CutFamily::oa_only(),
            node_limit: 1_000_000,
            time_limit: Some(Duration::from_secs(1800)),
            memory_mb: 500,
            branching: BranchRule::MostFractional,
            seed: 0,
            root_rounds: 200,
            node_rounds: 10,
            cuts_per_round: 5,
            enum_limit: DEFAULT_ENUM_LIMIT,
        }
    }
}

impl SolveConfig {
    pub fn with_omega(omega: f64) -> Self {
        SolveConfig {
            omega,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::domain(format!("omega must be >= 0, got {}", self.omega)));
        }
        if self.node_limit == 0 || self.memory_mb == 0 {
            return Err(Error::domain("limits must be positive"));
        }
        if self.time_limit.is_some_and(|t| t.is_zero()) {
            return Err(Error::domain("time limit must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    /// Even building every arc violates some cut constraint.
    Infeasible,
    NodeLimit,
    TimeLimit,
    MemoryLimit,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NodeLimit => "node-limit",
            SolveStatus::TimeLimit => "time-limit",
            SolveStatus::MemoryLimit => "memory-limit",
        }
    }

    pub fn is_limit(self) -> bool {
        matches!(self, SolveStatus::NodeLimit | SolveStatus::TimeLimit | SolveStatus::MemoryLimit)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveStats {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    /// LP bound after the root cut loop.
    pub root_bound: f64,
    /// Global lower bound at termination.
    pub best_bound: f64,
    /// Root gap in percent, `100 (z_o - z_r) / z_o`.
    pub rgap: Option<f64>,
    /// End gap in percent between incumbent and bound; only when unsolved.
    pub egap: Option<f64>,
    pub cuts: BTreeMap<CutKind, usize>,
    pub nodes: usize,
    pub separations: usize,
    pub constraints: usize,
    pub elapsed: Duration,
}

impl SolveStats {
    /// Cover-type cuts (plain, lifted, aggregated).
    pub fn covers(&self) -> usize {
        [CutKind::Cover, CutKind::LiftedCover, CutKind::AggregatedCover]
            .iter()
            .map(|k| self.cuts.get(k).copied().unwrap_or(0))
            .sum()
    }

    /// All generated cuts except covers and linearization links.
    pub fn cut_count(&self) -> usize {
        self.cuts
            .iter()
            .filter(|(k, _)| {
                !matches!(
                    k,
                    CutKind::Cover | CutKind::LiftedCover | CutKind::AggregatedCover | CutKind::McCormickLink
                )
            })
            .map(|e| e.1)
            .sum()
    }
}

/// A certified design.
#[derive(Debug, Clone, Serialize)]
pub struct Design {
    pub x: Vec<bool>,
    pub cost: f64,
    /// `min_C Theta_C(x) - d`; non-negative for a feasible design.
    pub worst_slack: f64,
    pub worst_cut: Option<Vec<usize>>,
    pub certified_by: SepStrategy,
}

impl Design {
    pub fn arcs(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&a| self.x[a]).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub design: Option<Design>,
    pub stats: SolveStats,
}

/// Exact worst cut of a binary design: enumeration when the network is
/// small enough, else the two-stage search in minimizing mode.
pub fn certify(inst: &NetworkInstance, x: &[bool], omega: f64, enum_limit: usize) -> Result<(f64, Option<Cut>, SepStrategy)> {
    let xf: Vec<f64> = x.iter().map(|&b| b as u8 as f64).collect();
    let p = SeparationProblem::new(inst, &xf, omega)?;
    let (r, s) = if internal_nodes(inst).len() <= enum_limit {
        (separation::separate_enumeration(&p, enum_limit)?, SepStrategy::Enumeration)
    } else {
        let cfg = SeparationConfig {
            bqc_mode: BqcMode::Minimize,
            ..SeparationConfig::with_strategy(SepStrategy::Bqc)
        };
        (separation::separate(&p, &cfg)?, SepStrategy::Bqc)
    };
    Ok((r.theta - inst.demand, r.cut, s))
}

#[derive(Debug)]
struct Node {
    bound: f64,
    id: usize,
    fix: Vec<(usize, bool)>,
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
    // Max-heap: lowest bound first, newest first among equals.
    fn cmp(&self, o: &Self) -> Ordering {
        o.bound.total_cmp(&self.bound).then(self.id.cmp(&o.id))
    }
}

struct Columns<'s> {
    solver: &'s mut Simplex,
    pool: &'s mut CutPool,
    map: &'s mut HashMap<(usize, usize), usize>,
}

impl ColumnSource for Columns<'_> {
    fn product_column(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&c) = self.map.get(&key) {
            return c;
        }
        let c = self.solver.add_column(0.0, 0.0, 1.0, &[]);
        self.map.insert(key, c);
        let links = [
            Row::ge(vec![(c, 1.0), (key.0, -1.0), (key.1, -1.0)], -1.0),
            Row::le(vec![(c, 1.0), (key.0, -1.0)], 0.0),
            Row::le(vec![(c, 1.0), (key.1, -1.0)], 0.0),
        ];
        for row in links {
            let cut = LinearCut::from_sparse(row.coefs, row.sense, row.rhs, CutKind::McCormickLink, u64::MAX);
            self.pool.add(cut, true);
        }
        c
    }
}

struct Engine<'a> {
    inst: &'a NetworkInstance,
    cfg: &'a SolveConfig,
    families: Vec<CutFamily>,
    m: usize,
    solver: Simplex,
    pool: CutPool,
    registry: Registry,
    products: HashMap<(usize, usize), usize>,
    use_enum: bool,
    separations: usize,
    current_fix: Vec<Option<bool>>,
}

impl Engine<'_> {
    fn register(&mut self, cut: &Cut) -> usize {
        let mut cols = Columns {
            solver: &mut self.solver,
            pool: &mut self.pool,
            map: &mut self.products,
        };
        self.registry
            .register(self.inst, self.cfg.omega, cut, &mut cols)
            .0
    }

    fn add(&mut self, cut: LinearCut, x: &[f64]) -> bool {
        if !efficacious(&cut, x, CUT_TOL) {
            return false;
        }
        matches!(self.pool.add(cut, false), pool::Added::New | pool::Added::Reactivated)
    }

    /// One separation round at the LP point `x`; returns the number of
    /// rows added.
    fn cut_round(&mut self, x: &[f64]) -> Result<usize> {
        let inst = self.inst;
        let d = inst.demand;
        let mut added = self.pool.reactivate_violated(x, CUT_TOL);

        // Linear stage on the mean capacities.
        let caps: Vec<f64> = (0..self.m).map(|a| inst.arcs[a].mu.max(0.0) * x[a]).collect();
        let (flow, cut) = separation::max_flow_min_cut(inst, &caps);
        if flow < d - CUT_TOL * d.abs().max(1.0) {
            let k = self.register(&cut);
            let c = &self.registry.list[k];
            let model = CapacityModel::for_arcs(inst, &c.arcs, self.cfg.omega);
            let nominal = nominal_cut(&model, c.origin).remap(&c.arcs);
            if self.add(nominal, x) {
                added += 1;
            }
            if added > 0 {
                return Ok(added);
            }
        }

        // Probabilistic separation.
        let xs = &x[..self.m];
        let p = SeparationProblem::new(inst, xs, self.cfg.omega)?;
        self.separations += 1;
        let found: Vec<Cut> = if self.use_enum {
            separation::violated_cuts_enumeration(&p, self.cfg.enum_limit, self.cfg.cuts_per_round)?
                .into_iter()
                .map(|e| e.0)
                .collect()
        } else {
            let scfg = SeparationConfig {
                enum_limit: self.cfg.enum_limit,
                ..SeparationConfig::with_strategy(self.cfg.separation)
            };
            let r = separation::separate(&p, &scfg)?;
            match (r.status, r.cut) {
                (SeparationStatus::ViolatedCut, Some(c)) => vec![c],
                _ => vec![],
            }
        };
        for c in &found {
            self.register(c);
        }

        // Outer approximation and strengthening over all registered
        // constraints.
        let mut cuts = Vec::new();
        for c in self.registry.list.iter_mut() {
            if c.violated_at(x, 1e-9) {
                cuts.push(c.oa_cut(x));
            }
            // Product columns created this round have no LP value yet.
            if c.columns.iter().all(|&k| k < x.len()) {
                cuts.extend(c.strengthen(x, &self.families, CUT_TOL));
            }
        }
        for cut in cuts {
            if self.add(cut, x) {
                added += 1;
            }
        }
        Ok(added)
    }

    fn apply_fixings(&mut self, fix: &[(usize, bool)]) {
        let mut want = vec![None; self.m];
        for &(a, v) in fix {
            want[a] = Some(v);
        }
        for a in 0..self.m {
            if want[a] != self.current_fix[a] {
                let (lo, hi) = match want[a] {
                    Some(true) => (1.0, 1.0),
                    Some(false) => (0.0, 0.0),
                    None => (0.0, 1.0),
                };
                self.solver.set_bounds(a, lo, hi);
                self.current_fix[a] = want[a];
            }
        }
    }

    fn branch_var(&self, x: &[f64]) -> Option<usize> {
        let frac = |a: usize| (x[a] - x[a].round()).abs() > INTEGRAL_TOL;
        match self.cfg.branching {
            BranchRule::FirstFractional => (0..self.m).find(|&a| frac(a)),
            BranchRule::MostFractional => (0..self.m).filter(|&a| frac(a)).min_by(|&a, &b| {
                let da = (x[a] - 0.5).abs();
                let db = (x[b] - 0.5).abs();
                da.total_cmp(&db)
                    .then(self.inst.arcs[b].cost.total_cmp(&self.inst.arcs[a].cost))
                    .then(a.cmp(&b))
            }),
        }
    }
}

/// True when the bound moved by less than `TAIL_TOL` (relative) over the
/// last `TAIL_ROUNDS` rounds.
fn tailing(history: &[f64]) -> bool {
    let k = history.len();
    k > TAIL_ROUNDS && history[k - 1] - history[k - 1 - TAIL_ROUNDS] < TAIL_TOL * history[k - 1].abs().max(1.0)
}

/// Solves the design problem to optimality within the configured limits.
pub fn solve_cqnd(inst: &NetworkInstance, cfg: &SolveConfig) -> Result<Solution> {
    cfg.validate()?;
    let start = Instant::now();
    let m = inst.num_arcs();
    let internal = internal_nodes(inst).len();
    let use_enum = cfg.separation == SepStrategy::Enumeration && internal <= cfg.enum_limit;
    let mut families: Vec<CutFamily> = cfg.cuts.iter().copied().collect();
    if !families.contains(&CutFamily::Oa) {
        families.insert(0, CutFamily::Oa);
    }

    let mut stats = SolveStats {
        status: SolveStatus::Optimal,
        objective: None,
        root_bound: f64::NEG_INFINITY,
        best_bound: f64::NEG_INFINITY,
        rgap: None,
        egap: None,
        cuts: BTreeMap::new(),
        nodes: 0,
        separations: 0,
        constraints: 0,
        elapsed: Duration::ZERO,
    };

    // When every arc has Omega sigma_a <= mu_a the cut capacity is monotone,
    // so building every arc is the strongest design.
    let monotone = inst
        .sigma()
        .iter()
        .zip(&inst.arcs)
        .all(|(s, a)| cfg.omega * s <= a.mu + 1e-12);
    if monotone && certify(inst, &vec![true; m], cfg.omega, cfg.enum_limit)?.0 < -separation::VIOLATION_TOL {
        stats.status = SolveStatus::Infeasible;
        stats.elapsed = start.elapsed();
        return Ok(Solution { design: None, stats });
    }

    let lp = LinearProgram::minimize(inst.costs(), vec![0.0; m], vec![1.0; m]);
    let mut eng = Engine {
        inst,
        cfg,
        families,
        m,
        solver: Simplex::new(&lp),
        pool: CutPool::default(),
        registry: Registry::default(),
        products: HashMap::new(),
        use_enum,
        separations: 0,
        current_fix: vec![None; m],
    };

    let node_bytes = 64 + 16 * m;
    let max_open = (cfg.memory_mb * 1_000_000 / node_bytes).max(1);
    let mut incumbent: Option<(f64, Vec<bool>)> = None;
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        id: 0,
        fix: Vec::new(),
    });
    let mut next_id = 1;
    let mut status = SolveStatus::Optimal;
    let mut root_done = false;

    let prune_at = |inc: &Option<(f64, Vec<bool>)>| -> f64 {
        inc.as_ref()
            .map(|(z, _)| z - GAP_TOL * z.abs().max(1.0))
            .unwrap_or(f64::INFINITY)
    };

    while let Some(node) = heap.pop() {
        if node.bound >= prune_at(&incumbent) {
            continue;
        }
        if stats.nodes >= cfg.node_limit {
            status = SolveStatus::NodeLimit;
            heap.push(node);
            break;
        }
        if cfg.time_limit.is_some_and(|t| start.elapsed() > t) {
            status = SolveStatus::TimeLimit;
            heap.push(node);
            break;
        }
        stats.nodes += 1;
        let is_root = node.id == 0;
        eng.apply_fixings(&node.fix);
        let round_limit = if is_root { cfg.root_rounds } else { cfg.node_rounds };
        let mut rounds = 0;
        let mut history = Vec::new();
        let mut outcome: Option<(f64, Vec<f64>)> = None;
        loop {
            eng.pool.flush(&mut eng.solver);
            let sol = eng.solver.solve();
            match sol.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => break,
                other => {
                    return Err(Error::Lp(format!("master LP ended with {other:?}")));
                }
            }
            eng.pool.age(&mut eng.solver);
            let bound = sol.objective;
            if bound >= prune_at(&incumbent) {
                outcome = Some((bound, Vec::new()));
                break;
            }
            history.push(bound);
            let x = sol.x;
            let integral = x[..m].iter().all(|v| (v - v.round()).abs() <= INTEGRAL_TOL);
            if integral || (rounds < round_limit && !tailing(&history)) {
                rounds += 1;
                let added = eng.cut_round(&x)?;
                if added > 0 {
                    continue;
                }
            }
            outcome = Some((bound, x));
            break;
        }
        if is_root {
            root_done = true;
            stats.root_bound = outcome.as_ref().map(|o| o.0).unwrap_or(f64::INFINITY);
        }
        let Some((bound, x)) = outcome else { continue };
        if x.is_empty() {
            continue;
        }
        match eng.branch_var(&x) {
            None => {
                // Integral and no violated cut: certified by the oracle.
                let design: Vec<bool> = x[..m].iter().map(|&v| v > 0.5).collect();
                let cost = inst.design_cost(&design);
                if incumbent.as_ref().map_or(true, |(z, _)| cost < *z) {
                    incumbent = Some((cost, design));
                }
            }
            Some(a) => {
                if heap.len() + 2 > max_open {
                    status = SolveStatus::MemoryLimit;
                    heap.push(Node { bound, id: node.id, fix: node.fix });
                    break;
                }
                for val in [false, true] {
                    let mut fix = node.fix.clone();
                    fix.push((a, val));
                    heap.push(Node {
                        bound,
                        id: next_id,
                        fix,
                    });
                    next_id += 1;
                }
            }
        }
    }

    let open_bound = heap
        .iter()
        .map(|n| n.bound)
        .fold(f64::INFINITY, f64::min);
    stats.cuts = eng.pool.counts.clone();
    stats.separations = eng.separations;
    stats.constraints = eng.registry.list.len();
    if !root_done {
        stats.root_bound = f64::NEG_INFINITY;
    }
    let design = match incumbent {
        Some((cost, x)) => {
            let (slack, worst, by) = certify(inst, &x, cfg.omega, cfg.enum_limit)?;
            if slack < -separation::VIOLATION_TOL {
                return Err(Error::Lp(format!(
                    "incumbent failed certification (slack {slack})"
                )));
            }
            Some(Design {
                x,
                cost,
                worst_slack: slack,
                worst_cut: worst.map(|c| c.arc_ids),
                certified_by: by,
            })
        }
        None => None,
    };
    stats.status = match (&design, status) {
        (None, SolveStatus::Optimal) => SolveStatus::Infeasible,
        (_, s) => s,
    };
    stats.best_bound = match &design {
        Some(d) if status == SolveStatus::Optimal => d.cost,
        Some(d) => open_bound.min(d.cost),
        None => open_bound,
    };
    if let Some(d) = &design {
        stats.objective = Some(d.cost);
        if d.cost.abs() > 0.0 && stats.root_bound.is_finite() {
            stats.rgap = Some(100.0 * ((d.cost - stats.root_bound) / d.cost).max(0.0));
        } else if d.cost == 0.0 {
            stats.rgap = Some(0.0);
        }
        if status.is_limit() && d.cost.abs() > 0.0 {
            stats.egap = Some(100.0 * ((d.cost - stats.best_bound) / d.cost).max(0.0));
        }
    }
    stats.elapsed = start.elapsed();
    Ok(Solution { design, stats })
}

/// Root gap of `solve_cqnd` under `cfg`, in percent.
pub fn root_gap(inst: &NetworkInstance, cfg: &SolveConfig) -> Result<Option<f64>> {
    Ok(solve_cqnd(inst, cfg)?.stats.rgap)
}

/// Cheapest binary design by exhaustive enumeration; for testing only on
/// small arc counts.
pub fn brute_force(inst: &NetworkInstance, omega: f64, enum_limit: usize) -> Result<Option<(f64, Vec<bool>)>> {
    let m = inst.num_arcs();
    if m > 20 {
        return Err(Error::Size {
            what: "arc count for design enumeration",
            size: m,
            limit: 20,
        });
    }
    let mut order: Vec<u64> = (0..1u64 << m).collect();
    let cost = |mask: u64| -> f64 { (0..m).filter(|&a| mask >> a & 1 == 1).map(|a| inst.arcs[a].cost).sum() };
    order.sort_by(|&a, &b| cost(a).total_cmp(&cost(b)).then(a.cmp(&b)));
    for mask in order {
        let x: Vec<bool> = (0..m).map(|a| mask >> a & 1 == 1).collect();
        if !inst.has_path(&x) {
            continue;
        }
        let (slack, _, _) = certify(inst, &x, omega, enum_limit)?;
        if slack >= -separation::VIOLATION_TOL {
            return Ok(Some((cost(mask), x)));
        }
    }
    Ok(None)
}
