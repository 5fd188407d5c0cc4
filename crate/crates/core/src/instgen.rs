//! Random benchmark instances.
//!
//! Node 0 is the source and node `n-1` the sink. Each ordered pair `i < j`
//! carries an arc with probability `1/sqrt(n)`; nodes left without an
//! incoming or outgoing arc get one to a random earlier or later node, so
//! every node lies on an s-t path. Costs are integers uniform in `[1, 100]`.
//!
//! Capacities by regime:
//! - independent: `mu ~ U[0,100]`, `sigma ~ U[0, mu/Omega]`, diagonal.
//! - correlated: a random SPD matrix `Q diag(lambda) Q'` whose spectrum is
//!   shifted up by half its spectral radius is rescaled to a correlation
//!   matrix and then to standard deviations `s ~ U[0, 50/Omega]`; means are
//!   `U[Omega s, 2 Omega s]`, so the coefficient-of-variation bound holds.
//! - general: the same covariance with means `U[0, 2 Omega s]`.
//!
//! The demand is `beta` times the Omega-adjusted max flow, the largest
//! minimum over cuts of `mu_C'x - Omega sqrt(x'Sigma_C x)` over designs `x`
//! (every arc built when the coefficient-of-variation bound holds, a local
//! search otherwise). Capacities are redrawn until that flow is positive.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::model::{internal_nodes, Arc, NetworkInstance};
use crate::separation::{self, BqcMode, SepStrategy, SeparationConfig, SeparationProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Independent,
    Correlated,
    General,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Independent, Regime::Correlated, Regime::General];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Independent => "independent",
            Regime::Correlated => "correlated",
            Regime::General => "general",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "independent" | "indep" | "diagonal" => Ok(Regime::Independent),
            "correlated" | "corr" => Ok(Regime::Correlated),
            "general" => Ok(Regime::General),
            _ => Err(Error::domain(format!("unknown regime '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub nodes: usize,
    pub omega: f64,
    pub beta: f64,
    pub regime: Regime,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 3 {
            return Err(Error::domain(format!("need at least 3 nodes, got {}", self.nodes)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::domain(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::domain(format!("omega must be positive, got {}", self.omega)));
        }
        Ok(())
    }

    pub fn id(&self) -> String {
        format!(
            "{}-n{}-b{}-o{}-s{}",
            self.regime.name(),
            self.nodes,
            self.beta,
            self.omega,
            self.seed
        )
    }
}

/// The benchmark grid: `beta in {0.3, 0.5, 0.7}` x `Omega in {1, 3, 5}` x
/// five seeds per node count. Seeds are `base_seed + k`.
pub fn benchmark_grid(regime: Regime, node_counts: &[usize], base_seed: u64) -> Vec<GenSpec> {
    let mut out = Vec::new();
    let mut k = 0;
    for &nodes in node_counts {
        for beta in [0.3, 0.5, 0.7] {
            for omega in [1.0, 3.0, 5.0] {
                for _ in 0..5 {
                    out.push(GenSpec {
                        nodes,
                        omega,
                        beta,
                        regime,
                        seed: base_seed + k,
                    });
                    k += 1;
                }
            }
        }
    }
    out
}

fn arcs_topology(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut arcs = sample_pairs(n, rng);
    repair_connectivity(n, &mut arcs, rng);
    arcs.sort_unstable();
    arcs
}

/// Each pair `i < j` independently with probability `1/sqrt(n)`.
fn sample_pairs(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let p = 1.0 / (n as f64).sqrt();
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                arcs.push((i, j));
            }
        }
    }
    arcs
}

fn repair_connectivity(n: usize, arcs: &mut Vec<(usize, usize)>, rng: &mut ChaCha8Rng) {
    let mut has_in = vec![false; n];
    let mut has_out = vec![false; n];
    for &(i, j) in arcs.iter() {
        has_out[i] = true;
        has_in[j] = true;
    }
    for v in 1..n - 1 {
        if !has_in[v] {
            let u = rng.gen_range(0..v);
            arcs.push((u, v));
            has_out[u] = true;
        }
        if !has_out[v] {
            let w = rng.gen_range(v + 1..n);
            arcs.push((v, w));
            has_in[w] = true;
        }
    }
    if !has_out[0] {
        arcs.push((0, n - 1));
    }
}

/// Random orthogonal matrix by modified Gram-Schmidt on Gaussian columns.
fn random_orthogonal(m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(m);
    while q.len() < m {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for u in &q {
            let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(vi, ui)| *vi -= d * ui);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            q.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    q
}

/// Correlation matrix of a random SPD matrix whose eigenvalues are shifted
/// by half the spectral radius.
fn random_correlation(m: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
    let q = random_orthogonal(m, rng);
    let mut lambda: Vec<f64> = (0..m).map(|_| rng.gen_range(1e-3..1.0)).collect();
    let radius = lambda.iter().cloned().fold(0.0, f64::max);
    lambda.iter_mut().for_each(|l| *l += radius / 2.0);
    let mut a = SymMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            let v: f64 = (0..m).map(|k| q[k][i] * lambda[k] * q[k][j]).sum();
            a.set_sym(i, j, v);
        }
    }
    let d: Vec<f64> = (0..m).map(|i| 1.0 / a.get(i, i).sqrt()).collect();
    let mut c = a.scaled(&d);
    for i in 0..m {
        c.set(i, i, 1.0);
        for j in i + 1..m {
            let v = c.get(i, j).clamp(-1.0, 1.0);
            c.set_sym(i, j, v);
        }
    }
    c
}

/// Minimum over cuts of `Theta` for the design `x`.
fn min_theta(inst: &NetworkInstance, x: &[bool], omega: f64) -> Result<f64> {
    let xf: Vec<f64> = x.iter().map(|&b| f64::from(u8::from(b))).collect();
    if internal_nodes(inst).len() <= 16 {
        let p = SeparationProblem::new(inst, &xf, omega)?;
        return Ok(separation::separate_enumeration(&p, 16)?.theta);
    }
    // Minimize mode against an unreachable demand returns the global minimum.
    let total: f64 = inst.arcs.iter().map(|a| a.mu.abs()).sum();
    let probe = inst.with_demand(total + 1.0);
    let p = SeparationProblem::new(&probe, &xf, omega)?;
    let config = SeparationConfig {
        bqc_mode: BqcMode::Minimize,
        ..SeparationConfig::with_strategy(SepStrategy::Bqc)
    };
    Ok(separation::separate(&p, &config)?.theta)
}

/// The Omega-adjusted max flow: the largest minimum-cut `Theta` over
/// designs. When every arc has `Omega sigma_a <= mu_a` the cut capacity is
/// monotone and building every arc attains it. Otherwise arcs are dropped
/// one at a time while that raises the minimum, which gives an attainable
/// lower bound.
pub fn omega_max_flow(inst: &NetworkInstance, omega: f64) -> Result<f64> {
    let m = inst.num_arcs();
    let mut x = vec![true; m];
    let mut best = min_theta(inst, &x, omega)?;
    let monotone = inst
        .sigma()
        .iter()
        .zip(&inst.arcs)
        .all(|(s, a)| omega * s <= a.mu);
    if monotone {
        return Ok(best);
    }
    loop {
        let mut improved = false;
        for a in 0..m {
            if !x[a] {
                continue;
            }
            x[a] = false;
            let t = min_theta(inst, &x, omega)?;
            if t > best + 1e-9 {
                best = t;
                improved = true;
            } else {
                x[a] = true;
            }
        }
        if !improved {
            return Ok(best);
        }
    }
}

/// Capacity draws per instance before giving up on a positive max flow.
const MAX_DRAWS: usize = 100;

pub fn generate(spec: &GenSpec) -> Result<NetworkInstance> {
    spec.validate()?;
    let n = spec.nodes;
    let omega = spec.omega;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let topo = arcs_topology(n, &mut rng);
    let m = topo.len();
    let costs: Vec<f64> = (0..m).map(|_| rng.gen_range(1..=100) as f64).collect();

    for _ in 0..MAX_DRAWS {
        let (mu, cov) = draw_capacities(spec, m, &mut rng);
        let arcs: Vec<Arc> = topo
            .iter()
            .zip(costs.iter().zip(&mu))
            .map(|(&(tail, head), (&cost, &mu))| Arc { tail, head, cost, mu })
            .collect();
        let inst = NetworkInstance::new(n, 0, n - 1, 0.0, arcs, cov)?;
        let phi = omega_max_flow(&inst, omega)?;
        if phi > 0.0 {
            let mut inst = inst.with_demand(spec.beta * phi).with_id(spec.id());
            inst.beta = Some(spec.beta);
            return Ok(inst);
        }
    }
    Err(Error::domain(format!(
        "no capacity draw with positive max flow for {}",
        spec.id()
    )))
}

fn draw_capacities(spec: &GenSpec, m: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, SymMatrix) {
    let omega = spec.omega;
    match spec.regime {
        Regime::Independent => {
            let mu: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..100.0)).collect();
            let var: Vec<f64> = mu
                .iter()
                .map(|&u| (rng.gen::<f64>() * u / omega).powi(2))
                .collect();
            (mu, SymMatrix::from_diag(&var))
        }
        Regime::Correlated | Regime::General => {
            let corr = random_correlation(m, rng);
            let s: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * 50.0 / omega).collect();
            let mu: Vec<f64> = s
                .iter()
                .map(|&si| {
                    let (lo, hi) = if spec.regime == Regime::Correlated {
                        (omega * si, 2.0 * omega * si)
                    } else {
                        (0.0, 2.0 * omega * si)
                    };
                    lo + rng.gen::<f64>() * (hi - lo)
                })
                .collect();
            (mu, corr.scaled(&s))
        }
    }
}
