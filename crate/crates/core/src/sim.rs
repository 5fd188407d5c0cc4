//! Monte-Carlo service levels of a design.
//!
//! Capacities are drawn as `mu + L z` with `L` the Cholesky factor of the
//! covariance and `z` standard normals from inverse-c.d.f. sampling,
//! truncated at zero. Samples are split into a fixed number of partitions,
//! each with its own ChaCha8 stream, so the report does not depend on the
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bnb::{solve_cqnd, SolveConfig, SolveStatus};
use crate::error::{Error, Result};
use crate::flow;
use crate::linalg::{cholesky, LowerTriangular};
use crate::model::{omega_from_epsilon, NetworkInstance, OmegaModel};

/// Number of independent sample streams.
pub const PARTITIONS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub samples: usize,
    /// Fraction of samples whose min cut meets the demand.
    pub service_level: f64,
    pub min_cut_min: f64,
    pub min_cut_mean: f64,
    pub min_cut_max: f64,
    /// Fraction of sampled capacities of built arcs that were negative and
    /// clipped to zero.
    pub truncated: f64,
    pub seed: u64,
    pub warning: Option<String>,
}

/// Correlated normal capacity sampler.
#[derive(Debug, Clone)]
pub struct Sampler {
    mu: Vec<f64>,
    factor: LowerTriangular,
    normal: Normal,
}

impl Sampler {
    pub fn new(inst: &NetworkInstance) -> Result<Self> {
        Ok(Sampler {
            mu: inst.mu(),
            factor: cholesky(inst.cov())?,
            normal: Normal::standard(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// Standard normal by inversion of a uniform on the open interval.
    fn std_normal(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u = ((rng.gen::<u64>() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
        self.normal.inverse_cdf(u)
    }

    /// One draw of `mu + L z` before truncation.
    pub fn draw_into(&self, rng: &mut ChaCha8Rng, z: &mut [f64], out: &mut [f64]) {
        for v in z.iter_mut() {
            *v = self.std_normal(rng);
        }
        self.factor.mul_vec_into(z, out);
        for (o, m) in out.iter_mut().zip(&self.mu) {
            *o += m;
        }
    }
}

/// Stream for one partition of a run.
pub fn partition_rng(seed: u64, partition: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(partition as u64);
    rng
}

fn partition_sizes(n: usize) -> Vec<usize> {
    (0..PARTITIONS)
        .map(|p| n / PARTITIONS + usize::from(p < n % PARTITIONS))
        .collect()
}

struct Part {
    cuts: Vec<f64>,
    truncated: usize,
}

pub fn simulate(design: &[bool], inst: &NetworkInstance, n_samples: usize, seed: u64) -> Result<SimReport> {
    Ok(simulate_with_samples(design, inst, n_samples, seed)?.0)
}

/// Like [`simulate`], also returning every sampled min-cut value in
/// partition order.
pub fn simulate_with_samples(
    design: &[bool],
    inst: &NetworkInstance,
    n_samples: usize,
    seed: u64,
) -> Result<(SimReport, Vec<f64>)> {
    let m = inst.num_arcs();
    if design.len() != m {
        return Err(Error::domain(format!("design has {} entries for {m} arcs", design.len())));
    }
    if n_samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let sampler = Sampler::new(inst)?;
    let built: Vec<usize> = (0..m).filter(|&a| design[a]).collect();
    let arcs: Vec<(usize, usize)> = built.iter().map(|&a| (inst.arcs[a].tail, inst.arcs[a].head)).collect();
    let warning = (!inst.has_path(design)).then(|| "design has no s-t path".to_string());

    let parts: Vec<Part> = partition_sizes(n_samples)
        .into_par_iter()
        .enumerate()
        .map(|(p, count)| {
            let mut rng = partition_rng(seed, p);
            let mut z = vec![0.0; m];
            let mut xi = vec![0.0; m];
            let mut caps = vec![0.0; built.len()];
            let mut part = Part {
                cuts: Vec::with_capacity(count),
                truncated: 0,
            };
            for _ in 0..count {
                sampler.draw_into(&mut rng, &mut z, &mut xi);
                for (c, &a) in caps.iter_mut().zip(&built) {
                    if xi[a] < 0.0 {
                        part.truncated += 1;
                    }
                    *c = xi[a].max(0.0);
                }
                let value = flow::min_cut(inst.nodes, &arcs, &caps, inst.source, inst.sink).value;
                part.cuts.push(value);
            }
            part
        })
        .collect();

    let truncated: usize = parts.iter().map(|p| p.truncated).sum();
    let cuts: Vec<f64> = parts.into_iter().flat_map(|p| p.cuts).collect();
    let d = inst.demand;
    let met = cuts.iter().filter(|&&c| c >= d).count();
    let report = SimReport {
        samples: n_samples,
        service_level: met as f64 / n_samples as f64,
        min_cut_min: cuts.iter().cloned().fold(f64::INFINITY, f64::min),
        min_cut_mean: cuts.iter().sum::<f64>() / n_samples as f64,
        min_cut_max: cuts.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        truncated: if built.is_empty() {
            0.0
        } else {
            truncated as f64 / (n_samples * built.len()) as f64
        },
        seed,
        warning,
    };
    Ok((report, cuts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffRow {
    pub epsilon: f64,
    pub omega: f64,
    /// `1 - epsilon`.
    pub model_service_level: f64,
    pub status: String,
    pub cost: Option<f64>,
    /// Cost in percent of the `epsilon = 0.5` design.
    pub cost_ratio: Option<f64>,
    pub simulated_service_level: Option<f64>,
    pub min_cut_min: Option<f64>,
    pub min_cut_mean: Option<f64>,
    pub min_cut_max: Option<f64>,
    pub arcs: String,
}

/// Solves and simulates the design for every `epsilon`. `config.omega` is
/// replaced per row.
pub fn tradeoff_curve(
    inst: &NetworkInstance,
    epsilons: &[f64],
    omega_model: OmegaModel,
    config: &SolveConfig,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<TradeoffRow>> {
    let solve_at = |eps: f64| -> Result<(f64, crate::bnb::Solution)> {
        let omega = omega_from_epsilon(omega_model, eps)?;
        let cfg = SolveConfig {
            omega,
            ..config.clone()
        };
        Ok((omega, solve_cqnd(inst, &cfg)?))
    };
    let base = solve_at(0.5)?.1.design.map(|d| d.cost);
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let (omega, sol) = solve_at(eps)?;
        let mut row = TradeoffRow {
            epsilon: eps,
            omega,
            model_service_level: 1.0 - eps,
            status: sol.stats.status.to_string(),
            cost: None,
            cost_ratio: None,
            simulated_service_level: None,
            min_cut_min: None,
            min_cut_mean: None,
            min_cut_max: None,
            arcs: String::new(),
        };
        if let Some(d) = &sol.design {
            let r = simulate(&d.x, inst, n_samples, seed)?;
            row.cost = Some(d.cost);
            row.cost_ratio = base.filter(|&b| b > 0.0).map(|b| 100.0 * d.cost / b);
            row.simulated_service_level = Some(r.service_level);
            row.min_cut_min = Some(r.min_cut_min);
            row.min_cut_mean = Some(r.min_cut_mean);
            row.min_cut_max = Some(r.min_cut_max);
            row.arcs = d.arcs().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
        } else {
            debug_assert!(sol.stats.status != SolveStatus::Optimal);
        }
        rows.push(row);
    }
    Ok(rows)
}
