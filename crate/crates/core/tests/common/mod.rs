//! Shared fixtures for integration tests.
#![allow(dead_code)]

pub mod criteria;
pub mod lp_oracle;
pub mod validity;

use probnet_core::instgen::{generate, GenSpec, Regime};
use probnet_core::model::NetworkInstance;
use probnet_core::separation::{
    separate, SepStrategy, SeparationConfig, SeparationProblem, SeparationStatus,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Ten-node instance (eight internal nodes), regime cycling with `k`.
pub fn equivalence_instance(k: u64) -> NetworkInstance {
    let regime = Regime::ALL[(k % 3) as usize];
    let omega = [1.0, 3.0, 5.0][(k / 3 % 3) as usize];
    generate(&GenSpec { nodes: 10, omega, beta: 0.5, regime, seed: 1000 + k }).unwrap()
}

/// Fractional points mixing exact zeros, ones and interior values.
pub fn random_xbar(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..m)
        .map(|_| match rng.gen_range(0..4) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen::<f64>(),
        })
        .collect()
}

#[derive(Debug, Default)]
pub struct Disagreements {
    pub checks: usize,
    pub status: Vec<String>,
    pub theta: Vec<String>,
}

/// Runs every applicable strategy against enumeration on one point.
pub fn compare_strategies(inst: &NetworkInstance, omega: f64, xbar: &[f64], out: &mut Disagreements) {
    let p = SeparationProblem::new(inst, xbar, omega).unwrap();
    let oracle = separate(&p, &SeparationConfig::with_strategy(SepStrategy::Enumeration)).unwrap();
    for s in [SepStrategy::Bqc, SepStrategy::Qcqp, SepStrategy::Mc, SepStrategy::Nw] {
        if !s.applicable(p.is_diagonal()) {
            continue;
        }
        out.checks += 1;
        let r = separate(&p, &SeparationConfig::with_strategy(s)).unwrap();
        let tag = format!("{} {s}", inst.id.clone().unwrap_or_default());
        if r.status != oracle.status || r.status == SeparationStatus::Limit {
            out.status.push(format!("{tag}: {:?} vs {:?}", r.status, oracle.status));
            continue;
        }
        // Relaxation searches are exact minimizers; the two-stage search
        // only reports the minimum when some cut is violated.
        let compare = s != SepStrategy::Bqc || r.is_violated();
        if compare && (r.theta - oracle.theta).abs() > 1e-6 {
            out.theta.push(format!("{tag}: theta {} vs {}", r.theta, oracle.theta));
        }
    }
}

pub fn omega_of(inst: &NetworkInstance) -> f64 {
    let id = inst.id.as_deref().unwrap_or("");
    id.split("-o").nth(1).and_then(|s| s.split('-').next()).and_then(|s| s.parse().ok()).unwrap()
}

pub fn run_equivalence(instances: u64, points: usize) -> Disagreements {
    let mut out = Disagreements::default();
    for k in 0..instances {
        let inst = equivalence_instance(k);
        let omega = omega_of(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(k);
        for _ in 0..points {
            let x = random_xbar(inst.num_arcs(), &mut rng);
            compare_strategies(&inst, omega, &x, &mut out);
        }
    }
    out
}
