//! Exhaustive validity checks for every cut family. Each check sweeps the
//! whole binary cube of a small ground set and returns a description of
//! the first valid point a cut removes.

use probnet_core::cutgen::{
    aggregate_and_cover, build_q_tilde, find_cover, find_pack, lift_cover_superadditive,
    lift_pack, oa_gradient_cut, CutKind, Knapsack, LinearCut,
};
use probnet_core::linalg::SymMatrix;
use probnet_core::lp::RowSense;
use probnet_core::model::CapacityModel;
use probnet_core::submodular::{greedy_vertex, mask_to_set, separate_polymatroid, SetFunction, ShiftedQuadratic};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-7;

pub type Check = Result<(), String>;

pub fn bits(mask: u64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (mask >> i & 1) as f64).collect()
}

pub fn holds_on(cut: &LinearCut, n: usize, feasible: impl Fn(&[f64]) -> bool) -> Check {
    for mask in 0..1u64 << n {
        let x = bits(mask, n);
        if feasible(&x) && cut.violation(&x) > TOL {
            return Err(format!("{:?} cut removes valid point {x:?}", cut.kind));
        }
    }
    Ok(())
}

/// Covariance `F F'`, PSD by construction.
pub fn cov_from_factor(n: usize, f: &[f64]) -> SymMatrix {
    let mut c = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let v: f64 = (0..n).map(|k| f[i * n + k] * f[j * n + k]).sum();
            c.set(i, j, v);
        }
    }
    c
}

pub fn general_model(n: usize, mu: Vec<f64>, factor: &[f64], omega: f64, d: f64) -> CapacityModel {
    CapacityModel::new(mu, cov_from_factor(n, factor), omega, d).unwrap()
}

/// Diagonal model with `mu_i >= Omega sigma_i`; `frac` sets `sigma_i` as a
/// fraction of `mu_i / Omega` and the demand is `dfrac` of the total mean.
pub fn cv_diagonal_model(mu: Vec<f64>, frac: &[f64], omega: f64, dfrac: f64) -> CapacityModel {
    let var: Vec<f64> = mu.iter().zip(frac).map(|(m, f)| (m * f / omega).powi(2)).collect();
    let total: f64 = mu.iter().sum();
    CapacityModel::new(mu, SymMatrix::from_diag(&var), omega, dfrac * total).unwrap()
}

pub fn random_general(rng: &mut ChaCha8Rng, max_n: usize) -> (CapacityModel, Vec<f64>) {
    let n = rng.gen_range(2..=max_n);
    let mu = (0..n).map(|_| rng.gen_range(0.0..50.0)).collect();
    let f: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-4.0..4.0)).collect();
    let m = general_model(n, mu, &f, rng.gen_range(0.0..3.0), rng.gen_range(0.0..120.0));
    (m, unit_point(rng, n))
}

pub fn random_cv_diagonal(rng: &mut ChaCha8Rng, max_n: usize) -> (CapacityModel, Vec<f64>) {
    let n = rng.gen_range(2..=max_n);
    let mu = (0..n).map(|_| rng.gen_range(1.0..60.0)).collect();
    let frac: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let m = cv_diagonal_model(mu, &frac, rng.gen_range(0.1..2.5), rng.gen_range(0.05..0.9));
    (m, unit_point(rng, n))
}

pub fn random_knapsack(rng: &mut ChaCha8Rng, max_n: usize) -> (Knapsack, Vec<f64>) {
    let n = rng.gen_range(2..=max_n);
    let c = (0..n).map(|_| rng.gen_range(-20.0..30.0)).collect();
    (Knapsack::new(c, rng.gen_range(0.0..60.0)), unit_point(rng, n))
}

pub fn unit_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen()).collect()
}

fn polymatroid_cut(v: &[f64], gamma: f64) -> LinearCut {
    LinearCut::new(v, RowSense::Le, gamma, CutKind::Polymatroid, 0)
}

pub fn check_oa(m: &CapacityModel, xbar: &[f64]) -> Check {
    let cut = oa_gradient_cut(m, xbar, 0);
    holds_on(&cut, m.len(), |x| m.satisfied(x, -1e-9))?;
    if m.eval_f(xbar) < m.demand - 1e-6 && m.variance(xbar) > 1e-9 && cut.violation(xbar) < 1e-9 {
        return Err("OA cut does not separate a violating point".into());
    }
    Ok(())
}

pub fn check_packs(m: &CapacityModel, xbar: &[f64]) -> Check {
    let n = m.len();
    let Some(pack) = find_pack(m, xbar).map_err(|e| e.to_string())? else {
        return Ok(());
    };
    if pack.slack <= 0.0 {
        return Err("pack with non-positive slack".into());
    }
    for j in (0..n).filter(|&j| !pack.contains(j)) {
        let mut s = vec![false; n];
        for &i in &pack.arcs {
            s[i] = true;
        }
        s[j] = true;
        if m.eval_f_set(&s) < m.demand {
            return Err(format!("pack is not maximal: adding {j} stays short"));
        }
    }
    let plain = pack.inequality(n, 0);
    let ext = lift_pack(&pack, m, xbar, 0).map_err(|e| e.to_string())?;
    holds_on(&plain, n, |x| m.satisfied(x, -1e-9))?;
    holds_on(&ext, n, |x| m.satisfied(x, -1e-9))?;
    for &(j, a) in &ext.coefs {
        if a < 0.0 || (!pack.contains(j) && a != 1.0) {
            return Err(format!("extended pack coefficient {a} on {j}"));
        }
    }
    // The lifted form implies the plain one on the cube.
    for mask in 0..1u64 << n {
        let x = bits(mask, n);
        if ext.violation(&x) <= 1e-12 && plain.violation(&x) > 1e-12 {
            return Err("extended pack weaker than pack".into());
        }
    }
    Ok(())
}

pub fn check_covers(k: &Knapsack, xbar: &[f64]) -> Check {
    let n = k.len();
    let Some(cover) = find_cover(k, xbar) else {
        return Ok(());
    };
    let feasible = |x: &[f64]| {
        let s: Vec<bool> = x.iter().map(|&v| v > 0.5).collect();
        k.is_feasible(&s)
    };
    holds_on(&cover.inequality(n, 0), n, feasible)?;
    let lifted = lift_cover_superadditive(&cover, k, xbar, 0);
    holds_on(&lifted, n, feasible)?;
    let top = cover.members.len() as f64 - 1.0;
    for &(j, a) in &lifted.coefs {
        if !cover.members.contains(&j) && a.abs() > top + 1e-12 {
            return Err(format!("lifted coefficient {a} exceeds |C| - 1"));
        }
    }
    Ok(())
}

pub fn check_aggregate(k1: &Knapsack, k2: &Knapsack, xbar: &[f64]) -> Check {
    let n = k1.len();
    let both = |x: &[f64]| {
        let s: Vec<bool> = x.iter().map(|&v| v > 0.5).collect();
        k1.is_feasible(&s) && k2.is_feasible(&s)
    };
    match aggregate_and_cover(&[k1.clone(), k2.clone()], xbar, 3) {
        Some(cut) => holds_on(&cut, n, both),
        None => Ok(()),
    }
}

pub fn check_polymatroid_cv(m: &CapacityModel, xbar: &[f64]) -> Check {
    let q = m.quadratic_form();
    let d2 = m.demand * m.demand;
    let pc = separate_polymatroid(xbar, &ShiftedQuadratic(&q), d2);
    // Points meeting the constraint with mean at least d have q <= 0.
    holds_on(&polymatroid_cut(&pc.vertex.v, d2), m.len(), |x| {
        m.satisfied(x, -1e-9) && m.mean(x) >= m.demand
    })
}

/// The relaxed form agrees with `q` on binaries, and both its polymatroid
/// cuts and its product links hold at every lifted valid point.
pub fn check_q_tilde(m: &CapacityModel, xbar: &[f64]) -> Check {
    let q = m.quadratic_form();
    let t = build_q_tilde(&q);
    let n = m.len();
    for mask in 0..1u64 << n {
        let s = mask_to_set(mask, n);
        let (a, b) = (t.form.eval(&t.expand_set(&s)), q.eval(&s));
        if (a - b).abs() > 1e-6 * (1.0 + b.abs()) {
            return Err(format!("relaxed form {a} differs from q {b}"));
        }
    }
    let d2 = m.demand * m.demand;
    let pc = separate_polymatroid(&t.expand(xbar), &ShiftedQuadratic(&t.form), d2);
    let cut = polymatroid_cut(&pc.vertex.v, d2);
    let links = t.links(0);
    for mask in 0..1u64 << n {
        let x = bits(mask, n);
        let z = t.expand(&x);
        for link in &links {
            if link.violation(&z) > TOL {
                return Err(format!("product link removes {x:?}"));
            }
        }
        if m.satisfied(&x, -1e-9) && m.mean(&x) >= m.demand && cut.violation(&z) > 1e-6 * (1.0 + d2) {
            return Err(format!("relaxed polymatroid cut removes {x:?}"));
        }
    }
    Ok(())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Greedy's value `xbar'v` equals the best over all `n!` vertex orders.
pub fn check_greedy_is_optimal<G: SetFunction>(g: &G, xbar: &[f64]) -> Check {
    let greedy = separate_polymatroid(xbar, g, 0.0).vertex.dot(xbar);
    let best = permutations(g.ground_size())
        .iter()
        .map(|p| greedy_vertex(g, p).dot(xbar))
        .fold(f64::NEG_INFINITY, f64::max);
    if (greedy - best).abs() > 1e-7 * (1.0 + best.abs()) {
        return Err(format!("greedy {greedy} vs brute force {best}"));
    }
    Ok(())
}
