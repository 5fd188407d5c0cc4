//! Brute-force vertex enumeration for small bounded LPs.

use probnet_core::lp::{self, LinearProgram, LpStatus, Row, RowSense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every constraint as `a'x <= b`.
pub fn halfspaces(lp: &LinearProgram) -> Vec<(Vec<f64>, f64)> {
    let n = lp.num_cols();
    let mut out = Vec::new();
    for j in 0..n {
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        out.push((a.clone(), lp.upper[j]));
        a[j] = -1.0;
        out.push((a, -lp.lower[j]));
    }
    for r in &lp.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &r.coefs {
            a[j] += v;
        }
        match r.sense {
            RowSense::Le => out.push((a, r.rhs)),
            RowSense::Ge => out.push((a.iter().map(|v| -v).collect(), -r.rhs)),
            RowSense::Eq => {
                out.push((a.iter().map(|v| -v).collect(), -r.rhs));
                out.push((a, r.rhs));
            }
        }
    }
    out
}

pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[p][c].abs() < 1e-9 {
            return None;
        }
        a.swap(p, c);
        b.swap(p, c);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in 0..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

pub fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Optimal value by enumerating all vertices, `None` if infeasible.
pub fn vertex_oracle(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_cols();
    let hs = halfspaces(lp);
    let mut best: Option<f64> = None;
    for combo in combinations(hs.len(), n) {
        let a = combo.iter().map(|&i| hs[i].0.clone()).collect();
        let b = combo.iter().map(|&i| hs[i].1).collect();
        let Some(x) = solve_square(a, b) else { continue };
        let feasible = hs
            .iter()
            .all(|(a, b)| a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>() <= b + 1e-7);
        if feasible {
            let obj: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            best = Some(best.map_or(obj, |o: f64| o.min(obj)));
        }
    }
    best
}

pub fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=5);
    let m = rng.gen_range(1..=7);
    let objective = (0..n).map(|_| rng.gen_range(-10.0..10.0f64).round()).collect();
    let lower = (0..n).map(|_| rng.gen_range(-3.0..1.0f64).round()).collect::<Vec<_>>();
    let upper = lower.iter().map(|l| l + rng.gen_range(0.0..6.0f64).round()).collect();
    let mut lp = LinearProgram::minimize(objective, lower, upper);
    for _ in 0..m {
        let mut coefs = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                coefs.push((j, rng.gen_range(-5.0..5.0f64).round()));
            }
        }
        let sense = match rng.gen_range(0..5) {
            0 => RowSense::Eq,
            1 | 2 => RowSense::Ge,
            _ => RowSense::Le,
        };
        lp.add_row(Row::new(coefs, sense, rng.gen_range(-8.0..8.0f64).round()));
    }
    lp
}

#[derive(Debug, Default)]
pub struct VertexReport {
    pub optimal: usize,
    pub infeasible: usize,
    pub failures: Vec<String>,
}

/// Solves `count` random LPs and compares each with vertex enumeration:
/// status, objective, primal feasibility and strong duality.
pub fn compare_with_vertices(count: usize, seed: u64) -> VertexReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = VertexReport::default();
    for case in 0..count {
        let lp = random_lp(&mut rng);
        let sol = lp::solve(&lp);
        match vertex_oracle(&lp) {
            Some(v) => {
                rep.optimal += 1;
                let tol = 1e-6 * (1.0 + v.abs());
                let dual: f64 = lp.rows.iter().zip(&sol.duals).map(|(r, y)| r.rhs * y).sum::<f64>()
                    + sol.reduced_costs.iter().zip(&sol.x).map(|(d, x)| d * x).sum::<f64>();
                let ok = sol.status == LpStatus::Optimal
                    && (sol.objective - v).abs() <= tol
                    && lp.rows.iter().all(|r| r.violation(&sol.x) <= 1e-6)
                    && (0..lp.num_cols()).all(|j| sol.x[j] >= lp.lower[j] - 1e-7 && sol.x[j] <= lp.upper[j] + 1e-7)
                    && (dual - sol.objective).abs() <= tol;
                if !ok {
                    rep.failures.push(format!("case {case}: {:?} {} vs {v}", sol.status, sol.objective));
                }
            }
            None => {
                rep.infeasible += 1;
                if sol.status != LpStatus::Infeasible {
                    rep.failures.push(format!("case {case}: {:?} on an infeasible LP", sol.status));
                }
            }
        }
    }
    rep
}
