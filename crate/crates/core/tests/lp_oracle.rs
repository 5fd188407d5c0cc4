//! Random bounded LPs checked against brute-force vertex enumeration.

mod common;

use common::lp_oracle::{compare_with_vertices, random_lp};
use probnet_core::lp::{self, LinearProgram, LpStatus, Row, RowSense, Simplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_lps_match_vertex_enumeration() {
    let rep = compare_with_vertices(200, 7);
    assert!(rep.failures.is_empty(), "{:#?}", rep.failures);
    assert!(rep.optimal > 50 && rep.infeasible > 5, "{rep:?}");
}

#[test]
fn warm_and_cold_solves_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..100 {
        let lp = random_lp(&mut rng);
        let split = lp.rows.len() / 2;
        let mut head = lp.clone();
        let tail = head.rows.split_off(split);
        let mut sx = Simplex::new(&head);
        sx.solve();
        let warm = lp::resolve_with_new_rows(&mut sx, &tail);
        let cold = lp::solve(&lp);
        assert_eq!(warm.status, cold.status, "case {case}");
        if cold.is_optimal() {
            assert!((warm.objective - cold.objective).abs() <= 1e-6 * (1.0 + cold.objective.abs()));
        }
    }
}

#[test]
fn degenerate_assignment_terminates() {
    // Highly degenerate 6x6 assignment LP.
    let k = 6;
    let n = k * k;
    let objective = (0..n).map(|v| ((v * 7) % 5) as f64).collect();
    let mut lp = LinearProgram::minimize(objective, vec![0.0; n], vec![1.0; n]);
    for i in 0..k {
        lp.add_row(Row::new((0..k).map(|j| (i * k + j, 1.0)).collect(), RowSense::Eq, 1.0));
        lp.add_row(Row::new((0..k).map(|j| (j * k + i, 1.0)).collect(), RowSense::Eq, 1.0));
    }
    let sol = lp::solve(&lp);
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!(sol.objective.abs() < 1e-9);
}

#[test]
fn bound_changes_match_cold_solves() {
    // Fix and release columns the way a branch-and-bound does, including
    // sequences that pass through infeasible subproblems.
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for case in 0..150 {
        let base = random_lp(&mut rng);
        let mut sx = Simplex::new(&base);
        sx.solve();
        let mut cur = base.clone();
        for step in 0..8 {
            let j = rng.gen_range(0..cur.num_cols());
            let (lo, up) = if rng.gen_bool(0.4) {
                (base.lower[j], base.upper[j])
            } else {
                let v = rng.gen_range(base.lower[j]..=base.upper[j]).round();
                (v, v)
            };
            cur.lower[j] = lo;
            cur.upper[j] = up;
            sx.set_bounds(j, lo, up);
            let warm = sx.solve();
            let cold = lp::solve(&cur);
            assert_eq!(warm.status, cold.status, "case {case} step {step}");
            if cold.is_optimal() {
                assert!(
                    (warm.objective - cold.objective).abs() <= 1e-6 * (1.0 + cold.objective.abs()),
                    "case {case} step {step}: warm {} cold {}",
                    warm.objective,
                    cold.objective
                );
            }
        }
    }
}

#[test]
fn removing_slack_rows_matches_cold_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut removed = 0;
    for case in 0..150 {
        let lp = random_lp(&mut rng);
        let mut sx = Simplex::new(&lp);
        if !sx.solve().is_optimal() {
            continue;
        }
        let loose: Vec<usize> = (0..sx.num_rows()).filter(|&i| sx.row_slack_is_basic(i)).collect();
        if loose.is_empty() {
            continue;
        }
        let drop: Vec<usize> = loose.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
        sx.remove_rows(&drop).unwrap();
        removed += drop.len();
        let mut reduced = lp.clone();
        reduced.rows = (0..lp.rows.len()).filter(|i| !drop.contains(i)).map(|i| lp.rows[i].clone()).collect();
        // Tighten a bound afterwards so the warm solve has to pivot.
        let j = rng.gen_range(0..lp.num_cols());
        reduced.upper[j] = reduced.lower[j];
        sx.set_bounds(j, reduced.lower[j], reduced.upper[j]);
        let warm = sx.solve();
        let cold = lp::solve(&reduced);
        assert_eq!(warm.status, cold.status, "case {case}");
        if cold.is_optimal() {
            assert!((warm.objective - cold.objective).abs() <= 1e-6 * (1.0 + cold.objective.abs()), "case {case}");
        }
    }
    assert!(removed > 20);
}
