//! LP rows generated during the search. Rows that stay slack for
//! `IDLE_LIMIT` consecutive solves are removed from the LP but kept in the
//! pool, and re-enter as soon as they are violated again.

use std::collections::{BTreeMap, HashMap};

use crate::cutgen::{CutKind, LinearCut};
use crate::lp::{Row, Simplex};

/// Pool cuts re-entering the LP per round.
const REACTIVATE_LIMIT: usize = 50;
pub(super) const IDLE_LIMIT: usize = 10;

#[derive(Debug)]
struct Entry {
    cut: LinearCut,
    active: bool,
    permanent: bool,
    idle: usize,
}

#[derive(Debug, Default)]
pub(super) struct CutPool {
    entries: Vec<Entry>,
    by_fingerprint: HashMap<u64, usize>,
    /// Pool entry of each LP row, in row order, including queued rows.
    rows: Vec<usize>,
    /// Rows activated since the last flush; appended to the LP in one batch.
    pending: Vec<Row>,
    pub counts: BTreeMap<CutKind, usize>,
}

pub(super) enum Added {
    New,
    Reactivated,
    Duplicate,
}

impl CutPool {
    pub fn add(&mut self, cut: LinearCut, permanent: bool) -> Added {
        if !cut.is_finite() || cut.coefs.is_empty() {
            return Added::Duplicate;
        }
        let fp = cut.fingerprint();
        if let Some(&k) = self.by_fingerprint.get(&fp) {
            if self.entries[k].active {
                return Added::Duplicate;
            }
            self.activate(k);
            return Added::Reactivated;
        }
        *self.counts.entry(cut.kind).or_insert(0) += 1;
        let k = self.entries.len();
        self.entries.push(Entry {
            cut,
            active: false,
            permanent,
            idle: 0,
        });
        self.by_fingerprint.insert(fp, k);
        self.activate(k);
        Added::New
    }

    fn activate(&mut self, k: usize) {
        let e = &mut self.entries[k];
        e.active = true;
        e.idle = 0;
        self.pending.push(e.cut.to_row());
        self.rows.push(k);
    }

    /// Appends the queued rows to the LP.
    pub fn flush(&mut self, solver: &mut Simplex) {
        if !self.pending.is_empty() {
            solver.add_rows(&self.pending);
            self.pending.clear();
        }
    }

    /// Queues the (at most `REACTIVATE_LIMIT`) most violated inactive cuts
    /// whose scaled violation at `x` exceeds `tol`.
    pub fn reactivate_violated(&mut self, x: &[f64], tol: f64) -> usize {
        let mut hits: Vec<(f64, usize)> = (0..self.entries.len())
            .filter(|&k| !self.entries[k].active)
            .filter_map(|k| {
                let cut = &self.entries[k].cut;
                let scale = cut.coefs.iter().map(|e| e.1.abs()).fold(1.0, f64::max);
                let v = cut.violation(x) / scale;
                (v > tol).then_some((v, k))
            })
            .collect();
        hits.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        hits.truncate(REACTIVATE_LIMIT);
        for &(_, k) in &hits {
            self.activate(k);
        }
        hits.len()
    }

    /// Updates idle counters after a solve and drops long-idle rows.
    pub fn age(&mut self, solver: &mut Simplex) {
        self.flush(solver);
        let mut drop = Vec::new();
        for (i, &k) in self.rows.iter().enumerate() {
            let e = &mut self.entries[k];
            if e.permanent {
                continue;
            }
            if solver.row_slack_is_basic(i) && !solver.row_is_tight(i, 1e-9) {
                e.idle += 1;
                if e.idle >= IDLE_LIMIT {
                    drop.push(i);
                }
            } else {
                e.idle = 0;
            }
        }
        if drop.is_empty() {
            return;
        }
        solver
            .remove_rows(&drop)
            .expect("idle rows have basic slacks");
        for &i in &drop {
            self.entries[self.rows[i]].active = false;
        }
        let mut keep = vec![true; self.rows.len()];
        for &i in &drop {
            keep[i] = false;
        }
        let mut i = 0;
        self.rows.retain(|_| {
            i += 1;
            keep[i - 1]
        });
    }

}
