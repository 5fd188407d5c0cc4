use crate::lp::RowSense;

use super::{CutKind, LinearCut};

/// Minimum excess `v(C) - gamma'` for a set to count as a cover.
const COVER_TOL: f64 = 1e-9;
/// Node budget of one exact strengthening subproblem.
const KNAPSACK_NODE_LIMIT: usize = 200_000;

/// `coefs'x <= rhs` over binaries; coefficients may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Knapsack {
    pub coefs: Vec<f64>,
    pub rhs: f64,
}

impl Knapsack {
    pub fn new(coefs: Vec<f64>, rhs: f64) -> Self {
        Knapsack { coefs, rhs }
    }

    pub fn len(&self) -> usize {
        self.coefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefs.is_empty()
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        let lhs: f64 = self.coefs.iter().zip(x).filter(|(_, &b)| b).map(|(a, _)| a).sum();
        lhs <= self.rhs + 1e-9
    }

    /// Right-hand side after complementing the negative-coefficient
    /// variables, `gamma + sum |v_i|` over `v_i < 0`.
    pub fn folded_rhs(&self) -> f64 {
        self.rhs - self.coefs.iter().filter(|&&a| a < 0.0).sum::<f64>()
    }

    /// Weight of each variable in the complemented knapsack (all `>= 0`).
    fn weights(&self) -> Vec<f64> {
        self.coefs.iter().map(|a| a.abs()).collect()
    }

    /// Unit-weight sum.
    pub fn sum(parts: &[Knapsack]) -> Option<Knapsack> {
        let n = parts.first()?.len();
        let mut coefs = vec![0.0; n];
        let mut rhs = 0.0;
        for k in parts {
            assert_eq!(k.len(), n, "knapsacks over different ground sets");
            for (c, a) in coefs.iter_mut().zip(&k.coefs) {
                *c += a;
            }
            rhs += k.rhs;
        }
        Some(Knapsack { coefs, rhs })
    }
}

/// A minimal cover of the complemented knapsack. Members with a negative
/// coefficient enter through their complement `1 - x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub members: Vec<usize>,
    /// Members with a negative knapsack coefficient.
    pub complemented: Vec<usize>,
    /// `v(C) - gamma'`, strictly positive.
    pub excess: f64,
    /// The folded right-hand side `gamma'`.
    pub capacity: f64,
}

impl Cover {
    /// `sum_{C+} x_i + sum_{C-} (1 - x_i) <= |C| - 1`.
    pub fn inequality(&self, n: usize, origin: u64) -> LinearCut {
        let mut coefs = vec![0.0; n];
        for &i in &self.members {
            coefs[i] = 1.0;
        }
        for &i in &self.complemented {
            coefs[i] = -1.0;
        }
        let rhs = (self.members.len() - self.complemented.len()) as f64 - 1.0;
        LinearCut::new(&coefs, RowSense::Le, rhs, CutKind::Cover, origin)
    }
}

/// Greedy cover of the complemented knapsack: negative-coefficient
/// variables are complemented and folded into the right-hand side, then
/// items are taken by non-increasing (complemented) `xbar` until their
/// weight exceeds the folded capacity, and the set is reduced to a minimal
/// cover by dropping the last-added members that are not needed.
pub fn find_cover(knapsack: &Knapsack, xbar: &[f64]) -> Option<Cover> {
    let capacity = knapsack.folded_rhs();
    let v = knapsack.weights();
    let xt: Vec<f64> = (0..v.len())
        .map(|i| if knapsack.coefs[i] < 0.0 { 1.0 - xbar[i] } else { xbar[i] })
        .collect();
    let order = super::by_xbar_desc(&xt, (0..v.len()).filter(|&i| v[i] > 0.0));
    let mut members = Vec::new();
    let mut weight = 0.0;
    for i in order {
        members.push(i);
        weight += v[i];
        if weight > capacity + COVER_TOL {
            break;
        }
    }
    if weight <= capacity + COVER_TOL {
        return None;
    }
    // Drop members (last added first) while the rest still covers.
    let mut k = members.len();
    while k > 0 {
        k -= 1;
        let i = members[k];
        if weight - v[i] > capacity + COVER_TOL {
            weight -= v[i];
            members.remove(k);
        }
    }
    members.sort_unstable();
    let complemented = members.iter().copied().filter(|&i| knapsack.coefs[i] < 0.0).collect();
    Some(Cover {
        members,
        complemented,
        excess: weight - capacity,
        capacity,
    })
}

/// The superadditive lifting function of a minimal cover
/// (Gu, Nemhauser and Savelsbergh): piecewise constant at the breakpoints
/// `mu_h - lambda`, linear with slope `1 / rho_1` just past them.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperadditiveLifting {
    /// Partial sums `mu_0 = 0, mu_h = a_1 + .. + a_h` of the cover weights
    /// sorted decreasingly.
    mu: Vec<f64>,
    rho: Vec<f64>,
    lambda: f64,
}

impl SuperadditiveLifting {
    pub fn new(cover_weights: &[f64], excess: f64) -> Self {
        let mut a = cover_weights.to_vec();
        a.sort_by(|x, y| y.total_cmp(x));
        let r = a.len();
        let mut mu = vec![0.0; r + 1];
        for h in 0..r {
            mu[h + 1] = mu[h] + a[h];
        }
        let base = a.first().copied().unwrap_or(0.0) - excess;
        let rho = a.iter().map(|&ah| (ah - base).max(0.0)).collect();
        SuperadditiveLifting {
            mu,
            rho,
            lambda: excess,
        }
    }

    fn r(&self) -> usize {
        self.mu.len() - 1
    }

    pub fn eval(&self, z: f64) -> f64 {
        let r = self.r();
        if r == 0 || z <= 0.0 {
            return 0.0;
        }
        let rho1 = if r > 1 { self.rho[1] } else { 0.0 };
        for h in 0..r {
            let hi = self.mu[h + 1] - self.lambda;
            if z <= hi {
                let lo = self.mu[h] - self.lambda + self.rho[h];
                if z >= lo || h == 0 || rho1 <= 0.0 {
                    return h as f64;
                }
                return h as f64 - (lo - z) / rho1;
            }
        }
        (r - 1) as f64
    }
}

/// Exact `max p'y s.t. w'y <= cap` over binaries with `p, w >= 0`.
///
/// Returns `Some(-inf)` when `cap < 0` and `None` when the node budget runs
/// out before optimality is proven.
pub fn knapsack_max(profits: &[f64], weights: &[f64], cap: f64, node_limit: usize) -> Option<f64> {
    if cap < 0.0 {
        return Some(f64::NEG_INFINITY);
    }
    let mut base = 0.0;
    let mut items: Vec<(f64, f64)> = Vec::new();
    for (&p, &w) in profits.iter().zip(weights) {
        if p <= 0.0 {
            continue;
        }
        if w <= 0.0 {
            base += p;
        } else {
            items.push((p, w));
        }
    }
    items.sort_by(|a, b| (b.0 / b.1).total_cmp(&(a.0 / a.1)));

    fn bound(items: &[(f64, f64)], from: usize, mut cap: f64) -> f64 {
        let mut val = 0.0;
        for &(p, w) in &items[from..] {
            if w <= cap {
                cap -= w;
                val += p;
            } else {
                return val + p * cap / w;
            }
        }
        val
    }

    struct Search<'a> {
        items: &'a [(f64, f64)],
        best: f64,
        nodes: usize,
        limit: usize,
    }

    impl Search<'_> {
        fn go(&mut self, k: usize, cap: f64, val: f64) -> bool {
            self.nodes += 1;
            if self.nodes > self.limit {
                return false;
            }
            if val > self.best {
                self.best = val;
            }
            if k == self.items.len() || val + bound(self.items, k, cap) <= self.best + 1e-12 {
                return true;
            }
            let (p, w) = self.items[k];
            if w <= cap && !self.go(k + 1, cap - w, val + p) {
                return false;
            }
            self.go(k + 1, cap, val)
        }
    }

    let mut s = Search {
        items: &items,
        best: 0.0,
        nodes: 0,
        limit: node_limit,
    };
    s.go(0, cap, 0.0).then_some(base + s.best)
}

/// Lifted cover inequality
/// `sum_C x_i + sum_{j not in C} pi_j x~_j <= |C| - 1`, where `x~_j` is
/// `1 - x_j` for negative-coefficient variables.
///
/// Coefficients come from the superadditive lifting function and are then
/// raised one at a time (in non-increasing complemented `xbar` order) to the
/// exact maximum allowed by the current inequality, which recovers the
/// sequential-lifting coefficients whenever the superadditive bound is loose.
pub fn lift_cover_superadditive(
    cover: &Cover,
    knapsack: &Knapsack,
    xbar: &[f64],
    origin: u64,
) -> LinearCut {
    let n = knapsack.len();
    let w = knapsack.weights();
    let r = cover.members.len();
    let top = r as f64 - 1.0;
    let in_cover: Vec<bool> = (0..n).map(|i| cover.members.contains(&i)).collect();
    let cover_w: Vec<f64> = cover.members.iter().map(|&i| w[i]).collect();
    let g = SuperadditiveLifting::new(&cover_w, cover.excess);

    let mut pi: Vec<f64> = (0..n)
        .map(|i| if in_cover[i] { 1.0 } else { g.eval(w[i]).clamp(0.0, top) })
        .collect();

    let xt: Vec<f64> = (0..n)
        .map(|i| if knapsack.coefs[i] < 0.0 { 1.0 - xbar[i] } else { xbar[i] })
        .collect();
    let cap = cover.capacity + COVER_TOL;
    for j in super::by_xbar_desc(&xt, (0..n).filter(|&i| !in_cover[i] && w[i] > 0.0)) {
        let (p, ww): (Vec<f64>, Vec<f64>) = (0..n)
            .filter(|&k| k != j)
            .map(|k| (pi[k], w[k]))
            .unzip();
        if let Some(m) = knapsack_max(&p, &ww, cap - w[j], KNAPSACK_NODE_LIMIT) {
            let exact = if m == f64::NEG_INFINITY { top } else { top - m };
            pi[j] = pi[j].max(exact.min(top));
        }
    }

    let mut coefs = vec![0.0; n];
    let mut rhs = top;
    for i in 0..n {
        if knapsack.coefs[i] < 0.0 {
            coefs[i] = -pi[i];
            rhs -= pi[i];
        } else {
            coefs[i] = pi[i];
        }
    }
    LinearCut::new(&coefs, RowSense::Le, rhs, CutKind::LiftedCover, origin)
}

/// Sums several knapsacks of one origin, then finds and lifts a cover.
pub fn aggregate_and_cover(parts: &[Knapsack], xbar: &[f64], origin: u64) -> Option<LinearCut> {
    let agg = Knapsack::sum(parts)?;
    let cover = find_cover(&agg, xbar)?;
    let mut cut = lift_cover_superadditive(&cover, &agg, xbar, origin);
    cut.kind = CutKind::AggregatedCover;
    Some(cut)
}
