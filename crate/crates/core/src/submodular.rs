//! Set functions over a finite ground set `{0, .., n-1}`.
//!
//! Covers difference functions, an exhaustive sub/supermodularity
//! certificate for small ground sets, vertices of the extended polymatroid
//! from Edmonds' greedy algorithm, polymatroid separation, and the two
//! families of linear inequalities that formulate supermodular minimization
//! as a mixed 0-1 program.
//!
//! Subsets are passed as `&[bool]` indicator slices.

use crate::error::{Error, Result};
use crate::model::QuadraticForm;

pub trait SetFunction {
    fn ground_size(&self) -> usize;

    fn eval(&self, set: &[bool]) -> f64;

    /// Marginal gains along `perm`: entry `perm[j]` holds
    /// `g(S_j) - g(S_{j-1})` where `S_j` is the first `j` elements.
    fn greedy_increments(&self, perm: &[usize]) -> Vec<f64> {
        let n = self.ground_size();
        let mut set = vec![false; n];
        let mut v = vec![0.0; n];
        let mut prev = self.eval(&set);
        for &e in perm {
            set[e] = true;
            let cur = self.eval(&set);
            v[e] = cur - prev;
            prev = cur;
        }
        v
    }
}

/// Adapter for closures.
pub struct FnSetFunction<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[bool]) -> f64> FnSetFunction<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnSetFunction { n, f }
    }
}

impl<F: Fn(&[bool]) -> f64> SetFunction for FnSetFunction<F> {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: &[bool]) -> f64 {
        (self.f)(set)
    }
}

/// `q + d^2` for a quadratic form `q`, so that the empty set maps to zero.
pub struct ShiftedQuadratic<'a>(pub &'a QuadraticForm);

impl SetFunction for ShiftedQuadratic<'_> {
    fn ground_size(&self) -> usize {
        self.0.len()
    }

    fn eval(&self, set: &[bool]) -> f64 {
        self.0.eval_shifted(set)
    }

    fn greedy_increments(&self, perm: &[usize]) -> Vec<f64> {
        let q = self.0;
        let mut v = vec![0.0; q.len()];
        for (j, &e) in perm.iter().enumerate() {
            let row = q.beta.row(e);
            let mut inc = q.alpha[e];
            for &prev in &perm[..j] {
                inc += 2.0 * row[prev];
            }
            v[e] = inc;
        }
        v
    }
}

pub fn mask_to_set(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

pub fn set_to_mask(set: &[bool]) -> u64 {
    set.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// `rho_i(S) = g(S + i) - g(S)` for `i` not in `S`.
pub fn difference<G: SetFunction + ?Sized>(g: &G, i: usize, set: &[bool]) -> Result<f64> {
    if i >= g.ground_size() {
        return Err(Error::domain(format!("element {i} outside ground set")));
    }
    if set[i] {
        return Err(Error::domain(format!("element {i} already in the set")));
    }
    let mut with = set.to_vec();
    with[i] = true;
    Ok(g.eval(&with) - g.eval(set))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modularity {
    /// Both sub- and supermodular.
    Modular,
    Submodular,
    Supermodular,
    Neither,
}

/// `rho_element(smaller)` and `rho_element(larger)` with `smaller ⊆ larger`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub element: usize,
    pub smaller: u64,
    pub larger: u64,
    pub rho_smaller: f64,
    pub rho_larger: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModularityCertificate {
    pub kind: Modularity,
    /// A pair breaking submodularity (`rho(S) < rho(T)`), if any.
    pub not_submodular: Option<Witness>,
    /// A pair breaking supermodularity (`rho(S) > rho(T)`), if any.
    pub not_supermodular: Option<Witness>,
}

pub const CERTIFY_LIMIT: usize = 12;

/// Compares `rho_i(S)` with `rho_i(T)` for every `i` and every `S ⊆ T ⊆ N \ i`.
pub fn certify_modularity<G: SetFunction + ?Sized>(g: &G, tol: f64) -> Result<ModularityCertificate> {
    let n = g.ground_size();
    if n > CERTIFY_LIMIT {
        return Err(Error::Size {
            what: "ground set for modularity certificate",
            size: n,
            limit: CERTIFY_LIMIT,
        });
    }
    let full = 1u64 << n;
    let values: Vec<f64> = (0..full).map(|m| g.eval(&mask_to_set(m, n))).collect();
    let mut not_sub = None;
    let mut not_super = None;
    'outer: for i in 0..n {
        let bit = 1u64 << i;
        let rest = (full - 1) & !bit;
        // iterate T over subsets of rest
        let mut t = rest;
        loop {
            let rho_t = values[(t | bit) as usize] - values[t as usize];
            let mut s = t;
            loop {
                let rho_s = values[(s | bit) as usize] - values[s as usize];
                let scale = tol * (1.0 + rho_s.abs().max(rho_t.abs()));
                let w = Witness {
                    element: i,
                    smaller: s,
                    larger: t,
                    rho_smaller: rho_s,
                    rho_larger: rho_t,
                };
                if rho_s < rho_t - scale && not_sub.is_none() {
                    not_sub = Some(w);
                }
                if rho_s > rho_t + scale && not_super.is_none() {
                    not_super = Some(w);
                }
                if not_sub.is_some() && not_super.is_some() {
                    break 'outer;
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & t;
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & rest;
        }
    }
    let kind = match (not_sub.is_none(), not_super.is_none()) {
        (true, true) => Modularity::Modular,
        (true, false) => Modularity::Submodular,
        (false, true) => Modularity::Supermodular,
        (false, false) => Modularity::Neither,
    };
    Ok(ModularityCertificate {
        kind,
        not_submodular: not_sub,
        not_supermodular: not_super,
    })
}

impl ModularityCertificate {
    pub fn is_submodular(&self) -> bool {
        matches!(self.kind, Modularity::Submodular | Modularity::Modular)
    }

    pub fn is_supermodular(&self) -> bool {
        matches!(self.kind, Modularity::Supermodular | Modularity::Modular)
    }
}

/// Vertex of the extended polymatroid `EP_g` produced by a permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct PolymatroidVertex {
    pub v: Vec<f64>,
    pub perm: Vec<usize>,
}

impl PolymatroidVertex {
    /// Recomputes the increments from `g` and compares.
    pub fn verify<G: SetFunction + ?Sized>(&self, g: &G, tol: f64) -> bool {
        let n = g.ground_size();
        let mut set = vec![false; n];
        let mut prev = g.eval(&set);
        for &e in &self.perm {
            set[e] = true;
            let cur = g.eval(&set);
            if ((cur - prev) - self.v[e]).abs() > tol * (1.0 + cur.abs()) {
                return false;
            }
            prev = cur;
        }
        true
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.v.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// `v_{pi_j} = g(S_j) - g(S_{j-1})`. Expects `g(empty) = 0`.
pub fn greedy_vertex<G: SetFunction + ?Sized>(g: &G, perm: &[usize]) -> PolymatroidVertex {
    debug_assert_eq!(perm.len(), g.ground_size());
    PolymatroidVertex {
        v: g.greedy_increments(perm),
        perm: perm.to_vec(),
    }
}

/// Indices sorted by non-increasing `xbar`, ties by lower index.
pub fn descending_order(xbar: &[f64]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..xbar.len()).collect();
    perm.sort_by(|&a, &b| xbar[b].total_cmp(&xbar[a]).then(a.cmp(&b)));
    perm
}

/// Most violated inequality `v'x <= gamma` over the vertices of `EP_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolymatroidCut {
    pub vertex: PolymatroidVertex,
    pub gamma: f64,
    /// `xbar'v - gamma`; positive means `xbar` is cut off.
    pub violation: f64,
}

/// Greedy maximization of `xbar'v` over the vertices of `EP_g` (submodular
/// `g`, `g(empty) = 0`).
pub fn separate_polymatroid<G: SetFunction + ?Sized>(
    xbar: &[f64],
    g: &G,
    gamma: f64,
) -> PolymatroidCut {
    let perm = descending_order(xbar);
    let vertex = greedy_vertex(g, &perm);
    let violation = vertex.dot(xbar) - gamma;
    PolymatroidCut {
        vertex,
        gamma,
        violation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NwVariant {
    /// `rho_i(A \ i)` on `S`, `rho_i(S)` off `S`.
    First,
    /// `rho_i(S \ i)` on `S`, `rho_i(empty)` off `S`.
    Second,
}

/// `w >= constant + coef'z`.
#[derive(Debug, Clone, PartialEq)]
pub struct NwInequality {
    pub constant: f64,
    pub coef: Vec<f64>,
}

impl NwInequality {
    pub fn eval(&self, z: &[f64]) -> f64 {
        self.constant + self.coef.iter().zip(z).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// Linear lower bound on a supermodular `theta`, generated at the set `s`.
pub fn nw_inequality<G: SetFunction + ?Sized>(theta: &G, s: &[bool], variant: NwVariant) -> NwInequality {
    let n = theta.ground_size();
    let theta_s = theta.eval(s);
    let mut coef = vec![0.0; n];
    let mut constant = theta_s;
    match variant {
        NwVariant::First => {
            let all = vec![true; n];
            let theta_all = theta.eval(&all);
            let mut minus = all.clone();
            for i in 0..n {
                if s[i] {
                    minus[i] = false;
                    let rho = theta_all - theta.eval(&minus);
                    minus[i] = true;
                    coef[i] = rho;
                    constant -= rho;
                } else {
                    coef[i] = difference(theta, i, s).expect("i not in S");
                }
            }
        }
        NwVariant::Second => {
            let empty = vec![false; n];
            let theta_empty = theta.eval(&empty);
            let mut minus = s.to_vec();
            let mut single = empty.clone();
            for i in 0..n {
                if s[i] {
                    minus[i] = false;
                    let rho = theta_s - theta.eval(&minus);
                    minus[i] = true;
                    coef[i] = rho;
                    constant -= rho;
                } else {
                    single[i] = true;
                    coef[i] = theta.eval(&single) - theta_empty;
                    single[i] = false;
                }
            }
        }
    }
    NwInequality { constant, coef }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::model::CapacityModel;

    fn q_example() -> QuadraticForm {
        CapacityModel::new(vec![3.0, 4.0], SymMatrix::from_diag(&[1.0, 4.0]), 1.0, 2.0)
            .unwrap()
            .quadratic_form()
    }

    #[test]
    fn difference_examples() {
        let w = [2.0, -1.0, 5.0];
        let g = FnSetFunction::new(3, |s: &[bool]| s.iter().zip(&w).filter(|(b, _)| **b).map(|(_, v)| v).sum());
        for mask in 0..8u64 {
            let s = mask_to_set(mask, 3);
            for i in 0..3 {
                if !s[i] {
                    assert_eq!(difference(&g, i, &s).unwrap(), w[i]);
                }
            }
        }
        let q = q_example();
        let g = ShiftedQuadratic(&q);
        assert_eq!(difference(&g, 0, &[false, true]).unwrap(), -20.0);

        let root = FnSetFunction::new(2, |s: &[bool]| (s.iter().filter(|&&b| b).count() as f64).sqrt());
        assert_eq!(difference(&root, 0, &[false, false]).unwrap(), 1.0);
        assert!((difference(&root, 0, &[false, true]).unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(difference(&root, 0, &[true, false]).is_err());
    }

    #[test]
    fn square_of_cardinality_is_supermodular() {
        let g = FnSetFunction::new(5, |s: &[bool]| (s.iter().filter(|&&b| b).count() as f64).powi(2));
        let c = certify_modularity(&g, 1e-12).unwrap();
        assert_eq!(c.kind, Modularity::Supermodular);
        assert!(c.not_submodular.is_some());
    }

    #[test]
    fn modular_function_is_both() {
        let g = FnSetFunction::new(4, |s: &[bool]| s.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i as f64).sum());
        assert_eq!(certify_modularity(&g, 1e-12).unwrap().kind, Modularity::Modular);
    }

    #[test]
    fn certify_rejects_large_ground_set() {
        let g = FnSetFunction::new(13, |_: &[bool]| 0.0);
        assert!(certify_modularity(&g, 1e-9).is_err());
    }

    #[test]
    fn greedy_vertex_examples() {
        let q = q_example();
        let g = ShiftedQuadratic(&q);
        assert_eq!(greedy_vertex(&g, &[0, 1]).v, vec![4.0, -20.0]);
        assert_eq!(greedy_vertex(&g, &[1, 0]).v, vec![-20.0, 4.0]);
        let v = greedy_vertex(&g, &[1, 0]);
        assert!(v.verify(&g, 1e-12));
    }

    #[test]
    fn separation_example() {
        let q = q_example();
        let cut = separate_polymatroid(&[0.9, 0.2], &ShiftedQuadratic(&q), 4.0);
        assert_eq!(cut.vertex.perm, vec![0, 1]);
        assert_eq!(cut.vertex.v, vec![4.0, -20.0]);
        assert!((cut.vertex.dot(&[0.9, 0.2]) + 0.4).abs() < 1e-12);
        assert!(cut.violation < 0.0);
    }

    #[test]
    fn ties_broken_by_index() {
        assert_eq!(descending_order(&[0.5, 0.7, 0.5, 0.7]), vec![1, 3, 0, 2]);
    }

    #[test]
    fn nw_empty_set_example() {
        let theta = FnSetFunction::new(2, |s: &[bool]| -((s[0] as u8 + s[1] as u8) as f64).sqrt());
        let ineq = nw_inequality(&theta, &[false, false], NwVariant::First);
        assert_eq!(ineq.constant, 0.0);
        assert_eq!(ineq.coef, vec![-1.0, -1.0]);
    }

    #[test]
    fn nw_full_set_is_tight_at_ones() {
        let theta = FnSetFunction::new(3, |s: &[bool]| {
            let k = s.iter().filter(|&&b| b).count() as f64;
            2.0 * k - (k + 1.0).sqrt()
        });
        let all = [true; 3];
        for variant in [NwVariant::First, NwVariant::Second] {
            let ineq = nw_inequality(&theta, &all, variant);
            assert!((ineq.eval(&[1.0; 3]) - theta.eval(&all)).abs() < 1e-12);
        }
    }
}
