use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Distributional assumption used to turn a service level `1 - epsilon`
/// into the safety factor `Omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaModel {
    /// Normally distributed capacities: `Omega = Phi^-1(1 - epsilon)`.
    #[default]
    Normal,
    /// Only mean and covariance known: `Omega = sqrt((1 - epsilon) / epsilon)`.
    TwoMoment,
    /// Independent, symmetric, bounded support: `Omega = sqrt(ln(1 / epsilon))`.
    SymmetricBounded,
}

impl fmt::Display for OmegaModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OmegaModel::Normal => "normal",
            OmegaModel::TwoMoment => "two-moment",
            OmegaModel::SymmetricBounded => "symmetric-bounded",
        })
    }
}

impl FromStr for OmegaModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(OmegaModel::Normal),
            "two-moment" => Ok(OmegaModel::TwoMoment),
            "symmetric-bounded" => Ok(OmegaModel::SymmetricBounded),
            other => Err(Error::domain(format!("unknown omega model '{other}'"))),
        }
    }
}

/// Safety factor for a chance constraint at risk level `epsilon` in (0, 0.5].
pub fn omega_from_epsilon(kind: OmegaModel, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::domain(format!(
            "epsilon must lie in (0, 0.5], got {epsilon}"
        )));
    }
    Ok(match kind {
        OmegaModel::Normal => {
            if epsilon == 0.5 {
                0.0
            } else {
                Normal::standard().inverse_cdf(1.0 - epsilon)
            }
        }
        OmegaModel::TwoMoment => ((1.0 - epsilon) / epsilon).sqrt(),
        OmegaModel::SymmetricBounded => (1.0 / epsilon).ln().sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent normal c.d.f. via the Taylor series of erf; accurate to
    /// ~1e-13 on |x| <= 4.
    fn series_cdf(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x * x / (2.0 * n);
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        0.5 + sum / (2.0 * std::f64::consts::PI).sqrt()
    }

    fn bisect_quantile(p: f64) -> f64 {
        let (mut lo, mut hi) = (-6.0, 6.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if series_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn trivial_values() {
        assert_eq!(omega_from_epsilon(OmegaModel::TwoMoment, 0.5).unwrap(), 1.0);
        let e = (-1.0f64).exp();
        let w = omega_from_epsilon(OmegaModel::SymmetricBounded, e).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
        assert_eq!(omega_from_epsilon(OmegaModel::Normal, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn normal_quantile_matches_bisection_oracle() {
        let oracle = bisect_quantile(0.975);
        assert!((oracle - 1.959_963_984_540_054).abs() < 1e-9);
        for &eps in &[0.3, 0.2, 0.025, 0.01, 0.001] {
            let got = omega_from_epsilon(OmegaModel::Normal, eps).unwrap();
            let want = bisect_quantile(1.0 - eps);
            assert!((got - want).abs() <= 1e-8, "eps {eps}: {got} vs {want}");
        }
        let w = omega_from_epsilon(OmegaModel::Normal, 0.025).unwrap();
        assert!((w - 1.95996).abs() < 1e-5);
    }

    #[test]
    fn out_of_range_epsilon() {
        for &eps in &[0.0, -0.1, 0.51, 1.0, f64::NAN] {
            assert!(omega_from_epsilon(OmegaModel::Normal, eps).is_err());
        }
    }

    #[test]
    fn parse_roundtrip() {
        for k in [
            OmegaModel::Normal,
            OmegaModel::TwoMoment,
            OmegaModel::SymmetricBounded,
        ] {
            assert_eq!(k.to_string().parse::<OmegaModel>().unwrap(), k);
        }
    }
}
