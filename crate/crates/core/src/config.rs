//! Numerical tolerances shared across the crate.

/// Central tolerance record. Modules take a copy; nothing mutates it globally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// A constraint counts as satisfied when violated by at most this much.
    pub feasibility: f64,
    /// Distance from 0/1 under which an LP value is treated as integral.
    pub integrality: f64,
    /// Minimum violation for a generated cut to be added to a relaxation.
    pub cut_violation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feasibility: 1e-6,
            integrality: 1e-6,
            cut_violation: 1e-6,
        }
    }
}

/// Symmetry tolerance for covariance input.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Largest diagonal perturbation accepted by the PSD check.
pub const PSD_JITTER: f64 = 1e-7;
/// Default limit on internal nodes for exhaustive cut enumeration.
pub const DEFAULT_ENUM_LIMIT: usize = 22;
