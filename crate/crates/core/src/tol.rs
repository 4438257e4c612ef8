//! Default numerical tolerances.
//!
//! Every operation that compares against zero takes its threshold from a
//! [`Tolerances`] value, so callers can tighten or relax them in one place.

use serde::{Deserialize, Serialize};

/// Name of the environment variable that overrides [`Tolerances::positivity`],
/// [`Tolerances::support_eps`] and [`Tolerances::minor_eps`].
pub const DEFAULT_TOL_ENV: &str = "KD_DEFAULT_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative Hermiticity tolerance for eigendecomposition input.
    pub hermitian: f64,
    /// Validation tolerance for unitary, density and pure-state invariants.
    pub validation: f64,
    /// KD positivity: `|Im Q| <= tol` and `Re Q >= -tol`.
    pub positivity: f64,
    /// Absolute cutoff below which an amplitude or diagonal entry counts as zero.
    pub support_eps: f64,
    /// Threshold on |minor| for complete incompatibility.
    pub minor_eps: f64,
    /// LP feasibility tolerance.
    pub lp_feasibility: f64,
    /// Phase-invariant dedup tolerance on `1 - |<φ|χ>|`.
    pub dedup: f64,
    /// Eigenvalue cutoff defining the rank of a density matrix.
    pub rank_cutoff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-9,
            validation: 1e-9,
            positivity: 1e-9,
            support_eps: 1e-9,
            minor_eps: 1e-9,
            lp_feasibility: 1e-8,
            dedup: 1e-8,
            rank_cutoff: 1e-10,
        }
    }
}

impl Tolerances {
    /// Defaults, with the zero thresholds replaced by `KD_DEFAULT_TOL` when it
    /// is set to a finite nonnegative number.
    pub fn from_env() -> Self {
        let mut tol = Self::default();
        if let Some(v) = std::env::var(DEFAULT_TOL_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v >= 0.0)
        {
            tol.positivity = v;
            tol.support_eps = v;
            tol.minor_eps = v;
        }
        tol
    }

    /// Margin a separating functional must exceed before a point is declared
    /// outside a hull.
    pub fn outside_margin(&self) -> f64 {
        10.0 * self.lp_feasibility
    }
}
