//! Concrete systems: the spin-1 counterexample, DFT bases and Haar studies.

mod spin1;
mod spin1_report;

pub use spin1::{rho_lambda, Spin1Fixture};
pub use spin1_report::{
    run_spin1_report, run_spin1_report_with, state_labels, Check, Spin1Report, CERTIFIED_LAMBDAS,
    LAMBDA_GRID_POINTS,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incompatibility::{complete_incompatibility, MAX_MINOR_DIM};
use crate::kd::TransitionMatrix;
use crate::numerics::random::{haar_unitary_from_rng, rng_from_seed};
use crate::numerics::{CMatrix, C64};

/// `U_jk = ω^{jk}/√d` with `ω = exp(2πi/d)` (0-based `j, k`).
pub fn dft_matrix(d: usize) -> Result<TransitionMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "DFT matrix needs d >= 2, got {d}"
        )));
    }
    let scale = 1.0 / (d as f64).sqrt();
    let m = CMatrix::from_fn(d, d, |j, k| {
        // reduce the exponent first so that e.g. ω^4 = 1 exactly for d = 4
        let e = (j * k) % d;
        let angle = 2.0 * std::f64::consts::PI * e as f64 / d as f64;
        exact_unit_root(e, d, angle) * scale
    });
    TransitionMatrix::new(m)
}

fn exact_unit_root(e: usize, d: usize, angle: f64) -> C64 {
    if e == 0 {
        C64::new(1.0, 0.0)
    } else if 2 * e == d {
        C64::new(-1.0, 0.0)
    } else if 4 * e == d {
        C64::new(0.0, 1.0)
    } else if 4 * e == 3 * d {
        C64::new(0.0, -1.0)
    } else {
        C64::from_polar(1.0, angle)
    }
}

/// Statistics of complete incompatibility over Haar-random transition matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarStudy {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub eps: f64,
    pub completely_incompatible: usize,
    pub fraction: f64,
    /// Quantiles `(q, value)` of the smallest |minor| per sample.
    pub min_minor_quantiles: Vec<(f64, f64)>,
}

pub const MAX_STUDY_DIM: usize = 6;

pub fn haar_genericity_study(dim: usize, samples: usize, seed: u64) -> Result<HaarStudy> {
    haar_genericity_study_with_eps(dim, samples, seed, 1e-9)
}

pub fn haar_genericity_study_with_eps(
    dim: usize,
    samples: usize,
    seed: u64,
    eps: f64,
) -> Result<HaarStudy> {
    if dim > MAX_STUDY_DIM.min(MAX_MINOR_DIM) {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_STUDY_DIM,
        });
    }
    if dim < 2 || samples == 0 {
        return Err(Error::InvalidParameter(format!(
            "need dim >= 2 and samples >= 1, got {dim}, {samples}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut mins = Vec::with_capacity(samples);
    let mut count = 0;
    for _ in 0..samples {
        let u = TransitionMatrix::new(haar_unitary_from_rng(dim, &mut rng))?;
        let report = complete_incompatibility(&u, eps)?;
        if report.completely_incompatible {
            count += 1;
        }
        mins.push(report.min_abs_minor);
    }
    mins.sort_by(f64::total_cmp);
    let quantile = |q: f64| mins[((q * (samples - 1) as f64).round() as usize).min(samples - 1)];
    let min_minor_quantiles = [0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0]
        .iter()
        .map(|&q| (q, quantile(q)))
        .collect();
    Ok(HaarStudy {
        dim,
        samples,
        seed,
        eps,
        completely_incompatible: count,
        fraction: count as f64 / samples as f64,
        min_minor_quantiles,
    })
}
