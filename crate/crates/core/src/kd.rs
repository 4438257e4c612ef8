//! Kirkwood-Dirac distributions and the basic positivity witnesses.
//!
//! The A-basis is the computational basis and the B-basis vectors are the
//! columns of the transition matrix `U`, so `U_ij = ⟨a_i|b_j⟩` and
//!
//! ```text
//! Q_ij(ρ) = ⟨b_j|a_i⟩⟨a_i|ρ|b_j⟩ = conj(U_ij) · (ρU)_ij.
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, vec_norm, CMatrix, C64, ZERO};

const VALIDATION_TOL: f64 = 1e-9;

/// Unitary `U` with `U_ij = ⟨a_i|b_j⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    u: CMatrix,
}

impl TransitionMatrix {
    pub fn new(u: CMatrix) -> Result<Self> {
        Self::with_tolerance(u, VALIDATION_TOL)
    }

    pub fn with_tolerance(u: CMatrix, tol: f64) -> Result<Self> {
        if !u.is_square() || u.rows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "transition matrix is {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let deviation = u.isometry_defect();
        if deviation > tol {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { u })
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    /// `|b_j⟩` expressed in the A-basis.
    pub fn b_vector(&self, j: usize) -> Vec<C64> {
        self.u.column(j)
    }

    /// Components `⟨b_j|ψ⟩` of a vector given in the A-basis.
    pub fn b_components(&self, psi: &[C64]) -> Vec<C64> {
        self.u.adjoint_mat_vec(psi)
    }

    /// `m_AB = min_ij |U_ij|`.
    pub fn min_overlap(&self) -> f64 {
        self.u
            .as_slice()
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            u: CMatrix::identity(d),
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn new(rho: CMatrix) -> Result<Self> {
        Self::with_tolerance(rho, VALIDATION_TOL)
    }

    pub fn with_tolerance(rho: CMatrix, tol: f64) -> Result<Self> {
        if !rho.is_square() || rho.rows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "density matrix is {}x{}",
                rho.rows(),
                rho.cols()
            )));
        }
        let asym = rho.hermitian_defect();
        if asym > tol {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (‖ρ − ρ†‖_F = {asym:.3e})"
            )));
        }
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidDensity(format!(
                "trace {:.12} + {:.3e}i",
                tr.re, tr.im
            )));
        }
        let min_eig = hermitian_eig(&rho)?.min_eigenvalue();
        if min_eig < -tol {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            rho: CMatrix::outer(psi.amplitudes()),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            rho: CMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be nonnegative and sum to one.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::Empty("mixture of no states".into()))?;
        if weights.len() != states.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        let d = first.dim();
        let mut acc = CMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: s.dim(),
                });
            }
            acc = &acc + &s.rho.scale_real(*w);
        }
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }
}

/// Unit vector, amplitudes in the A-basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amps);
        if amps.is_empty() || (norm - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Normalizes the given vector; fails only for the zero vector.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amps);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amps: amps.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Wraps a vector already known to be normalized.
    pub(crate) fn from_normalized_unchecked(amps: Vec<C64>) -> Self {
        debug_assert!((vec_norm(&amps) - 1.0).abs() < 1e-8);
        Self { amps }
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut amps = vec![ZERO; d];
        amps[i] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(&self.amps)
    }

    /// `min_θ ‖self − e^{iθ} other‖`, computed by aligning phases first so
    /// that identical rays give a distance at rounding level.
    pub fn phase_distance(&self, other: &PureState) -> f64 {
        let overlap = crate::numerics::inner(&other.amps, &self.amps);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Global phase fixed so that the first amplitude above `eps` is real positive.
    pub fn canonical_phase(&self, eps: f64) -> PureState {
        match self.amps.iter().find(|z| z.norm() > eps) {
            Some(z) => {
                let phase = z.conj() / z.norm();
                PureState {
                    amps: self.amps.iter().map(|a| a * phase).collect(),
                }
            }
            None => self.clone(),
        }
    }
}

/// The KD distribution `Q_ij` with its marginals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KDTable {
    pub dim: usize,
    pub q: CMatrix,
    /// Row sums, `⟨a_i|ρ|a_i⟩`.
    pub a_marginals: Vec<f64>,
    /// Column sums, `⟨b_j|ρ|b_j⟩`.
    pub b_marginals: Vec<f64>,
    pub total: C64,
}

/// Outcome of a positivity test, including the entry that comes closest to
/// (or furthest past) the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub positive: bool,
    pub tolerance: f64,
    /// `(i, j)` of the worst entry.
    pub worst_entry: (usize, usize),
    /// `max(|Im Q|, −Re Q)` at the worst entry.
    pub worst_violation: f64,
}

impl KDTable {
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.q[(i, j)]
    }

    pub fn total_nonpositivity(&self) -> f64 {
        self.q.as_slice().iter().map(|z| z.norm()).sum()
    }

    pub fn positivity(&self, tol: f64) -> PositivityReport {
        let mut worst = (0, 0);
        let mut worst_violation = f64::NEG_INFINITY;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self.q[(i, j)];
                let v = z.im.abs().max(-z.re);
                if v > worst_violation {
                    worst_violation = v;
                    worst = (i, j);
                }
            }
        }
        PositivityReport {
            positive: worst_violation <= tol,
            tolerance: tol,
            worst_entry: worst,
            worst_violation,
        }
    }

    pub fn is_kd_positive(&self, tol: f64) -> bool {
        self.positivity(tol).positive
    }

    /// Largest deviation of the row/column sums from real marginals.
    pub fn marginal_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            let s: C64 = (0..d).map(|j| self.q[(i, j)]).sum();
            worst = worst.max((s - C64::new(self.a_marginals[i], 0.0)).norm());
        }
        for j in 0..d {
            let s: C64 = (0..d).map(|i| self.q[(i, j)]).sum();
            worst = worst.max((s - C64::new(self.b_marginals[j], 0.0)).norm());
        }
        worst
    }
}

/// KD table of an arbitrary operator (Hermitian or not); for trace-one
/// Hermitian operators the marginals are real.
pub fn kd_table_operator(op: &CMatrix, u: &TransitionMatrix) -> Result<KDTable> {
    let d = u.dim();
    if op.rows() != d || op.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: op.rows(),
        });
    }
    let rho_u = op * u.matrix();
    let q = CMatrix::from_fn(d, d, |i, j| u.matrix()[(i, j)].conj() * rho_u[(i, j)]);
    let a_marginals = (0..d).map(|i| op[(i, i)].re).collect();
    let b_marginals = (0..d)
        .map(|j| {
            let b = u.b_vector(j);
            op.expectation(&b)
        })
        .collect();
    let total = q.as_slice().iter().sum();
    Ok(KDTable {
        dim: d,
        q,
        a_marginals,
        b_marginals,
        total,
    })
}

pub fn kd_table(rho: &DensityMatrix, u: &TransitionMatrix) -> Result<KDTable> {
    kd_table_operator(rho.matrix(), u)
}

pub fn kd_table_pure(psi: &PureState, u: &TransitionMatrix) -> Result<KDTable> {
    kd_table_operator(&psi.projector(), u)
}

pub fn is_kd_positive(table: &KDTable, tol: f64) -> bool {
    table.is_kd_positive(tol)
}

/// `N = Σ_ij |Q_ij|`.
pub fn total_nonpositivity(table: &KDTable) -> f64 {
    table.total_nonpositivity()
}

/// `N` of a pure state without forming the table:
/// `Σ_ij |U_ij| |ψ_i| |⟨b_j|ψ⟩|`. The vector must be normalized.
pub fn total_nonpositivity_pure(psi: &[C64], u: &TransitionMatrix) -> f64 {
    let b = u.b_components(psi);
    let d = psi.len();
    let m = u.matrix();
    let mut acc = 0.0;
    for i in 0..d {
        let ai = psi[i].norm();
        if ai == 0.0 {
            continue;
        }
        for j in 0..d {
            acc += m[(i, j)].norm() * ai * b[j].norm();
        }
    }
    acc
}

pub fn min_overlap(u: &TransitionMatrix) -> f64 {
    u.min_overlap()
}
