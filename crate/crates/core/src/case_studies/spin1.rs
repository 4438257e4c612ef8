//! The spin-1 system with `S_z` and `S_z'`, `e_z' = (2, 2, −1)/3`.

use crate::error::{Error, Result};
use crate::kd::{PureState, TransitionMatrix};
use crate::numerics::{CMatrix, C64};

type Rational = (i64, i64);

const U_ENTRIES: [[Rational; 3]; 3] = [
    [(-1, 3), (2, 3), (2, 3)],
    [(2, 3), (-1, 3), (2, 3)],
    [(2, 3), (2, 3), (-1, 3)],
];

const F_STAR_ENTRIES: [[Rational; 3]; 3] = [
    [(2, 12), (-2, 12), (-3, 12)],
    [(-2, 12), (6, 12), (-1, 12)],
    [(-3, 12), (-1, 12), (4, 12)],
];

fn rational_matrix(entries: &[[Rational; 3]; 3]) -> CMatrix {
    CMatrix::from_fn(3, 3, |i, j| {
        let (n, d) = entries[i][j];
        C64::new(n as f64 / d as f64, 0.0)
    })
}

/// Fixture with the transition matrix, the bounding functional `F★` and the
/// named pure states.
#[derive(Debug, Clone)]
pub struct Spin1Fixture {
    pub u: TransitionMatrix,
    pub f_star: CMatrix,
}

impl Default for Spin1Fixture {
    fn default() -> Self {
        Self::new()
    }
}

impl Spin1Fixture {
    pub fn new() -> Self {
        let u = TransitionMatrix::new(rational_matrix(&U_ENTRIES))
            .expect("spin-1 transition matrix is orthogonal");
        Self {
            u,
            f_star: rational_matrix(&F_STAR_ENTRIES),
        }
    }

    pub fn dim(&self) -> usize {
        3
    }

    /// `|a_i⟩`, 1-based to match the usual labels.
    pub fn a(&self, i: usize) -> PureState {
        PureState::basis(3, i - 1)
    }

    /// `|b_j⟩`, 1-based.
    pub fn b(&self, j: usize) -> PureState {
        PureState::new(self.u.b_vector(j - 1)).expect("columns of U are unit vectors")
    }

    /// `φ_1 = (a_2 − a_3)/√2`, `φ_2 = (a_1 − a_3)/√2`, `φ_3 = (a_1 − a_2)/√2`.
    pub fn phi(&self, k: usize) -> PureState {
        let amps = match k {
            1 => [0.0, 1.0, -1.0],
            2 => [1.0, 0.0, -1.0],
            3 => [1.0, -1.0, 0.0],
            _ => panic!("φ_k is defined for k = 1, 2, 3"),
        };
        PureState::from_real(&amps).expect("nonzero")
    }

    /// `ψ_1 … ψ_6`: `(a_1+2a_2)`, `(2a_1+a_2)`, `(a_1+2a_3)`, `(2a_1+a_3)`,
    /// `(a_2+2a_3)`, `(2a_2+a_3)`, each over `√5`.
    pub fn psi(&self, k: usize) -> PureState {
        let amps = match k {
            1 => [1.0, 2.0, 0.0],
            2 => [2.0, 1.0, 0.0],
            3 => [1.0, 0.0, 2.0],
            4 => [2.0, 0.0, 1.0],
            5 => [0.0, 1.0, 2.0],
            6 => [0.0, 2.0, 1.0],
            _ => panic!("ψ_k is defined for k = 1..6"),
        };
        PureState::from_real(&amps).expect("nonzero")
    }

    pub fn basis_states(&self) -> Vec<PureState> {
        (1..=3)
            .map(|i| self.a(i))
            .chain((1..=3).map(|j| self.b(j)))
            .collect()
    }

    pub fn phi_states(&self) -> Vec<PureState> {
        (1..=3).map(|k| self.phi(k)).collect()
    }

    pub fn psi_states(&self) -> Vec<PureState> {
        (1..=6).map(|k| self.psi(k)).collect()
    }

    /// The 9 pure KD-positive states: `A ∪ B` and `φ_1, φ_2, φ_3`.
    pub fn kd_positive_pure_states(&self) -> Vec<PureState> {
        let mut v = self.basis_states();
        v.extend(self.phi_states());
        v
    }

    /// The 15 states of minimal support uncertainty.
    pub fn min_uncertainty_states(&self) -> Vec<PureState> {
        let mut v = self.kd_positive_pure_states();
        v.extend(self.psi_states());
        v
    }

    /// The five states saturating `⟨ψ|F★|ψ⟩ <= 1/2`: `a_2, b_1, φ_1, φ_2, φ_3`.
    pub fn f_star_saturating_states(&self) -> Vec<PureState> {
        vec![self.a(2), self.b(1), self.phi(1), self.phi(2), self.phi(3)]
    }

    /// `ρ_λ = λF★ + (1−λ)/3 (|a_2⟩⟨a_2| + |b_1⟩⟨b_1| + |φ_3⟩⟨φ_3|)`.
    ///
    /// Returned as a plain Hermitian matrix: it is positive semidefinite only
    /// for `λ ∈ [0, 4/7]`.
    pub fn rho_lambda(&self, lambda: f64) -> Result<CMatrix> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::OutOfRange {
                value: lambda,
                range: "[0, 1]".into(),
            });
        }
        let mix = &(&self.a(2).projector() + &self.b(1).projector()) + &self.phi(3).projector();
        Ok(&self.f_star.scale_real(lambda) + &mix.scale_real((1.0 - lambda) / 3.0))
    }

    /// Closed-form eigenvalues `r_1, r_2, r_3` of `ρ_λ`.
    pub fn rho_lambda_eigenvalues(lambda: f64) -> [f64; 3] {
        let root = (7.0 * lambda * lambda - 32.0 * lambda + 160.0).sqrt();
        [
            (7.0 * lambda + 2.0) / 18.0,
            (root - 7.0 * lambda + 16.0) / 36.0,
            (-root - 7.0 * lambda + 16.0) / 36.0,
        ]
    }
}

/// `ρ_λ` for the default fixture.
pub fn rho_lambda(lambda: f64) -> Result<CMatrix> {
    Spin1Fixture::new().rho_lambda(lambda)
}
