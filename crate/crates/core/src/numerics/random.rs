//! Seeded Gaussian sampling: Ginibre matrices, Haar unitaries, random states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::decomp::qr;
use super::matrix::{vec_norm, CMatrix, C64};
use crate::error::{Error, Result};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal with `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: QR of a Ginibre sample, with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary_from_rng<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    loop {
        let g = ginibre(d, d, rng);
        // a singular Ginibre draw has probability zero; redraw if it happens
        if let Ok((mut q, r)) = qr(&g) {
            for k in 0..d {
                let rkk = r[(k, k)];
                let phase = if rkk.norm() > 0.0 {
                    rkk / rkk.norm()
                } else {
                    C64::new(1.0, 0.0)
                };
                for i in 0..d {
                    q[(i, k)] *= phase;
                }
            }
            return q;
        }
    }
}

pub fn haar_unitary(d: usize, seed: u64) -> Result<CMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "Haar unitary needs d >= 2, got {d}"
        )));
    }
    Ok(haar_unitary_from_rng(d, &mut rng_from_seed(seed)))
}

/// Haar-random unit vector (first column of a Haar unitary in distribution).
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| complex_normal(rng)).collect();
        let n = vec_norm(&v);
        if n > 0.0 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Random density matrix `G G† / Tr(G G†)` with `G` a `d × rank` Ginibre sample.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Random point of the probability simplex with `n` entries (flat Dirichlet).
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}
