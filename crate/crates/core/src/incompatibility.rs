//! Support uncertainty counts and the complete-incompatibility test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kd::{kd_table, DensityMatrix, PureState, TransitionMatrix};
use crate::numerics::{check_index_set, minor_determinant, CMatrix, C64};
use crate::subsets::combinations;

/// Largest dimension for exhaustive minor enumeration.
pub const MAX_MINOR_DIM: usize = 8;

/// Number of components above `eps` in each basis.
///
/// `smallest_kept` and `largest_discarded` record how close the counted and
/// discarded magnitudes came to the cutoff, so borderline inputs are visible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportCount {
    pub n_a: usize,
    pub n_b: usize,
    pub eps: f64,
    pub smallest_kept: f64,
    pub largest_discarded: f64,
}

impl SupportCount {
    pub fn n_ab(&self) -> usize {
        self.n_a + self.n_b
    }

    fn from_magnitudes(a: &[f64], b: &[f64], eps: f64) -> Self {
        let mut smallest_kept = f64::INFINITY;
        let mut largest_discarded: f64 = 0.0;
        let mut count = |mags: &[f64]| {
            mags.iter()
                .filter(|&&m| {
                    if m > eps {
                        smallest_kept = smallest_kept.min(m);
                        true
                    } else {
                        largest_discarded = largest_discarded.max(m);
                        false
                    }
                })
                .count()
        };
        let n_a = count(a);
        let n_b = count(b);
        Self {
            n_a,
            n_b,
            eps,
            smallest_kept,
            largest_discarded,
        }
    }
}

/// `n_A(ψ)`, `n_B(ψ)`: amplitudes `|⟨a_i|ψ⟩|` and `|⟨b_j|ψ⟩|` above `eps`.
pub fn support_counts_pure(
    psi: &PureState,
    u: &TransitionMatrix,
    eps: f64,
) -> Result<SupportCount> {
    if psi.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: psi.dim(),
        });
    }
    Ok(support_counts_vector(psi.amplitudes(), u, eps))
}

pub(crate) fn support_counts_vector(psi: &[C64], u: &TransitionMatrix, eps: f64) -> SupportCount {
    let a: Vec<f64> = psi.iter().map(|z| z.norm()).collect();
    let b: Vec<f64> = u.b_components(psi).iter().map(|z| z.norm()).collect();
    SupportCount::from_magnitudes(&a, &b, eps)
}

/// Naive mixed-state counts: diagonal entries `⟨a_i|ρ|a_i⟩` and `⟨b_j|ρ|b_j⟩`
/// above `eps`.
pub fn support_counts_mixed(
    rho: &DensityMatrix,
    u: &TransitionMatrix,
    eps: f64,
) -> Result<SupportCount> {
    let table = kd_table(rho, u)?;
    Ok(SupportCount::from_magnitudes(
        &table.a_marginals,
        &table.b_marginals,
        eps,
    ))
}

/// A square minor of `U`, identified by its (0-based) row and column sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorLocation {
    pub order: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncompatibilityReport {
    pub completely_incompatible: bool,
    pub min_abs_minor: f64,
    pub argmin: MinorLocation,
    pub minors_checked: usize,
    pub eps: f64,
}

/// Evaluates every square minor of every order. Ties in `|minor|` go to the
/// lexicographically first `(order, rows, cols)`.
pub fn complete_incompatibility(u: &TransitionMatrix, eps: f64) -> Result<IncompatibilityReport> {
    let d = u.dim();
    if d > MAX_MINOR_DIM {
        return Err(Error::DimensionTooLarge {
            dim: d,
            max: MAX_MINOR_DIM,
        });
    }
    let m = u.matrix();
    let mut best: Option<(f64, MinorLocation)> = None;
    let mut checked = 0usize;
    for k in 1..=d {
        let subsets = combinations(d, k);
        for rows in &subsets {
            for cols in &subsets {
                let value = minor_determinant(m, rows, cols)?;
                checked += 1;
                let abs = value.norm();
                if best.as_ref().is_none_or(|(b, _)| abs < *b) {
                    best = Some((
                        abs,
                        MinorLocation {
                            order: k,
                            rows: rows.clone(),
                            cols: cols.clone(),
                            value,
                        },
                    ));
                }
            }
        }
    }
    let (min_abs_minor, argmin) = best.ok_or_else(|| Error::Empty("no minors".into()))?;
    Ok(IncompatibilityReport {
        completely_incompatible: min_abs_minor > eps,
        min_abs_minor,
        argmin,
        minors_checked: checked,
        eps,
    })
}

fn projector_a(d: usize, s: &[usize]) -> CMatrix {
    let mut p = CMatrix::zeros(d, d);
    for &i in s {
        p[(i, i)] = C64::new(1.0, 0.0);
    }
    p
}

fn projector_b(u: &TransitionMatrix, t: &[usize]) -> CMatrix {
    let d = u.dim();
    let mut p = CMatrix::zeros(d, d);
    for &j in t {
        p = &p + &CMatrix::outer(&u.b_vector(j));
    }
    p
}

/// `‖[Π_A(S), Π_B(T)]‖_F` with 0-based index sets.
pub fn projector_commutator_norm(u: &TransitionMatrix, s: &[usize], t: &[usize]) -> Result<f64> {
    let d = u.dim();
    for set in [s, t] {
        if set.is_empty() || set.len() >= d {
            return Err(Error::InvalidParameter(format!(
                "projector index sets need 1 <= size < {d}, got {}",
                set.len()
            )));
        }
        check_index_set(set, d)?;
    }
    let pa = projector_a(d, s);
    let pb = projector_b(u, t);
    Ok((&(&pa * &pb) - &(&pb * &pa)).frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_studies::{dft_matrix, Spin1Fixture};
    use crate::numerics::random::{random_unit_vector, rng_from_seed};
    use crate::subsets::binomial;

    #[test]
    fn spin1_pure_counts() {
        let fx = Spin1Fixture::new();
        let c = support_counts_pure(&PureState::basis(3, 0), &fx.u, 1e-9).unwrap();
        assert_eq!((c.n_a, c.n_b, c.n_ab()), (1, 3, 4));
        let psi1 = PureState::from_real(&[1.0, 2.0, 0.0]).unwrap();
        let c = support_counts_pure(&psi1, &fx.u, 1e-9).unwrap();
        assert_eq!((c.n_a, c.n_b, c.n_ab()), (2, 2, 4));
        assert!(c.largest_discarded < 1e-15);
        assert!(c.smallest_kept > 0.4);
    }

    #[test]
    fn generic_state_has_full_support() {
        let fx = Spin1Fixture::new();
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            let psi = PureState::new(random_unit_vector(3, &mut rng)).unwrap();
            assert_eq!(support_counts_pure(&psi, &fx.u, 1e-9).unwrap().n_ab(), 6);
        }
    }

    #[test]
    fn mixed_counts_examples() {
        let fx = Spin1Fixture::new();
        let eps = 1e-9;
        let mm = DensityMatrix::maximally_mixed(3);
        assert_eq!(support_counts_mixed(&mm, &fx.u, eps).unwrap().n_ab(), 6);

        let a1 = DensityMatrix::from_pure(&PureState::basis(3, 0));
        let a2 = DensityMatrix::from_pure(&PureState::basis(3, 1));
        let b1 = DensityMatrix::from_pure(&PureState::new(fx.u.b_vector(0)).unwrap());
        let rho = DensityMatrix::mixture(&[0.5, 0.5], &[a1.clone(), b1]).unwrap();
        assert_eq!(support_counts_mixed(&rho, &fx.u, eps).unwrap().n_ab(), 6);
        let rho = DensityMatrix::mixture(&[0.5, 0.5], &[a1, a2]).unwrap();
        assert_eq!(support_counts_mixed(&rho, &fx.u, eps).unwrap().n_ab(), 5);
    }

    #[test]
    fn incompatibility_examples() {
        let fx = Spin1Fixture::new();
        let r = complete_incompatibility(&fx.u, 1e-9).unwrap();
        assert!(r.completely_incompatible);
        assert_eq!(
            r.minors_checked,
            (1..=3).map(|k| binomial(3, k).pow(2)).sum::<usize>()
        );

        assert!(
            complete_incompatibility(&dft_matrix(3).unwrap(), 1e-9)
                .unwrap()
                .completely_incompatible
        );
        let r4 = complete_incompatibility(&dft_matrix(4).unwrap(), 1e-9).unwrap();
        assert!(!r4.completely_incompatible);
        assert_eq!(r4.argmin.order, 2);
        assert!(r4.min_abs_minor <= 1e-12);

        let r = complete_incompatibility(&TransitionMatrix::identity(3), 1e-9).unwrap();
        assert!(!r.completely_incompatible);
        assert_eq!(r.argmin.order, 1);
        assert_eq!(
            (r.argmin.rows.clone(), r.argmin.cols.clone()),
            (vec![0], vec![1])
        );
    }

    #[test]
    fn dft4_specific_zero_minor() {
        let u = dft_matrix(4).unwrap();
        let m = minor_determinant(u.matrix(), &[0, 2], &[0, 2]).unwrap();
        assert!(m.norm() < 1e-15);
    }

    #[test]
    fn dimension_guard() {
        let u = TransitionMatrix::identity(9);
        assert!(matches!(
            complete_incompatibility(&u, 1e-9),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn commutator_examples() {
        let fx = Spin1Fixture::new();
        assert!(projector_commutator_norm(&fx.u, &[0], &[0]).unwrap() > 0.1);
        assert_eq!(
            projector_commutator_norm(&TransitionMatrix::identity(3), &[0], &[0]).unwrap(),
            0.0
        );
        let dft4 = dft_matrix(4).unwrap();
        assert!(projector_commutator_norm(&dft4, &[0, 2], &[0, 2]).unwrap() <= 1e-10);
        assert!(projector_commutator_norm(&dft4, &[0, 1], &[0, 2]).unwrap() > 1e-3);
        assert!(matches!(
            projector_commutator_norm(&fx.u, &[0, 1, 2], &[0]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            projector_commutator_norm(&fx.u, &[5], &[0]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }
}
