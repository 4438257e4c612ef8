use serde::{Deserialize, Serialize};

use super::simplex::{solve, LpOutcome, StandardLp};
use super::{dot, embed_hermitian, norm, unembed_hermitian};
use crate::error::{Error, Result};
use crate::kd::DensityMatrix;
use crate::numerics::{CMatrix, C64};

const WEIGHT_FLOOR: f64 = -1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Inside,
    Outside,
    /// Separated, but by less than the required margin.
    Indeterminate,
}

/// Membership result in real coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealMembership {
    pub verdict: Verdict,
    /// Convex weights reproducing the target (inside only).
    pub weights: Option<Vec<f64>>,
    /// `‖Σ w_k x_k − target‖` (inside only).
    pub residual: Option<f64>,
    /// Unit separating direction `f` with `f·x_k <= threshold` for every
    /// generator (outside/indeterminate only).
    pub functional: Option<Vec<f64>>,
    pub threshold: Option<f64>,
    /// `f·target − threshold`; zero when inside.
    pub margin: f64,
    pub tolerance: f64,
}

fn membership_lp_problem(
    target: &[f64],
    generators: &[Vec<f64>],
    costs: Vec<f64>,
) -> Result<StandardLp> {
    let q = target.len();
    if generators.is_empty() {
        return Err(Error::Empty("no generators".into()));
    }
    if let Some(g) = generators.iter().find(|g| g.len() != q) {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: g.len(),
        });
    }
    let mut a: Vec<Vec<f64>> = (0..q)
        .map(|r| generators.iter().map(|g| g[r]).collect())
        .collect();
    a.push(vec![1.0; generators.len()]);
    let mut b = target.to_vec();
    b.push(1.0);
    Ok(StandardLp { a, b, c: costs })
}

/// Orthonormal basis of `span{x_k − target}`.
fn difference_span(target: &[f64], generators: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let scale = generators
        .iter()
        .map(|g| norm(g))
        .fold(norm(target), f64::max)
        .max(1.0);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for g in generators {
        let mut v: Vec<f64> = g.iter().zip(target).map(|(a, b)| a - b).collect();
        for _ in 0..2 {
            for e in &basis {
                let p = dot(e, &v);
                v.iter_mut().zip(e).for_each(|(x, y)| *x -= p * y);
            }
        }
        let n = norm(&v);
        if n > 1e-12 * scale {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

fn check_weights(
    weights: &[f64],
    target: &[f64],
    generators: &[Vec<f64>],
    tol: f64,
) -> Result<f64> {
    if let Some(w) = weights.iter().find(|&&w| w < WEIGHT_FLOOR) {
        return Err(Error::CertificateRejected(format!(
            "negative weight {w:.3e}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::CertificateRejected(format!("weights sum to {sum}")));
    }
    let mut combo = vec![0.0; target.len()];
    for (w, g) in weights.iter().zip(generators) {
        combo.iter_mut().zip(g).for_each(|(c, x)| *c += w * x);
    }
    let residual = norm(
        &combo
            .iter()
            .zip(target)
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
    );
    if residual > tol {
        return Err(Error::CertificateRejected(format!(
            "reconstruction residual {residual:.3e} exceeds {tol:.3e}"
        )));
    }
    Ok(residual)
}

/// Decides whether `target ∈ conv(generators)` by LP feasibility. When
/// infeasible, the phase-one Farkas multipliers give a separating direction,
/// which is projected onto the span of `x_k − target`, normalized, and
/// re-evaluated directly. "Outside" requires a margin above `10·tol`.
pub fn hull_membership_real(
    target: &[f64],
    generators: &[Vec<f64>],
    tol: f64,
) -> Result<RealMembership> {
    let lp = membership_lp_problem(target, generators, vec![0.0; generators.len()])?;
    match solve(&lp, tol)? {
        LpOutcome::Optimal { x, .. } => {
            let residual = check_weights(&x, target, generators, tol)?;
            Ok(RealMembership {
                verdict: Verdict::Inside,
                weights: Some(x),
                residual: Some(residual),
                functional: None,
                threshold: None,
                margin: 0.0,
                tolerance: tol,
            })
        }
        LpOutcome::Infeasible { farkas, .. } => {
            let q = target.len();
            let raw = &farkas[..q];
            let mut f = vec![0.0; q];
            for e in difference_span(target, generators) {
                let p = dot(&e, raw);
                f.iter_mut().zip(&e).for_each(|(x, y)| *x += p * y);
            }
            let n = norm(&f);
            if n == 0.0 {
                return Ok(RealMembership {
                    verdict: Verdict::Indeterminate,
                    weights: None,
                    residual: None,
                    functional: None,
                    threshold: None,
                    margin: 0.0,
                    tolerance: tol,
                });
            }
            f.iter_mut().for_each(|x| *x /= n);
            let threshold = generators
                .iter()
                .map(|g| dot(&f, g))
                .fold(f64::NEG_INFINITY, f64::max);
            let margin = dot(&f, target) - threshold;
            let verdict = if margin > 10.0 * tol {
                Verdict::Outside
            } else {
                Verdict::Indeterminate
            };
            Ok(RealMembership {
                verdict,
                weights: None,
                residual: None,
                functional: Some(f),
                threshold: Some(threshold),
                margin,
                tolerance: tol,
            })
        }
        LpOutcome::Unbounded => Err(Error::CertificateRejected(
            "feasibility LP reported unbounded".into(),
        )),
    }
}

/// Membership of a density matrix in the convex hull of other density
/// matrices, with a self-checked certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipCertificate {
    pub verdict: Verdict,
    pub weights: Option<Vec<f64>>,
    pub residual: Option<f64>,
    /// Trace-one Hermitian `F` with `Tr(F g) <= threshold` for all generators
    /// and `Tr(F ρ) = threshold + margin`.
    pub functional: Option<CMatrix>,
    pub threshold: Option<f64>,
    pub margin: f64,
    pub tolerance: f64,
}

impl MembershipCertificate {
    pub fn is_inside(&self) -> bool {
        self.verdict == Verdict::Inside
    }

    pub fn is_outside(&self) -> bool {
        self.verdict == Verdict::Outside
    }
}

pub fn membership_lp(
    target: &DensityMatrix,
    generators: &[DensityMatrix],
    tol: f64,
) -> Result<MembershipCertificate> {
    let d = target.dim();
    if let Some(g) = generators.iter().find(|g| g.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: g.dim(),
        });
    }
    let t = embed_hermitian(target.matrix());
    let gens: Vec<Vec<f64>> = generators
        .iter()
        .map(|g| embed_hermitian(g.matrix()))
        .collect();
    let real = hull_membership_real(&t, &gens, tol)?;

    let (functional, threshold) = match (&real.functional, real.threshold) {
        (Some(f), Some(c)) => {
            // f is orthogonal to the identity direction (it lies in the span of
            // trace-zero differences), so adding I/d makes Tr F = 1 and shifts
            // every value on trace-one states by 1/d
            let shift = 1.0 / d as f64;
            let fm = &unembed_hermitian(f, d) + &CMatrix::identity(d).scale(C64::new(shift, 0.0));
            let c = c + shift;
            for (k, g) in generators.iter().enumerate() {
                let v = fm.trace_product_re(g.matrix());
                if v > c + tol {
                    return Err(Error::CertificateRejected(format!(
                        "generator {k} violates the functional by {:.3e}",
                        v - c
                    )));
                }
            }
            let lhs = fm.trace_product_re(target.matrix()) - c;
            if (lhs - real.margin).abs() > 1e-9 {
                return Err(Error::CertificateRejected(format!(
                    "margin mismatch {lhs:.3e} vs {:.3e}",
                    real.margin
                )));
            }
            (Some(fm), Some(c))
        }
        _ => (None, None),
    };
    Ok(MembershipCertificate {
        verdict: real.verdict,
        weights: real.weights,
        residual: real.residual,
        functional,
        threshold,
        margin: real.margin,
        tolerance: tol,
    })
}

/// Optimal value and weights of a finite convex roof LP.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoofSolution {
    pub value: f64,
    pub weights: Vec<f64>,
}

/// `min Σ w_k s_k` over convex weights with `Σ w_k x_k = target`.
pub fn convex_roof_real(
    values: &[f64],
    target: &[f64],
    generators: &[Vec<f64>],
    tol: f64,
) -> Result<RoofSolution> {
    if values.len() != generators.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} values for {} generators",
            values.len(),
            generators.len()
        )));
    }
    let lp = membership_lp_problem(target, generators, values.to_vec())?;
    match solve(&lp, tol)? {
        LpOutcome::Optimal { x, objective } => {
            check_weights(&x, target, generators, tol)?;
            Ok(RoofSolution {
                value: objective,
                weights: x,
            })
        }
        LpOutcome::Infeasible { .. } => Err(Error::OutsideHull),
        LpOutcome::Unbounded => Err(Error::CertificateRejected(
            "roof LP reported unbounded".into(),
        )),
    }
}

/// Convex roof of `values` (one per generator) evaluated at `target`. Exact
/// when the generators are all the extreme points of the domain.
pub fn finite_convex_roof(
    values: &[f64],
    target: &DensityMatrix,
    generators: &[DensityMatrix],
    tol: f64,
) -> Result<RoofSolution> {
    let d = target.dim();
    if let Some(g) = generators.iter().find(|g| g.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: g.dim(),
        });
    }
    let t = embed_hermitian(target.matrix());
    let gens: Vec<Vec<f64>> = generators
        .iter()
        .map(|g| embed_hermitian(g.matrix()))
        .collect();
    convex_roof_real(values, &t, &gens, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_studies::Spin1Fixture;
    use crate::kd::PureState;

    fn projectors(states: &[PureState]) -> Vec<DensityMatrix> {
        states.iter().map(DensityMatrix::from_pure).collect()
    }

    #[test]
    fn target_equal_to_first_generator() {
        let fx = Spin1Fixture::new();
        let gens = projectors(&fx.min_uncertainty_states());
        let cert = membership_lp(&gens[0], &gens, 1e-8).unwrap();
        assert!(cert.is_inside());
        let w = cert.weights.unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12);
        assert!(w[1..].iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn maximally_mixed_inside_basis_hull() {
        let fx = Spin1Fixture::new();
        let gens = projectors(&fx.basis_states());
        let cert = membership_lp(&DensityMatrix::maximally_mixed(3), &gens, 1e-8).unwrap();
        assert!(cert.is_inside());
        assert!(cert.residual.unwrap() <= 1e-8);
    }

    #[test]
    fn rho_half_is_outside_the_fifteen() {
        let fx = Spin1Fixture::new();
        let gens = projectors(&fx.min_uncertainty_states());
        let rho = DensityMatrix::new(fx.rho_lambda(0.5).unwrap()).unwrap();
        let cert = membership_lp(&rho, &gens, 1e-8).unwrap();
        assert!(cert.is_outside());
        assert!(cert.margin > 1e-6);
        let f = cert.functional.unwrap();
        assert!((f.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segment_midpoint_roof() {
        let gens = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let r = convex_roof_real(&[0.0, 1.0, 5.0], &[0.5, 0.0], &gens, 1e-9).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert!(matches!(
            convex_roof_real(&[0.0, 1.0, 5.0], &[1.0, 1.0], &gens, 1e-9),
            Err(Error::OutsideHull)
        ));
    }

    #[test]
    fn extreme_point_roof() {
        let fx = Spin1Fixture::new();
        let gens = projectors(&fx.min_uncertainty_states());
        let values: Vec<f64> = (0..gens.len()).map(|k| 1.0 + k as f64).collect();
        for k in [0, 7, 14] {
            let r = finite_convex_roof(&values, &gens[k], &gens, 1e-8).unwrap();
            assert!((r.value - values[k]).abs() < 1e-9);
        }
    }
}
