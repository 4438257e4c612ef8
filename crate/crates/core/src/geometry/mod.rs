//! Convex geometry on density matrices: hull membership with certificates,
//! facet enumeration for finite generator sets, and convex roofs over finite
//! extreme sets.
//!
//! Hermitian `d × d` matrices are handled through an isometric real embedding
//! into `ℝ^{d²}` (see [`embed_hermitian`]), so every routine here also has a
//! plain real-coordinate version.

mod facets;
mod membership;
pub mod simplex;

pub use facets::{facet_enumeration, facets_real, Facet, RealFacet, MAX_FACET_GENERATORS};
pub use membership::{
    convex_roof_real, finite_convex_roof, hull_membership_real, membership_lp,
    MembershipCertificate, RealMembership, RoofSolution, Verdict,
};

use crate::numerics::{CMatrix, C64};

/// Real coordinates of a Hermitian matrix: the `d` diagonal entries, then
/// `√2·Re H_ij, √2·Im H_ij` for each `i < j` in row-major order. The map is an
/// isometry from the Hilbert-Schmidt inner product to the Euclidean one.
pub fn embed_hermitian(h: &CMatrix) -> Vec<f64> {
    let d = h.rows();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(h[(i, i)].re);
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(s * h[(i, j)].re);
            out.push(s * h[(i, j)].im);
        }
    }
    out
}

/// Inverse of [`embed_hermitian`].
pub fn unembed_hermitian(x: &[f64], d: usize) -> CMatrix {
    assert_eq!(x.len(), d * d, "embedding length");
    let mut h = CMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = C64::new(x[i], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(s * x[k], s * x[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
