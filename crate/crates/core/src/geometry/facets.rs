use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{dot, embed_hermitian, norm, unembed_hermitian};
use crate::error::{Error, Result};
use crate::kd::DensityMatrix;
use crate::numerics::{null_space, row_space, CMatrix, C64};
use crate::subsets::{binomial, combinations};

pub const MAX_FACET_GENERATORS: usize = 30;
const MAX_CANDIDATES: usize = 2_000_000;
const RANK_TOL: f64 = 1e-9;
const SIDE_TOL: f64 = 1e-9;

/// Facet of the convex hull of a finite point set in real coordinates:
/// `normal · x <= offset` for every generator, with equality on `active`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealFacet {
    /// Outward unit normal, lying in the direction space of the affine hull.
    pub normal: Vec<f64>,
    pub offset: f64,
    pub active: Vec<usize>,
}

/// Facet of a hull of density matrices: `Tr(F g) <= offset` for all
/// generators, with `F` traceless and of unit Frobenius norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Facet {
    pub functional: CMatrix,
    pub offset: f64,
    pub active: Vec<usize>,
}

impl Facet {
    /// Same inequality written with a trace-one functional, `F + I/d`.
    pub fn trace_one_form(&self) -> (CMatrix, f64) {
        let d = self.functional.rows();
        let shift = 1.0 / d as f64;
        (
            &self.functional + &CMatrix::identity(d).scale(C64::new(shift, 0.0)),
            self.offset + shift,
        )
    }
}

fn as_matrix(rows: &[Vec<f64>], cols: usize) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][j], 0.0))
}

fn real_parts(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| z.re).collect()
}

/// Enumerates the facets of `conv(points)` inside its affine hull.
///
/// The hull is reduced to coordinates on its affine span of dimension `k`;
/// every affinely independent `k`-subset of points spans a candidate
/// hyperplane, kept when all points lie on one closed side. Facets are
/// identified by their active sets, which makes the output independent of the
/// order in which candidates are met. Output is sorted by active set.
pub fn facets_real(points: &[Vec<f64>]) -> Result<Vec<RealFacet>> {
    let n = points.len();
    if n > MAX_FACET_GENERATORS {
        return Err(Error::TooManyGenerators {
            count: n,
            limit: MAX_FACET_GENERATORS,
        });
    }
    let q = points
        .first()
        .ok_or_else(|| Error::Empty("no generators".into()))?
        .len();
    if let Some(p) = points.iter().find(|p| p.len() != q) {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: p.len(),
        });
    }

    let centroid: Vec<f64> = (0..q)
        .map(|i| points.iter().map(|p| p[i]).sum::<f64>() / n as f64)
        .collect();
    let diffs: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(&centroid).map(|(a, b)| a - b).collect())
        .collect();
    // real input stays real through the orthogonalization
    let basis: Vec<Vec<f64>> = row_space(&as_matrix(&diffs, q), RANK_TOL)
        .0
        .iter()
        .map(|v| real_parts(v))
        .collect();
    let k = basis.len();
    if k < 1 {
        return Err(Error::DegenerateHull(k));
    }
    if binomial(n, k) > MAX_CANDIDATES {
        return Err(Error::TooManyGenerators {
            count: n,
            limit: MAX_FACET_GENERATORS,
        });
    }
    let local: Vec<Vec<f64>> = diffs
        .iter()
        .map(|d| basis.iter().map(|b| dot(b, d)).collect())
        .collect();

    let mut found: BTreeMap<Vec<usize>, RealFacet> = BTreeMap::new();
    for subset in combinations(n, k) {
        let base = &local[subset[0]];
        let rows: Vec<Vec<f64>> = subset[1..]
            .iter()
            .map(|&i| local[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let kernel = if rows.is_empty() {
            vec![vec![C64::new(1.0, 0.0)]]
        } else {
            null_space(&as_matrix(&rows, k), RANK_TOL)?.basis
        };
        if kernel.len() != 1 {
            continue;
        }
        let mut normal = real_parts(&kernel[0]);
        let nn = norm(&normal);
        normal.iter_mut().for_each(|x| *x /= nn);
        let mut offset = dot(&normal, base);
        let values: Vec<f64> = local.iter().map(|p| dot(&normal, p) - offset).collect();
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        if max > SIDE_TOL {
            if min < -SIDE_TOL {
                continue;
            }
            normal.iter_mut().for_each(|x| *x = -*x);
            offset = -offset;
        }
        let active: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() <= SIDE_TOL)
            .map(|(i, _)| i)
            .collect();
        if found.contains_key(&active) {
            continue;
        }
        // back to the ambient coordinates
        let full_normal: Vec<f64> = (0..q)
            .map(|i| basis.iter().zip(&normal).map(|(b, c)| b[i] * c).sum())
            .collect();
        let full_offset = offset + dot(&full_normal, &centroid);
        found.insert(
            active.clone(),
            RealFacet {
                normal: full_normal,
                offset: full_offset,
                active,
            },
        );
    }
    Ok(found.into_values().collect())
}

/// Facets of the convex hull of density matrices.
pub fn facet_enumeration(generators: &[DensityMatrix]) -> Result<Vec<Facet>> {
    let d = generators
        .first()
        .ok_or_else(|| Error::Empty("no generators".into()))?
        .dim();
    if let Some(g) = generators.iter().find(|g| g.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: g.dim(),
        });
    }
    let points: Vec<Vec<f64>> = generators
        .iter()
        .map(|g| embed_hermitian(g.matrix()))
        .collect();
    Ok(facets_real(&points)?
        .into_iter()
        .map(|f| Facet {
            functional: unembed_hermitian(&f.normal, d),
            offset: f.offset,
            active: f.active,
        })
        .collect())
}
