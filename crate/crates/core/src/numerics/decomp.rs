use super::matrix::{inner, vec_norm, CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Thin QR factorization by modified Gram-Schmidt with one reorthogonalization
/// pass. `R` has a real nonnegative diagonal.
pub fn qr(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (rows, cols) = (m.rows(), m.cols());
    if cols > rows {
        return Err(Error::ShapeMismatch(format!(
            "thin QR needs rows >= cols, got {rows}x{cols}"
        )));
    }
    let mut q = CMatrix::zeros(rows, cols);
    let mut r = CMatrix::zeros(cols, cols);
    for j in 0..cols {
        let mut v = m.column(j);
        for _pass in 0..2 {
            for k in 0..j {
                let qk = q.column(k);
                let proj = inner(&qk, &v);
                r[(k, j)] += proj;
                for (vi, qi) in v.iter_mut().zip(&qk) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm == 0.0 {
            return Err(Error::ShapeMismatch(format!(
                "column {j} is linearly dependent"
            )));
        }
        r[(j, j)] = C64::new(norm, 0.0);
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        q.set_column(j, &v);
    }
    Ok((q, r))
}

/// Replaces the columns of `m` by an orthonormal basis of their span.
pub fn orthonormalize_columns(m: &CMatrix) -> Result<CMatrix> {
    qr(m).map(|(q, _)| q)
}

/// Determinant by LU decomposition with partial pivoting.
pub fn determinant(m: &CMatrix) -> Result<C64> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "determinant of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut det = ONE;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .unwrap_or(k);
        if a[(pivot, k)] == ZERO {
            return Ok(ZERO);
        }
        if pivot != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            det = -det;
        }
        let akk = a[(k, k)];
        det *= akk;
        for i in (k + 1)..n {
            let factor = a[(i, k)] / akk;
            if factor == ZERO {
                continue;
            }
            for j in (k + 1)..n {
                let akj = a[(k, j)];
                a[(i, j)] -= factor * akj;
            }
        }
    }
    Ok(det)
}

/// Determinant of the square submatrix selected by `row_set` × `col_set`.
pub fn minor_determinant(m: &CMatrix, row_set: &[usize], col_set: &[usize]) -> Result<C64> {
    if row_set.len() != col_set.len() || row_set.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "minor with {} rows and {} columns",
            row_set.len(),
            col_set.len()
        )));
    }
    check_index_set(row_set, m.rows())?;
    check_index_set(col_set, m.cols())?;
    determinant(&m.submatrix(row_set, col_set))
}

pub(crate) fn check_index_set(set: &[usize], dim: usize) -> Result<()> {
    for (k, &i) in set.iter().enumerate() {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        if set[..k].contains(&i) {
            return Err(Error::InvalidParameter(format!("index {i} repeated")));
        }
    }
    Ok(())
}

/// Null space of `m`, as the orthogonal complement of its row space.
#[derive(Debug, Clone)]
pub struct NullSpace {
    /// Orthonormal basis vectors of the (numerical) kernel.
    pub basis: Vec<Vec<C64>>,
    /// Smallest pivot of the row-space factorization that was classified as
    /// nonzero, if any. It estimates the smallest nonzero singular value.
    pub smallest_retained: Option<f64>,
}

fn orthogonalize(v: &mut [C64], against: &[Vec<C64>]) {
    for _pass in 0..2 {
        for q in against {
            let proj = inner(q, v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
    }
}

/// Orthonormal basis of the row space of `m` (as conjugated rows), built by
/// Gram-Schmidt with pivoting on the largest residual. Pivots at or below
/// `tol · (1 + ‖M‖_F)` count as zero. Also returns the smallest kept pivot.
pub fn row_space(m: &CMatrix, tol: f64) -> (Vec<Vec<C64>>, Option<f64>) {
    let cutoff = tol * (1.0 + m.frobenius_norm());
    let mut remaining: Vec<Vec<C64>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| z.conj()).collect())
        .collect();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut smallest: Option<f64> = None;
    while !remaining.is_empty() {
        for v in remaining.iter_mut() {
            orthogonalize(v, &basis);
        }
        let (best, norm) =
            remaining
                .iter()
                .map(|v| vec_norm(v))
                .enumerate()
                .fold(
                    (0, -1.0),
                    |acc, (i, x)| if x > acc.1 { (i, x) } else { acc },
                );
        if norm <= cutoff {
            break;
        }
        let v = remaining.swap_remove(best);
        basis.push(v.iter().map(|z| z / norm).collect());
        smallest = Some(smallest.map_or(norm, |s: f64| s.min(norm)));
    }
    (basis, smallest)
}

/// Kernel of `m` with the rank decided as in [`row_space`]; the basis
/// completes the row space using standard basis vectors.
pub fn null_space(m: &CMatrix, tol: f64) -> Result<NullSpace> {
    let n = m.cols();
    let (row_space, smallest_retained) = row_space(m, tol);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    while row_space.len() + basis.len() < n {
        let mut best: Option<(Vec<C64>, f64)> = None;
        for k in 0..n {
            let mut e = vec![ZERO; n];
            e[k] = ONE;
            orthogonalize(&mut e, &row_space);
            orthogonalize(&mut e, &basis);
            let norm = vec_norm(&e);
            if best.as_ref().is_none_or(|(_, b)| norm > *b) {
                best = Some((e, norm));
            }
        }
        let (e, norm) = best.expect("n > 0");
        basis.push(e.iter().map(|z| z / norm).collect());
    }
    Ok(NullSpace {
        basis,
        smallest_retained,
    })
}
