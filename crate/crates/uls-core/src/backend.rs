//! Boundary to the dense numerics backend (faer).
//!
//! Everything that enters or leaves this module is a [`Matrix`] or plain
//! vector; no faer types escape. Callers own all rank/validity decisions.

use crate::matrix::Matrix;
use faer::complex_native::c64;
use faer::prelude::*;
use faer::Mat;
use num_complex::Complex64;

fn to_faer(m: &Matrix) -> Mat<c64> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m.get(i, j);
        c64::new(z.re, z.im)
    })
}

fn from_faer(m: faer::MatRef<'_, c64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m.read(i, j);
        Complex64::new(z.re, z.im)
    })
}

/// Singular values in nonincreasing order.
pub(crate) fn singular_values(m: &Matrix) -> Vec<f64> {
    to_faer(m).singular_values()
}

/// Full SVD `m = u * diag(s) * v^H`; `u` is rows x rows, `v` is cols x cols.
pub(crate) fn svd_full(m: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let svd = to_faer(m).svd();
    let k = m.rows().min(m.cols());
    let s = (0..k).map(|i| svd.s_diagonal().read(i).re).collect();
    (from_faer(svd.u()), s, from_faer(svd.v()))
}

/// Thin SVD with `min(rows, cols)` columns in both factors.
pub(crate) fn svd_thin(m: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let svd = to_faer(m).thin_svd();
    let k = m.rows().min(m.cols());
    let s = (0..k).map(|i| svd.s_diagonal().read(i).re).collect();
    (from_faer(svd.u()), s, from_faer(svd.v()))
}

/// Eigenvalues and a matching right eigenvector matrix of a square matrix.
/// Column `j` of the returned matrix pairs with eigenvalue `j`; no ordering
/// is guaranteed.
pub(crate) fn eigendecomposition(m: &Matrix) -> (Vec<Complex64>, Matrix) {
    assert_eq!(m.rows(), m.cols(), "eigendecomposition needs a square matrix");
    let evd = to_faer(m).eigendecomposition::<c64>();
    let s = evd.s().column_vector();
    let values = (0..m.rows())
        .map(|i| {
            let z = s.read(i);
            Complex64::new(z.re, z.im)
        })
        .collect();
    (values, from_faer(evd.u()))
}

/// Solves `a * x = b` for square `a` by partially pivoted LU. The caller is
/// responsible for checking that `a` is far from singular; a singular input
/// yields non-finite entries rather than an error.
pub(crate) fn lu_solve(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.rows(), a.cols(), "lu_solve needs a square matrix");
    assert_eq!(a.rows(), b.rows(), "right-hand side height must match");
    let lu = to_faer(a).partial_piv_lu();
    let x = lu.solve(&to_faer(b));
    from_faer(x.as_ref())
}

/// Determinant of a square matrix by partially pivoted elimination.
///
/// Hand-rolled rather than delegated: an exactly singular matrix (a zero
/// pivot column) must yield an exact `0`, not the NaN that falls out of
/// dividing by a zero pivot, because callers probe determinants that vanish
/// identically.
pub(crate) fn determinant(m: &Matrix) -> Complex64 {
    assert_eq!(m.rows(), m.cols(), "determinant needs a square matrix");
    let n = m.rows();
    let mut rows: Vec<Vec<Complex64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let (pivot_row, pivot_abs) = (k..n)
            .map(|i| (i, rows[i][k].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty pivot range");
        if pivot_abs == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != k {
            rows.swap(pivot_row, k);
            det = -det;
        }
        det *= rows[k][k];
        let (upper, below) = rows.split_at_mut(k + 1);
        let pivot = &upper[k];
        for row in below.iter_mut() {
            let factor = row[k] / pivot[k];
            for (dst, &src) in row[k + 1..].iter_mut().zip(&pivot[k + 1..]) {
                *dst -= factor * src;
            }
        }
    }
    det
}
