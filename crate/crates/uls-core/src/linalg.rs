//! Rank-revealing primitives: reduced row echelon form, cokernel bases,
//! least squares, numerical rank, and subspace intersection dimension.

use crate::backend;
use crate::error::{Error, Result};
use crate::matrix::{vec_norm, vec_sub, Matrix};
use crate::tol::Tolerance;
use num_complex::Complex64;

/// Numerical rank: the number of singular values exceeding
/// `rank_tol * sigma_max`.
pub fn numerical_rank(m: &Matrix, tol: &Tolerance) -> usize {
    let s = backend::singular_values(m);
    let cutoff = tol.rank_tol * s[0];
    s.iter().filter(|&&sigma| sigma > cutoff).count()
}

/// Reduced row echelon form with partial pivoting.
///
/// Returns `(R, pivots)` where `pivots` lists the pivot column of each
/// leading row in order. Pivot entries are exactly 1 and the rest of each
/// pivot column exactly 0. Entries are treated as zero below
/// `rank_tol * max_abs(M)`; rows left without a pivot are cleaned to exact
/// zeros at that threshold, which makes the operation idempotent.
pub fn rref_with_pivots(m: &Matrix, tol: &Tolerance) -> (Matrix, Vec<usize>) {
    let rows = m.rows();
    let cols = m.cols();
    let threshold = tol.rank_tol * m.max_abs();
    let mut r = m.clone();
    let mut pivots = Vec::new();
    let mut lead = 0;

    for col in 0..cols {
        if lead == rows {
            break;
        }
        let mut best = lead;
        let mut best_abs = r.get(lead, col).norm();
        for i in lead + 1..rows {
            let a = r.get(i, col).norm();
            if a > best_abs {
                best = i;
                best_abs = a;
            }
        }
        if best_abs <= threshold {
            continue;
        }
        if best != lead {
            for j in 0..cols {
                let tmp = r.get(lead, j);
                r.set(lead, j, r.get(best, j));
                r.set(best, j, tmp);
            }
        }
        let pivot = r.get(lead, col);
        for j in 0..cols {
            r.set(lead, j, r.get(lead, j) / pivot);
        }
        r.set(lead, col, Complex64::new(1.0, 0.0));
        for i in 0..rows {
            if i == lead {
                continue;
            }
            let factor = r.get(i, col);
            if factor.norm() == 0.0 {
                continue;
            }
            for j in 0..cols {
                let v = r.get(i, j) - factor * r.get(lead, j);
                r.set(i, j, v);
            }
            r.set(i, col, Complex64::new(0.0, 0.0));
        }
        pivots.push(col);
        lead += 1;
    }

    for i in lead..rows {
        for j in 0..cols {
            if r.get(i, j).norm() <= threshold {
                r.set(i, j, Complex64::new(0.0, 0.0));
            }
        }
    }
    (r, pivots)
}

/// Orthonormal basis for the left null space of `b` (an `m x n` matrix with
/// `m > n`), returned as a `(m - rank) x m` matrix `Q` with `Q b = 0`.
///
/// The rows are built from the reduced row echelon form of `b*` (for a
/// full-column-rank `b` with generic leading rows this realizes the
/// `[S*; -I]` shape column by column) and then orthonormalized.
pub fn cokernel_basis(b: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    let m = b.rows();
    let n = b.cols();
    if m <= n {
        return Err(Error::Dimension(format!(
            "cokernel basis needs a tall matrix, got {m}x{n}"
        )));
    }
    let (r, pivots) = rref_with_pivots(&b.adjoint(), tol);
    let rank = pivots.len();
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();

    // Null vectors of b*: one per free column, unit there, minus the rref
    // column on the pivot coordinates. Rows of Q are their conjugates.
    let mut q = Matrix::zeros(m - rank, m);
    for (k, &f) in free.iter().enumerate() {
        q.set(k, f, Complex64::new(1.0, 0.0));
        for (i, &p) in pivots.iter().enumerate() {
            q.set(k, p, -r.get(i, f).conj());
        }
    }
    orthonormalize_rows(&mut q)?;
    Ok(q)
}

fn orthonormalize_rows(q: &mut Matrix) -> Result<()> {
    let rows = q.rows();
    let cols = q.cols();
    for i in 0..rows {
        for _ in 0..2 {
            for k in 0..i {
                let mut proj = Complex64::new(0.0, 0.0);
                for j in 0..cols {
                    proj += q.get(k, j).conj() * q.get(i, j);
                }
                for j in 0..cols {
                    let v = q.get(i, j) - proj * q.get(k, j);
                    q.set(i, j, v);
                }
            }
        }
        let norm = (0..cols).map(|j| q.get(i, j).norm_sqr()).sum::<f64>().sqrt();
        if norm <= f64::EPSILON * cols as f64 {
            return Err(Error::Numerical(
                "null space vectors are numerically dependent".to_string(),
            ));
        }
        for j in 0..cols {
            let v = q.get(i, j) / norm;
            q.set(i, j, v);
        }
    }
    Ok(())
}

/// Precomputed thin SVD of a matrix, reusable for many least-squares solves
/// against the same design matrix. `solve` reproduces
/// [`least_squares_solve`] exactly.
pub(crate) struct LstsqFactor {
    b: Matrix,
    u: Matrix,
    s: Vec<f64>,
    v: Matrix,
    cutoff: f64,
}

impl LstsqFactor {
    pub(crate) fn new(b: &Matrix) -> Self {
        let (u, s, v) = backend::svd_thin(b);
        // Conventional pseudoinverse truncation at machine precision; the
        // operation takes no Tolerance, and generic full-rank systems are
        // insensitive to the cutoff.
        let cutoff = f64::EPSILON * b.rows().max(b.cols()) as f64 * s[0];
        LstsqFactor {
            b: b.clone(),
            u,
            s,
            v,
            cutoff,
        }
    }

    pub(crate) fn solve(&self, y: &[Complex64]) -> (Vec<Complex64>, f64) {
        assert_eq!(self.b.rows(), y.len(), "vector length must match row count");
        let n = self.b.cols();
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for (i, &sigma) in self.s.iter().enumerate() {
            if sigma <= self.cutoff {
                continue;
            }
            let mut coeff = Complex64::new(0.0, 0.0);
            for (row, yr) in y.iter().enumerate() {
                coeff += self.u.get(row, i).conj() * yr;
            }
            coeff /= sigma;
            for (j, zj) in z.iter_mut().enumerate() {
                *zj += coeff * self.v.get(j, i);
            }
        }
        let residual = vec_norm(&vec_sub(&self.b.matvec(&z), y));
        (z, residual)
    }
}

/// Minimum-norm least-squares solution of `b z ~ y`.
///
/// Returns the minimizer and the Euclidean residual `|b z - y|`. For
/// rank-deficient `b` the minimum-norm minimizer is returned (truncated-SVD
/// pseudoinverse).
pub fn least_squares_solve(b: &Matrix, y: &[Complex64]) -> (Vec<Complex64>, f64) {
    LstsqFactor::new(b).solve(y)
}

/// Dimension of the intersection of the column spans of `u` and `v` via the
/// rank identity `dim = rank(u) + rank(v) - rank([u | v])`.
///
/// Both inputs must have full column rank at the given tolerance.
pub fn subspace_intersection_dim(u: &Matrix, v: &Matrix, tol: &Tolerance) -> Result<usize> {
    if u.rows() != v.rows() {
        return Err(Error::Dimension(format!(
            "subspaces live in different ambient dimensions ({} vs {})",
            u.rows(),
            v.rows()
        )));
    }
    let ru = numerical_rank(u, tol);
    if ru < u.cols() {
        return Err(Error::RankDeficient {
            rank: ru,
            expected: u.cols(),
        });
    }
    let rv = numerical_rank(v, tol);
    if rv < v.cols() {
        return Err(Error::RankDeficient {
            rank: rv,
            expected: v.cols(),
        });
    }
    let joint = numerical_rank(&u.hstack(v), tol);
    Ok((ru + rv).saturating_sub(joint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_gaussian_matrix, Field};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_of_diagonal_with_small_entry() {
        let tol = Tolerance::default();
        let m = Matrix::diagonal(&[c(1.0, 0.0), c(1e-14, 0.0), c(2.0, 0.0)]);
        assert_eq!(numerical_rank(&m, &tol), 2);
        assert_eq!(numerical_rank(&Matrix::identity(4), &tol), 4);
        assert_eq!(numerical_rank(&Matrix::zeros(3, 3), &tol), 0);
    }

    #[test]
    fn rref_of_full_column_rank_stack() {
        let tol = Tolerance::default();
        let m = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let (r, pivots) = rref_with_pivots(&m, &tol);
        assert_eq!(pivots, vec![0, 1]);
        assert!(r.block(0, 0, 2, 2).sub(&Matrix::identity(2)).frobenius_norm() == 0.0);
        assert!(r.block(2, 0, 2, 2).frobenius_norm() == 0.0);
        // Row span is preserved: stacking R on M stays rank 2.
        assert_eq!(numerical_rank(&r.vstack(&m), &tol), 2);
    }

    #[test]
    fn rref_pivot_columns_are_exact_units() {
        let tol = Tolerance::default();
        let m = random_gaussian_matrix(5, 8, Field::Complex, 11);
        let (r, pivots) = rref_with_pivots(&m, &tol);
        for (i, &p) in pivots.iter().enumerate() {
            for row in 0..r.rows() {
                let expect = if row == i { 1.0 } else { 0.0 };
                assert_eq!(r.get(row, p), c(expect, 0.0));
            }
        }
    }

    #[test]
    fn cokernel_annihilates_and_has_full_rank() {
        let tol = Tolerance::default();
        for seed in 0..20 {
            let b = random_gaussian_matrix(6, 3, Field::Complex, seed);
            let q = cokernel_basis(&b, &tol).unwrap();
            assert_eq!((q.rows(), q.cols()), (3, 6));
            assert!(q.mul(&b).frobenius_norm() <= 1e-10 * b.frobenius_norm());
            assert_eq!(numerical_rank(&q, &tol), 3);
            // Rows came out orthonormal.
            let gram = q.mul(&q.adjoint());
            assert!(gram.sub(&Matrix::identity(3)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn cokernel_rejects_wide_input() {
        let tol = Tolerance::default();
        let b = random_gaussian_matrix(3, 3, Field::Complex, 0);
        assert!(matches!(
            cokernel_basis(&b, &tol),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn least_squares_recovers_consistent_system() {
        for seed in 0..20 {
            let b = random_gaussian_matrix(6, 3, Field::Complex, seed);
            let x = random_gaussian_matrix(3, 1, Field::Complex, seed + 1000).column_vec(0);
            let y = b.matvec(&x);
            let (z, residual) = least_squares_solve(&b, &y);
            assert!(vec_norm(&vec_sub(&z, &x)) <= 1e-10 * vec_norm(&x));
            assert!(residual <= 1e-10 * vec_norm(&y));
        }
    }

    #[test]
    fn least_squares_on_orthogonal_target() {
        // b spans e0; y = e1 is orthogonal to the span.
        let b = Matrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]]).unwrap();
        let y = [c(0.0, 0.0), c(1.0, 0.0)];
        let (z, residual) = least_squares_solve(&b, &y);
        assert!(vec_norm(&z) <= 1e-15);
        assert!((residual - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn least_squares_min_norm_on_rank_deficient() {
        // Two identical columns: minimizers form a line; the min-norm one
        // splits the coefficient evenly.
        let b = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let y = [c(2.0, 0.0), c(2.0, 0.0)];
        let (z, residual) = least_squares_solve(&b, &y);
        assert!(residual <= 1e-12);
        assert!((z[0] - c(1.0, 0.0)).norm() <= 1e-12);
        assert!((z[1] - c(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn intersection_dim_of_planes_in_c3() {
        let tol = Tolerance::default();
        // Two random 2-dimensional subspaces of C^3 meet along a line.
        for seed in 0..20 {
            let u = random_gaussian_matrix(3, 2, Field::Complex, seed);
            let v = random_gaussian_matrix(3, 2, Field::Complex, seed + 500);
            assert_eq!(subspace_intersection_dim(&u, &v, &tol).unwrap(), 1);
        }
    }

    #[test]
    fn intersection_dim_rejects_rank_deficient_input() {
        let tol = Tolerance::default();
        let u = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
            vec![c(3.0, 0.0), c(6.0, 0.0)],
        ])
        .unwrap();
        let v = random_gaussian_matrix(3, 2, Field::Complex, 3);
        assert!(matches!(
            subspace_intersection_dim(&u, &v, &tol),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }
}
