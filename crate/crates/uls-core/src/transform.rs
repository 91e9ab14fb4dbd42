//! Transform descriptions: permutations, diagonal gains, global scalings,
//! and explicit matrices, plus structure-aware application and relative
//! composition.

use crate::backend;
use crate::error::{Error, Result};
use crate::linalg::numerical_rank;
use crate::matrix::Matrix;
use crate::tol::Tolerance;
use num_complex::Complex64;
use rand::Rng;

/// A permutation of `{0, .., m-1}` in image form: index `i` is sent to
/// position `image[i]`, so the matrix action is `(P v)[image[i]] = v[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// Validates that `image` is a bijection on `{0, .., len-1}`.
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let m = image.len();
        if m == 0 {
            return Err(Error::InvalidTransform(
                "permutation must be nonempty".to_string(),
            ));
        }
        let mut seen = vec![false; m];
        for &target in &image {
            if target >= m {
                return Err(Error::InvalidTransform(format!(
                    "permutation target {target} out of range for size {m}"
                )));
            }
            if seen[target] {
                return Err(Error::InvalidTransform(format!(
                    "permutation target {target} appears twice"
                )));
            }
            seen[target] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(len: usize) -> Self {
        Permutation {
            image: (0..len).collect(),
        }
    }

    /// The cyclic shift sending index `i` to `i + 1` modulo the size.
    pub fn cyclic_shift(len: usize) -> Self {
        Permutation {
            image: (0..len).map(|i| (i + 1) % len).collect(),
        }
    }

    /// Swaps the first two indices, fixing the rest.
    pub fn first_swap(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidTransform(
                "swap needs at least two indices".to_string(),
            ));
        }
        let mut image: Vec<usize> = (0..len).collect();
        image.swap(0, 1);
        Ok(Permutation { image })
    }

    /// Uniformly random permutation (Fisher-Yates on the image).
    pub fn random(rng: &mut impl Rng, len: usize) -> Self {
        let mut image: Vec<usize> = (0..len).collect();
        for i in (1..len).rev() {
            let j = rng.gen_range(0..=i);
            image.swap(i, j);
        }
        Permutation { image }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position that index `i` is sent to.
    pub fn image_of(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.image.len()];
        for (i, &t) in self.image.iter().enumerate() {
            image[t] = i;
        }
        Permutation { image }
    }

    /// Composition "apply `self`, then `then`".
    pub fn then(&self, then: &Permutation) -> Result<Permutation> {
        if self.len() != then.len() {
            return Err(Error::Dimension(format!(
                "cannot compose permutations of sizes {} and {}",
                self.len(),
                then.len()
            )));
        }
        Ok(Permutation {
            image: self.image.iter().map(|&t| then.image[t]).collect(),
        })
    }

    /// Applies the permutation: output position `image[i]` takes input `i`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.len(), "vector length must match");
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (i, &t) in self.image.iter().enumerate() {
            out[t] = v[i];
        }
        out
    }

    /// Applies the inverse permutation.
    pub fn apply_inverse(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.len(), "vector length must match");
        self.image.iter().map(|&t| v[t]).collect()
    }

    /// Permutation matrix with entries at `(image[i], i)`.
    pub fn to_matrix(&self) -> Matrix {
        let m = self.len();
        let mut out = Matrix::zeros(m, m);
        for (i, &t) in self.image.iter().enumerate() {
            out.set(t, i, Complex64::new(1.0, 0.0));
        }
        out
    }

    /// Number of indices moved by the permutation.
    pub fn moved_count(&self) -> usize {
        self.image.iter().enumerate().filter(|(i, &t)| *i != t).count()
    }
}

/// One candidate transform in the observation model `y = T A x`.
///
/// Structured variants admit exact spectra and O(m) application; `Explicit`
/// covers everything else. Use the validating constructors
/// ([`TransformSpec::permutation`], [`TransformSpec::diagonal`],
/// [`TransformSpec::scalar_identity`], [`TransformSpec::explicit`]) rather
/// than building variants by hand.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformSpec {
    /// Arbitrary square matrix (must turn out invertible and diagonalizable
    /// when its spectrum is taken).
    Explicit(Matrix),
    /// Reordering of the measurement channels.
    Permutation(Permutation),
    /// Independent nonzero gain per channel.
    Diagonal(Vec<Complex64>),
    /// Global scaling `factor * I`.
    ScalarIdentity { factor: Complex64, size: usize },
}

impl TransformSpec {
    pub fn explicit(matrix: Matrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::InvalidTransform(format!(
                "explicit transform must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(TransformSpec::Explicit(matrix))
    }

    pub fn permutation(image: Vec<usize>) -> Result<Self> {
        Ok(TransformSpec::Permutation(Permutation::new(image)?))
    }

    pub fn diagonal(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidTransform(
                "diagonal transform must be nonempty".to_string(),
            ));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        for (i, z) in entries.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidTransform(format!(
                    "diagonal entry {i} is not finite"
                )));
            }
            if z.norm() <= 1e-300 * scale.max(1.0) {
                return Err(Error::InvalidTransform(format!(
                    "diagonal entry {i} is zero"
                )));
            }
        }
        Ok(TransformSpec::Diagonal(entries))
    }

    pub fn scalar_identity(factor: Complex64, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidTransform(
                "scalar transform must have positive size".to_string(),
            ));
        }
        if !(factor.re.is_finite() && factor.im.is_finite()) || factor.norm() == 0.0 {
            return Err(Error::InvalidTransform(
                "scalar factor must be finite and nonzero".to_string(),
            ));
        }
        Ok(TransformSpec::ScalarIdentity { factor, size })
    }

    pub fn identity(size: usize) -> Self {
        TransformSpec::ScalarIdentity {
            factor: Complex64::new(1.0, 0.0),
            size,
        }
    }

    /// Side length of the transform.
    pub fn size(&self) -> usize {
        match self {
            TransformSpec::Explicit(m) => m.rows(),
            TransformSpec::Permutation(p) => p.len(),
            TransformSpec::Diagonal(d) => d.len(),
            TransformSpec::ScalarIdentity { size, .. } => *size,
        }
    }

    /// Renders the transform as a dense matrix.
    pub fn to_matrix(&self) -> Matrix {
        match self {
            TransformSpec::Explicit(m) => m.clone(),
            TransformSpec::Permutation(p) => p.to_matrix(),
            TransformSpec::Diagonal(d) => Matrix::diagonal(d),
            TransformSpec::ScalarIdentity { factor, size } => {
                Matrix::identity(*size).scale(*factor)
            }
        }
    }

    /// Frobenius norm of the transform, computed structurally.
    pub fn frobenius_norm(&self) -> f64 {
        match self {
            TransformSpec::Explicit(m) => m.frobenius_norm(),
            TransformSpec::Permutation(p) => (p.len() as f64).sqrt(),
            TransformSpec::Diagonal(d) => {
                d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
            }
            TransformSpec::ScalarIdentity { factor, size } => {
                (*size as f64).sqrt() * factor.norm()
            }
        }
    }

    /// Applies the transform to every column of a matrix with matching
    /// height, i.e. computes `T * a`.
    pub fn apply_matrix(&self, a: &Matrix) -> Matrix {
        assert_eq!(a.rows(), self.size(), "matrix height must match transform");
        let cols: Vec<Vec<Complex64>> = (0..a.cols())
            .map(|j| self.apply(&a.column_vec(j)))
            .collect();
        Matrix::from_fn(a.rows(), a.cols(), |i, j| cols[j][i])
    }

    /// Frobenius distance to the identity matrix, computed structurally.
    pub fn identity_distance(&self) -> f64 {
        match self {
            TransformSpec::Explicit(m) => m.sub(&Matrix::identity(m.rows())).frobenius_norm(),
            TransformSpec::Permutation(p) => (2.0 * p.moved_count() as f64).sqrt(),
            TransformSpec::Diagonal(d) => d
                .iter()
                .map(|z| (z - Complex64::new(1.0, 0.0)).norm_sqr())
                .sum::<f64>()
                .sqrt(),
            TransformSpec::ScalarIdentity { factor, size } => {
                (*size as f64).sqrt() * (factor - Complex64::new(1.0, 0.0)).norm()
            }
        }
    }

    /// Applies the transform to a vector of matching length.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.size(), "vector length must match transform");
        match self {
            TransformSpec::Explicit(m) => m.matvec(v),
            TransformSpec::Permutation(p) => p.apply(v),
            TransformSpec::Diagonal(d) => d.iter().zip(v).map(|(g, x)| g * x).collect(),
            TransformSpec::ScalarIdentity { factor, .. } => {
                v.iter().map(|x| factor * x).collect()
            }
        }
    }

    /// Solves `T w = v` using the structure of the transform.
    pub fn apply_inverse(&self, v: &[Complex64], tol: &Tolerance) -> Result<Vec<Complex64>> {
        assert_eq!(v.len(), self.size(), "vector length must match transform");
        match self {
            TransformSpec::Explicit(m) => {
                let rank = numerical_rank(m, tol);
                if rank < m.rows() {
                    return Err(Error::NotInvertible(format!(
                        "explicit transform has numerical rank {rank} of {}",
                        m.rows()
                    )));
                }
                Ok(backend::lu_solve(m, &Matrix::column(v)?).column_vec(0))
            }
            TransformSpec::Permutation(p) => Ok(p.apply_inverse(v)),
            TransformSpec::Diagonal(d) => {
                let scale = d.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
                d.iter()
                    .zip(v)
                    .enumerate()
                    .map(|(i, (g, x))| {
                        if g.norm() <= tol.rank_tol * scale {
                            Err(Error::NotInvertible(format!(
                                "diagonal entry {i} is numerically zero"
                            )))
                        } else {
                            Ok(x / g)
                        }
                    })
                    .collect()
            }
            TransformSpec::ScalarIdentity { factor, .. } => {
                if factor.norm() == 0.0 {
                    return Err(Error::NotInvertible("scalar factor is zero".to_string()));
                }
                Ok(v.iter().map(|x| x / factor).collect())
            }
        }
    }
}

/// Applies a transform to a vector (free-function form of
/// [`TransformSpec::apply`]).
pub fn apply_transform(t: &TransformSpec, v: &[Complex64]) -> Vec<Complex64> {
    t.apply(v)
}

/// The relative transform `T1^{-1} T2`, preserving structure where the pair
/// allows it (permutation pairs stay permutations, diagonal/scalar pairs
/// stay diagonal or scalar) and falling back to an explicit solve
/// otherwise. Fails with `NotInvertible` if `T1` is numerically singular.
pub fn compose_relative(
    t1: &TransformSpec,
    t2: &TransformSpec,
    tol: &Tolerance,
) -> Result<TransformSpec> {
    use TransformSpec::*;
    if t1.size() != t2.size() {
        return Err(Error::Dimension(format!(
            "transforms have different sizes ({} vs {})",
            t1.size(),
            t2.size()
        )));
    }
    match (t1, t2) {
        (Permutation(p1), Permutation(p2)) => {
            // P1^{-1} P2 sends i to p1^{-1}(p2(i)).
            Ok(Permutation(p2.then(&p1.inverse())?))
        }
        (Diagonal(d1), Diagonal(d2)) => {
            let rel = invert_entrywise(d1, d2, tol)?;
            TransformSpec::diagonal(rel)
        }
        (ScalarIdentity { factor: c1, size }, ScalarIdentity { factor: c2, .. }) => {
            check_scalar_invertible(*c1)?;
            TransformSpec::scalar_identity(c2 / c1, *size)
        }
        (ScalarIdentity { factor: c1, .. }, Diagonal(d2)) => {
            check_scalar_invertible(*c1)?;
            TransformSpec::diagonal(d2.iter().map(|g| g / c1).collect())
        }
        (Diagonal(d1), ScalarIdentity { factor: c2, .. }) => {
            let ones = vec![*c2; d1.len()];
            let rel = invert_entrywise(d1, &ones, tol)?;
            TransformSpec::diagonal(rel)
        }
        (Explicit(m1), _) => {
            let rank = numerical_rank(m1, tol);
            if rank < m1.rows() {
                return Err(Error::NotInvertible(format!(
                    "transform has numerical rank {rank} of {}",
                    m1.rows()
                )));
            }
            TransformSpec::explicit(backend::lu_solve(m1, &t2.to_matrix()))
        }
        (_, _) => {
            // Structured T1 against a mismatched right-hand side: invert
            // column by column, which is exact for permutations and
            // diagonals.
            let m2 = t2.to_matrix();
            let m = t1.size();
            let mut cols = Vec::with_capacity(m);
            for j in 0..m {
                cols.push(t1.apply_inverse(&m2.column_vec(j), tol)?);
            }
            let rel = Matrix::from_fn(m, m, |i, j| cols[j][i]);
            TransformSpec::explicit(rel)
        }
    }
}

/// Enumerates every permutation of `{0, ..., m-1}` (all `m!` of them) in a
/// fixed deterministic order, starting from the identity.
///
/// Useful for exhaustive enumeration over the full symmetric group at small
/// sizes; `m = 8` already produces 40320 permutations, so callers should
/// keep `m` modest.
pub fn all_permutations(m: usize) -> Result<Vec<Permutation>> {
    if m == 0 {
        return Err(Error::InvalidTransform(
            "permutation size must be positive".to_string(),
        ));
    }
    // Heap's algorithm: each step swaps one pair, visiting every arrangement
    // exactly once.
    let mut items: Vec<usize> = (0..m).collect();
    let mut counters = vec![0_usize; m];
    let mut out = Vec::new();
    out.push(Permutation::new(items.clone())?);
    let mut i = 0;
    while i < m {
        if counters[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(counters[i], i);
            }
            out.push(Permutation::new(items.clone())?);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(out)
}

fn invert_entrywise(
    d1: &[Complex64],
    d2: &[Complex64],
    tol: &Tolerance,
) -> Result<Vec<Complex64>> {
    let scale = d1.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    d1.iter()
        .zip(d2)
        .enumerate()
        .map(|(i, (a, b))| {
            if a.norm() <= tol.rank_tol * scale {
                Err(Error::NotInvertible(format!(
                    "diagonal entry {i} is numerically zero"
                )))
            } else {
                Ok(b / a)
            }
        })
        .collect()
}

fn check_scalar_invertible(c: Complex64) -> Result<()> {
    if c.norm() == 0.0 {
        Err(Error::NotInvertible("scalar factor is zero".to_string()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{vec_norm, vec_sub};
    use crate::random::{sample_gaussian_vector, Field};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![1, 2, 0]).is_ok());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3]).is_err());
        assert!(Permutation::new(vec![]).is_err());
    }

    #[test]
    fn permutation_apply_matches_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = Permutation::random(&mut rng, 7);
            let v = sample_gaussian_vector(&mut rng, 7, Field::Complex);
            let by_struct = p.apply(&v);
            let by_matrix = p.to_matrix().matvec(&v);
            assert!(vec_norm(&vec_sub(&by_struct, &by_matrix)) == 0.0);
            let back = p.apply_inverse(&by_struct);
            assert!(vec_norm(&vec_sub(&back, &v)) == 0.0);
        }
    }

    #[test]
    fn permutation_inverse_and_composition() {
        let p = Permutation::new(vec![2, 0, 1, 3]).unwrap();
        let q = p.inverse();
        assert!(p.then(&q).unwrap().is_identity());
        assert!(q.then(&p).unwrap().is_identity());
    }

    #[test]
    fn transform_constructors_validate() {
        assert!(TransformSpec::diagonal(vec![]).is_err());
        assert!(TransformSpec::diagonal(vec![c(1.0, 0.0), c(0.0, 0.0)]).is_err());
        assert!(TransformSpec::scalar_identity(c(0.0, 0.0), 3).is_err());
        assert!(TransformSpec::scalar_identity(c(2.0, 0.0), 0).is_err());
        let rect = Matrix::zeros(2, 3);
        assert!(TransformSpec::explicit(rect).is_err());
    }

    #[test]
    fn apply_and_inverse_round_trip() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let transforms = vec![
            TransformSpec::permutation(vec![3, 1, 0, 2]).unwrap(),
            TransformSpec::diagonal(vec![c(2.0, 0.0), c(0.0, 1.0), c(-1.0, 1.0), c(3.0, 0.0)])
                .unwrap(),
            TransformSpec::scalar_identity(c(0.0, 2.0), 4).unwrap(),
            TransformSpec::explicit(crate::random_gaussian_matrix(4, 4, Field::Complex, 77))
                .unwrap(),
        ];
        for t in &transforms {
            let v = sample_gaussian_vector(&mut rng, 4, Field::Complex);
            let w = t.apply_inverse(&t.apply(&v), &tol).unwrap();
            assert!(vec_norm(&vec_sub(&w, &v)) <= 1e-10 * vec_norm(&v));
            // Structure-aware application agrees with the dense rendering.
            let dense = t.to_matrix().matvec(&v);
            assert!(vec_norm(&vec_sub(&t.apply(&v), &dense)) <= 1e-12 * vec_norm(&dense));
        }
    }

    #[test]
    fn relative_of_permutations_matches_matrix_product() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let p1 = Permutation::random(&mut rng, 6);
            let p2 = Permutation::random(&mut rng, 6);
            let t1 = TransformSpec::Permutation(p1.clone());
            let t2 = TransformSpec::Permutation(p2.clone());
            let rel = compose_relative(&t1, &t2, &tol).unwrap();
            let expected = backend_matrix_relative(&p1.to_matrix(), &p2.to_matrix());
            match rel {
                TransformSpec::Permutation(ref s) => {
                    assert!(s.to_matrix().sub(&expected).frobenius_norm() <= 1e-12);
                }
                other => panic!("expected a permutation, got {other:?}"),
            }
        }
    }

    fn backend_matrix_relative(m1: &Matrix, m2: &Matrix) -> Matrix {
        crate::backend::lu_solve(m1, m2)
    }

    #[test]
    fn relative_of_scalars_and_diagonals() {
        let tol = Tolerance::default();
        let t1 = TransformSpec::scalar_identity(c(2.0, 0.0), 3).unwrap();
        let t2 = TransformSpec::diagonal(vec![c(4.0, 0.0), c(6.0, 0.0), c(2.0, 0.0)]).unwrap();
        match compose_relative(&t1, &t2, &tol).unwrap() {
            TransformSpec::Diagonal(d) => {
                assert!((d[0] - c(2.0, 0.0)).norm() < 1e-15);
                assert!((d[1] - c(3.0, 0.0)).norm() < 1e-15);
                assert!((d[2] - c(1.0, 0.0)).norm() < 1e-15);
            }
            other => panic!("expected diagonal, got {other:?}"),
        }
        let s1 = TransformSpec::scalar_identity(c(2.0, 0.0), 3).unwrap();
        let s2 = TransformSpec::scalar_identity(c(1.0, 0.0), 3).unwrap();
        match compose_relative(&s1, &s2, &tol).unwrap() {
            TransformSpec::ScalarIdentity { factor, .. } => {
                assert!((factor - c(0.5, 0.0)).norm() < 1e-15);
            }
            other => panic!("expected scalar, got {other:?}"),
        }
    }

    #[test]
    fn relative_mixed_kinds_match_dense_solve(){
        let tol = Tolerance::default();
        let p = TransformSpec::permutation(vec![1, 2, 0]).unwrap();
        let d = TransformSpec::diagonal(vec![c(2.0, 0.0), c(0.0, 1.0), c(1.0, -1.0)]).unwrap();
        let rel = compose_relative(&p, &d, &tol).unwrap();
        let dense = backend_matrix_relative(&p.to_matrix(), &d.to_matrix());
        assert!(rel.to_matrix().sub(&dense).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn relative_rejects_singular_t1() {
        let tol = Tolerance::default();
        let singular = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let t1 = TransformSpec::explicit(singular).unwrap();
        let t2 = TransformSpec::identity(2);
        assert!(matches!(
            compose_relative(&t1, &t2, &tol),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn identity_distance_structural_matches_dense() {
        let specs = vec![
            TransformSpec::permutation(vec![1, 0, 2, 3]).unwrap(),
            TransformSpec::diagonal(vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.5), c(1.0, 0.0)])
                .unwrap(),
            TransformSpec::scalar_identity(c(2.0, 0.0), 4).unwrap(),
            TransformSpec::identity(4),
        ];
        for t in &specs {
            let dense = t.to_matrix().sub(&Matrix::identity(4)).frobenius_norm();
            assert!((t.identity_distance() - dense).abs() <= 1e-12);
        }
    }

    #[test]
    fn all_permutations_enumerates_the_symmetric_group() {
        let perms = all_permutations(4).unwrap();
        assert_eq!(perms.len(), 24);
        assert!(perms[0].is_identity());
        let mut images: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| (0..p.len()).map(|i| p.image_of(i)).collect())
            .collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 24);
        assert!(all_permutations(0).is_err());
        assert_eq!(all_permutations(1).unwrap().len(), 1);
    }
}
