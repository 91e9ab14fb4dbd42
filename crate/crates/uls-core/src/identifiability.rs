//! Identifiability verdicts for transform pairs and sets, the determinant
//! probe separating identifiable from scale-ambiguous geometries, and
//! explicit non-identifiability witnesses for the undersampled regime.
//!
//! The driving quantity for a pair `(T1, T2)` is the dominant eigenvalue
//! pair `(lambda, p)` of the relative transform `T1^{-1} T2` measured
//! against the margin `m - n`:
//!
//! * every eigenspace within the margin: recovery is exact;
//! * a dominant eigenspace above the margin with `lambda = 1`: still exact;
//! * a dominant eigenspace above the margin with `lambda != 1`: recovery
//!   only up to the global factor `lambda`;
//! * undersampled (`m < 2n`) with all eigenspaces within the margin:
//!   colliding signal pairs exist, so the pair is not identifiable.

use crate::backend;
use crate::error::{Error, Result};
use crate::linalg::{
    least_squares_solve, numerical_rank, rref_with_pivots,
};
use crate::matrix::{vec_norm, vec_sub, Matrix};
use crate::spectrum::{eigenstructure, EigenCluster, EigenStructure, CLUSTER_REL_TOL};
use crate::tol::Tolerance;
use crate::transform::{compose_relative, TransformSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Relative-transform distance (per unit size) below which a pair counts as
/// identical and classifies as Unique outright.
pub const IDENTITY_REL_TOL: f64 = 1e-10;

/// Verdict category for a single transform pair.
#[derive(Debug, Clone, PartialEq)]
pub enum PairCategory {
    /// Every signal is recovered exactly.
    Unique,
    /// Signals are recovered up to the contained global scale factor.
    UpToScale(Complex64),
    /// Distinct signal pairs can produce the same observation.
    NotIdentifiable,
}

/// Classification of one ordered transform pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairVerdict {
    pub category: PairCategory,
    /// Dominant eigenvalue and eigenspace dimension of the relative
    /// transform.
    pub dominant: (Complex64, usize),
    /// The comparison margin `m - n`.
    pub margin: usize,
    /// Every cluster whose eigenspace exceeds the margin (informational;
    /// more than one is only possible when `m < 2n`).
    pub oversized: Vec<EigenCluster>,
}

/// Verdict category for a whole transform set.
#[derive(Debug, Clone, PartialEq)]
pub enum SetCategory {
    Unique,
    /// The possible global scale factors, both orientations included,
    /// deduplicated and sorted by real then imaginary part.
    UpToScale(Vec<Complex64>),
    MixedOrNotIdentifiable,
}

/// Classification of a transform set with the per-pair evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct SetVerdict {
    pub category: SetCategory,
    pub per_pair: BTreeMap<(usize, usize), PairVerdict>,
}

/// An explicit collision in the undersampled regime: a unit observation `s`
/// reachable as `T1 A x` and as `T2 A z` with `x` far from `z`.
#[derive(Debug, Clone)]
pub struct ConverseWitness {
    pub s: Vec<Complex64>,
    pub x: Vec<Complex64>,
    pub z: Vec<Complex64>,
    /// Residuals of `T1 A x - s` and `T2 A z - s`.
    pub residuals: (f64, f64),
    /// `|x - z| / max(|x|, |z|)`.
    pub separation: f64,
}

/// Classifies the pair `(T1, T2)` for an `m x n` sensing geometry.
pub fn classify_pair(
    t1: &TransformSpec,
    t2: &TransformSpec,
    n: usize,
    tol: &Tolerance,
) -> Result<PairVerdict> {
    let m = t1.size();
    if t2.size() != m {
        return Err(Error::Dimension(format!(
            "transforms have different sizes ({m} vs {})",
            t2.size()
        )));
    }
    if n == 0 || n > m {
        return Err(Error::Precondition(format!(
            "signal dimension n={n} must satisfy 1 <= n <= m={m}"
        )));
    }
    let margin = m - n;
    let rel = compose_relative(t1, t2, tol)?;

    if rel.identity_distance() <= IDENTITY_REL_TOL * m as f64 {
        let dominant = (Complex64::new(1.0, 0.0), m);
        let oversized = if m > margin {
            vec![EigenCluster {
                value: dominant.0,
                multiplicity: m,
            }]
        } else {
            vec![]
        };
        return Ok(PairVerdict {
            category: PairCategory::Unique,
            dominant,
            margin,
            oversized,
        });
    }

    let spectrum = eigenstructure(&rel, tol)?;
    let (lambda, p) = spectrum.dominant();
    let oversized: Vec<EigenCluster> = spectrum
        .clusters()
        .iter()
        .filter(|c| c.multiplicity > margin)
        .copied()
        .collect();
    let one_threshold = CLUSTER_REL_TOL * rel.frobenius_norm();
    let lambda_is_one = (lambda - Complex64::new(1.0, 0.0)).norm() <= one_threshold;

    let category = if p <= margin {
        if m >= 2 * n {
            PairCategory::Unique
        } else {
            PairCategory::NotIdentifiable
        }
    } else if lambda_is_one {
        PairCategory::Unique
    } else {
        PairCategory::UpToScale(lambda)
    };

    Ok(PairVerdict {
        category,
        dominant: (lambda, p),
        margin,
        oversized,
    })
}

/// Certifies a whole transform set by classifying every unordered pair.
///
/// Any NotIdentifiable pair makes the set MixedOrNotIdentifiable, as does
/// any undersampled pair (`m < 2n`) whose dominant eigenspace exceeds the
/// margin: the supporting theory is stated for `m >= 2n`, so the
/// certificate refuses to promise scale recovery in that regime rather
/// than extrapolate. Otherwise any UpToScale pair makes the set UpToScale,
/// with the scale set collecting every pair's factor and its reciprocal;
/// otherwise the set is Unique (a singleton set vacuously so). Pairs are
/// evaluated concurrently; the result does not depend on the schedule.
pub fn certify_set(
    transforms: &[TransformSpec],
    n: usize,
    tol: &Tolerance,
) -> Result<SetVerdict> {
    if transforms.is_empty() {
        return Err(Error::Precondition(
            "transform set must be nonempty".to_string(),
        ));
    }
    let m = transforms[0].size();
    if transforms.iter().any(|t| t.size() != m) {
        return Err(Error::Dimension(
            "all transforms in a set must share one size".to_string(),
        ));
    }
    if n == 0 || n > m {
        return Err(Error::Precondition(format!(
            "signal dimension n={n} must satisfy 1 <= n <= m={m}"
        )));
    }

    let index_pairs: Vec<(usize, usize)> = (0..transforms.len())
        .flat_map(|i| (i + 1..transforms.len()).map(move |j| (i, j)))
        .collect();
    let classified: Vec<((usize, usize), PairVerdict)> = index_pairs
        .par_iter()
        .map(|&(i, j)| {
            classify_pair(&transforms[i], &transforms[j], n, tol).map(|v| ((i, j), v))
        })
        .collect::<Result<_>>()?;
    let per_pair: BTreeMap<(usize, usize), PairVerdict> = classified.into_iter().collect();

    let undersampled = m < 2 * n;
    let any_not_identifiable = per_pair.values().any(|v| {
        v.category == PairCategory::NotIdentifiable
            || (undersampled && v.dominant.1 > v.margin)
    });
    let category = if any_not_identifiable {
        SetCategory::MixedOrNotIdentifiable
    } else {
        let mut scales = Vec::new();
        for v in per_pair.values() {
            if let PairCategory::UpToScale(lambda) = v.category {
                scales.push(lambda);
                scales.push(Complex64::new(1.0, 0.0) / lambda);
            }
        }
        if scales.is_empty() {
            SetCategory::Unique
        } else {
            SetCategory::UpToScale(dedup_scales(scales))
        }
    };

    Ok(SetVerdict { category, per_pair })
}

fn dedup_scales(mut scales: Vec<Complex64>) -> Vec<Complex64> {
    scales.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out: Vec<Complex64> = Vec::with_capacity(scales.len());
    for z in scales {
        let dup = out
            .iter()
            .any(|w| (z - w).norm() <= 1e-10 * z.norm().max(1.0));
        if !dup {
            out.push(z);
        }
    }
    out
}

/// The determinant probe for a single transform at an `m >= 2n` geometry.
///
/// Writing `A` in the eigenbasis of `T` (`Atilde = Phi^{-1} A`), the
/// reduced row echelon form of `Atilde*` is `[I | S*]`; the probe is the
/// determinant of `Stop L1 - L2 Stop`, where `Stop` is the leading
/// `n x n` block of `S` and `L1`, `L2` hold the first and next `n`
/// eigenvalues in cluster order. The determinant vanishes identically over
/// `A` exactly for scale-ambiguous transforms and is generically nonzero
/// otherwise.
pub fn determinant_probe(
    a: &Matrix,
    t: &TransformSpec,
    tol: &Tolerance,
) -> Result<Complex64> {
    let m = t.size();
    let n = a.cols();
    if a.rows() != m {
        return Err(Error::Dimension(format!(
            "sensing matrix has {} rows, transform expects {m}",
            a.rows()
        )));
    }
    if m < 2 * n {
        return Err(Error::Dimension(format!(
            "determinant probe needs m >= 2n, got m={m}, n={n}"
        )));
    }
    let rank_a = numerical_rank(a, tol);
    if rank_a < n {
        return Err(Error::RankDeficient {
            rank: rank_a,
            expected: n,
        });
    }

    let spectrum = eigenstructure(t, tol)?;
    let a_tilde = backend::lu_solve(spectrum.basis(), a);
    let rank_tilde = numerical_rank(&a_tilde, tol);
    if rank_tilde < n {
        return Err(Error::RankDeficient {
            rank: rank_tilde,
            expected: n,
        });
    }

    let (r, pivots) = rref_with_pivots(&a_tilde.adjoint(), tol);
    if pivots != (0..n).collect::<Vec<_>>() {
        return Err(Error::Numerical(
            "leading minor of the eigenbasis coordinates is degenerate".to_string(),
        ));
    }
    let s = r.block(0, n, n, m - n).adjoint();
    let s_top = s.block(0, 0, n, n);

    let flat = spectrum.flat_values();
    let head = Matrix::diagonal(&flat[..n]);
    let tail = Matrix::diagonal(&flat[n..2 * n]);
    let probe = s_top.mul(&head).sub(&tail.mul(&s_top));
    Ok(backend::determinant(&probe))
}

/// Builds an explicit collision witness in the undersampled regime
/// `n <= m < 2n`, provided every eigenspace of the relative transform stays
/// within the margin `m - n`.
///
/// The ranges of `T1 A` and `T2 A` then still intersect (dimension at least
/// `2n - m`), and because no eigenspace is large enough to force agreement,
/// the two preimages of a shared direction are genuinely different signals.
pub fn converse_witness(
    a: &Matrix,
    t1: &TransformSpec,
    t2: &TransformSpec,
    tol: &Tolerance,
) -> Result<ConverseWitness> {
    let m = t1.size();
    let n = a.cols();
    if t2.size() != m || a.rows() != m {
        return Err(Error::Dimension(
            "sensing matrix and transforms must share the measurement size".to_string(),
        ));
    }
    if !(n <= m && m < 2 * n) {
        return Err(Error::Precondition(format!(
            "witness construction needs n <= m < 2n, got m={m}, n={n}"
        )));
    }
    let rel = compose_relative(t1, t2, tol)?;
    let spectrum = eigenstructure(&rel, tol)?;
    let p = spectrum.max_multiplicity();
    if p > m - n {
        return Err(Error::Precondition(format!(
            "an eigenspace of the relative transform has dimension {p} > m - n = {}",
            m - n
        )));
    }

    let b1 = t1.apply_matrix(a);
    let b2 = t2.apply_matrix(a);
    for b in [&b1, &b2] {
        let rank = numerical_rank(b, tol);
        if rank < n {
            return Err(Error::Numerical(format!(
                "sensing matrix lost column rank ({rank} of {n}) under a transform"
            )));
        }
    }

    let stacked = b1.hstack(&b2.scale(Complex64::new(-1.0, 0.0)));
    let (_, sigma, v) = backend::svd_full(&stacked);
    let cutoff = tol.rank_tol * sigma[0];

    // Null directions of [B1 | -B2], deepest first: structural zeros
    // (indices past min(m, 2n)) and then any singular value under the
    // cutoff, in ascending order.
    let mut candidates: Vec<usize> = (sigma.len()..2 * n).rev().collect();
    candidates.extend(
        (0..sigma.len())
            .rev()
            .take_while(|&j| sigma[j] <= cutoff),
    );

    for j in candidates {
        let direction = v.column_vec(j);
        let u = &direction[..n];
        let s_raw = b1.matvec(u);
        let s_norm = vec_norm(&s_raw);
        if s_norm <= 1e3 * f64::EPSILON * sigma[0] {
            continue;
        }
        let s: Vec<Complex64> = s_raw.iter().map(|z| z / s_norm).collect();
        let (x, r1) = least_squares_solve(&b1, &s);
        let (z, r2) = least_squares_solve(&b2, &s);
        if r1 > tol.residual_tol || r2 > tol.residual_tol {
            continue;
        }
        let separation = vec_norm(&vec_sub(&x, &z)) / vec_norm(&x).max(vec_norm(&z));
        if separation <= tol.residual_tol {
            continue;
        }
        return Ok(ConverseWitness {
            s,
            x,
            z,
            residuals: (r1, r2),
            separation,
        });
    }
    Err(Error::Numerical(
        "no intersection direction produced a separated witness".to_string(),
    ))
}

/// Predicted dimension of `range(A) ∩ (eigenspace of lambda)` sliced
/// through `range(A)` for a generic `m x n` sensing matrix: each cluster of
/// multiplicity `p` contributes `max(0, n + p - m)`.
pub fn predicted_intersection(n: usize, spectrum: &EigenStructure) -> Vec<(Complex64, usize)> {
    let m = spectrum.size();
    assert!(n >= 1 && n <= m, "signal dimension must satisfy 1 <= n <= m");
    spectrum
        .clusters()
        .iter()
        .map(|c| (c.value, (n + c.multiplicity).saturating_sub(m)))
        .collect()
}
