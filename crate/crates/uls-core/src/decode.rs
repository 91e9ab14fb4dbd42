//! Enumeration decoding for the observation model `y = T A x`.
//!
//! Given an observation `y`, a known sensing matrix `A`, and a finite list of
//! candidate transforms, the decoder tests each transform `T` in turn: it
//! forms `ỹ = T⁻¹ y` (structured transforms apply their inverse directly,
//! dense ones go through a rank-checked solve) and asks whether `ỹ` lies in
//! the range of `A` by least squares. Every accepted transform contributes a
//! candidate signal `x̂ = A⁺ ỹ`, and the candidate set is then collapsed into
//! a single classification:
//!
//! * `Unique(x̂)` when all candidates agree to within the residual tolerance,
//! * `UpToScale` when all candidates are pairwise proportional but not equal,
//! * `Ambiguous` when at least two candidates are genuinely different
//!   directions, and
//! * `Infeasible` when no transform explains the observation at all.
//!
//! Enumeration is exact with respect to the range-membership criterion, which
//! makes it a ground-truth reference for any faster recovery scheme; the cost
//! is one least-squares solve per transform, so it is intended for modest
//! list sizes (up to roughly `10^4` transforms at small dimensions).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::LstsqFactor;
use crate::matrix::{vec_argmax_abs, vec_norm, vec_scale, vec_sub, Matrix};
use crate::tol::Tolerance;
use crate::transform::{apply_transform, TransformSpec};

/// Relative tolerance used to validate a recorded ground truth against the
/// stored observation: the truth `(k, x*)` must satisfy
/// `‖T_k A x* − y‖ ≤ TRUTH_REL_TOL · ‖y‖`.
pub const TRUTH_REL_TOL: f64 = 1e-10;

/// One sensing problem: a matrix, a finite transform list, an observation,
/// and optionally the ground truth that generated it.
#[derive(Debug, Clone)]
pub struct SensingInstance {
    a: Matrix,
    transforms: Vec<TransformSpec>,
    y: Vec<Complex64>,
    truth: Option<(usize, Vec<Complex64>)>,
}

impl SensingInstance {
    /// Validates dimensions and, when a truth is supplied, that it actually
    /// reproduces the observation.
    ///
    /// Requirements: every transform has size `m = a.rows()`, `y` has length
    /// `m`, and a truth `(k, x*)` has a valid index, `x*` of length
    /// `n = a.cols()`, and `‖T_k A x* − y‖ ≤ TRUTH_REL_TOL · ‖y‖`.
    pub fn new(
        a: Matrix,
        transforms: Vec<TransformSpec>,
        y: Vec<Complex64>,
        truth: Option<(usize, Vec<Complex64>)>,
    ) -> Result<Self> {
        let m = a.rows();
        if y.len() != m {
            return Err(Error::Dimension(format!(
                "observation length {} does not match row count {m}",
                y.len()
            )));
        }
        if !y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Precondition(
                "observation entries must be finite".to_string(),
            ));
        }
        for (k, t) in transforms.iter().enumerate() {
            if t.size() != m {
                return Err(Error::Dimension(format!(
                    "transform {k} has size {} but the sensing matrix has {m} rows",
                    t.size()
                )));
            }
        }
        if let Some((which, x_star)) = &truth {
            let Some(t) = transforms.get(*which) else {
                return Err(Error::Precondition(format!(
                    "truth index {which} is out of range for {} transforms",
                    transforms.len()
                )));
            };
            if x_star.len() != a.cols() {
                return Err(Error::Dimension(format!(
                    "truth signal length {} does not match column count {}",
                    x_star.len(),
                    a.cols()
                )));
            }
            let reproduced = apply_transform(t, &a.matvec(x_star));
            let residual = vec_norm(&vec_sub(&reproduced, &y));
            if residual > TRUTH_REL_TOL * vec_norm(&y) {
                return Err(Error::Precondition(format!(
                    "declared truth does not reproduce the observation \
                     (residual {residual:.3e})"
                )));
            }
        }
        Ok(Self {
            a,
            transforms,
            y,
            truth,
        })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn transforms(&self) -> &[TransformSpec] {
        &self.transforms
    }

    pub fn y(&self) -> &[Complex64] {
        &self.y
    }

    /// The recorded ground truth, if any: the index of the transform that
    /// produced the observation and the signal it was applied to.
    pub fn truth(&self) -> Option<(usize, &[Complex64])> {
        self.truth.as_ref().map(|(k, x)| (*k, x.as_slice()))
    }
}

/// Builds an instance by applying the chosen transform to `A·x` and
/// recording `(which, x)` as ground truth.
pub fn simulate_instance(
    a: Matrix,
    transforms: Vec<TransformSpec>,
    x: &[Complex64],
    which: usize,
) -> Result<SensingInstance> {
    if which >= transforms.len() {
        return Err(Error::Precondition(format!(
            "transform index {which} is out of range for {} transforms",
            transforms.len()
        )));
    }
    if x.len() != a.cols() {
        return Err(Error::Dimension(format!(
            "signal length {} does not match column count {}",
            x.len(),
            a.cols()
        )));
    }
    if transforms[which].size() != a.rows() {
        return Err(Error::Dimension(format!(
            "transform {which} has size {} but the sensing matrix has {} rows",
            transforms[which].size(),
            a.rows()
        )));
    }
    let y = apply_transform(&transforms[which], &a.matvec(x));
    SensingInstance::new(a, transforms, y, Some((which, x.to_vec())))
}

/// Tests whether `y` lies in the range of `B` by least squares.
///
/// Returns `(in_range, z, residual)` where `z` is the minimum-norm least
/// squares solution of `B z ≈ y`, `residual = ‖B z − y‖`, and membership is
/// declared when `residual ≤ residual_tol · ‖y‖`.
pub fn membership_residual(
    y: &[Complex64],
    b: &Matrix,
    tol: &Tolerance,
) -> (bool, Vec<Complex64>, f64) {
    assert_eq!(
        y.len(),
        b.rows(),
        "observation length must match the row count"
    );
    let (z, residual) = LstsqFactor::new(b).solve(y);
    let in_range = residual <= tol.residual_tol * vec_norm(y);
    (in_range, z, residual)
}

/// One accepted transform: the index into the instance's transform list, the
/// recovered signal, and the relative residual `‖A x̂ − T⁻¹y‖ / ‖T⁻¹y‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub index: usize,
    pub x_hat: Vec<Complex64>,
    pub residual: f64,
}

/// The collapsed verdict over the candidate set.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    /// All candidates agree on one signal (up to the residual tolerance).
    Unique(Vec<Complex64>),
    /// All candidates are pairwise proportional but not all equal. The
    /// representative is the largest-norm candidate signal and `ratios`
    /// lists, for each other candidate in index order, the factor `r` with
    /// `representative ≈ r · candidate`.
    UpToScale {
        representative: Vec<Complex64>,
        ratios: Vec<Complex64>,
    },
    /// At least two candidates point in genuinely different directions.
    Ambiguous,
    /// No transform explains the observation.
    Infeasible,
}

/// Full decoder output: the accepted candidates in transform-index order,
/// their collapsed classification, and (when the instance records a truth)
/// whether the true signal or a scale multiple of it appears among the
/// candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub candidates: Vec<Candidate>,
    pub classification: Classification,
    pub truth_recovered: Option<bool>,
}

/// Recovers the signal by enumerating the transform list.
///
/// For each transform `T` the decoder forms `ỹ = T⁻¹ y` and runs the range
/// membership test of [`membership_residual`] against `A` (one shared
/// factorization of `A` serves every transform). Accepted candidates are
/// collapsed per [`Classification`]. A zero observation short-circuits:
/// every transform maps `0` to `0`, so the result is `Unique(0)` with every
/// transform listed as a candidate.
///
/// Membership tests run concurrently; the output is a pure function of the
/// instance and tolerances.
///
/// Errors: `NotInvertible` when some listed transform cannot be inverted.
pub fn decode(instance: &SensingInstance, tol: &Tolerance) -> Result<DecodeResult> {
    let a = instance.a();
    let y = instance.y();
    let n = a.cols();

    if vec_norm(y) == 0.0 {
        let zero = vec![Complex64::new(0.0, 0.0); n];
        let candidates: Vec<Candidate> = (0..instance.transforms().len())
            .map(|index| Candidate {
                index,
                x_hat: zero.clone(),
                residual: 0.0,
            })
            .collect();
        let classification = classify_candidates(&candidates, tol);
        let truth_recovered = instance
            .truth()
            .map(|(_, x_star)| truth_matches(&candidates, x_star, tol));
        return Ok(DecodeResult {
            candidates,
            classification,
            truth_recovered,
        });
    }

    let factor = LstsqFactor::new(a);
    let accepted: Vec<Option<Candidate>> = instance
        .transforms()
        .par_iter()
        .enumerate()
        .map(|(index, t)| -> Result<Option<Candidate>> {
            let y_tilde = t.apply_inverse(y, tol)?;
            let (x_hat, residual) = factor.solve(&y_tilde);
            let scale = vec_norm(&y_tilde);
            if residual <= tol.residual_tol * scale {
                let relative = if scale > 0.0 { residual / scale } else { 0.0 };
                Ok(Some(Candidate {
                    index,
                    x_hat,
                    residual: relative,
                }))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let candidates: Vec<Candidate> = accepted.into_iter().flatten().collect();

    let classification = classify_candidates(&candidates, tol);
    let truth_recovered = instance
        .truth()
        .map(|(_, x_star)| truth_matches(&candidates, x_star, tol));
    Ok(DecodeResult {
        candidates,
        classification,
        truth_recovered,
    })
}

/// Collapses an index-ordered candidate list into a classification.
fn classify_candidates(candidates: &[Candidate], tol: &Tolerance) -> Classification {
    if candidates.is_empty() {
        return Classification::Infeasible;
    }
    let t = tol.residual_tol;
    let all_agree = candidates.iter().enumerate().all(|(i, ci)| {
        candidates[i + 1..]
            .iter()
            .all(|cj| vectors_agree(&ci.x_hat, &cj.x_hat, t))
    });
    if all_agree {
        return Classification::Unique(candidates[0].x_hat.clone());
    }

    // Pick the largest-norm candidate as the proportionality reference;
    // earlier index wins exact ties so the choice is deterministic. Checking
    // every candidate against one nonzero reference is equivalent to the
    // full pairwise check because proportionality through a common nonzero
    // vector is transitive.
    let rep_idx = candidates
        .iter()
        .enumerate()
        .fold(0, |best, (k, c)| {
            if vec_norm(&c.x_hat) > vec_norm(&candidates[best].x_hat) {
                k
            } else {
                best
            }
        });
    let rep = &candidates[rep_idx].x_hat;
    let mut ratios = Vec::new();
    for (k, cand) in candidates.iter().enumerate() {
        if k == rep_idx {
            continue;
        }
        match proportionality_ratio(rep, &cand.x_hat, t) {
            Some(r) => ratios.push(r),
            None => return Classification::Ambiguous,
        }
    }
    Classification::UpToScale {
        representative: rep.clone(),
        ratios,
    }
}

/// Whether the truth signal, or a nonzero scale multiple of it, matches some
/// candidate to within the residual tolerance.
fn truth_matches(candidates: &[Candidate], x_star: &[Complex64], tol: &Tolerance) -> bool {
    let t = tol.residual_tol;
    candidates.iter().any(|c| {
        vectors_agree(&c.x_hat, x_star, t)
            || proportionality_ratio(x_star, &c.x_hat, t).is_some()
    })
}

/// Relative agreement: `‖a − b‖ ≤ tol · max(‖a‖, ‖b‖)`. Two zero vectors
/// agree exactly.
fn vectors_agree(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    vec_norm(&vec_sub(a, b)) <= tol * vec_norm(a).max(vec_norm(b))
}

/// The factor `r` with `reference ≈ r · other`, when one exists.
///
/// The ratio is estimated at the largest-magnitude entry of `reference`
/// (numerically the safest single entry) and then verified against the whole
/// vector. Returns `None` for a zero reference, a vanishing pivot entry in
/// `other`, or when the verification fails.
fn proportionality_ratio(
    reference: &[Complex64],
    other: &[Complex64],
    tol: f64,
) -> Option<Complex64> {
    let p = vec_argmax_abs(reference);
    if reference[p].norm() == 0.0 || other[p].norm() == 0.0 {
        return None;
    }
    let r = reference[p] / other[p];
    let gap = vec_norm(&vec_sub(reference, &vec_scale(other, r)));
    let scale = vec_norm(reference).max(r.norm() * vec_norm(other));
    (gap <= tol * scale).then_some(r)
}
