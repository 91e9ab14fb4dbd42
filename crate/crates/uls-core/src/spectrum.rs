//! Eigenstructure of transforms: clustered spectra with eigenbases, exact
//! permutation spectra via cycle decompositions, and the dominant-eigenvalue
//! rule that drives identifiability verdicts.

use crate::backend;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tol::Tolerance;
use crate::transform::{Permutation, TransformSpec};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Relative threshold for merging nearby eigenvalues into one cluster and
/// for testing whether an eigenvalue equals 1. Scaled by the Frobenius norm
/// of the transform. Eigenvalues of a diagonalizable matrix that differ by
/// less than this are reported as one eigenspace.
pub const CLUSTER_REL_TOL: f64 = 1e-7;

/// Relative bound on the eigen-residual `|T phi - lambda phi|` accepted from
/// the dense solver, before clustering perturbs the values.
pub const EIGEN_RESIDUAL_REL_TOL: f64 = 1e-8;

/// One eigenvalue cluster: a representative value and the dimension of the
/// associated (numerical) eigenspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCluster {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Clustered spectrum of a transform together with an eigenvector basis.
///
/// Clusters are ordered dominant-first: the dominant cluster has maximal
/// multiplicity, with ties resolved in favor of eigenvalue 1, then smallest
/// modulus, then smallest phase in `[0, 2pi)`. Remaining clusters sort by
/// multiplicity descending, then modulus, then phase, so the order is
/// deterministic. Basis columns are grouped cluster by cluster in the same
/// order.
#[derive(Debug, Clone)]
pub struct EigenStructure {
    clusters: Vec<EigenCluster>,
    basis: Matrix,
}

impl EigenStructure {
    fn new(clusters: Vec<EigenCluster>, basis: Matrix) -> Self {
        let total: usize = clusters.iter().map(|c| c.multiplicity).sum();
        assert_eq!(total, basis.rows(), "multiplicities must sum to the size");
        assert_eq!(basis.rows(), basis.cols(), "basis must be square");
        EigenStructure { clusters, basis }
    }

    /// Side length of the underlying transform.
    pub fn size(&self) -> usize {
        self.basis.rows()
    }

    /// Clusters in dominant-first order.
    pub fn clusters(&self) -> &[EigenCluster] {
        &self.clusters
    }

    /// Eigenvector basis; column blocks follow the cluster order.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Eigenvalues expanded to length `size`, cluster by cluster.
    pub fn flat_values(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.size());
        for c in &self.clusters {
            for _ in 0..c.multiplicity {
                out.push(c.value);
            }
        }
        out
    }

    /// Basis columns of cluster `k` as an `m x multiplicity` matrix.
    pub fn cluster_basis(&self, k: usize) -> Matrix {
        let start: usize = self.clusters[..k].iter().map(|c| c.multiplicity).sum();
        self.basis
            .block(0, start, self.size(), self.clusters[k].multiplicity)
    }

    /// The dominant eigenvalue and its multiplicity.
    pub fn dominant(&self) -> (Complex64, usize) {
        let c = self.clusters[0];
        (c.value, c.multiplicity)
    }

    /// Largest eigenspace dimension.
    pub fn max_multiplicity(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).max().unwrap()
    }
}

/// Dominant eigenvalue of a spectrum (free-function form of
/// [`EigenStructure::dominant`]).
pub fn dominant_eigenvalue(e: &EigenStructure) -> (Complex64, usize) {
    e.dominant()
}

/// Cycle decomposition of a permutation in canonical form: every cycle
/// starts at its smallest element, cycles are ordered by that element, and
/// fixed points appear as length-1 cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(|c| c.len()).collect()
    }
}

/// Decomposes a permutation into cycles by following images from each
/// smallest unvisited index.
pub fn permutation_cycles(p: &Permutation) -> CycleDecomposition {
    let m = p.len();
    let mut visited = vec![false; m];
    let mut cycles = Vec::new();
    for start in 0..m {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut current = start;
        while !visited[current] {
            visited[current] = true;
            cycle.push(current);
            current = p.image_of(current);
        }
        cycles.push(cycle);
    }
    CycleDecomposition { cycles }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact spectrum of a permutation.
///
/// Each cycle of length `l` contributes the `l`-th roots of unity; roots are
/// grouped across cycles by their reduced fraction `p/l`, so multiplicities
/// are exact integers. Eigenvalue 1 appears once per cycle, and no other
/// root can appear more often, so the dominant pair is always
/// `(1, cycle count)`. The basis is unitary: each root gets the matching
/// discrete Fourier vector supported on its cycle.
/// Roots of unity keyed by reduced fraction `(num, den)`, each holding the
/// `(cycle index, exponent)` pairs that contribute the root.
type RootGroups = Vec<((usize, usize), Vec<(usize, usize)>)>;

pub fn permutation_spectrum(p: &Permutation) -> EigenStructure {
    let m = p.len();
    let decomposition = permutation_cycles(p);

    // Group roots of unity by reduced fraction (num, den).
    let mut groups: RootGroups = Vec::new();
    for (cycle_index, cycle) in decomposition.cycles().iter().enumerate() {
        let len = cycle.len();
        for k in 0..len {
            let g = gcd(k, len);
            let frac = (k / g, len / g);
            match groups.iter_mut().find(|(f, _)| *f == frac) {
                Some((_, members)) => members.push((cycle_index, k)),
                None => groups.push((frac, vec![(cycle_index, k)])),
            }
        }
    }

    // Dominant first: maximal multiplicity, ties to 1 (fraction 0/1), then
    // smallest fraction value; the rest by multiplicity descending then
    // fraction value. Eigenvalue 1 always attains the maximum, so the
    // dominant slot is exact.
    groups.sort_by(|((an, ad), amem), ((bn, bd), bmem)| {
        bmem.len()
            .cmp(&amem.len())
            .then((an * bd).cmp(&(bn * ad)))
    });

    let mut clusters = Vec::with_capacity(groups.len());
    let mut basis = Matrix::zeros(m, m);
    let mut col = 0;
    for ((num, den), members) in &groups {
        let value = root_of_unity(*num, *den);
        clusters.push(EigenCluster {
            value,
            multiplicity: members.len(),
        });
        for &(cycle_index, k) in members {
            let cycle = &decomposition.cycles()[cycle_index];
            let len = cycle.len();
            let scale = 1.0 / (len as f64).sqrt();
            for (pos, &idx) in cycle.iter().enumerate() {
                // Eigenvector entry exp(-2 pi i k pos / len) on the cycle.
                let phase_index = (k * pos) % len;
                let angle = -TAU * phase_index as f64 / len as f64;
                basis.set(
                    idx,
                    col,
                    Complex64::new(scale * angle.cos(), scale * angle.sin()),
                );
            }
            col += 1;
        }
    }
    EigenStructure::new(clusters, basis)
}

fn root_of_unity(num: usize, den: usize) -> Complex64 {
    match (num, den) {
        (0, _) => Complex64::new(1.0, 0.0),
        (n, d) if 2 * n == d => Complex64::new(-1.0, 0.0),
        (n, d) if 4 * n == d => Complex64::new(0.0, 1.0),
        (n, d) if 4 * n == 3 * d => Complex64::new(0.0, -1.0),
        _ => {
            let angle = TAU * num as f64 / den as f64;
            Complex64::new(angle.cos(), angle.sin())
        }
    }
}

/// Clustered eigenstructure of a transform.
///
/// Structured transforms (permutations, diagonals, scalars) get exact
/// spectra; explicit matrices go through the dense eigensolver, with
/// eigenvalues within [`CLUSTER_REL_TOL`] times `|T|` merged into one
/// cluster. Fails with `NotInvertible` when an eigenvalue is numerically
/// zero and `NotDiagonalizable` when the eigenvector basis loses rank.
pub fn eigenstructure(t: &TransformSpec, tol: &Tolerance) -> Result<EigenStructure> {
    match t {
        TransformSpec::Permutation(p) => Ok(permutation_spectrum(p)),
        TransformSpec::ScalarIdentity { factor, size } => {
            let scale = (*size as f64).sqrt() * factor.norm();
            check_invertible(&[*factor], scale, tol)?;
            Ok(EigenStructure::new(
                vec![EigenCluster {
                    value: *factor,
                    multiplicity: *size,
                }],
                Matrix::identity(*size),
            ))
        }
        TransformSpec::Diagonal(entries) => {
            let scale = entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            check_invertible(entries, scale, tol)?;
            let indexed: Vec<(Complex64, usize)> =
                entries.iter().copied().zip(0..entries.len()).collect();
            let groups = cluster_values(&indexed, CLUSTER_REL_TOL * scale);
            let ordered = order_clusters(groups, CLUSTER_REL_TOL * scale);
            let m = entries.len();
            let mut basis = Matrix::zeros(m, m);
            let mut clusters = Vec::with_capacity(ordered.len());
            let mut col = 0;
            for (value, members) in ordered {
                clusters.push(EigenCluster {
                    value,
                    multiplicity: members.len(),
                });
                for idx in members {
                    basis.set(idx, col, Complex64::new(1.0, 0.0));
                    col += 1;
                }
            }
            Ok(EigenStructure::new(clusters, basis))
        }
        TransformSpec::Explicit(matrix) => explicit_eigenstructure(matrix, tol),
    }
}

fn check_invertible(values: &[Complex64], scale: f64, tol: &Tolerance) -> Result<()> {
    if scale == 0.0 {
        return Err(Error::NotInvertible("transform is zero".to_string()));
    }
    for z in values {
        if z.norm() <= tol.rank_tol * scale {
            return Err(Error::NotInvertible(format!(
                "eigenvalue {z} is numerically zero"
            )));
        }
    }
    Ok(())
}

fn explicit_eigenstructure(matrix: &Matrix, tol: &Tolerance) -> Result<EigenStructure> {
    let m = matrix.rows();
    let scale = matrix.frobenius_norm();
    if scale == 0.0 {
        return Err(Error::NotInvertible("transform is zero".to_string()));
    }
    let (raw_values, raw_basis) = backend::eigendecomposition(matrix);
    if raw_values
        .iter()
        .any(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::Numerical(
            "eigensolver returned non-finite eigenvalues".to_string(),
        ));
    }

    let indexed: Vec<(Complex64, usize)> = raw_values.iter().copied().zip(0..m).collect();
    let groups = cluster_values(&indexed, CLUSTER_REL_TOL * scale);
    let ordered = order_clusters(groups, CLUSTER_REL_TOL * scale);

    // Defectiveness gate, independent of the returned eigenvectors: for each
    // cluster the geometric multiplicity (numerical kernel dimension of
    // `T - lambda I` at the cluster resolution) must reach the algebraic
    // multiplicity. A defective eigenvalue splits by about the square root
    // of machine precision and its eigenvector columns degrade with it, so
    // the solver output cannot be trusted to witness the deficiency
    // directly.
    let mut geometric_total = 0;
    let mut deficient = false;
    for (value, members) in &ordered {
        let shifted = matrix.sub(&Matrix::identity(m).scale(*value));
        let sigma = backend::singular_values(&shifted);
        let kernel = sigma
            .iter()
            .filter(|&&s| s <= CLUSTER_REL_TOL * scale)
            .count();
        if kernel == 0 {
            return Err(Error::Numerical(format!(
                "eigenvalue cluster at {value} is not close to the spectrum"
            )));
        }
        geometric_total += kernel.min(members.len());
        if kernel < members.len() {
            deficient = true;
        }
    }
    if deficient {
        return Err(Error::NotDiagonalizable {
            basis_rank: geometric_total,
            size: m,
        });
    }

    // Solver backward-error check against the raw (unclustered) values.
    let residual = eigen_residual(matrix, &raw_values, &raw_basis);
    if residual > EIGEN_RESIDUAL_REL_TOL * scale {
        return Err(Error::Numerical(format!(
            "eigen-residual {residual:.3e} exceeds {EIGEN_RESIDUAL_REL_TOL:e} * |T|"
        )));
    }

    let mut clusters = Vec::with_capacity(ordered.len());
    let mut basis = Matrix::zeros(m, m);
    let mut col = 0;
    for (value, members) in &ordered {
        clusters.push(EigenCluster {
            value: *value,
            multiplicity: members.len(),
        });
        for &idx in members {
            for row in 0..m {
                basis.set(row, col, raw_basis.get(row, idx));
            }
            col += 1;
        }
    }

    check_invertible(
        &clusters.iter().map(|c| c.value).collect::<Vec<_>>(),
        scale,
        tol,
    )?;
    // Defectiveness gate. A defective eigenvalue pair splits by about the
    // square root of machine precision and its computed eigenvectors
    // collapse to the same accuracy, which can clear a raw rank tolerance of
    // 1e-10. The basis is therefore required to keep full rank at the same
    // relative resolution at which eigenvalues merge into clusters: below
    // that, the structure cannot be resolved and is rejected.
    let sigma = backend::singular_values(&basis);
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let basis_rank = sigma
        .iter()
        .filter(|&&s| s > CLUSTER_REL_TOL * sigma_max)
        .count();
    if basis_rank < m {
        return Err(Error::NotDiagonalizable {
            basis_rank,
            size: m,
        });
    }
    Ok(EigenStructure::new(clusters, basis))
}

fn eigen_residual(matrix: &Matrix, values: &[Complex64], basis: &Matrix) -> f64 {
    let m = matrix.rows();
    let mut total = 0.0;
    for (j, &value) in values.iter().enumerate().take(m) {
        let v = basis.column_vec(j);
        let mv = matrix.matvec(&v);
        for (mvi, vi) in mv.iter().zip(&v) {
            total += (mvi - value * vi).norm_sqr();
        }
    }
    total.sqrt()
}

/// Single-linkage clustering: values whose pairwise distance stays within
/// `threshold` along a chain end up in one group. Returns (mean, member
/// indices) pairs.
fn cluster_values(
    indexed: &[(Complex64, usize)],
    threshold: f64,
) -> Vec<(Complex64, Vec<usize>)> {
    let k = indexed.len();
    let mut parent: Vec<usize> = (0..k).collect();

    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }

    for i in 0..k {
        for j in i + 1..k {
            if (indexed[i].0 - indexed[j].0).norm() <= threshold {
                let ri = find(&mut parent, i);
                let rj = find(&mut parent, j);
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }

    let mut groups: Vec<(Complex64, Vec<usize>)> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for (i, &(value, original)) in indexed.iter().enumerate() {
        let r = find(&mut parent, i);
        let slot = match roots.iter().position(|&x| x == r) {
            Some(pos) => pos,
            None => {
                roots.push(r);
                groups.push((Complex64::new(0.0, 0.0), Vec::new()));
                groups.len() - 1
            }
        };
        groups[slot].0 += value;
        groups[slot].1.push(original);
    }
    for (sum, members) in &mut groups {
        *sum /= members.len() as f64;
    }
    groups
}

fn phase_in_two_pi(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Orders clusters dominant-first per the documented tie rule, then by
/// multiplicity descending, modulus ascending, phase ascending.
fn order_clusters(
    mut groups: Vec<(Complex64, Vec<usize>)>,
    one_threshold: f64,
) -> Vec<(Complex64, Vec<usize>)> {
    let max_mult = groups.iter().map(|(_, m)| m.len()).max().unwrap();
    let is_one =
        |z: Complex64| (z - Complex64::new(1.0, 0.0)).norm() <= one_threshold.max(f64::EPSILON);

    let dominant_index = {
        let candidates: Vec<usize> = (0..groups.len())
            .filter(|&i| groups[i].1.len() == max_mult)
            .collect();
        candidates
            .iter()
            .copied()
            .find(|&i| is_one(groups[i].0))
            .unwrap_or_else(|| {
                candidates
                    .into_iter()
                    .min_by(|&a, &b| {
                        let za = groups[a].0;
                        let zb = groups[b].0;
                        za.norm()
                            .total_cmp(&zb.norm())
                            .then(phase_in_two_pi(za).total_cmp(&phase_in_two_pi(zb)))
                    })
                    .unwrap()
            })
    };

    let dominant = groups.remove(dominant_index);
    groups.sort_by(|(za, ma), (zb, mb)| {
        mb.len()
            .cmp(&ma.len())
            .then(za.norm().total_cmp(&zb.norm()))
            .then(phase_in_two_pi(*za).total_cmp(&phase_in_two_pi(*zb)))
    });
    groups.insert(0, dominant);
    groups
}
