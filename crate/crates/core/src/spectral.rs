//! The spectral bridge between a product `T = PQ` and the difference
//! `A = P - Q`: Schmidt decompositions, biorthogonal bases, eigenvalue
//! correspondences for `P - Q` and `P + Q` with explicit eigenvectors, the
//! complement transfers `P(1-Q)`, `(1-P)Q`, `(1-P)(1-Q)`, and the
//! pseudoinverse of a Schmidt-decomposed operator.
//!
//! Each correspondence is computed along two independent routes (direct
//! eigensolve vs. prediction from the other side) and the routes must agree
//! within `spectral_match`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    cluster_sorted, hermitian_eig, identity, inner, multiset_distance, op_norm, svd, CMatrix,
    CVector,
};
use crate::projection::{Frame, Projection};
use crate::tolerance::TolerancePolicy;

/// One Schmidt triple: `T xi = s psi` with unit vectors on both sides.
#[derive(Debug, Clone)]
pub struct SchmidtTriple {
    pub s: f64,
    pub psi: CVector,
    pub xi: CVector,
}

/// Schmidt decomposition `T = sum_n s_n psi_n xi_n^*` of a product of two
/// projections: `s` nonincreasing in `(0, 1]`, both vector systems
/// orthonormal, and the cross terms biorthogonal with `<xi_n, psi_n> = s_n`
/// real nonnegative after phase normalization.
///
/// Singular values within `spectral_match` of 1 are snapped to exactly 1;
/// their count is `dim_ones` and their vectors span the intersection of the
/// two ranges.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    dim: usize,
    triples: Vec<SchmidtTriple>,
    dim_ones: usize,
}

impl SchmidtDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn triples(&self) -> &[SchmidtTriple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Count of singular values snapped to 1 (dimension of range-range
    /// intersection for a product of projections).
    pub fn dim_ones(&self) -> usize {
        self.dim_ones
    }

    pub fn values(&self) -> Vec<f64> {
        self.triples.iter().map(|t| t.s).collect()
    }

    /// Singular values strictly below 1 (the snapped ones excluded).
    pub fn values_below_one(&self) -> Vec<f64> {
        self.triples[self.dim_ones..].iter().map(|t| t.s).collect()
    }

    /// `sum_n s_n psi_n xi_n^*`.
    pub fn reconstruct(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for t in &self.triples {
            m += (&t.psi * t.xi.adjoint()).scale(t.s);
        }
        m
    }

    /// Builds the decomposition from raw triples (sorted, snapped); used by
    /// the reconstruction routes. `dim_ones` is recomputed from the data.
    fn from_triples(dim: usize, mut triples: Vec<SchmidtTriple>) -> Self {
        triples.sort_by(|a, b| b.s.partial_cmp(&a.s).unwrap());
        let dim_ones = triples.iter().take_while(|t| t.s >= 1.0).count();
        SchmidtDecomposition {
            dim,
            triples,
            dim_ones,
        }
    }
}

/// Diagonalization data of `A = P - Q`: multiplicities at the fixed points
/// `+1`, `-1`, `0` plus the paired interior eigenvalues `±lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSpectrum {
    pub plus_one_mult: usize,
    pub minus_one_mult: usize,
    pub zero_mult: usize,
    /// `(lambda, multiplicity)` with `lambda` in `(0, 1)`; each appears with
    /// the same multiplicity at `+lambda` and `-lambda`.
    pub paired: Vec<(f64, usize)>,
}

impl DifferenceSpectrum {
    /// The full eigenvalue multiset (ascending).
    pub fn eigenvalue_multiset(&self) -> Vec<f64> {
        let mut v = Vec::new();
        v.extend(std::iter::repeat(-1.0).take(self.minus_one_mult));
        for &(l, m) in &self.paired {
            v.extend(std::iter::repeat(-l).take(m));
        }
        v.extend(std::iter::repeat(0.0).take(self.zero_mult));
        for &(l, m) in &self.paired {
            v.extend(std::iter::repeat(l).take(m));
        }
        v.extend(std::iter::repeat(1.0).take(self.plus_one_mult));
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn total_dim(&self) -> usize {
        self.plus_one_mult
            + self.minus_one_mult
            + self.zero_mult
            + 2 * self.paired.iter().map(|&(_, m)| m).sum::<usize>()
    }
}

fn check_same_dim(p: &Projection, q: &Projection) -> Result<usize> {
    if p.dim() != q.dim() {
        return Err(Error::Validation(format!(
            "dimension mismatch: {} vs {}",
            p.dim(),
            q.dim()
        )));
    }
    Ok(p.dim())
}

/// Schmidt decomposition of `T = PQ` with the phase convention
/// `<xi_n, psi_n> = s_n >= 0` (rotate `psi_n` by the conjugate phase of the
/// diagonal entry, as in the biorthogonal-basis construction).
pub fn schmidt_decompose(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<SchmidtDecomposition> {
    let n = check_same_dim(p, q)?;
    let t = p.matrix() * q.matrix();
    let (u, s, v) = svd(&t)?;
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff(n, n, sigma_max.min(1.0).max(f64::MIN_POSITIVE));
    let mut triples = Vec::new();
    let mut dim_ones = 0;
    for (k, &sk) in s.iter().enumerate() {
        if sk <= cutoff {
            break;
        }
        let mut psi: CVector = u.column(k).into_owned();
        let xi: CVector = v.column(k).into_owned();
        let d = inner(&xi, &psi);
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            psi *= phase.conj();
        }
        let snapped = if (sk - 1.0).abs() <= tol.spectral_match {
            dim_ones += 1;
            1.0
        } else {
            sk
        };
        triples.push(SchmidtTriple {
            s: snapped,
            psi,
            xi,
        });
    }
    Ok(SchmidtDecomposition {
        dim: n,
        triples,
        dim_ones,
    })
}

/// Completes the columns of `inner_frame` (orthonormal, contained in the range
/// of `proj`) to an orthonormal basis of that range. Returns the full basis.
fn complete_in_range(proj: &Projection, inner_frame: &CMatrix) -> Result<CMatrix> {
    let range = proj.range_frame()?;
    let have = inner_frame.ncols();
    let want = proj.rank();
    if have > want {
        return Err(Error::NumericalFailure(format!(
            "frame of {have} vectors cannot sit inside a rank-{want} range"
        )));
    }
    let mut basis = CMatrix::zeros(proj.dim(), want);
    basis.columns_mut(0, have).copy_from(inner_frame);
    // Project the range basis orthogonally to the held columns and take the
    // dominant directions of the remainder as extension vectors. Genuine
    // extension directions carry singular values near 1; anything far below
    // signals that the held vectors do not sit inside the range.
    if have < want {
        let residual = range.matrix()
            - inner_frame * (inner_frame.adjoint() * range.matrix());
        let (u, s, _) = svd(&residual)?;
        let needed = want - have;
        if s.len() < needed || s[needed - 1] < 0.5 {
            return Err(Error::NumericalFailure(format!(
                "range completion needs {needed} extension vectors but the residual \
                 singular values are {s:?}"
            )));
        }
        basis
            .columns_mut(have, needed)
            .copy_from(&u.columns(0, needed).into_owned());
    }
    Ok(basis)
}

/// Biorthogonal orthonormal bases of the two ranges: the Schmidt vectors of
/// `PQ` extended inside `R(P)` and `R(Q)`. The cross-Gram matrix
/// `basis_S^* basis_T` is rectangular-diagonal with the Schmidt values on the
/// diagonal, padded with zeros.
pub fn biorthogonal_bases(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<(Frame, Frame)> {
    let n = check_same_dim(p, q)?;
    let schmidt = schmidt_decompose(p, q, tol)?;
    let k = schmidt.len();
    let mut psis = CMatrix::zeros(n, k);
    let mut xis = CMatrix::zeros(n, k);
    for (j, t) in schmidt.triples().iter().enumerate() {
        psis.set_column(j, &t.psi);
        xis.set_column(j, &t.xi);
    }
    let basis_s = complete_in_range(p, &psis)?;
    let basis_t = complete_in_range(q, &xis)?;
    Ok((Frame::new(&basis_s)?, Frame::new(&basis_t)?))
}

/// Largest off-diagonal modulus of the cross-Gram matrix `X^* Y`.
pub fn cross_gram_offdiag_max(x: &Frame, y: &Frame) -> f64 {
    let gram = x.matrix().adjoint() * y.matrix();
    let mut max = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            if i != j {
                max = max.max(gram[(i, j)].norm());
            }
        }
    }
    max
}

/// Decides whether two isometries have a diagonal cross-Gram matrix
/// (all off-diagonal entries of `X^* Y` of modulus at most 1e-10).
pub fn isometry_diagonality_check(x: &Frame, y: &Frame) -> Result<bool> {
    if x.dim() != y.dim() {
        return Err(Error::Validation(format!(
            "ambient dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(cross_gram_offdiag_max(x, y) <= 1e-10)
}

/// Clusters the eigenvalues of a Hermitian matrix under the policy gap.
fn clustered_eigenvalues(m: &CMatrix, tol: &TolerancePolicy) -> Result<Vec<(f64, usize)>> {
    let (vals, _) = hermitian_eig(m, tol)?;
    let scale = vals
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    Ok(cluster_sorted(&vals, tol.cluster_gap(scale)))
}

/// Predicted difference spectrum from the Schmidt data of `PQ` and the ranks:
/// `±sqrt(1 - s_n^2)` for `s_n < 1`, `+1` on `R(P) ∩ N(Q)`, `-1` on
/// `N(P) ∩ R(Q)`, `0` on the two remaining intersections.
fn difference_spectrum_from_schmidt(
    schmidt: &SchmidtDecomposition,
    rank_p: usize,
    rank_q: usize,
    tol: &TolerancePolicy,
) -> DifferenceSpectrum {
    let n = schmidt.dim();
    let k = schmidt.len();
    let ones = schmidt.dim_ones();
    let plus_one_mult = rank_p - k;
    let minus_one_mult = rank_q - k;
    let zero_mult = n + 2 * ones - rank_p - rank_q;
    let lambdas: Vec<f64> = schmidt
        .values_below_one()
        .iter()
        .map(|&s| (1.0 - s * s).max(0.0).sqrt())
        .collect();
    let mut sorted = lambdas;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let paired = cluster_sorted(&sorted, tol.cluster_gap(1.0));
    DifferenceSpectrum {
        plus_one_mult,
        minus_one_mult,
        zero_mult,
        paired,
    }
}

/// Spectrum of `A = P - Q`, computed by direct Hermitian eigendecomposition
/// with clustering and cross-checked against the prediction from the Schmidt
/// values of `PQ`. The two routes must agree within `spectral_match` per
/// element after multiset sorting.
pub fn difference_spectrum(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<DifferenceSpectrum> {
    check_same_dim(p, q)?;
    let a = p.matrix() - q.matrix();
    let clusters = clustered_eigenvalues(&a, tol)?;
    let gap = tol.cluster_gap(1.0);

    let mut plus_one_mult = 0;
    let mut minus_one_mult = 0;
    let mut zero_mult = 0;
    let mut positive: Vec<(f64, usize)> = Vec::new();
    let mut negative: Vec<(f64, usize)> = Vec::new();
    for &(value, mult) in &clusters {
        if (value - 1.0).abs() <= gap {
            plus_one_mult += mult;
        } else if (value + 1.0).abs() <= gap {
            minus_one_mult += mult;
        } else if value.abs() <= gap {
            zero_mult += mult;
        } else if value > 0.0 {
            positive.push((value, mult));
        } else {
            negative.push((-value, mult));
        }
    }
    negative.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    positive.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if positive.len() != negative.len()
        || positive
            .iter()
            .zip(&negative)
            .any(|(p, n)| (p.0 - n.0).abs() > gap || p.1 != n.1)
    {
        return Err(Error::NumericalFailure(format!(
            "interior eigenvalues of P - Q are not paired: +{positive:?} vs -{negative:?}"
        )));
    }
    let direct = DifferenceSpectrum {
        plus_one_mult,
        minus_one_mult,
        zero_mult,
        paired: positive,
    };

    let schmidt = schmidt_decompose(p, q, tol)?;
    let predicted = difference_spectrum_from_schmidt(&schmidt, p.rank(), q.rank(), tol);
    let dist = multiset_distance(
        &direct.eigenvalue_multiset(),
        &predicted.eigenvalue_multiset(),
    );
    if dist > tol.spectral_match {
        return Err(Error::NumericalFailure(format!(
            "difference spectrum routes disagree by {dist:.3e}: direct {:?} vs predicted {:?}",
            direct.eigenvalue_multiset(),
            predicted.eigenvalue_multiset()
        )));
    }
    Ok(direct)
}

/// An eigenvector pair of `A = P - Q` at `±lambda`, built from a Schmidt
/// triple of `PQ`.
#[derive(Debug, Clone)]
pub struct DifferenceEigenpair {
    pub lambda: f64,
    /// normalized eigenvector at `+lambda`
    pub nu: CVector,
    /// normalized eigenvector at `-lambda`
    pub omega: CVector,
}

/// Explicit eigenvectors of `A = P - Q` from the Schmidt vectors:
/// `nu = (sqrt(1-s^2) - 1) xi + s psi` at `+sqrt(1-s^2)` and
/// `omega = (-sqrt(1-s^2) - 1) xi + s psi` at `-sqrt(1-s^2)`, normalized.
/// Triples with `s = 1` are skipped (their vectors lie in the kernel of `A`).
/// Inside a degenerate `s`-cluster the vectors are re-orthonormalized in a
/// fixed reference order, so outputs there are basis-dependent.
pub fn difference_eigenvectors(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<Vec<DifferenceEigenpair>> {
    check_same_dim(p, q)?;
    let schmidt = schmidt_decompose(p, q, tol)?;
    let a = p.matrix() - q.matrix();
    build_difference_pairs(&schmidt, &a, tol)
}

fn build_difference_pairs(
    schmidt: &SchmidtDecomposition,
    a: &CMatrix,
    tol: &TolerancePolicy,
) -> Result<Vec<DifferenceEigenpair>> {
    let mut pairs = Vec::new();
    let below_one = &schmidt.triples()[schmidt.dim_ones()..];
    let gap = tol.cluster_gap(1.0);
    let mut idx = 0;
    while idx < below_one.len() {
        // group a degenerate s-cluster
        let mut end = idx + 1;
        while end < below_one.len() && (below_one[end - 1].s - below_one[end].s).abs() < gap {
            end += 1;
        }
        // The construction yields orthogonal vectors across a cluster already
        // (the Schmidt systems are biorthogonal); the Gram-Schmidt sweep below
        // only pins the basis inside the cluster to the reference order.
        let mut nus: Vec<CVector> = Vec::new();
        let mut omegas: Vec<CVector> = Vec::new();
        let mut lambdas: Vec<f64> = Vec::new();
        for t in &below_one[idx..end] {
            let lambda = (1.0 - t.s * t.s).max(0.0).sqrt();
            let nu = orthonormalize_against(
                t.xi.scale(lambda - 1.0) + t.psi.scale(t.s),
                &nus,
                gap,
            )?;
            let omega = orthonormalize_against(
                t.xi.scale(-lambda - 1.0) + t.psi.scale(t.s),
                &omegas,
                gap,
            )?;
            nus.push(nu);
            omegas.push(omega);
            lambdas.push(lambda);
        }
        for k in 0..nus.len() {
            let (lambda, nu, omega) = (lambdas[k], nus[k].clone(), omegas[k].clone());
            let res_nu = (a * &nu - nu.scale(lambda)).norm();
            let res_omega = (a * &omega + omega.scale(lambda)).norm();
            if res_nu > 1e-8 || res_omega > 1e-8 {
                return Err(Error::NumericalFailure(format!(
                    "difference eigenvector residuals {res_nu:.3e} / {res_omega:.3e} exceed 1e-8"
                )));
            }
            pairs.push(DifferenceEigenpair { lambda, nu, omega });
        }
        idx = end;
    }
    Ok(pairs)
}

fn orthonormalize_against(
    mut v: CVector,
    held: &[CVector],
    min_norm: f64,
) -> Result<CVector> {
    for prev in held {
        let coeff = inner(&v, prev);
        v -= prev * coeff;
    }
    let norm = v.norm();
    if norm <= min_norm {
        return Err(Error::NumericalFailure(
            "degenerate Schmidt cluster produced a vanishing eigenvector".into(),
        ));
    }
    Ok(v / Complex64::new(norm, 0.0))
}

/// Rebuilds the Schmidt data of `PQ` from the eigendecomposition of
/// `A = P - Q`: for each eigenvalue pair `±lambda` the anticommuting
/// `S = P + Q - 1` maps the `+lambda` eigenspace onto the `-lambda` one, the
/// two-dimensional blocks carry `PQ`, and a 2x2 SVD per block yields the
/// triples; the kernel of `A` contributes the singular value 1 on
/// `R(P) ∩ R(Q)`. The result must match [`schmidt_decompose`] within
/// `spectral_match`.
pub fn product_from_difference(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<SchmidtDecomposition> {
    let n = check_same_dim(p, q)?;
    let a = p.matrix() - q.matrix();
    let s_op = p.matrix() + q.matrix() - identity(n);
    let t = p.matrix() * q.matrix();
    let (vals, vecs) = hermitian_eig(&a, tol)?;
    let gap = tol.cluster_gap(1.0);

    let mut triples: Vec<SchmidtTriple> = Vec::new();

    // Interior +lambda eigenvectors; pair each with omega = S nu / s.
    for (j, &lambda) in vals.iter().enumerate() {
        if lambda <= gap || (lambda - 1.0).abs() <= gap {
            continue;
        }
        let nu: CVector = vecs.column(j).into_owned();
        let s_val = (1.0 - lambda * lambda).max(0.0).sqrt();
        let omega = (&s_op * &nu).scale(1.0 / s_val);
        // 2x2 compression of PQ on span{nu, omega}
        let mut basis = CMatrix::zeros(n, 2);
        basis.set_column(0, &nu);
        basis.set_column(1, &omega);
        let block = basis.adjoint() * &t * &basis;
        let block_residual = op_norm(&(&t * &basis - &basis * &block));
        if block_residual > tol.spectral_match * 10.0 {
            return Err(Error::NumericalFailure(format!(
                "2x2 block of PQ is not invariant: residual {block_residual:.3e}"
            )));
        }
        let (u2, s2, v2) = svd(&block)?;
        // keep the dominant singular direction of the block
        if s2[0] > tol.rank_cutoff(n, n, 1.0) {
            let psi = &basis * u2.column(0).into_owned();
            let xi = &basis * v2.column(0).into_owned();
            let d = inner(&xi, &psi);
            let psi = if d.norm() > 0.0 {
                psi * (d / d.norm()).conj()
            } else {
                psi
            };
            let snapped = if (s2[0] - 1.0).abs() <= tol.spectral_match {
                1.0
            } else {
                s2[0]
            };
            triples.push(SchmidtTriple {
                s: snapped,
                psi,
                xi,
            });
        }
    }

    // Kernel of A: R(P) ∩ R(Q) carries the singular value 1 (psi = xi there).
    let kernel_cols: Vec<usize> = vals
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v.abs() <= gap)
        .map(|(j, _)| j)
        .collect();
    if !kernel_cols.is_empty() {
        let mut kernel = CMatrix::zeros(n, kernel_cols.len());
        for (dst, &src) in kernel_cols.iter().enumerate() {
            kernel.set_column(dst, &vecs.column(src));
        }
        // P restricted to N(A) is the projection onto R(P) ∩ R(Q).
        let compressed = kernel.adjoint() * p.matrix() * &kernel;
        let (cvals, cvecs) = hermitian_eig(&compressed, tol)?;
        for (j, &v) in cvals.iter().enumerate() {
            if (v - 1.0).abs() <= gap {
                let vec = &kernel * cvecs.column(j).into_owned();
                triples.push(SchmidtTriple {
                    s: 1.0,
                    psi: vec.clone(),
                    xi: vec,
                });
            } else if v.abs() > gap {
                return Err(Error::NumericalFailure(format!(
                    "P restricted to N(P - Q) has eigenvalue {v:.6}, expected 0 or 1"
                )));
            }
        }
    }

    let rebuilt = SchmidtDecomposition::from_triples(n, triples);

    let reference = schmidt_decompose(p, q, tol)?;
    let dist = multiset_distance(&rebuilt.values(), &reference.values());
    if dist > tol.spectral_match {
        return Err(Error::NumericalFailure(format!(
            "Schmidt values from the difference route disagree by {dist:.3e}: {:?} vs {:?}",
            rebuilt.values(),
            reference.values()
        )));
    }
    let recon_residual = op_norm(&(rebuilt.reconstruct() - &t));
    if recon_residual > tol.spectral_match * 10.0 {
        return Err(Error::NumericalFailure(format!(
            "difference-route reconstruction residual {recon_residual:.3e}"
        )));
    }
    Ok(rebuilt)
}

/// Eigenvalue multiset of `P + Q` (clustered), computed directly and
/// cross-checked against `{1 ± s_n} ∪ {0, 2, 1}` with multiplicities from the
/// intersections.
pub fn sum_spectrum(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<Vec<(f64, usize)>> {
    let n = check_same_dim(p, q)?;
    let sum = p.matrix() + q.matrix();
    let direct = clustered_eigenvalues(&sum, tol)?;

    let schmidt = schmidt_decompose(p, q, tol)?;
    let diff = difference_spectrum_from_schmidt(&schmidt, p.rank(), q.rank(), tol);
    let ones = schmidt.dim_ones();
    let nn_dim = n + ones - p.rank() - q.rank();
    let mut predicted: Vec<f64> = Vec::new();
    predicted.extend(std::iter::repeat(0.0).take(nn_dim));
    predicted.extend(std::iter::repeat(2.0).take(ones));
    predicted.extend(std::iter::repeat(1.0).take(diff.plus_one_mult + diff.minus_one_mult));
    for &s in &schmidt.values_below_one() {
        predicted.push(1.0 + s);
        predicted.push(1.0 - s);
    }

    let mut direct_flat: Vec<f64> = Vec::new();
    for &(v, m) in &direct {
        direct_flat.extend(std::iter::repeat(v).take(m));
    }
    let dist = multiset_distance(&direct_flat, &predicted);
    if dist > tol.spectral_match {
        return Err(Error::NumericalFailure(format!(
            "sum spectrum routes disagree by {dist:.3e}: direct {direct_flat:?} vs predicted {predicted:?}"
        )));
    }
    Ok(direct)
}

/// Schmidt data of the four complement products.
#[derive(Debug, Clone)]
pub struct ComplementTransfer {
    pub pq: SchmidtDecomposition,
    pub p_qc: SchmidtDecomposition,
    pub pc_q: SchmidtDecomposition,
    pub pc_qc: SchmidtDecomposition,
}

/// Schmidt decompositions of `PQ`, `P(1-Q)`, `(1-P)Q`, `(1-P)(1-Q)`.
/// In finite dimension all four exist.
pub fn complement_transfer(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<ComplementTransfer> {
    check_same_dim(p, q)?;
    let pc = p.complement();
    let qc = q.complement();
    Ok(ComplementTransfer {
        pq: schmidt_decompose(p, q, tol)?,
        p_qc: schmidt_decompose(p, &qc, tol)?,
        pc_q: schmidt_decompose(&pc, q, tol)?,
        pc_qc: schmidt_decompose(&pc, &qc, tol)?,
    })
}

/// Moore-Penrose pseudoinverse of a Schmidt-decomposed operator:
/// `T^† = sum_n (1/s_n) xi_n psi_n^*`.
pub fn schmidt_pseudoinverse(d: &SchmidtDecomposition) -> CMatrix {
    let mut m = CMatrix::zeros(d.dim(), d.dim());
    for t in d.triples() {
        m += (&t.xi * t.psi.adjoint()).scale(1.0 / t.s);
    }
    m
}

/// Largest of the four Penrose identity residuals of a candidate
/// pseudoinverse `x` for `t`.
pub fn penrose_residual(t: &CMatrix, x: &CMatrix) -> f64 {
    let txt = t * x * t;
    let xtx = x * t * x;
    let tx = t * x;
    let xt = x * t;
    [
        op_norm(&(txt - t)),
        op_norm(&(xtx - x)),
        op_norm(&(&tx - tx.adjoint())),
        op_norm(&(&xt - xt.adjoint())),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}
