//! Dense complex linear-algebra substrate.
//!
//! Everything downstream works with `nalgebra` dense matrices over
//! `Complex<f64>`. Real inputs are promoted to complex at the boundary; all
//! matrix functions are computed through eigendecompositions or SVDs (every
//! operator handled here is normal or small enough that this is the right
//! trade-off).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::TolerancePolicy;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Inner product `<x, y>`, conjugate-linear in the second slot.
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    y.dotc(x)
}

/// Builds a complex matrix from a real one.
pub fn promote(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Rejects NaN / infinite entries at the construction boundary.
pub fn validate_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Validation("matrix contains NaN or infinite entries".into()))
    }
}

/// Operator (spectral) norm, computed as the largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Cheap upper bound on the operator norm: min of the Frobenius norm and the
/// Hölder bound sqrt(norm_1 * norm_inf). Used to accept tiny residuals without
/// paying for an SVD; callers fall back to [`op_norm`] when the bound is not
/// conclusive.
pub fn op_norm_upper(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let frob = m.norm();
    let mut col_max: f64 = 0.0;
    for j in 0..m.ncols() {
        col_max = col_max.max(m.column(j).iter().map(|z| z.norm()).sum());
    }
    let mut row_max: f64 = 0.0;
    for i in 0..m.nrows() {
        row_max = row_max.max(m.row(i).iter().map(|z| z.norm()).sum());
    }
    frob.min((col_max * row_max).sqrt())
}

/// Residual norm test that avoids the SVD when the cheap bound already decides.
pub fn residual_below(m: &CMatrix, threshold: f64) -> (f64, bool) {
    let upper = op_norm_upper(m);
    if upper <= threshold {
        return (upper, true);
    }
    let exact = op_norm(m);
    (exact, exact <= threshold)
}

/// Orthonormal completion: the first `count` columns of an orthonormal basis
/// of the orthogonal complement of the (orthonormal) columns of `held`.
fn orthonormal_complement(held: &CMatrix, count: usize) -> Result<CMatrix> {
    let m = held.nrows();
    if count == 0 {
        return Ok(CMatrix::zeros(m, 0));
    }
    let co_projector = identity(m) - held * held.adjoint();
    let qr = co_projector.col_piv_qr();
    let q = qr.q();
    let r = qr.r();
    // For a rank-f orthogonal projector the pivoted-QR diagonals satisfy
    // pivot_j^2 >= (f - j)/m, so genuine complement directions stay above
    // sqrt(0.5/m) while exhausted ones collapse to rounding level.
    let floor = (0.5 / m as f64).sqrt();
    for i in 0..count {
        if r[(i, i)].norm() < floor {
            return Err(Error::NumericalFailure(format!(
                "orthonormal completion ran out of directions at column {i}"
            )));
        }
    }
    Ok(q.columns(0, count).into_owned())
}

/// Singular value decomposition `M = U diag(s) V^*` with `s` nonincreasing and
/// orthonormal columns in `U` (m x k) and `V` (n x k), k = min(m, n).
///
/// Computed through the Hermitian eigendecomposition of the dilation
/// `[[0, M], [M^*, 0]]`, whose eigenpairs are `±sigma` with eigenvectors
/// `(u; ±v)/sqrt(2)`; columns at numerically zero singular values are
/// orthonormal completions. This rides on the symmetric tridiagonal
/// eigensolver, which keeps full accuracy on degenerate clusters. The factors
/// are verified (orthonormality and reconstruction) before they are returned.
pub fn svd(m: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    validate_finite(m)?;
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Ok((
            CMatrix::zeros(rows, 0),
            Vec::new(),
            CMatrix::zeros(cols, 0),
        ));
    }

    let dim_w = rows + cols;
    let mut w = CMatrix::zeros(dim_w, dim_w);
    w.view_mut((0, rows), (rows, cols)).copy_from(m);
    w.view_mut((rows, 0), (cols, rows)).copy_from(&m.adjoint());
    let eig = w.symmetric_eigen();

    let mut order: Vec<usize> = (0..dim_w).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let sigma_max = eig.eigenvalues[order[0]].max(0.0);

    // Below this, the ±sigma eigenspaces are numerically inseparable and the
    // vectors may mix, so those columns come from the completion instead.
    let positive_cut = sigma_max * f64::EPSILON * 8.0 * dim_w as f64;
    let rank = order
        .iter()
        .take(k)
        .take_while(|&&j| eig.eigenvalues[j] > positive_cut)
        .count();

    let mut u = CMatrix::zeros(rows, k);
    let mut v = CMatrix::zeros(cols, k);
    let mut s = vec![0.0f64; k];
    for (dst, &src) in order.iter().take(rank).enumerate() {
        s[dst] = eig.eigenvalues[src];
        let col = eig.eigenvectors.column(src);
        let mut u_part = CVector::from_fn(rows, |i, _| col[i]);
        let mut v_part = CVector::from_fn(cols, |i, _| col[rows + i]);
        let (nu, nv) = (u_part.norm(), v_part.norm());
        if nu < 0.5 || nv < 0.5 {
            return Err(Error::NumericalFailure(format!(
                "dilation eigenvector at sigma = {} has unbalanced halves ({nu:.3}, {nv:.3})",
                s[dst]
            )));
        }
        u_part /= Complex64::new(nu, 0.0);
        v_part /= Complex64::new(nv, 0.0);
        u.set_column(dst, &u_part);
        v.set_column(dst, &v_part);
    }
    if rank < k {
        let u_fill = orthonormal_complement(&u.columns(0, rank).into_owned(), k - rank)?;
        let v_fill = orthonormal_complement(&v.columns(0, rank).into_owned(), k - rank)?;
        u.columns_mut(rank, k - rank).copy_from(&u_fill);
        v.columns_mut(rank, k - rank).copy_from(&v_fill);
    }

    // verification: orthonormal factors, nonincreasing values, reconstruction
    let guard = 1e-11 * sigma_max.max(1.0) * dim_w as f64;
    let u_dev = (u.adjoint() * &u - identity(k)).norm();
    let v_dev = (v.adjoint() * &v - identity(k)).norm();
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(
        k,
        s.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let recon_dev = (&u * diag * v.adjoint() - m).norm();
    if u_dev > 1e-10 || v_dev > 1e-10 || recon_dev > guard {
        return Err(Error::NumericalFailure(format!(
            "svd verification failed: factor deviations {u_dev:.3e}/{v_dev:.3e}, \
             reconstruction {recon_dev:.3e}"
        )));
    }
    debug_assert!(s.windows(2).all(|pair| pair[0] >= pair[1]));
    Ok((u, s, v))
}

/// Eigendecomposition of a Hermitian matrix. Returns eigenvalues in
/// nondecreasing order with matching orthonormal eigenvector columns.
///
/// The input is symmetrized as `(M + M^*)/2` before factorization; deviation
/// from Hermitian symmetry beyond `idempotent_tol * ||M||` is rejected.
pub fn hermitian_eig(m: &CMatrix, tol: &TolerancePolicy) -> Result<(Vec<f64>, CMatrix)> {
    validate_finite(m)?;
    if m.nrows() != m.ncols() {
        return Err(Error::Validation(format!(
            "hermitian_eig expects a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let scale = op_norm(m).max(f64::MIN_POSITIVE);
    let dev = op_norm(&(m - m.adjoint()));
    if dev > tol.idempotent_tol * scale.max(1.0) {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian: ||M - M*|| = {dev:.3e} exceeds {:.3e}",
            tol.idempotent_tol * scale.max(1.0)
        )));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Unitary part `V = M (M^*M)^{-1/2}` of the polar decomposition, via the SVD.
///
/// Fails with a rank-deficiency error when the smallest singular value is at
/// or below the rank cutoff; the caller must first restrict to the generic
/// part. `V` is Hermitian whenever `M` is.
pub fn polar_unitary_part(m: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::Validation(format!(
            "polar_unitary_part expects a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let (u, s, v) = svd(m)?;
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let sigma_min = s.last().copied().unwrap_or(0.0);
    let threshold = tol.rank_cutoff(m.nrows(), m.ncols(), sigma_max);
    if sigma_min <= threshold {
        return Err(Error::RankDeficient {
            sigma_min,
            threshold,
        });
    }
    Ok(u * v.adjoint())
}

/// `e^{iX}` for Hermitian `X`, through the eigendecomposition.
pub fn exp_i_hermitian(x: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eig(x, tol)?;
    let phases = CVector::from_iterator(values.len(), values.iter().map(|&t| (I * t).exp()));
    Ok(&vectors * CMatrix::from_diagonal(&phases) * vectors.adjoint())
}

/// Hermitian square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues in `[-clamp_tol, 0)` are clamped to zero (they arise at the
/// boundary of contractions); more negative eigenvalues are rejected.
pub fn hermitian_sqrt_psd(m: &CMatrix, clamp_tol: f64, tol: &TolerancePolicy) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eig(m, tol)?;
    let mut roots = Vec::with_capacity(values.len());
    for &v in &values {
        if v < -clamp_tol {
            return Err(Error::Validation(format!(
                "matrix is not positive semidefinite: eigenvalue {v:.3e}"
            )));
        }
        roots.push(Complex64::new(v.max(0.0).sqrt(), 0.0));
    }
    let d = CVector::from_vec(roots);
    Ok(&vectors * CMatrix::from_diagonal(&d) * vectors.adjoint())
}

fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    op_norm(&(u.adjoint() * u - identity(n)))
}

/// Principal logarithm of a unitary matrix: the Hermitian `X` with
/// `e^{iX} = U` and `||X|| <= pi`.
///
/// A unitary is normal, so `C = (U + U^*)/2` and `S = (U - U^*)/(2i)` are
/// commuting Hermitian matrices (cos X and sin X). They are diagonalized
/// simultaneously: eigenvectors of `C`, refined inside each eigenvalue cluster
/// by diagonalizing the compression of `S`. The angle on each joint
/// eigenvector is recovered with `atan2`, which selects the branch in
/// `(-pi, pi]`. Eigenvalues within `unit_circle_tol` of -1 are rejected as
/// branch-cut failures.
pub fn principal_log_unitary(u: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    if u.nrows() != u.ncols() {
        return Err(Error::Validation(format!(
            "principal_log_unitary expects a square matrix, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let n = u.nrows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    validate_finite(u)?;
    let udev = unitarity_residual(u);
    if udev > tol.unit_circle_tol.max(1e-12) * 10.0 {
        return Err(Error::Validation(format!(
            "matrix is not unitary: ||U*U - 1|| = {udev:.3e}"
        )));
    }

    let cos_part = (u + u.adjoint()).scale(0.5);
    let sin_part = (u - u.adjoint()) * Complex64::new(0.0, -0.5);
    let (cos_vals, mut basis) = hermitian_eig(&cos_part, tol)?;

    // Refine the basis inside each cos-cluster so that sin X is diagonal too.
    // Clusters are taken generously: over-merging only asks the inner
    // eigensolver to re-split, under-merging would leave sin X off-diagonal.
    let cluster_gap = 1e-7;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cos_vals[end] - cos_vals[end - 1] < cluster_gap {
            end += 1;
        }
        if end - start > 1 {
            let block = basis.columns(start, end - start).into_owned();
            let s_c = block.adjoint() * &sin_part * &block;
            let (_, w) = hermitian_eig(&s_c, tol)?;
            let refined = block * w;
            for (offset, j) in (start..end).enumerate() {
                basis.set_column(j, &refined.column(offset));
            }
        }
        start = end;
    }

    let c_diag = basis.adjoint() * &cos_part * &basis;
    let s_diag = basis.adjoint() * &sin_part * &basis;
    let mut angles = Vec::with_capacity(n);
    for j in 0..n {
        let c = c_diag[(j, j)].re;
        let s = s_diag[(j, j)].re;
        let modulus = (c * c + s * s).sqrt();
        if (modulus - 1.0).abs() > 100.0 * tol.unit_circle_tol {
            return Err(Error::Validation(format!(
                "eigenvalue {c:.6}{s:+.6}i of the unitary has modulus {modulus:.12}"
            )));
        }
        if (c + 1.0).abs() < tol.unit_circle_tol && s.abs() < tol.unit_circle_tol {
            return Err(Error::BranchCut {
                re: c,
                im: s,
                tol: tol.unit_circle_tol,
            });
        }
        angles.push(Complex64::new(s.atan2(c), 0.0));
    }
    let x = &basis * CMatrix::from_diagonal(&CVector::from_vec(angles)) * basis.adjoint();
    let x = (&x + x.adjoint()).scale(0.5);

    let recon = exp_i_hermitian(&x, tol)?;
    let residual = op_norm(&(recon - u));
    if residual > 1e-9 {
        return Err(Error::NumericalFailure(format!(
            "principal logarithm round trip residual {residual:.3e} exceeds 1e-9"
        )));
    }
    Ok(x)
}

/// Full SVD helper that also exposes the right singular vectors spanning the
/// kernel. Rows are zero-padded when the matrix is wide so that all `cols`
/// right singular vectors are produced.
fn svd_with_full_v(m: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    if m.nrows() >= m.ncols() {
        return svd(m);
    }
    let mut padded = CMatrix::zeros(m.ncols(), m.ncols());
    padded.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    let (u_pad, s, v) = svd(&padded)?;
    let u = u_pad.rows(0, m.nrows()).into_owned();
    Ok((u, s, v))
}

/// Orthonormal frame of the numerical kernel of `M` (possibly zero columns).
pub fn orthonormal_nullspace(m: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    validate_finite(m)?;
    if m.ncols() == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    if m.nrows() == 0 {
        return Ok(identity(m.ncols()));
    }
    let (_, s, v) = svd_with_full_v(m)?;
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff(m.nrows(), m.ncols(), sigma_max);
    let rank = s.iter().take_while(|&&x| x > cutoff).count();
    Ok(v.columns(rank, v.ncols() - rank).into_owned())
}

/// Orthonormal frame of the numerical range of `M` (left singular vectors with
/// singular value above the rank cutoff).
pub fn orthonormal_range(m: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    validate_finite(m)?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(CMatrix::zeros(m.nrows(), 0));
    }
    let (u, s, _) = svd(m)?;
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff(m.nrows(), m.ncols(), sigma_max);
    let rank = s.iter().take_while(|&&x| x > cutoff).count();
    Ok(u.columns(0, rank).into_owned())
}

/// Numerical rank under the policy cutoff.
pub fn numerical_rank(m: &CMatrix, tol: &TolerancePolicy) -> Result<usize> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    let s = m.clone().singular_values();
    let sigma_max = s.max();
    let cutoff = tol.rank_cutoff(m.nrows(), m.ncols(), sigma_max);
    Ok(s.iter().filter(|&&x| x > cutoff).count())
}

/// Groups a sorted slice into clusters separated by gaps larger than `gap`.
/// Returns `(representative mean, multiplicity)` pairs in input order.
pub fn cluster_sorted(values: &[f64], gap: f64) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && (values[end] - values[end - 1]).abs() < gap {
            end += 1;
        }
        let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
        out.push((mean, end - start));
        start = end;
    }
    out
}

/// Largest absolute difference after sorting both multisets; infinity when the
/// lengths differ.
pub fn multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
