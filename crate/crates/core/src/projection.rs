//! Certified orthogonal projections and frames, products of projections,
//! Crimmins' criterion `TT*T = T^2`, the canonical factorization of a product,
//! and Dixmier-angle invertibility diagnostics for `P - Q` and `P + Q`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    self, identity, op_norm, orthonormal_nullspace, orthonormal_range, residual_below, svd,
    CMatrix,
};
use crate::tolerance::TolerancePolicy;

/// Gram deviation admitted for an orthonormal frame.
pub const FRAME_GRAM_TOL: f64 = 1e-10;

/// A certified orthogonal projection: Hermitian and idempotent within
/// `idempotent_tol`, with rank recovered from the trace.
///
/// Construction re-symmetrizes `(M + M^*)/2` and certifies rather than
/// rounding: matrices whose spectrum strays from `{0, 1}` beyond tolerance are
/// rejected. For a Hermitian matrix the certified residual `||M^2 - M||`
/// bounds the distance of every eigenvalue to `{0, 1}`, and the trace then
/// counts the eigenvalues at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    matrix: CMatrix,
    rank: usize,
}

impl Projection {
    pub fn new(matrix: &CMatrix, tol: &TolerancePolicy) -> Result<Self> {
        numerics::validate_finite(matrix)?;
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Validation(format!(
                "projection must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = matrix.nrows();
        if n == 0 {
            return Ok(Projection {
                matrix: CMatrix::zeros(0, 0),
                rank: 0,
            });
        }
        let (herm_dev, herm_ok) = residual_below(&(matrix - matrix.adjoint()), tol.idempotent_tol);
        if !herm_ok {
            return Err(Error::Validation(format!(
                "not Hermitian: ||M - M*|| = {herm_dev:.3e} exceeds {:.1e}",
                tol.idempotent_tol
            )));
        }
        let sym = (matrix + matrix.adjoint()).scale(0.5);
        let (idem_dev, idem_ok) = residual_below(&(&sym * &sym - &sym), tol.idempotent_tol);
        if !idem_ok {
            return Err(Error::Validation(format!(
                "not idempotent: ||M^2 - M|| = {idem_dev:.3e} exceeds {:.1e}",
                tol.idempotent_tol
            )));
        }
        let trace = sym.trace();
        let rank = trace.re.round();
        if (trace.re - rank).abs() > 2.0 * n as f64 * tol.idempotent_tol || rank < 0.0 {
            return Err(Error::Validation(format!(
                "trace {:.12} is not close to an integer rank",
                trace.re
            )));
        }
        Ok(Projection {
            matrix: sym,
            rank: rank as usize,
        })
    }

    /// Wraps a matrix already known to satisfy the projection contract
    /// (complements, coordinate compressions of reducing subspaces).
    pub(crate) fn from_certified(matrix: CMatrix, rank: usize) -> Self {
        Projection { matrix, rank }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The complementary projection `1 - P`.
    pub fn complement(&self) -> Projection {
        let n = self.dim();
        Projection::from_certified(identity(n) - &self.matrix, n - self.rank)
    }

    /// Orthonormal frame of the range (left singular vectors at sigma ~ 1).
    pub fn range_frame(&self) -> Result<Frame> {
        if self.rank == 0 {
            return Frame::new(&CMatrix::zeros(self.dim(), 0));
        }
        let (u, s, _) = svd(&self.matrix)?;
        let count = s.iter().take_while(|&&x| x > 0.5).count();
        if count != self.rank {
            return Err(Error::NumericalFailure(format!(
                "projection rank {} disagrees with singular value count {}",
                self.rank, count
            )));
        }
        Frame::new(&u.columns(0, count).into_owned())
    }

    /// Identity projection on an `n`-dimensional space.
    pub fn full(n: usize) -> Projection {
        Projection::from_certified(identity(n), n)
    }

    /// Zero projection on an `n`-dimensional space.
    pub fn zero(n: usize) -> Projection {
        Projection::from_certified(CMatrix::zeros(n, n), 0)
    }
}

/// A matrix with orthonormal columns (an isometry onto its column span).
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    matrix: CMatrix,
}

impl Frame {
    pub fn new(matrix: &CMatrix) -> Result<Self> {
        numerics::validate_finite(matrix)?;
        let k = matrix.ncols();
        if k > 0 {
            let gram = matrix.adjoint() * matrix;
            let (dev, ok) = residual_below(&(gram - identity(k)), FRAME_GRAM_TOL);
            if !ok {
                return Err(Error::Validation(format!(
                    "columns are not orthonormal: ||F*F - 1|| = {dev:.3e} exceeds {FRAME_GRAM_TOL:.1e}"
                )));
            }
        }
        Ok(Frame {
            matrix: matrix.clone(),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Ambient dimension (number of rows).
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of frame vectors (columns).
    pub fn len(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.ncols() == 0
    }
}

/// Projection onto the column span of a frame: `P = F F^*`.
pub fn projection_from_frame(frame: &Frame, tol: &TolerancePolicy) -> Result<Projection> {
    let p = frame.matrix() * frame.matrix().adjoint();
    let proj = Projection::new(&p, tol)?;
    if proj.rank() != frame.len() {
        return Err(Error::NumericalFailure(format!(
            "frame of {} columns produced a rank-{} projection",
            frame.len(),
            proj.rank()
        )));
    }
    Ok(proj)
}

/// Crimmins' criterion: `T` is a product of two orthogonal projections iff
/// `TT*T = T^2`. Returns the scale-free residual and the verdict.
pub fn crimmins_check(t: &CMatrix, tol: &TolerancePolicy) -> Result<(bool, f64)> {
    numerics::validate_finite(t)?;
    if t.nrows() != t.ncols() {
        return Err(Error::Validation(format!(
            "crimmins_check expects a square matrix, got {}x{}",
            t.nrows(),
            t.ncols()
        )));
    }
    let norm = op_norm(t);
    let lhs = t * t.adjoint() * t;
    let rhs = t * t;
    let residual = op_norm(&(lhs - rhs)) / (norm.powi(3)).max(1.0);
    Ok((residual <= tol.spectral_match, residual))
}

/// Crimmins' canonical factorization `T = P_range(T) * P_kernel(T)-perp`.
///
/// The first factor projects onto the numerical range of `T`, the second onto
/// the orthogonal complement of the numerical kernel.
pub fn canonical_factorization(
    t: &CMatrix,
    tol: &TolerancePolicy,
) -> Result<(Projection, Projection)> {
    let (is_product, residual) = crimmins_check(t, tol)?;
    if !is_product {
        return Err(Error::NotAProduct { residual });
    }
    let range = orthonormal_range(t, tol)?;
    let p = projection_from_frame(&Frame::new(&range)?, tol)?;
    let kernel = orthonormal_nullspace(t, tol)?;
    let q_frame = orthonormal_nullspace(&kernel.adjoint(), tol)?;
    let q = projection_from_frame(&Frame::new(&q_frame)?, tol)?;
    let recon = op_norm(&(p.matrix() * q.matrix() - t));
    if recon > tol.spectral_match * op_norm(t).max(1.0) {
        return Err(Error::NumericalFailure(format!(
            "canonical factorization residual {recon:.3e} exceeds tolerance"
        )));
    }
    Ok((p, q))
}

/// Membership test for the factorization set of `T`: decides whether
/// `P_S * P_T = T` for the subspaces spanned by the two frames, by testing the
/// three subspace inclusions that characterize valid pairs:
/// range(T) inside S, kernel(T)-perp inside T, and the two leftover pieces
/// (S minus range, T minus kernel-perp) inside `range(T)-perp ∩ N(T)`.
pub fn factorization_pair_check(
    t: &CMatrix,
    s_frame: &Frame,
    t_frame: &Frame,
    tol: &TolerancePolicy,
) -> Result<bool> {
    let (is_product, residual) = crimmins_check(t, tol)?;
    if !is_product {
        return Err(Error::NotAProduct { residual });
    }
    if s_frame.dim() != t.nrows() || t_frame.dim() != t.nrows() {
        return Err(Error::Validation(
            "frames must live in the ambient space of T".into(),
        ));
    }
    let scale = op_norm(t).max(1.0);
    let check_tol = tol.spectral_match * scale;

    let p_s = s_frame.matrix() * s_frame.matrix().adjoint();
    let p_t = t_frame.matrix() * t_frame.matrix().adjoint();

    let range = orthonormal_range(t, tol)?;
    let kernel_perp = {
        let kernel = orthonormal_nullspace(t, tol)?;
        orthonormal_nullspace(&kernel.adjoint(), tol)?
    };

    // Inclusion 1: range(T) fixed by P_S.
    if op_norm(&(&p_s * &range - &range)) > check_tol {
        return Ok(false);
    }
    // Inclusion 2: kernel(T)-perp fixed by P_T.
    if op_norm(&(&p_t * &kernel_perp - &kernel_perp)) > check_tol {
        return Ok(false);
    }
    // Inclusion 3: the leftover pieces must be annihilated by both T and T*.
    let p_range = &range * range.adjoint();
    let p_kperp = &kernel_perp * kernel_perp.adjoint();
    let s_extra = &p_s - &p_range;
    let t_extra = &p_t - &p_kperp;
    for extra in [&s_extra, &t_extra] {
        if op_norm(&(t * extra)) > check_tol || op_norm(&(t.adjoint() * extra)) > check_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dixmier-angle diagnostics for a pair of projections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DixmierDiagnostics {
    /// `||PQ||`, the cosine of the angle between the ranges.
    pub norm_pq: f64,
    /// `||(1-P)(1-Q)||`, the cosine of the angle between the kernels.
    pub norm_pc_qc: f64,
    /// `P - Q` invertible (both cosines strictly below 1).
    pub diff_invertible: bool,
    /// `P + Q` invertible (kernel cosine strictly below 1).
    pub sum_invertible: bool,
}

/// Computes both Dixmier angle cosines and the invertibility of `P - Q` and
/// `P + Q`, cross-checking the angle criterion against the smallest singular
/// values of the difference and the sum.
pub fn dixmier_diagnostics(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<DixmierDiagnostics> {
    if p.dim() != q.dim() {
        return Err(Error::Validation(format!(
            "dimension mismatch: {} vs {}",
            p.dim(),
            q.dim()
        )));
    }
    let n = p.dim();
    let norm_pq = op_norm(&(p.matrix() * q.matrix()));
    let norm_pc_qc = op_norm(&(p.complement().matrix() * q.complement().matrix()));

    let diff_by_angles = norm_pq < 1.0 - tol.unit_circle_tol && norm_pc_qc < 1.0 - tol.unit_circle_tol;
    let sum_by_angles = norm_pc_qc < 1.0 - tol.unit_circle_tol;

    // sigma_min(P - Q)^2 = 1 - max(||PQ||, ||(1-P)(1-Q)||)^2, so the matched
    // threshold for the direct check is sqrt(2 * unit_circle_tol).
    let sigma_threshold = (2.0 * tol.unit_circle_tol).sqrt();
    let sigma_of = |m: &CMatrix| -> f64 {
        if n == 0 {
            return f64::INFINITY;
        }
        m.clone().singular_values().min()
    };
    let diff_by_sigma = sigma_of(&(p.matrix() - q.matrix())) > sigma_threshold;
    let sum_by_sigma = sigma_of(&(p.matrix() + q.matrix())) > sigma_threshold;

    if diff_by_angles != diff_by_sigma || sum_by_angles != sum_by_sigma {
        return Err(Error::NumericalFailure(format!(
            "angle criterion and sigma_min disagree: diff {diff_by_angles}/{diff_by_sigma}, \
             sum {sum_by_angles}/{sum_by_sigma} (||PQ|| = {norm_pq:.12}, ||PcQc|| = {norm_pc_qc:.12})"
        )));
    }

    Ok(DixmierDiagnostics {
        norm_pq,
        norm_pc_qc,
        diff_invertible: diff_by_angles,
        sum_invertible: sum_by_angles,
    })
}

/// Projection pair spanning two lines of the real plane at the given angle.
/// Handy oracle: every closed-form 2x2 example reduces to it.
pub fn angle_pair(alpha: f64, tol: &TolerancePolicy) -> Result<(Projection, Projection)> {
    let p = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    let (c, s) = (alpha.cos(), alpha.sin());
    let q = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c * c, 0.0),
            Complex64::new(c * s, 0.0),
            Complex64::new(c * s, 0.0),
            Complex64::new(s * s, 0.0),
        ],
    );
    Ok((Projection::new(&p, tol)?, Projection::new(&q, tol)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{ONE, ZERO};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn projection_certification() {
        let p = Projection::new(&identity(3), &tol()).unwrap();
        assert_eq!(p.rank(), 3);

        let near = CMatrix::from_row_slice(2, 2, &[c(1.0 + 1e-6, 0.0), ZERO, ZERO, ZERO]);
        assert!(Projection::new(&near, &tol()).is_err());

        let skew = CMatrix::from_row_slice(2, 2, &[ONE, c(1e-6, 0.0), ZERO, ZERO]);
        assert!(Projection::new(&skew, &tol()).is_err());
    }

    #[test]
    fn frame_to_projection_cases() {
        // single column e1 in C^2
        let f = Frame::new(&CMatrix::from_row_slice(2, 1, &[ONE, ZERO])).unwrap();
        let p = projection_from_frame(&f, &tol()).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        assert!(op_norm(&(p.matrix() - expected)) < 1e-14);

        // (cos a, sin a) column gives the rank-one outer product
        let a = 0.7f64;
        let f = Frame::new(&CMatrix::from_row_slice(2, 1, &[c(a.cos(), 0.0), c(a.sin(), 0.0)]))
            .unwrap();
        let p = projection_from_frame(&f, &tol()).unwrap();
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(a.cos() * a.cos(), 0.0),
                c(a.cos() * a.sin(), 0.0),
                c(a.cos() * a.sin(), 0.0),
                c(a.sin() * a.sin(), 0.0),
            ],
        );
        assert!(op_norm(&(p.matrix() - expected)) < 1e-14);

        // full identity frame
        let f = Frame::new(&identity(3)).unwrap();
        let p = projection_from_frame(&f, &tol()).unwrap();
        assert_eq!(p.rank(), 3);

        // non-orthonormal columns rejected
        let bad = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ZERO]);
        assert!(Frame::new(&bad).is_err());
    }

    #[test]
    fn projection_from_own_range_is_stable() {
        let (_, q) = angle_pair(0.9, &tol()).unwrap();
        let frame = q.range_frame().unwrap();
        let rebuilt = projection_from_frame(&frame, &tol()).unwrap();
        assert!(op_norm(&(rebuilt.matrix() - q.matrix())) < 1e-10);
    }

    #[test]
    fn crimmins_examples() {
        // T = P_{e1} P_{(1,1)/sqrt2} = [[0.5, 0.5], [0, 0]]
        let t = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), ZERO, ZERO]);
        let (ok, residual) = crimmins_check(&t, &tol()).unwrap();
        assert!(ok, "residual {residual}");
        assert!(residual < 1e-14);

        // any projection is a product of itself with itself
        let (p, _) = angle_pair(0.3, &tol()).unwrap();
        let (ok, _) = crimmins_check(p.matrix(), &tol()).unwrap();
        assert!(ok);

        // the nilpotent shift is not a product: TT*T = T while T^2 = 0
        let t = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let (ok, residual) = crimmins_check(&t, &tol()).unwrap();
        assert!(!ok);
        assert!((residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_factorization_examples() {
        let t = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let (p, q) = canonical_factorization(&t, &tol()).unwrap();
        assert!(op_norm(&(p.matrix() - &t)) < 1e-12);
        assert!(op_norm(&(q.matrix() - &t)) < 1e-12);

        let t = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), ZERO, ZERO]);
        let (p, q) = canonical_factorization(&t, &tol()).unwrap();
        let p_expected = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let q_expected = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
        );
        assert!(op_norm(&(p.matrix() - p_expected)) < 1e-12);
        assert!(op_norm(&(q.matrix() - q_expected)) < 1e-12);

        let t = CMatrix::zeros(3, 3);
        let (p, q) = canonical_factorization(&t, &tol()).unwrap();
        assert_eq!(p.rank(), 0);
        assert_eq!(q.rank(), 0);

        let bad = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(
            canonical_factorization(&bad, &tol()),
            Err(Error::NotAProduct { .. })
        ));
    }

    #[test]
    fn factorization_pair_membership() {
        // T = P_{e1} P_{diag plane} in C^3, extended by a vector in R(T)-perp ∩ N(T).
        let e1 = CMatrix::from_row_slice(3, 1, &[ONE, ZERO, ZERO]);
        let diag = CMatrix::from_row_slice(
            3,
            1,
            &[c(1.0 / 2f64.sqrt(), 0.0), c(1.0 / 2f64.sqrt(), 0.0), ZERO],
        );
        let p = &e1 * e1.adjoint();
        let q = &diag * diag.adjoint();
        let t = &p * &q;

        let s_frame = Frame::new(&e1).unwrap();
        let t_frame = Frame::new(&diag).unwrap();
        assert!(factorization_pair_check(&t, &s_frame, &t_frame, &tol()).unwrap());

        // e3 lies in R(T)-perp ∩ N(T); enlarging S with it keeps the product.
        let mut enlarged = CMatrix::zeros(3, 2);
        enlarged.set_column(0, &e1.column(0));
        enlarged[(2, 1)] = ONE;
        let s_big = Frame::new(&enlarged).unwrap();
        assert!(factorization_pair_check(&t, &s_big, &t_frame, &tol()).unwrap());
        let p_big = s_big.matrix() * s_big.matrix().adjoint();
        assert!(op_norm(&(&p_big * &q - &t)) < 1e-12);

        // e2 violates the inclusion (it does not annihilate T*).
        let mut wrong = CMatrix::zeros(3, 2);
        wrong.set_column(0, &e1.column(0));
        wrong[(1, 1)] = ONE;
        let s_wrong = Frame::new(&wrong).unwrap();
        assert!(!factorization_pair_check(&t, &s_wrong, &t_frame, &tol()).unwrap());
        let p_wrong = s_wrong.matrix() * s_wrong.matrix().adjoint();
        assert!(op_norm(&(&p_wrong * &q - &t)) > 1e-3);
    }

    #[test]
    fn dixmier_cases() {
        let t = tol();
        let p = Projection::new(
            &CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]),
            &t,
        )
        .unwrap();

        // P = Q: ranges coincide, difference not invertible
        let d = dixmier_diagnostics(&p, &p, &t).unwrap();
        assert!((d.norm_pq - 1.0).abs() < 1e-12);
        assert!(!d.diff_invertible);

        // orthogonal complements: both invertible with zero cosines
        let q = p.complement();
        let d = dixmier_diagnostics(&p, &q, &t).unwrap();
        assert!(d.norm_pq < 1e-12 && d.norm_pc_qc < 1e-12);
        assert!(d.diff_invertible && d.sum_invertible);

        // 2D angle pair at pi/3: cosine 1/2, difference invertible
        let (p, q) = angle_pair(std::f64::consts::FRAC_PI_3, &t).unwrap();
        let d = dixmier_diagnostics(&p, &q, &t).unwrap();
        assert!((d.norm_pq - 0.5).abs() < 1e-10);
        assert!((d.norm_pc_qc - 0.5).abs() < 1e-10);
        assert!(d.diff_invertible && d.sum_invertible);
    }
}
