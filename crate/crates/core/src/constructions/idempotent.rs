//! Idempotent operators in block form `E = [[1, B], [0, 0]]`, their range and
//! kernel projections, the Moore-Penrose pseudoinverse
//! `E^† = P_{N(E)^⊥} P_{R(E)}`, the seven-way equivalence certificates, and
//! the geodesic distance between range and kernel `arctan(||B^{-1}||)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::geodesic_distance;
use crate::numerics::{self, identity, op_norm, svd, CMatrix};
use crate::projection::{projection_from_frame, Frame, Projection};
use crate::report::CheckRecord;
use crate::spectral::{
    biorthogonal_bases, cross_gram_offdiag_max, difference_spectrum, schmidt_decompose,
    sum_spectrum,
};
use crate::tolerance::TolerancePolicy;

/// An idempotent in block form relative to `H = L ⊕ S`: the `1,2` block `B`
/// maps the second summand into the first, and
/// `E = [[1_L, B], [0, 0]]` satisfies `E^2 = E` identically.
#[derive(Debug, Clone)]
pub struct IdempotentBlock {
    b: CMatrix,
}

impl IdempotentBlock {
    pub fn new(b: &CMatrix) -> Result<Self> {
        numerics::validate_finite(b)?;
        Ok(IdempotentBlock { b: b.clone() })
    }

    pub fn block(&self) -> &CMatrix {
        &self.b
    }

    /// dim L (rows of B, the range summand)
    pub fn dim_l(&self) -> usize {
        self.b.nrows()
    }

    /// dim S (columns of B)
    pub fn dim_s(&self) -> usize {
        self.b.ncols()
    }

    pub fn dim(&self) -> usize {
        self.dim_l() + self.dim_s()
    }

    /// Assembles `E = [[1, B], [0, 0]]`.
    pub fn assemble(&self) -> CMatrix {
        let (p, q) = (self.dim_l(), self.dim_s());
        let mut e = CMatrix::zeros(p + q, p + q);
        e.view_mut((0, 0), (p, p)).copy_from(&identity(p));
        e.view_mut((0, p), (p, q)).copy_from(&self.b);
        e
    }
}

/// Projections onto the range and the kernel of the idempotent.
///
/// `P_range` projects onto `R(E) = L ⊕ 0`. `P_null` is computed from the
/// resolvent formula `P_{N(E)} = (1 - E)(1 - E - E^*)^{-1}` (the middle factor
/// is always invertible for an idempotent) and cross-checked against the
/// explicit block matrix built from `B`:
/// `[[BB*(1+BB*)^{-1}, -B(1+B*B)^{-1}], [-B*(1+BB*)^{-1}, (1+B*B)^{-1}]]`.
pub fn idempotent_projections(
    blk: &IdempotentBlock,
    tol: &TolerancePolicy,
) -> Result<(Projection, Projection)> {
    let e = blk.assemble();
    let n = blk.dim();

    let range = numerics::orthonormal_range(&e, tol)?;
    let p_range = projection_from_frame(&Frame::new(&range)?, tol)?;

    let middle = identity(n) - &e - e.adjoint();
    let inverse = middle
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("1 - E - E* is not invertible".into()))?;
    let p_null_resolvent = (identity(n) - &e) * inverse;

    let p_null_blocks = null_projection_blocks(blk)?;
    let route_gap = op_norm(&(&p_null_resolvent - &p_null_blocks));
    if route_gap > 1e-9 {
        return Err(Error::NumericalFailure(format!(
            "kernel projection routes disagree by {route_gap:.3e}"
        )));
    }
    let p_null = Projection::new(&p_null_resolvent, tol)?;
    Ok((p_range, p_null))
}

/// The explicit block form of `P_{N(E)}` in terms of `B`.
fn null_projection_blocks(blk: &IdempotentBlock) -> Result<CMatrix> {
    let b = blk.block();
    let (p, q) = (blk.dim_l(), blk.dim_s());
    let bbs = b * b.adjoint();
    let bsb = b.adjoint() * b;
    let inv_bbs = (identity(p) + &bbs)
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("1 + BB* is not invertible".into()))?;
    let inv_bsb = (identity(q) + &bsb)
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("1 + B*B is not invertible".into()))?;
    let mut m = CMatrix::zeros(p + q, p + q);
    m.view_mut((0, 0), (p, p)).copy_from(&(&bbs * &inv_bbs));
    m.view_mut((0, p), (p, q)).copy_from(&(-(b * &inv_bsb)));
    m.view_mut((p, 0), (q, p))
        .copy_from(&(-(b.adjoint() * &inv_bbs)));
    m.view_mut((p, p), (q, q)).copy_from(&inv_bsb);
    Ok(m)
}

/// Moore-Penrose pseudoinverse of the idempotent:
/// `E^† = P_{N(E)^⊥} P_{R(E)}`.
pub fn moore_penrose_idempotent(blk: &IdempotentBlock, tol: &TolerancePolicy) -> Result<CMatrix> {
    let (p_range, p_null) = idempotent_projections(blk, tol)?;
    Ok(p_null.complement().matrix() * p_range.matrix())
}

/// SVD-based pseudoinverse, used as the independent oracle for
/// [`moore_penrose_idempotent`].
pub fn svd_pseudoinverse(m: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    let (u, s, v) = svd(m)?;
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff(m.nrows(), m.ncols(), sigma_max);
    let mut out = CMatrix::zeros(m.ncols(), m.nrows());
    for (k, &sk) in s.iter().enumerate() {
        if sk <= cutoff {
            break;
        }
        out += (v.column(k) * u.column(k).adjoint()).scale(1.0 / sk);
    }
    Ok(out)
}

/// Evidence for the seven equivalent statements about an idempotent: in
/// finite dimension all of them hold, and each item carries a certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SevenEquivalencesReport {
    /// singular values of E
    pub sv_e: Vec<f64>,
    /// singular values of B
    pub sv_b: Vec<f64>,
    /// Schmidt values of `P_{N(E)^⊥} P_{R(E)}`
    pub sv_null_perp_range: Vec<f64>,
    /// Schmidt values of `P_{N(E)} P_{R(E)}`
    pub sv_null_range: Vec<f64>,
    /// eigenvalues of `P_{R(E)} - P_{N(E)}`
    pub difference_eigenvalues: Vec<f64>,
    /// eigenvalues of `P_{R(E)} + P_{N(E)}`
    pub sum_eigenvalues: Vec<f64>,
    /// largest off-diagonal cross-Gram entry of the biorthogonal bases
    pub biorthogonality_offdiag: f64,
    pub checks: Vec<CheckRecord>,
}

impl SevenEquivalencesReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Produces the seven certificates: Schmidt data of `E` and `B`, Schmidt data
/// of the two projection products, diagonalizability of `P_{R(E)} ± P_{N(E)}`
/// (route agreement), and biorthogonal bases of `R(E)` and `N(E)`.
pub fn seven_equivalences_report(
    blk: &IdempotentBlock,
    tol: &TolerancePolicy,
) -> Result<SevenEquivalencesReport> {
    let e = blk.assemble();
    let mut checks = Vec::new();

    // 1. E is S-decomposable: SVD reconstruction residual.
    let (u, sv_e, v) = svd(&e)?;
    let diag = CMatrix::from_diagonal(&crate::numerics::CVector::from_iterator(
        sv_e.len(),
        sv_e.iter().map(|&s| num_complex::Complex64::new(s, 0.0)),
    ));
    let recon = &u * diag * v.adjoint();
    checks.push(CheckRecord::new(
        "svd_reconstruction_e",
        op_norm(&(recon - &e)),
        1e-9 * op_norm(&e).max(1.0),
    ));

    // 2. B is S-decomposable.
    let (_, sv_b, _) = svd(blk.block())?;

    let (p_range, p_null) = idempotent_projections(blk, tol)?;
    let p_null_perp = p_null.complement();

    // 3. Schmidt data of P_{N(E)^⊥} P_{R(E)}; its reconstruction is E^†.
    let schmidt_np_r = schmidt_decompose(&p_null_perp, &p_range, tol)?;
    let sv_null_perp_range = schmidt_np_r.values();
    let pinv = moore_penrose_idempotent(blk, tol)?;
    checks.push(CheckRecord::new(
        "schmidt_reconstruction_null_perp_range",
        op_norm(&(schmidt_np_r.reconstruct() - &pinv)),
        1e-9,
    ));

    // 4. Schmidt data of P_{N(E)} P_{R(E)}.
    let schmidt_n_r = schmidt_decompose(&p_null, &p_range, tol)?;
    let sv_null_range = schmidt_n_r.values();
    let t_nr = p_null.matrix() * p_range.matrix();
    checks.push(CheckRecord::new(
        "schmidt_reconstruction_null_range",
        op_norm(&(schmidt_n_r.reconstruct() - t_nr)),
        1e-9,
    ));

    // 5. P_{R(E)} - P_{N(E)} diagonalizable with cross-checked routes.
    let diff = difference_spectrum(&p_range, &p_null, tol)?;
    let difference_eigenvalues = diff.eigenvalue_multiset();
    checks.push(CheckRecord::exact(
        "difference_spectrum_routes_agree",
        diff.total_dim() == blk.dim(),
    ));

    // 6. P_{R(E)} + P_{N(E)} diagonalizable with cross-checked routes.
    let sum = sum_spectrum(&p_range, &p_null, tol)?;
    let sum_eigenvalues: Vec<f64> = sum
        .iter()
        .flat_map(|&(v, m)| std::iter::repeat(v).take(m))
        .collect();
    checks.push(CheckRecord::exact(
        "sum_spectrum_routes_agree",
        sum_eigenvalues.len() == blk.dim(),
    ));

    // 7. Biorthogonal bases of R(E) and N(E).
    let (basis_r, basis_n) = biorthogonal_bases(&p_range, &p_null, tol)?;
    let biorthogonality_offdiag = cross_gram_offdiag_max(&basis_r, &basis_n);
    checks.push(CheckRecord::new(
        "biorthogonal_bases_offdiag",
        biorthogonality_offdiag,
        1e-9,
    ));

    Ok(SevenEquivalencesReport {
        sv_e,
        sv_b,
        sv_null_perp_range,
        sv_null_range,
        difference_eigenvalues,
        sum_eigenvalues,
        biorthogonality_offdiag,
        checks,
    })
}

/// Geodesic distance between `P_{R(E)}` and `P_{N(E)}`.
///
/// For square `B` with smallest singular value above the rank cutoff this is
/// `arctan(||B^{-1}||) = arctan(1 / sigma_min(B))`, cross-checked against the
/// exponent norm computed by the geometry pipeline. Otherwise the degenerate
/// branch applies and the distance is `pi/2`.
pub fn idempotent_geodesic_distance(blk: &IdempotentBlock, tol: &TolerancePolicy) -> Result<f64> {
    let b = blk.block();
    let square = blk.dim_l() == blk.dim_s();
    let sigma_min = if square && blk.dim_l() > 0 {
        b.clone().singular_values().min()
    } else {
        0.0
    };
    let sigma_max = if blk.dim_l() > 0 && blk.dim_s() > 0 {
        op_norm(b)
    } else {
        0.0
    };
    // B acts inside E = [[1, B], [0, 0]], whose natural scale is 1, so the
    // degeneracy cutoff is taken relative to max(||B||, 1).
    let cutoff = tol.rank_cutoff(b.nrows().max(1), b.ncols().max(1), sigma_max.max(1.0));
    if !square || sigma_min <= cutoff {
        return Ok(std::f64::consts::FRAC_PI_2);
    }

    let (p_range, p_null) = idempotent_projections(blk, tol)?;
    let report = geodesic_distance(&p_range, &p_null, tol)?;
    let closed_form = (1.0 / sigma_min).atan();
    if (report.distance - closed_form).abs() > 1e-8 {
        return Err(Error::NumericalFailure(format!(
            "geodesic distance {:.12} disagrees with arctan(1/sigma_min) = {closed_form:.12}",
            report.distance
        )));
    }
    Ok(report.distance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{multiset_distance, ONE, ZERO};
    use crate::spectral::penrose_residual;
    use num_complex::Complex64;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn assemble_cases() {
        // B = 0: E is the diagonal coordinate projection
        let blk = IdempotentBlock::new(&CMatrix::zeros(2, 1)).unwrap();
        let e = blk.assemble();
        assert!(op_norm(&(&e * &e - &e)) < 1e-15);
        assert_eq!(e[(0, 0)], ONE);
        assert_eq!(e[(2, 2)], ZERO);

        // B = [1]
        let blk = IdempotentBlock::new(&CMatrix::from_row_slice(1, 1, &[ONE])).unwrap();
        let e = blk.assemble();
        let expected = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ZERO]);
        assert_eq!(e, expected);

        // B = [2]: idempotency is an algebraic identity
        let blk = IdempotentBlock::new(&CMatrix::from_row_slice(1, 1, &[c(2.0, 0.0)])).unwrap();
        let e = blk.assemble();
        assert!(op_norm(&(&e * &e - &e)) < 1e-15);
    }

    #[test]
    fn projections_cases() {
        let t = tol();
        // B = 0: kernel projection is the complementary coordinate projection
        let blk = IdempotentBlock::new(&CMatrix::zeros(1, 2)).unwrap();
        let (p_range, p_null) = idempotent_projections(&blk, &t).unwrap();
        assert_eq!(p_range.rank(), 1);
        assert!(op_norm(&(p_range.matrix() + p_null.matrix() - identity(3))) < 1e-12);

        // B = [1]: P_null = [[1,-1],[-1,1]]/2 and TT* entry 1/2
        let blk = IdempotentBlock::new(&CMatrix::from_row_slice(1, 1, &[ONE])).unwrap();
        let (p_range, p_null) = idempotent_projections(&blk, &t).unwrap();
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)],
        );
        assert!(op_norm(&(p_null.matrix() - expected)) < 1e-12);
        let t_mat = p_range.matrix() * p_null.matrix();
        let tts = &t_mat * t_mat.adjoint();
        let expected_tts = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), ZERO, ZERO, ZERO]);
        assert!(op_norm(&(tts - expected_tts)) < 1e-12);
    }

    #[test]
    fn moore_penrose_cases() {
        let t = tol();
        // B = 0: E is an orthogonal projection, so E^† = E
        let blk = IdempotentBlock::new(&CMatrix::zeros(2, 2)).unwrap();
        let pinv = moore_penrose_idempotent(&blk, &t).unwrap();
        assert!(op_norm(&(&pinv - blk.assemble())) < 1e-12);

        // B = [1]: E^† = [[0.5, 0], [0.5, 0]]
        let blk = IdempotentBlock::new(&CMatrix::from_row_slice(1, 1, &[ONE])).unwrap();
        let pinv = moore_penrose_idempotent(&blk, &t).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), ZERO, c(0.5, 0.0), ZERO]);
        assert!(op_norm(&(&pinv - expected)) < 1e-12);
        let e = blk.assemble();
        assert!(penrose_residual(&e, &pinv) < 1e-12);

        // random-ish rectangular block: Penrose residuals and oracle agreement
        let mut rng = crate::sampling::rng_from_seed(5);
        let b = crate::sampling::complex_gaussian(&mut rng, 3, 2);
        let blk = IdempotentBlock::new(&b).unwrap();
        let e = blk.assemble();
        let pinv = moore_penrose_idempotent(&blk, &t).unwrap();
        assert!(penrose_residual(&e, &pinv) < 1e-10);
        let oracle = svd_pseudoinverse(&e, &t).unwrap();
        assert!(op_norm(&(&pinv - oracle)) < 1e-10);

        // E E^† and E^† E are the expected projections
        let (p_range, p_null) = idempotent_projections(&blk, &t).unwrap();
        assert!(op_norm(&(&e * &pinv - p_range.matrix())) < 1e-9);
        assert!(op_norm(&(&pinv * &e - p_null.complement().matrix())) < 1e-9);
    }

    #[test]
    fn seven_equivalences_cases() {
        let t = tol();
        // B = 0: everything trivial
        let blk = IdempotentBlock::new(&CMatrix::zeros(1, 1)).unwrap();
        let report = seven_equivalences_report(&blk, &t).unwrap();
        assert!(report.all_pass());

        // B = [1]: singular value of P_{N(E)} P_{R(E)} is sqrt(1/2)
        let blk = IdempotentBlock::new(&CMatrix::from_row_slice(1, 1, &[ONE])).unwrap();
        let report = seven_equivalences_report(&blk, &t).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.sv_null_range.len(), 1);
        assert!((report.sv_null_range[0] - 0.5f64.sqrt()).abs() < 1e-12);

        // generic 4x4 block
        let mut rng = crate::sampling::rng_from_seed(17);
        let b = crate::sampling::complex_gaussian(&mut rng, 4, 4);
        let blk = IdempotentBlock::new(&b).unwrap();
        let report = seven_equivalences_report(&blk, &t).unwrap();
        assert!(report.all_pass(), "{:?}", report.checks);
    }

    #[test]
    fn geodesic_distance_cases() {
        let t = tol();
        // B = [2]: arctan(1/2)
        let blk = IdempotentBlock::new(&CMatrix::from_row_slice(1, 1, &[c(2.0, 0.0)])).unwrap();
        let d = idempotent_geodesic_distance(&blk, &t).unwrap();
        assert!((d - 0.5f64.atan()).abs() < 1e-10);
        assert!((d - 0.46364760900081).abs() < 1e-8);

        // B = identity: arctan(1) = pi/4
        let blk = IdempotentBlock::new(&identity(2)).unwrap();
        let d = idempotent_geodesic_distance(&blk, &t).unwrap();
        assert!((d - std::f64::consts::FRAC_PI_4).abs() < 1e-10);

        // B below the rank cutoff: degenerate branch pi/2
        let blk = IdempotentBlock::new(&CMatrix::from_row_slice(1, 1, &[c(1e-14, 0.0)])).unwrap();
        let d = idempotent_geodesic_distance(&blk, &t).unwrap();
        assert_eq!(d, std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn tan_law_for_exponent_angles() {
        // the exponent angles between R(E) and N(E) satisfy tan(theta) = 1/s(B)
        let t = tol();
        let mut rng = crate::sampling::rng_from_seed(23);
        let b = crate::sampling::random_invertible(&mut rng, 3).unwrap();
        let blk = IdempotentBlock::new(&b).unwrap();
        let (p_range, p_null) = idempotent_projections(&blk, &t).unwrap();
        let g = crate::geometry::generic_part(&p_range, &p_null, &t).unwrap();
        let data = crate::geometry::geodesic_exponent(&g, &t).unwrap();
        let thetas: Vec<f64> = data
            .theta
            .iter()
            .flat_map(|&(a, m)| std::iter::repeat(a).take(m))
            .collect();
        let expected: Vec<f64> = b
            .clone()
            .singular_values()
            .iter()
            .map(|&s| (1.0 / s).atan())
            .collect();
        assert!(multiset_distance(&thetas, &expected) < 1e-8);
    }

    #[test]
    fn buckholtz_difference_always_invertible() {
        let t = tol();
        let mut rng = crate::sampling::rng_from_seed(31);
        for (rows, cols) in [(1usize, 1usize), (2, 3), (4, 2), (3, 3)] {
            let b = crate::sampling::complex_gaussian(&mut rng, rows, cols);
            let blk = IdempotentBlock::new(&b).unwrap();
            let (p_range, p_null) = idempotent_projections(&blk, &t).unwrap();
            let d = crate::projection::dixmier_diagnostics(&p_range, &p_null, &t).unwrap();
            assert!(d.diff_invertible);
            assert!(d.sum_invertible);
        }
    }
}
