//! Grassmann geometry of a projection pair: reduction to the generic part,
//! Davis' symmetry `V`, the geodesic exponent `X` with `e^{iX} P' e^{-iX} = Q'`,
//! its explicit diagonalization, geodesic curves, midpoints and distances.
//!
//! On the generic part `H' = N(P + Q - 1)^⊥` the operator `S' = P' + Q' - 1`
//! is invertible; the unitary part `V` of its polar decomposition is a
//! symmetry that swaps `P'` and `Q'`, and `X = -i log(V (2P' - 1))` is the
//! Hermitian, `P'`-codiagonal exponent of the unique short geodesic joining
//! the two projections. Its norm is the geodesic distance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    cluster_sorted, exp_i_hermitian, hermitian_eig, hermitian_sqrt_psd, identity, op_norm,
    orthonormal_nullspace, polar_unitary_part, principal_log_unitary, CMatrix,
};
use crate::projection::{Frame, Projection};
use crate::spectral::SchmidtDecomposition;
use crate::tolerance::TolerancePolicy;

/// Splitting of the space into the generic part `H'` and the degenerate part
/// `N(P + Q - 1) = R(P) ∩ N(Q) ⊕ N(P) ∩ R(Q)`, with the two projections
/// compressed to `H'` in the coordinates of `generic_frame`.
#[derive(Debug, Clone)]
pub struct GenericPartDecomposition {
    pub generic_frame: Frame,
    pub degenerate_frame: Frame,
    pub p_prime: Projection,
    pub q_prime: Projection,
    /// dim R(P) ∩ N(Q)
    pub plus_part_dim: usize,
    /// dim N(P) ∩ R(Q)
    pub minus_part_dim: usize,
}

impl GenericPartDecomposition {
    pub fn generic_dim(&self) -> usize {
        self.generic_frame.len()
    }

    pub fn degenerate_dim(&self) -> usize {
        self.degenerate_frame.len()
    }
}

/// Davis symmetry, geodesic exponent and distance on the generic part.
#[derive(Debug, Clone)]
pub struct GeodesicData {
    /// the symmetry `V` (Hermitian unitary with `V P' V = Q'`)
    pub v: CMatrix,
    /// Hermitian exponent with `e^{iX} P' e^{-iX} = Q'`, `||X|| <= pi/2`
    pub x: CMatrix,
    /// geodesic distance on the generic part, `||X|| = max theta`
    pub distance: f64,
    /// positive eigen-angles of `X` with multiplicities, ascending in `(0, pi/2]`
    pub theta: Vec<(f64, usize)>,
    /// residuals of all certified identities
    pub certificate: GeodesicCertificate,
}

/// Residuals of the identities certified by [`geodesic_exponent`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicCertificate {
    pub v_hermitian: f64,
    pub v_involution: f64,
    pub v_swaps_p_to_q: f64,
    pub v_swaps_q_to_p: f64,
    pub v_anticommutes_with_a: f64,
    pub x_hermitian: f64,
    pub x_norm_excess: f64,
    pub x_codiagonal_p: f64,
    pub x_codiagonal_p_perp: f64,
    pub conjugation: f64,
    pub exponential_formula: f64,
}

impl GeodesicCertificate {
    pub fn max_residual(&self) -> f64 {
        [
            self.v_hermitian,
            self.v_involution,
            self.v_swaps_p_to_q,
            self.v_swaps_q_to_p,
            self.v_anticommutes_with_a,
            self.x_hermitian,
            self.x_norm_excess,
            self.x_codiagonal_p,
            self.x_codiagonal_p_perp,
            self.conjugation,
            self.exponential_formula,
        ]
        .into_iter()
        .fold(0.0, f64::max)
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

/// Compresses a projection to the subspace spanned by `frame` (which must
/// reduce it) and certifies the result.
fn compress_projection(
    p: &Projection,
    frame: &Frame,
    tol: &TolerancePolicy,
) -> Result<Projection> {
    let compressed = frame.matrix().adjoint() * p.matrix() * frame.matrix();
    Projection::new(&compressed, tol)
}

/// Splits the space into the generic part `H' = N(P + Q - 1)^⊥` and the
/// degenerate part, compressing `P` and `Q` to `H'`. The degenerate part is
/// exactly `R(P) ∩ N(Q) ⊕ N(P) ∩ R(Q)`; the split reduces both projections,
/// which is re-verified through the reduction residual `||(1 - Pi) P Pi||`.
pub fn generic_part(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<GenericPartDecomposition> {
    let n = check_same_dim(p, q)?;
    let s_op = p.matrix() + q.matrix() - identity(n);
    let degenerate = orthonormal_nullspace(&s_op, tol)?;
    let generic = orthonormal_nullspace(&degenerate.adjoint(), tol)?;
    let generic_frame = Frame::new(&generic)?;
    let degenerate_frame = Frame::new(&degenerate)?;

    // Reduction residuals: H' must be invariant under both projections.
    let r = generic_frame.len();
    let pi = generic_frame.matrix() * generic_frame.matrix().adjoint();
    let co_pi = identity(n) - &pi;
    for (name, m) in [("P", p.matrix()), ("Q", q.matrix())] {
        let residual = op_norm(&(&co_pi * m * &pi));
        if residual > 1e-8 {
            return Err(Error::NumericalFailure(format!(
                "generic part does not reduce {name}: residual {residual:.3e}"
            )));
        }
    }

    let p_prime = if r == 0 {
        Projection::zero(0)
    } else {
        compress_projection(p, &generic_frame, tol)?
    };
    let q_prime = if r == 0 {
        Projection::zero(0)
    } else {
        compress_projection(q, &generic_frame, tol)?
    };

    // On the degenerate part P acts as the projection onto R(P) ∩ N(Q).
    let k = degenerate_frame.len();
    let plus_part_dim = if k == 0 {
        0
    } else {
        compress_projection(p, &degenerate_frame, tol)?.rank()
    };
    let minus_part_dim = k - plus_part_dim;

    Ok(GenericPartDecomposition {
        generic_frame,
        degenerate_frame,
        p_prime,
        q_prime,
        plus_part_dim,
        minus_part_dim,
    })
}

/// Davis' symmetry on the generic part: the unitary part of the polar
/// decomposition of `S' = P' + Q' - 1`. It is a Hermitian involution with
/// `V P' V = Q'` and `V Q' V = P'`.
pub fn davis_symmetry(g: &GenericPartDecomposition, tol: &TolerancePolicy) -> Result<CMatrix> {
    let r = g.generic_dim();
    if r == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let s_prime = g.p_prime.matrix() + g.q_prime.matrix() - identity(r);
    polar_unitary_part(&s_prime, tol)
}

/// Residuals of the reconstruction formulas
/// `P' = (1 + A' + V sqrt(1 - A'^2)) / 2` and
/// `Q' = (1 - A' + V sqrt(1 - A'^2)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DavisResiduals {
    pub p_residual: f64,
    pub q_residual: f64,
}

pub fn davis_reconstruction_check(
    g: &GenericPartDecomposition,
    v: &CMatrix,
    tol: &TolerancePolicy,
) -> Result<DavisResiduals> {
    let r = g.generic_dim();
    if r == 0 {
        return Ok(DavisResiduals {
            p_residual: 0.0,
            q_residual: 0.0,
        });
    }
    let a = g.p_prime.matrix() - g.q_prime.matrix();
    let sqrt_term = hermitian_sqrt_psd(&(identity(r) - &a * &a), 1e-10, tol)?;
    let common = v * &sqrt_term;
    let p_rec = (identity(r) + &a + &common).scale(0.5);
    let q_rec = (identity(r) - &a + &common).scale(0.5);
    Ok(DavisResiduals {
        p_residual: op_norm(&(p_rec - g.p_prime.matrix())),
        q_residual: op_norm(&(q_rec - g.q_prime.matrix())),
    })
}

/// Geodesic exponent on a nonempty generic part:
/// `X = -i log(V (2P' - 1))`, Hermitian, `P'`-codiagonal, `||X|| <= pi/2`,
/// with `e^{iX} P' e^{-iX} = Q'`. Every invariant is certified; the
/// independent formula `e^{iX} = V A' + sqrt(1 - A'^2)` is cross-checked.
pub fn geodesic_exponent(
    g: &GenericPartDecomposition,
    tol: &TolerancePolicy,
) -> Result<GeodesicData> {
    let r = g.generic_dim();
    if r == 0 {
        return Err(Error::Validation(
            "geodesic exponent requires a nonempty generic part".into(),
        ));
    }
    let v = davis_symmetry(g, tol)?;
    let p_mat = g.p_prime.matrix();
    let q_mat = g.q_prime.matrix();
    let a = p_mat - q_mat;

    let reflector = p_mat.scale(2.0) - identity(r);
    let w = &v * &reflector;
    let x = principal_log_unitary(&w, tol)?;

    let exp_ix = exp_i_hermitian(&x, tol)?;
    let sqrt_term = hermitian_sqrt_psd(&(identity(r) - &a * &a), 1e-10, tol)?;
    let p_perp = identity(r) - p_mat;

    let certificate = GeodesicCertificate {
        v_hermitian: op_norm(&(&v - v.adjoint())),
        v_involution: op_norm(&(&v * &v - identity(r))),
        v_swaps_p_to_q: op_norm(&(&v * p_mat * &v - q_mat)),
        v_swaps_q_to_p: op_norm(&(&v * q_mat * &v - p_mat)),
        v_anticommutes_with_a: op_norm(&(&v * &a + &a * &v)),
        x_hermitian: op_norm(&(&x - x.adjoint())),
        x_norm_excess: (op_norm(&x) - std::f64::consts::FRAC_PI_2).max(0.0),
        x_codiagonal_p: op_norm(&(p_mat * &x * p_mat)),
        x_codiagonal_p_perp: op_norm(&(&p_perp * &x * &p_perp)),
        conjugation: op_norm(&(&exp_ix * p_mat * exp_ix.adjoint() - q_mat)),
        exponential_formula: op_norm(&(&exp_ix - (&v * &a + &sqrt_term))),
    };
    let bounds = [
        (certificate.v_hermitian, 1e-9),
        (certificate.v_involution, 1e-9),
        (certificate.v_swaps_p_to_q, 1e-9),
        (certificate.v_swaps_q_to_p, 1e-9),
        (certificate.v_anticommutes_with_a, 1e-9),
        (certificate.x_hermitian, 1e-9),
        (certificate.x_norm_excess, 1e-9),
        (certificate.x_codiagonal_p, 1e-9),
        (certificate.x_codiagonal_p_perp, 1e-9),
        (certificate.conjugation, 1e-8),
        (certificate.exponential_formula, 1e-9),
    ];
    if bounds.iter().any(|&(res, bound)| res > bound) {
        return Err(Error::NumericalFailure(format!(
            "geodesic certificate violated: {certificate:?}"
        )));
    }

    let (eigs, _) = hermitian_eig(&x, tol)?;
    let distance = eigs.iter().fold(0.0f64, |m, &t| m.max(t.abs()));
    let positive: Vec<f64> = eigs
        .iter()
        .copied()
        .filter(|&t| t > tol.cluster_gap(1.0))
        .collect();
    let theta = cluster_sorted(&positive, tol.cluster_gap(1.0));

    Ok(GeodesicData {
        v,
        x,
        distance,
        theta,
        certificate,
    })
}

/// Eigenpair of the exponent `X`: `X eta = +theta eta`, `X zeta = -theta zeta`.
#[derive(Debug, Clone)]
pub struct ExponentEigenpair {
    pub theta: f64,
    pub eta: crate::numerics::CVector,
    pub zeta: crate::numerics::CVector,
}

/// Explicit diagonalization of the exponent from the Schmidt data of
/// `P'Q'`: for each triple with `s < 1`,
/// `nu = (sqrt(1-s^2) - 1) xi + s psi` (normalized), `omega = V nu`,
/// `eta = (nu - i omega)/sqrt(2)` and `zeta = (nu + i omega)/sqrt(2)` satisfy
/// `X eta = +arccos(s) eta` and `X zeta = -arccos(s) zeta`. The pairing
/// `omega = V nu` fixes the phase freedom inside degenerate clusters.
pub fn exponent_diagonalization(
    g: &GenericPartDecomposition,
    data: &GeodesicData,
    schmidt_prime: &SchmidtDecomposition,
    tol: &TolerancePolicy,
) -> Result<Vec<ExponentEigenpair>> {
    if schmidt_prime.dim() != g.generic_dim() {
        return Err(Error::Validation(
            "Schmidt data must live on the generic part".into(),
        ));
    }
    let inv_sqrt2 = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let i_unit = Complex64::new(0.0, 1.0);
    let mut out = Vec::new();
    for t in &schmidt_prime.triples()[schmidt_prime.dim_ones()..] {
        let s = t.s.clamp(0.0, 1.0);
        let lambda = (1.0 - s * s).sqrt();
        let theta = s.acos();
        let nu_raw = t.xi.scale(lambda - 1.0) + t.psi.scale(s);
        let norm = nu_raw.norm();
        if norm <= tol.cluster_gap(1.0) {
            continue;
        }
        let nu = nu_raw / Complex64::new(norm, 0.0);
        let omega = &data.v * &nu;
        let eta = (&nu - &omega * i_unit) * inv_sqrt2;
        let zeta = (&nu + &omega * i_unit) * inv_sqrt2;
        let res_eta = (&data.x * &eta - &eta * Complex64::new(theta, 0.0)).norm();
        let res_zeta = (&data.x * &zeta + &zeta * Complex64::new(theta, 0.0)).norm();
        if res_eta > 1e-8 || res_zeta > 1e-8 {
            return Err(Error::NumericalFailure(format!(
                "exponent eigenpair residuals {res_eta:.3e} / {res_zeta:.3e} exceed 1e-8 \
                 at theta = {theta:.6}"
            )));
        }
        out.push(ExponentEigenpair { theta, eta, zeta });
    }
    Ok(out)
}

/// A point of the geodesic: `P(t) = e^{itX} P' e^{-itX}`, re-certified as a
/// projection. `t = 0` gives `P'`, `t = 1` gives `Q'`, and the midpoint
/// `t = 1/2` is `(1 + V)/2`.
pub fn geodesic_point(
    g: &GenericPartDecomposition,
    data: &GeodesicData,
    t: f64,
    tol: &TolerancePolicy,
) -> Result<Projection> {
    let r = g.generic_dim();
    if r == 0 {
        return Ok(Projection::zero(0));
    }
    let u = exp_i_hermitian(&data.x.scale(t), tol)?;
    let moved = &u * g.p_prime.matrix() * u.adjoint();
    Projection::new(&moved, tol)
}

/// Geodesic distance report: the generic-part distance together with the
/// degenerate dimensions. When the degenerate part is nonzero there is no
/// geodesic exponent on the full space and the distance is `pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    /// distance on the whole space
    pub distance: f64,
    /// distance of the compressed pair on the generic part
    pub generic_distance: f64,
    /// dim R(P) ∩ N(Q)
    pub plus_part_dim: usize,
    /// dim N(P) ∩ R(Q)
    pub minus_part_dim: usize,
}

/// Geodesic (Porta-Recht) distance between two projections: `||X||` when the
/// degenerate part is trivial, `pi/2` otherwise (with the generic-part
/// distance reported alongside).
pub fn geodesic_distance(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<DistanceReport> {
    check_same_dim(p, q)?;
    let g = generic_part(p, q, tol)?;
    let generic_distance = if g.generic_dim() == 0 {
        0.0
    } else {
        geodesic_exponent(&g, tol)?.distance
    };
    let degenerate = g.degenerate_dim();
    let distance = if degenerate > 0 {
        std::f64::consts::FRAC_PI_2
    } else {
        generic_distance
    };
    Ok(DistanceReport {
        distance,
        generic_distance,
        plus_part_dim: g.plus_part_dim,
        minus_part_dim: g.minus_part_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{multiset_distance, ONE, ZERO};
    use crate::projection::angle_pair;
    use crate::spectral::schmidt_decompose;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag_projection(bits: &[u8]) -> Projection {
        let n = bits.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            if i == j && bits[i] == 1 {
                ONE
            } else {
                ZERO
            }
        });
        Projection::new(&m, &tol()).unwrap()
    }

    fn block_pair(angles: &[f64]) -> (Projection, Projection) {
        let t = tol();
        let n = 2 * angles.len();
        let mut pm = CMatrix::zeros(n, n);
        let mut qm = CMatrix::zeros(n, n);
        for (k, &a) in angles.iter().enumerate() {
            let (p, q) = angle_pair(a, &t).unwrap();
            pm.view_mut((2 * k, 2 * k), (2, 2)).copy_from(p.matrix());
            qm.view_mut((2 * k, 2 * k), (2, 2)).copy_from(q.matrix());
        }
        (
            Projection::new(&pm, &t).unwrap(),
            Projection::new(&qm, &t).unwrap(),
        )
    }

    #[test]
    fn generic_part_cases() {
        let t = tol();
        // fully degenerate on orthogonal lines
        let p = diag_projection(&[1, 0]);
        let q = diag_projection(&[0, 1]);
        let g = generic_part(&p, &q, &t).unwrap();
        assert_eq!(g.generic_dim(), 0);
        assert_eq!((g.plus_part_dim, g.minus_part_dim), (1, 1));

        // angle pair: fully generic
        let (p, q) = angle_pair(FRAC_PI_3, &t).unwrap();
        let g = generic_part(&p, &q, &t).unwrap();
        assert_eq!(g.generic_dim(), 2);
        assert_eq!(g.degenerate_dim(), 0);

        // block sum of both recovers each part
        let mut pm = CMatrix::zeros(4, 4);
        let mut qm = CMatrix::zeros(4, 4);
        pm[(0, 0)] = ONE;
        qm[(1, 1)] = ONE;
        let (pa, qa) = angle_pair(FRAC_PI_3, &t).unwrap();
        pm.view_mut((2, 2), (2, 2)).copy_from(pa.matrix());
        qm.view_mut((2, 2), (2, 2)).copy_from(qa.matrix());
        let p = Projection::new(&pm, &t).unwrap();
        let q = Projection::new(&qm, &t).unwrap();
        let g = generic_part(&p, &q, &t).unwrap();
        assert_eq!(g.generic_dim(), 2);
        assert_eq!((g.plus_part_dim, g.minus_part_dim), (1, 1));
    }

    #[test]
    fn davis_symmetry_cases() {
        let t = tol();
        // P' = Q' = diag(1, 0): S' = diag(1, -1) is already a symmetry
        let p = diag_projection(&[1, 0]);
        let g = generic_part(&p, &p, &t).unwrap();
        let v = davis_symmetry(&g, &t).unwrap();
        // coordinates of H' may permute, so compare spectra and action
        let (vals, _) = hermitian_eig(&v, &t).unwrap();
        assert!(multiset_distance(&vals, &[-1.0, 1.0]) < 1e-10);
        assert!(op_norm(&(&v * g.p_prime.matrix() * &v - g.q_prime.matrix())) < 1e-10);

        // 2D angle pair: reflection through the bisector of the two lines
        let (p, q) = angle_pair(FRAC_PI_3, &t).unwrap();
        let g = generic_part(&p, &q, &t).unwrap();
        let v = davis_symmetry(&g, &t).unwrap();
        let frame = g.generic_frame.matrix();
        let v_ambient = frame * &v * frame.adjoint();
        let half = FRAC_PI_3 / 2.0;
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[
                c((2.0 * half).cos(), 0.0),
                c((2.0 * half).sin(), 0.0),
                c((2.0 * half).sin(), 0.0),
                c(-(2.0 * half).cos(), 0.0),
            ],
        );
        assert!(op_norm(&(v_ambient - expected)) < 1e-10);

        // dim-4 two-angle block pair: V is block diagonal in the same blocks
        let (p, q) = block_pair(&[FRAC_PI_6, FRAC_PI_3]);
        let g = generic_part(&p, &q, &t).unwrap();
        let v = davis_symmetry(&g, &t).unwrap();
        let frame = g.generic_frame.matrix();
        let v_ambient = frame * &v * frame.adjoint();
        for (k, &a) in [FRAC_PI_6, FRAC_PI_3].iter().enumerate() {
            let block = v_ambient.view((2 * k, 2 * k), (2, 2)).into_owned();
            let expected = CMatrix::from_row_slice(
                2,
                2,
                &[c(a.cos(), 0.0), c(a.sin(), 0.0), c(a.sin(), 0.0), c(-a.cos(), 0.0)],
            );
            assert!(op_norm(&(block - expected)) < 1e-10);
        }
        assert!(op_norm(&(v_ambient.view((0, 2), (2, 2)).into_owned())) < 1e-10);
    }

    #[test]
    fn davis_reconstruction_cases() {
        let t = tol();
        let (p, q) = angle_pair(FRAC_PI_3, &t).unwrap();
        let g = generic_part(&p, &q, &t).unwrap();
        let v = davis_symmetry(&g, &t).unwrap();
        let res = davis_reconstruction_check(&g, &v, &t).unwrap();
        assert!(res.p_residual < 1e-12 && res.q_residual < 1e-12);

        // P' = Q': A' = 0 and P' = (1 + V)/2 must hold
        let p = diag_projection(&[1, 0, 0]);
        let g = generic_part(&p, &p, &t).unwrap();
        let v = davis_symmetry(&g, &t).unwrap();
        let r = g.generic_dim();
        assert!(op_norm(&((identity(r) + &v).scale(0.5) - g.p_prime.matrix())) < 1e-10);
        let res = davis_reconstruction_check(&g, &v, &t).unwrap();
        assert!(res.p_residual < 1e-10 && res.q_residual < 1e-10);
    }

    #[test]
    fn geodesic_exponent_cases() {
        let t = tol();
        // P' = Q' gives X = 0
        let p = diag_projection(&[1, 0]);
        let g = generic_part(&p, &p, &t).unwrap();
        let data = geodesic_exponent(&g, &t).unwrap();
        assert!(op_norm(&data.x) < 1e-12);
        assert!(data.distance < 1e-12);
        assert!(data.theta.is_empty());

        // 2D angle pair: distance alpha, theta = {alpha}
        let alpha = FRAC_PI_3;
        let (p, q) = angle_pair(alpha, &t).unwrap();
        let g = generic_part(&p, &q, &t).unwrap();
        let data = geodesic_exponent(&g, &t).unwrap();
        assert!((data.distance - alpha).abs() < 1e-10);
        assert_eq!(data.theta.len(), 1);
        assert!((data.theta[0].0 - alpha).abs() < 1e-10);
        assert!(data.certificate.max_residual() < 1e-9);

        // dim-4 two-angle pair: distance = max angle, theta = both angles
        let (p, q) = block_pair(&[FRAC_PI_6, FRAC_PI_3]);
        let g = generic_part(&p, &q, &t).unwrap();
        let data = geodesic_exponent(&g, &t).unwrap();
        assert!((data.distance - FRAC_PI_3).abs() < 1e-10);
        let thetas: Vec<f64> = data.theta.iter().map(|&(a, _)| a).collect();
        assert!(multiset_distance(&thetas, &[FRAC_PI_6, FRAC_PI_3]) < 1e-10);
    }

    #[test]
    fn exponent_diagonalization_cases() {
        let t = tol();
        let (p, q) = angle_pair(FRAC_PI_3, &t).unwrap();
        let g = generic_part(&p, &q, &t).unwrap();
        let data = geodesic_exponent(&g, &t).unwrap();
        let schmidt = schmidt_decompose(&g.p_prime, &g.q_prime, &t).unwrap();
        let pairs = exponent_diagonalization(&g, &data, &schmidt, &t).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].theta - FRAC_PI_3).abs() < 1e-12);

        // s = 1 triples are excluded
        let p_eq = diag_projection(&[1, 0]);
        let g = generic_part(&p_eq, &p_eq, &t).unwrap();
        let data = geodesic_exponent(&g, &t).unwrap();
        let schmidt = schmidt_decompose(&g.p_prime, &g.q_prime, &t).unwrap();
        let pairs = exponent_diagonalization(&g, &data, &schmidt, &t).unwrap();
        assert!(pairs.is_empty());

        // dim-4 two-angle pair: two eta/zeta pairs with tight residuals
        let (p, q) = block_pair(&[FRAC_PI_6, FRAC_PI_3]);
        let g = generic_part(&p, &q, &t).unwrap();
        let data = geodesic_exponent(&g, &t).unwrap();
        let schmidt = schmidt_decompose(&g.p_prime, &g.q_prime, &t).unwrap();
        let pairs = exponent_diagonalization(&g, &data, &schmidt, &t).unwrap();
        assert_eq!(pairs.len(), 2);
        let thetas: Vec<f64> = pairs.iter().map(|p| p.theta).collect();
        assert!(multiset_distance(&thetas, &[FRAC_PI_6, FRAC_PI_3]) < 1e-12);
    }

    #[test]
    fn geodesic_point_cases() {
        let t = tol();
        let alpha = FRAC_PI_3;
        let (p, q) = angle_pair(alpha, &t).unwrap();
        let g = generic_part(&p, &q, &t).unwrap();
        let data = geodesic_exponent(&g, &t).unwrap();

        let start = geodesic_point(&g, &data, 0.0, &t).unwrap();
        assert!(op_norm(&(start.matrix() - g.p_prime.matrix())) < 1e-12);

        let end = geodesic_point(&g, &data, 1.0, &t).unwrap();
        assert!(op_norm(&(end.matrix() - g.q_prime.matrix())) < 1e-8);

        // midpoint = (1 + V)/2 = projection onto the bisector line
        let mid = geodesic_point(&g, &data, 0.5, &t).unwrap();
        let v = &data.v;
        let expected = (identity(2) + v).scale(0.5);
        assert!(op_norm(&(mid.matrix() - expected)) < 1e-8);
        // in ambient coordinates this is the line at angle alpha/2
        let frame = g.generic_frame.matrix();
        let ambient = frame * mid.matrix() * frame.adjoint();
        let half = alpha / 2.0;
        let line = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(half.cos() * half.cos(), 0.0),
                c(half.cos() * half.sin(), 0.0),
                c(half.cos() * half.sin(), 0.0),
                c(half.sin() * half.sin(), 0.0),
            ],
        );
        assert!(op_norm(&(ambient - line)) < 1e-8);
    }

    #[test]
    fn geodesic_distance_cases() {
        let t = tol();
        let p = diag_projection(&[1, 0]);
        let report = geodesic_distance(&p, &p, &t).unwrap();
        assert!(report.distance < 1e-12);

        let alpha = 0.9;
        let (p, q) = angle_pair(alpha, &t).unwrap();
        let report = geodesic_distance(&p, &q, &t).unwrap();
        assert!((report.distance - alpha).abs() < 1e-10);

        let p = diag_projection(&[1, 0]);
        let q = diag_projection(&[0, 1]);
        let report = geodesic_distance(&p, &q, &t).unwrap();
        assert_eq!(report.distance, FRAC_PI_2);
        assert_eq!((report.plus_part_dim, report.minus_part_dim), (1, 1));
        assert_eq!(report.generic_distance, 0.0);
    }
}
