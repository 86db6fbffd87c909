//! Halmos dilation of a contraction: the 2x2-block unitary
//! `U = [[G, (1-GG*)^{1/2}], [(1-G*G)^{1/2}, -G*]]` containing `G` as its 1,1
//! corner, the dilation projections `P = diag(1, 0)` and `Q = U* P U` with
//! `U Q P = diag(G, 0)`, the intersection bookkeeping of their ranges and
//! kernels in terms of kernels of `G`, and the induced Grassmann geometry:
//! the exponent spectrum is `{± arccos(s_n(G))}` and the distance is
//! `arccos(sigma_min(G))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{generic_part, geodesic_exponent, GeodesicData};
use crate::numerics::{
    self, identity, multiset_distance, op_norm, orthonormal_nullspace, CMatrix,
};
use crate::projection::Projection;
use crate::tolerance::TolerancePolicy;

/// A contraction together with its Halmos dilation data.
#[derive(Debug, Clone)]
pub struct HalmosDilation {
    gamma: CMatrix,
    unitary: CMatrix,
    p_dil: Projection,
    q_dil: Projection,
}

impl HalmosDilation {
    pub fn gamma(&self) -> &CMatrix {
        &self.gamma
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn p_dil(&self) -> &Projection {
        &self.p_dil
    }

    pub fn q_dil(&self) -> &Projection {
        &self.q_dil
    }

    /// Dimension of the underlying space of the contraction.
    pub fn base_dim(&self) -> usize {
        self.gamma.nrows()
    }
}

/// Builds the Halmos dilation of a square contraction (`||Gamma|| <= 1`, with
/// slack `unit_circle_tol` absorbed by clamping the square roots).
pub fn halmos_dilate(gamma: &CMatrix, tol: &TolerancePolicy) -> Result<HalmosDilation> {
    numerics::validate_finite(gamma)?;
    if gamma.nrows() != gamma.ncols() {
        return Err(Error::Validation(format!(
            "the contraction must be square, got {}x{}",
            gamma.nrows(),
            gamma.ncols()
        )));
    }
    let n = gamma.nrows();
    let norm = op_norm(gamma);
    if norm > 1.0 + tol.unit_circle_tol {
        return Err(Error::Validation(format!(
            "||Gamma|| = {norm:.12} exceeds 1"
        )));
    }

    // Both defect square roots come from one SVD of Gamma so that the
    // intertwining Gamma (1-G*G)^{1/2} = (1-GG*)^{1/2} Gamma holds to
    // rounding; separate eigendecompositions would lose sqrt(eps) accuracy
    // at the boundary ||Gamma|| = 1. Singular values above 1 (within the
    // admitted slack) clamp the defect to zero.
    let (u_svd, s_svd, v_svd) = numerics::svd(gamma)?;
    let defect_diag = crate::numerics::CVector::from_iterator(
        n,
        s_svd
            .iter()
            .map(|&x| num_complex::Complex64::new((1.0 - x * x).max(0.0).sqrt(), 0.0)),
    );
    let defect = CMatrix::from_diagonal(&defect_diag);
    let defect_left = &u_svd * &defect * u_svd.adjoint();
    let defect_right = &v_svd * &defect * v_svd.adjoint();

    let mut u = CMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(gamma);
    u.view_mut((0, n), (n, n)).copy_from(&defect_left);
    u.view_mut((n, 0), (n, n)).copy_from(&defect_right);
    u.view_mut((n, n), (n, n)).copy_from(&(-gamma.adjoint()));

    let unitarity = op_norm(&(u.adjoint() * &u - identity(2 * n)));
    if unitarity > 1e-10 {
        return Err(Error::NumericalFailure(format!(
            "dilation unitarity residual {unitarity:.3e} exceeds 1e-10"
        )));
    }

    let mut p_mat = CMatrix::zeros(2 * n, 2 * n);
    p_mat.view_mut((0, 0), (n, n)).copy_from(&identity(n));
    let p_dil = Projection::from_certified(p_mat, n);
    let q_dil = Projection::new(&(u.adjoint() * p_dil.matrix() * &u), tol)?;

    // factorization identity U Q P = diag(Gamma, 0)
    let mut corner = CMatrix::zeros(2 * n, 2 * n);
    corner.view_mut((0, 0), (n, n)).copy_from(gamma);
    let residual = op_norm(&(&u * q_dil.matrix() * p_dil.matrix() - corner));
    if residual > 1e-9 {
        return Err(Error::NumericalFailure(format!(
            "U Q P does not reproduce the corner: residual {residual:.3e}"
        )));
    }

    Ok(HalmosDilation {
        gamma: gamma.clone(),
        unitary: u,
        p_dil,
        q_dil,
    })
}

/// Dimensions of the four intersections of the dilation pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilationIntersections {
    /// dim R(P) ∩ R(Q) = dim N(1 - Gamma* Gamma)
    pub range_range: usize,
    /// dim N(P) ∩ N(Q) = dim N(1 - Gamma Gamma*)
    pub null_null: usize,
    /// dim R(P) ∩ N(Q) = dim N(Gamma)
    pub range_null: usize,
    /// dim N(P) ∩ R(Q) = dim N(Gamma*)
    pub null_range: usize,
}

fn stacked_nullspace_dim(a: &CMatrix, b: &CMatrix, tol: &TolerancePolicy) -> Result<usize> {
    let n = a.ncols();
    let mut stack = CMatrix::zeros(a.nrows() + b.nrows(), n);
    stack.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    stack.view_mut((a.nrows(), 0), (b.nrows(), n)).copy_from(b);
    Ok(orthonormal_nullspace(&stack, tol)?.ncols())
}

/// Computes the four intersection dimensions two ways — directly from the
/// dilation projections (stacked nullspaces) and from the singular values of
/// the contraction — and requires exact agreement.
pub fn dilation_intersections(
    h: &HalmosDilation,
    tol: &TolerancePolicy,
) -> Result<DilationIntersections> {
    let n2 = 2 * h.base_dim();
    let p = h.p_dil.matrix();
    let q = h.q_dil.matrix();
    let id = identity(n2);
    let from_projections = DilationIntersections {
        range_range: stacked_nullspace_dim(&(&id - p), &(&id - q), tol)?,
        null_null: stacked_nullspace_dim(p, q, tol)?,
        range_null: stacked_nullspace_dim(&(&id - p), q, tol)?,
        null_range: stacked_nullspace_dim(p, &(&id - q), tol)?,
    };

    let s = h.gamma.clone().singular_values();
    let sigma_max = if s.len() > 0 { s.max() } else { 0.0 };
    let zero_cut = tol.rank_cutoff(h.base_dim(), h.base_dim(), sigma_max);
    let ones = s
        .iter()
        .filter(|&&x| (x - 1.0).abs() <= tol.unit_circle_tol * 10.0)
        .count();
    let zeros = s.iter().filter(|&&x| x <= zero_cut).count();
    let from_gamma = DilationIntersections {
        range_range: ones,
        null_null: ones,
        range_null: zeros,
        null_range: zeros,
    };

    if from_projections != from_gamma {
        return Err(Error::NumericalFailure(format!(
            "intersection dimensions disagree: projections {from_projections:?} vs contraction {from_gamma:?}"
        )));
    }
    Ok(from_projections)
}

/// Grassmann geometry of the dilation pair with its closed-form cross-checks.
#[derive(Debug, Clone)]
pub struct DilationGeometry {
    pub geodesic: Option<GeodesicData>,
    /// geodesic distance between the dilation projections
    pub distance: f64,
    /// `arccos` of the singular values of the contraction in `(0, 1)`
    pub theta_expected: Vec<f64>,
    pub plus_part_dim: usize,
    pub minus_part_dim: usize,
}

/// Runs the generic-part pipeline on the dilation pair and cross-checks the
/// exponent spectrum `{± arccos(s_n(Gamma))}` and the distance
/// `arccos(sigma_min(Gamma))`; a contraction with nontrivial kernel reports
/// `pi/2` through the degenerate branch.
pub fn dilation_geometry(h: &HalmosDilation, tol: &TolerancePolicy) -> Result<DilationGeometry> {
    let s = h.gamma.clone().singular_values();
    let sigma_max = if s.len() > 0 { s.max() } else { 0.0 };
    let sigma_min = if s.len() > 0 { s.min() } else { 0.0 };
    let zero_cut = tol.rank_cutoff(h.base_dim(), h.base_dim(), sigma_max);
    let theta_expected: Vec<f64> = s
        .iter()
        .filter(|&&x| x > zero_cut && (x - 1.0).abs() > tol.unit_circle_tol * 10.0)
        .map(|&x| x.clamp(0.0, 1.0).acos())
        .collect();

    let g = generic_part(&h.p_dil, &h.q_dil, tol)?;
    let degenerate = g.degenerate_dim();
    let (geodesic, generic_distance) = if g.generic_dim() == 0 {
        (None, 0.0)
    } else {
        let data = geodesic_exponent(&g, tol)?;
        let d = data.distance;
        (Some(data), d)
    };

    // theta spectrum must match arccos of the interior singular values
    if let Some(data) = &geodesic {
        let thetas: Vec<f64> = data
            .theta
            .iter()
            .flat_map(|&(a, m)| std::iter::repeat(a).take(m))
            .collect();
        let mut expected = theta_expected.clone();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let dist = multiset_distance(&thetas, &expected);
        if dist > 1e-8 {
            return Err(Error::NumericalFailure(format!(
                "exponent angles {thetas:?} disagree with arccos of the contraction \
                 singular values {expected:?} (distance {dist:.3e})"
            )));
        }
    }

    let distance = if degenerate > 0 {
        std::f64::consts::FRAC_PI_2
    } else {
        generic_distance
    };
    let closed_form = if sigma_min <= zero_cut {
        std::f64::consts::FRAC_PI_2
    } else {
        sigma_min.clamp(0.0, 1.0).acos()
    };
    if (distance - closed_form).abs() > 1e-8 {
        return Err(Error::NumericalFailure(format!(
            "dilation distance {distance:.12} disagrees with arccos(sigma_min) = {closed_form:.12}"
        )));
    }

    Ok(DilationGeometry {
        geodesic,
        distance,
        theta_expected,
        plus_part_dim: g.plus_part_dim,
        minus_part_dim: g.minus_part_dim,
    })
}
