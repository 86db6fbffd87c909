//! Full two-projection analysis: the five-fold subspace split, Schmidt data
//! of the product, spectra of `P ± Q` with explicit eigenvectors, Davis
//! symmetry, geodesic exponent and distance, with every identity re-measured
//! into a flat list of named checks.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{
    davis_reconstruction_check, exponent_diagonalization, generic_part, geodesic_distance,
    geodesic_exponent, geodesic_point, DistanceReport, ExponentEigenpair,
    GenericPartDecomposition, GeodesicData,
};
use crate::numerics::{multiset_distance, op_norm, CMatrix};
use crate::projection::{dixmier_diagnostics, DixmierDiagnostics, Projection};
use crate::report::CheckRecord;
use crate::spectral::{
    biorthogonal_bases, complement_transfer, cross_gram_offdiag_max, difference_eigenvectors,
    difference_spectrum, penrose_residual, product_from_difference, schmidt_decompose,
    schmidt_pseudoinverse, sum_spectrum, DifferenceEigenpair, DifferenceSpectrum,
    SchmidtDecomposition,
};
use crate::tolerance::TolerancePolicy;

/// Dimensions of the five-fold orthogonal split induced by the pair:
/// the four intersections plus the generic part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceSplit {
    /// dim R(P) ∩ R(Q)
    pub range_range: usize,
    /// dim N(P) ∩ N(Q)
    pub null_null: usize,
    /// dim R(P) ∩ N(Q)
    pub range_null: usize,
    /// dim N(P) ∩ R(Q)
    pub null_range: usize,
    /// dim of the generic part
    pub generic: usize,
}

/// The complete report for one pair of projections.
#[derive(Debug, Clone)]
pub struct TwoProjectionAnalysis {
    pub dim: usize,
    pub rank_p: usize,
    pub rank_q: usize,
    pub schmidt: SchmidtDecomposition,
    pub difference: DifferenceSpectrum,
    /// clustered eigenvalues of `P + Q`
    pub sum: Vec<(f64, usize)>,
    pub split: SubspaceSplit,
    pub dixmier: DixmierDiagnostics,
    pub generic: GenericPartDecomposition,
    /// geodesic data on the generic part (`None` when it is empty)
    pub geodesic: Option<GeodesicData>,
    pub distance: DistanceReport,
    /// eigenvector pairs of `P - Q` built from the Schmidt vectors
    pub difference_pairs: Vec<DifferenceEigenpair>,
    /// eigenpairs of the exponent on the generic part
    pub exponent_pairs: Vec<ExponentEigenpair>,
    pub checks: Vec<CheckRecord>,
}

impl TwoProjectionAnalysis {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Runs the whole pipeline on one pair and certifies every identity.
pub fn analyze_pair(
    p: &Projection,
    q: &Projection,
    tol: &TolerancePolicy,
) -> Result<TwoProjectionAnalysis> {
    let n = p.dim();
    let mut checks: Vec<CheckRecord> = Vec::new();

    // Schmidt data of PQ and its direct certificates.
    let schmidt = schmidt_decompose(p, q, tol)?;
    let t_mat: CMatrix = p.matrix() * q.matrix();
    checks.push(CheckRecord::new(
        "schmidt.reconstruction",
        op_norm(&(schmidt.reconstruct() - &t_mat)),
        tol.spectral_match,
    ));
    let (basis_s, basis_t) = biorthogonal_bases(p, q, tol)?;
    checks.push(CheckRecord::new(
        "schmidt.biorthogonality_offdiag",
        cross_gram_offdiag_max(&basis_s, &basis_t),
        1e-10,
    ));
    let gram = basis_s.matrix().adjoint() * basis_t.matrix();
    let mut diag_dev = 0.0f64;
    for (k, s) in schmidt.values().iter().enumerate() {
        diag_dev = diag_dev.max((gram[(k, k)].norm() - s).abs());
    }
    checks.push(CheckRecord::new(
        "schmidt.diagonal_matches_values",
        diag_dev,
        1e-9,
    ));

    // Difference spectrum: the constructor itself enforces route agreement,
    // so re-measure the multiset distance for the record.
    let difference = difference_spectrum(p, q, tol)?;
    let direct_spectrum = difference.eigenvalue_multiset();
    let mut predicted: Vec<f64> = schmidt
        .values_below_one()
        .iter()
        .flat_map(|&s| {
            let l = (1.0 - s * s).max(0.0).sqrt();
            [l, -l]
        })
        .collect();
    predicted.extend(std::iter::repeat(1.0).take(p.rank() - schmidt.len()));
    predicted.extend(std::iter::repeat(-1.0).take(q.rank() - schmidt.len()));
    predicted
        .extend(std::iter::repeat(0.0).take(n + 2 * schmidt.dim_ones() - p.rank() - q.rank()));
    checks.push(CheckRecord::new(
        "difference.route_agreement",
        multiset_distance(&direct_spectrum, &predicted),
        tol.spectral_match,
    ));
    let balanced = difference.paired.iter().all(|&(_, m)| m > 0);
    checks.push(CheckRecord::exact("difference.pairing_balanced", balanced));

    // Explicit eigenvectors of the difference.
    let a_mat = p.matrix() - q.matrix();
    let difference_pairs = difference_eigenvectors(p, q, tol)?;
    let mut vec_residual = 0.0f64;
    for pair in &difference_pairs {
        vec_residual = vec_residual.max((&a_mat * &pair.nu - pair.nu.scale(pair.lambda)).norm());
        vec_residual =
            vec_residual.max((&a_mat * &pair.omega + pair.omega.scale(pair.lambda)).norm());
    }
    checks.push(CheckRecord::new(
        "difference.eigenvector_residual",
        vec_residual,
        1e-8,
    ));

    // Product rebuilt from the difference alone.
    let rebuilt = product_from_difference(p, q, tol)?;
    checks.push(CheckRecord::new(
        "difference.product_roundtrip",
        multiset_distance(&rebuilt.values(), &schmidt.values()),
        tol.spectral_match,
    ));

    // Sum spectrum (route agreement enforced inside).
    let sum = sum_spectrum(p, q, tol)?;

    // Complement transfer: s-values of P(1-Q) are sqrt(1 - s_n^2) plus ones
    // for R(P) ∩ N(Q).
    let transfer = complement_transfer(p, q, tol)?;
    let mut expected_pqc: Vec<f64> = schmidt
        .values_below_one()
        .iter()
        .map(|&s| (1.0 - s * s).max(0.0).sqrt())
        .collect();
    expected_pqc.extend(std::iter::repeat(1.0).take(p.rank() - schmidt.len()));
    expected_pqc.retain(|&v| v > tol.spectral_match);
    let mut got_pqc = transfer.p_qc.values();
    got_pqc.retain(|&v| v > tol.spectral_match);
    checks.push(CheckRecord::new(
        "complement.transfer_values",
        multiset_distance(&got_pqc, &expected_pqc),
        tol.spectral_match,
    ));

    // Pseudoinverse of the product through the Schmidt data.
    let pinv = schmidt_pseudoinverse(&schmidt);
    checks.push(CheckRecord::new(
        "pseudoinverse.penrose",
        penrose_residual(&t_mat, &pinv),
        1e-9 * (1.0 + op_norm(&pinv).powi(2)),
    ));

    // Dixmier diagnostics (cross-checked inside).
    let dixmier = dixmier_diagnostics(p, q, tol)?;

    // Generic part and geometry.
    let generic = generic_part(p, q, tol)?;
    let split = SubspaceSplit {
        range_range: schmidt.dim_ones(),
        null_null: n + schmidt.dim_ones() - p.rank() - q.rank(),
        range_null: generic.plus_part_dim,
        null_range: generic.minus_part_dim,
        generic: generic.generic_dim(),
    };
    checks.push(CheckRecord::exact(
        "split.dimensions_sum",
        split.range_null + split.null_range + split.generic == n,
    ));
    checks.push(CheckRecord::exact(
        "split.matches_difference_spectrum",
        split.range_null == difference.plus_one_mult
            && split.null_range == difference.minus_one_mult,
    ));

    let mut geodesic = None;
    let mut exponent_pairs = Vec::new();
    if generic.generic_dim() > 0 {
        let data = geodesic_exponent(&generic, tol)?;
        checks.push(CheckRecord::new(
            "geodesic.certificate",
            data.certificate.max_residual(),
            1e-8,
        ));
        let davis = davis_reconstruction_check(&generic, &data.v, tol)?;
        checks.push(CheckRecord::new(
            "geodesic.davis_reconstruction",
            davis.p_residual.max(davis.q_residual),
            1e-9,
        ));

        // theta spectrum law: eigenvalues of X are arccos of the Schmidt
        // values of P'Q'.
        let schmidt_prime = schmidt_decompose(&generic.p_prime, &generic.q_prime, tol)?;
        let thetas: Vec<f64> = data
            .theta
            .iter()
            .flat_map(|&(a, m)| std::iter::repeat(a).take(m))
            .collect();
        let mut expected_theta: Vec<f64> = schmidt_prime
            .values_below_one()
            .iter()
            .map(|&s| s.clamp(0.0, 1.0).acos())
            .collect();
        expected_theta.sort_by(|a, b| a.partial_cmp(b).unwrap());
        checks.push(CheckRecord::new(
            "geodesic.theta_spectrum",
            multiset_distance(&thetas, &expected_theta),
            1e-8,
        ));

        // distance = arccos of the smallest Schmidt value of P'Q'.
        let s_min = schmidt_prime.values().last().copied().unwrap_or_else(|| {
            if generic.p_prime.rank() == 0 || generic.q_prime.rank() == 0 {
                // an empty product on a nonempty generic part means the
                // compressed projections are orthogonal: angle pi/2
                0.0
            } else {
                1.0
            }
        });
        checks.push(CheckRecord::new(
            "geodesic.distance_arccos_smin",
            (data.distance - s_min.clamp(0.0, 1.0).acos()).abs(),
            1e-8,
        ));

        // midpoint identity
        let mid = geodesic_point(&generic, &data, 0.5, tol)?;
        let half_v = (crate::numerics::identity(generic.generic_dim()) + &data.v).scale(0.5);
        checks.push(CheckRecord::new(
            "geodesic.midpoint",
            op_norm(&(mid.matrix() - half_v)),
            1e-8,
        ));

        exponent_pairs = exponent_diagonalization(&generic, &data, &schmidt_prime, tol)?;
        let mut pair_residual = 0.0f64;
        for pair in &exponent_pairs {
            pair_residual =
                pair_residual.max((&data.x * &pair.eta - pair.eta.scale(pair.theta)).norm());
            pair_residual =
                pair_residual.max((&data.x * &pair.zeta + pair.zeta.scale(pair.theta)).norm());
        }
        checks.push(CheckRecord::new(
            "geodesic.exponent_eigenpairs",
            pair_residual,
            1e-8,
        ));
        geodesic = Some(data);
    }
    let distance = geodesic_distance(p, q, tol)?;

    Ok(TwoProjectionAnalysis {
        dim: n,
        rank_p: p.rank(),
        rank_q: q.rank(),
        schmidt,
        difference,
        sum,
        split,
        dixmier,
        generic,
        geodesic,
        distance,
        difference_pairs,
        exponent_pairs,
        checks,
    })
}

/// Flattens a clustered spectrum into a plain multiset.
pub fn flatten_clusters(clusters: &[(f64, usize)]) -> Vec<f64> {
    clusters
        .iter()
        .flat_map(|&(v, m)| std::iter::repeat(v).take(m))
        .collect()
}
