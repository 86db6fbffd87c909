//! Seeded random generators for the test corpus: complex Gaussian matrices,
//! Haar-distributed frames, random projections, contractions and idempotent
//! blocks. Everything is driven by a caller-supplied ChaCha generator so runs
//! are reproducible from a single seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::numerics::CMatrix;
use crate::projection::{projection_from_frame, Frame, Projection};
use crate::tolerance::TolerancePolicy;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// n x k matrix with independent standard complex Gaussian entries.
pub fn complex_gaussian(rng: &mut SeededRng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / 2f64.sqrt()
    })
}

/// Haar-ish random frame: orthonormalized columns of a complex Gaussian.
pub fn random_frame(rng: &mut SeededRng, dim: usize, rank: usize) -> Result<Frame> {
    assert!(rank <= dim);
    if rank == 0 {
        return Frame::new(&CMatrix::zeros(dim, 0));
    }
    let g = complex_gaussian(rng, dim, rank);
    Frame::new(&g.qr().q())
}

/// Random orthogonal projection of the given rank: `P = F F^*`.
pub fn random_projection(
    rng: &mut SeededRng,
    dim: usize,
    rank: usize,
    tol: &TolerancePolicy,
) -> Result<Projection> {
    let f = random_frame(rng, dim, rank)?;
    projection_from_frame(&f, tol)
}

/// Random pair of projections with ranks drawn uniformly from `1..dim`.
pub fn random_pair(
    rng: &mut SeededRng,
    dim: usize,
    tol: &TolerancePolicy,
) -> Result<(Projection, Projection)> {
    let rank_p = rng.random_range(1..dim.max(2));
    let rank_q = rng.random_range(1..dim.max(2));
    Ok((
        random_projection(rng, dim, rank_p, tol)?,
        random_projection(rng, dim, rank_q, tol)?,
    ))
}

/// Random unitary matrix (Q factor of a complex Gaussian).
pub fn random_unitary(rng: &mut SeededRng, dim: usize) -> Result<CMatrix> {
    Ok(random_frame(rng, dim, dim)?.matrix().clone())
}

/// Random Hermitian matrix with operator norm exactly `norm`.
pub fn random_hermitian(rng: &mut SeededRng, dim: usize, norm: f64) -> CMatrix {
    let g = complex_gaussian(rng, dim, dim);
    let h = (&g + g.adjoint()).scale(0.5);
    let scale = crate::numerics::op_norm(&h);
    if scale == 0.0 {
        h
    } else {
        h.scale(norm / scale)
    }
}

/// Random contraction: complex Gaussian rescaled so that the norm lands
/// uniformly in `(0.3, 1.0)`.
pub fn random_contraction(rng: &mut SeededRng, dim: usize) -> CMatrix {
    let g = complex_gaussian(rng, dim, dim);
    let target: f64 = rng.random_range(0.3..1.0);
    let norm = crate::numerics::op_norm(&g);
    if norm == 0.0 {
        g
    } else {
        g.scale(target / norm)
    }
}

/// Random invertible matrix: Gaussian with singular values pushed away from
/// zero by a ridge term.
pub fn random_invertible(rng: &mut SeededRng, dim: usize) -> Result<CMatrix> {
    let g = complex_gaussian(rng, dim, dim);
    let u = random_unitary(rng, dim)?;
    // adding a unitary multiple bounds sigma_min away from 0 almost surely
    Ok(g + u.scale(0.5 * dim as f64))
}
