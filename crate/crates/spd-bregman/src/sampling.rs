//! Seed-driven random matrix generation for verification sweeps.
//!
//! Every sample is a pure function of `(seed, index)`: the generator for
//! sample `i` is a ChaCha stream selected by the index, so sweeps can be
//! evaluated in any order (or in parallel) without changing the draws.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spd_core::{SpdMatrix, SymMatrix, DEFAULT_SPD_TOL};

/// Default log10 eigenvalue range for SPD draws. The induced condition
/// number is at most `1e4`, which keeps line searches and Löwner checks
/// well away from breakdown.
pub const DEFAULT_LOG10_RANGE: (f64, f64) = (-2.0, 2.0);

/// Deterministic generator for sample `index` of a sweep keyed by `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

fn gaussian_matrix(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

/// Random orthogonal matrix from the QR factorization of a Gaussian
/// matrix, with the sign convention `diag(R) > 0`.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random SPD matrix `Q diag(lambda) Q^T` with log-uniform eigenvalues
/// in `10^[lo, hi]`.
pub fn random_spd_in_range(rng: &mut impl Rng, n: usize, log10_lo: f64, log10_hi: f64) -> SpdMatrix {
    let q = random_orthogonal(rng, n);
    let lambda: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            10f64.powf(log10_lo + u * (log10_hi - log10_lo))
        })
        .collect();
    let mut scaled = q.clone();
    for (j, &l) in lambda.iter().enumerate() {
        for i in 0..n {
            scaled[(i, j)] *= l;
        }
    }
    SpdMatrix::validate(scaled * q.transpose(), DEFAULT_SPD_TOL)
        .expect("spectrally constructed matrix is SPD")
}

/// Random SPD matrix over the default eigenvalue range `[1e-2, 1e2]`.
pub fn random_spd(rng: &mut impl Rng, n: usize) -> SpdMatrix {
    random_spd_in_range(rng, n, DEFAULT_LOG10_RANGE.0, DEFAULT_LOG10_RANGE.1)
}

/// Random symmetric Gaussian matrix scaled to Frobenius norm `scale`.
pub fn random_sym(rng: &mut impl Rng, n: usize, scale: f64) -> SymMatrix {
    let s = SymMatrix::symmetrize_unchecked(&gaussian_matrix(rng, n));
    let norm = s.frobenius_norm();
    if norm > 0.0 {
        s.scale(scale / norm)
    } else {
        s
    }
}

/// Random invertible matrix with singular values log-uniform in
/// `[1/2, 2]`: far from singular, and orthogonal only with probability
/// zero, so congruence checks distinguish GL(n) from O(n) cleanly.
pub fn random_gl(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let u = random_orthogonal(rng, n);
    let v = random_orthogonal(rng, n);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let e: f64 = rng.random();
        d[(i, i)] = 2f64.powf(2.0 * e - 1.0);
    }
    u * d * v.transpose()
}

/// Löwner-ordered pair `A <= B` built as `B = A + s P P^T`.
pub fn random_ordered_pair(rng: &mut impl Rng, n: usize) -> (SpdMatrix, SpdMatrix) {
    let a = random_spd(rng, n);
    let p = gaussian_matrix(rng, n);
    let bump = &p * p.transpose();
    let scale = 0.25 * a.sym().frobenius_norm() / bump.norm().max(f64::MIN_POSITIVE);
    let b = SpdMatrix::validate(a.as_matrix() + bump * scale, DEFAULT_SPD_TOL)
        .expect("A plus a PSD bump stays SPD");
    (a, b)
}
