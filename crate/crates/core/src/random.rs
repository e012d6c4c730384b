//! Seeded randomized constructions: Haar unitaries via Ginibre + QR,
//! random density matrices, and flat simplex weights.
//!
//! Every consumer derives an independent ChaCha stream from a
//! `(seed, stream)` pair, so parallel work is reproducible regardless of
//! scheduling.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::density::DensityMatrix;
use crate::linalg::{c, CMatrix, CVector};

/// Deterministic RNG for a given `(seed, stream)` pair.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Matrix of iid standard complex Gaussians (variance 1 per entry).
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * inv_sqrt2, im * inv_sqrt2)
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the diagonal of R
/// phase-fixed so the factorization is unique.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random unit vector.
pub fn random_unit_vector(dim: usize, rng: &mut impl Rng) -> CVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c(re, im)
        });
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}

/// Uniform weights on the probability simplex (flat Dirichlet), via
/// normalized exponentials.
pub fn flat_simplex_weights(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    assert!(n > 0);
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>();
            -(1.0 - u).ln().max(f64::MIN_POSITIVE.ln())
        })
        .collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// Random mixed state of the requested rank: G G^H / tr(G G^H) with G a
/// `dim x rank` Ginibre matrix.
pub fn random_density(dims: (usize, usize), rank: usize, rng: &mut impl Rng) -> DensityMatrix {
    let dim = dims.0 * dims.1;
    assert!(rank >= 1 && rank <= dim, "rank must be in [1, dim]");
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let trace = m.trace().re;
    DensityMatrix::trusted(m.unscale(trace), dims)
}

/// Full-rank random mixed state.
pub fn random_full_rank(dims: (usize, usize), rng: &mut impl Rng) -> DensityMatrix {
    random_density(dims, dims.0 * dims.1, rng)
}

/// Haar-random pure state.
pub fn random_pure(dims: (usize, usize), rng: &mut impl Rng) -> DensityMatrix {
    let v = random_unit_vector(dims.0 * dims.1, rng);
    DensityMatrix::pure(&v, dims).expect("unit vector projector is a valid state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_deviation;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = stream_rng(11, 0);
        for d in [2usize, 3, 5, 8] {
            let u = haar_unitary(d, &mut rng);
            assert!(unitarity_deviation(&u) < 1e-12);
        }
    }

    #[test]
    fn simplex_weights_sum_to_one() {
        let mut rng = stream_rng(3, 1);
        let w = flat_simplex_weights(7, &mut rng);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn random_density_has_requested_rank() {
        let mut rng = stream_rng(5, 2);
        let rho = random_density((2, 2), 2, &mut rng);
        let above = rho
            .eigenvalues()
            .iter()
            .filter(|&&w| w > 1e-10)
            .count();
        assert_eq!(above, 2);
    }

    #[test]
    fn streams_are_reproducible_and_independent() {
        let a1 = ginibre(2, 2, &mut stream_rng(9, 4));
        let a2 = ginibre(2, 2, &mut stream_rng(9, 4));
        let b = ginibre(2, 2, &mut stream_rng(9, 5));
        assert_eq!(a1, a2);
        assert_ne!(a1, b);
    }
}
