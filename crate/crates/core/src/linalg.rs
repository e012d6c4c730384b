//! Dense complex operator algebra: Kronecker products, Hermitian
//! eigendecomposition, and the small norm helpers everything else builds on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::tol;

/// Complex scalar used throughout.
pub type C64 = Complex<f64>;
/// Dense complex matrix (row/column dimensions fixed at runtime).
pub type CMatrix = DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// n x n identity.
pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Conjugate transpose.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Kronecker product with the first factor as the slow index, so
/// `kron(a, b)[(i*nb + k, j*nb + l)] = a[(i, j)] * b[(k, l)]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// U m U^H.
pub fn conjugate(u: &CMatrix, m: &CMatrix) -> CMatrix {
    u * m * u.adjoint()
}

/// Kronecker product of vectors, matching [`kron`]'s index convention.
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let (na, nb) = (a.len(), b.len());
    CVector::from_fn(na * nb, |k, _| a[k / nb] * b[k % nb])
}

/// Largest |entry|.
pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Largest |a - b| entry.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest |m - m^H| entry.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Largest |U^H U - I| entry.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let gram = u.adjoint() * u;
    max_abs_diff(&gram, &identity(u.ncols()))
}

/// (m + m^H) / 2.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Re tr(a b), the Frobenius pairing of two Hermitian matrices.
pub fn inner_re(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    let n = a.nrows();
    let mut acc = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; `eigenvectors` holds the matching
/// eigenvectors as columns, so `V diag(w) V^H` reconstructs the input.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// V diag(f(w)) V^H.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &w) in self.eigenvalues.iter().enumerate() {
            let fw = cr(f(w));
            for i in 0..n {
                scaled[(i, j)] *= fw;
            }
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|w| w)
    }
}

/// Eigendecomposition of `h`, which must be Hermitian within `tolerance`.
/// The matrix is symmetrized as (h + h^H)/2 before factoring.
pub fn herm_eig_with(h: &CMatrix, tolerance: f64) -> Result<Spectrum> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let deviation = hermiticity_deviation(h);
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            deviation,
            tolerance,
        });
    }
    Ok(herm_eig_unchecked(&hermitize(h)))
}

/// Eigendecomposition with the default Hermiticity tolerance.
pub fn herm_eig(h: &CMatrix) -> Result<Spectrum> {
    herm_eig_with(h, tol::HERMITICITY)
}

/// Eigendecomposition of a matrix already known to be Hermitian.
pub(crate) fn herm_eig_unchecked(h: &CMatrix) -> Spectrum {
    let n = h.nrows();
    let se = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
    }

    pub fn sigma_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = identity(2);
        assert_eq!(kron(&i2, &i2), identity(4));
    }

    #[test]
    fn kron_projector_with_identity() {
        let proj = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(0.0)]);
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![
            cr(1.0),
            cr(1.0),
            cr(0.0),
            cr(0.0),
        ]));
        assert_eq!(kron(&proj, &identity(2)), expected);
    }

    #[test]
    fn kron_sigma_x_pair_maps_first_basis_vector_to_last() {
        // Worked out by direct 4x4 multiplication.
        let xx = kron(&sigma_x(), &sigma_x());
        let e0 = CVector::from_vec(vec![cr(1.0), cr(0.0), cr(0.0), cr(0.0)]);
        let out = &xx * &e0;
        let expected = CVector::from_vec(vec![cr(0.0), cr(0.0), cr(0.0), cr(1.0)]);
        assert!((out - expected).norm() < 1e-15);
    }

    #[test]
    fn herm_eig_identity() {
        let s = herm_eig(&identity(2)).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn herm_eig_sigma_z() {
        let s = herm_eig(&sigma_z()).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn herm_eig_sigma_x_eigenvectors() {
        // Characteristic polynomial gives eigenpairs (-1, (1,-1)/sqrt2) and
        // (+1, (1,1)/sqrt2), each up to a global phase.
        let s = herm_eig(&sigma_x()).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-14);
        let inv = 1.0 / 2.0f64.sqrt();
        for (col, expected) in [(0, [inv, -inv]), (1, [inv, inv])] {
            let v = s.eigenvectors.column(col);
            let overlap = (v[0].conj() * cr(expected[0]) + v[1].conj() * cr(expected[1])).norm();
            assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.5), cr(0.0)]);
        match herm_eig(&m) {
            Err(Error::NotHermitian { deviation, .. }) => {
                assert_abs_diff_eq!(deviation, 0.5, epsilon = 1e-15);
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn spectrum_invariants_on_random_hermitian() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [3usize, 16, 64] {
            let raw = CMatrix::from_fn(n, n, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let h = hermitize(&raw);
            let s = herm_eig(&h).unwrap();
            assert!(max_abs_diff(&s.reconstruct(), &h) < 1e-10);
            assert!(unitarity_deviation(&s.eigenvectors) < 1e-10);
            for w in s.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }
}
