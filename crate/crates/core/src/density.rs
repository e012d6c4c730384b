//! Validated density matrices on `C^dA (x) C^dB` (or a single system) and
//! partial-trace machinery.

use crate::error::{Error, Result};
use crate::linalg::{
    self, herm_eig_unchecked, hermitize, CMatrix, CVector, Spectrum,
};
use crate::tol::Tolerances;

/// Which factor of a bipartite state survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A trace-one positive semidefinite operator together with its factor
/// dimensions `(dA, dB)`. Single systems carry `(d, 1)`.
///
/// Instances are immutable; every operation returns a new value, so they can
/// be shared freely across threads.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMatrix,
    dims: (usize, usize),
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, and positivity before accepting
    /// the matrix, against the active tolerance set.
    pub fn new(mat: CMatrix, dims: (usize, usize)) -> Result<Self> {
        Self::with_tolerances(mat, dims, &crate::tol::active())
    }

    pub fn with_tolerances(mat: CMatrix, dims: (usize, usize), tols: &Tolerances) -> Result<Self> {
        let (da, db) = dims;
        if da == 0 || db == 0 || da * db != mat.nrows() || mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but factor dims are ({da}, {db})",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let deviation = linalg::hermiticity_deviation(&mat);
        if deviation > tols.hermiticity {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: tols.hermiticity,
            });
        }
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > tols.trace_one {
            return Err(Error::TraceNotOne {
                trace,
                tolerance: tols.trace_one,
            });
        }
        let spectrum = herm_eig_unchecked(&hermitize(&mat));
        let min = spectrum.min_eigenvalue();
        if min < -tols.psd_slack {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        let max = spectrum.max_eigenvalue();
        if max > 1.0 + tols.psd_slack {
            return Err(Error::EigenvalueAboveOne { eigenvalue: max });
        }
        Ok(Self { mat, dims })
    }

    /// Construction bypassing validation, for operations that preserve
    /// validity algebraically (unitary conjugation, convex mixing,
    /// partial traces).
    pub(crate) fn trusted(mat: CMatrix, dims: (usize, usize)) -> Self {
        debug_assert_eq!(mat.nrows(), dims.0 * dims.1);
        debug_assert!(linalg::hermiticity_deviation(&mat) < 1e-9);
        debug_assert!((mat.trace().re - 1.0).abs() < 1e-9);
        Self { mat, dims }
    }

    /// Projector onto a (normalized copy of a) state vector.
    pub fn pure(psi: &CVector, dims: (usize, usize)) -> Result<Self> {
        if psi.len() != dims.0 * dims.1 {
            return Err(Error::DimensionMismatch(format!(
                "vector has length {} but factor dims are ({}, {})",
                psi.len(),
                dims.0,
                dims.1
            )));
        }
        let norm = psi.norm();
        if norm < 1e-300 {
            return Err(Error::InvalidParameter(
                "cannot normalize the zero vector".into(),
            ));
        }
        let v = psi.unscale(norm);
        let mat = &v * v.adjoint();
        Ok(Self::trusted(mat, dims))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Factor dimensions `(dA, dB)`.
    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim_a(&self) -> usize {
        self.dims.0
    }

    pub fn dim_b(&self) -> usize {
        self.dims.1
    }

    /// Total Hilbert-space dimension `dA * dB`.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn is_composite(&self) -> bool {
        self.dims.1 > 1
    }

    pub fn spectrum(&self) -> Spectrum {
        herm_eig_unchecked(&hermitize(&self.mat))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum().eigenvalues
    }
}

/// Traces out one factor of a composite state, keeping `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    if !rho.is_composite() {
        return Err(Error::NotComposite { dim: rho.dim() });
    }
    let (da, db) = rho.dims();
    let m = rho.matrix();
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |a, b| {
            (0..db).map(|i| m[(a * db + i, b * db + i)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|a| m[(a * db + i, a * db + j)]).sum()
        }),
    };
    let d = out.nrows();
    Ok(DensityMatrix::trusted(out, (d, 1)))
}

/// Partial transpose on the B factor of a `da x db` composite operator.
pub fn partial_transpose_b(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    debug_assert_eq!(m.nrows(), da * db);
    CMatrix::from_fn(da * db, da * db, |r, c| {
        let (a, i) = (r / db, r % db);
        let (b, j) = (c / db, c % db);
        m[(a * db + j, b * db + i)]
    })
}

/// Convex combination of states on identical factors. Weights must be
/// non-negative and sum to 1 within the probability tolerance.
pub fn convex_mix(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
    let Some((_, first)) = parts.first() else {
        return Err(Error::InvalidParameter("empty mixture".into()));
    };
    let dims = first.dims();
    let mut sum = 0.0;
    let mut mat = CMatrix::zeros(first.dim(), first.dim());
    for (w, rho) in parts {
        if rho.dims() != dims {
            return Err(Error::DimensionMismatch(
                "mixture components have different factor dims".into(),
            ));
        }
        if *w < 0.0 {
            return Err(Error::InvalidProbabilities { sum: *w });
        }
        sum += w;
        mat += rho.matrix().scale(*w);
    }
    if (sum - 1.0).abs() > crate::tol::PROBABILITY_SUM {
        return Err(Error::InvalidProbabilities { sum });
    }
    Ok(DensityMatrix::trusted(mat, dims))
}
