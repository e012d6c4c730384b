//! Von Neumann entropy and quantum relative entropy, both in bits.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::tol::Tolerances;

const LN_2: f64 = std::f64::consts::LN_2;

/// -sum w log2 w over a spectrum, with 0 log 0 = 0. Eigenvalues are clipped
/// to [0, 1] first: values in [-PSD_SLACK, 0) are eigensolver noise on
/// rank-deficient states.
pub fn entropy_of_eigenvalues(eigenvalues: &[f64]) -> f64 {
    let mut s = 0.0;
    for &w in eigenvalues {
        let w = w.clamp(0.0, 1.0);
        if w > 0.0 {
            s -= w * w.ln();
        }
    }
    (s / LN_2).max(0.0)
}

/// Von Neumann entropy S(rho) = -tr(rho log2 rho) in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_eigenvalues(&rho.spectrum().eigenvalues)
}

/// Quantum relative entropy S(rho||sigma) = tr[rho (log2 rho - log2 sigma)]
/// in bits.
///
/// Returns `f64::INFINITY` when rho's support leaks out of sigma's: more
/// than `support_leak` of rho's mass lies on eigenvectors of sigma with
/// eigenvalue below `support_eigenvalue`. Otherwise the value is evaluated
/// on sigma's support.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    relative_entropy_with(rho, sigma, &crate::tol::active())
}

pub fn relative_entropy_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tols: &Tolerances,
) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy needs equal dims, got {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let rho_spec = rho.spectrum();
    let tr_rho_log_rho = {
        let mut acc = 0.0;
        for &w in &rho_spec.eigenvalues {
            let w = w.clamp(0.0, 1.0);
            if w > 0.0 {
                acc += w * w.ln();
            }
        }
        acc / LN_2
    };

    let sigma_spec = sigma.spectrum();
    let v = &sigma_spec.eigenvectors;
    // Overlap of rho with each eigenvector of sigma.
    let m = v.adjoint() * rho.matrix() * v;
    let mut tr_rho_log_sigma = 0.0;
    let mut leak = 0.0;
    for (j, &mu) in sigma_spec.eigenvalues.iter().enumerate() {
        let q = m[(j, j)].re.max(0.0);
        if mu < tols.support_eigenvalue {
            leak += q;
        } else {
            tr_rho_log_sigma += q * mu.ln() / LN_2;
        }
    }
    if leak > tols.support_leak {
        return Ok(f64::INFINITY);
    }
    let value = tr_rho_log_rho - tr_rho_log_sigma;
    // Klein's inequality makes the true value non-negative; tiny negatives
    // are rounding noise from the two independent eigendecompositions.
    Ok(if value < 0.0 && value > -1e-9 { 0.0 } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, identity, CMatrix, CVector};
    use approx::assert_abs_diff_eq;

    fn diag_state(entries: &[f64], dims: (usize, usize)) -> DensityMatrix {
        let v: Vec<_> = entries.iter().map(|&x| cr(x)).collect();
        DensityMatrix::new(CMatrix::from_diagonal(&CVector::from_vec(v)), dims).unwrap()
    }

    #[test]
    fn entropy_of_pure_state_is_zero() {
        let rho = diag_state(&[1.0, 0.0, 0.0, 0.0], (2, 2));
        assert_abs_diff_eq!(von_neumann_entropy(&rho), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_of_maximally_mixed_two_qubits_is_two() {
        let rho = DensityMatrix::new(identity(4).scale(0.25), (2, 2)).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_matches_closed_form_for_four_point_spectrum() {
        // Spectrum (f, (1-f)/3 x3) evaluated straight from the formula.
        let f = 0.9;
        let rest = (1.0 - f) / 3.0;
        let rho = diag_state(&[f, rest, rest, rest], (2, 2));
        let expected = -f * f.log2() - (1.0 - f) * rest.log2();
        assert_abs_diff_eq!(von_neumann_entropy(&rho), expected, epsilon = 1e-12);
    }

    #[test]
    fn relative_entropy_of_state_with_itself_is_zero() {
        let rho = diag_state(&[0.5, 0.3, 0.15, 0.05], (2, 2));
        assert_abs_diff_eq!(relative_entropy(&rho, &rho).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn relative_entropy_pure_versus_maximally_mixed() {
        let rho = diag_state(&[1.0, 0.0], (2, 1));
        let sigma = DensityMatrix::new(identity(2).scale(0.5), (2, 1)).unwrap();
        assert_abs_diff_eq!(relative_entropy(&rho, &sigma).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn relative_entropy_of_disjoint_supports_is_infinite() {
        let rho = diag_state(&[1.0, 0.0], (2, 1));
        let sigma = diag_state(&[0.0, 1.0], (2, 1));
        assert!(relative_entropy(&rho, &sigma).unwrap().is_infinite());
    }

    #[test]
    fn relative_entropy_rejects_dimension_mismatch() {
        let rho = diag_state(&[1.0, 0.0], (2, 1));
        let sigma = diag_state(&[1.0, 0.0, 0.0], (3, 1));
        assert!(relative_entropy(&rho, &sigma).is_err());
    }
}
