//! The d^2 mutually orthogonal Weyl (clock-and-shift) unitaries, one-sided
//! signal encodings, and the canonical equal-weight signal ensemble.

use std::f64::consts::TAU;

use crate::density::{convex_mix, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::tol;

/// Label (p, q) of a Weyl operator, with flat index i = p d + q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeylIndex {
    pub p: usize,
    pub q: usize,
}

impl WeylIndex {
    pub fn new(d: usize, p: usize, q: usize) -> Result<Self> {
        if p >= d || q >= d {
            return Err(Error::IndexOutOfRange(format!(
                "(p, q) = ({p}, {q}) outside [0, {d})^2"
            )));
        }
        Ok(Self { p, q })
    }

    pub fn from_flat(d: usize, flat: usize) -> Result<Self> {
        if flat >= d * d {
            return Err(Error::IndexOutOfRange(format!(
                "flat index {flat} outside [0, {})",
                d * d
            )));
        }
        Ok(Self {
            p: flat / d,
            q: flat % d,
        })
    }

    pub fn flat(&self, d: usize) -> usize {
        self.p * d + self.q
    }
}

/// The Weyl operator U_{(p,q)} acting as
/// `U |j> = exp(i 2 pi p j / d) |j + q mod d>` on the 0-based computational
/// basis. `U_{(0,0)}` is the identity; (p, 0) are clock operators and (0, q)
/// cyclic shifts.
pub fn weyl(d: usize, p: usize, q: usize) -> Result<CMatrix> {
    WeylIndex::new(d, p, q)?;
    let mut u = CMatrix::zeros(d, d);
    for j in 0..d {
        let phase = TAU * ((p * j) % d) as f64 / d as f64;
        u[((j + q) % d, j)] = c(phase.cos(), phase.sin());
    }
    Ok(u)
}

/// All d^2 Weyl operators ordered by flat index p d + q. They are pairwise
/// orthogonal under the normalized trace inner product,
/// `tr(U_i^H U_j) / d = delta_ij`.
pub fn all_weyl(d: usize) -> Result<Vec<CMatrix>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "the Weyl set needs d >= 2, got {d}"
        )));
    }
    let mut set = Vec::with_capacity(d * d);
    for p in 0..d {
        for q in 0..d {
            set.push(weyl(d, p, q)?);
        }
    }
    Ok(set)
}

/// One-sided signal encoding (U (x) I) rho (U^H (x) I). The unitary acts on
/// the A factor only, so the spectrum of rho is preserved.
pub fn apply_signal(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix> {
    if !rho.is_composite() {
        return Err(Error::NotComposite { dim: rho.dim() });
    }
    let (da, db) = rho.dims();
    if u.nrows() != da || u.ncols() != da {
        return Err(Error::DimensionMismatch(format!(
            "unitary is {}x{} but the A factor has dimension {da}",
            u.nrows(),
            u.ncols()
        )));
    }
    let deviation = linalg::unitarity_deviation(u);
    if deviation > tol::UNITARITY {
        return Err(Error::NotUnitary { deviation });
    }
    let big = linalg::kron(u, &linalg::identity(db));
    Ok(DensityMatrix::trusted(
        linalg::conjugate(&big, rho.matrix()),
        (da, db),
    ))
}

/// One weighted signal of an ensemble: the encoding unitary, its a priori
/// probability, and the cached transformed state.
#[derive(Debug, Clone)]
pub struct Signal {
    pub unitary: CMatrix,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// A base state together with a list of one-sided unitary signals. The
/// transformed states are computed eagerly: every downstream quantity (the
/// average state, the capacity) reuses them.
#[derive(Debug, Clone)]
pub struct SignalEnsemble {
    base: DensityMatrix,
    signals: Vec<Signal>,
}

impl SignalEnsemble {
    /// Builds the ensemble, validating probabilities and unitarity.
    pub fn new(base: DensityMatrix, items: Vec<(CMatrix, f64)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidParameter(
                "an ensemble needs at least one signal".into(),
            ));
        }
        let mut sum = 0.0;
        for (_, p) in &items {
            if *p < 0.0 {
                return Err(Error::InvalidProbabilities { sum: *p });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > tol::PROBABILITY_SUM {
            return Err(Error::InvalidProbabilities { sum });
        }
        let signals = items
            .into_iter()
            .map(|(u, p)| {
                let state = apply_signal(&base, &u)?;
                Ok(Signal {
                    unitary: u,
                    probability: p,
                    state,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { base, signals })
    }

    /// The canonical ensemble: all d^2 Weyl signals with equal probability
    /// 1/d^2.
    pub fn canonical(rho: &DensityMatrix) -> Result<Self> {
        if !rho.is_composite() || rho.dim_a() != rho.dim_b() {
            return Err(Error::NotComposite { dim: rho.dim() });
        }
        let d = rho.dim_a();
        let p = 1.0 / (d * d) as f64;
        let items = all_weyl(d)?.into_iter().map(|u| (u, p)).collect();
        Self::new(rho.clone(), items)
    }

    pub fn base(&self) -> &DensityMatrix {
        &self.base
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    /// The average state sum_i p_i rho_i.
    pub fn average(&self) -> DensityMatrix {
        let parts: Vec<(f64, &DensityMatrix)> = self
            .signals
            .iter()
            .map(|s| (s.probability, &s.state))
            .collect();
        convex_mix(&parts).expect("ensemble probabilities are validated")
    }
}

/// Averages `m` over conjugation by the full Weyl set:
/// `sum_i U_i m U_i^H = d tr(m) I`. Returns the explicit sum; the closed
/// form is what the identity tests compare against.
pub fn twirl(m: &CMatrix, d: usize) -> Result<CMatrix> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, expected {d}x{d}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut acc = CMatrix::zeros(d, d);
    for u in all_weyl(d)? {
        acc += linalg::conjugate(&u, m);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, identity, max_abs_diff, CVector};
    use crate::random::{random_full_rank, stream_rng};
    use crate::su_basis::GeneratorBasis;
    use approx::assert_abs_diff_eq;

    fn singlet() -> DensityMatrix {
        let inv = 1.0 / 2.0f64.sqrt();
        let psi = CVector::from_vec(vec![cr(0.0), cr(inv), cr(-inv), cr(0.0)]);
        DensityMatrix::pure(&psi, (2, 2)).unwrap()
    }

    #[test]
    fn weyl_zero_zero_is_identity() {
        for d in 2..=5 {
            assert!(max_abs_diff(&weyl(d, 0, 0).unwrap(), &identity(d)) < 1e-15);
        }
    }

    #[test]
    fn weyl_qubit_cases() {
        // Phases e^{i pi j} give diag(1, -1); the pure shift gives sigma_x.
        let sz = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)]);
        let sx = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]);
        assert!(max_abs_diff(&weyl(2, 1, 0).unwrap(), &sz) < 1e-15);
        assert!(max_abs_diff(&weyl(2, 0, 1).unwrap(), &sx) < 1e-15);
    }

    #[test]
    fn weyl_rejects_out_of_range() {
        assert!(weyl(2, 2, 0).is_err());
        assert!(weyl(2, 0, 2).is_err());
    }

    #[test]
    fn weyl_flat_index_roundtrip() {
        let d = 4;
        for flat in 0..d * d {
            let idx = WeylIndex::from_flat(d, flat).unwrap();
            assert_eq!(idx.flat(d), flat);
        }
        assert_eq!(WeylIndex::from_flat(4, 0).unwrap(), WeylIndex { p: 0, q: 0 });
        assert!(WeylIndex::from_flat(2, 4).is_err());
    }

    #[test]
    fn weyl_set_is_orthogonal() {
        for d in 2..=6 {
            let set = all_weyl(d).unwrap();
            assert_eq!(set.len(), d * d);
            for (i, ui) in set.iter().enumerate() {
                for (j, uj) in set.iter().enumerate() {
                    let g = (ui.adjoint() * uj).trace() / cr(d as f64);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (g.re - expected).abs() < 1e-12 && g.im.abs() < 1e-12,
                        "d={d} i={i} j={j} gram={g}"
                    );
                }
            }
        }
    }

    #[test]
    fn qubit_weyl_set_matches_pauli_encodings() {
        // Flat order (q fast): {I, sigma_x, sigma_z, sigma_x sigma_z}. The
        // qubit case reduces to the standard Pauli encoding set up to
        // phases (sigma_x sigma_z = -i sigma_y).
        let set = all_weyl(2).unwrap();
        let sx = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]);
        let sz = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)]);
        assert!(max_abs_diff(&set[0], &identity(2)) < 1e-15);
        assert!(max_abs_diff(&set[1], &sx) < 1e-15);
        assert!(max_abs_diff(&set[2], &sz) < 1e-15);
        assert!(max_abs_diff(&set[3], &(&sx * &sz)) < 1e-15);
    }

    #[test]
    fn apply_signal_identity_is_noop() {
        let rho = singlet();
        let out = apply_signal(&rho, &identity(2)).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn apply_signal_preserves_spectrum() {
        let mut rng = stream_rng(33, 0);
        let rho = random_full_rank((3, 3), &mut rng);
        let u = crate::random::haar_unitary(3, &mut rng);
        let out = apply_signal(&rho, &u).unwrap();
        let a = rho.eigenvalues();
        let b = out.eigenvalues();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn apply_signal_shift_maps_singlet_to_phi_minus() {
        // (sigma_x (x) I)|Psi-> = -|Phi->, so the projectors match.
        let sx = weyl(2, 0, 1).unwrap();
        let out = apply_signal(&singlet(), &sx).unwrap();
        let inv = 1.0 / 2.0f64.sqrt();
        let phi_minus = CVector::from_vec(vec![cr(inv), cr(0.0), cr(0.0), cr(-inv)]);
        let expected = DensityMatrix::pure(&phi_minus, (2, 2)).unwrap();
        assert!(max_abs_diff(out.matrix(), expected.matrix()) < 1e-15);
    }

    #[test]
    fn apply_signal_rejects_wrong_factor_dimension() {
        let u3 = identity(3);
        assert!(matches!(
            apply_signal(&singlet(), &u3),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn apply_signal_rejects_non_unitary() {
        let m = identity(2).scale(0.5);
        assert!(matches!(
            apply_signal(&singlet(), &m),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn canonical_ensemble_shape() {
        for d in [2usize, 3] {
            let mut rng = stream_rng(8, d as u64);
            let rho = random_full_rank((d, d), &mut rng);
            let ens = SignalEnsemble::canonical(&rho).unwrap();
            assert_eq!(ens.len(), d * d);
            for s in ens.signals() {
                assert_abs_diff_eq!(s.probability, 1.0 / (d * d) as f64, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn canonical_ensemble_of_maximally_mixed_is_constant() {
        let rho = DensityMatrix::new(identity(4).scale(0.25), (2, 2)).unwrap();
        let ens = SignalEnsemble::canonical(&rho).unwrap();
        for s in ens.signals() {
            assert!(max_abs_diff(s.state.matrix(), rho.matrix()) < 1e-14);
        }
    }

    #[test]
    fn ensemble_rejects_bad_probabilities() {
        let rho = singlet();
        let items = vec![(identity(2), 0.7), (weyl(2, 0, 1).unwrap(), 0.7)];
        assert!(matches!(
            SignalEnsemble::new(rho, items),
            Err(Error::InvalidProbabilities { .. })
        ));
    }

    #[test]
    fn twirl_collapses_unit_matrices() {
        // sum_i U_i P_jk U_i^H = delta_jk d I, checked at both ends.
        for d in [2usize, 3, 4] {
            let mut p00 = CMatrix::zeros(d, d);
            p00[(0, 0)] = cr(1.0);
            let out = twirl(&p00, d).unwrap();
            assert!(max_abs_diff(&out, &identity(d).scale(d as f64)) < 1e-12);

            let mut p01 = CMatrix::zeros(d, d);
            p01[(0, 1)] = cr(1.0);
            let out = twirl(&p01, d).unwrap();
            assert!(max_abs_entry_of(&out) < 1e-12);
        }
    }

    #[test]
    fn twirl_annihilates_generators() {
        for d in [2usize, 3] {
            let basis = GeneratorBasis::new(d).unwrap();
            for lam in basis.lambdas() {
                let out = twirl(lam, d).unwrap();
                assert!(max_abs_entry_of(&out) < 1e-12);
            }
        }
    }

    #[test]
    fn twirl_of_random_matrices_is_scaled_identity() {
        for d in [2usize, 3, 5] {
            for trial in 0..50u64 {
                let mut rng = stream_rng(777 + trial, d as u64);
                let m = crate::random::ginibre(d, d, &mut rng);
                let out = twirl(&m, d).unwrap();
                let expected = identity(d) * (m.trace() * cr(d as f64));
                assert!(
                    max_abs_diff(&out, &expected) < 1e-10,
                    "twirl identity failed at d={d} trial={trial}"
                );
            }
        }
    }

    fn max_abs_entry_of(m: &CMatrix) -> f64 {
        crate::linalg::max_abs_entry(m)
    }
}
