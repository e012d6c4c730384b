//! Deterministic and seeded construction of the standard test states: Bell
//! states, maximally entangled qudit pairs, Werner/isotropic families,
//! Bell-diagonal states, and random mixed/pure/product/separable states.

use serde::{Deserialize, Serialize};

use crate::density::{convex_mix, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{cr, kron, CVector};
use crate::random::{
    flat_simplex_weights, random_density, random_pure, random_unit_vector, stream_rng,
};

/// The four Bell states on two qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellKind {
    /// (|01> - |10>) / sqrt2
    PsiMinus,
    /// (|01> + |10>) / sqrt2
    PsiPlus,
    /// (|00> - |11>) / sqrt2
    PhiMinus,
    /// (|00> + |11>) / sqrt2
    PhiPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Bell,
    MaxEntangled,
    Werner,
    Isotropic,
    BellDiagonal,
    RandomMixed,
    RandomPure,
    RandomProduct,
    RandomSeparable,
}

/// JSON-facing description of a state to build. Random kinds are fully
/// determined by `(spec, seed)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpec {
    pub kind: StateKind,
    /// Factor dimension; the state lives on C^d (x) C^d.
    #[serde(default = "default_dim")]
    pub d: usize,
    /// Fraction parameter for werner/isotropic (overlap with the reference
    /// Bell or maximally entangled state).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    /// Bell-basis eigenvalues (Psi-, Psi+, Phi-, Phi+) for bell_diagonal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
    /// Rank for random_mixed; defaults to full.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Number of product components for random_separable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<usize>,
    /// Which Bell state `bell` builds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bell: Option<BellKind>,
    #[serde(default)]
    pub seed: u64,
}

fn default_dim() -> usize {
    2
}

impl StateSpec {
    pub fn new(kind: StateKind, d: usize) -> Self {
        Self {
            kind,
            d,
            fidelity: None,
            eigenvalues: None,
            rank: None,
            components: None,
            bell: None,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_fidelity(mut self, f: f64) -> Self {
        self.fidelity = Some(f);
        self
    }
}

/// Bell state vector.
pub fn bell_vector(kind: BellKind) -> CVector {
    let inv = 1.0 / 2.0f64.sqrt();
    let (a, b, sign) = match kind {
        BellKind::PsiMinus => (1, 2, -1.0),
        BellKind::PsiPlus => (1, 2, 1.0),
        BellKind::PhiMinus => (0, 3, -1.0),
        BellKind::PhiPlus => (0, 3, 1.0),
    };
    let mut v = CVector::zeros(4);
    v[a] = cr(inv);
    v[b] = cr(sign * inv);
    v
}

/// Bell-state projector.
pub fn bell_state(kind: BellKind) -> DensityMatrix {
    DensityMatrix::pure(&bell_vector(kind), (2, 2)).expect("Bell vectors are unit")
}

/// The maximally entangled state sum_i |ii> / sqrt(d) on C^d (x) C^d.
pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "maximally entangled state needs d >= 2, got {d}"
        )));
    }
    let inv = cr(1.0 / (d as f64).sqrt());
    let mut psi = CVector::zeros(d * d);
    for i in 0..d {
        psi[i * d + i] = inv;
    }
    DensityMatrix::pure(&psi, (d, d))
}

/// Werner family F |Psi-><Psi-| + (1-F)/3 (other three Bell projectors).
pub fn werner(f: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter(format!(
            "werner fraction must lie in [0, 1], got {f}"
        )));
    }
    bell_diagonal(&[f, (1.0 - f) / 3.0, (1.0 - f) / 3.0, (1.0 - f) / 3.0])
}

/// Isotropic family F |Phi_d><Phi_d| + (1-F) (I - |Phi_d><Phi_d|)/(d^2-1).
pub fn isotropic(d: usize, f: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter(format!(
            "isotropic fraction must lie in [0, 1], got {f}"
        )));
    }
    let phi = max_entangled(d)?;
    let dd = d * d;
    let rest = (crate::linalg::identity(dd) - phi.matrix()).scale((1.0 - f) / (dd - 1) as f64);
    let mat = phi.matrix().scale(f) + rest;
    Ok(DensityMatrix::trusted(mat, (d, d)))
}

/// Mixture of the four Bell projectors with the given eigenvalues, ordered
/// (Psi-, Psi+, Phi-, Phi+).
pub fn bell_diagonal(eigenvalues: &[f64]) -> Result<DensityMatrix> {
    if eigenvalues.len() != 4 {
        return Err(Error::InvalidParameter(format!(
            "bell_diagonal needs 4 eigenvalues, got {}",
            eigenvalues.len()
        )));
    }
    if eigenvalues.iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidParameter(
            "bell_diagonal eigenvalues must be non-negative".into(),
        ));
    }
    let sum: f64 = eigenvalues.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities { sum });
    }
    let kinds = [
        BellKind::PsiMinus,
        BellKind::PsiPlus,
        BellKind::PhiMinus,
        BellKind::PhiPlus,
    ];
    let states: Vec<DensityMatrix> = kinds.iter().map(|&k| bell_state(k)).collect();
    let parts: Vec<(f64, &DensityMatrix)> = eigenvalues
        .iter()
        .copied()
        .zip(states.iter())
        .collect();
    convex_mix(&parts)
}

/// Builds the state a spec describes. Identical `(spec, seed)` inputs
/// produce bitwise-identical states.
pub fn build(spec: &StateSpec) -> Result<DensityMatrix> {
    let d = spec.d;
    match spec.kind {
        StateKind::Bell => {
            require_qubits(spec.kind, d)?;
            Ok(bell_state(spec.bell.unwrap_or(BellKind::PsiMinus)))
        }
        StateKind::MaxEntangled => max_entangled(d),
        StateKind::Werner => {
            require_qubits(spec.kind, d)?;
            werner(spec.fidelity.ok_or_else(|| missing("fidelity"))?)
        }
        StateKind::Isotropic => {
            check_dim(d)?;
            isotropic(d, spec.fidelity.ok_or_else(|| missing("fidelity"))?)
        }
        StateKind::BellDiagonal => {
            require_qubits(spec.kind, d)?;
            let eigenvalues = spec
                .eigenvalues
                .as_ref()
                .ok_or_else(|| missing("eigenvalues"))?;
            bell_diagonal(eigenvalues)
        }
        StateKind::RandomMixed => {
            check_dim(d)?;
            let rank = spec.rank.unwrap_or(d * d);
            if rank == 0 || rank > d * d {
                return Err(Error::InvalidParameter(format!(
                    "rank must lie in [1, {}], got {rank}",
                    d * d
                )));
            }
            let mut rng = stream_rng(spec.seed, salt(spec.kind));
            Ok(random_density((d, d), rank, &mut rng))
        }
        StateKind::RandomPure => {
            check_dim(d)?;
            let mut rng = stream_rng(spec.seed, salt(spec.kind));
            Ok(random_pure((d, d), &mut rng))
        }
        StateKind::RandomProduct => {
            check_dim(d)?;
            let mut rng = stream_rng(spec.seed, salt(spec.kind));
            let a = random_density((d, 1), d, &mut rng);
            let b = random_density((d, 1), d, &mut rng);
            Ok(DensityMatrix::trusted(
                kron(a.matrix(), b.matrix()),
                (d, d),
            ))
        }
        StateKind::RandomSeparable => {
            check_dim(d)?;
            let k = spec.components.unwrap_or(2 * d * d);
            if k == 0 {
                return Err(Error::InvalidParameter(
                    "random_separable needs components >= 1".into(),
                ));
            }
            let mut rng = stream_rng(spec.seed, salt(spec.kind));
            let weights = flat_simplex_weights(k, &mut rng);
            let mut mat = crate::linalg::CMatrix::zeros(d * d, d * d);
            for w in weights {
                let a = random_unit_vector(d, &mut rng);
                let b = random_unit_vector(d, &mut rng);
                let ab = kron(&(&a * a.adjoint()), &(&b * b.adjoint()));
                mat += ab.scale(w);
            }
            Ok(DensityMatrix::trusted(mat, (d, d)))
        }
    }
}

/// Whether the spec constructs a state that is separable by construction
/// (an explicit product-state mixture). Werner states below the
/// entanglement threshold are merely PPT, not certified, so they report
/// false.
pub fn is_certified_separable(spec: &StateSpec) -> bool {
    matches!(
        spec.kind,
        StateKind::RandomProduct | StateKind::RandomSeparable
    )
}

fn require_qubits(kind: StateKind, d: usize) -> Result<()> {
    if d != 2 {
        return Err(Error::InvalidParameter(format!(
            "{kind:?} is a two-qubit family, got d = {d}"
        )));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if !(2..=8).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "factor dimension must lie in [2, 8], got {d}"
        )));
    }
    Ok(())
}

fn missing(field: &str) -> Error {
    Error::InvalidParameter(format!("missing required parameter `{field}`"))
}

fn salt(kind: StateKind) -> u64 {
    // Distinct streams per kind so specs differing only in kind do not
    // share draws.
    match kind {
        StateKind::Bell => 0xB0,
        StateKind::MaxEntangled => 0xB1,
        StateKind::Werner => 0xB2,
        StateKind::Isotropic => 0xB3,
        StateKind::BellDiagonal => 0xB4,
        StateKind::RandomMixed => 0xB5,
        StateKind::RandomPure => 0xB6,
        StateKind::RandomProduct => 0xB7,
        StateKind::RandomSeparable => 0xB8,
    }
}
