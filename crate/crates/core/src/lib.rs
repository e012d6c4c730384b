//! Numerical toolkit for dense coding with mixed bipartite entanglement.
//!
//! The crate computes the capacity chi* of the canonical Weyl signal
//! ensemble for arbitrary states on `C^d (x) C^d`, audits its optimality
//! against randomized adversarial ensembles, and brackets the relative
//! entropy of entanglement E_R to certify the capacity bounds
//! `E_R <= chi* <= E_R + log2(d)`.
//!
//! All entropies are in bits. All operations are pure functions over
//! immutable values and safe to call concurrently.

pub mod capacity;
pub mod density;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod random;
pub mod rel_ent;
pub mod states;
pub mod su_basis;
pub mod tol;
pub mod weyl;

pub use capacity::{
    audit_optimality, canonical_average, canonical_average_explicit, canonical_average_residual,
    capacity_report, chi_star, donald_residual, holevo_chi, holevo_chi_relative,
    max_distance_residual, AuditOutcome, CapacityReport,
};
pub use density::{convex_mix, partial_trace, partial_transpose_b, DensityMatrix, Subsystem};
pub use entropy::{relative_entropy, relative_entropy_with, von_neumann_entropy};
pub use error::{Error, Result};
pub use linalg::{herm_eig, herm_eig_with, kron, CMatrix, CVector, Spectrum, C64};
pub use rel_ent::{
    bell_diag_equality_check, e_r, e_r_lower, e_r_upper, pvp_check, verify_capacity_bounds,
    BoundsReport, CheckOutcome, ERelConfig, ERelResult,
};
pub use states::{build, is_certified_separable, BellKind, StateKind, StateSpec};
pub use su_basis::{decompose, reconstruct, GeneratorBasis, HSDecomposition};
pub use tol::{configure as configure_tolerances, Tolerances};
pub use weyl::{all_weyl, apply_signal, twirl, weyl, SignalEnsemble, WeylIndex};
