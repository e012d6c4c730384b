//! Dense-coding capacities: the Holevo quantity of signal ensembles, the
//! capacity chi* of the canonical Weyl ensemble, the structural identities
//! it satisfies, and a randomized audit that no ensemble beats it.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::{partial_trace, DensityMatrix, Subsystem};
use crate::entropy::{relative_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{identity, kron, max_abs_diff, CMatrix};
use crate::random::{flat_simplex_weights, haar_unitary, stream_rng};
use crate::tol;
use crate::weyl::SignalEnsemble;

/// Holevo quantity chi = S(avg) - sum_i p_i S(rho_i), in bits.
///
/// For one-sided unitary signals every S(rho_i) equals S(base), so this
/// reduces to S(avg) - S(base); the general form is evaluated anyway.
pub fn holevo_chi(ensemble: &SignalEnsemble) -> f64 {
    let avg = ensemble.average();
    let mut chi = von_neumann_entropy(&avg);
    for s in ensemble.signals() {
        if s.probability > 0.0 {
            chi -= s.probability * von_neumann_entropy(&s.state);
        }
    }
    chi
}

/// The same quantity as [`holevo_chi`] in its relative-entropy form
/// chi = sum_i p_i S(rho_i || avg). Kept as an independent evaluation path
/// for cross-checking; the two are algebraically equal.
pub fn holevo_chi_relative(ensemble: &SignalEnsemble) -> Result<f64> {
    let avg = ensemble.average();
    let mut chi = 0.0;
    for s in ensemble.signals() {
        if s.probability > 0.0 {
            chi += s.probability * relative_entropy(&s.state, &avg)?;
        }
    }
    Ok(chi)
}

/// The average of the canonical Weyl ensemble in closed form,
/// (1/d) I (x) rho_B. Twirling the A factor over the full Weyl set erases
/// it, so only the B marginal survives.
pub fn canonical_average(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if !rho.is_composite() || rho.dim_a() != rho.dim_b() {
        return Err(Error::NotComposite { dim: rho.dim() });
    }
    let d = rho.dim_a();
    let rho_b = partial_trace(rho, Subsystem::B)?;
    let mat = kron(&identity(d).scale(1.0 / d as f64), rho_b.matrix());
    Ok(DensityMatrix::trusted(mat, (d, d)))
}

/// The same average evaluated the long way, as the explicit equal-weight sum
/// over all d^2 Weyl signals.
pub fn canonical_average_explicit(rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(SignalEnsemble::canonical(rho)?.average())
}

/// Max elementwise difference between the explicit canonical average and its
/// closed form. The identity is exact, so anything above eigensolver noise
/// signals an implementation bug.
pub fn canonical_average_residual(rho: &DensityMatrix) -> Result<f64> {
    let explicit = canonical_average_explicit(rho)?;
    let closed = canonical_average(rho)?;
    let residual = max_abs_diff(explicit.matrix(), closed.matrix());
    if residual > 1e-8 {
        return Err(Error::CrossCheckFailed {
            context: "canonical average: explicit sum vs closed form".into(),
            residual,
        });
    }
    Ok(residual)
}

/// Capacity of the canonical Weyl ensemble,
/// chi* = S(avg*) - S(rho) = log2(d) + S(rho_B) - S(rho).
///
/// Both routes are evaluated and must agree within the cross-check
/// tolerance.
pub fn chi_star(rho: &DensityMatrix) -> Result<f64> {
    let d = rho.dim_a() as f64;
    let avg = canonical_average(rho)?;
    let s_rho = von_neumann_entropy(rho);
    let direct = von_neumann_entropy(&avg) - s_rho;
    let rho_b = partial_trace(rho, Subsystem::B)?;
    let via_marginal = d.log2() + von_neumann_entropy(&rho_b) - s_rho;
    let residual = (direct - via_marginal).abs();
    if residual > tol::CROSS_CHECK {
        return Err(Error::CrossCheckFailed {
            context: "chi*: S(avg*) - S(rho) vs log2(d) + S(rho_B) - S(rho)".into(),
            residual,
        });
    }
    // Concavity makes the true value non-negative; capacity-zero states can
    // round just below it.
    Ok(if direct < 0.0 && direct > -1e-10 {
        0.0
    } else {
        direct
    })
}

/// Max residual of |S(omega || avg*) - chi*| over one-sided encodings of
/// `rho` by the given unitaries: every such signal state sits at the same
/// relative-entropy distance chi* from the canonical average (the maximal
/// distance property).
///
/// A support violation (possible only when the B marginal is
/// rank-deficient) is reported as an error rather than folded into the
/// residual.
pub fn max_distance_residual(rho: &DensityMatrix, unitaries: &[CMatrix]) -> Result<f64> {
    let avg = canonical_average(rho)?;
    let target = chi_star(rho)?;
    let mut max_residual = 0.0f64;
    for u in unitaries {
        let omega = crate::weyl::apply_signal(rho, u)?;
        let dist = relative_entropy(&omega, &avg)?;
        if dist.is_infinite() {
            return Err(Error::SupportViolation { leak: f64::NAN });
        }
        max_residual = max_residual.max((dist - target).abs());
    }
    Ok(max_residual)
}

/// Residual of Donald's identity
/// |sum_k p_k S(rho_k||sigma) - sum_k p_k S(rho_k||avg) - S(avg||sigma)|.
///
/// Infinite branches (sigma not supporting the ensemble) are reported as a
/// support violation, not a failure of the identity.
pub fn donald_residual(ensemble: &SignalEnsemble, sigma: &DensityMatrix) -> Result<f64> {
    let avg = ensemble.average();
    let mut lhs = 0.0;
    let mut mid = 0.0;
    for s in ensemble.signals() {
        if s.probability == 0.0 {
            continue;
        }
        let to_sigma = relative_entropy(&s.state, sigma)?;
        let to_avg = relative_entropy(&s.state, &avg)?;
        if to_sigma.is_infinite() || to_avg.is_infinite() {
            return Err(Error::SupportViolation { leak: f64::NAN });
        }
        lhs += s.probability * to_sigma;
        mid += s.probability * to_avg;
    }
    let tail = relative_entropy(&avg, sigma)?;
    if tail.is_infinite() {
        return Err(Error::SupportViolation { leak: f64::NAN });
    }
    Ok((lhs - mid - tail).abs())
}

/// One capacity-bound violation found by the audit.
#[derive(Debug, Clone, Serialize)]
pub struct AuditFailure {
    pub trial: usize,
    pub chi: f64,
    pub excess: f64,
}

/// Outcome of the randomized optimality audit.
#[derive(Debug, Clone, Serialize)]
pub struct AuditOutcome {
    pub trials: usize,
    pub max_chi_found: f64,
    /// chi* minus the best chi any random ensemble achieved.
    pub margin: f64,
    /// Trials with chi > chi* + tolerance. Zero on passing runs.
    pub violations: usize,
    /// Trials where chi* = chi + S(avg||avg*) missed its tolerance.
    pub decomposition_violations: usize,
    pub max_decomposition_residual: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<AuditFailure>,
}

impl AuditOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.decomposition_violations == 0
    }
}

struct TrialResult {
    chi: f64,
    decomposition_residual: f64,
}

/// Randomized adversarial audit of the optimality of chi*.
///
/// Each trial draws an ensemble of n <= max_signals Haar-random unitaries
/// (n uniform in 1..=max_signals) with flat-Dirichlet probabilities,
/// computes its Holevo quantity chi, and checks both chi <= chi* + tol and
/// the exact decomposition chi* = chi + S(avg||avg*).
///
/// Trials run in parallel; trial i uses the ChaCha stream (seed, i), so
/// results do not depend on scheduling.
pub fn audit_optimality(
    rho: &DensityMatrix,
    trials: usize,
    max_signals: usize,
    seed: u64,
) -> Result<AuditOutcome> {
    if trials == 0 {
        return Err(Error::InvalidParameter("audit needs trials >= 1".into()));
    }
    if max_signals == 0 {
        return Err(Error::InvalidParameter(
            "audit needs max_signals >= 1".into(),
        ));
    }
    let target = chi_star(rho)?;
    let avg_star = canonical_average(rho)?;
    let d = rho.dim_a();

    let results: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial as u64);
            let n = rng.random_range(1..=max_signals);
            let weights = flat_simplex_weights(n, &mut rng);
            let items: Vec<(CMatrix, f64)> = weights
                .into_iter()
                .map(|w| (haar_unitary(d, &mut rng), w))
                .collect();
            let ensemble = SignalEnsemble::new(rho.clone(), items)
                .expect("random ensemble construction is valid");
            let chi = holevo_chi(&ensemble);
            let gap = relative_entropy(&ensemble.average(), &avg_star)
                .expect("equal dims by construction");
            let decomposition_residual = if gap.is_finite() {
                (target - chi - gap).abs()
            } else {
                f64::INFINITY
            };
            TrialResult {
                chi,
                decomposition_residual,
            }
        })
        .collect();

    let mut outcome = AuditOutcome {
        trials,
        max_chi_found: f64::NEG_INFINITY,
        margin: 0.0,
        violations: 0,
        decomposition_violations: 0,
        max_decomposition_residual: 0.0,
        seed,
        failures: Vec::new(),
    };
    for (trial, r) in results.iter().enumerate() {
        outcome.max_chi_found = outcome.max_chi_found.max(r.chi);
        if r.chi > target + tol::AUDIT_CHI {
            outcome.violations += 1;
            outcome.failures.push(AuditFailure {
                trial,
                chi: r.chi,
                excess: r.chi - target,
            });
        }
        if r.decomposition_residual > tol::AUDIT_DECOMPOSITION {
            outcome.decomposition_violations += 1;
        }
        outcome.max_decomposition_residual = outcome
            .max_decomposition_residual
            .max(r.decomposition_residual);
    }
    outcome.margin = target - outcome.max_chi_found;
    Ok(outcome)
}

/// Summary of the capacity computation and the structural identities.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityReport {
    /// Factor dimension of the input state.
    pub d: usize,
    /// Holevo quantity of the canonical ensemble (equals chi_star).
    pub chi: f64,
    /// Capacity of the canonical ensemble.
    pub chi_star: f64,
    pub s_rho: f64,
    /// Entropy of the canonical average state.
    pub s_avg: f64,
    /// Entropy of the B marginal.
    pub s_rho_b: f64,
    /// Explicit sum vs closed form for the canonical average.
    pub lemma1_residual: f64,
    /// Max |S(omega||avg*) - chi*| over the Weyl encodings.
    pub lemma2_max_residual: f64,
    /// Donald identity residual for the canonical ensemble against avg*.
    pub donald_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditOutcome>,
}

/// Computes chi* along with every structural residual, optionally followed
/// by a randomized optimality audit.
pub fn capacity_report(
    rho: &DensityMatrix,
    audit: Option<(usize, usize, u64)>,
) -> Result<CapacityReport> {
    let d = rho.dim_a();
    let ensemble = SignalEnsemble::canonical(rho)?;
    let avg = canonical_average(rho)?;
    let rho_b = partial_trace(rho, Subsystem::B)?;

    let chi = holevo_chi(&ensemble);
    let chi_rel = holevo_chi_relative(&ensemble)?;
    if (chi - chi_rel).abs() > 1e-9 && chi_rel.is_finite() {
        return Err(Error::CrossCheckFailed {
            context: "holevo chi: entropy form vs relative-entropy form".into(),
            residual: (chi - chi_rel).abs(),
        });
    }
    let chi_star = chi_star(rho)?;
    let weyls = crate::weyl::all_weyl(d)?;
    let lemma2 = max_distance_residual(rho, &weyls)?;
    let donald = donald_residual(&ensemble, &avg)?;

    let audit = match audit {
        Some((trials, max_signals, seed)) => {
            Some(audit_optimality(rho, trials, max_signals, seed)?)
        }
        None => None,
    };

    Ok(CapacityReport {
        d,
        chi,
        chi_star,
        s_rho: von_neumann_entropy(rho),
        s_avg: von_neumann_entropy(&avg),
        s_rho_b: von_neumann_entropy(&rho_b),
        lemma1_residual: canonical_average_residual(rho)?,
        lemma2_max_residual: lemma2,
        donald_residual: donald,
        audit,
    })
}
