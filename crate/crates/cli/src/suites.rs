//! Randomized verification suites behind `dcopt verify`.
//!
//! Every suite draws fresh random states from per-trial ChaCha streams, so
//! results are reproducible for a given seed regardless of thread count.

use rayon::prelude::*;
use serde::Serialize;

use dcopt_core::random::{flat_simplex_weights, haar_unitary, random_full_rank, stream_rng};
use dcopt_core::rel_ent::{verify_capacity_bounds, CheckOutcome, ERelConfig};
use dcopt_core::weyl::SignalEnsemble;
use dcopt_core::{
    audit_optimality, canonical_average_residual, donald_residual, max_distance_residual,
    CMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[clap(rename_all = "lower")]
pub enum Suite {
    Lemma1,
    Lemma2,
    Donald,
    Theorem1,
    Theorem2,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Donald => "donald",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub seed: u64,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub passed: bool,
    pub max_residual: f64,
    /// One residual per trial, in trial order.
    pub residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inconclusive: Option<usize>,
}

fn residual_suite(
    suite: &'static str,
    d: usize,
    trials: usize,
    seed: u64,
    tolerance: f64,
    trial_fn: impl Fn(u64) -> f64 + Sync,
) -> SuiteReport {
    let residuals: Vec<f64> = (0..trials as u64)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(&trial_fn)
        .collect();
    let mut violations = Vec::new();
    let mut max_residual = 0.0f64;
    for (trial, &r) in residuals.iter().enumerate() {
        max_residual = max_residual.max(r);
        if r.is_nan() || r > tolerance {
            violations.push(Violation {
                trial,
                seed,
                detail: format!("residual {r:.3e} exceeds {tolerance:.1e}"),
            });
        }
    }
    SuiteReport {
        suite,
        d,
        trials,
        seed,
        tolerance,
        passed: violations.is_empty(),
        max_residual,
        residuals,
        violations,
        inconclusive: None,
    }
}

/// Averaging the canonical ensemble must reproduce (1/d) I (x) rho_B.
pub fn lemma1(d: usize, trials: usize, seed: u64) -> SuiteReport {
    residual_suite("lemma1", d, trials, seed, 1e-10, |t| {
        let mut rng = stream_rng(seed, t);
        let rho = random_full_rank((d, d), &mut rng);
        canonical_average_residual(&rho).unwrap_or(f64::INFINITY)
    })
}

/// Every one-sided encoding must sit at distance chi* from the canonical
/// average.
pub fn lemma2(d: usize, trials: usize, seed: u64) -> SuiteReport {
    residual_suite("lemma2", d, trials, seed, 1e-8, |t| {
        let mut rng = stream_rng(seed, t);
        let rho = random_full_rank((d, d), &mut rng);
        let u = haar_unitary(d, &mut rng);
        max_distance_residual(&rho, std::slice::from_ref(&u)).unwrap_or(f64::INFINITY)
    })
}

/// Donald's identity over random ensembles and reference states.
pub fn donald(d: usize, trials: usize, seed: u64) -> SuiteReport {
    residual_suite("donald", d, trials, seed, 1e-8, |t| {
        let mut rng = stream_rng(seed, t);
        let rho = random_full_rank((d, d), &mut rng);
        let n = 1 + (t as usize % (2 * d * d));
        let weights = flat_simplex_weights(n, &mut rng);
        let items: Vec<(CMatrix, f64)> = weights
            .into_iter()
            .map(|w| (haar_unitary(d, &mut rng), w))
            .collect();
        let Ok(ens) = SignalEnsemble::new(rho, items) else {
            return f64::INFINITY;
        };
        let sigma = random_full_rank((d, d), &mut rng);
        donald_residual(&ens, &sigma).unwrap_or(f64::INFINITY)
    })
}

/// Randomized optimality audit on a handful of random base states; `trials`
/// adversarial ensembles per state.
pub fn theorem1(d: usize, trials: usize, seed: u64, states: usize) -> SuiteReport {
    let outcomes: Vec<_> = (0..states as u64)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, 0xFACE0000 + s);
            let rho = random_full_rank((d, d), &mut rng);
            audit_optimality(&rho, trials, 2 * d * d, seed ^ s)
        })
        .collect();
    let mut violations = Vec::new();
    let mut max_residual = 0.0f64;
    let mut residuals = Vec::new();
    for (i, outcome) in outcomes.iter().enumerate() {
        match outcome {
            Ok(o) => {
                residuals.push(o.max_decomposition_residual);
                max_residual = max_residual.max(o.max_decomposition_residual);
                if !o.passed() {
                    violations.push(Violation {
                        trial: i,
                        seed: o.seed,
                        detail: format!(
                            "{} capacity violations, {} decomposition violations, max chi {}",
                            o.violations, o.decomposition_violations, o.max_chi_found
                        ),
                    });
                }
            }
            Err(e) => violations.push(Violation {
                trial: i,
                seed,
                detail: e.to_string(),
            }),
        }
    }
    SuiteReport {
        suite: "theorem1",
        d,
        trials,
        seed,
        tolerance: 1e-7,
        passed: violations.is_empty(),
        max_residual,
        residuals,
        violations,
        inconclusive: None,
    }
}

/// Capacity bounds E_R <= chi* <= E_R + log2(d) on random states.
pub fn theorem2(d: usize, trials: usize, seed: u64) -> SuiteReport {
    let config = ERelConfig::default();
    let reports: Vec<_> = (0..trials as u64)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t);
            let rho = random_full_rank((d, d), &mut rng);
            verify_capacity_bounds(&rho, &config)
        })
        .collect();
    let mut violations = Vec::new();
    let mut residuals = Vec::new();
    let mut max_residual = 0.0f64;
    let mut inconclusive = 0usize;
    for (trial, report) in reports.iter().enumerate() {
        match report {
            Ok(r) => {
                let slack = (r.e_r.upper - r.chi_star)
                    .max(r.chi_star - r.e_r.lower.unwrap_or(f64::NEG_INFINITY) - (d as f64).log2());
                residuals.push(slack.max(0.0));
                max_residual = max_residual.max(slack.max(0.0));
                if r.violated() {
                    violations.push(Violation {
                        trial,
                        seed,
                        detail: format!(
                            "bounds violated: chi* = {}, E_R in [{:?}, {}]",
                            r.chi_star, r.e_r.lower, r.e_r.upper
                        ),
                    });
                } else if r.upper_bound_ok == CheckOutcome::Inconclusive {
                    inconclusive += 1;
                }
            }
            Err(e) => violations.push(Violation {
                trial,
                seed,
                detail: e.to_string(),
            }),
        }
    }
    let passed = violations.is_empty() && inconclusive == 0;
    SuiteReport {
        suite: "theorem2",
        d,
        trials,
        seed,
        tolerance: 1e-3,
        passed,
        max_residual,
        residuals,
        violations,
        inconclusive: Some(inconclusive),
    }
}
