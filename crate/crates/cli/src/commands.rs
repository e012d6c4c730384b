//! Implementations of the CLI subcommands.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use dcopt_core::random::stream_rng;
use dcopt_core::rel_ent::{e_r, ERelConfig};
use dcopt_core::states::{bell_state, BellKind};
use dcopt_core::weyl::twirl;
use dcopt_core::{
    capacity_report, chi_star, convex_mix, linalg, states, DensityMatrix, GeneratorBasis,
};

use crate::suites::{self, Suite, SuiteReport};
use crate::{timestamp, ExitKind, OutputArgs, StateArgs};

fn emit_json(output: &OutputArgs, value: &impl Serialize) -> Result<(), ExitKind> {
    output.require_json()?;
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| ExitKind::Internal(format!("cannot serialize output: {e}")))?;
    output.write(&text)
}

pub fn capacity(
    state: &StateArgs,
    output: &OutputArgs,
    audit_trials: Option<usize>,
    max_signals: Option<usize>,
) -> Result<(), ExitKind> {
    let (rho, echo) = state.resolve()?;
    let audit = audit_trials.map(|trials| {
        let d = rho.dim_a();
        (trials, max_signals.unwrap_or(2 * d * d), state.seed)
    });
    let report = capacity_report(&rho, audit)
        .map_err(|e| ExitKind::Internal(format!("capacity computation failed: {e}")))?;
    let audit_passed = report.audit.as_ref().map(|a| a.passed());
    emit_json(
        output,
        &json!({
            "command": "capacity",
            "timestamp": timestamp(),
            "units": "bits",
            "state": echo,
            "report": report,
        }),
    )?;
    if audit_passed == Some(false) {
        return Err(ExitKind::Violation("optimality audit found violations".into()));
    }
    Ok(())
}

pub fn verify(
    suite: Suite,
    trials: usize,
    d: usize,
    seed: u64,
    states: usize,
    output: &OutputArgs,
) -> Result<(), ExitKind> {
    if trials == 0 {
        return Err(ExitKind::Usage("--trials must be >= 1".into()));
    }
    if !(2..=6).contains(&d) {
        return Err(ExitKind::Usage(format!(
            "verify needs d in [2, 6], got {d}"
        )));
    }
    let reports: Vec<SuiteReport> = match suite {
        Suite::Lemma1 => vec![suites::lemma1(d, trials, seed)],
        Suite::Lemma2 => vec![suites::lemma2(d, trials, seed)],
        Suite::Donald => vec![suites::donald(d, trials, seed)],
        Suite::Theorem1 => vec![suites::theorem1(d, trials, seed, states)],
        Suite::Theorem2 => {
            check_theorem2_dim(d)?;
            vec![suites::theorem2(d, trials, seed)]
        }
        Suite::All => {
            check_theorem2_dim(d)?;
            vec![
                suites::lemma1(d, trials, seed),
                suites::lemma2(d, trials, seed),
                suites::donald(d, trials, seed),
                suites::theorem1(d, trials, seed, states),
                suites::theorem2(d, trials.min(25), seed),
            ]
        }
    };
    let passed = reports.iter().all(|r| r.passed);
    emit_json(
        output,
        &json!({
            "command": "verify",
            "timestamp": timestamp(),
            "units": "bits",
            "suite": suite.name(),
            "passed": passed,
            "reports": reports,
        }),
    )?;
    if passed {
        Ok(())
    } else {
        let failing: Vec<&str> = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.suite)
            .collect();
        Err(ExitKind::Violation(format!(
            "suite violations in: {} (seed {seed}, d {d})",
            failing.join(", ")
        )))
    }
}

fn check_theorem2_dim(d: usize) -> Result<(), ExitKind> {
    if d > dcopt_core::rel_ent::LOWER_DIM_CAP {
        return Err(ExitKind::Usage(format!(
            "theorem2 needs both E_R branches, so d <= {}, got {d}",
            dcopt_core::rel_ent::LOWER_DIM_CAP
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[clap(rename_all = "snake_case")]
pub enum Family {
    Werner,
    BellDiagonal,
    Isotropic,
}

impl Family {
    fn name(&self) -> &'static str {
        match self {
            Family::Werner => "werner",
            Family::BellDiagonal => "bell_diagonal",
            Family::Isotropic => "isotropic",
        }
    }

    fn param_range(&self) -> (f64, f64) {
        match self {
            Family::Werner | Family::Isotropic => (0.0, 1.0),
            Family::BellDiagonal => (0.5, 1.0),
        }
    }

    fn build(&self, param: f64, d: usize) -> dcopt_core::Result<DensityMatrix> {
        match self {
            Family::Werner => states::werner(param),
            Family::Isotropic => states::isotropic(d, param),
            Family::BellDiagonal => {
                let psi_m = bell_state(BellKind::PsiMinus);
                let psi_p = bell_state(BellKind::PsiPlus);
                convex_mix(&[(param, &psi_m), (1.0 - param, &psi_p)])
            }
        }
    }
}

#[derive(Debug, Serialize)]
struct SweepRow {
    param: f64,
    chi_star: f64,
    e_r_upper: f64,
    e_r_lower: f64,
    chi_star_minus_er: f64,
    bound_slack: f64,
}

/// 17 significant digits, enough to reproduce the f64 exactly.
fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sweep(
    family: Family,
    from: f64,
    to: f64,
    step: f64,
    d: usize,
    output: &OutputArgs,
) -> Result<(), ExitKind> {
    let d = match family {
        Family::Werner | Family::BellDiagonal => 2,
        Family::Isotropic => d,
    };
    if d > dcopt_core::rel_ent::LOWER_DIM_CAP {
        return Err(ExitKind::Usage(format!(
            "sweep reports the E_R bracket, so d <= {}, got {d}",
            dcopt_core::rel_ent::LOWER_DIM_CAP
        )));
    }
    if !step.is_finite() || step <= 0.0 || !from.is_finite() || !to.is_finite() {
        return Err(ExitKind::Usage(format!(
            "malformed grid: from {from}, to {to}, step {step}"
        )));
    }
    let count = ((to - from) / step + 1.0 + 1e-9).floor() as i64;
    if count < 2 {
        return Err(ExitKind::Usage(format!(
            "grid needs at least 2 points, got {count} (from {from}, to {to}, step {step})"
        )));
    }
    let (lo, hi) = family.param_range();
    let params: Vec<f64> = (0..count).map(|i| from + i as f64 * step).collect();
    if params.iter().any(|&p| p < lo - 1e-12 || p > hi + 1e-12) {
        return Err(ExitKind::Usage(format!(
            "grid leaves the {} parameter range [{lo}, {hi}]",
            family.name()
        )));
    }

    let config = ERelConfig::default();
    let rows: Vec<SweepRow> = params
        .into_par_iter()
        .map(|param| {
            let param = param.clamp(lo, hi);
            let rho = family.build(param, d).expect("grid already validated");
            let cs = chi_star(&rho).expect("family states are composite");
            let est = e_r(&rho, &config).expect("dimension already validated");
            let lower = est.lower.expect("within the PPT cap");
            SweepRow {
                param,
                chi_star: cs,
                e_r_upper: est.upper,
                e_r_lower: lower,
                chi_star_minus_er: cs - est.upper,
                bound_slack: lower + (d as f64).log2() - cs,
            }
        })
        .collect();

    match output.format.unwrap_or(crate::Format::Csv) {
        crate::Format::Csv => {
            let mut text = String::from(
                "param,chi_star,e_r_upper,e_r_lower,chi_star_minus_er,bound_slack\n",
            );
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    full_precision(r.param),
                    full_precision(r.chi_star),
                    full_precision(r.e_r_upper),
                    full_precision(r.e_r_lower),
                    full_precision(r.chi_star_minus_er),
                    full_precision(r.bound_slack),
                ));
            }
            output.write(text.trim_end())
        }
        crate::Format::Json => {
            let value = json!({
                "command": "sweep",
                "timestamp": timestamp(),
                "units": "bits",
                "family": family.name(),
                "d": d,
                "rows": rows,
            });
            let text = serde_json::to_string_pretty(&value)
                .map_err(|e| ExitKind::Internal(e.to_string()))?;
            output.write(&text)
        }
    }
}

pub fn erel(
    state: &StateArgs,
    output: &OutputArgs,
    max_iter: Option<usize>,
    multistarts: Option<usize>,
    gap_tol: Option<f64>,
    witness: bool,
) -> Result<(), ExitKind> {
    let (rho, echo) = state.resolve()?;
    let mut config = ERelConfig {
        seed: state.seed,
        ..ERelConfig::default()
    };
    if let Some(v) = max_iter {
        config.max_iterations = v;
    }
    if let Some(v) = multistarts {
        config.multistarts = v;
    }
    if let Some(v) = gap_tol {
        if !v.is_finite() || v <= 0.0 {
            return Err(ExitKind::Usage("--gap-tol must be positive".into()));
        }
        config.gap_tolerance = v;
    }
    let result = e_r(&rho, &config).map_err(|e| match e {
        dcopt_core::Error::DimensionCap { .. } | dcopt_core::Error::NotComposite { .. } => {
            ExitKind::Usage(e.to_string())
        }
        other => ExitKind::Internal(other.to_string()),
    })?;
    let witness_json = witness.then(|| {
        let atoms: Vec<_> = result
            .witness_atoms
            .iter()
            .map(|atom| {
                json!({
                    "weight": atom.weight,
                    "a": atom.a.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                    "b": atom.b.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "atoms": atoms,
            "matrix": crate::io::matrix_rows(result.witness.matrix()),
        })
    });
    emit_json(
        output,
        &json!({
            "command": "erel",
            "timestamp": timestamp(),
            "units": "bits",
            "state": echo,
            "result": result,
            "witness": witness_json,
        }),
    )
}

pub fn twirl_check(
    d: usize,
    trials: usize,
    seed: u64,
    output: &OutputArgs,
) -> Result<(), ExitKind> {
    if !(2..=8).contains(&d) {
        return Err(ExitKind::Usage(format!(
            "twirl-check needs d in [2, 8], got {d}"
        )));
    }
    const TOLERANCE: f64 = 1e-10;
    let eye = linalg::identity(d);

    // Unit matrices: diagonal ones twirl to d I, off-diagonal ones to 0.
    let mut p00 = linalg::CMatrix::zeros(d, d);
    p00[(0, 0)] = linalg::cr(1.0);
    let p00_residual = linalg::max_abs_diff(
        &twirl(&p00, d).map_err(internal)?,
        &eye.scale(d as f64),
    );
    let mut p01 = linalg::CMatrix::zeros(d, d);
    p01[(0, 1)] = linalg::cr(1.0);
    let p01_residual = linalg::max_abs_entry(&twirl(&p01, d).map_err(internal)?);

    // SU(d) generators are traceless, so they twirl to 0.
    let basis = GeneratorBasis::cached(d).map_err(internal)?;
    let generator_residual = basis
        .lambdas()
        .iter()
        .map(|lam| linalg::max_abs_entry(&twirl(lam, d).expect("generator shape matches d")))
        .fold(0.0f64, f64::max);

    // Random matrices: twirl(m) = d tr(m) I.
    let random_residual = (0..trials as u64)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t);
            let m = dcopt_core::random::ginibre(d, d, &mut rng);
            let expected = linalg::identity(d) * (m.trace() * linalg::cr(d as f64));
            linalg::max_abs_diff(&twirl(&m, d).expect("square by construction"), &expected)
        })
        .reduce(|| 0.0, f64::max);

    let worst = p00_residual
        .max(p01_residual)
        .max(generator_residual)
        .max(random_residual);
    let passed = worst <= TOLERANCE;
    emit_json(
        output,
        &json!({
            "command": "twirl-check",
            "timestamp": timestamp(),
            "d": d,
            "trials": trials,
            "seed": seed,
            "tolerance": TOLERANCE,
            "diagonal_unit_residual": p00_residual,
            "offdiagonal_unit_residual": p01_residual,
            "generator_max_residual": generator_residual,
            "random_max_residual": random_residual,
            "passed": passed,
        }),
    )?;
    if passed {
        Ok(())
    } else {
        Err(ExitKind::Violation(format!(
            "twirl identity residual {worst:.3e} exceeds {TOLERANCE:.1e}"
        )))
    }
}

fn internal(e: dcopt_core::Error) -> ExitKind {
    ExitKind::Internal(e.to_string())
}
