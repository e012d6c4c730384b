//! Lower bound on the relative entropy of entanglement: projected-gradient
//! minimization of S(rho||sigma) over the PPT states
//! {sigma >= 0, sigma^{T_B} >= 0, tr sigma = 1}.
//!
//! The separable set sits inside the PPT set, so the minimum over PPT
//! cannot exceed E_R. At d = 2 the two sets coincide and the converged
//! value equals E_R itself; beyond that the bracket against the separable
//! upper bound has a genuine PPT gap.
//!
//! Projections onto the feasible intersection use Dykstra's alternating
//! scheme over the two spectrahedra and the trace hyperplane.

use crate::density::{partial_transpose_b, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig_unchecked, hermitize, inner_re, CMatrix};

use super::grad::Objective;
use super::ERelConfig;

/// Result of the PPT descent.
#[derive(Debug, Clone)]
pub struct LowerResult {
    /// Best feasible objective value reached. At convergence this is the
    /// PPT minimum, a lower bound on E_R.
    pub value: f64,
    pub sigma: DensityMatrix,
    pub iterations: usize,
    pub converged: bool,
}

/// Projection onto the PSD cone: clip negative eigenvalues.
fn psd_project(m: &CMatrix) -> CMatrix {
    let spec = herm_eig_unchecked(&hermitize(m));
    if spec.min_eigenvalue() >= 0.0 {
        return hermitize(m);
    }
    spec.apply(|w| w.max(0.0))
}

/// Projection onto {X : X^{T_B} >= 0}; partial transposition is a Frobenius
/// isometry, so project the transposed matrix and transpose back.
fn ppt_project(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    let pt = partial_transpose_b(m, da, db);
    partial_transpose_b(&psd_project(&pt), da, db)
}

/// Projection onto the trace-one hyperplane.
fn trace_project(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let shift = (m.trace().re - 1.0) / n as f64;
    m - crate::linalg::identity(n).scale(shift)
}

/// Dykstra's alternating projection onto
/// {PSD} n {PPT} n {tr = 1, Hermitian}.
pub(crate) fn project_ppt_simplex(
    m: &CMatrix,
    da: usize,
    db: usize,
    tolerance: f64,
    max_passes: usize,
) -> CMatrix {
    let n = m.nrows();
    let mut x = hermitize(m);
    let mut p1 = CMatrix::zeros(n, n);
    let mut p2 = CMatrix::zeros(n, n);
    let mut p3 = CMatrix::zeros(n, n);
    for _ in 0..max_passes {
        let prev = x.clone();

        let y = &x + &p1;
        let x1 = psd_project(&y);
        p1 = y - &x1;

        let y = &x1 + &p2;
        let x2 = ppt_project(&y, da, db);
        p2 = y - &x2;

        let y = &x2 + &p3;
        x = trace_project(&y);
        p3 = y - &x;

        if crate::linalg::max_abs_diff(&x, &prev) < tolerance {
            break;
        }
    }
    x
}

/// Feasibility cleanup for the final iterate: tight Dykstra projection, an
/// eigenvalue clip, then a 1e-9 blend with the maximally mixed state. The
/// blend keeps both cones satisfied strictly and the support full, so the
/// reported value stays finite even when the optimum touches the boundary;
/// it moves the value by no more than a few 1e-9.
fn feasible_density(m: &CMatrix, da: usize, db: usize, config: &ERelConfig) -> DensityMatrix {
    const BLEND: f64 = 1e-9;
    let projected = project_ppt_simplex(
        m,
        da,
        db,
        config.dykstra_tolerance * 0.1,
        4 * config.dykstra_max_passes,
    );
    let spec = herm_eig_unchecked(&hermitize(&projected));
    let clipped = spec.apply(|w| w.max(0.0));
    let trace = clipped.trace().re;
    let n = da * db;
    let mixed = clipped.unscale(trace).scale(1.0 - BLEND)
        + crate::linalg::identity(n).scale(BLEND / n as f64);
    DensityMatrix::trusted(mixed, (da, db))
}

/// Product unitary built from the eigenvector frames of the two marginals.
fn marginal_frames(rho: &DensityMatrix) -> crate::error::Result<CMatrix> {
    let a = crate::density::partial_trace(rho, crate::density::Subsystem::A)?;
    let b = crate::density::partial_trace(rho, crate::density::Subsystem::B)?;
    let ua = herm_eig_unchecked(&hermitize(a.matrix())).eigenvectors;
    let ub = herm_eig_unchecked(&hermitize(b.matrix())).eigenvectors;
    Ok(crate::linalg::kron(&ua, &ub))
}

/// Dephase `m` in the product basis given by `frame`'s columns: rotate into
/// the frame, keep the diagonal, rotate back. A local pinching channel, so
/// PPT survives.
fn pinch_to_marginal_frames(m: &CMatrix, frame: &CMatrix, da: usize, db: usize) -> CMatrix {
    let n = da * db;
    let rotated = frame.adjoint() * m * frame;
    let mut diag = CMatrix::zeros(n, n);
    for i in 0..n {
        diag[(i, i)] = rotated[(i, i)];
    }
    frame * diag * frame.adjoint()
}

/// Projected-gradient descent of S(rho||sigma) over the PPT states, with
/// Barzilai-Borwein step proposals and a monotone backtracking safeguard.
pub fn e_r_lower(rho: &DensityMatrix, config: &ERelConfig) -> Result<LowerResult> {
    let (da, db) = rho.dims();
    if !rho.is_composite() || da != db {
        return Err(Error::NotComposite { dim: rho.dim() });
    }
    if da > super::LOWER_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: da,
            cap: super::LOWER_DIM_CAP,
            context: "PPT descent",
        });
    }

    let n = da * db;
    let objective = Objective::new(rho);
    let frame = marginal_frames(rho)?;
    // Warm start: the input state pulled into the feasible set, softened
    // with the maximally mixed state. For nearly separable inputs this
    // starts next to the optimum.
    let mut sigma = {
        let blend =
            rho.matrix().scale(0.75) + crate::linalg::identity(n).scale(0.25 / n as f64);
        project_ppt_simplex(
            &blend,
            da,
            db,
            config.dykstra_tolerance,
            config.dykstra_max_passes,
        )
    };
    let mut value = objective.value(&sigma);
    let mut prev: Option<(CMatrix, CMatrix)> = None; // (sigma, gradient)
    let mut grad = objective.gradient_from_spectrum(&herm_eig_unchecked(&hermitize(&sigma)));
    let mut eta = 1.0 / (1.0 + crate::linalg::max_abs_entry(&grad));
    let mut converged = false;
    let mut iterations = 0;
    let mut quiet_rounds = 0;

    for iteration in 0..config.lower_max_iterations {
        iterations = iteration + 1;

        // Barzilai-Borwein proposal from the last accepted move.
        if let Some((ref sigma_prev, ref grad_prev)) = prev {
            let ds = &sigma - sigma_prev;
            let dg = &grad - grad_prev;
            let num = inner_re(&ds.adjoint(), &ds);
            let den = inner_re(&ds.adjoint(), &dg);
            if den > 1e-300 {
                eta = (num / den).clamp(1e-12, 10.0);
            }
        }

        let mut accepted = false;
        let mut candidate = sigma.clone();
        let mut candidate_value = value;
        // Trust region on the raw move keeps the pre-projection point close
        // enough for Dykstra to project accurately.
        let g_fro = inner_re(&grad.adjoint(), &grad).sqrt();
        let mut step = eta.min(1.0 / (1e-12 + g_fro));
        if std::env::var("DCOPT_DEBUG_LOWER").is_ok() {
            eprintln!("it {iteration}: f={value:.9e} eta={eta:.3e} |g|={g_fro:.3e}");
        }
        for _ in 0..80 {
            let raw = &sigma - grad.scale(step);
            let proj = project_ppt_simplex(
                &raw,
                da,
                db,
                config.dykstra_tolerance,
                config.dykstra_max_passes,
            );
            let f = objective.value(&proj);
            let dx = &proj - &sigma;
            let move_norm2 = inner_re(&dx.adjoint(), &dx);
            // Descent-lemma acceptance: candidates beat the quadratic upper
            // model at the current step size. This accepts steps the
            // projection has bent, which a plain decrease test rejects.
            let model = value + inner_re(&grad, &dx) + 0.5 * move_norm2 / step.max(1e-300);
            if f <= model && f <= value {
                candidate = proj;
                candidate_value = f;
                accepted = true;
                break;
            }
            step *= 0.5;
            if step < 1e-30 {
                break;
            }
        }

        // Re-centering rescue: against the log barrier a small blend with
        // the maximally mixed state lifts crushed eigenvalues and is often
        // a strong descent move where gradient steps are hopeless. PPT is
        // preserved by mixing.
        for eps in [1e-2, 1e-4, 1e-8, 1e-12] {
            let base = if accepted { &candidate } else { &sigma };
            let blended = base.scale(1.0 - eps)
                + crate::linalg::identity(n).scale(eps / n as f64);
            let f = objective.value(&blended);
            if f < candidate_value {
                candidate = blended;
                candidate_value = f;
                accepted = true;
            }
        }

        // Face rescues: when the optimum sits on a cone boundary, gradient
        // steps crawl as the active eigenvalues shrink. Each candidate
        // jumps onto a suspected face in one move and is kept only on
        // descent: truncating sigma's own small eigenvalues, truncating on
        // the partial-transpose side, and pinching to the product
        // eigenframes of the input's marginals (the shape closest
        // separable states take for pure inputs).
        if iteration % 8 == 7 {
            let base = if accepted { &candidate } else { &sigma };
            let mut rescues: Vec<CMatrix> = Vec::new();
            let base_spec = herm_eig_unchecked(&hermitize(base));
            let top = base_spec.max_eigenvalue();
            for cut in [1e-3, 1e-5, 1e-7] {
                rescues.push(base_spec.apply(|w| if w < cut * top { 0.0 } else { w }));
            }
            let pt = partial_transpose_b(base, da, db);
            let pt_spec = herm_eig_unchecked(&hermitize(&pt));
            let pt_top = pt_spec.max_eigenvalue();
            for cut in [1e-3, 1e-5, 1e-7] {
                let truncated = pt_spec.apply(|w| if w < cut * pt_top { 0.0 } else { w });
                rescues.push(partial_transpose_b(&truncated, da, db));
            }
            rescues.push(pinch_to_marginal_frames(base, &frame, da, db));
            for raw in rescues {
                let trace = raw.trace().re;
                if trace <= 1e-6 {
                    continue;
                }
                let projected = project_ppt_simplex(
                    &raw.unscale(trace),
                    da,
                    db,
                    config.dykstra_tolerance,
                    config.dykstra_max_passes,
                );
                let f = objective.value(&projected);
                if f < candidate_value {
                    candidate = projected;
                    candidate_value = f;
                    accepted = true;
                }
            }
        }
        if !accepted {
            converged = true;
            break;
        }

        let improvement = value - candidate_value;
        let move_size = crate::linalg::max_abs_diff(&candidate, &sigma);
        let new_grad =
            objective.gradient_from_spectrum(&herm_eig_unchecked(&hermitize(&candidate)));
        prev = Some((sigma.clone(), grad.clone()));
        sigma = candidate;
        grad = new_grad;
        value = candidate_value;
        eta = step;

        if improvement < config.lower_improvement_tolerance && move_size < 1e-8 {
            quiet_rounds += 1;
            if quiet_rounds >= 3 {
                converged = true;
                break;
            }
        } else {
            quiet_rounds = 0;
        }
    }

    // The convergence flag must mean "this value lower-bounds E_R": probe a
    // gradient-mapping step and withdraw the flag if it still improves.
    if converged {
        let g_fro = inner_re(&grad.adjoint(), &grad).sqrt();
        let probe_step = 1e-3 / (1.0 + g_fro);
        let probe = project_ppt_simplex(
            &(&sigma - grad.scale(probe_step)),
            da,
            db,
            config.dykstra_tolerance,
            config.dykstra_max_passes,
        );
        if objective.value(&probe) < value - 1e-9 {
            converged = false;
        }
    }

    let sigma = feasible_density(&sigma, da, db, config);
    let value = crate::entropy::relative_entropy(rho, &sigma)?;
    Ok(LowerResult {
        value,
        sigma,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, max_abs_diff};
    use crate::states::{bell_state, werner, BellKind};
    use approx::assert_abs_diff_eq;

    #[test]
    fn psd_projection_clips_negatives() {
        let m = CMatrix::from_diagonal(&crate::linalg::CVector::from_vec(vec![
            cr(0.5),
            cr(-0.25),
        ]));
        let p = psd_project(&m);
        let expected =
            CMatrix::from_diagonal(&crate::linalg::CVector::from_vec(vec![cr(0.5), cr(0.0)]));
        assert!(max_abs_diff(&p, &expected) < 1e-14);
    }

    #[test]
    fn dykstra_fixes_points_already_feasible() {
        let rho = werner(0.4).unwrap();
        let out = project_ppt_simplex(rho.matrix(), 2, 2, 1e-13, 200);
        assert!(max_abs_diff(&out, rho.matrix()) < 1e-10);
    }

    #[test]
    fn dykstra_output_is_feasible() {
        let mut rng = crate::random::stream_rng(81, 0);
        let raw = crate::linalg::hermitize(&crate::random::ginibre(4, 4, &mut rng));
        let out = project_ppt_simplex(&raw, 2, 2, 1e-12, 400);
        let spec = herm_eig_unchecked(&hermitize(&out));
        assert!(spec.min_eigenvalue() > -1e-9);
        let pt_spec = herm_eig_unchecked(&hermitize(&partial_transpose_b(&out, 2, 2)));
        assert!(pt_spec.min_eigenvalue() > -1e-9);
        assert_abs_diff_eq!(out.trace().re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn separable_state_descends_to_zero() {
        // The state itself is PPT-feasible, so the minimum is zero.
        let spec = crate::states::StateSpec::new(crate::states::StateKind::RandomSeparable, 2)
            .with_seed(2);
        let rho = crate::states::build(&spec).unwrap();
        let out = e_r_lower(&rho, &ERelConfig::default()).unwrap();
        assert!(out.value < 1e-6, "got {}", out.value);
    }

    #[test]
    fn maximally_mixed_werner_gives_zero() {
        let rho = werner(0.25).unwrap();
        let out = e_r_lower(&rho, &ERelConfig::default()).unwrap();
        assert!(out.value < 1e-8, "got {}", out.value);
    }

    #[test]
    fn singlet_lower_bound_reaches_one() {
        let rho = bell_state(BellKind::PsiMinus);
        let out = e_r_lower(&rho, &ERelConfig::default()).unwrap();
        assert_abs_diff_eq!(out.value, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn rejects_oversized_dimension() {
        let rho = crate::states::max_entangled(4).unwrap();
        assert!(matches!(
            e_r_lower(&rho, &ERelConfig::default()),
            Err(Error::DimensionCap { .. })
        ));
    }
}
