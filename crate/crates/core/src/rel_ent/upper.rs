//! Upper bound on the relative entropy of entanglement: conditional-gradient
//! (Frank-Wolfe) descent of S(rho||sigma) over the separable set.
//!
//! The iterate sigma is maintained as an explicit convex combination of pure
//! product states, so any stopping point yields a certified separable
//! witness. The linear subproblem min_{|ab>} <ab| grad |ab> is solved by a
//! multistart seesaw over the two factors; each accepted atom is followed by
//! an exact line search on the 1-D segment toward it and a fully corrective
//! re-optimization of the weights over the active atoms, which kills the
//! usual conditional-gradient zig-zag tail.

use rayon::prelude::*;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{
    herm_eig_unchecked, hermitize, inner_re, kron_vec, CMatrix, CVector,
};
use crate::random::{random_unit_vector, stream_rng};

use super::grad::{brent_min, Objective};
use super::ERelConfig;

/// One component of a separable witness: a weighted pure product state.
#[derive(Debug, Clone)]
pub struct WitnessAtom {
    pub weight: f64,
    pub a: CVector,
    pub b: CVector,
}

impl WitnessAtom {
    /// The product projector |a><a| (x) |b><b|.
    pub fn projector(&self) -> CMatrix {
        let v = kron_vec(&self.a, &self.b);
        &v * v.adjoint()
    }

    fn vector(&self) -> CVector {
        kron_vec(&self.a, &self.b)
    }
}

/// Result of the Frank-Wolfe descent.
#[derive(Debug, Clone)]
pub struct UpperResult {
    /// S(rho||witness), a certified upper bound on E_R.
    pub value: f64,
    pub witness: DensityMatrix,
    pub atoms: Vec<WitnessAtom>,
    pub iterations: usize,
    pub converged: bool,
    /// Last Frank-Wolfe duality gap (bound on remaining improvement).
    pub gap: f64,
    /// Objective value after every accepted outer iteration.
    pub objective_trace: Vec<f64>,
}

/// Minimum eigenvalue below which the iterate gets re-mixed with the
/// maximally mixed state to stay safely inside the full-rank region.
const RANK_FLOOR: f64 = 1e-13;
const FLOOR_MIX: f64 = 1e-12;
/// Weight below which non-basis atoms are dropped.
const PRUNE_WEIGHT: f64 = 1e-15;
/// Product-state fidelity above which a new atom merges into an existing
/// one. Merged positions differ by ~1e-6 in angle, and added atoms are
/// seesaw-stationary, so the value impact is second order.
const MERGE_OVERLAP: f64 = 1.0 - 1e-12;

struct FwState {
    atoms: Vec<WitnessAtom>,
    sigma: CMatrix,
    da: usize,
    db: usize,
}

impl FwState {
    /// Start from the maximally mixed state written as the equal mixture of
    /// the d_a * d_b computational product states. These basis atoms are
    /// kept for the whole run (possibly at zero weight) so floor mixing
    /// always has them available.
    fn new(da: usize, db: usize) -> Self {
        let n = da * db;
        let w = 1.0 / n as f64;
        let mut atoms = Vec::with_capacity(n);
        for x in 0..da {
            for y in 0..db {
                let mut a = CVector::zeros(da);
                a[x] = crate::linalg::cr(1.0);
                let mut b = CVector::zeros(db);
                b[y] = crate::linalg::cr(1.0);
                atoms.push(WitnessAtom { weight: w, a, b });
            }
        }
        let sigma = crate::linalg::identity(n).scale(w);
        Self {
            atoms,
            sigma,
            da,
            db,
        }
    }

    fn basis_len(&self) -> usize {
        self.da * self.db
    }

    /// Rebuild sigma from the atoms, killing incremental drift.
    fn resync(&mut self) {
        let n = self.da * self.db;
        let mut m = CMatrix::zeros(n, n);
        for atom in &self.atoms {
            if atom.weight != 0.0 {
                let v = atom.vector();
                m += (&v * v.adjoint()).scale(atom.weight);
            }
        }
        self.sigma = m;
    }

    /// Convex step toward a new atom; merges with an existing atom when the
    /// product vectors already coincide up to phase. Returns the index of
    /// the atom that received the weight.
    fn fw_step(&mut self, gamma: f64, a: CVector, b: CVector, pi: &CMatrix) -> usize {
        for atom in &mut self.atoms {
            atom.weight *= 1.0 - gamma;
        }
        self.sigma = self.sigma.scale(1.0 - gamma) + pi.scale(gamma);
        let merge = self.atoms.iter().position(|atom| {
            let oa = atom.a.dotc(&a).norm_sqr();
            let ob = atom.b.dotc(&b).norm_sqr();
            oa * ob >= MERGE_OVERLAP
        });
        match merge {
            Some(i) => {
                self.atoms[i].weight += gamma;
                i
            }
            None => {
                self.atoms.push(WitnessAtom {
                    weight: gamma,
                    a,
                    b,
                });
                self.atoms.len() - 1
            }
        }
    }

    /// Keep the iterate strictly full rank by mixing a sliver of the
    /// maximally mixed state back in. The basis atoms absorb the weight so
    /// the decomposition stays exact.
    fn floor_mix(&mut self) {
        let n = self.basis_len();
        for atom in &mut self.atoms {
            atom.weight *= 1.0 - FLOOR_MIX;
        }
        for atom in self.atoms.iter_mut().take(n) {
            atom.weight += FLOOR_MIX / n as f64;
        }
        self.sigma = self.sigma.scale(1.0 - FLOOR_MIX)
            + crate::linalg::identity(n).scale(FLOOR_MIX / n as f64);
    }

    /// Drop non-basis atoms with negligible weight, subtracting their
    /// contribution from sigma and renormalizing, so the decomposition stays
    /// exact and the objective can only move by ~log2(1 + dropped mass).
    fn prune(&mut self) {
        let basis = self.basis_len();
        let mut dropped = 0.0;
        let mut i = self.atoms.len();
        while i > basis {
            i -= 1;
            let w = self.atoms[i].weight;
            if w <= PRUNE_WEIGHT {
                if w > 0.0 {
                    let v = self.atoms[i].vector();
                    self.sigma -= (&v * v.adjoint()).scale(w);
                    dropped += w;
                }
                self.atoms.swap_remove(i);
            }
        }
        if dropped > 0.0 {
            let keep = 1.0 - dropped;
            for atom in &mut self.atoms {
                atom.weight /= keep;
            }
            self.sigma = self.sigma.unscale(keep);
        }
    }

    fn finalize(&mut self) {
        self.prune();
        let total: f64 = self.atoms.iter().map(|a| a.weight).sum();
        for atom in &mut self.atoms {
            atom.weight /= total;
        }
        self.resync();
    }
}

/// The heaviest atoms, used as seesaw warm starts so their positions keep
/// refining.
fn warm_starts(state: &FwState) -> Vec<(CVector, CVector)> {
    let mut order: Vec<usize> = (0..state.atoms.len()).collect();
    order.sort_by(|&i, &j| state.atoms[j].weight.total_cmp(&state.atoms[i].weight));
    order
        .into_iter()
        .take(3)
        .filter(|&i| state.atoms[i].weight > 0.0)
        .map(|i| (state.atoms[i].a.clone(), state.atoms[i].b.clone()))
        .collect()
}

/// The run is stalled once the objective stops moving at solver precision
/// while the duality gap, though above its target, already certifies the
/// remaining improvement to be far below the downstream bound tolerance.
fn stalled(trace: &[f64], gap: f64) -> bool {
    const WINDOW: usize = 100;
    if gap > 5e-4 || trace.len() < WINDOW {
        return false;
    }
    // Crawling: a hundred more iterations will not close even a percent of
    // what the gap certifies as left.
    let recent = &trace[trace.len() - WINDOW..];
    recent[0] - recent[WINDOW - 1] < 0.01 * gap
}

/// Weight-aware duplicate cleanup: fold each light atom into a heavier one
/// it nearly coincides with, keeping the move only when the objective does
/// not move past rounding. Bounds the active set without disturbing the
/// descent.
fn consolidate(state: &mut FwState, objective: &Objective, start_value: f64) -> f64 {
    const FIDELITY: f64 = 1.0 - 1e-8;
    let mut value = start_value;
    let mut order: Vec<usize> = (0..state.atoms.len()).collect();
    order.sort_by(|&i, &j| state.atoms[j].weight.total_cmp(&state.atoms[i].weight));
    for hi in 0..order.len() {
        let heavy = order[hi];
        if state.atoms[heavy].weight == 0.0 {
            continue;
        }
        for &light in order.iter().skip(hi + 1) {
            let w = state.atoms[light].weight;
            if w == 0.0 {
                continue;
            }
            let oa = state.atoms[heavy].a.dotc(&state.atoms[light].a).norm_sqr();
            let ob = state.atoms[heavy].b.dotc(&state.atoms[light].b).norm_sqr();
            if oa * ob < FIDELITY {
                continue;
            }
            let dir = state.atoms[heavy].projector() - state.atoms[light].projector();
            let candidate = &state.sigma + dir.scale(w);
            let f = objective.value(&candidate);
            if f <= value + 1e-13 {
                state.sigma = candidate;
                state.atoms[heavy].weight += w;
                state.atoms[light].weight = 0.0;
                value = value.min(f);
            }
        }
    }
    value
}

/// Pairwise transfers: move weight from the worst-scoring active atom onto
/// the best-scoring one with an exact line search, repeatedly. Over a fixed
/// atom set this is the linearly convergent flavor of conditional gradient,
/// and it zeroes out stale atoms exactly.
fn pairwise_steps(
    state: &mut FwState,
    objective: &Objective,
    steps: usize,
    start_value: f64,
    outer_gap: f64,
) -> f64 {
    let mut value = start_value;
    for _ in 0..steps {
        let spec = herm_eig_unchecked(&hermitize(&state.sigma));
        let g = objective.gradient_from_spectrum(&spec);
        let scores: Vec<f64> = state
            .atoms
            .iter()
            .map(|atom| {
                let v = atom.vector();
                (v.adjoint() * &g * &v)[(0, 0)].re
            })
            .collect();
        let Some(best) = (0..state.atoms.len()).min_by(|&i, &j| scores[i].total_cmp(&scores[j]))
        else {
            break;
        };
        let Some(worst) = (0..state.atoms.len())
            .filter(|&i| state.atoms[i].weight > 0.0)
            .max_by(|&i, &j| scores[i].total_cmp(&scores[j]))
        else {
            break;
        };
        if best == worst || scores[worst] - scores[best] < (0.02 * outer_gap).max(1e-9) {
            break;
        }
        let budget = state.atoms[worst].weight;
        let dir = state.atoms[best].projector() - state.atoms[worst].projector();
        let snapshot = state.sigma.clone();
        let (mut step, mut stepped) = brent_min(
            |t| objective.value(&(&snapshot + dir.scale(t))),
            (0.0, budget),
            1e-7,
            40,
        );
        // Snap to the endpoint when emptying the worst atom is at least as
        // good; that removes it from the active set for keeps.
        let at_budget = objective.value(&(&snapshot + dir.scale(budget)));
        if at_budget <= stepped {
            step = budget;
            stepped = at_budget;
        }
        if stepped >= value {
            break;
        }
        state.atoms[best].weight += step;
        state.atoms[worst].weight -= step;
        if state.atoms[worst].weight < 1e-18 {
            state.atoms[worst].weight = 0.0;
        }
        state.sigma = &snapshot + dir.scale(step);
        value = stepped;
    }
    value
}

/// Block-coordinate refinement of atom positions: seesaw each significant
/// atom on the current gradient and move it in place when the full
/// objective drops. The optimal witness generally sits on a curved face of
/// the separable set, which plain conditional-gradient steps track at
/// O(1/k); sliding the atoms themselves is what breaks that ceiling.
fn drift_atoms(state: &mut FwState, objective: &Objective, start_value: f64, config: &ERelConfig) -> f64 {
    const PASSES: usize = 4;
    const GRADIENT_REFRESH: usize = 4;
    const MAX_ATOMS_PER_PASS: usize = 24;
    let mut value = start_value;
    for _ in 0..PASSES {
        let before = value;
        let mut order: Vec<usize> = (0..state.atoms.len())
            .filter(|&i| state.atoms[i].weight > 1e-10)
            .collect();
        order.sort_by(|&i, &j| state.atoms[j].weight.total_cmp(&state.atoms[i].weight));
        order.truncate(MAX_ATOMS_PER_PASS);
        for group in order.chunks(GRADIENT_REFRESH) {
            let spec = herm_eig_unchecked(&hermitize(&state.sigma));
            let g = objective.gradient_from_spectrum(&spec);
            for &i in group {
                let w = state.atoms[i].weight;
                let (_, a, b) = seesaw(
                    &g,
                    state.da,
                    state.db,
                    state.atoms[i].a.clone(),
                    state.atoms[i].b.clone(),
                    config.seesaw_max_sweeps,
                );
                let old = state.atoms[i].vector();
                let new = kron_vec(&a, &b);
                if old.dotc(&new).norm_sqr() >= 1.0 - 1e-16 {
                    continue;
                }
                let candidate =
                    &state.sigma + ((&new * new.adjoint()) - (&old * old.adjoint())).scale(w);
                let f = objective.value(&candidate);
                if f < value {
                    state.sigma = candidate;
                    state.atoms[i].a = a;
                    state.atoms[i].b = b;
                    value = f;
                }
            }
        }
        if before - value < 1e-12 {
            break;
        }
    }
    value
}

/// Ground product vector of the Hermitian matrix `g` by alternating
/// eigenvector descent over the two factors.
fn seesaw(
    g: &CMatrix,
    da: usize,
    db: usize,
    mut a: CVector,
    mut b: CVector,
    max_sweeps: usize,
) -> (f64, CVector, CVector) {
    let mut value = f64::INFINITY;
    for _ in 0..max_sweeps {
        // Fix b, contract to the A factor: M[x, y] = sum_jk b_j* G[(xj),(yk)] b_k.
        let ma = CMatrix::from_fn(da, da, |x, y| {
            let mut acc = crate::linalg::c(0.0, 0.0);
            for j in 0..db {
                for k in 0..db {
                    acc += b[j].conj() * g[(x * db + j, y * db + k)] * b[k];
                }
            }
            acc
        });
        a = ground_vector(&ma);
        // Fix a, contract to the B factor.
        let mb = CMatrix::from_fn(db, db, |j, k| {
            let mut acc = crate::linalg::c(0.0, 0.0);
            for x in 0..da {
                for y in 0..da {
                    acc += a[x].conj() * g[(x * db + j, y * db + k)] * a[y];
                }
            }
            acc
        });
        b = ground_vector(&mb);
        let new_value = (b.adjoint() * &mb * &b)[(0, 0)].re;
        if value - new_value < 1e-13 {
            value = new_value;
            break;
        }
        value = new_value;
    }
    (value, a, b)
}

fn ground_vector(h: &CMatrix) -> CVector {
    let spec = herm_eig_unchecked(&hermitize(h));
    spec.eigenvectors.column(0).into_owned()
}

/// Linear minimization oracle over pure product states: multistart seesaw.
/// Warm starts come from the heaviest current atoms (so their positions get
/// refined against the fresh gradient); the rest are Haar-random product
/// vectors from deterministic per-iteration streams.
fn lmo(
    g: &CMatrix,
    da: usize,
    db: usize,
    warm: &[(CVector, CVector)],
    config: &ERelConfig,
    iteration: usize,
) -> (f64, CVector, CVector) {
    let starts: Vec<(CVector, CVector)> = {
        let mut v = Vec::with_capacity(config.multistarts + warm.len());
        v.extend_from_slice(warm);
        for s in 0..config.multistarts {
            let mut rng = stream_rng(
                config.seed,
                0x5EE5_A000_0000_0000 ^ ((iteration as u64) << 8) ^ s as u64,
            );
            v.push((
                random_unit_vector(da, &mut rng),
                random_unit_vector(db, &mut rng),
            ));
        }
        v
    };
    starts
        .into_par_iter()
        .map(|(a, b)| seesaw(g, da, db, a, b, config.seesaw_max_sweeps))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .expect("at least one seesaw start")
}

/// Fully corrective pass: re-optimize the weights of the current atoms (a
/// simplex-constrained convex problem) by damped multiplicative updates.
///
/// The update w_i <- w_i * c_i with c_i = tr[pi_i L(sigma)], where L is the
/// (positive) derivative map of the matrix log, is self-normalizing:
/// sum w_i c_i = tr(rho) = 1. It reduces to classical mixture EM when
/// everything commutes; a damping exponent with halving keeps every
/// accepted step monotone in the noncommuting case. Stale atoms decay
/// geometrically, which keeps the active set small. Returns the new
/// objective value.
fn polish_weights(
    state: &mut FwState,
    objective: &Objective,
    rounds: usize,
    start_value: f64,
    improvement_floor: f64,
) -> f64 {
    const LN_2: f64 = std::f64::consts::LN_2;
    let vectors: Vec<CVector> = state.atoms.iter().map(|a| a.vector()).collect();
    let n = state.sigma.nrows();
    let rebuild = |w: &[f64]| {
        let mut m = CMatrix::zeros(n, n);
        for (wi, v) in w.iter().zip(&vectors) {
            if *wi != 0.0 {
                m += (v * v.adjoint()).scale(*wi);
            }
        }
        m
    };
    let mut w: Vec<f64> = state.atoms.iter().map(|a| a.weight).collect();
    let mut value = start_value;
    for _ in 0..rounds {
        let spec = herm_eig_unchecked(&hermitize(&state.sigma));
        let g = objective.gradient_from_spectrum(&spec);
        let multipliers: Vec<f64> = vectors
            .iter()
            .map(|v| (-LN_2 * (v.adjoint() * &g * v)[(0, 0)].re).max(0.0))
            .collect();
        let mut beta = 1.0f64;
        let mut accepted = false;
        while beta > 1e-3 {
            let mut proposal: Vec<f64> = w
                .iter()
                .zip(&multipliers)
                .map(|(&wi, &ci)| wi * ci.powf(beta))
                .collect();
            let total: f64 = proposal.iter().sum();
            if total <= 0.0 {
                break;
            }
            for x in &mut proposal {
                *x /= total;
            }
            let candidate = rebuild(&proposal);
            let f = objective.value(&candidate);
            if f <= value {
                let improvement = value - f;
                w = proposal;
                state.sigma = candidate;
                value = f;
                accepted = true;
                if improvement < improvement_floor {
                    // Weights are as balanced as this atom set allows.
                    for (atom, &wi) in state.atoms.iter_mut().zip(&w) {
                        atom.weight = wi;
                    }
                    return value;
                }
                break;
            }
            beta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    for (atom, &wi) in state.atoms.iter_mut().zip(&w) {
        atom.weight = wi;
    }
    value
}

/// Frank-Wolfe minimization of S(rho||sigma) over separable sigma.
/// The returned value is a certified upper bound on E_R for any stopping
/// state, converged or not.
pub fn e_r_upper(rho: &DensityMatrix, config: &ERelConfig) -> Result<UpperResult> {
    let (da, db) = rho.dims();
    if !rho.is_composite() || da != db {
        return Err(Error::NotComposite { dim: rho.dim() });
    }
    if da > super::UPPER_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: da,
            cap: super::UPPER_DIM_CAP,
            context: "separable-witness descent",
        });
    }

    let objective = Objective::new(rho);
    let mut state = FwState::new(da, db);
    let mut spectrum = herm_eig_unchecked(&hermitize(&state.sigma));
    let mut value = objective.value_from_spectrum(&spectrum);
    let mut gap = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let mut trace = Vec::new();

    for iteration in 0..config.max_iterations {
        iterations = iteration + 1;
        let g = objective.gradient_from_spectrum(&spectrum);
        let warm = warm_starts(&state);
        let (atom_value, a, b) = lmo(&g, da, db, &warm, config, iteration);
        gap = inner_re(&g, &state.sigma) - atom_value;
        if gap < config.gap_tolerance || stalled(&trace, gap) {
            converged = true;
            trace.push(value);
            break;
        }
        // Snap the new atom onto an existing near-duplicate when doing so
        // costs at most a sliver of the current gap; this stops duplicate
        // buildup at the source.
        let (a, b) = {
            let new_v = kron_vec(&a, &b);
            let close = state.atoms.iter().find(|atom| {
                let oa = atom.a.dotc(&a).norm_sqr();
                let ob = atom.b.dotc(&b).norm_sqr();
                oa * ob >= 1.0 - 1e-6
            });
            match close {
                Some(atom) => {
                    let old_v = atom.vector();
                    let old_score = (old_v.adjoint() * &g * &old_v)[(0, 0)].re;
                    let new_score = (new_v.adjoint() * &g * &new_v)[(0, 0)].re;
                    if old_score - new_score <= 0.02 * gap {
                        (atom.a.clone(), atom.b.clone())
                    } else {
                        (a, b)
                    }
                }
                None => (a, b),
            }
        };
        let pi = {
            let v = kron_vec(&a, &b);
            &v * v.adjoint()
        };

        // Exact line search toward the new atom. Atoms whose step buys
        // nothing are not added: once the active face is score-degenerate,
        // fresh atoms only bloat the set, and the drift pass below owns the
        // remaining (curvature-limited) progress.
        let sigma_snapshot = state.sigma.clone();
        let (gamma, stepped) = brent_min(
            |t| objective.value(&(sigma_snapshot.scale(1.0 - t) + pi.scale(t))),
            (0.0, 1.0),
            1e-10,
            80,
        );
        if stepped < value - (1e-4 * gap).max(1e-10) {
            state.fw_step(gamma, a, b, &pi);
            value = stepped;
        }

        value = pairwise_steps(&mut state, &objective, config.corrective_steps, value, gap);
        value = drift_atoms(&mut state, &objective, value, config);
        value = polish_weights(&mut state, &objective, 3, value, config.gap_tolerance * 1e-3);
        if iteration % 50 == 49 {
            let _ = consolidate(&mut state, &objective, value);
        }
        state.prune();

        spectrum = herm_eig_unchecked(&hermitize(&state.sigma));
        if spectrum.min_eigenvalue() < RANK_FLOOR {
            state.floor_mix();
            spectrum = herm_eig_unchecked(&hermitize(&state.sigma));
        }
        value = objective.value_from_spectrum(&spectrum);
        trace.push(value);
        if iteration % 32 == 31 {
            state.resync();
            spectrum = herm_eig_unchecked(&hermitize(&state.sigma));
        }
    }

    state.finalize();
    let witness = DensityMatrix::trusted(state.sigma.clone(), (da, db));
    let value = crate::entropy::relative_entropy(rho, &witness)?;
    Ok(UpperResult {
        value,
        witness,
        atoms: state.atoms,
        iterations,
        converged,
        gap: gap.max(0.0),
        objective_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::states::{bell_state, BellKind};
    use approx::assert_abs_diff_eq;

    fn quick_config() -> ERelConfig {
        ERelConfig {
            max_iterations: 400,
            ..ERelConfig::default()
        }
    }

    #[test]
    fn product_state_needs_no_descent() {
        let spec = crate::states::StateSpec::new(crate::states::StateKind::RandomProduct, 2)
            .with_seed(3);
        let rho = crate::states::build(&spec).unwrap();
        let out = e_r_upper(&rho, &quick_config()).unwrap();
        assert!(out.value < 1e-4, "got {}", out.value);
    }

    #[test]
    fn singlet_upper_bound_reaches_one() {
        let rho = bell_state(BellKind::PsiMinus);
        let out = e_r_upper(&rho, &ERelConfig::default()).unwrap();
        assert_abs_diff_eq!(out.value, 1.0, epsilon = 1e-3);
        assert!(out.value >= 1.0 - 1e-9, "upper bound must stay above E_R");
    }

    #[test]
    fn descent_is_monotone() {
        let rho = bell_state(BellKind::PsiMinus);
        let out = e_r_upper(&rho, &quick_config()).unwrap();
        for pair in out.objective_trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
    }

    #[test]
    fn witness_matches_reported_value() {
        let rho = bell_state(BellKind::PsiMinus);
        let out = e_r_upper(&rho, &quick_config()).unwrap();
        // Reassemble the witness from its atoms.
        let n = rho.dim();
        let mut m = CMatrix::zeros(n, n);
        let mut total = 0.0;
        for atom in &out.atoms {
            assert!(atom.weight >= 0.0);
            assert_abs_diff_eq!(atom.a.norm(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(atom.b.norm(), 1.0, epsilon = 1e-10);
            total += atom.weight;
            m += atom.projector().scale(atom.weight);
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert!(max_abs_diff(&m, out.witness.matrix()) < 1e-10);
        let recomputed = crate::entropy::relative_entropy(&rho, &out.witness).unwrap();
        assert_abs_diff_eq!(recomputed, out.value, epsilon = 1e-9);
    }

    #[test]
    fn rejects_oversized_dimension() {
        let rho = crate::states::max_entangled(5).unwrap();
        assert!(matches!(
            e_r_upper(&rho, &quick_config()),
            Err(Error::DimensionCap { .. })
        ));
    }
}
