//! Property tests over randomized states, unitaries, and ensembles.

use dcopt_core::density::{convex_mix, partial_trace, Subsystem};
use dcopt_core::linalg::{conjugate, identity, kron, max_abs_diff};
use dcopt_core::random::{
    flat_simplex_weights, haar_unitary, random_density, random_full_rank, stream_rng,
};
use dcopt_core::weyl::SignalEnsemble;
use dcopt_core::{
    chi_star, decompose, donald_residual, holevo_chi, holevo_chi_relative, reconstruct,
    relative_entropy, von_neumann_entropy, DensityMatrix, GeneratorBasis,
};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(3usize)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), d in dims()) {
        let mut rng = stream_rng(seed, 0);
        let rho = random_full_rank((d, d), &mut rng);
        let u = haar_unitary(d * d, &mut rng);
        let rotated = DensityMatrix::new(conjugate(&u, rho.matrix()), (d, d)).unwrap();
        let delta = (von_neumann_entropy(&rotated) - von_neumann_entropy(&rho)).abs();
        prop_assert!(delta <= 1e-9, "entropy moved by {delta}");
    }

    #[test]
    fn klein_inequality_and_faithfulness(seed in any::<u64>(), d in dims()) {
        let mut rng = stream_rng(seed, 1);
        let rho = random_full_rank((d, d), &mut rng);
        let sigma = random_full_rank((d, d), &mut rng);
        let s = relative_entropy(&rho, &sigma).unwrap();
        prop_assert!(s >= 0.0);
        if max_abs_diff(rho.matrix(), sigma.matrix()) > 1e-6 {
            prop_assert!(s > 1e-10, "distinct states scored {s}");
        }
    }

    #[test]
    fn relative_entropy_vanishes_only_near_equality(seed in any::<u64>(), d in dims()) {
        // Perturb within validation tolerances: the value must stay tiny.
        let mut rng = stream_rng(seed, 2);
        let rho = random_full_rank((d, d), &mut rng);
        let bump = 1e-8 / (d * d) as f64;
        let other = convex_mix(&[
            (1.0 - bump, &rho),
            (bump, &DensityMatrix::new(
                identity(d * d).scale(1.0 / (d * d) as f64), (d, d)).unwrap()),
        ]).unwrap();
        prop_assert!(max_abs_diff(rho.matrix(), other.matrix()) <= 1e-6);
        let s = relative_entropy(&rho, &other).unwrap();
        prop_assert!(s.abs() <= 1e-10, "close states scored {s}");
    }

    #[test]
    fn partial_trace_is_linear(seed in any::<u64>(), d in dims(), alpha in 0.0f64..1.0) {
        let mut rng = stream_rng(seed, 3);
        let rho1 = random_full_rank((d, d), &mut rng);
        let rho2 = random_full_rank((d, d), &mut rng);
        let mixed = convex_mix(&[(alpha, &rho1), (1.0 - alpha, &rho2)]).unwrap();
        let lhs = partial_trace(&mixed, Subsystem::A).unwrap();
        let t1 = partial_trace(&rho1, Subsystem::A).unwrap();
        let t2 = partial_trace(&rho2, Subsystem::A).unwrap();
        let rhs = t1.matrix().scale(alpha) + t2.matrix().scale(1.0 - alpha);
        prop_assert!(max_abs_diff(lhs.matrix(), &rhs) <= 1e-12);
    }

    #[test]
    fn partial_trace_undoes_kron(seed in any::<u64>(), d in dims()) {
        let mut rng = stream_rng(seed, 4);
        let a = random_density((d, 1), d, &mut rng);
        let b = random_density((d, 1), d, &mut rng);
        let joint = DensityMatrix::new(kron(a.matrix(), b.matrix()), (d, d)).unwrap();
        let kept = partial_trace(&joint, Subsystem::A).unwrap();
        prop_assert!(max_abs_diff(kept.matrix(), a.matrix()) <= 1e-12);
    }

    #[test]
    fn hs_decomposition_roundtrips(seed in any::<u64>(), d in dims()) {
        let mut rng = stream_rng(seed, 5);
        let rho = random_full_rank((d, d), &mut rng);
        let back = reconstruct(&decompose(&rho).unwrap()).unwrap();
        prop_assert!(max_abs_diff(back.matrix(), rho.matrix()) <= 1e-10);
    }

    #[test]
    fn holevo_forms_agree(seed in any::<u64>(), d in dims()) {
        let mut rng = stream_rng(seed, 6);
        let rho = random_full_rank((d, d), &mut rng);
        let ens = SignalEnsemble::canonical(&rho).unwrap();
        let a = holevo_chi(&ens);
        let b = holevo_chi_relative(&ens).unwrap();
        prop_assert!((a - b).abs() <= 1e-9, "chi forms differ: {a} vs {b}");
    }

    #[test]
    fn random_ensembles_never_beat_chi_star(seed in any::<u64>(), d in dims()) {
        let mut rng = stream_rng(seed, 7);
        let rho = random_full_rank((d, d), &mut rng);
        let target = chi_star(&rho).unwrap();
        let n = 1 + (seed as usize % (2 * d * d));
        let weights = flat_simplex_weights(n, &mut rng);
        let items: Vec<_> = weights
            .into_iter()
            .map(|w| (haar_unitary(d, &mut rng), w))
            .collect();
        let ens = SignalEnsemble::new(rho, items).unwrap();
        prop_assert!(holevo_chi(&ens) <= target + 1e-7);
    }

    #[test]
    fn donald_identity_holds(seed in any::<u64>(), d in dims()) {
        let mut rng = stream_rng(seed, 8);
        let rho = random_full_rank((d, d), &mut rng);
        let ens = SignalEnsemble::canonical(&rho).unwrap();
        let sigma = random_full_rank((d, d), &mut rng);
        prop_assert!(donald_residual(&ens, &sigma).unwrap() <= 1e-8);
    }

    #[test]
    fn chi_star_is_locally_unitarily_invariant(seed in any::<u64>(), d in dims()) {
        let mut rng = stream_rng(seed, 9);
        let rho = random_full_rank((d, d), &mut rng);
        let u = haar_unitary(d, &mut rng);
        let v = haar_unitary(d, &mut rng);
        let rotated = DensityMatrix::new(
            conjugate(&kron(&u, &v), rho.matrix()), (d, d)).unwrap();
        let delta = (chi_star(&rho).unwrap() - chi_star(&rotated).unwrap()).abs();
        prop_assert!(delta <= 1e-9, "chi* moved by {delta}");
    }

    #[test]
    fn generator_basis_is_orthonormal_under_hs(d in 2usize..=6) {
        let basis = GeneratorBasis::new(d).unwrap();
        prop_assert_eq!(basis.len(), d * d - 1);
        for (i, li) in basis.lambdas().iter().enumerate() {
            prop_assert!(li.trace().norm() <= 1e-13);
            for (j, lj) in basis.lambdas().iter().enumerate() {
                let wanted = if i == j { 2.0 } else { 0.0 };
                prop_assert!(((li * lj).trace().re - wanted).abs() <= 1e-12);
            }
        }
    }
}
