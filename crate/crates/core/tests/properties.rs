use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use nlq_core::linear::{evolve, heisenberg_probability, schrodinger_probability, ProductUnitary};
use nlq_core::measurement::{
    collapse_on, luders_density, measure_all, outcome_probability_on, Subsystem,
};
use nlq_core::nonlinear::{closed_form, evolve_ensemble, EvolutionPolicy, NonlinearParams};
use nlq_core::qmath::{partial_trace_r, partial_trace_s, tensor, ComplexMatrix};
use nlq_core::sampling::{
    random_basis, random_ensemble, random_projector, random_unitary, random_vector, seeded,
};
use nlq_core::states::{
    conditional_bloch_s, density_of, make_product_uncorrelated, reduced_bloch_s, reduced_density_s,
    BlochVector, PureComposite,
};

fn random_matrix(seed: u64) -> ComplexMatrix {
    let v = random_vector(&mut seeded(seed), 4);
    ComplexMatrix::from_row_major(2, v.entries().to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_trace_is_multiplicative(sa in any::<u64>(), sb in any::<u64>()) {
        let (a, b) = (random_matrix(sa), random_matrix(sb));
        let lhs = tensor(&a, &b).unwrap().trace();
        let rhs = a.trace() * b.trace();
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_traces_preserve_trace_and_positivity(seed in any::<u64>()) {
        let pi = density_of(&random_ensemble(&mut seeded(seed)));
        for rho in [partial_trace_r(&pi).unwrap(), partial_trace_s(&pi).unwrap()] {
            prop_assert!(rho.is_density(1e-12));
            assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn r_dynamics_leaves_s_probabilities_alone(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let e = random_ensemble(&mut rng);
        let p = random_projector(&mut rng);
        let u = random_unitary(&mut rng);
        let a = ProductUnitary::new(u.clone(), random_unitary(&mut rng)).unwrap();
        let b = ProductUnitary::new(u, random_unitary(&mut rng)).unwrap();
        let pa = schrodinger_probability(&p, &a, &e).unwrap();
        let pb = schrodinger_probability(&p, &b, &e).unwrap();
        assert_abs_diff_eq!(pa, pb, epsilon = 1e-12);
        assert_abs_diff_eq!(pa, heisenberg_probability(&p, &a, &e).unwrap(), epsilon = 1e-12);
        let rho_a = reduced_density_s(&evolve(&e, &a).unwrap());
        let rho_b = reduced_density_s(&evolve(&e, &b).unwrap());
        prop_assert!(rho_a.approx_eq(&rho_b, 1e-12));
    }

    #[test]
    fn collapse_is_repeatable(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let e = random_ensemble(&mut rng);
        let basis = random_basis(&mut rng, Subsystem::R);
        for ek in basis.projectors() {
            if outcome_probability_on(&e, ek, Subsystem::R).unwrap() < 1e-6 {
                continue;
            }
            let once = collapse_on(&e, ek, Subsystem::R).unwrap();
            assert_abs_diff_eq!(outcome_probability_on(&once, ek, Subsystem::R).unwrap(), 1.0, epsilon = 1e-10);
            let twice = collapse_on(&once, ek, Subsystem::R).unwrap();
            prop_assert!(density_of(&once).approx_eq(&density_of(&twice), 1e-10));
        }
    }

    #[test]
    fn branchwise_collapse_matches_luders_rule(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let e = random_ensemble(&mut rng);
        let basis = random_basis(&mut rng, Subsystem::R);
        let outcomes = measure_all(&e, &basis).unwrap();
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        for o in outcomes {
            let ek = &basis.projectors()[o.outcome_index];
            let expected = luders_density(&e, ek, Subsystem::R).unwrap();
            prop_assert!(density_of(&o.post_state).approx_eq(&expected, 1e-10));
        }
    }

    #[test]
    fn reduced_bloch_is_weighted_conditional_average(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let s: Vec<_> = (0..2).map(|_| (0.5, random_vector(&mut rng, 2))).collect();
        let r: Vec<_> = (0..2).map(|_| (0.5, random_vector(&mut rng, 2))).collect();
        let e = make_product_uncorrelated(&s, &r).unwrap();
        let avg = e.branches().iter().fold(BlochVector::ZERO, |acc, b| {
            acc.plus(conditional_bloch_s(b).unwrap().scaled(b.weight))
        });
        prop_assert!(avg.max_abs_diff(reduced_bloch_s(&e)) < 1e-12);
    }

    #[test]
    fn closed_form_conserves_s3_and_norm(
        s1 in -0.6f64..0.6, s2 in -0.6f64..0.6, s3 in -0.6f64..0.6,
        eps in -3.0f64..3.0, t in 0.0f64..50.0,
    ) {
        let b0 = BlochVector::new(s1, s2, s3);
        let b = closed_form(b0, NonlinearParams::new(eps).unwrap(), t);
        prop_assert_eq!(b.s3, b0.s3);
        assert_abs_diff_eq!(b.norm(), b0.norm(), epsilon = 1e-12);
    }

    #[test]
    fn pure_product_policies_agree(seed in any::<u64>(), eps in -2.0f64..2.0) {
        let mut rng = seeded(seed);
        let state = PureComposite::product(&random_vector(&mut rng, 2), &random_vector(&mut rng, 2)).unwrap();
        let e = nlq_core::states::Ensemble::pure(state);
        let params = NonlinearParams::new(eps).unwrap();
        let times = [0.0, 0.5, 1.0, 4.0];
        let a = evolve_ensemble(&e, EvolutionPolicy::AggregateMeans, &params, &times).unwrap();
        let b = evolve_ensemble(&e, EvolutionPolicy::BranchMeans, &params, &times).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
    }
}
