use proptest::prelude::*;
use qlg_core::dirac::{dirac_product_form, dirac_step_matrix, step_dirac_variable_mass};
use qlg_core::fock::{
    apply_pair_gate, bcs_gate, pair_number_operator, BcsParams, FockSpace, PairBranch,
};
use qlg_core::sampling::{random_classified, random_spinor, rng_from_seed};
use qlg_core::superfluid::{njl_densities, step_superfluid, GapField};
use qlg_core::{
    c64, closed_form_exp, expm_oracle, step_dirac, Complex64, DiracParams, NumberOperatorKind,
    SpinorField,
};

fn kind_strategy() -> impl Strategy<Value = NumberOperatorKind> {
    prop_oneof![
        Just(NumberOperatorKind::InvolutionRegular),
        Just(NumberOperatorKind::IdempotentRegular),
        Just(NumberOperatorKind::TriIdempotentRegular),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_series(seed in any::<u64>(), kind in kind_strategy(), dim in 3usize..7, theta in -6.0f64..6.0) {
        let n = random_classified(kind, dim, &mut rng_from_seed(seed));
        let closed = closed_form_exp(&n, theta).unwrap();
        let series = expm_oracle(&n.times_minus_i(theta)).unwrap();
        prop_assert!(closed.distance(&series) < 1e-12);
        prop_assert!(closed.unitarity_residual() < 1e-12);
    }

    #[test]
    fn dirac_step_preserves_norm(seed in any::<u64>(), sites in 2usize..64, m in 0.0f64..=1.0) {
        let mut f = SpinorField::random(sites, &mut rng_from_seed(seed));
        let p = DiracParams::new(m).unwrap();
        for _ in 0..16 {
            f = step_dirac(&f, &p).unwrap();
        }
        prop_assert!((f.norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn variable_mass_step_preserves_norm(seed in any::<u64>(), sites in 2usize..48) {
        let mut rng = rng_from_seed(seed);
        let f = SpinorField::random(sites, &mut rng);
        let masses: Vec<f64> = (0..sites).map(|x| ((x as f64 + seed as f64 * 1e-3).sin()).abs()).collect();
        let g = step_dirac_variable_mass(&f, &masses).unwrap();
        prop_assert!((g.norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn product_form_is_collapsed_step(kx in -3.1f64..3.1, ky in -3.1f64..3.1, kz in -3.1f64..3.1, m in 0.0f64..=1.0) {
        let a = dirac_product_form([kx, ky, kz], m).unwrap();
        let b = dirac_step_matrix([kx, ky, kz], m).unwrap();
        prop_assert!(a.distance(&b) < 1e-12);
    }

    #[test]
    fn pair_gate_preserves_norm(seed in any::<u64>(), q in 2usize..8, a in 1usize..8, b in 1usize..8, e_tau in 0.0f64..=1.0) {
        prop_assume!(a <= q && b <= q && a != b);
        let p = BcsParams::with_e_tau(3.0, c64(4.0, 0.0), PairBranch::Plus, e_tau).unwrap();
        let gate = bcs_gate(&pair_number_operator(&p), p.e_tau()).unwrap();
        let psi = FockSpace::random(q, &mut rng_from_seed(seed)).unwrap();
        let out = apply_pair_gate(&psi, &gate, a, b).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn superfluid_step_preserves_norm(seed in any::<u64>(), sites in 2usize..48, r in 0.0f64..=1.0, phase in -3.2f64..3.2) {
        let mut rng = rng_from_seed(seed);
        let f = SpinorField::random(sites, &mut rng);
        let uniform = step_superfluid(&f, &GapField::Uniform(Complex64::from_polar(r, phase)), 1.0).unwrap();
        prop_assert!((uniform.norm_sqr() - 1.0).abs() < 1e-13);
        let local: Vec<Complex64> = (0..sites).map(|x| Complex64::from_polar(r * ((x % 5) as f64 / 4.0), phase + x as f64)).collect();
        let stepped = step_superfluid(&f, &GapField::Local(local), 1.0).unwrap();
        prop_assert!((stepped.norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn njl_forms_agree(seed in any::<u64>(), lambda in -20.0f64..20.0) {
        let s = random_spinor(&mut rng_from_seed(seed));
        prop_assert!(njl_densities(&s, lambda).mismatch() < 1e-12 * lambda.abs().max(1.0));
    }
}
