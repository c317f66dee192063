mod common;

use common::{llr_near, omega, pick_codeword, q, small_code, to_f64, SPECS};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tanner_core::code::inner;
use tanner_core::{
    certify, min_cost_tree, ml_decode, relative_costs, relative_point, Rational, Scalar,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn relative_costs_linearize_the_objective(
        spec in 0..SPECS.len(),
        seed in 0u64..500,
        bseed in any::<u64>(),
    ) {
        let code = small_code(spec, seed);
        let x = pick_codeword(&code, seed);
        let llr = llr_near(&x, seed, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(bseed);
        let beta: Vec<Rational> = (0..code.num_vars()).map(|_| q(rng.random_range(0..=6), 6)).collect();
        let mu = relative_costs(&x, &llr).unwrap();
        let lhs = inner(llr.values(), &relative_point(&x, &beta).unwrap())
            - inner(llr.values(), &x.to_scalars::<Rational>());
        prop_assert_eq!(lhs, inner(&mu, &beta));
    }

    #[test]
    fn verdict_is_invariant_under_positive_scaling(
        spec in 0..SPECS.len(),
        seed in 0u64..500,
        h in 1usize..=3,
        c in 1i64..=9,
        d in 1i64..=9,
    ) {
        let code = small_code(spec, seed);
        let x = pick_codeword(&code, seed);
        let llr = llr_near(&x, seed, 4);
        let w = omega(h, 1, 4, seed);
        let i = 2 + (seed as usize) % (code.d_star() - 1);
        let base = certify(&code, &x, &llr, h, &w, i).unwrap();
        let factor = q(c, d);
        let scaled = certify(&code, &x, &llr.scaled(&factor), h, &w, i).unwrap();
        prop_assert_eq!(scaled.certified, base.certified);
        prop_assert_eq!(scaled.min_cost, base.min_cost.clone() * factor);
        let shrink = q(1, c);
        let w_small: Vec<Rational> = w.iter().map(|v| v.clone() * shrink.clone()).collect();
        let narrow = certify(&code, &x, &llr, h, &w_small, i).unwrap();
        prop_assert_eq!(narrow.certified, base.certified);
        prop_assert_eq!(narrow.min_cost, base.min_cost * shrink);
    }

    #[test]
    fn root_costs_match_single_root_queries(spec in 0..SPECS.len(), seed in 0u64..500, h in 1usize..=3) {
        let code = small_code(spec, seed);
        let x = pick_codeword(&code, seed);
        let llr = llr_near(&x, seed, 2);
        let w = omega(h, 0, 3, seed);
        prop_assume!(w.iter().any(|v| !v.is_zero_approx()));
        let report = certify(&code, &x, &llr, h, &w, 2).unwrap();
        for r in 0..code.num_vars() {
            prop_assert_eq!(&min_cost_tree(&code, &x, &llr, r, h, &w, 2).unwrap(), &report.root_costs[r]);
        }
        prop_assert_eq!(report.root_costs.iter().min().unwrap(), &report.min_cost);
        prop_assert_eq!(report.certified, report.min_cost.is_positive_strict());
    }

    #[test]
    fn float_certifier_tracks_exact(spec in 0..SPECS.len(), seed in 0u64..500, h in 1usize..=4) {
        let code = small_code(spec, seed);
        let x = pick_codeword(&code, seed);
        let llr = llr_near(&x, seed, 7);
        let w = omega(h, 1, 5, seed);
        let wf: Vec<f64> = w.iter().map(Scalar::to_f64).collect();
        let exact = certify(&code, &x, &llr, h, &w, 2).unwrap();
        let float = certify(&code, &x, &to_f64(&llr), h, &wf, 2).unwrap();
        prop_assert!((exact.min_cost.to_f64() - float.min_cost).abs() < 1e-9);
        if exact.min_cost.to_f64().abs() > 1e-6 {
            prop_assert_eq!(exact.certified, float.certified);
        }
    }

    #[test]
    fn certified_codeword_is_unique_ml(spec in 0..SPECS.len(), seed in 0u64..500, h in 1usize..=3) {
        let code = small_code(spec, seed);
        let x = pick_codeword(&code, seed);
        let llr = llr_near(&x, seed.wrapping_mul(31), 5);
        let w = omega(h, 1, 3, seed);
        let report = certify(&code, &x, &llr, h, &w, 2).unwrap();
        if report.certified {
            let ml = ml_decode(&code, &llr).unwrap();
            prop_assert!(ml.unique);
            prop_assert_eq!(&ml.best[0], &x);
        }
    }
}
