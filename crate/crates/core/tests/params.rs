use num_traits::{One, Zero};
use proptest::prelude::*;
use rahman_core::params::{
    alpha_relation_residuals, compatible_alpha2, compatible_beta, compatible_chain, derive_mapped, derive_weight,
};
use rahman_core::scalar::ratio;
use rahman_core::{ParamSet, Scalar};

fn rational() -> impl Strategy<Value = Scalar> {
    (1i64..500, 1i64..500).prop_map(|(n, d)| ratio(n, d))
}

fn signed() -> impl Strategy<Value = Scalar> {
    (prop_oneof![-500i64..-1, 1i64..500], 1i64..500).prop_map(|(n, d)| ratio(n, d))
}

fn params() -> impl Strategy<Value = ParamSet> {
    [signed(), signed(), signed(), signed()]
        .prop_map(|[a, b, c, d]| ParamSet::new(a, b, c, d))
        .prop_filter("generic", |p| p.validate_generic().is_ok() && derive_weight(p).is_ok())
}

fn unit() -> impl Strategy<Value = Scalar> {
    (2i64..500).prop_flat_map(|d| (1..d).prop_map(move |n| ratio(n, d)))
}

proptest! {
    #[test]
    fn derived_quantities_are_scale_invariant(p in params(), c in signed()) {
        let q = p.scaled(&c);
        prop_assert_eq!(derive_mapped(&p).unwrap(), derive_mapped(&q).unwrap());
        prop_assert_eq!(derive_weight(&p).unwrap(), derive_weight(&q).unwrap());
    }

    #[test]
    fn beta_map_solves_stationarity_condition(p in params(), a1 in unit(), a2 in unit()) {
        let wp = derive_weight(&p).unwrap();
        if let Ok((b1, b2)) = compatible_beta(&p, &a1, &a2) {
            let d = Scalar::one() - &a1 * &wp.eta1 - &a2 * &wp.eta2;
            prop_assert_eq!(&b1 * &d, &wp.eta1 * (Scalar::one() - &a1));
            prop_assert_eq!(&b2 * &d, &wp.eta2 * (Scalar::one() - &a2));
        }
    }

    #[test]
    fn derived_alpha2_zeroes_both_residuals(p in params(), a1 in unit()) {
        if let Ok(a2) = compatible_alpha2(&p, &a1) {
            let [r1, r2] = alpha_relation_residuals(&p, &a1, &a2).unwrap();
            prop_assert!(r1.is_zero());
            prop_assert!(r2.is_zero());
        }
    }

    #[test]
    fn positive_params_give_valid_weight(a in rational(), b in rational(), c in rational(), d in rational()) {
        let p = ParamSet::new(a, b, c, d);
        let wp = derive_weight(&p).unwrap();
        prop_assert!(wp.valid);
    }
}

#[test]
fn known_values_at_1234() {
    let p = ParamSet::from_ints([1, 2, 3, 4]);
    let mp = derive_mapped(&p).unwrap();
    assert_eq!((mp.t, mp.u, mp.v, mp.w), (ratio(6, 5), ratio(14, 15), ratio(9, 10), ratio(21, 20)));
    let cp = compatible_chain(&p, &ratio(1, 2)).unwrap();
    assert_eq!(cp.alpha2, ratio(7, 4));
    assert!(!cp.is_probabilistic());
    let [r1, r2] = alpha_relation_residuals(&p, &ratio(1, 2), &ratio(1, 3)).unwrap();
    assert!(!r1.is_zero() && !r2.is_zero());
}
