use num_traits::Zero;
use rahman_core::bispectral::{
    default_anchors, discover_commutant, normalize_gauge, reproduce_reference_b, reproduce_reference_commutant,
    seven_point_operators, solve_bispectral, Anchor,
};
use rahman_core::reference::N5_ENTRIES;
use rahman_core::sampling::{generic_params, interior_chain};
use rahman_core::scalar::ratio;
use rahman_core::{build_kernel, ChainParams, Error, ParamSet, StencilPattern};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn five_point_operator_is_local() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for size in 2..=5 {
        let op = solve_bispectral(size, &generic_params(&mut rng)).unwrap();
        assert!(op.intertwining_exact);
        assert!(op.row_sums_zero);
        assert!(op.stencil.conforms, "N={size}: {:?}", op.stencil.violations);
        assert!(op.stencil.max_nonzeros_per_row <= 5);
    }
}

#[test]
fn seven_point_operators_combine_to_five_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for size in 2..=4 {
        let ops = seven_point_operators(size, &generic_params(&mut rng)).unwrap();
        assert!(ops.linear_consistency);
        assert!(ops.bx_max_nonzeros <= 7 && ops.by_max_nonzeros <= 7);
        assert!(ops.bx_shape.len() <= 7);
    }
}

#[test]
fn n5_reference_at_1234() {
    let (op, cmp) = reproduce_reference_b(&ParamSet::from_ints([1, 2, 3, 4])).unwrap();
    assert!(cmp.pass, "{:?}", cmp.mismatches().collect::<Vec<_>>());
    assert_eq!(cmp.entries.len(), N5_ENTRIES.len() + 21);
    assert_eq!(op.matrix[(0, 1)], ratio(-225, 2));
    assert_eq!(op.matrix[(20, 18)], ratio(5, 3));
}

#[test]
fn n5_reference_rejects_degenerate_cross() {
    let err = reproduce_reference_b(&ParamSet::from_ints([1, 2, 3, 6])).unwrap_err();
    assert!(matches!(err, Error::DegenerateParams(_)));
}

#[test]
fn n3_commutant_reference() {
    let cp = ChainParams::new(ratio(1, 2), ratio(1, 3), ratio(1, 5), ratio(1, 7));
    let (basis, cmp) = reproduce_reference_commutant(&cp).unwrap();
    assert_eq!(basis.dimension, 2);
    assert!(basis.identity_in_span);
    assert!(cmp.pass, "{:?}", cmp.mismatches().collect::<Vec<_>>());
    assert_eq!(cmp.entries.len(), 34);
}

#[test]
fn local_commutant_dimension_by_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for size in 1..=4 {
        let k = build_kernel(size, &interior_chain(&mut rng)).unwrap();
        let basis = discover_commutant(&k, &k.space.adjacency(true));
        assert!(basis.all_commute);
        assert!(basis.identity_in_span);
        assert_eq!(basis.dimension, 2, "N={size}");
    }
}

#[test]
fn diagonal_pattern_gives_identity_only() {
    let k = build_kernel(3, &ChainParams::new(ratio(1, 2), ratio(1, 3), ratio(1, 5), ratio(1, 7))).unwrap();
    let basis = discover_commutant(&k, &StencilPattern::diagonal(10));
    assert_eq!(basis.dimension, 1);
    assert!(basis.nontrivial_element().is_none());
}

#[test]
fn gauge_anchors_are_met() {
    let k = build_kernel(3, &ChainParams::new(ratio(2, 3), ratio(1, 4), ratio(1, 6), ratio(1, 3))).unwrap();
    let basis = discover_commutant(&k, &k.space.adjacency(true));
    let anchors = default_anchors(&k.space);
    let m = normalize_gauge(basis.nontrivial_element().unwrap(), &anchors).unwrap();
    assert!(m[(9, 9)].is_zero());
    assert_eq!(m[(0, 4)], ratio(3, 1));
    assert_eq!(m.mul(&k.matrix), k.matrix.mul(&m));
    let clash = [Anchor { row: 0, col: 0, value: 1 }, Anchor { row: 1, col: 1, value: 1 }];
    assert!(normalize_gauge(&rahman_core::ExactMatrix::identity(10), &clash).is_err());
}
