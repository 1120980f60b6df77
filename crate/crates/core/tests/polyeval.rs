use num_traits::{One, Zero};
use rahman_core::params::derive_mapped;
use rahman_core::polyeval::{build_poly_matrix, poly_values, rahman_poly};
use rahman_core::sampling::generic_params;
use rahman_core::scalar::{int, ratio};
use rahman_core::{Error, MappedParams, ParamSet, Scalar, State, StateSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rising(a: i64, n: usize) -> Scalar {
    (0..n as i64).fold(Scalar::one(), |acc, k| acc * int(a + k))
}

fn fact(n: usize) -> Scalar {
    (1..=n as i64).fold(Scalar::one(), |acc, k| acc * int(k))
}

/// Term-by-term sum in l, k, j, i order over the full box `0..=size`.
fn oracle(freq: State, phys: State, mp: &MappedParams, size: usize) -> Scalar {
    let (m, n, x, y) = (freq.x as i64, freq.y as i64, phys.x as i64, phys.y as i64);
    let mut sum = Scalar::zero();
    for l in 0..=size {
        for k in 0..=size {
            for j in 0..=size {
                for i in 0..=size {
                    let num = rising(-m, i + j) * rising(-n, k + l) * rising(-x, i + k) * rising(-y, j + l);
                    if num.is_zero() {
                        continue;
                    }
                    let den = rising(-(size as i64), i + j + k + l) * fact(i) * fact(j) * fact(k) * fact(l);
                    assert!(!den.is_zero(), "nonzero term over a vanishing denominator");
                    sum += num / den
                        * num_traits::pow(mp.t.clone(), i)
                        * num_traits::pow(mp.u.clone(), j)
                        * num_traits::pow(mp.v.clone(), k)
                        * num_traits::pow(mp.w.clone(), l);
                }
            }
        }
    }
    sum
}

fn check_against_oracle(size: usize, p: &ParamSet) {
    let mp = derive_mapped(p).unwrap();
    let space = StateSpace::enumerate(size).unwrap();
    let values = poly_values(size, &mp).unwrap();
    for (r, &f) in space.states().iter().enumerate() {
        for (c, &s) in space.states().iter().enumerate() {
            assert_eq!(values[(r, c)], oracle(f, s, &mp, size), "P_{f}{s} at N={size}, {p}");
        }
    }
}

#[test]
fn n2_at_1234_matches_oracle() {
    check_against_oracle(2, &ParamSet::from_ints([1, 2, 3, 4]));
}

#[test]
fn random_points_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for size in 1..=4 {
        for _ in 0..2 {
            check_against_oracle(size, &generic_params(&mut rng));
        }
    }
}

#[test]
fn trivial_row_and_column() {
    let mp = derive_mapped(&ParamSet::from_ints([2, -3, 5, 7])).unwrap();
    let space = StateSpace::enumerate(4).unwrap();
    for &s in space.states() {
        assert!(rahman_poly(State::new(0, 0), s, &mp, 4).unwrap().is_one());
        assert!(rahman_poly(s, State::new(0, 0), &mp, 4).unwrap().is_one());
    }
}

#[test]
fn out_of_simplex_rejected() {
    let mp = derive_mapped(&ParamSet::from_ints([1, 2, 3, 4])).unwrap();
    let err = rahman_poly(State::new(2, 2), State::new(0, 0), &mp, 3).unwrap_err();
    assert!(matches!(err, Error::OutOfSimplex { .. }));
}

/// Forward differences of order `order` over a sequence of values.
fn difference(values: &[Scalar], order: usize) -> Vec<Scalar> {
    let mut v = values.to_vec();
    for _ in 0..order {
        v = v.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    v
}

#[test]
fn total_degree_bounded_by_m_plus_n() {
    let size = 6;
    let mp = derive_mapped(&ParamSet::new(ratio(3, 2), int(2), ratio(-5, 3), int(7))).unwrap();
    let space = StateSpace::enumerate(size).unwrap();
    for &f in space.states() {
        let order = f.x + f.y + 1;
        let eval = |s: State| rahman_poly(f, s, &mp, size).unwrap();
        // Lines along x, along y and along x = y.
        for fixed in 0..=size {
            let along_x: Vec<Scalar> = (0..=size - fixed).map(|x| eval(State::new(x, fixed))).collect();
            let along_y: Vec<Scalar> = (0..=size - fixed).map(|y| eval(State::new(fixed, y))).collect();
            for line in [along_x, along_y] {
                assert!(difference(&line, order).iter().all(Zero::is_zero), "degree of P_{f}");
            }
        }
        let diag: Vec<Scalar> = (0..=size / 2).map(|k| eval(State::new(k, k))).collect();
        assert!(difference(&diag, order).iter().all(Zero::is_zero), "diagonal degree of P_{f}");
    }
}

#[test]
fn invertible_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let pm = build_poly_matrix(3, &generic_params(&mut rng)).unwrap();
        assert!(!pm.determinant.is_zero());
        assert_eq!(pm.matrix.mul(&pm.inverse()), rahman_core::ExactMatrix::identity(10));
    }
    let pm = build_poly_matrix(5, &ParamSet::from_ints([1, 2, 3, 4])).unwrap();
    assert!(!pm.determinant.is_zero());
}

#[test]
fn equal_params_are_singular() {
    let err = build_poly_matrix(3, &ParamSet::from_ints([2, 2, 2, 2])).unwrap_err();
    assert!(matches!(err, Error::SingularPolyMatrix(_)));
    assert_eq!(err.exit_code(), 3);
}
