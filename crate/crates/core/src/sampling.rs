//! Random rational parameter points for identity testing.
//!
//! Numerators and denominators are drawn uniformly from `1..=1000`;
//! degenerate draws are rejected and redrawn.

use rand::Rng;

use crate::params::{compatible_chain, derive_weight, ChainParams, ParamSet, Regime};
use crate::scalar::{ratio, Scalar};

const MAX_TRIES: usize = 100_000;

pub fn positive_rational<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    ratio(rng.random_range(1..=1000), rng.random_range(1..=1000))
}

pub fn signed_rational<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    let q = positive_rational(rng);
    if rng.random_bool(0.5) {
        -q
    } else {
        q
    }
}

/// Rational strictly inside `(0, 1)`.
pub fn unit_rational<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    let den = rng.random_range(2..=1000);
    ratio(rng.random_range(1..den), den)
}

/// Positive generic `p` with a nondegenerate weight.
pub fn generic_params<R: Rng + ?Sized>(rng: &mut R) -> ParamSet {
    for _ in 0..MAX_TRIES {
        let p = ParamSet::new(
            positive_rational(rng),
            positive_rational(rng),
            positive_rational(rng),
            positive_rational(rng),
        );
        if p.validate_generic().is_ok() {
            return p;
        }
    }
    unreachable!("rejection sampling of generic parameters did not terminate")
}

/// Generic `p` and a compatible chain, in the algebraic regime.
pub fn compatible_point<R: Rng + ?Sized>(rng: &mut R) -> (ParamSet, ChainParams) {
    for _ in 0..MAX_TRIES {
        let p = generic_params(rng);
        let alpha1 = unit_rational(rng);
        if let Ok(cp) = compatible_chain(&p, &alpha1) {
            return (p, cp);
        }
    }
    unreachable!("rejection sampling of compatible points did not terminate")
}

/// Compatible point whose chain is a genuine interior Markov chain and whose
/// weight is a valid trinomial. Requires mixed-sign `p`.
pub fn probabilistic_compatible_point<R: Rng + ?Sized>(rng: &mut R) -> (ParamSet, ChainParams) {
    for _ in 0..MAX_TRIES {
        let p = ParamSet::new(
            signed_rational(rng),
            signed_rational(rng),
            signed_rational(rng),
            signed_rational(rng),
        );
        if p.validate_generic().is_err() {
            continue;
        }
        let Ok(wp) = derive_weight(&p) else { continue };
        if !wp.valid {
            continue;
        }
        let alpha1 = unit_rational(rng);
        if let Ok(cp) = compatible_chain(&p, &alpha1) {
            if cp.regime() == Regime::Interior {
                return (p, cp);
            }
        }
    }
    unreachable!("rejection sampling of probabilistic compatible points did not terminate")
}

/// Chain parameters with every kernel entry strictly positive.
pub fn interior_chain<R: Rng + ?Sized>(rng: &mut R) -> ChainParams {
    loop {
        let cp = ChainParams::new(
            unit_rational(rng),
            unit_rational(rng),
            unit_rational(rng),
            unit_rational(rng),
        );
        if cp.regime() == Regime::Interior {
            return cp;
        }
    }
}
