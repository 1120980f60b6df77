//! Polynomial parameters `p1..p4`, the quantities derived from them, chain
//! parameters, and the maps that make the two families compatible.
//!
//! Compatibility has two parts. The stationarity map [`compatible_beta`]
//! fixes `(beta1, beta2)` so the trinomial weight `(eta1, eta2)` is
//! stationary for the chain. On its own that does not make the polynomials
//! eigenvectors of the kernel: the retention probabilities must also satisfy
//! the relation checked by [`alpha_relation_residuals`], which
//! [`compatible_alpha2`] solves for `alpha2`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamSet {
    #[serde(with = "scalar::as_str")]
    pub p1: Scalar,
    #[serde(with = "scalar::as_str")]
    pub p2: Scalar,
    #[serde(with = "scalar::as_str")]
    pub p3: Scalar,
    #[serde(with = "scalar::as_str")]
    pub p4: Scalar,
}

impl ParamSet {
    pub fn new(p1: Scalar, p2: Scalar, p3: Scalar, p4: Scalar) -> Self {
        ParamSet { p1, p2, p3, p4 }
    }

    pub fn from_ints(p: [i64; 4]) -> Self {
        let [a, b, c, d] = p.map(scalar::int);
        ParamSet::new(a, b, c, d)
    }

    pub fn sum(&self) -> Scalar {
        &self.p1 + &self.p2 + &self.p3 + &self.p4
    }

    /// `p1 p4 - p2 p3`; must be nonzero for the difference operator.
    pub fn cross(&self) -> Scalar {
        &self.p1 * &self.p4 - &self.p2 * &self.p3
    }

    pub fn scaled(&self, c: &Scalar) -> ParamSet {
        ParamSet::new(&self.p1 * c, &self.p2 * c, &self.p3 * c, &self.p4 * c)
    }

    /// Checks every denominator used by the derived quantities.
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (&self.p1, "p1"),
            (&self.p2, "p2"),
            (&self.p3, "p3"),
            (&self.p4, "p4"),
        ];
        for (v, name) in checks {
            if v.is_zero() {
                return Err(Error::DegenerateParams(format!("{name} = 0 in {self}")));
            }
        }
        let sums = [
            (self.sum(), "p1+p2+p3+p4"),
            (&self.p1 + &self.p2, "p1+p2"),
            (&self.p1 + &self.p3, "p1+p3"),
            (&self.p2 + &self.p4, "p2+p4"),
            (&self.p3 + &self.p4, "p3+p4"),
        ];
        for (v, name) in sums {
            if v.is_zero() {
                return Err(Error::DegenerateParams(format!("{name} = 0 in {self}")));
            }
        }
        Ok(())
    }

    /// Denominators nonzero and `p1 p4 != p2 p3`.
    pub fn validate_generic(&self) -> Result<()> {
        self.validate()?;
        if self.cross().is_zero() {
            return Err(Error::DegenerateParams(format!("p1*p4 = p2*p3 in {self}")));
        }
        Ok(())
    }
}

impl std::fmt::Display for ParamSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "p=({}, {}, {}, {})",
            scalar::format(&self.p1),
            scalar::format(&self.p2),
            scalar::format(&self.p3),
            scalar::format(&self.p4)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappedParams {
    #[serde(with = "scalar::as_str")]
    pub t: Scalar,
    #[serde(with = "scalar::as_str")]
    pub u: Scalar,
    #[serde(with = "scalar::as_str")]
    pub v: Scalar,
    #[serde(with = "scalar::as_str")]
    pub w: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightParams {
    #[serde(with = "scalar::as_str")]
    pub eta1: Scalar,
    #[serde(with = "scalar::as_str")]
    pub eta2: Scalar,
    /// `0 < eta1`, `0 < eta2`, `eta1 + eta2 < 1`.
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainParams {
    #[serde(with = "scalar::as_str")]
    pub alpha1: Scalar,
    #[serde(with = "scalar::as_str")]
    pub alpha2: Scalar,
    #[serde(with = "scalar::as_str")]
    pub beta1: Scalar,
    #[serde(with = "scalar::as_str")]
    pub beta2: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// All entries of the kernel are strictly positive.
    Interior,
    /// Valid probabilities, possibly on the boundary.
    Probabilistic,
    /// Only the algebraic identities are meaningful.
    Algebraic,
}

impl ChainParams {
    pub fn new(alpha1: Scalar, alpha2: Scalar, beta1: Scalar, beta2: Scalar) -> Self {
        ChainParams { alpha1, alpha2, beta1, beta2 }
    }

    pub fn regime(&self) -> Regime {
        let zero = Scalar::zero();
        let one = Scalar::one();
        let blank = &one - &self.beta1 - &self.beta2;
        let unit = |a: &Scalar| *a >= zero && *a <= one;
        let probabilistic = unit(&self.alpha1)
            && unit(&self.alpha2)
            && self.beta1 >= zero
            && self.beta2 >= zero
            && blank >= zero;
        let open = |a: &Scalar| *a > zero && *a < one;
        let interior = open(&self.alpha1)
            && open(&self.alpha2)
            && self.beta1 > zero
            && self.beta2 > zero
            && blank > zero;
        match (interior, probabilistic) {
            (true, _) => Regime::Interior,
            (false, true) => Regime::Probabilistic,
            _ => Regime::Algebraic,
        }
    }

    pub fn is_probabilistic(&self) -> bool {
        self.regime() != Regime::Algebraic
    }
}

impl std::fmt::Display for ChainParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "alpha=({}, {}), beta=({}, {})",
            scalar::format(&self.alpha1),
            scalar::format(&self.alpha2),
            scalar::format(&self.beta1),
            scalar::format(&self.beta2)
        )
    }
}

fn nonzero(v: Scalar, what: &str, p: &ParamSet) -> Result<Scalar> {
    if v.is_zero() {
        Err(Error::DegenerateParams(format!("{what} vanishes at {p}")))
    } else {
        Ok(v)
    }
}

pub fn derive_mapped(p: &ParamSet) -> Result<MappedParams> {
    let s = nonzero(p.sum(), "p1+p2+p3+p4", p)?;
    let d1 = nonzero(&p.p1 * &s, "p1*(p1+p2+p3+p4)", p)?;
    let d2 = nonzero(&p.p3 * &s, "p3*(p1+p2+p3+p4)", p)?;
    let d3 = nonzero(&p.p2 * &s, "p2*(p1+p2+p3+p4)", p)?;
    let d4 = nonzero(&p.p4 * &s, "p4*(p1+p2+p3+p4)", p)?;
    let s12 = &p.p1 + &p.p2;
    let s13 = &p.p1 + &p.p3;
    let s24 = &p.p2 + &p.p4;
    let s34 = &p.p3 + &p.p4;
    Ok(MappedParams {
        t: &s12 * &s13 / d1,
        u: &s13 * &s34 / d2,
        v: &s12 * &s24 / d3,
        w: &s24 * &s34 / d4,
    })
}

pub fn derive_weight(p: &ParamSet) -> Result<WeightParams> {
    let s = p.sum();
    let s13 = &p.p1 + &p.p3;
    let s24 = &p.p2 + &p.p4;
    let d1 = nonzero((&p.p1 + &p.p2) * &s13 * &s24, "(p1+p2)(p1+p3)(p2+p4)", p)?;
    let d2 = nonzero(&s13 * &s24 * (&p.p3 + &p.p4), "(p1+p3)(p2+p4)(p3+p4)", p)?;
    let eta1 = &p.p1 * &p.p2 * &s / d1;
    let eta2 = &p.p3 * &p.p4 * &s / d2;
    let valid = eta1.is_positive() && eta2.is_positive() && &eta1 + &eta2 < Scalar::one();
    Ok(WeightParams { eta1, eta2, valid })
}

/// Stationarity map `beta_i = eta_i (1 - alpha_i) / (1 - alpha1 eta1 - alpha2 eta2)`.
pub fn compatible_beta(p: &ParamSet, alpha1: &Scalar, alpha2: &Scalar) -> Result<(Scalar, Scalar)> {
    let wp = derive_weight(p)?;
    let d = Scalar::one() - alpha1 * &wp.eta1 - alpha2 * &wp.eta2;
    let d = nonzero(d, "1 - alpha1*eta1 - alpha2*eta2", p)?;
    let one = Scalar::one();
    let beta1 = &wp.eta1 * (&one - alpha1) / &d;
    let beta2 = &wp.eta2 * (&one - alpha2) / &d;
    Ok((beta1, beta2))
}

/// Residuals of the eigenvector condition on the retention probabilities:
///
/// `t (1 - a1)(u - a2) - u (1 - a2)(t - a1)` and the same with `(v, w)`.
///
/// Both vanish exactly when the single-die transition matrix has the degree
/// one polynomials as eigenvectors.
pub fn alpha_relation_residuals(p: &ParamSet, alpha1: &Scalar, alpha2: &Scalar) -> Result<[Scalar; 2]> {
    let mp = derive_mapped(p)?;
    let one = Scalar::one();
    let rel = |a: &Scalar, b: &Scalar| {
        a * (&one - alpha1) * (b - alpha2) - b * (&one - alpha2) * (a - alpha1)
    };
    Ok([rel(&mp.t, &mp.u), rel(&mp.v, &mp.w)])
}

/// The unique `alpha2` satisfying the retention relation for a given `alpha1`:
/// `alpha2 = u alpha1 (1 - t) / (t (1 - u) - alpha1 (t - u))`.
pub fn compatible_alpha2(p: &ParamSet, alpha1: &Scalar) -> Result<Scalar> {
    let mp = derive_mapped(p)?;
    let one = Scalar::one();
    let den = &mp.t * (&one - &mp.u) - alpha1 * (&mp.t - &mp.u);
    let den = nonzero(den, "t(1-u) - alpha1(t-u)", p)?;
    Ok(&mp.u * alpha1 * (&one - &mp.t) / den)
}

/// Full compatible chain for `(p, alpha1)`: `alpha2` from the retention
/// relation, `(beta1, beta2)` from the stationarity map.
pub fn compatible_chain(p: &ParamSet, alpha1: &Scalar) -> Result<ChainParams> {
    let alpha2 = compatible_alpha2(p, alpha1)?;
    let (beta1, beta2) = compatible_beta(p, alpha1, &alpha2)?;
    Ok(ChainParams::new(alpha1.clone(), alpha2, beta1, beta2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn p1234() -> ParamSet {
        ParamSet::from_ints([1, 2, 3, 4])
    }

    #[test]
    fn mapped_at_1234() {
        let mp = derive_mapped(&p1234()).unwrap();
        assert_eq!(mp.t, ratio(6, 5));
        assert_eq!(mp.u, ratio(14, 15));
        assert_eq!(mp.v, ratio(9, 10));
        assert_eq!(mp.w, ratio(21, 20));
    }

    #[test]
    fn symmetric_params_collapse() {
        let p = ParamSet::from_ints([7, 7, 7, 7]);
        let mp = derive_mapped(&p).unwrap();
        assert!([&mp.t, &mp.u, &mp.v, &mp.w].iter().all(|x| **x == int(1)));
        let wp = derive_weight(&p).unwrap();
        assert_eq!(wp.eta1, ratio(1, 2));
        assert_eq!(wp.eta2, ratio(1, 2));
        assert!(!wp.valid);
    }

    #[test]
    fn weight_at_1234() {
        let wp = derive_weight(&p1234()).unwrap();
        assert_eq!(wp.eta1, ratio(5, 18));
        assert_eq!(wp.eta2, ratio(5, 7));
        assert_eq!(&wp.eta1 + &wp.eta2, ratio(125, 126));
        assert!(wp.valid);
    }

    #[test]
    fn zero_denominators() {
        assert!(matches!(
            derive_mapped(&ParamSet::from_ints([0, 2, 3, 4])),
            Err(Error::DegenerateParams(_))
        ));
        assert!(matches!(
            derive_weight(&ParamSet::from_ints([1, 2, -1, 3])),
            Err(Error::DegenerateParams(_))
        ));
        assert!(ParamSet::from_ints([1, -1, 2, 3]).validate().is_err());
        assert!(ParamSet::from_ints([1, 2, 2, 4]).validate_generic().is_err());
        assert!(p1234().validate_generic().is_ok());
    }

    #[test]
    fn beta_map_boundary_cases() {
        let (b1, b2) = compatible_beta(&p1234(), &int(0), &int(0)).unwrap();
        assert_eq!((b1, b2), (ratio(5, 18), ratio(5, 7)));
        let (b1, b2) = compatible_beta(&p1234(), &int(1), &int(1)).unwrap();
        assert!(b1.is_zero() && b2.is_zero());
    }

    #[test]
    fn alpha2_at_1234() {
        // t = 6/5, u = 14/15: alpha2 = (14/15)(1/2)(-1/5) / ((6/5)(1/15) - (1/2)(4/15)).
        assert_eq!(compatible_alpha2(&p1234(), &ratio(1, 2)).unwrap(), ratio(7, 4));
        assert_eq!(compatible_alpha2(&p1234(), &int(0)).unwrap(), int(0));
        assert_eq!(compatible_alpha2(&p1234(), &int(1)).unwrap(), int(1));
    }

    #[test]
    fn regimes() {
        let cp = ChainParams::new(ratio(1, 2), ratio(1, 3), ratio(1, 5), ratio(1, 7));
        assert_eq!(cp.regime(), Regime::Interior);
        let cp = ChainParams::new(int(1), int(1), int(0), int(0));
        assert_eq!(cp.regime(), Regime::Probabilistic);
        let cp = ChainParams::new(ratio(7, 4), ratio(1, 3), ratio(1, 5), ratio(1, 7));
        assert_eq!(cp.regime(), Regime::Algebraic);
    }
}
