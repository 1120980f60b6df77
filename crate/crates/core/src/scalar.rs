//! Exact rational scalars and their textual forms.
//!
//! Every quantity in the library is a [`Scalar`], an arbitrary-precision
//! rational. The canonical text form is `"num/den"` in lowest terms with a
//! positive denominator, including integers (`"3/1"`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// `num/den`; panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Parses `"a/b"`, `"a"` or `"-a/b"`. Whitespace around the parts is allowed.
pub fn parse(text: &str) -> Result<Scalar> {
    let bad = || Error::ParseRational(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Canonical `"num/den"` form.
pub fn format(q: &Scalar) -> String {
    // BigRational is always kept reduced with a positive denominator.
    format!("{}/{}", q.numer(), q.denom())
}

pub fn to_f64(q: &Scalar) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Decimal expansion with exactly `digits` fractional digits, rounded half
/// away from zero from the exact value.
pub fn to_decimal(q: &Scalar, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = q.abs() * BigRational::from_integer(scale.clone());
    let twice: BigInt = scaled.numer() * BigInt::from(2) + scaled.denom();
    let (rounded, _) = twice.div_mod_floor(&(scaled.denom() * BigInt::from(2)));
    let (whole, frac) = rounded.div_mod_floor(&scale);
    let sign = if q.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = digits)
    }
}

pub fn abs(q: &Scalar) -> Scalar {
    q.abs()
}

/// Factorial as an exact integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `serde` adapter writing a [`Scalar`] as its canonical string.
pub mod as_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Scalar;

    pub fn serialize<S: Serializer>(q: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}

pub mod as_str_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Scalar;

    pub fn serialize<S: Serializer>(v: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&super::format(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| super::parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod as_str_opt {
    use serde::Serializer;

    use super::Scalar;

    pub fn serialize<S: Serializer>(q: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&super::format(q)),
            None => s.serialize_none(),
        }
    }
}
