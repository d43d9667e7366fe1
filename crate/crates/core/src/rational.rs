//! Exact rational helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

/// `num / den` in lowest terms. Panics on a zero denominator.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ceil_i64(r: &Rational) -> i64 {
    r.ceil().to_integer().to_i64().expect("ceiling out of i64 range")
}

pub fn floor_i64(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().expect("floor out of i64 range")
}

/// Smallest integer `N` with `N >= r - c * sqrt(gamma)`, for `c, gamma >= 0`.
pub fn ceil_sub_sqrt(r: &Rational, c: &Rational, gamma: &Rational) -> i64 {
    debug_assert!(!c.is_negative() && !gamma.is_negative());
    // N works iff r - N <= c*sqrt(gamma), i.e. r - N <= 0 or (r - N)^2 <= c^2 gamma.
    let ok = |n: i64| {
        let diff = r - int(n);
        !diff.is_positive() || &diff * &diff <= c * c * gamma
    };
    let mut hi = ceil_i64(r);
    debug_assert!(ok(hi));
    // r - c*sqrt(gamma) >= r - c*(gamma + 1)/2 > lo - 1, so lo fails or is the answer.
    let mut lo = floor_i64(&(r - c * (gamma + int(1)) / int(2))) - 1;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `sqrt(gamma) <= bound`, decided exactly.
pub fn sqrt_le(gamma: &Rational, bound: &Rational) -> bool {
    !bound.is_negative() && gamma <= &(bound * bound)
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Text(String),
}

impl IntRepr {
    fn from_big(v: &BigInt) -> Self {
        match v.to_i64() {
            Some(s) => IntRepr::Small(s),
            None => IntRepr::Text(v.to_string()),
        }
    }

    fn into_big<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(v)),
            IntRepr::Text(s) => s.parse().map_err(E::custom),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: IntRepr,
    den: IntRepr,
}

/// Serde adapter: `{"num": .., "den": ..}` in lowest terms. Components that
/// do not fit an `i64` are written as decimal strings.
pub mod json {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr { num: IntRepr::from_big(r.numer()), den: IntRepr::from_big(r.denom()) }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let repr = RationalRepr::deserialize(d)?;
        let num = repr.num.into_big()?;
        let den: BigInt = repr.den.into_big()?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(num, den))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            r.as_ref()
                .map(|r| RationalRepr { num: IntRepr::from_big(r.numer()), den: IntRepr::from_big(r.denom()) })
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(with = "super")] Rational);
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}
