//! Exact rational numbers, their "p/q" text form, and mixed exact/float scalars.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Relative tolerance used wherever floating point enters (polyline lengths).
pub const FLOAT_TOL: f64 = 1e-9;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^e` for a possibly negative exponent.
pub fn pow2(e: i32) -> Rational {
    let two = int(2);
    if e >= 0 {
        num_traits::pow(two, e as usize)
    } else {
        Rational::one() / num_traits::pow(two, (-e) as usize)
    }
}

/// Parses `p/q`, `p`, or a finite decimal such as `-0.125`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("malformed rational {text:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!(
                "malformed rational {text:?}: zero denominator"
            )));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let w: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().map_err(|_| bad())?
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = Rational::new(w * &scale + f, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Canonical text form: always `p/q` with `q > 0` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Short human form used in labels: integers print without a denominator.
pub fn display_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_rational(r)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Closest rational with denominator `2^bits` (rounded toward zero).
pub fn from_f64_dyadic(x: f64, bits: u32) -> Rational {
    let scale = (2f64).powi(bits as i32);
    let n = (x * scale).trunc();
    Rational::new(
        BigInt::from(n as i128),
        num_traits::pow(BigInt::from(2), bits as usize),
    )
}

pub fn rational_max(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn rational_min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Rational wrapper that (de)serializes as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalText(pub Rational);

impl Serialize for RationalText {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = RationalText;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as a \"p/q\" string or an integer")
            }
            fn visit_str<E: serde::de::Error>(
                self,
                v: &str,
            ) -> std::result::Result<RationalText, E> {
                parse_rational(v).map(RationalText).map_err(E::custom)
            }
            fn visit_i64<E: serde::de::Error>(
                self,
                v: i64,
            ) -> std::result::Result<RationalText, E> {
                Ok(RationalText(int(v)))
            }
            fn visit_u64<E: serde::de::Error>(
                self,
                v: u64,
            ) -> std::result::Result<RationalText, E> {
                Ok(RationalText(Rational::from_integer(BigInt::from(v))))
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

pub fn texts(values: &[Rational]) -> Vec<RationalText> {
    values.iter().cloned().map(RationalText).collect()
}

pub fn untexts(values: Vec<RationalText>) -> Vec<Rational> {
    values.into_iter().map(|t| t.0).collect()
}

/// A nonnegative quantity that is exact when the geometry permits.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Approx(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => to_f64(r),
            Scalar::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(x) => x.abs() <= FLOAT_TOL,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Approx(x) => *x > FLOAT_TOL,
        }
    }

    /// `self <= other`, exactly when both are exact, else with relative tolerance.
    pub fn le(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a <= b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                a <= b + FLOAT_TOL * (1.0 + a.abs().max(b.abs()))
            }
        }
    }

    pub fn lt(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a < b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                a < b - FLOAT_TOL * (1.0 + a.abs().max(b.abs()))
            }
        }
    }

    pub fn approx_eq(&self, other: &Scalar) -> bool {
        self.le(other) && other.le(self)
    }

    pub fn mul_rational(&self, r: &Rational) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a * r),
            Scalar::Approx(x) => Scalar::Approx(x * to_f64(r)),
        }
    }

    pub fn text(&self) -> String {
        match self {
            Scalar::Exact(r) => format_rational(r),
            Scalar::Approx(x) => format!("{x:.12e}"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", display_rational(r)),
            Scalar::Approx(x) => write!(f, "{x}"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (a, b) => Scalar::Approx(a.to_f64() $op b.to_f64()),
                }
            }
        }
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (a, b) => Scalar::Approx(a.to_f64() $op b.to_f64()),
                }
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

pub fn is_one(r: &Rational) -> bool {
    r.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-4/6").unwrap(), rat(-2, 3));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
    }

    #[test]
    fn rejects_zero_denominator_and_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn text_form_round_trips() {
        for r in [rat(1, 3), int(0), int(-5), rat(22, 7)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
        assert_eq!(format_rational(&int(1)), "1/1");
        assert_eq!(display_rational(&int(1)), "1");
    }

    #[test]
    fn json_text_wrapper() {
        let v = RationalText(rat(5, 12));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "\"5/12\"");
        let back: RationalText = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<RationalText>("\"1/0\"").is_err());
    }

    #[test]
    fn pow2_negative() {
        assert_eq!(pow2(-3), rat(1, 8));
        assert_eq!(pow2(4), int(16));
    }

    #[test]
    fn scalar_comparisons() {
        let a = Scalar::Exact(rat(1, 3));
        let b = Scalar::Approx(1.0 / 3.0);
        assert!(a.approx_eq(&b));
        assert!(Scalar::Exact(rat(1, 4)).lt(&a));
        assert_eq!(
            Scalar::Exact(rat(1, 2)) + Scalar::Exact(rat(1, 3)),
            Scalar::Exact(rat(5, 6))
        );
    }
}
