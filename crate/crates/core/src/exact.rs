//! Exact rationals, rigorous enclosures and their JSON encoding.
//!
//! Every quantity that the integral engines can compute in closed form is a
//! [`Q`]. Quantities that involve irrational operations (square roots in
//! distortion measures, truncated series) are carried as a [`Real`]: a
//! rational midpoint together with a rational radius that bounds the error.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Fractional bits used by square-root enclosures.
const SQRT_BITS: usize = 80;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Shortest round-trip decimal of the nearest double.
pub fn decimal(x: &Q) -> String {
    let v = to_f64(x);
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

pub fn pow(x: &Q, e: usize) -> Q {
    num::pow(x.clone(), e)
}

pub fn max_q<'a>(a: &'a Q, b: &'a Q) -> &'a Q {
    if a >= b {
        a
    } else {
        b
    }
}

/// Parses `"3"`, `"-1/2"`, `"0.125"` or `"1e-3"` exactly.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0")
        .parse()
        .map_err(|_| bad())?;
    let mut value = Q::new(digits, BigInt::from(10));
    let scale = exp - frac_part.len() as i32;
    let ten = qi(10);
    if scale >= 0 {
        value *= pow(&ten, scale as usize);
    } else {
        value /= pow(&ten, (-scale) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// Rational value of a JSON scalar: integers and strings are exact, other
/// numbers go through their shortest decimal rendering.
pub fn q_from_json(v: &serde_json::Value) -> Result<Q> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(qi(i))
            } else {
                parse_q(&n.to_string())
            }
        }
        serde_json::Value::String(s) => parse_q(s),
        other => Err(Error::Parse(format!("expected a number, found {other}"))),
    }
}

pub fn q_to_json(x: &Q) -> serde_json::Value {
    if x.is_integer() {
        if let Some(i) = x.to_integer().to_i64() {
            return serde_json::Value::from(i);
        }
    }
    serde_json::Value::String(x.to_string())
}

/// Floor of the square root of a non-negative rational, scaled by `2^bits`.
fn sqrt_floor_scaled(x: &Q, bits: usize) -> BigInt {
    let scaled = x * Q::from_integer(BigInt::one() << (2 * bits));
    scaled.floor().to_integer().sqrt()
}

fn perfect_square(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Rigorous enclosure of `sqrt(x)` for `x >= 0`.
pub fn sqrt_enclosure(x: &Q) -> Real {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    if let (Some(a), Some(b)) = (perfect_square(x.numer()), perfect_square(x.denom())) {
        return Real::exact(Q::new(a, b));
    }
    let lo = Q::new(sqrt_floor_scaled(x, SQRT_BITS), BigInt::one() << SQRT_BITS);
    let half_ulp = Q::new(BigInt::one(), BigInt::one() << (SQRT_BITS + 1));
    Real {
        mid: lo + &half_ulp,
        rad: half_ulp,
    }
}

/// A rational midpoint with a rational error radius.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Real {
    mid: Q,
    rad: Q,
}

impl Real {
    pub fn exact(v: Q) -> Self {
        Real {
            mid: v,
            rad: Q::zero(),
        }
    }

    pub fn zero() -> Self {
        Real::exact(Q::zero())
    }

    pub fn with_radius(mid: Q, rad: Q) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        Real { mid, rad }
    }

    pub fn mid(&self) -> &Q {
        &self.mid
    }

    pub fn rad(&self) -> &Q {
        &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn lower(&self) -> Q {
        &self.mid - &self.rad
    }

    pub fn upper(&self) -> Q {
        &self.mid + &self.rad
    }

    pub fn is_zero(&self) -> bool {
        self.mid.is_zero() && self.rad.is_zero()
    }

    pub fn certainly_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn scale(&self, k: &Q) -> Real {
        Real {
            mid: &self.mid * k,
            rad: &self.rad * k.abs(),
        }
    }

    pub fn widen(&self, extra: &Q) -> Real {
        Real {
            mid: self.mid.clone(),
            rad: &self.rad + extra,
        }
    }

    /// `self <= other` holds for every pair of points in the enclosures.
    pub fn certainly_le(&self, other: &Real) -> bool {
        self == other || self.upper() <= other.lower()
    }

    pub fn certainly_lt(&self, other: &Real) -> bool {
        self.upper() < other.lower()
    }

    /// Equality is established: both exact and equal, or structurally identical.
    pub fn certainly_eq(&self, other: &Real) -> bool {
        self == other
    }

    /// The enclosures are disjoint, so the underlying values differ.
    pub fn certainly_ne(&self, other: &Real) -> bool {
        self.certainly_lt(other) || other.certainly_lt(self)
    }

    /// The enclosures intersect after widening by `slack`.
    pub fn consistent_with(&self, other: &Real, slack: &Q) -> bool {
        (&self.mid - &other.mid).abs() <= &self.rad + &other.rad + slack
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.mid)
    }

    pub fn max(&self, other: &Real) -> Real {
        if self.certainly_le(other) {
            other.clone()
        } else if other.certainly_le(self) {
            self.clone()
        } else {
            // hull of both enclosures
            let lo = max_q(&self.lower(), &other.lower()).clone();
            let hi = max_q(&self.upper(), &other.upper()).clone();
            let two = qi(2);
            Real::with_radius((&lo + &hi) / &two, (&hi - &lo) / &two)
        }
    }
}

impl From<Q> for Real {
    fn from(v: Q) -> Self {
        Real::exact(v)
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        Real {
            mid: &self.mid + &rhs.mid,
            rad: &self.rad + &rhs.rad,
        }
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        &self + &rhs
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        Real {
            mid: &self.mid - &rhs.mid,
            rad: &self.rad + &rhs.rad,
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mid: -self.mid,
            rad: self.rad,
        }
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.mid)
        } else {
            write!(f, "{} ± {}", decimal(&self.mid), decimal(&self.rad))
        }
    }
}

/// Non-negative value that may be `+∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtValue {
    Finite(Real),
    Infinite,
}

impl ExtValue {
    pub fn finite(v: Q) -> Self {
        ExtValue::Finite(Real::exact(v))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtValue::Infinite)
    }

    pub fn as_real(&self) -> Option<&Real> {
        match self {
            ExtValue::Finite(r) => Some(r),
            ExtValue::Infinite => None,
        }
    }

    pub fn scale(&self, k: &Q) -> ExtValue {
        match self {
            _ if k.is_zero() => ExtValue::finite(Q::zero()),
            ExtValue::Finite(r) => ExtValue::Finite(r.scale(k)),
            ExtValue::Infinite => ExtValue::Infinite,
        }
    }

    pub fn add(&self, other: &ExtValue) -> ExtValue {
        match (self, other) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a + b),
            _ => ExtValue::Infinite,
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(r) => r.fmt(f),
            ExtValue::Infinite => f.write_str("inf"),
        }
    }
}

/// JSON form of a rational: numerator and denominator as decimal strings plus
/// a human-readable rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatJson {
    pub num: String,
    pub den: String,
    pub decimal: String,
}

impl From<&Q> for RatJson {
    fn from(x: &Q) -> Self {
        RatJson {
            num: x.numer().to_string(),
            den: x.denom().to_string(),
            decimal: decimal(x),
        }
    }
}

impl RatJson {
    pub fn to_q(&self) -> Result<Q> {
        let n: BigInt = self
            .num
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator {:?}", self.num)))?;
        let d: BigInt = self
            .den
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator {:?}", self.den)))?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Q::new(n, d))
    }
}

/// `#[serde(with = "serde_q")]` for a single rational.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        RatJson::from(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let r = RatJson::deserialize(d)?;
        r.to_q().map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "serde_qvec")]` for a vector of rationals.
pub mod serde_qvec {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<RatJson> = x.iter().map(RatJson::from).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<RatJson>::deserialize(d)?;
        v.iter()
            .map(|r| r.to_q().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// JSON form of an [`ExtValue`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtJson {
    pub infinite: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<RatJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl From<&ExtValue> for ExtJson {
    fn from(v: &ExtValue) -> Self {
        match v {
            ExtValue::Infinite => ExtJson {
                infinite: true,
                value: None,
                radius: None,
            },
            ExtValue::Finite(r) => ExtJson {
                infinite: false,
                value: Some(RatJson::from(r.mid())),
                radius: (!r.is_exact()).then(|| to_f64(r.rad())),
            },
        }
    }
}

/// Least common multiple.
pub fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_forms() {
        assert_eq!(parse_q("3").unwrap(), qi(3));
        assert_eq!(parse_q("-1/2").unwrap(), q(-1, 2));
        assert_eq!(parse_q("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_q("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_q("2.5E2").unwrap(), qi(250));
        assert_eq!(parse_q(".5").unwrap(), q(1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn json_numbers_are_exact_decimals() {
        let v: serde_json::Value = serde_json::from_str("0.1").unwrap();
        assert_eq!(q_from_json(&v).unwrap(), q(1, 10));
        let v: serde_json::Value = serde_json::from_str("\"2/3\"").unwrap();
        assert_eq!(q_from_json(&v).unwrap(), q(2, 3));
    }

    #[test]
    fn sqrt_is_exact_on_squares() {
        assert_eq!(sqrt_enclosure(&q(9, 4)), Real::exact(q(3, 2)));
        assert_eq!(sqrt_enclosure(&Q::zero()), Real::zero());
    }

    #[test]
    fn sqrt_encloses_two() {
        let r = sqrt_enclosure(&qi(2));
        assert!(!r.is_exact());
        let lo = r.lower();
        let hi = r.upper();
        assert!(&lo * &lo <= qi(2));
        assert!(&hi * &hi >= qi(2));
        assert!(r.rad() < &q(1, 1_000_000_000_000));
    }

    #[test]
    fn rat_json_round_trip() {
        let x = q(-7, 3);
        let s = serde_json::to_string(&RatJson::from(&x)).unwrap();
        let back: RatJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_q().unwrap(), x);
    }
}
