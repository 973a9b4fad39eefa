//! Exact rational numbers.
//!
//! Values that fit in machine words stay on an `i64` fast path; anything
//! larger is promoted to an arbitrary-precision [`BigRational`]. The two
//! representations are kept canonical (a value that fits is always small),
//! so structural equality, hashing and ordering agree with numeric ones.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

#[derive(Clone)]
enum Repr {
    /// Reduced, denominator > 0.
    Small(i64, i64),
    /// Reduced, and never representable as `Small`.
    Big(Box<BigRational>),
}

/// An exact `p/q` number with `q > 0` and `gcd(|p|, q) = 1`.
#[derive(Clone)]
pub struct Rational(Repr);

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// Builds `numer/denom`, reducing. Panics on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Self::from_i128(numer as i128, denom as i128)
    }

    pub fn from_big(value: BigRational) -> Self {
        // BigRational::new already reduces and normalises the sign.
        match (value.numer().to_i64(), value.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(value))),
        }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    fn from_i128(numer: i128, denom: i128) -> Self {
        debug_assert!(denom != 0);
        let g = numer.gcd(&denom);
        let (mut n, mut d) = (numer / g, denom / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Self::from_big(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Rational::from_integer(n.div_floor(d)),
            Repr::Big(b) => Self::from_big(b.floor()),
        }
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => {
                let q = n.div_floor(d);
                let exact = (q as i128) * (*d as i128) == *n as i128;
                Rational::from_integer(if exact { q } else { q + 1 })
            }
            Repr::Big(b) => Self::from_big(b.ceil()),
        }
    }

    /// Fractional part `self - floor(self)`, always in `[0, 1)`.
    pub fn fract(&self) -> Self {
        self - &self.floor()
    }

    /// The integer value, if `self` is an integer that fits an `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(b) => Self::from_big(b.recip()),
        }
    }

    /// Approximate value for display purposes only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        match i64::try_from(n) {
            Ok(n) => Rational::from_integer(n),
            Err(_) => Rational::from_bigint(BigInt::from(n)),
        }
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i64)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128))),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_ref(lhs: &Rational, rhs: &Rational) -> Rational {
    if let (Repr::Small(a, b), Repr::Small(c, d)) = (&lhs.0, &rhs.0) {
        if *b == *d {
            return Rational::from_i128(*a as i128 + *c as i128, *b as i128);
        }
        let num = (*a as i128)
            .checked_mul(*d as i128)
            .and_then(|x| (*c as i128).checked_mul(*b as i128).and_then(|y| x.checked_add(y)));
        if let Some(num) = num {
            return Rational::from_i128(num, (*b as i128) * (*d as i128));
        }
    }
    Rational::from_big(lhs.to_big() + rhs.to_big())
}

fn mul_ref(lhs: &Rational, rhs: &Rational) -> Rational {
    if let (Repr::Small(a, b), Repr::Small(c, d)) = (&lhs.0, &rhs.0) {
        if *a == 0 || *c == 0 {
            return Rational::zero();
        }
        return Rational::from_i128((*a as i128) * (*c as i128), (*b as i128) * (*d as i128));
    }
    Rational::from_big(lhs.to_big() * rhs.to_big())
}

fn neg_ref(value: &Rational) -> Rational {
    match &value.0 {
        Repr::Small(n, d) => match n.checked_neg() {
            Some(m) => Rational(Repr::Small(m, *d)),
            None => Rational::from_big(-value.to_big()),
        },
        Repr::Big(b) => Rational::from_big(-(**b).clone()),
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(&self, &rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(&self, rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, |a: &Rational, b: &Rational| add_ref(a, &neg_ref(b)));
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, |a: &Rational, b: &Rational| mul_ref(a, &b.recip()));

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_ref(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_ref(self)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = add_ref(self, rhs);
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = add_ref(self, &rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = add_ref(self, &neg_ref(rhs));
    }
}

impl SubAssign<Rational> for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = add_ref(self, &neg_ref(&rhs));
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = mul_ref(self, rhs);
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt, ParseRationalError> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Invalid(whole.to_string()));
    }
    s.trim_start_matches('+').parse::<BigInt>().map_err(|_| ParseRationalError::Invalid(whole.to_string()))
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `p/q` and decimal `a.b` forms; decimals convert exactly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        if let Some((p, q)) = text.split_once('/') {
            let p = parse_int(p.trim(), text)?;
            let q = parse_int(q.trim(), text)?;
            if q.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(text.to_string()));
            }
            return Ok(Rational::from_big(BigRational::new(p, q)));
        }
        if let Some((int_part, frac_part)) = text.split_once('.') {
            let negative = int_part.starts_with('-');
            let int_digits = int_part.trim_start_matches(['+', '-']);
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseRationalError::Invalid(text.to_string()));
            }
            let int_value = if int_digits.is_empty() { BigInt::zero() } else { parse_int(int_digits, text)? };
            let frac_value = parse_int(frac_part, text)?;
            let scale = num_traits::pow(BigInt::from(10), frac_part.len());
            let magnitude = BigRational::new(int_value * &scale + frac_value, scale);
            return Ok(Rational::from_big(if negative { -magnitude } else { magnitude }));
        }
        Ok(Rational::from_bigint(parse_int(text, text)?))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a rational string such as \"3/2\" or \"1.5\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(Rational::from_integer(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational::from(v))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
        Err(E::custom(format!("floating-point literal {v} is not exact; quote it as a string")))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn reduces_and_normalises_sign() {
        assert_eq!(q(2, -4), q(-1, 2));
        assert_eq!(q(2, -4).to_string(), "-1/2");
        assert_eq!(q(6, 3).to_string(), "2");
    }

    #[test]
    fn floor_ceil_fract() {
        assert_eq!(q(3, 2).floor(), q(1, 1));
        assert_eq!(q(3, 2).ceil(), q(2, 1));
        assert_eq!(q(-3, 2).floor(), q(-2, 1));
        assert_eq!(q(-3, 2).ceil(), q(-1, 1));
        assert_eq!(q(-3, 2).fract(), q(1, 2));
        assert_eq!(q(4, 1).ceil(), q(4, 1));
    }

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!("3/2".parse::<Rational>().unwrap(), q(3, 2));
        assert_eq!("1.5".parse::<Rational>().unwrap(), q(3, 2));
        assert_eq!("-0.25".parse::<Rational>().unwrap(), q(-1, 4));
        assert_eq!(".5".parse::<Rational>().unwrap(), q(1, 2));
        assert_eq!("7".parse::<Rational>().unwrap(), q(7, 1));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("1.".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn overflow_promotes_to_big_and_back() {
        let big = Rational::from_integer(i64::MAX) * Rational::from_integer(4);
        assert!(big > Rational::from_integer(i64::MAX));
        let back = &big / &Rational::from_integer(4);
        assert_eq!(back, Rational::from_integer(i64::MAX));
        assert_eq!(back.to_i64(), Some(i64::MAX));
        let neg_min = -Rational::from_integer(i64::MIN);
        assert_eq!(neg_min.to_string(), "9223372036854775808");
    }

    #[test]
    fn json_accepts_integers_and_strings_but_not_floats() {
        let v: Vec<Rational> = serde_json::from_str(r#"[3, "3/2", "0.75"]"#).unwrap();
        assert_eq!(v, vec![q(3, 1), q(3, 2), q(3, 4)]);
        assert!(serde_json::from_str::<Rational>("0.1").is_err());
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        prop_oneof![
            (-1000i64..1000, 1i64..200).prop_map(|(n, d)| Rational::new(n, d)),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| Rational::new(n, d)),
        ]
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(a in arb_rational()) {
            let text = a.to_string();
            prop_assert_eq!(text.parse::<Rational>().unwrap(), a);
        }

        #[test]
        fn matches_bigrational(a in arb_rational(), b in arb_rational()) {
            let (ba, bb) = (a.to_big(), b.to_big());
            prop_assert_eq!((&a + &b).to_big(), &ba + &bb);
            prop_assert_eq!((&a - &b).to_big(), &ba - &bb);
            prop_assert_eq!((&a * &b).to_big(), &ba * &bb);
            if !b.is_zero() {
                prop_assert_eq!((&a / &b).to_big(), &ba / &bb);
            }
            prop_assert_eq!(a.cmp(&b), ba.cmp(&bb));
            prop_assert_eq!(a.floor().to_big(), ba.floor());
            prop_assert_eq!(a.ceil().to_big(), ba.ceil());
        }
    }
}
