//! Exact rational and dyadic-rational arithmetic.
//!
//! [`ExactRational`] is always kept in lowest terms with a positive
//! denominator, so structural equality is value equality. [`DyadicRational`]
//! is the evaluator's argument type: a nonnegative `k / 2^m` with `k` odd
//! whenever `m > 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::NumberError;

/// Arbitrary-precision signed rational in canonical lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, NumberError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(NumberError::DivisionByZero);
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    /// `numer / denom` for small operands; panics only if `denom == 0`.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, NumberError> {
        if rhs.is_zero() {
            return Err(NumberError::DivisionByZero);
        }
        Ok(Self(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Self, NumberError> {
        Self::one().checked_div(self)
    }

    /// Multiplies by `2^exp` (exp may be negative) without a general gcd.
    pub fn scale_pow2(&self, exp: i64) -> Self {
        if exp == 0 || self.is_zero() {
            return self.clone();
        }
        let (numer, denom) = (self.0.numer(), self.0.denom());
        let shift = exp.unsigned_abs();
        let raw = if exp > 0 {
            let cancel = denom.trailing_zeros().unwrap_or(0).min(shift);
            BigRational::new_raw(numer << (shift - cancel), denom >> cancel)
        } else {
            let cancel = numer.trailing_zeros().unwrap_or(0).min(shift);
            BigRational::new_raw(numer >> cancel, denom << (shift - cancel))
        };
        Self(raw)
    }

    pub fn pow2(exp: i64) -> Self {
        Self::one().scale_pow2(exp)
    }

    /// Returns `log2(denominator)` when the denominator is a power of two.
    pub fn dyadic_exponent(&self) -> Option<u64> {
        let d = self.0.denom().magnitude();
        let tz = d.trailing_zeros().unwrap_or(0);
        (d >> tz).is_one().then_some(tz)
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Correctly rounded (round-half-to-even) decimal expansion with
    /// `digits` places after the point.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let denom = self.0.denom();
        let scaled = self.0.numer().abs() * BigInt::from(10u32).pow(digits as u32);
        let (mut q, r) = scaled.div_rem(denom);
        let twice: BigInt = &r << 1usize;
        match twice.cmp(denom) {
            Ordering::Greater => q += 1,
            Ordering::Equal if q.is_odd() => q += 1,
            _ => {}
        }
        let mut body = q.to_string();
        if digits > 0 {
            if body.len() <= digits {
                body = format!("{}{}", "0".repeat(digits + 1 - body.len()), body);
            }
            body.insert(body.len() - digits, '.');
        }
        if self.is_negative() && !q.is_zero() {
            body.insert(0, '-');
        }
        body
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<&DyadicRational> for ExactRational {
    fn from(d: &DyadicRational) -> Self {
        d.to_rational()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"num/den"` or a bare integer, with an optional leading `-`.
impl FromStr for ExactRational {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || NumberError::Malformed(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let n = parse_int(n).ok_or_else(bad)?;
                let d = parse_int(d).ok_or_else(bad)?;
                Self::new(n, d)
            }
            None => parse_int(s).map(Self::from_integer).ok_or_else(bad),
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_uint(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses a terminating decimal literal such as `"0.3125"`, `"-2"` or `".5"`.
pub fn parse_decimal(s: &str) -> Result<ExactRational, NumberError> {
    let bad = || NumberError::Malformed(s.to_string());
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(bad());
    }
    let mantissa: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let value = ExactRational::new(mantissa, denom)?;
    Ok(if negative { -value } else { value })
}

/// Parses any real literal the CLI accepts: `"k/2^m"`, `"a/b"`, integers and
/// terminating decimals.
pub fn parse_real_literal(s: &str) -> Result<ExactRational, NumberError> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let numer = parse_int(n).ok_or_else(|| NumberError::Malformed(n.to_string()))?;
        let denom: BigInt = match d.split_once('^') {
            Some((base, exp)) => {
                let base = parse_uint(base).ok_or_else(|| NumberError::Malformed(base.to_string()))?;
                let exp: u32 = exp
                    .parse()
                    .ok()
                    .filter(|_| exp.bytes().all(|b| b.is_ascii_digit()))
                    .ok_or_else(|| NumberError::Malformed(exp.to_string()))?;
                BigInt::from(base).pow(exp)
            }
            None => parse_int(d).ok_or_else(|| NumberError::Malformed(d.to_string()))?,
        };
        return ExactRational::new(numer, denom);
    }
    parse_decimal(s)
}

/// Nonnegative dyadic rational `k / 2^m` in canonical form: `k` is odd when
/// `m > 0`, and zero is `0 / 2^0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numer: BigUint,
    exp: u64,
}

/// Result of writing `k / 2^M` as `(1 + x) / 2^m_inner` with `x = p / 2^q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingBitSplit {
    pub q: u64,
    pub p: BigUint,
    pub m_inner: u64,
    pub x: DyadicRational,
    /// `(1 - x) / 2^m_inner`, canonicalized.
    pub partner: DyadicRational,
}

impl DyadicRational {
    pub fn new(numer: impl Into<BigUint>, exp: u64) -> Self {
        normalize_dyadic(numer.into(), exp)
    }

    pub fn zero() -> Self {
        Self { numer: BigUint::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Self { numer: BigUint::one(), exp: 0 }
    }

    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0 && self.numer.is_one()
    }

    /// True when the value lies in `[0, 1]`.
    pub fn in_unit_interval(&self) -> bool {
        if self.exp == 0 {
            return self.numer <= BigUint::one();
        }
        self.numer.bits() <= self.exp
    }

    pub fn to_rational(&self) -> ExactRational {
        ExactRational::from_integer(BigInt::from_biguint(Sign::Plus, self.numer.clone()))
            .scale_pow2(-(self.exp as i64))
    }

    /// `1 - self`; requires `self <= 1`.
    pub fn one_minus(&self) -> Result<Self, NumberError> {
        if !self.in_unit_interval() {
            return Err(NumberError::OutOfDomain(format!("1 - {self} is negative")));
        }
        Ok(normalize_dyadic((BigUint::one() << self.exp) - &self.numer, self.exp))
    }

    /// Splits `k / 2^M` with `1 < k < 2^M` at the leading bit of `k`.
    pub fn split_leading_bit(&self) -> Result<LeadingBitSplit, NumberError> {
        if !self.in_unit_interval() || self.is_one() {
            return Err(NumberError::OutOfDomain(format!("{self} is not below 1")));
        }
        if self.numer <= BigUint::one() {
            return Err(NumberError::OutOfDomain(format!(
                "{self} has numerator {} and cannot be split",
                self.numer
            )));
        }
        let q = self.numer.bits() - 1;
        let top = BigUint::one() << q;
        let p = &self.numer - &top;
        let partner = normalize_dyadic(&top - &p, self.exp);
        Ok(LeadingBitSplit {
            q,
            x: normalize_dyadic(p.clone(), q),
            p,
            m_inner: self.exp - q,
            partner,
        })
    }
}

/// Canonical form of `k / 2^m` with common factors of two removed.
pub fn normalize_dyadic(k: BigUint, m: u64) -> DyadicRational {
    match k.trailing_zeros() {
        None => DyadicRational::zero(),
        Some(tz) => {
            let cancel = tz.min(m);
            DyadicRational { numer: k >> cancel, exp: m - cancel }
        }
    }
}

impl TryFrom<&ExactRational> for DyadicRational {
    type Error = NumberError;

    fn try_from(r: &ExactRational) -> Result<Self, Self::Error> {
        if r.is_negative() {
            return Err(NumberError::OutOfDomain(format!("{r} is negative")));
        }
        let exp = r.dyadic_exponent().ok_or_else(|| NumberError::NotDyadic(r.to_string()))?;
        Ok(normalize_dyadic(r.numer().magnitude().clone(), exp))
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let shift = self.exp.max(other.exp);
        let a = &self.numer << (shift - self.exp);
        let b = &other.numer << (shift - other.exp);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/2^{}", self.numer, self.exp)
        }
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for DyadicRational {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DyadicRational::try_from(&parse_real_literal(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> ExactRational {
        ExactRational::ratio(n, d)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(DyadicRational::new(6u32, 4), DyadicRational::new(3u32, 3));
        let d = DyadicRational::new(6u32, 4);
        assert_eq!((d.numer().clone(), d.exp()), (BigUint::from(3u32), 3));
        let z = DyadicRational::new(0u32, 7);
        assert_eq!((z.numer().clone(), z.exp()), (BigUint::zero(), 0));
        let c = DyadicRational::new(5u32, 4);
        assert_eq!((c.numer().clone(), c.exp()), (BigUint::from(5u32), 4));
    }

    #[test]
    fn split_examples() {
        let s = DyadicRational::new(3u32, 2).split_leading_bit().unwrap();
        assert_eq!((s.q, s.p.clone(), s.m_inner), (1, BigUint::from(1u32), 1));
        assert_eq!(s.x, DyadicRational::new(1u32, 1));

        let s = DyadicRational::new(5u32, 4).split_leading_bit().unwrap();
        assert_eq!((s.q, s.p.clone(), s.m_inner), (2, BigUint::from(1u32), 2));
        assert_eq!(s.x, DyadicRational::new(1u32, 2));
        assert_eq!(s.partner, DyadicRational::new(3u32, 4));

        let s = DyadicRational::new(29u32, 5).split_leading_bit().unwrap();
        assert_eq!((s.q, s.p.clone(), s.m_inner), (4, BigUint::from(13u32), 1));
        assert_eq!(s.x, DyadicRational::new(13u32, 4));
    }

    #[test]
    fn split_rejects() {
        assert!(DyadicRational::new(1u32, 5).split_leading_bit().is_err());
        assert!(DyadicRational::one().split_leading_bit().is_err());
        assert!(DyadicRational::new(5u32, 2).split_leading_bit().is_err());
        assert!(DyadicRational::zero().split_leading_bit().is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(r(5, 72).to_decimal_string(6), "0.069444");
        assert_eq!(r(1, 2).to_decimal_string(3), "0.500");
        assert_eq!(r(19, 33177600).to_decimal_string(10), "0.0000005727");
        assert_eq!(r(305857, 2073600).to_decimal_string(12), "0.147500482253");
        assert_eq!(r(-5, 72).to_decimal_string(4), "-0.0694");
        // ties go to even
        assert_eq!(r(1, 8).to_decimal_string(2), "0.12");
        assert_eq!(r(3, 8).to_decimal_string(2), "0.38");
        assert_eq!(r(-1, 2000).to_decimal_string(3), "0.000");
        assert_eq!(r(7, 1).to_decimal_string(2), "7.00");
    }

    #[test]
    fn text_form() {
        assert_eq!("-5/72".parse::<ExactRational>().unwrap(), r(-5, 72));
        assert_eq!("10/4".parse::<ExactRational>().unwrap(), r(5, 2));
        assert_eq!("3".parse::<ExactRational>().unwrap(), r(3, 1));
        assert_eq!(r(-5, 72).to_string(), "-5/72");
        assert_eq!(r(4, 2).to_string(), "2");
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("1/".parse::<ExactRational>().is_err());
        assert!("+1".parse::<ExactRational>().is_err());
        assert!("a/3".parse::<ExactRational>().is_err());
    }

    #[test]
    fn literals() {
        assert_eq!(parse_real_literal("3/2^5").unwrap(), r(3, 32));
        assert_eq!(parse_real_literal("0.3125").unwrap(), r(5, 16));
        assert_eq!(parse_real_literal(".5").unwrap(), r(1, 2));
        assert_eq!(parse_real_literal("-1").unwrap(), r(-1, 1));
        assert!(parse_real_literal("0.3.1").is_err());
        assert!(parse_real_literal("").is_err());
        assert!(parse_real_literal("1/2^x").is_err());
        assert_eq!("5/16".parse::<DyadicRational>().unwrap(), DyadicRational::new(5u32, 4));
        assert!(matches!("0.3".parse::<DyadicRational>(), Err(NumberError::NotDyadic(_))));
        assert!(matches!("1/3".parse::<DyadicRational>(), Err(NumberError::NotDyadic(_))));
        assert!(matches!("-1/2".parse::<DyadicRational>(), Err(NumberError::OutOfDomain(_))));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(r(1, 2).checked_div(&ExactRational::zero()), Err(NumberError::DivisionByZero));
        assert!(ExactRational::zero().recip().is_err());
        assert_eq!(r(1, 2).checked_div(&r(3, 4)).unwrap(), r(2, 3));
    }

    #[test]
    fn scale_pow2_matches_multiplication() {
        for (n, d) in [(3, 4), (5, 1), (-7, 12), (8, 3), (0, 1)] {
            for e in -5i64..=5 {
                let x = r(n, d);
                let expected = if e >= 0 {
                    &x * &r(1 << e, 1)
                } else {
                    x.checked_div(&r(1 << -e, 1)).unwrap()
                };
                assert_eq!(x.scale_pow2(e), expected);
            }
        }
    }

    #[test]
    fn ordering_and_unit_interval() {
        let half = DyadicRational::new(1u32, 1);
        assert!(DyadicRational::new(3u32, 3) < half);
        assert!(DyadicRational::new(5u32, 3) > half);
        assert!(DyadicRational::one().in_unit_interval());
        assert!(!DyadicRational::new(3u32, 1).in_unit_interval());
        assert_eq!(DyadicRational::new(3u32, 4).one_minus().unwrap(), DyadicRational::new(13u32, 4));
    }

    fn small_rational() -> impl Strategy<Value = ExactRational> {
        (-10_000i64..10_000, 1i64..10_000).prop_map(|(n, d)| r(n, d))
    }

    proptest! {
        #[test]
        fn arithmetic_round_trips(a in small_rational(), b in small_rational()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!((&a * &b).checked_div(&b).unwrap(), a.clone());
            }
            prop_assert_eq!(a.to_string().parse::<ExactRational>().unwrap(), a);
        }

        #[test]
        fn normalize_is_idempotent(k in 0u64..1_000_000, m in 0u64..40) {
            let d = DyadicRational::new(k, m);
            let again = DyadicRational::new(d.numer().clone(), d.exp());
            prop_assert_eq!(&again, &d);
            prop_assert_eq!(d.to_rational(), ExactRational::ratio(k as i64, 1).scale_pow2(-(m as i64)));
            prop_assert!(d.exp() == 0 || d.numer().is_odd());
        }

        #[test]
        fn split_recombines(m in 2u64..30, raw in 0u64..u64::MAX) {
            let k = (raw % ((1u64 << m) - 3)) | 1;
            prop_assume!(k > 1);
            let d = DyadicRational::new(k, m);
            let s = d.split_leading_bit().unwrap();
            let one = ExactRational::one();
            let shift = -(s.m_inner as i64);
            prop_assert_eq!((&one + &s.x.to_rational()).scale_pow2(shift), d.to_rational());
            prop_assert_eq!((&one - &s.x.to_rational()).scale_pow2(shift), s.partner.to_rational());
            prop_assert!(s.partner < d);
            prop_assert!(s.m_inner >= 1);
        }
    }
}
