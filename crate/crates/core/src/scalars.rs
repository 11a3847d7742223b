//! Exact rationals, arbitrary-precision complex floats and the tolerance rule
//! shared by every numeric check.
//!
//! [`ExactScalar`] is always kept in canonical form (positive denominator,
//! coprime parts), so equality is structural and conservation checks are
//! bit-exact. [`BigScalar`] carries a real and an imaginary part at a fixed
//! mantissa precision; complex values only appear when square roots of
//! negative radicands are taken.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use rand::Rng;
use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arithmetic shared by exact rationals, high-precision floats and sparse
/// polynomials, so that map formulas and periodicity polynomials are written
/// once and evaluated in every regime.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn zero_like(&self) -> Self;

    /// Embeds a rational constant into the same ring (same precision or
    /// variable list as `self`).
    fn constant_like(&self, c: &ExactScalar) -> Self;

    fn is_zero(&self) -> bool;

    /// Exact division. Rationals and floats fail only on a zero divisor;
    /// polynomials also fail when the remainder is nonzero.
    fn try_div(&self, divisor: &Self) -> Result<Self>;

    fn one_like(&self) -> Self {
        self.constant_like(&ExactScalar::one())
    }

    fn int_like(&self, n: i64) -> Self {
        self.constant_like(&ExactScalar::from(n))
    }

    fn square(&self) -> Self {
        self.clone() * self
    }

    fn pow(&self, exp: u32) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }
}

/// Rings where division by any nonzero element is possible and a magnitude
/// is available for pivoting.
pub trait Field: Ring + Send + Sync {
    /// Approximate absolute value (modulus for complex values).
    fn magnitude(&self) -> f64;

    /// Whether the value should be treated as zero when it appears as a
    /// divisor. Exact for rationals; below `2^(-precision/2)` for floats.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

// ---------------------------------------------------------------------------
// ExactScalar
// ---------------------------------------------------------------------------

/// Arbitrary-precision rational number in canonical form.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactScalar(Rational);

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar(Rational::new())
    }

    pub fn one() -> Self {
        ExactScalar(Rational::from(1))
    }

    /// `num/den`; fails when `den` is zero.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(ExactScalar(Rational::from((num, den))))
    }

    pub fn from_rational(r: Rational) -> Self {
        ExactScalar(r)
    }

    pub fn from_integers(num: Integer, den: Integer) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ExactScalar(Rational::from((num, den))))
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> Self {
        ExactScalar(self.0.clone().abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ExactScalar(self.0.clone().recip()))
    }

    pub fn checked_div(&self, divisor: &ExactScalar) -> Result<Self> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ExactScalar(Rational::from(&self.0 / &divisor.0)))
    }

    pub fn powi(&self, exp: i32) -> Result<Self> {
        if exp < 0 && self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ExactScalar(Rational::from((&self.0).pow(exp))))
    }

    /// Square root when `self` is the square of a rational.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.signum() < 0 {
            return None;
        }
        let n = self.0.numer();
        let d = self.0.denom();
        if n.is_perfect_square() && d.is_perfect_square() {
            let rn = n.clone().sqrt();
            let rd = d.clone().sqrt();
            Some(ExactScalar(Rational::from((rn, rd))))
        } else {
            None
        }
    }

    /// max(|numerator|, denominator).
    pub fn height(&self) -> Integer {
        let n = self.0.numer().clone().abs();
        let d = self.0.denom().clone();
        if n > d {
            n
        } else {
            d
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Uniform numerator in `[-bound, bound]`, denominator in `[1, bound]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, bound: u64) -> Self {
        let bound = bound.max(1) as i64;
        let num = rng.gen_range(-bound..=bound);
        let den = rng.gen_range(1..=bound);
        ExactScalar(Rational::from((num, den)))
    }

    /// Like [`ExactScalar::random`] but never zero.
    pub fn random_nonzero<R: Rng + ?Sized>(rng: &mut R, bound: u64) -> Self {
        loop {
            let v = Self::random(rng, bound);
            if !v.is_zero() {
                return v;
            }
        }
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar(Rational::from(n))
    }
}

impl From<i32> for ExactScalar {
    fn from(n: i32) -> Self {
        ExactScalar(Rational::from(n))
    }
}

impl From<Integer> for ExactScalar {
    fn from(n: Integer) -> Self {
        ExactScalar(Rational::from(n))
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    /// Accepts `p`, `p/q` and plain decimals such as `-0.125` or `1e-3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty rational".into()));
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: Integer = n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
            let d: Integer = d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
            return ExactScalar::from_integers(n, d);
        }
        if let Ok(n) = s.parse::<Integer>() {
            return Ok(ExactScalar::from(n));
        }
        parse_decimal(s).ok_or_else(|| Error::Parse(format!("not a rational: `{s}`")))
    }
}

fn parse_decimal(s: &str) -> Option<ExactScalar> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: Integer = if all.is_empty() { Integer::new() } else { all.parse().ok()? };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from(10);
    let factor = Rational::from((&ten).pow(scale));
    Some(ExactScalar(Rational::from(num) * factor))
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! exact_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                ExactScalar(self.0 $op &rhs.0)
            }
        }
        impl<'a, 'b> $tr<&'b ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'b ExactScalar) -> ExactScalar {
                ExactScalar(Rational::from(&self.0 $op &rhs.0))
            }
        }
    };
}

exact_binop!(Add, add, +);
exact_binop!(Sub, sub, -);
exact_binop!(Mul, mul, *);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-self.0)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(Rational::from(-&self.0))
    }
}

impl Ring for ExactScalar {
    fn zero_like(&self) -> Self {
        ExactScalar::zero()
    }

    fn constant_like(&self, c: &ExactScalar) -> Self {
        c.clone()
    }

    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }

    fn try_div(&self, divisor: &Self) -> Result<Self> {
        self.checked_div(divisor)
    }
}

impl Field for ExactScalar {
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

// ---------------------------------------------------------------------------
// Precision, BigScalar
// ---------------------------------------------------------------------------

/// Mantissa precision in bits; at least 64.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Precision(u32);

impl Precision {
    pub const MIN: Precision = Precision(64);
    pub const DEFAULT: Precision = Precision(256);

    pub fn new(bits: u32) -> Result<Self> {
        if bits < 64 {
            Err(Error::PrecisionTooLow(bits))
        } else {
            Ok(Precision(bits))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn doubled(self) -> Precision {
        Precision(self.0 * 2)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

impl TryFrom<u32> for Precision {
    type Error = Error;
    fn try_from(bits: u32) -> Result<Self> {
        Precision::new(bits)
    }
}

impl From<Precision> for u32 {
    fn from(p: Precision) -> u32 {
        p.0
    }
}

/// Complex number with arbitrary-precision real and imaginary parts.
#[derive(Clone)]
pub struct BigScalar {
    re: Float,
    im: Float,
}

impl BigScalar {
    pub fn zero(prec: Precision) -> Self {
        BigScalar { re: Float::new(prec.bits()), im: Float::new(prec.bits()) }
    }

    /// Correctly rounded conversion at `prec` bits.
    pub fn from_exact(value: &ExactScalar, prec: Precision) -> Self {
        BigScalar { re: Float::with_val(prec.bits(), value.as_rational()), im: Float::new(prec.bits()) }
    }

    pub fn from_complex_exact(re: &ExactScalar, im: &ExactScalar, prec: Precision) -> Self {
        BigScalar {
            re: Float::with_val(prec.bits(), re.as_rational()),
            im: Float::with_val(prec.bits(), im.as_rational()),
        }
    }

    pub fn from_f64(value: f64, prec: Precision) -> Self {
        BigScalar { re: Float::with_val(prec.bits(), value), im: Float::new(prec.bits()) }
    }

    /// Wraps a real MPFR value, re-rounding it to `prec`.
    pub fn from_float(value: Float, prec: Precision) -> Self {
        BigScalar { re: Float::with_val(prec.bits(), value), im: Float::new(prec.bits()) }
    }

    /// Parses a decimal real such as `1.5e-3` at `prec` bits.
    pub fn parse_real(s: &str, prec: Precision) -> Result<Self> {
        let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
        Ok(BigScalar { re: Float::with_val(prec.bits(), parsed), im: Float::new(prec.bits()) })
    }

    pub fn precision(&self) -> Precision {
        Precision(self.re.prec())
    }

    /// Re-rounds both parts to a new precision.
    pub fn with_precision(&self, prec: Precision) -> Self {
        BigScalar { re: Float::with_val(prec.bits(), &self.re), im: Float::with_val(prec.bits(), &self.im) }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Modulus as a real MPFR value.
    pub fn abs(&self) -> Float {
        let p = self.re.prec();
        if self.im.is_zero() {
            Float::with_val(p, self.re.abs_ref())
        } else {
            Float::with_val(p, self.re.hypot_ref(&self.im))
        }
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn to_f64(&self) -> f64 {
        self.re.to_f64()
    }

    pub fn checked_div(&self, divisor: &BigScalar) -> Result<Self> {
        if divisor.re.is_zero() && divisor.im.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.re.prec();
        if divisor.im.is_zero() {
            return Ok(BigScalar {
                re: Float::with_val(p, &self.re / &divisor.re),
                im: Float::with_val(p, &self.im / &divisor.re),
            });
        }
        let denom = Float::with_val(p, divisor.re.square_ref()) + Float::with_val(p, divisor.im.square_ref());
        let re = Float::with_val(p, &self.re * &divisor.re) + Float::with_val(p, &self.im * &divisor.im);
        let im = Float::with_val(p, &self.im * &divisor.re) - Float::with_val(p, &self.re * &divisor.im);
        Ok(BigScalar { re: re / &denom, im: im / &denom })
    }

    /// Principal square root; negative reals give a purely imaginary result.
    pub fn sqrt(&self) -> Self {
        let p = self.re.prec();
        if self.im.is_zero() {
            if self.re.is_sign_negative() && !self.re.is_zero() {
                return BigScalar { re: Float::new(p), im: Float::with_val(p, -&self.re).sqrt() };
            }
            return BigScalar { re: Float::with_val(p, self.re.sqrt_ref()), im: Float::new(p) };
        }
        let r = self.abs();
        let re = (Float::with_val(p, &r + &self.re) / 2u32).sqrt();
        let mut im = (Float::with_val(p, &r - &self.re) / 2u32).sqrt();
        if self.im.is_sign_negative() {
            im = -im;
        }
        BigScalar { re, im }
    }

    /// Uniform real value in `[lo, hi]` drawn from a 53-bit grid.
    pub fn random_real<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, prec: Precision) -> Self {
        let u: f64 = rng.gen();
        Self::from_f64(lo + (hi - lo) * u, prec)
    }

    fn real_sum(p: u32, a: &Float, b: &Float) -> Float {
        Float::with_val(p, a + b)
    }
}

impl fmt::Display for BigScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = digits_for(self.re.prec());
        let re = self.re.to_string_radix_round(10, Some(digits), Round::Nearest);
        if self.im.is_zero() {
            f.write_str(&re)
        } else {
            let im = self.im.to_string_radix_round(10, Some(digits), Round::Nearest);
            if im.starts_with('-') {
                write!(f, "{re}{im}i")
            } else {
                write!(f, "{re}+{im}i")
            }
        }
    }
}

impl fmt::Debug for BigScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} ({} bits)", self.re.prec())
    }
}

fn digits_for(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1
}

impl PartialEq for BigScalar {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }
}

#[derive(Serialize, Deserialize)]
struct BigScalarRepr {
    value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    imag: Option<String>,
    precision: u32,
}

impl Serialize for BigScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let digits = digits_for(self.re.prec());
        let repr = BigScalarRepr {
            value: self.re.to_string_radix_round(10, Some(digits), Round::Nearest),
            imag: if self.im.is_zero() {
                None
            } else {
                Some(self.im.to_string_radix_round(10, Some(digits), Round::Nearest))
            },
            precision: self.re.prec(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BigScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = BigScalarRepr::deserialize(deserializer)?;
        let prec = Precision::new(repr.precision).map_err(serde::de::Error::custom)?;
        let mut v = BigScalar::parse_real(&repr.value, prec).map_err(serde::de::Error::custom)?;
        if let Some(im) = repr.imag {
            let im = BigScalar::parse_real(&im, prec).map_err(serde::de::Error::custom)?;
            v.im = im.re;
        }
        Ok(v)
    }
}

impl<'a> Add<&'a BigScalar> for BigScalar {
    type Output = BigScalar;
    fn add(mut self, rhs: &'a BigScalar) -> BigScalar {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
        self
    }
}

impl<'a> Sub<&'a BigScalar> for BigScalar {
    type Output = BigScalar;
    fn sub(mut self, rhs: &'a BigScalar) -> BigScalar {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
        self
    }
}

impl<'a> Mul<&'a BigScalar> for BigScalar {
    type Output = BigScalar;
    fn mul(mut self, rhs: &'a BigScalar) -> BigScalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            self.re *= &rhs.re;
            return self;
        }
        let p = self.re.prec();
        let re = Float::with_val(p, &self.re * &rhs.re) - Float::with_val(p, &self.im * &rhs.im);
        let im =
            BigScalar::real_sum(p, &Float::with_val(p, &self.re * &rhs.im), &Float::with_val(p, &self.im * &rhs.re));
        BigScalar { re, im }
    }
}

impl Add for BigScalar {
    type Output = BigScalar;
    fn add(self, rhs: BigScalar) -> BigScalar {
        self + &rhs
    }
}

impl Sub for BigScalar {
    type Output = BigScalar;
    fn sub(self, rhs: BigScalar) -> BigScalar {
        self - &rhs
    }
}

impl Mul for BigScalar {
    type Output = BigScalar;
    fn mul(self, rhs: BigScalar) -> BigScalar {
        self * &rhs
    }
}

impl<'b> Add<&'b BigScalar> for &BigScalar {
    type Output = BigScalar;
    fn add(self, rhs: &'b BigScalar) -> BigScalar {
        self.clone() + rhs
    }
}

impl<'b> Sub<&'b BigScalar> for &BigScalar {
    type Output = BigScalar;
    fn sub(self, rhs: &'b BigScalar) -> BigScalar {
        self.clone() - rhs
    }
}

impl<'b> Mul<&'b BigScalar> for &BigScalar {
    type Output = BigScalar;
    fn mul(self, rhs: &'b BigScalar) -> BigScalar {
        self.clone() * rhs
    }
}

impl Neg for BigScalar {
    type Output = BigScalar;
    fn neg(self) -> BigScalar {
        BigScalar { re: -self.re, im: -self.im }
    }
}

impl Ring for BigScalar {
    fn zero_like(&self) -> Self {
        BigScalar::zero(self.precision())
    }

    fn constant_like(&self, c: &ExactScalar) -> Self {
        BigScalar::from_exact(c, self.precision())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn try_div(&self, divisor: &Self) -> Result<Self> {
        self.checked_div(divisor)
    }
}

impl Field for BigScalar {
    fn magnitude(&self) -> f64 {
        self.abs_f64()
    }

    fn is_negligible(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let half = -((self.re.prec() / 2) as i32);
        match self.abs().get_exp() {
            Some(e) => e <= half,
            None => true,
        }
    }
}

// ---------------------------------------------------------------------------
// Tolerance
// ---------------------------------------------------------------------------

/// `|a - b| <= absolute_epsilon + relative_epsilon * max(|a|, |b|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub absolute_epsilon: f64,
    pub relative_epsilon: f64,
}

impl Tolerance {
    pub const fn absolute(eps: f64) -> Self {
        Tolerance { absolute_epsilon: eps, relative_epsilon: 0.0 }
    }

    pub const fn new(absolute_epsilon: f64, relative_epsilon: f64) -> Self {
        Tolerance { absolute_epsilon, relative_epsilon }
    }

    /// Whether a nonnegative residual passes the absolute part of the rule.
    pub fn accepts_residual(&self, residual: &Float) -> bool {
        let bound = Float::with_val(residual.prec().max(64), self.absolute_epsilon);
        *residual <= bound
    }
}

impl Default for Tolerance {
    /// Absolute 1e-40, tuned for 256-bit runs.
    fn default() -> Self {
        Tolerance::absolute(1e-40)
    }
}

/// The [`Tolerance`] comparison rule; symmetric in `a` and `b`.
pub fn approx_equal(a: &BigScalar, b: &BigScalar, tol: &Tolerance) -> Result<bool> {
    let (pa, pb) = (a.precision().bits(), b.precision().bits());
    if pa != pb {
        return Err(Error::PrecisionMismatch(pa, pb));
    }
    let diff = (a.clone() - b).abs();
    let scale = {
        let (ma, mb) = (a.abs(), b.abs());
        if ma > mb {
            ma
        } else {
            mb
        }
    };
    let bound = Float::with_val(pa, tol.absolute_epsilon) + Float::with_val(pa, tol.relative_epsilon) * scale;
    Ok(diff <= bound)
}

/// A value that is exact when possible and a high-precision float otherwise.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MaybeExact {
    Exact(ExactScalar),
    Approx(BigScalar),
}

impl MaybeExact {
    pub fn to_big(&self, prec: Precision) -> BigScalar {
        match self {
            MaybeExact::Exact(v) => BigScalar::from_exact(v, prec),
            MaybeExact::Approx(v) => v.with_precision(prec),
        }
    }

    pub fn as_exact(&self) -> Option<&ExactScalar> {
        match self {
            MaybeExact::Exact(v) => Some(v),
            MaybeExact::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            MaybeExact::Exact(v) => v.to_f64(),
            MaybeExact::Approx(v) => v.to_f64(),
        }
    }
}

impl fmt::Display for MaybeExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaybeExact::Exact(v) => v.fmt(f),
            MaybeExact::Approx(v) => v.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    #[test]
    fn approx_equal_examples() {
        let p = Precision::DEFAULT;
        let one = BigScalar::from_exact(&ExactScalar::one(), p);
        assert!(approx_equal(&one, &one, &Tolerance::absolute(0.0)).unwrap());

        let zero = BigScalar::zero(p);
        let tiny = BigScalar::parse_real("1e-60", p).unwrap();
        assert!(approx_equal(&zero, &tiny, &Tolerance::absolute(1e-50)).unwrap());

        let two = BigScalar::from_exact(&ExactScalar::from(2), p);
        assert!(!approx_equal(&one, &two, &Tolerance::new(1e-50, 1e-50)).unwrap());
    }

    #[test]
    fn approx_equal_rejects_mixed_precision() {
        let a = BigScalar::from_f64(1.0, Precision::new(128).unwrap());
        let b = BigScalar::from_f64(1.0, Precision::DEFAULT);
        assert_eq!(approx_equal(&a, &b, &Tolerance::default()), Err(Error::PrecisionMismatch(128, 256)));
    }

    #[test]
    fn precision_floor() {
        assert!(Precision::new(63).is_err());
        assert_eq!(Precision::new(64).unwrap(), Precision::MIN);
    }

    #[test]
    fn canonical_form_and_display() {
        assert_eq!(q("6/-4").to_string(), "-3/2");
        assert_eq!(q("10/5").to_string(), "2");
        assert_eq!(q("0/7"), ExactScalar::zero());
        assert_eq!(q("-0.125"), q("-1/8"));
        assert_eq!(q("1e-3"), q("1/1000"));
        assert_eq!(q("2.5E2"), ExactScalar::from(250));
        assert!("1/0".parse::<ExactScalar>().is_err());
        assert!("abc".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(ExactScalar::one().checked_div(&ExactScalar::zero()), Err(Error::DivisionByZero));
        let p = Precision::DEFAULT;
        assert_eq!(BigScalar::from_f64(1.0, p).checked_div(&BigScalar::zero(p)), Err(Error::DivisionByZero));
    }

    #[test]
    fn sqrt_exact_only_for_squares() {
        assert_eq!(q("9/4").sqrt_exact(), Some(q("3/2")));
        assert_eq!(q("2").sqrt_exact(), None);
        assert_eq!(q("-4").sqrt_exact(), None);
    }

    #[test]
    fn complex_sqrt_of_negative() {
        let p = Precision::DEFAULT;
        let r = BigScalar::from_exact(&q("-4"), p).sqrt();
        assert!(r.re().is_zero());
        assert_eq!(r.im().to_f64(), 2.0);
        let back = r.clone() * &r;
        assert!(approx_equal(&back, &BigScalar::from_exact(&q("-4"), p), &Tolerance::default()).unwrap());
    }

    #[test]
    fn complex_sqrt_general() {
        let p = Precision::DEFAULT;
        let z = BigScalar::from_complex_exact(&q("3"), &q("-4"), p);
        let r = z.sqrt();
        assert!(approx_equal(&(r.clone() * &r), &z, &Tolerance::default()).unwrap());
        assert!(r.re().to_f64() > 0.0);
    }

    #[test]
    fn serde_shapes() {
        let v = q("-7/3");
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "\"-7/3\"");
        let back: ExactScalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);

        let b = BigScalar::from_exact(&q("1/3"), Precision::new(128).unwrap());
        let json = serde_json::to_value(&b).unwrap();
        assert_eq!(json["precision"], 128);
        let back: BigScalar = serde_json::from_value(json).unwrap();
        assert!(approx_equal(&back, &b, &Tolerance::absolute(1e-37)).unwrap());
    }

    #[test]
    fn negligible_threshold_scales_with_precision() {
        let p = Precision::DEFAULT;
        assert!(BigScalar::parse_real("1e-45", p).unwrap().is_negligible());
        assert!(!BigScalar::parse_real("1e-30", p).unwrap().is_negligible());
    }

    #[test]
    fn round_trip_error_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for bits in [64u32, 100, 256] {
            let p = Precision::new(bits).unwrap();
            for _ in 0..200 {
                let v = ExactScalar::random_nonzero(&mut rng, 1_000_000);
                let f = BigScalar::from_exact(&v, p);
                let exact_back = f.re().to_rational().unwrap();
                let err = Rational::from(&exact_back - v.as_rational()).abs();
                // |err| <= 2^(1-p) |v|
                let bound = v.as_rational().clone().abs() / Rational::from(Integer::from(1) << (bits - 1));
                assert!(err <= bound, "bits={bits} v={v}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn exact() -> impl Strategy<Value = ExactScalar> {
            (-1_000_000i64..=1_000_000, 1i64..=1_000_000).prop_map(|(n, d)| ExactScalar::new(n, d).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10_000))]

            #[test]
            fn ring_axioms(a in exact(), b in exact(), c in exact()) {
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a + &b, &b + &a);
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert!(*(&a - &a).denom() == 1);
            }
        }

        proptest! {
            #[test]
            fn display_parse_round_trip(a in exact()) {
                let s = a.to_string();
                prop_assert_eq!(s.parse::<ExactScalar>().unwrap(), a);
            }
        }
    }
}
