//! Exact scalars: arbitrary-precision rationals and elements `a + b*sqrt(m)`
//! of a real quadratic field, plus complex pairs of those.
//!
//! A [`QuadScalar`] carries its field tag `m` only while its irrational part
//! is nonzero, so equality is structural. Two scalars with distinct nonzero
//! tags cannot be combined; every computation in this crate works inside a
//! single field `Q(sqrt(m))`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot mix sqrt({0}) and sqrt({1}) in one computation")]
    FieldMismatch(u64, u64),
    #[error("field tag {0} is not square-free")]
    NotSquareFree(u64),
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn is_square_free(m: u64) -> bool {
    if m == 0 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= m {
        if m.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Splits `n > 0` as `k^2 * m` with `m` square-free.
pub fn square_free_decompose(n: u64) -> (u64, u64) {
    assert!(n > 0, "square_free_decompose needs a positive integer");
    let mut rest = n;
    let mut k = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        while rest.is_multiple_of(p * p) {
            rest /= p * p;
            k *= p;
        }
        p += 1;
    }
    (k, rest)
}

fn fmt_rational(x: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if x.denom().is_one() {
        write!(f, "{}", x.numer())
    } else {
        write!(f, "{}/{}", x.numer(), x.denom())
    }
}

pub fn rational_to_string(x: &Rational) -> String {
    struct R<'a>(&'a Rational);
    impl fmt::Display for R<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            fmt_rational(self.0, f)
        }
    }
    R(x).to_string()
}

/// `a + b*sqrt(m)` with `a, b` rational and `m` square-free; `b = 0` forces `m = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadScalar {
    a: Rational,
    b: Rational,
    m: u64,
}

impl QuadScalar {
    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    pub fn rational(a: Rational) -> Self {
        QuadScalar {
            a,
            b: Rational::zero(),
            m: 0,
        }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(rat_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(rat(n, d))
    }

    /// Builds `a + b*sqrt(m)`. Tags 0 and 1 fold into the rational part.
    pub fn new(a: Rational, b: Rational, m: u64) -> Result<Self, ArithError> {
        match m {
            0 => Ok(Self::rational(a)),
            1 => Ok(Self::rational(a + b)),
            _ if !is_square_free(m) => Err(ArithError::NotSquareFree(m)),
            _ => Ok(Self::canonical(a, b, m)),
        }
    }

    fn canonical(a: Rational, b: Rational, m: u64) -> Self {
        if b.is_zero() {
            Self::rational(a)
        } else {
            QuadScalar { a, b, m }
        }
    }

    /// Exact square root of a nonnegative integer, `k*sqrt(m)`.
    pub fn sqrt_of(n: &BigInt) -> Option<Self> {
        if n.is_negative() {
            return None;
        }
        if n.is_zero() {
            return Some(Self::zero());
        }
        let n = n.to_u64()?;
        let (k, m) = square_free_decompose(n);
        if m == 1 {
            Some(Self::rational(rat_int(k)))
        } else {
            Some(Self::canonical(Rational::zero(), rat_int(k), m))
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn irrational_part(&self) -> &Rational {
        &self.b
    }

    /// Field tag: 0 when the value is rational.
    pub fn field(&self) -> u64 {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.a.is_integer()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.a.to_integer())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn conj(&self) -> Self {
        Self::canonical(self.a.clone(), -self.b.clone(), self.m)
    }

    /// Field norm `a^2 - m*b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * rat_int(self.m)
    }

    fn join_field(&self, other: &Self) -> Result<u64, ArithError> {
        match (self.m, other.m) {
            (0, m) | (m, 0) => Ok(m),
            (m1, m2) if m1 == m2 => Ok(m1),
            (m1, m2) => Err(ArithError::FieldMismatch(m1, m2)),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ArithError> {
        let m = self.join_field(other)?;
        Ok(Self::canonical(&self.a + &other.a, &self.b + &other.b, m))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ArithError> {
        let m = self.join_field(other)?;
        Ok(Self::canonical(&self.a - &other.a, &self.b - &other.b, m))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ArithError> {
        let m = self.join_field(other)?;
        let a = &self.a * &other.a + &self.b * &other.b * rat_int(m);
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::canonical(a, b, m))
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::canonical(&self.a / &n, -&self.b / &n, self.m))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ArithError> {
        self.join_field(other)?;
        self.try_mul(&other.recip()?)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::canonical(&self.a * k, &self.b * k, self.m)
    }

    /// Exact sign of the real number `a + b*sqrt(m)`.
    pub fn sign(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal || sa == sb {
            return if sa == Ordering::Equal { sb } else { sa };
        }
        if sa == Ordering::Equal {
            return sb;
        }
        // opposite signs: the larger square wins; equality needs m a perfect square
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * rat_int(self.m);
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    pub fn signum(&self) -> i8 {
        match self.sign() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        a + self.b.to_f64().unwrap_or(f64::NAN) * (self.m as f64).sqrt()
    }

    pub fn pow2(&self) -> Self {
        self * self
    }
}

/// Entry point mirroring the four field operations with explicit errors.
pub fn qs_arith(x: &QuadScalar, y: &QuadScalar, op: ArithOp) -> Result<QuadScalar, ArithError> {
    match op {
        ArithOp::Add => x.try_add(y),
        ArithOp::Sub => x.try_sub(y),
        ArithOp::Mul => x.try_mul(y),
        ArithOp::Div => x.try_div(y),
    }
}

pub fn qs_sign(x: &QuadScalar) -> i8 {
    x.signum()
}

impl PartialOrd for QuadScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_sub(other).ok().map(|d| d.sign())
    }
}

impl From<i64> for QuadScalar {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

impl From<BigInt> for QuadScalar {
    fn from(n: BigInt) -> Self {
        Self::rational(Rational::from_integer(n))
    }
}

impl From<&BigInt> for QuadScalar {
    fn from(n: &BigInt) -> Self {
        Self::rational(Rational::from_integer(n.clone()))
    }
}

impl From<Rational> for QuadScalar {
    fn from(a: Rational) -> Self {
        Self::rational(a)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&QuadScalar> for &QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: &QuadScalar) -> QuadScalar {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $tr<QuadScalar> for QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: QuadScalar) -> QuadScalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&QuadScalar> for QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: &QuadScalar) -> QuadScalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<QuadScalar> for &QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: QuadScalar) -> QuadScalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for &QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar::canonical(-self.a.clone(), -self.b.clone(), self.m)
    }
}

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        -&self
    }
}

impl std::iter::Sum for QuadScalar {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(QuadScalar::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(&self.a, f)?;
        if self.b.is_zero() {
            return Ok(());
        }
        if self.b.is_negative() {
            f.write_str(" - ")?;
            fmt_rational(&-self.b.clone(), f)?;
        } else {
            f.write_str(" + ")?;
            fmt_rational(&self.b, f)?;
        }
        write!(f, "*sqrt({})", self.m)
    }
}

fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let t = s.trim();
    Rational::from_str(t).map_err(|_| ArithError::Parse(s.to_string()))
}

impl FromStr for QuadScalar {
    type Err = ArithError;

    /// Accepts `"3/2"`, `"3/2 + 1*sqrt(2)"`, `"1 - 2*sqrt(5)"`, `"-sqrt(3)"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(k) = compact.find("sqrt(") else {
            return parse_rational(&compact).map(Self::rational);
        };
        let tail = &compact[k + 5..];
        let close = tail.find(')').ok_or_else(bad)?;
        if close + 1 != tail.len() {
            return Err(bad());
        }
        let m: u64 = tail[..close].parse().map_err(|_| bad())?;
        let mut prefix = &compact[..k];
        if let Some(p) = prefix.strip_suffix('*') {
            prefix = p;
        }
        let split = prefix
            .char_indices()
            .rev()
            .find(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i);
        let (a_txt, b_txt) = match split {
            Some(i) => (&prefix[..i], &prefix[i..]),
            None => ("0", prefix),
        };
        let b_txt = b_txt.strip_prefix('+').unwrap_or(b_txt);
        let b = match b_txt {
            "" => Rational::one(),
            "-" => -Rational::one(),
            t => parse_rational(t)?,
        };
        let a = parse_rational(a_txt)?;
        if m == 0 {
            return Err(bad());
        }
        let (sq, free) = square_free_decompose(m);
        Self::new(a, b * rat_int(sq), free)
    }
}

impl Serialize for QuadScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(n) => Ok(QuadScalar::int(n)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `re + i*im` with both parts in the same real quadratic field.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct QuadComplex {
    pub re: QuadScalar,
    pub im: QuadScalar,
}

impl QuadComplex {
    pub fn new(re: QuadScalar, im: QuadScalar) -> Self {
        QuadComplex { re, im }
    }

    pub fn zero() -> Self {
        Self::real(QuadScalar::zero())
    }

    pub fn one() -> Self {
        Self::real(QuadScalar::one())
    }

    pub fn i() -> Self {
        QuadComplex::new(QuadScalar::zero(), QuadScalar::one())
    }

    pub fn real(re: QuadScalar) -> Self {
        QuadComplex::new(re, QuadScalar::zero())
    }

    pub fn imaginary(im: QuadScalar) -> Self {
        QuadComplex::new(QuadScalar::zero(), im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadComplex::new(self.re.clone(), -&self.im)
    }

    /// `|z|^2`, a nonnegative element of the real field.
    pub fn abs_sq(&self) -> QuadScalar {
        self.re.pow2() + self.im.pow2()
    }

    pub fn scale(&self, k: &QuadScalar) -> Self {
        QuadComplex::new(&self.re * k, &self.im * k)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ArithError> {
        let den = other.abs_sq();
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let num = self * &other.conj();
        Ok(QuadComplex::new(num.re.try_div(&den)?, num.im.try_div(&den)?))
    }

    pub fn field(&self) -> u64 {
        self.re.field().max(self.im.field())
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl From<QuadScalar> for QuadComplex {
    fn from(x: QuadScalar) -> Self {
        QuadComplex::real(x)
    }
}

impl Add<&QuadComplex> for &QuadComplex {
    type Output = QuadComplex;
    fn add(self, rhs: &QuadComplex) -> QuadComplex {
        QuadComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&QuadComplex> for &QuadComplex {
    type Output = QuadComplex;
    fn sub(self, rhs: &QuadComplex) -> QuadComplex {
        QuadComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&QuadComplex> for &QuadComplex {
    type Output = QuadComplex;
    fn mul(self, rhs: &QuadComplex) -> QuadComplex {
        QuadComplex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div<&QuadComplex> for &QuadComplex {
    type Output = QuadComplex;
    fn div(self, rhs: &QuadComplex) -> QuadComplex {
        match self.try_div(rhs) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }
}

impl Neg for &QuadComplex {
    type Output = QuadComplex;
    fn neg(self) -> QuadComplex {
        QuadComplex::new(-&self.re, -&self.im)
    }
}

macro_rules! forward_owned_complex {
    ($tr:ident, $method:ident) => {
        impl $tr<QuadComplex> for QuadComplex {
            type Output = QuadComplex;
            fn $method(self, rhs: QuadComplex) -> QuadComplex {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&QuadComplex> for QuadComplex {
            type Output = QuadComplex;
            fn $method(self, rhs: &QuadComplex) -> QuadComplex {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_complex!(Add, add);
forward_owned_complex!(Sub, sub);
forward_owned_complex!(Mul, mul);
forward_owned_complex!(Div, div);

impl Neg for QuadComplex {
    type Output = QuadComplex;
    fn neg(self) -> QuadComplex {
        -&self
    }
}

impl fmt::Display for QuadComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.re)?;
        if !self.im.is_rational() {
            return write!(f, " + ({})i", self.im);
        }
        if self.im.is_negative() {
            write!(f, " - {}i", -&self.im)
        } else {
            write!(f, " + {}i", self.im)
        }
    }
}

/// Ceil of a rational, as a `BigInt`.
pub fn ceil(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Floor of a rational, as a `BigInt`.
pub fn floor(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

/// Nearest integer, ties rounded up.
pub fn round_half_up(x: &Rational) -> BigInt {
    (x + rat(1, 2)).floor().to_integer()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
