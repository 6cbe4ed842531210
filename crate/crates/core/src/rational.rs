//! Exact rationals with a machine-word fast path.
//!
//! Values whose reduced numerator and denominator fit in `i64` are stored inline and combined
//! with checked arithmetic; anything larger, or any overflowing operation, falls back to
//! arbitrary-precision rationals. The representation is canonical, so structural equality and
//! hashing agree with numeric equality.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(Ratio<i64>),
    Big(BigRational),
}

impl Rational {
    /// `numer / denom`, reduced.
    ///
    /// # Panics
    /// If `denom` is zero.
    pub fn new(numer: BigInt, denom: BigInt) -> Self {
        Self::from_big(BigRational::new(numer, denom))
    }

    /// The integer `n`.
    pub fn from_integer(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    /// `numer / denom` from machine integers.
    ///
    /// # Panics
    /// If `denom` is zero.
    pub fn from_i64s(numer: i64, denom: i64) -> Self {
        Self::new(numer.into(), denom.into())
    }

    /// Converts from an arbitrary-precision rational.
    pub fn from_big(q: BigRational) -> Self {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Rational(Repr::Small(Ratio::new_raw(n, d))),
            _ => Rational(Repr::Big(q)),
        }
    }

    /// The value as an arbitrary-precision rational.
    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => BigRational::new_raw((*r.numer()).into(), (*r.denom()).into()),
            Repr::Big(b) => b.clone(),
        }
    }

    /// Numerator of the reduced form; the denominator is positive.
    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => (*r.numer()).into(),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    /// Positive denominator of the reduced form.
    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => (*r.denom()).into(),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_integer(),
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_positive(),
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_negative(),
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse.
    ///
    /// # Panics
    /// If the value is zero.
    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small(r) => Rational(Repr::Small(r.recip())),
            Repr::Big(b) => Self::from_big(b.recip()),
        }
    }

    fn small(r: Ratio<i64>) -> Option<Self> {
        if *r.numer() == i64::MIN {
            None
        } else {
            Some(Rational(Repr::Small(r)))
        }
    }

    fn binary(
        &self,
        other: &Self,
        fast: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        slow: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if let Some(r) = fast(a, b).and_then(Self::small) {
                return r;
            }
        }
        Self::from_big(slow(self.to_big(), other.to_big()))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(Repr::Small(Ratio::new_raw(0, 1)))
    }

    fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() == 0,
            Repr::Big(_) => false,
        }
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(Repr::Small(Ratio::new_raw(1, 1)))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n.into())
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(q: BigRational) -> Self {
        Self::from_big(q)
    }
}

impl FromStr for Rational {
    type Err = num_rational::ParseRatioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BigRational::from_str(s).map(Self::from_big)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl ToPrimitive for Rational {
    fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(r) => r.to_i64(),
            Repr::Big(b) => b.to_i64(),
        }
    }

    fn to_u64(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(r) => r.to_u64(),
            Repr::Big(b) => b.to_u64(),
        }
    }

    fn to_f64(&self) -> Option<f64> {
        match &self.0 {
            Repr::Small(r) => r.to_f64(),
            Repr::Big(b) => b.to_f64(),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(r) => fmt::Display::fmt(r, f),
            Repr::Big(b) => fmt::Display::fmt(b, f),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Neg for &Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(r) => Rational(Repr::Small(-r)),
            Repr::Big(b) => Rational::from_big(-b),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $checked:ident, $op:tt) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;

            fn $m(self, rhs: &Rational) -> Rational {
                self.binary(rhs, |a, b| a.$checked(b), |a, b| a $op b)
            }
        }

        impl $tr<Rational> for &Rational {
            type Output = Rational;

            fn $m(self, rhs: Rational) -> Rational {
                self $op &rhs
            }
        }

        impl $tr<&Rational> for Rational {
            type Output = Rational;

            fn $m(self, rhs: &Rational) -> Rational {
                &self $op rhs
            }
        }

        impl $tr<Rational> for Rational {
            type Output = Rational;

            fn $m(self, rhs: Rational) -> Rational {
                &self $op &rhs
            }
        }

        impl $atr<&Rational> for Rational {
            fn $am(&mut self, rhs: &Rational) {
                *self = &*self $op rhs;
            }
        }

        impl $atr<Rational> for Rational {
            fn $am(&mut self, rhs: Rational) {
                *self = &*self $op &rhs;
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, checked_add, +);
binop!(Sub, sub, SubAssign, sub_assign, checked_sub, -);
binop!(Mul, mul, MulAssign, mul_assign, checked_mul, *);
binop!(Div, div, DivAssign, div_assign, checked_div, /);
