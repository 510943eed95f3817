//! An exact rational that stays inline while numerator and denominator are small.
//!
//! Values whose reduced numerator and denominator fit below `2^62` are kept
//! as a `Ratio<i64>`; everything else is a heap allocated `BigRational`. The
//! representation is canonical, so derived equality and hashing are sound.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Num, One, Signed, ToPrimitive, Zero};

use crate::scalar::Scalar;

const BOUND: i64 = 1 << 62;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(Ratio<i64>),
    Big(Box<BigRational>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

fn fits(r: &Ratio<i64>) -> bool {
    r.numer().unsigned_abs() < BOUND as u64 && *r.denom() < BOUND
}

impl Rational {
    fn small(r: Ratio<i64>) -> Self {
        if fits(&r) {
            Rational(Repr::Small(r))
        } else {
            Rational(Repr::Big(Box::new(to_big(&r))))
        }
    }

    fn big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            let s = Ratio::new_raw(n, d);
            if fits(&s) {
                return Rational(Repr::Small(s));
            }
        }
        Rational(Repr::Big(Box::new(r)))
    }

    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational::big(BigRational::new(numer.into(), denom.into()))
    }

    pub fn to_big_rational(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => to_big(r),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        self.to_big_rational().numer().clone()
    }

    pub fn denom(&self) -> BigInt {
        self.to_big_rational().denom().clone()
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_integer(),
            Repr::Big(b) => b.is_integer(),
        }
    }
}

fn to_big(r: &Ratio<i64>) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::small(Ratio::from_integer(n))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational::big(r)
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

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => (i128::from(*a.numer()) * i128::from(*b.denom()))
                .cmp(&(i128::from(*b.numer()) * i128::from(*a.denom()))),
            _ => self.to_big_rational().cmp(&other.to_big_rational()),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident, $atr:ident, $amethod:ident) => {
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;

            fn $method(self, rhs: &'a Rational) -> Rational {
                if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
                    if let Some(r) = a.$checked(b) {
                        return Rational::small(r);
                    }
                }
                Rational::big(self.to_big_rational().$method(rhs.to_big_rational()))
            }
        }

        impl $tr for Rational {
            type Output = Rational;

            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }

        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;

            fn $method(self, rhs: &'a Rational) -> Rational {
                (&self).$method(rhs)
            }
        }

        impl $atr for Rational {
            fn $amethod(&mut self, rhs: Rational) {
                *self = (&*self).$method(&rhs);
            }
        }

        impl<'a> $atr<&'a Rational> for Rational {
            fn $amethod(&mut self, rhs: &'a Rational) {
                *self = (&*self).$method(rhs);
            }
        }
    };
}

binop!(Add, add, checked_add, AddAssign, add_assign);
binop!(Sub, sub, checked_sub, SubAssign, sub_assign);
binop!(Mul, mul, checked_mul, MulAssign, mul_assign);
binop!(Div, div, checked_div, DivAssign, div_assign);

impl Rem for Rational {
    type Output = Rational;

    fn rem(self, rhs: Rational) -> Rational {
        Rational::big(self.to_big_rational() % rhs.to_big_rational())
    }
}

impl RemAssign for Rational {
    fn rem_assign(&mut self, rhs: Rational) {
        *self = self.clone() % rhs;
    }
}

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        match self.0 {
            Repr::Small(r) => Rational(Repr::Small(-r)),
            Repr::Big(b) => Rational(Repr::Big(Box::new(-*b))),
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        -self.clone()
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(Repr::Small(Ratio::zero()))
    }

    fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Small(r) if r.is_zero())
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(Repr::Small(Ratio::one()))
    }

    fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Small(r) if r.is_one())
    }
}

impl Num for Rational {
    type FromStrRadixErr = num_rational::ParseRatioError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if s.contains('/') {
            BigRational::from_str_radix(s, radix).map(Rational::big)
        } else {
            BigRational::from_str_radix(&format!("{s}/1"), radix).map(Rational::big)
        }
    }
}

impl FromStr for Rational {
    type Err = num_rational::ParseRatioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::from_str_radix(s, 10)
    }
}

impl Signed for Rational {
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Rational::zero()
        } else {
            self - other
        }
    }

    fn signum(&self) -> Self {
        match &self.0 {
            Repr::Small(r) => Rational(Repr::Small(r.signum())),
            Repr::Big(b) => Rational::big(b.signum()),
        }
    }

    fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_positive(),
            Repr::Big(b) => b.is_positive(),
        }
    }

    fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_negative(),
            Repr::Big(b) => b.is_negative(),
        }
    }
}

impl Scalar for Rational {
    fn from_int(n: i64) -> Self {
        Rational::from(n)
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += &(a * b);
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn parse_rational(s: &str) -> Option<Self> {
        BigRational::parse_rational(s).map(Rational::big)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn arithmetic() {
        assert_eq!(r(1, 2) + r(1, 3), r(5, 6));
        assert_eq!(r(1, 2) * r(2, 3), r(1, 3));
        assert_eq!(r(1, 2) / r(1, 4), r(2, 1));
        assert_eq!(-r(3, 4), r(-3, 4));
        assert_eq!(r(6, -4).to_string(), "-3/2");
        assert_eq!(Rational::parse_rational("-3/2"), Some(r(-3, 2)));
        assert!(r(1, 3) < r(1, 2));
    }

    #[test]
    fn promotes_and_demotes() {
        let big = Rational::from(1i64 << 61) * Rational::from(1i64 << 61);
        assert!(matches!(big.0, Repr::Big(_)));
        let back = big / Rational::from(1i64 << 61);
        assert!(matches!(back.0, Repr::Small(_)));
        assert_eq!(back, Rational::from(1i64 << 61));
    }

    proptest! {
        #[test]
        fn agrees_with_big_rationals(a in any::<i64>(), b in 1i64..i64::MAX, c in any::<i64>(), d in 1i64..i64::MAX) {
            let (x, y) = (r(a, b), r(c, d));
            let (bx, by) = (x.to_big_rational(), y.to_big_rational());
            prop_assert_eq!((&x + &y).to_big_rational(), &bx + &by);
            prop_assert_eq!((&x - &y).to_big_rational(), &bx - &by);
            prop_assert_eq!((&x * &y).to_big_rational(), &bx * &by);
            if !y.is_zero() {
                prop_assert_eq!((&x / &y).to_big_rational(), &bx / &by);
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
            prop_assert_eq!(Rational::big(bx.clone()), x);
        }
    }
}
