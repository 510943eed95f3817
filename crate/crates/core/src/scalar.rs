//! The coefficient field abstraction.
//!
//! Every structure in the crate is generic over an exact field of
//! characteristic zero. The bound is expressed through `num-traits` so that
//! any `num_rational::Ratio<T>` over a signed integer type works out of the
//! box. Floating point types are deliberately not implemented: homology
//! dimensions are ranks, and ranks are not stable under rounding.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, NumAssign, Signed};

/// An exact field of characteristic zero.
pub trait Scalar: Num + NumAssign + Signed + Clone + Debug + Display + Eq + Hash + Send + Sync + 'static {
    /// Embeds a machine integer.
    fn from_int(n: i64) -> Self;

    /// `self += a * b` without cloning the operands.
    fn add_product(&mut self, a: &Self, b: &Self);

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    /// Parses `"p/q"` or `"p"`; the result is reduced.
    fn parse_rational(s: &str) -> Option<Self>;

    fn half() -> Self {
        Self::one() / Self::from_int(2)
    }

    /// `(-1)^k` as a field element.
    fn sign(k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            Self::one()
        } else {
            -Self::one()
        }
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone + Integer + NumAssign + Signed + From<i64> + FromStr + Display + Debug + Hash + Send + Sync + 'static,
{
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(T::from(n))
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn parse_rational(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: T = p.trim().parse().ok()?;
                let q: T = q.trim().parse().ok()?;
                if q.is_zero() {
                    return None;
                }
                Some(Ratio::new(p, q))
            }
            None => Some(Ratio::from_integer(s.parse().ok()?)),
        }
    }
}

/// Parity of an integer degree, `0` or `1`.
#[inline]
pub fn parity(n: i32) -> i64 {
    n.rem_euclid(2) as i64
}

/// `(-1)^(a*b)` as `+1`/`-1`.
#[inline]
pub fn koszul(a: i32, b: i32) -> i64 {
    if parity(a) * parity(b) == 1 {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::{BigRational, Rational64};

    #[test]
    fn parses_reduced_fractions() {
        let q = BigRational::parse_rational("6/-4").unwrap();
        assert_eq!(q, BigRational::parse_rational("-3/2").unwrap());
        assert_eq!(Rational64::parse_rational(" 7 ").unwrap(), Rational64::from_int(7));
        assert!(BigRational::parse_rational("1/0").is_none());
        assert!(BigRational::parse_rational("x").is_none());
    }

    #[test]
    fn signs() {
        assert_eq!(Rational64::sign(3), -Rational64::from_int(1));
        assert_eq!(Rational64::sign(-2), Rational64::from_int(1));
        assert_eq!(koszul(1, 3), -1);
        assert_eq!(koszul(1, 2), 1);
        assert_eq!(koszul(-1, -1), -1);
    }
}
