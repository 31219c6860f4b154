//! Exact arithmetic in Z localized at 2: rationals whose reduced denominator
//! is odd. This is the coefficient substrate for the whole engine; nothing
//! here is ever floating point.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A rational number with odd positive denominator, reduced, with zero
/// represented uniquely as 0/1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Local2Rational {
    num: BigInt,
    den: BigInt,
}

impl Local2Rational {
    /// Reduce n/d and check that the result is 2-local. The only failure mode
    /// is a reduced denominator that is still even.
    pub fn normalize(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let mut n: BigInt = n.into();
        let mut d: BigInt = d.into();
        assert!(!d.is_zero(), "denominator must be nonzero");
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        if n.is_zero() {
            return Ok(Self::zero());
        }
        let g = n.gcd(&d);
        n /= &g;
        d /= &g;
        if d.is_even() {
            return Err(Error::NotTwoLocal(d.to_string()));
        }
        Ok(Local2Rational { num: n, den: d })
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Local2Rational { num: n.into(), den: BigInt::one() }
    }

    pub fn zero() -> Self {
        Local2Rational { num: BigInt::zero(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// 2-adic valuation of the value; `None` stands for +infinity (the zero).
    pub fn val2(&self) -> Option<u64> {
        if self.num.is_zero() {
            return None;
        }
        let mut v = 0u64;
        let mut n = self.num.clone();
        while n.is_even() {
            n /= 2;
            v += 1;
        }
        Some(v)
    }

    /// True iff the value is a unit of Z_(2), i.e. odd numerator.
    pub fn is_odd_unit(&self) -> bool {
        self.val2() == Some(0)
    }

    /// The value divided by its odd unit part: 2^val2 with sign. Used by the
    /// Smith-normal-form consumer, which only cares about 2-divisibility.
    pub fn two_power_part(&self) -> Option<BigInt> {
        self.val2().map(|v| {
            let p = BigInt::one() << v;
            if self.num.is_negative() { -p } else { p }
        })
    }

    fn reduced(num: BigInt, den: BigInt) -> Self {
        // den odd by construction in all internal call sites
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        Local2Rational { num: num / &g, den: den / g }
    }
}

impl Add for &Local2Rational {
    type Output = Local2Rational;
    fn add(self, rhs: &Local2Rational) -> Local2Rational {
        Local2Rational::reduced(&self.num * &rhs.den + &rhs.num * &self.den, &self.den * &rhs.den)
    }
}

impl Sub for &Local2Rational {
    type Output = Local2Rational;
    fn sub(self, rhs: &Local2Rational) -> Local2Rational {
        Local2Rational::reduced(&self.num * &rhs.den - &rhs.num * &self.den, &self.den * &rhs.den)
    }
}

impl Mul for &Local2Rational {
    type Output = Local2Rational;
    fn mul(self, rhs: &Local2Rational) -> Local2Rational {
        Local2Rational::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &Local2Rational {
    type Output = Local2Rational;
    fn neg(self) -> Local2Rational {
        Local2Rational { num: -&self.num, den: self.den.clone() }
    }
}

impl Add for Local2Rational {
    type Output = Local2Rational;
    fn add(self, rhs: Local2Rational) -> Local2Rational {
        &self + &rhs
    }
}

impl Sub for Local2Rational {
    type Output = Local2Rational;
    fn sub(self, rhs: Local2Rational) -> Local2Rational {
        &self - &rhs
    }
}

impl Mul for Local2Rational {
    type Output = Local2Rational;
    fn mul(self, rhs: Local2Rational) -> Local2Rational {
        &self * &rhs
    }
}

impl Neg for Local2Rational {
    type Output = Local2Rational;
    fn neg(self) -> Local2Rational {
        -&self
    }
}

impl AddAssign<&Local2Rational> for Local2Rational {
    fn add_assign(&mut self, rhs: &Local2Rational) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Local2Rational> for Local2Rational {
    fn sub_assign(&mut self, rhs: &Local2Rational) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Local2Rational> for Local2Rational {
    fn mul_assign(&mut self, rhs: &Local2Rational) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for Local2Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Local2Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Local2Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|_| Error::Usage(format!("bad rational: {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Local2Rational::normalize(parse(n)?, parse(d)?),
            None => Ok(Local2Rational::from_integer(parse(s)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Local2Rational {
        Local2Rational::normalize(n, d).unwrap()
    }

    #[test]
    fn normalize_reduces() {
        assert_eq!(q(6, 14), q(3, 7));
        assert_eq!(q(2, 7).to_string(), "2/7");
        assert_eq!(q(-4, -6), q(2, 3));
        assert_eq!(q(0, 5), Local2Rational::zero());
    }

    #[test]
    fn normalize_rejects_even_denominator() {
        assert!(matches!(Local2Rational::normalize(1, 2), Err(Error::NotTwoLocal(_))));
        assert!(matches!(Local2Rational::normalize(3, 12), Err(Error::NotTwoLocal(_))));
        // 2-adic valuation of d may not exceed that of n
        assert!(Local2Rational::normalize(4, 6).is_ok());
    }

    #[test]
    fn val2_examples() {
        assert_eq!(q(12, 7).val2(), Some(2));
        assert_eq!(q(3, 5).val2(), Some(0));
        assert_eq!(Local2Rational::zero().val2(), None);
    }

    #[test]
    fn display_roundtrip() {
        for s in ["3/7", "-12", "0", "25/11"] {
            let v: Local2Rational = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
    }

    fn arb_local2() -> impl Strategy<Value = Local2Rational> {
        (any::<i32>(), any::<u16>()).prop_map(|(n, d)| q(n as i64, 2 * d as i64 + 1))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_local2(), b in arb_local2(), c in arb_local2()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn val2_laws(a in arb_local2(), b in arb_local2()) {
            let prod = &a * &b;
            match (a.val2(), b.val2()) {
                (Some(x), Some(y)) => prop_assert_eq!(prod.val2(), Some(x + y)),
                _ => prop_assert_eq!(prod.val2(), None),
            }
            let sum = &a + &b;
            if let (Some(x), Some(y), Some(s)) = (a.val2(), b.val2(), sum.val2()) {
                prop_assert!(s >= x.min(y));
            }
        }

        #[test]
        fn normalize_idempotent(a in arb_local2()) {
            let again = Local2Rational::normalize(a.numerator().clone(), a.denominator().clone()).unwrap();
            prop_assert_eq!(a, again);
        }

        #[test]
        fn parse_roundtrip(a in arb_local2()) {
            let s = a.to_string();
            let back: Local2Rational = s.parse().unwrap();
            prop_assert_eq!(a, back);
        }
    }
}
