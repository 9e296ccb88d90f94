//! Arbitrary-precision rational numbers.
//!
//! Thin wrapper over `num::BigRational` pinning the representation the
//! rest of the crate relies on: always reduced, denominator positive,
//! zero stored as `0/1`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n/d`, reduced. Panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_bigs(n: BigInt, d: BigInt) -> Self {
        Rat(BigRational::new(n, d))
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Rat(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Rat(&self.0 - &rhs.0)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Rat(&self.0 * &rhs.0)
    }

    /// Panics on division by zero.
    pub fn div(&self, rhs: &Self) -> Self {
        Rat(&self.0 / &rhs.0)
    }

    pub fn neg(&self) -> Self {
        Rat(-self.0.clone())
    }

    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }

    pub fn pow(&self, exp: i32) -> Self {
        use num::traits::Pow;
        Rat(Pow::pow(&self.0, exp))
    }

    /// Integer value if the denominator is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.0.is_integer() {
            Some(self.0.to_integer())
        } else {
            None
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_and_sign_normalized() {
        let r = Rat::new(4, -6);
        assert_eq!(r, Rat::new(-2, 3));
        assert_eq!(r.to_string(), "-2/3");
        assert!(r.denom() > &BigInt::from(0));
    }

    #[test]
    fn zero_is_canonical() {
        let z = Rat::new(0, 7);
        assert!(z.is_zero());
        assert_eq!(z.denom(), &BigInt::from(1));
    }

    #[test]
    fn arithmetic() {
        let a = Rat::new(1, 2);
        let b = Rat::new(1, 3);
        assert_eq!(a.add(&b), Rat::new(5, 6));
        assert_eq!(a.sub(&b), Rat::new(1, 6));
        assert_eq!(a.mul(&b), Rat::new(1, 6));
        assert_eq!(a.div(&b), Rat::new(3, 2));
        assert_eq!(a.pow(-2), Rat::from_int(4));
    }
}
