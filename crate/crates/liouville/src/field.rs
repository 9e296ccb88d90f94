//! Field abstraction shared by the univariate polynomial and rational
//! function machinery. Implemented by [`Rat`](crate::rat::Rat) and by
//! rational-function fields built from it.

use crate::rat::Rat;
use std::fmt::Debug;

pub trait Field: Clone + PartialEq + Eq + PartialOrd + Ord + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self) -> Self;
    fn from_rat(r: &Rat) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv())
    }
}

impl Field for Rat {
    fn zero() -> Self {
        Rat::zero()
    }

    fn one() -> Self {
        Rat::one()
    }

    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        Rat::add(self, rhs)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Rat::sub(self, rhs)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Rat::mul(self, rhs)
    }

    fn neg(&self) -> Self {
        Rat::neg(self)
    }

    fn inv(&self) -> Self {
        Rat::recip(self)
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}
