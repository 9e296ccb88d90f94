//! Quotients of bivariate polynomials in lowest terms.

use crate::coef::Coef;
use crate::poly::MPoly;
use crate::rat::Rat;
use crate::upoly::{UniPoly, URat};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("value depends on the named parameter")]
    Param,
}

/// Invariants: `den` nonzero, `gcd(num, den)` constant, `den`
/// primitive-positive normalized (the scale lives in `num`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl RatFunc {
    pub fn new(num: MPoly, den: MPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc {
                num: MPoly::zero(),
                den: MPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g).expect("gcd divides");
        let den = den.exact_div(&g).expect("gcd divides");
        let (den_norm, unit) = den.normalized_with_unit();
        RatFunc {
            num: num.mul_coef(&unit.inv()),
            den: den_norm,
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: MPoly::zero(),
            den: MPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(MPoly::one())
    }

    pub fn from_poly(p: MPoly) -> Self {
        RatFunc {
            num: p,
            den: MPoly::one(),
        }
    }

    pub fn from_rat(r: &Rat) -> Self {
        RatFunc::from_poly(MPoly::from_rat(r))
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<Coef> {
        if self.is_constant() {
            let d = self.den.as_constant().unwrap();
            Some(self.num.as_constant().unwrap().div(&d))
        } else {
            None
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        RatFunc::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        RatFunc::new(
            self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        RatFunc::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RatFunc::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, p: &MPoly) -> Self {
        RatFunc::new(self.num.mul(p), self.den.clone())
    }

    pub fn deriv_x(&self) -> Self {
        RatFunc::new(
            self.num.deriv_x().mul(&self.den).sub(&self.num.mul(&self.den.deriv_x())),
            self.den.mul(&self.den),
        )
    }

    pub fn deriv_y(&self) -> Self {
        RatFunc::new(
            self.num.deriv_y().mul(&self.den).sub(&self.num.mul(&self.den.deriv_y())),
            self.den.mul(&self.den),
        )
    }

    pub fn is_x_free(&self) -> bool {
        self.num.deg_x() == 0 && self.den.deg_x() == 0
    }

    pub fn is_y_free(&self) -> bool {
        self.num.deg_y() == 0 && self.den.deg_y() == 0
    }

    /// Exact evaluation over the coefficient field; `None` at a pole.
    pub fn eval_coef(&self, x: &Coef, y: &Coef) -> Option<Coef> {
        let d = self.den.eval(x, y);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x, y).div(&d))
        }
    }

    /// Exact rational evaluation at a rational point.
    pub fn eval_rat(&self, x: &Rat, y: &Rat) -> Result<Rat, EvalError> {
        let v = self
            .eval_coef(&Coef::from_rat_value(x), &Coef::from_rat_value(y))
            .ok_or(EvalError::Pole)?;
        v.as_rat().ok_or(EvalError::Param)
    }

    /// Univariate view in `x` when `y` does not occur.
    pub fn as_urat_x(&self) -> Option<URat<Coef>> {
        if !self.is_y_free() {
            return None;
        }
        Some(URat::new(
            self.num.as_upoly_x().unwrap(),
            self.den.as_upoly_x().unwrap(),
        ))
    }

    pub fn as_urat_y(&self) -> Option<URat<Coef>> {
        if !self.is_x_free() {
            return None;
        }
        Some(URat::new(
            self.num.as_upoly_y().unwrap(),
            self.den.as_upoly_y().unwrap(),
        ))
    }

    pub fn from_urat_x(f: &URat<Coef>) -> Self {
        RatFunc::new(
            MPoly::from_upoly_x(f.num()),
            MPoly::from_upoly_x(f.den()),
        )
    }

    pub fn from_urat_y(f: &URat<Coef>) -> Self {
        RatFunc::new(
            MPoly::from_upoly_y(f.num()),
            MPoly::from_upoly_y(f.den()),
        )
    }
}

/// Spec-level evaluation helper for bare polynomials.
pub fn eval_poly_at(p: &MPoly, x: &Rat, y: &Rat) -> Result<Rat, EvalError> {
    p.eval(&Coef::from_rat_value(x), &Coef::from_rat_value(y))
        .as_rat()
        .ok_or(EvalError::Param)
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            crate::render::ratfunc_str(self, crate::render::Style::Plain, None)
        )
    }
}

// keep UniPoly in the public signature surface of this module
pub type UniPolyCoef = UniPoly<Coef>;

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MPoly {
        MPoly::var_x()
    }

    fn y() -> MPoly {
        MPoly::var_y()
    }

    #[test]
    fn reduction_and_den_normalization() {
        // (2x^2 - 2) / (4x - 4) = (x + 1)/2
        let num = x().pow(2).mul(&MPoly::from_int(2)).sub(&MPoly::from_int(2));
        let den = x().mul(&MPoly::from_int(4)).sub(&MPoly::from_int(4));
        let f = RatFunc::new(num, den);
        assert!(f.is_polynomial());
        assert_eq!(
            f.num(),
            &x().add(&MPoly::from_int(1)).mul_rat(&Rat::new(1, 2))
        );
    }

    #[test]
    fn eval_examples() {
        // x^2 + y at (2, 3) = 7
        let f = RatFunc::from_poly(x().pow(2).add(&y()));
        assert_eq!(f.eval_rat(&Rat::from_int(2), &Rat::from_int(3)), Ok(Rat::from_int(7)));
        // x/y at (1, 0) is a pole
        let g = RatFunc::new(x(), y());
        assert_eq!(g.eval_rat(&Rat::from_int(1), &Rat::zero()), Err(EvalError::Pole));
        // x^3 + 1 at (1, 5) = 2
        let h = RatFunc::from_poly(x().pow(3).add(&MPoly::from_int(1)));
        assert_eq!(h.eval_rat(&Rat::from_int(1), &Rat::from_int(5)), Ok(Rat::from_int(2)));
    }

    #[test]
    fn derivative_quotient_rule() {
        // d/dx (x/y) = 1/y
        let f = RatFunc::new(x(), y());
        assert_eq!(f.deriv_x(), RatFunc::new(MPoly::one(), y()));
        // d/dy (x/y) = -x/y^2
        assert_eq!(f.deriv_y(), RatFunc::new(x().neg(), y().pow(2)));
    }
}
