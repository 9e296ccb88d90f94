//! Normalized first-order ODEs `dy/dx = M/N` and the flow operator
//! `D = N ∂x + M ∂y`.

use crate::coef::Coef;
use crate::poly::MPoly;
use crate::rat::Rat;
use crate::ratfunc::RatFunc;
use crate::upoly::UniPoly;
use num::bigint::BigInt;
use num::{Integer, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OdeError {
    #[error("right-hand side denominator is identically zero")]
    ZeroDenominator,
}

/// `dy/dx = m/n` with `m`, `n` coprime and jointly scaled so that all
/// coefficients are integral (over the parameter, polynomial) with
/// joint content one and the leading coefficient of `n` positive.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Foode {
    m: MPoly,
    n: MPoly,
    param: Option<String>,
}

impl Foode {
    pub fn new(m: MPoly, n: MPoly, param: Option<String>) -> Result<Self, OdeError> {
        if n.is_zero() {
            return Err(OdeError::ZeroDenominator);
        }
        if m.is_zero() {
            let n = n.normalized();
            return Ok(Foode {
                m: MPoly::zero(),
                n,
                param,
            });
        }
        let g = m.gcd(&n);
        let m = m.exact_div(&g).expect("gcd divides");
        let n = n.exact_div(&g).expect("gcd divides");
        let unit = joint_unit(&[&m, &n]);
        let inv = unit.inv();
        let mut m = m.mul_coef(&inv);
        let mut n = n.mul_coef(&inv);
        if n.leading().map(|(_, c)| c.display_negative()).unwrap_or(false) {
            m = m.neg();
            n = n.neg();
        }
        Ok(Foode { m, n, param })
    }

    pub fn from_ratio(rhs: &RatFunc, param: Option<String>) -> Result<Self, OdeError> {
        Foode::new(rhs.num().clone(), rhs.den().clone(), param)
    }

    pub fn m(&self) -> &MPoly {
        &self.m
    }

    pub fn n(&self) -> &MPoly {
        &self.n
    }

    pub fn param(&self) -> Option<&str> {
        self.param.as_deref()
    }

    /// Largest total degree of the two sides.
    pub fn max_degree(&self) -> u32 {
        self.m.total_degree().max(self.n.total_degree())
    }

    /// `D[f] = N f_x + M f_y`.
    pub fn apply_d(&self, f: &MPoly) -> MPoly {
        self.n.mul(&f.deriv_x()).add(&self.m.mul(&f.deriv_y()))
    }

    /// `D` extended to rational functions by the quotient rule.
    pub fn apply_d_ratfunc(&self, f: &RatFunc) -> RatFunc {
        let dn = self.apply_d(f.num());
        let dd = self.apply_d(f.den());
        RatFunc::new(
            dn.mul(f.den()).sub(&f.num().mul(&dd)),
            f.den().mul(f.den()),
        )
    }
}

/// `D[f]` for the flow operator of `eq`.
pub fn d_operator(eq: &Foode, f: &MPoly) -> MPoly {
    eq.apply_d(f)
}

/// Right-hand side of the multiplier identity: `-(N_x + M_y)`.
pub fn divergence_source(eq: &Foode) -> MPoly {
    eq.n().deriv_x().add(&eq.m().deriv_y()).neg()
}

/// Common unit of a tuple of polynomials: dividing every polynomial by
/// it clears parameter denominators, removes the joint parameter
/// content and the joint rational content.
fn joint_unit(parts: &[&MPoly]) -> Coef {
    let mut den_lcm = UniPoly::one();
    for p in parts {
        for c in p.terms().map(|(_, c)| c) {
            den_lcm = den_lcm.lcm(c.den());
        }
    }
    let mut pg: UniPoly<Rat> = UniPoly::zero();
    let mut num_gcd = BigInt::zero();
    let mut den_lcm_q = BigInt::from(1);
    for p in parts {
        for c in p.terms().map(|(_, c)| c) {
            let scaled = c.num().mul(&den_lcm.exact_div(c.den()).unwrap());
            pg = pg.gcd(&scaled);
            for r in scaled.coeffs() {
                if r.is_zero() {
                    continue;
                }
                num_gcd = num_gcd.gcd(&r.numer().abs());
                den_lcm_q = den_lcm_q.lcm(r.denom());
            }
        }
    }
    let content = Rat::from_bigs(num_gcd, den_lcm_q);
    let mut unit_num = UniPoly::constant(content);
    if !pg.is_zero() {
        unit_num = unit_num.mul(&pg);
    }
    Coef::new(unit_num, den_lcm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MPoly {
        MPoly::var_x()
    }

    fn y() -> MPoly {
        MPoly::var_y()
    }

    fn int(n: i64) -> MPoly {
        MPoly::from_int(n)
    }

    /// M = xy - y^2, N = x + 1
    fn eq_i129() -> Foode {
        Foode::new(x().mul(&y()).sub(&y().pow(2)), x().add(&int(1)), None).unwrap()
    }

    #[test]
    fn d_operator_on_y_gives_m() {
        let eq = eq_i129();
        // D[y] = M = xy - y^2 = y (x - y)
        assert_eq!(d_operator(&eq, &y()), x().mul(&y()).sub(&y().pow(2)));
    }

    #[test]
    fn d_operator_on_constant_is_zero() {
        let eq = eq_i129();
        assert!(d_operator(&eq, &int(5)).is_zero());
    }

    #[test]
    fn d_operator_mixed() {
        // M = y^2 (y + x - 1), N = x^2; D[x + y] = x^2 + y^3 + x y^2 - y^2
        let m = y().pow(2).mul(&y().add(&x()).sub(&int(1)));
        let eq = Foode::new(m, x().pow(2), None).unwrap();
        let expect = x()
            .pow(2)
            .add(&y().pow(3))
            .add(&x().mul(&y().pow(2)))
            .sub(&y().pow(2));
        assert_eq!(d_operator(&eq, &x().add(&y())), expect);
    }

    #[test]
    fn divergence_source_i129() {
        let eq = eq_i129();
        // -(N_x + M_y) = -(1 + x - 2y)
        let expect = int(1).add(&x()).sub(&y().mul(&int(2))).neg();
        assert_eq!(divergence_source(&eq), expect);
    }

    #[test]
    fn divergence_source_constants() {
        let eq = Foode::new(int(3), int(7), None).unwrap();
        assert!(divergence_source(&eq).is_zero());
    }

    #[test]
    fn divergence_source_kamke211() {
        // M = 3x^2y^2 + x^3 + 1, N = 4(x^3+1) y -> -18 x^2 y
        let m = x()
            .pow(2)
            .mul(&y().pow(2))
            .mul(&int(3))
            .add(&x().pow(3))
            .add(&int(1));
        let n = x().pow(3).add(&int(1)).mul(&y()).mul(&int(4));
        let eq = Foode::new(m.clone(), n.clone(), None).unwrap();
        // joint normalization keeps the pair exactly as written
        assert_eq!(eq.m(), &m);
        assert_eq!(eq.n(), &n);
        let expect = x().pow(2).mul(&y()).mul(&int(-18));
        assert_eq!(divergence_source(&eq), expect);
    }

    #[test]
    fn normalization_reduces_and_signs() {
        // (2y) / (-2x) -> m = y... sign moved so n leading positive: m = -y, n = x
        let eq = Foode::new(y().mul(&int(2)), x().mul(&int(-2)), None).unwrap();
        assert_eq!(eq.m(), &y().neg());
        assert_eq!(eq.n(), &x());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            Foode::new(y(), MPoly::zero(), None),
            Err(OdeError::ZeroDenominator)
        );
    }
}
