//! Hermite reduction of univariate rational functions whose numerators
//! are affine in a set of parameter labels.
//!
//! `hermite_reduce` splits an integrand `f` into `d(rational)/dt` plus
//! a remainder that is proper with squarefree denominator. The integral
//! of `f` is itself a rational function exactly when the remainder is
//! identically zero, which turns "the logarithmic terms vanish" into
//! linear conditions on the parameters.
//!
//! The reduction is linear in the numerator, so an affine integrand is
//! processed per component against the shared denominator.

use crate::coef::Coef;
use crate::field::Field;
use crate::rat::Rat;
use crate::upoly::{UniPoly, URat};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("the reduced remainder is nonzero, so the integral is not a rational function")]
pub struct NotRational;

/// Univariate integrand with numerator affine in parameter labels:
/// `(base + sum_i label_i * comp_i) / den`. The denominator must be
/// free of the labels.
#[derive(Clone, Debug)]
pub struct ParamRat {
    pub den: UniPoly<Coef>,
    pub base: UniPoly<Coef>,
    pub comps: Vec<(String, UniPoly<Coef>)>,
}

/// One reduced component: `integral(f) = rational + integral(remainder)`
/// with the remainder proper over a squarefree denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Split {
    pub rational: URat<Coef>,
    pub remainder: URat<Coef>,
}

/// Reduction of an affine integrand, component by component.
#[derive(Clone, Debug)]
pub struct HermiteResult {
    pub labels: Vec<String>,
    pub base: Split,
    pub comps: Vec<Split>,
}

/// Core Hermite reduction over any field, classical quadratic version:
/// squarefree decomposition of the denominator plus repeated
/// extended-gcd steps. Returns `(rational, remainder)`.
pub fn hermite_split<K: Field>(f: &URat<K>) -> (URat<K>, URat<K>) {
    if f.is_zero() {
        return (URat::zero(), URat::zero());
    }
    let (q, r) = f.num().div_rem(f.den());
    let mut rational = URat::from_poly(q.integrate());
    let mut num = r;
    let mut den = f.den().clone(); // monic by URat invariant

    loop {
        if num.is_zero() {
            return (rational, URat::zero());
        }
        let sqf = den.squarefree_decomposition();
        let Some((v, k)) = sqf
            .iter()
            .filter(|(_, m)| *m >= 2)
            .max_by_key(|(_, m)| *m)
            .map(|(v, m)| (v.clone(), *m))
        else {
            break;
        };
        let u = den.exact_div(&v.pow(k as u32)).expect("factor divides");
        let vp = v.derivative();
        // s * (u v') + t * v = 1
        let (g, s, t) = u.mul(&vp).xgcd(&v);
        debug_assert!(g.is_one(), "u v' and v must be coprime");
        let km1 = K::from_rat(&Rat::from_int(k as i64 - 1));
        let km1_inv = km1.inv();
        // num/(u v^k) = (num s v')/v^k + (num t)/(u v^(k-1));
        // with num s = qq v + b, integrating b v'/v^k by parts gives
        // -b/((k-1) v^(k-1)) plus a lower-multiplicity integrand.
        let (qq, b) = num.mul(&s).div_rem(&v);
        rational = rational.add(&URat::new(
            b.mul_scalar(&km1_inv).neg(),
            v.pow(k as u32 - 1),
        ));
        num = b
            .derivative()
            .mul_scalar(&km1_inv)
            .mul(&u)
            .add(&num.mul(&t))
            .add(&qq.mul(&vp).mul(&u));
        den = u.mul(&v.pow(k as u32 - 1));
        let g = num.gcd(&den);
        if !g.is_one() && !g.is_constant() {
            num = num.exact_div(&g).unwrap();
            den = den.exact_div(&g).unwrap();
        }
    }
    // denominator now squarefree; make the remainder proper
    let (q2, r2) = num.div_rem(&den);
    rational = rational.add(&URat::from_poly(q2.integrate()));
    (rational, URat::new(r2, den))
}

/// Reduce an affine integrand. All components share the denominator,
/// and the reduction is linear in the numerator, so the result is the
/// affine combination of per-component reductions.
pub fn hermite_reduce(f: &ParamRat) -> HermiteResult {
    let run = |num: &UniPoly<Coef>| -> Split {
        let (rational, remainder) = hermite_split(&URat::new(num.clone(), f.den.clone()));
        Split {
            rational,
            remainder,
        }
    };
    HermiteResult {
        labels: f.comps.iter().map(|(l, _)| l.clone()).collect(),
        base: run(&f.base),
        comps: f.comps.iter().map(|(_, n)| run(n)).collect(),
    }
}

impl HermiteResult {
    /// Substitute concrete parameter values (aligned with `labels`).
    pub fn substitute(&self, values: &[Coef]) -> Split {
        assert_eq!(values.len(), self.comps.len());
        let mut rational = self.base.rational.clone();
        let mut remainder = self.base.remainder.clone();
        for (v, c) in values.iter().zip(self.comps.iter()) {
            let w = URat::constant(v.clone());
            rational = rational.add(&w.mul(&c.rational));
            remainder = remainder.add(&w.mul(&c.remainder));
        }
        Split {
            rational,
            remainder,
        }
    }
}

/// Linear rows over the parameter labels equivalent to
/// `remainder = 0`: one row per power of the variable in the common
/// denominator form. Returns `(rows, rhs)` for the label order of the
/// result.
pub fn rationality_constraints(res: &HermiteResult) -> (Vec<Vec<Coef>>, Vec<Coef>) {
    // common squarefree denominator
    let mut common = res.base.remainder.den().clone();
    for c in &res.comps {
        common = common.lcm(c.remainder.den());
    }
    let scale = |s: &Split| -> UniPoly<Coef> {
        s.remainder
            .num()
            .mul(&common.exact_div(s.remainder.den()).expect("lcm divides"))
    };
    let base_num = scale(&res.base);
    let comp_nums: Vec<UniPoly<Coef>> = res.comps.iter().map(scale).collect();
    let width = common.deg().max(1);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..width {
        let row: Vec<Coef> = comp_nums.iter().map(|n| n.coeff(j)).collect();
        let b = base_num.coeff(j).neg();
        if row.iter().all(|c| c.is_zero()) && b.is_zero() {
            continue;
        }
        rows.push(row);
        rhs.push(b);
    }
    (rows, rhs)
}

/// The rational antiderivative of a fully substituted integrand;
/// errors when a logarithmic part survives.
pub fn integrate_rational_part(split: &Split) -> Result<URat<Coef>, NotRational> {
    if split.remainder.is_zero() {
        Ok(split.rational.clone())
    } else {
        Err(NotRational)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> UniPoly<Coef> {
        UniPoly::from_coeffs(coeffs.iter().map(|&c| Coef::from_int_value(c)).collect())
    }

    #[test]
    fn inverse_square() {
        // 1/t^2 -> rational part -1/t, remainder 0
        let f = URat::new(p(&[1]), p(&[0, 0, 1]));
        let (g, h) = hermite_split(&f);
        assert_eq!(g, URat::new(p(&[-1]), p(&[0, 1])));
        assert!(h.is_zero());
    }

    #[test]
    fn proper_squarefree_passthrough() {
        // 2t/(t^2+1) is already reduced
        let f = URat::new(p(&[0, 2]), p(&[1, 0, 1]));
        let (g, h) = hermite_split(&f);
        assert!(g.is_zero());
        assert_eq!(h, f);
    }

    #[test]
    fn affine_parameter_example() {
        // (t - 1 - c)/(t + 1): rational part t, remainder -(2+c)/(t+1)
        let f = ParamRat {
            den: p(&[1, 1]),
            base: p(&[-1, 1]),
            comps: vec![("c".to_string(), p(&[-1]))],
        };
        let res = hermite_reduce(&f);
        assert_eq!(res.base.rational, URat::from_poly(p(&[0, 1])));
        assert_eq!(res.base.remainder, URat::new(p(&[-2]), p(&[1, 1])));
        assert_eq!(res.comps[0].remainder, URat::new(p(&[-1]), p(&[1, 1])));

        // vanishing-log condition: 2 + c = 0
        let (rows, rhs) = rationality_constraints(&res);
        assert_eq!(rows, vec![vec![Coef::from_int_value(-1)]]);
        assert_eq!(rhs, vec![Coef::from_int_value(2)]);

        // at c = -2 the integral is rational and equals t
        let split = res.substitute(&[Coef::from_int_value(-2)]);
        assert!(split.remainder.is_zero());
        assert_eq!(
            integrate_rational_part(&split).unwrap(),
            URat::from_poly(p(&[0, 1]))
        );
    }

    #[test]
    fn zero_remainder_constraints_are_empty() {
        let f = ParamRat {
            den: p(&[0, 0, 1]),
            base: p(&[1]),
            comps: vec![],
        };
        let res = hermite_reduce(&f);
        let (rows, rhs) = rationality_constraints(&res);
        assert!(rows.is_empty() && rhs.is_empty());
    }

    #[test]
    fn coefficientwise_vanishing() {
        // (a t + b)/(t^2 + 1): both parameter coefficients must vanish
        let f = ParamRat {
            den: p(&[1, 0, 1]),
            base: p(&[]),
            comps: vec![
                ("a".to_string(), p(&[0, 1])),
                ("b".to_string(), p(&[1])),
            ],
        };
        let res = hermite_reduce(&f);
        let (rows, rhs) = rationality_constraints(&res);
        assert_eq!(rows.len(), 2);
        assert!(rhs.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn reduction_identity_holds() {
        // d(rational)/dt + remainder == f for an assortment of inputs
        let cases = vec![
            URat::new(p(&[1, 3, 0, 2]), p(&[0, 0, 1, 2]).mul(&p(&[1, 1]))),
            URat::new(p(&[5]), p(&[0, 1]).pow(3).mul(&p(&[1, 0, 1]))),
            URat::new(p(&[1, 2, 3, 4, 5]), p(&[2, 3]).pow(2)),
        ];
        for f in cases {
            let (g, h) = hermite_split(&f);
            let back = g.derivative().add(&h);
            assert_eq!(back, f);
            assert!(h.is_zero() || h.num().deg() < h.den().deg());
            // squarefree denominator
            let d = h.den();
            if !h.is_zero() {
                assert!(d.gcd(&d.derivative()).is_one());
            }
        }
    }

    #[test]
    fn not_rational_error() {
        let f = URat::new(p(&[0, 2]), p(&[1, 0, 1]));
        let (g, h) = hermite_split(&f);
        assert!(integrate_rational_part(&Split {
            rational: g,
            remainder: h
        })
        .is_err());
    }
}
