//! Sparse bivariate polynomials in `x`, `y` over the coefficient field.
//!
//! Terms live in a `BTreeMap` keyed by graded-lexicographic monomials
//! (`x` before `y`), so iteration order, leading terms and printed form
//! are all canonical. The gcd is a primitive polynomial-remainder
//! sequence with `y` as the main variable and content recursion in `x`;
//! no factorization is ever needed.

use crate::coef::Coef;
use crate::rat::Rat;
use crate::upoly::UniPoly;
use num::bigint::BigInt;
use num::Integer;
use num::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent pair. The `Ord` is graded lex with `x > y`: compare total
/// degree, then `x`-degree.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Mono {
    pub dx: u32,
    pub dy: u32,
}

impl Mono {
    pub fn new(dx: u32, dy: u32) -> Self {
        Mono { dx, dy }
    }

    pub fn total(&self) -> u32 {
        self.dx + self.dy
    }

    pub fn mul(&self, rhs: &Mono) -> Mono {
        Mono::new(self.dx + rhs.dx, self.dy + rhs.dy)
    }

    pub fn divides(&self, rhs: &Mono) -> bool {
        self.dx <= rhs.dx && self.dy <= rhs.dy
    }

    pub fn div(&self, rhs: &Mono) -> Mono {
        Mono::new(self.dx - rhs.dx, self.dy - rhs.dy)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.total(), self.dx).cmp(&(other.total(), other.dx))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Bivariate polynomial; no stored zero coefficients, zero is the
/// empty map.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MPoly {
    terms: BTreeMap<Mono, Coef>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        MPoly::constant(Coef::one())
    }

    pub fn constant(c: Coef) -> Self {
        let mut p = MPoly::zero();
        p.add_term(Mono::new(0, 0), c);
        p
    }

    pub fn from_int(n: i64) -> Self {
        MPoly::constant(Coef::from_int_value(n))
    }

    pub fn from_rat(r: &Rat) -> Self {
        MPoly::constant(Coef::from_rat_value(r))
    }

    pub fn var_x() -> Self {
        let mut p = MPoly::zero();
        p.add_term(Mono::new(1, 0), Coef::one());
        p
    }

    pub fn var_y() -> Self {
        let mut p = MPoly::zero();
        p.add_term(Mono::new(0, 1), Coef::one());
        p
    }

    pub fn monomial(c: Coef, m: Mono) -> Self {
        let mut p = MPoly::zero();
        p.add_term(m, c);
        p
    }

    fn add_term(&mut self, m: Mono, c: Coef) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Coef)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Mono) -> Coef {
        self.terms.get(m).cloned().unwrap_or_else(Coef::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.total() == 0)
    }

    pub fn as_constant(&self) -> Option<Coef> {
        if self.is_zero() {
            return Some(Coef::zero());
        }
        if self.is_constant() {
            return Some(self.coeff(&Mono::new(0, 0)));
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    /// Leading monomial in graded lex, if nonzero.
    pub fn leading(&self) -> Option<(&Mono, &Coef)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total()).max().unwrap_or(0)
    }

    pub fn deg_x(&self) -> u32 {
        self.terms.keys().map(|m| m.dx).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> u32 {
        self.terms.keys().map(|m| m.dy).max().unwrap_or(0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in rhs.terms.iter() {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in rhs.terms.iter() {
            out.add_term(*m, c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = MPoly::zero();
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in rhs.terms.iter() {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn mul_coef(&self, c: &Coef) -> Self {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, a)| (*m, a.mul(c))).collect(),
        }
    }

    pub fn mul_rat(&self, r: &Rat) -> Self {
        self.mul_coef(&Coef::from_rat_value(r))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = MPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn deriv_x(&self) -> Self {
        let mut out = MPoly::zero();
        for (m, c) in self.terms.iter() {
            if m.dx > 0 {
                out.add_term(
                    Mono::new(m.dx - 1, m.dy),
                    c.mul(&Coef::from_int_value(m.dx as i64)),
                );
            }
        }
        out
    }

    pub fn deriv_y(&self) -> Self {
        let mut out = MPoly::zero();
        for (m, c) in self.terms.iter() {
            if m.dy > 0 {
                out.add_term(
                    Mono::new(m.dx, m.dy - 1),
                    c.mul(&Coef::from_int_value(m.dy as i64)),
                );
            }
        }
        out
    }

    pub fn eval(&self, x: &Coef, y: &Coef) -> Coef {
        let mut acc = Coef::zero();
        for (m, c) in self.terms.iter() {
            let mut t = c.clone();
            for _ in 0..m.dx {
                t = t.mul(x);
            }
            for _ in 0..m.dy {
                t = t.mul(y);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitute a value for `y`, leaving a univariate polynomial in `x`.
    pub fn subst_y(&self, y: &Coef) -> UniPoly<Coef> {
        let mut coeffs = vec![Coef::zero(); self.deg_x() as usize + 1];
        for (m, c) in self.terms.iter() {
            let mut t = c.clone();
            for _ in 0..m.dy {
                t = t.mul(y);
            }
            coeffs[m.dx as usize] = coeffs[m.dx as usize].add(&t);
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// Substitute a value for `x`, leaving a univariate polynomial in `y`.
    pub fn subst_x(&self, x: &Coef) -> UniPoly<Coef> {
        let mut coeffs = vec![Coef::zero(); self.deg_y() as usize + 1];
        for (m, c) in self.terms.iter() {
            let mut t = c.clone();
            for _ in 0..m.dx {
                t = t.mul(x);
            }
            coeffs[m.dy as usize] = coeffs[m.dy as usize].add(&t);
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn from_upoly_x(p: &UniPoly<Coef>) -> Self {
        let mut out = MPoly::zero();
        for (i, c) in p.coeffs().iter().enumerate() {
            out.add_term(Mono::new(i as u32, 0), c.clone());
        }
        out
    }

    pub fn from_upoly_y(p: &UniPoly<Coef>) -> Self {
        let mut out = MPoly::zero();
        for (i, c) in p.coeffs().iter().enumerate() {
            out.add_term(Mono::new(0, i as u32), c.clone());
        }
        out
    }

    /// Univariate view in `x`; `None` when `y` occurs.
    pub fn as_upoly_x(&self) -> Option<UniPoly<Coef>> {
        if self.deg_y() != 0 {
            return None;
        }
        Some(self.subst_y(&Coef::zero()))
    }

    /// Univariate view in `y`; `None` when `x` occurs.
    pub fn as_upoly_y(&self) -> Option<UniPoly<Coef>> {
        if self.deg_x() != 0 {
            return None;
        }
        Some(self.subst_x(&Coef::zero()))
    }

    /// Exact quotient, or `None` when the division leaves a remainder.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quo = MPoly::zero();
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (*m, c.clone())
        };
        while let Some((rm, rc)) = rem.leading() {
            if !dm.divides(rm) {
                return None;
            }
            let qm = rm.div(&dm);
            let qc = rc.div(&dc);
            let qt = MPoly::monomial(qc, qm);
            rem = rem.sub(&qt.mul(d));
            quo = quo.add(&qt);
        }
        Some(quo)
    }

    pub fn divides(&self, other: &Self) -> bool {
        !self.is_zero() && other.exact_div(self).is_some()
    }

    /// Content as a polynomial in `y` with coefficients in `K[x]`: the
    /// monic gcd over `K[x]` of the `y`-coefficients.
    pub fn content_y(&self) -> UniPoly<Coef> {
        let mut g = UniPoly::zero();
        for c in self.rec_y() {
            g = g.gcd(&c);
        }
        g
    }

    /// Content with the roles of the variables swapped: monic gcd over
    /// `K[y]` of the `x`-coefficients.
    pub fn content_x(&self) -> UniPoly<Coef> {
        self.swap_vars().content_y()
    }

    pub fn swap_vars(&self) -> Self {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Mono::new(m.dy, m.dx), c.clone()))
                .collect(),
        }
    }

    /// Coefficients of the polynomial viewed in `y`, each a univariate
    /// polynomial in `x`; index = `y`-degree.
    fn rec_y(&self) -> Vec<UniPoly<Coef>> {
        let dy = self.deg_y() as usize;
        let dx = self.deg_x() as usize;
        let mut out = vec![vec![Coef::zero(); dx + 1]; dy + 1];
        for (m, c) in self.terms.iter() {
            out[m.dy as usize][m.dx as usize] = c.clone();
        }
        out.into_iter().map(UniPoly::from_coeffs).collect()
    }

    fn from_rec_y(rec: &[UniPoly<Coef>]) -> Self {
        let mut out = MPoly::zero();
        for (dy, p) in rec.iter().enumerate() {
            for (dx, c) in p.coeffs().iter().enumerate() {
                out.add_term(Mono::new(dx as u32, dy as u32), c.clone());
            }
        }
        out
    }

    /// Primitive-positive gcd; `gcd(p, 0)` is the normalization of `p`.
    pub fn gcd(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.normalized();
        }
        if rhs.is_zero() {
            return self.normalized();
        }
        if self.deg_y() == 0 && rhs.deg_y() == 0 {
            let g = self.as_upoly_x().unwrap().gcd(&rhs.as_upoly_x().unwrap());
            return MPoly::from_upoly_x(&g).normalized();
        }
        let ca = self.content_y();
        let cb = rhs.content_y();
        let pa = self.div_content_y(&ca);
        let pb = rhs.div_content_y(&cb);
        let c = ca.gcd(&cb);
        let g = Self::gcd_primitive_y(pa, pb);
        g.mul(&MPoly::from_upoly_x(&c)).normalized()
    }

    fn div_content_y(&self, content: &UniPoly<Coef>) -> Vec<UniPoly<Coef>> {
        self.rec_y()
            .into_iter()
            .map(|c| {
                if c.is_zero() {
                    c
                } else {
                    c.exact_div(content).expect("content must divide")
                }
            })
            .collect()
    }

    /// Primitive PRS on representations in `y` with coefficients in
    /// `K[x]`; inputs are primitive in `y`.
    fn gcd_primitive_y(a: Vec<UniPoly<Coef>>, b: Vec<UniPoly<Coef>>) -> MPoly {
        fn deg(v: &[UniPoly<Coef>]) -> Option<usize> {
            v.iter().rposition(|c| !c.is_zero())
        }
        fn trim(mut v: Vec<UniPoly<Coef>>) -> Vec<UniPoly<Coef>> {
            while matches!(v.last(), Some(c) if c.is_zero()) {
                v.pop();
            }
            v
        }
        fn primitive(v: Vec<UniPoly<Coef>>) -> Vec<UniPoly<Coef>> {
            let mut g = UniPoly::zero();
            for c in &v {
                g = g.gcd(c);
            }
            if g.is_zero() || g.is_one() {
                return v;
            }
            v.into_iter()
                .map(|c| {
                    if c.is_zero() {
                        c
                    } else {
                        c.exact_div(&g).unwrap()
                    }
                })
                .collect()
        }
        // pseudo-remainder of a by b in y, up to K[x] content
        fn prem(a: &[UniPoly<Coef>], b: &[UniPoly<Coef>]) -> Vec<UniPoly<Coef>> {
            let db = deg(b).unwrap();
            let lb = b[db].clone();
            let mut r: Vec<UniPoly<Coef>> = a.to_vec();
            while let Some(dr) = deg(&r) {
                if dr < db {
                    break;
                }
                let lr = r[dr].clone();
                let shift = dr - db;
                let mut next = vec![UniPoly::zero(); dr.max(db + shift) + 1];
                for (i, c) in r.iter().enumerate() {
                    next[i] = c.mul(&lb);
                }
                for (i, c) in b.iter().enumerate() {
                    next[i + shift] = next[i + shift].sub(&c.mul(&lr));
                }
                r = trim(next);
            }
            r
        }

        let mut r0 = trim(a);
        let mut r1 = trim(b);
        if deg(&r0) < deg(&r1) {
            std::mem::swap(&mut r0, &mut r1);
        }
        while deg(&r1).is_some() {
            let r = primitive(trim(prem(&r0, &r1)));
            r0 = r1;
            r1 = r;
        }
        // r0 is the gcd of the primitive parts, up to K[x] content;
        // strip any residual content.
        MPoly::from_rec_y(&primitive(r0))
    }

    /// Primitive-positive normalization: parameter denominators
    /// cleared, parameter-polynomial content removed, rational content
    /// removed (integer coefficients, gcd one), leading graded-lex
    /// coefficient positive. Idempotent; the zero polynomial maps to
    /// itself.
    pub fn normalized(&self) -> Self {
        self.normalized_with_unit().0
    }

    /// Normalization together with the unit `u` such that
    /// `self = u * normalized`.
    pub fn normalized_with_unit(&self) -> (Self, Coef) {
        if self.is_zero() {
            return (MPoly::zero(), Coef::one());
        }
        // clear parameter denominators
        let mut den_lcm = UniPoly::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.den());
        }
        let mut nums: BTreeMap<Mono, UniPoly<Rat>> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let scaled = c.num().mul(&den_lcm.exact_div(c.den()).unwrap());
            nums.insert(*m, scaled);
        }
        // parameter-polynomial content
        let mut pg = UniPoly::zero();
        for p in nums.values() {
            pg = pg.gcd(p);
        }
        if !pg.is_zero() && !pg.is_one() {
            for p in nums.values_mut() {
                *p = p.exact_div(&pg).unwrap();
            }
        }
        // rational content
        let mut num_gcd = BigInt::zero();
        let mut den_lcm_q = BigInt::from(1);
        for p in nums.values() {
            for r in p.coeffs() {
                if r.is_zero() {
                    continue;
                }
                num_gcd = num_gcd.gcd(&r.numer().abs());
                den_lcm_q = den_lcm_q.lcm(r.denom());
            }
        }
        let content = Rat::from_bigs(num_gcd, den_lcm_q);
        let inv = content.recip();
        let mut out = MPoly::zero();
        for (m, p) in nums.iter() {
            let q = p.mul_scalar(&inv);
            out.add_term(*m, Coef::new(q, UniPoly::one()));
        }
        // sign
        let mut negated = false;
        if let Some((_, lc)) = out.leading() {
            if lc.display_negative() {
                out = out.neg();
                negated = true;
            }
        }
        // self = unit * out
        let mut unit_num = UniPoly::constant(content);
        if !pg.is_zero() {
            unit_num = unit_num.mul(&pg);
        }
        if negated {
            unit_num = unit_num.neg();
        }
        let unit = Coef::new(unit_num, den_lcm);
        (out, unit)
    }

    /// Deterministic total order used for sorting result lists:
    /// compares term sequences from the leading term down.
    pub fn cmp_order(&self, other: &Self) -> std::cmp::Ordering {
        let mut a = self.terms.iter().rev();
        let mut b = other.terms.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return std::cmp::Ordering::Equal,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    let ord = ma.cmp(mb).then_with(|| ca.cmp(cb));
                    if ord != std::cmp::Ordering::Equal {
                        return ord;
                    }
                }
            }
        }
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            crate::render::poly_str(self, crate::render::Style::Plain, None)
        )
    }
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

    #[test]
    fn graded_lex_leading() {
        // x^2 > xy > y^2 > x > y > 1
        let p = x().mul(&y()).add(&y().pow(2)).add(&x().pow(2));
        assert_eq!(p.leading().unwrap().0, &Mono::new(2, 0));
    }

    #[test]
    fn gcd_common_linear_factor() {
        let a = x().pow(2).sub(&int(1));
        let b = x().sub(&int(1));
        assert_eq!(a.gcd(&b), b);
    }

    #[test]
    fn gcd_with_zero_is_normalization() {
        let p = x().mul(&int(2)).add(&int(4)); // 2x + 4
        assert_eq!(p.gcd(&MPoly::zero()), x().add(&int(2)));
    }

    #[test]
    fn gcd_mixed_bivariate() {
        // gcd(xy + y, x^2 - 1) = x + 1
        let a = x().mul(&y()).add(&y());
        let b = x().pow(2).sub(&int(1));
        assert_eq!(a.gcd(&b), x().add(&int(1)));
    }

    #[test]
    fn exact_division() {
        let a = x().add(&int(1));
        let b = x().add(&y());
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&a), Some(b.clone()));
        assert_eq!(prod.exact_div(&b), Some(a.clone()));
        assert_eq!(prod.add(&int(1)).exact_div(&a), None);
    }

    #[test]
    fn normalization_idempotent_and_sign() {
        let p = x().mul_rat(&Rat::new(-4, 6)).add(&y().mul_rat(&Rat::new(2, 6)));
        let n = p.normalized();
        // -2/3 x + 1/3 y -> 2x - y
        assert_eq!(n, x().mul(&int(2)).sub(&y()));
        assert_eq!(n.normalized(), n);
    }

    #[test]
    fn normalization_unit_roundtrip() {
        let p = x().mul_rat(&Rat::new(-9, 4)).add(&int(3));
        let (n, u) = p.normalized_with_unit();
        assert_eq!(n.mul_coef(&u), p);
    }

    #[test]
    fn content_in_each_variable() {
        // N = 4(x^3+1) y : content in y-view is x^3 + 1 (monic)
        let n = x().pow(3).add(&int(1)).mul(&y()).mul(&int(4));
        let c = n.content_y();
        let lifted = MPoly::from_upoly_x(&c).normalized();
        assert_eq!(lifted, x().pow(3).add(&int(1)));
        // M = y^2 (y + x - 1): content in x-view is y^2
        let m = y().pow(2).mul(&y().add(&x()).sub(&int(1)));
        let cm = m.content_x();
        let lifted_m = MPoly::from_upoly_y(&cm).normalized();
        assert_eq!(lifted_m, y().pow(2));
    }
}
