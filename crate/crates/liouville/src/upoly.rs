//! Dense univariate polynomials and rational functions over a field.
//!
//! `UniPoly<K>` is used in three roles: polynomials in the named
//! parameter (building the coefficient field), univariate views of
//! bivariate polynomials during gcd and Hermite reduction, and the
//! eliminant polynomials of the small-system solver. `URat<K>` is the
//! reduced quotient with monic denominator; `URat<Rat>` doubles as the
//! coefficient field with one parameter adjoined.

use crate::field::Field;
use crate::rat::Rat;

/// Coefficients little-endian; no trailing zeros (zero is the empty vec).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct UniPoly<K: Field> {
    coeffs: Vec<K>,
}

impl<K: Field> UniPoly<K> {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(K::one())
    }

    pub fn constant(c: K) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            UniPoly { coeffs: vec![c] }
        }
    }

    pub fn var() -> Self {
        UniPoly {
            coeffs: vec![K::zero(), K::one()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<K>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    /// `c * t^k`.
    pub fn monomial(c: K, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![K::zero(); k + 1];
        coeffs[k] = c;
        UniPoly { coeffs }
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(K::zero)
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&K> {
        self.coeffs.last()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&rhs.coeff(i)));
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).sub(&rhs.coeff(i)));
        }
        Self::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        if rhs.coeffs.len() == 1 {
            return self.mul_scalar(&rhs.coeffs[0]);
        }
        if self.coeffs.len() == 1 {
            return rhs.mul_scalar(&self.coeffs[0]);
        }
        let mut out = vec![K::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(out)
    }

    pub fn mul_scalar(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient and remainder; panics if `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lc_inv = d.leading().unwrap().inv();
        let mut rem = self.clone();
        let mut quo = vec![K::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = rem.leading().unwrap().mul(&lc_inv);
            let shift = rd - dd;
            quo[shift] = quo[shift].add(&c);
            // rem -= c * t^shift * d
            for (i, dc) in d.coeffs.iter().enumerate() {
                let idx = i + shift;
                rem.coeffs[idx] = rem.coeffs[idx].sub(&c.mul(dc));
            }
            rem.trim();
        }
        (Self::from_coeffs(quo), rem)
    }

    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic associate and the leading coefficient factored out.
    pub fn monic(&self) -> (Self, K) {
        match self.leading() {
            None => (Self::zero(), K::one()),
            Some(lc) => {
                let lc = lc.clone();
                (self.mul_scalar(&lc.inv()), lc)
            }
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.monic().0;
        }
        if rhs.is_zero() {
            return self.monic().0;
        }
        if self.is_constant() || rhs.is_constant() {
            return Self::one();
        }
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic().0
    }

    /// Extended gcd: returns `(g, s, t)` with `g` monic and
    /// `s*self + t*rhs = g`.
    pub fn xgcd(&self, rhs: &Self) -> (Self, Self, Self) {
        let mut r0 = self.clone();
        let mut r1 = rhs.clone();
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (Self::zero(), Self::zero(), Self::zero());
        }
        let (g, lc) = r0.monic();
        let lc_inv = lc.inv();
        (g, s0.mul_scalar(&lc_inv), t0.mul_scalar(&lc_inv))
    }

    pub fn lcm(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let g = self.gcd(rhs);
        self.exact_div(&g).unwrap().mul(rhs).monic().0
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c.mul(&K::from_rat(&Rat::from_int(i as i64))));
        }
        Self::from_coeffs(out)
    }

    /// Term-wise antiderivative with integration constant 0.
    pub fn integrate(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(K::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(c.mul(&K::from_rat(&Rat::new(1, (i + 1) as i64))));
        }
        Self::from_coeffs(out)
    }

    pub fn eval(&self, x: &K) -> K {
        let mut acc = K::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Squarefree decomposition by Yun's algorithm: returns monic
    /// pairwise-coprime `(factor, multiplicity)` with multiplicities
    /// ascending; the leading coefficient is dropped.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let (f, _) = self.monic();
        if f.is_constant() {
            return Vec::new();
        }
        let df = f.derivative();
        let g = f.gcd(&df);
        let mut y = f.exact_div(&g).unwrap();
        let mut z = df.exact_div(&g).unwrap();
        let mut out = Vec::new();
        let mut k = 1usize;
        while y.degree().unwrap_or(0) > 0 {
            z = z.sub(&y.derivative());
            let p = y.gcd(&z);
            if p.degree().unwrap_or(0) > 0 {
                out.push((p.clone(), k));
            }
            y = y.exact_div(&p).unwrap();
            z = z.exact_div(&p).unwrap();
            k += 1;
        }
        out
    }

    /// Squarefree part: product of the distinct squarefree factors.
    pub fn squarefree_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (f, _) = self.monic();
        if f.is_constant() {
            return Self::one();
        }
        let g = f.gcd(&f.derivative());
        f.exact_div(&g).unwrap()
    }
}

/// Reduced quotient of two `UniPoly`s. Invariants: denominator monic
/// and nonzero, `gcd(num, den) = 1`, zero stored as `0/1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct URat<K: Field> {
    num: UniPoly<K>,
    den: UniPoly<K>,
}

impl<K: Field> URat<K> {
    pub fn new(num: UniPoly<K>, den: UniPoly<K>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_constant() {
            let c = den.coeff(0);
            return URat {
                num: if c.is_one() { num } else { num.mul_scalar(&c.inv()) },
                den: UniPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g).unwrap();
        let den = den.exact_div(&g).unwrap();
        let (den, lc) = den.monic();
        let num = num.mul_scalar(&lc.inv());
        URat { num, den }
    }

    /// Both operands plain constants?
    fn both_constant(&self, rhs: &Self) -> bool {
        self.is_constant() && rhs.is_constant()
    }

    pub fn zero() -> Self {
        URat {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    pub fn one() -> Self {
        URat {
            num: UniPoly::one(),
            den: UniPoly::one(),
        }
    }

    pub fn from_poly(p: UniPoly<K>) -> Self {
        URat {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn constant(c: K) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }

    pub fn num(&self) -> &UniPoly<K> {
        &self.num
    }

    pub fn den(&self) -> &UniPoly<K> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<K> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.both_constant(rhs) {
            return Self::constant(self.num.coeff(0).add(&rhs.num.coeff(0)));
        }
        Self::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.both_constant(rhs) {
            return Self::constant(self.num.coeff(0).sub(&rhs.num.coeff(0)));
        }
        Self::new(
            self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        if self.both_constant(rhs) {
            return Self::constant(self.num.coeff(0).mul(&rhs.num.coeff(0)));
        }
        Self::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        if self.both_constant(rhs) {
            return Self::constant(self.num.coeff(0).mul(&rhs.num.coeff(0).inv()));
        }
        Self::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    pub fn neg(&self) -> Self {
        URat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative())),
            self.den.mul(&self.den),
        )
    }

    /// Exact evaluation; `None` at a pole.
    pub fn eval(&self, x: &K) -> Option<K> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x).mul(&d.inv()))
        }
    }
}

impl<K: Field> Field for URat<K> {
    fn zero() -> Self {
        URat::zero()
    }

    fn one() -> Self {
        URat::one()
    }

    fn is_zero(&self) -> bool {
        URat::is_zero(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        URat::add(self, rhs)
    }

    fn sub(&self, rhs: &Self) -> Self {
        URat::sub(self, rhs)
    }

    fn mul(&self, rhs: &Self) -> Self {
        URat::mul(self, rhs)
    }

    fn neg(&self) -> Self {
        URat::neg(self)
    }

    fn inv(&self) -> Self {
        URat::inv(self)
    }

    fn from_rat(r: &Rat) -> Self {
        URat::constant(K::from_rat(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> UniPoly<Rat> {
        UniPoly::from_coeffs(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    #[test]
    fn div_rem_roundtrip() {
        let a = p(&[2, 0, 1, 3]); // 3t^3 + t^2 + 2
        let b = p(&[1, 1]); // t + 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 1 || r.is_zero());
    }

    #[test]
    fn gcd_of_common_factor() {
        let f = p(&[-1, 0, 1]); // t^2 - 1
        let g = p(&[-1, 1]); // t - 1
        assert_eq!(f.gcd(&g), g);
    }

    #[test]
    fn xgcd_identity() {
        let f = p(&[-1, 0, 1]);
        let g = p(&[2, 1]);
        let (d, s, t) = f.xgcd(&g);
        assert_eq!(s.mul(&f).add(&t.mul(&g)), d);
        assert!(d.is_one()); // coprime
    }

    #[test]
    fn yun_squarefree() {
        // t^2 (t+1)^3
        let f = p(&[0, 0, 1]).mul(&p(&[1, 1]).pow(3));
        let sq = f.squarefree_decomposition();
        assert_eq!(sq, vec![(p(&[0, 1]), 2), (p(&[1, 1]), 3)]);
    }

    #[test]
    fn derivative_integrate() {
        let f = p(&[5, 3, 0, 2]);
        assert_eq!(f.derivative().integrate().add(&p(&[5])), f);
    }

    #[test]
    fn urat_reduces() {
        let f = URat::new(p(&[0, 2, 2]), p(&[0, 0, 2])); // (2t^2+2t)/(2t^2)
        assert_eq!(f.num(), &p(&[1, 1]));
        assert_eq!(f.den(), &p(&[0, 1]));
        let d = f.derivative();
        // d/dt (t+1)/t = -1/t^2
        assert_eq!(d.num(), &p(&[-1]));
        assert_eq!(d.den(), &p(&[0, 0, 1]));
    }
}

impl<K: Field> UniPoly<K> {
    /// Newton interpolation through distinct nodes.
    pub fn interpolate(points: &[(K, K)]) -> Self {
        let n = points.len();
        if n == 0 {
            return Self::zero();
        }
        // divided differences
        let mut dd: Vec<K> = points.iter().map(|(_, y)| y.clone()).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                let num = dd[i].sub(&dd[i - 1]);
                let den = points[i].0.sub(&points[i - level].0);
                dd[i] = num.mul(&den.inv());
            }
        }
        let mut acc = Self::zero();
        let mut basis = Self::one();
        for (i, c) in dd.iter().enumerate() {
            acc = acc.add(&basis.mul_scalar(c));
            if i + 1 < n {
                let root = &points[i].0;
                basis = basis.mul(&Self::from_coeffs(vec![root.neg(), K::one()]));
            }
        }
        acc
    }
}
