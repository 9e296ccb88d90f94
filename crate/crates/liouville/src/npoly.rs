//! Sparse polynomials in a list of labeled unknowns, used for the
//! coefficient-matching systems of the Darboux search. Monomial order
//! is lex with unknown 0 most significant.

use crate::coef::Coef;
use crate::upoly::UniPoly;
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Coef>,
}

/// Graded reverse-lexicographic comparison: higher total degree wins;
/// on ties the monomial whose last differing exponent is smaller is
/// the larger one.
pub fn grevlex_cmp(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let ta: u32 = a.iter().sum();
    let tb: u32 = b.iter().sum();
    ta.cmp(&tb).then_with(|| {
        for (x, y) in a.iter().zip(b.iter()).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        std::cmp::Ordering::Equal
    })
}

impl NPoly {
    pub fn zero(nvars: usize) -> Self {
        NPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Coef) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Coef::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut mono = vec![0; nvars];
        mono[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(mono, Coef::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    fn add_term(&mut self, mono: Vec<u32>, c: Coef) {
        debug_assert_eq!(mono.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Vec<u32>, &Coef)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn as_constant(&self) -> Option<Coef> {
        if self.is_zero() {
            return Some(Coef::zero());
        }
        if self.is_constant() {
            return Some(self.terms.values().next().unwrap().clone());
        }
        None
    }

    /// Leading term in graded reverse-lex order (the order used by the
    /// reduction machinery; storage stays plain lex).
    pub fn leading(&self) -> Option<(&Vec<u32>, &Coef)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| grevlex_cmp(a, b))
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m[i]).max().unwrap_or(0)
    }

    pub fn contains_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m[i] > 0)
    }

    /// Highest index of a variable that occurs, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| m.iter().rposition(|&e| e > 0))
            .max()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in rhs.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in rhs.terms.iter() {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        NPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in rhs.terms.iter() {
                let m: Vec<u32> = ma.iter().zip(mb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(m, ca.mul(cb));
            }
        }
        out
    }

    pub fn mul_coef(&self, c: &Coef) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        NPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.mul(c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self + c * t^mono` as a new polynomial.
    pub fn plus_term(&self, mono: Vec<u32>, c: Coef) -> Self {
        let mut out = self.clone();
        out.add_term(mono, c);
        out
    }

    /// `f - c * t^mono * g`, the reduction step of polynomial division.
    pub fn sub_mul_term(&self, c: &Coef, mono: &[u32], g: &Self) -> Self {
        let mut out = self.clone();
        for (m, a) in g.terms.iter() {
            let shifted: Vec<u32> = m.iter().zip(mono.iter()).map(|(x, s)| x + s).collect();
            out.add_term(shifted, a.mul(c).neg());
        }
        out
    }

    /// Divide every coefficient by the leading one.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => self.mul_coef(&lc.inv()),
        }
    }

    /// Canonical scale for the solver pipeline: integer coefficients
    /// with content one and positive leading coefficient when the
    /// polynomial is parameter-free, monic otherwise. Cheaper to
    /// compute with than monic rationals.
    pub fn scaled(&self) -> Self {
        use num::bigint::BigInt;
        use num::{Integer, One, Signed, Zero};
        if self.is_zero() {
            return self.clone();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            let Some(r) = c.as_rat() else {
                return self.monic();
            };
            num_gcd = num_gcd.gcd(&r.numer().abs());
            den_lcm = den_lcm.lcm(r.denom());
        }
        let mut scale = crate::rat::Rat::from_bigs(den_lcm, num_gcd);
        if self
            .leading()
            .map(|(_, c)| c.display_negative())
            .unwrap_or(false)
        {
            scale = scale.neg();
        }
        self.mul_coef(&Coef::from_rat_value(&scale))
    }

    pub fn substitute_value(&self, i: usize, v: &Coef) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in self.terms.iter() {
            let mut c = c.clone();
            for _ in 0..m[i] {
                c = c.mul(v);
            }
            let mut m2 = m.clone();
            m2[i] = 0;
            out.add_term(m2, c);
        }
        out
    }

    pub fn substitute_poly(&self, i: usize, p: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in self.terms.iter() {
            let mut m2 = m.clone();
            let e = m2[i];
            m2[i] = 0;
            let mut term = Self::zero(self.nvars);
            term.add_term(m2, c.clone());
            out = out.add(&term.mul(&p.pow(e)));
        }
        out
    }

    /// When some variable divides every term, return it together with
    /// the cofactor (each term divided by the variable once).
    pub fn monomial_factor_split(&self) -> Option<(usize, Self)> {
        if self.terms.is_empty() {
            return None;
        }
        for v in 0..self.nvars {
            if self.terms.keys().all(|m| m[v] >= 1) {
                let terms = self
                    .terms
                    .iter()
                    .map(|(m, c)| {
                        let mut m2 = m.clone();
                        m2[v] -= 1;
                        (m2, c.clone())
                    })
                    .collect();
                return Some((
                    v,
                    NPoly {
                        nvars: self.nvars,
                        terms,
                    },
                ));
            }
        }
        None
    }

    /// Split `A * v_i + B` when the polynomial is at most linear in
    /// `v_i`; `A`, `B` do not involve `v_i`.
    pub fn split_linear(&self, i: usize) -> Option<(Self, Self)> {
        if self.degree_in(i) > 1 {
            return None;
        }
        let mut a = Self::zero(self.nvars);
        let mut b = Self::zero(self.nvars);
        for (m, c) in self.terms.iter() {
            if m[i] == 1 {
                let mut m2 = m.clone();
                m2[i] = 0;
                a.add_term(m2, c.clone());
            } else {
                b.add_term(m.clone(), c.clone());
            }
        }
        Some((a, b))
    }

    /// Univariate view when only `v_i` occurs.
    pub fn as_unipoly(&self, i: usize) -> Option<UniPoly<Coef>> {
        for m in self.terms.keys() {
            for (j, &e) in m.iter().enumerate() {
                if j != i && e > 0 {
                    return None;
                }
            }
        }
        let mut coeffs = vec![Coef::zero(); self.degree_in(i) as usize + 1];
        for (m, c) in self.terms.iter() {
            coeffs[m[i] as usize] = c.clone();
        }
        Some(UniPoly::from_coeffs(coeffs))
    }

    /// The single variable that occurs, if exactly one does.
    pub fn only_var(&self) -> Option<usize> {
        let mut seen = None;
        for m in self.terms.keys() {
            for (j, &e) in m.iter().enumerate() {
                if e > 0 {
                    match seen {
                        None => seen = Some(j),
                        Some(k) if k == j => {}
                        _ => return None,
                    }
                }
            }
        }
        seen
    }

    /// Largest coefficient size in bits, for effort caps.
    pub fn coeff_bits(&self) -> u64 {
        self.terms
            .values()
            .map(|c| {
                let num_bits: u64 = c
                    .num()
                    .coeffs()
                    .iter()
                    .map(|r| r.numer().bits() + r.denom().bits())
                    .max()
                    .unwrap_or(0);
                let den_bits: u64 = c
                    .den()
                    .coeffs()
                    .iter()
                    .map(|r| r.numer().bits() + r.denom().bits())
                    .max()
                    .unwrap_or(0);
                num_bits.max(den_bits)
            })
            .max()
            .unwrap_or(0)
    }

    /// Deterministic comparison by term sequences.
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution() {
        // u*v - 1 with u := v -> v^2 - 1
        let uv = NPoly::var(2, 0).mul(&NPoly::var(2, 1));
        let f = uv.sub(&NPoly::one(2));
        let g = f.substitute_poly(0, &NPoly::var(2, 1));
        assert_eq!(g, NPoly::var(2, 1).pow(2).sub(&NPoly::one(2)));
        let h = g.substitute_value(1, &Coef::from_int_value(1));
        assert!(h.is_zero());
    }

    #[test]
    fn linear_split() {
        // 3u + v^2 - 2 in u
        let f = NPoly::var(2, 0)
            .mul_coef(&Coef::from_int_value(3))
            .add(&NPoly::var(2, 1).pow(2))
            .sub(&NPoly::constant(2, Coef::from_int_value(2)));
        let (a, b) = f.split_linear(0).unwrap();
        assert_eq!(a, NPoly::constant(2, Coef::from_int_value(3)));
        assert_eq!(
            b,
            NPoly::var(2, 1)
                .pow(2)
                .sub(&NPoly::constant(2, Coef::from_int_value(2)))
        );
        assert!(f.mul(&f).split_linear(0).is_none());
    }

    #[test]
    fn univariate_view() {
        let f = NPoly::var(3, 2).pow(2).sub(&NPoly::one(3));
        let u = f.as_unipoly(2).unwrap();
        assert_eq!(u.degree(), Some(2));
        assert!(f.as_unipoly(1).is_none());
        assert_eq!(f.only_var(), Some(2));
    }
}
