//! Enumeration of the eigenpolynomials of the flow operator: all
//! `p` with `D[p] = g p` up to a degree bound.
//!
//! For each total degree `d` and each choice of leading degree-`d`
//! monomial, the candidate is made monic in that monomial (higher
//! degree-`d` monomials zeroed), so every degree-`d` polynomial is
//! covered exactly once up to scale. The identity `D[p] - g p = 0` is
//! coefficient-matched into a polynomial system and handed to the
//! system solver. Reducible candidates are excluded by exact trial
//! division against lower-degree results; their factors are themselves
//! eigenpolynomials, so nothing is lost.

use crate::budget::Budget;
use crate::coef::Coef;
use crate::npoly::NPoly;
use crate::ode::Foode;
use crate::poly::{MPoly, Mono};
use crate::system::{solve_system_with_cap, CoeffSystem, SystemError};
use std::collections::BTreeMap;
use thiserror::Error;

/// Internal cap for the ansatz systems; the time budget is the real
/// guard, this only blocks absurd degree requests.
const ANSATZ_UNKNOWN_CAP: usize = 64;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DarbouxPair {
    /// Primitive-positive, non-constant eigenpolynomial.
    pub p: MPoly,
    /// Cofactor: `D[p] = g p` exactly.
    pub g: MPoly,
}

#[derive(Debug, Error)]
pub enum DarbouxError {
    #[error("time budget exhausted during the eigenpolynomial search")]
    Timeout { partial: Vec<DarbouxPair> },
}

/// Incremental search state; degree passes build on previous results.
pub struct DarbouxFinder {
    eq: Foode,
    pairs: Vec<DarbouxPair>,
    degree_done: u32,
}

impl DarbouxFinder {
    pub fn new(eq: &Foode) -> Self {
        DarbouxFinder {
            eq: eq.clone(),
            pairs: Vec::new(),
            degree_done: 0,
        }
    }

    pub fn pairs(&self) -> &[DarbouxPair] {
        &self.pairs
    }

    pub fn degree_done(&self) -> u32 {
        self.degree_done
    }

    pub fn extend_to(&mut self, max_degree: u32, budget: &Budget) -> Result<(), DarbouxError> {
        while self.degree_done < max_degree {
            let d = self.degree_done + 1;
            self.degree_pass(d, budget)?;
            self.degree_done = d;
            self.pairs.sort_by(|a, b| {
                a.p.total_degree()
                    .cmp(&b.p.total_degree())
                    .then_with(|| a.p.cmp_order(&b.p))
            });
        }
        Ok(())
    }

    fn degree_pass(&mut self, d: u32, budget: &Budget) -> Result<(), DarbouxError> {
        let cof_bound = self.eq.max_degree().saturating_sub(1);
        // degree-d monomials, descending graded lex
        let mut leads: Vec<Mono> = (0..=d).map(|dy| Mono::new(d - dy, dy)).collect();
        leads.sort();
        leads.reverse();
        for lead in leads {
            if budget.expired() {
                return Err(DarbouxError::Timeout {
                    partial: self.pairs.clone(),
                });
            }
            // support: all monomials of total degree <= d strictly below
            // the leading one
            let mut support: Vec<Mono> = Vec::new();
            for t in 0..=d {
                for dy in 0..=t {
                    let m = Mono::new(t - dy, dy);
                    if m < lead {
                        support.push(m);
                    }
                }
            }
            support.sort();
            support.reverse();
            let cof_monos: Vec<Mono> = {
                let mut v = Vec::new();
                for t in 0..=cof_bound {
                    for dy in 0..=t {
                        v.push(Mono::new(t - dy, dy));
                    }
                }
                v.sort();
                v.reverse();
                v
            };

            let n_g = cof_monos.len();
            let nvars = n_g + support.len();
            let mut labels: Vec<String> = cof_monos
                .iter()
                .map(|m| format!("g{}_{}", m.dx, m.dy))
                .collect();
            labels.extend(support.iter().map(|m| format!("a{}_{}", m.dx, m.dy)));

            // p = lead + sum a_i mono_i ; g = sum g_j mono_j
            let mut p_sym = GPoly::new(nvars);
            p_sym.set(lead, NPoly::one(nvars));
            for (i, m) in support.iter().enumerate() {
                p_sym.set(*m, NPoly::var(nvars, n_g + i));
            }
            let mut g_sym = GPoly::new(nvars);
            for (j, m) in cof_monos.iter().enumerate() {
                g_sym.set(*m, NPoly::var(nvars, j));
            }
            let lhs = p_sym
                .deriv_x()
                .mul_mpoly(self.eq.n())
                .add(&p_sym.deriv_y().mul_mpoly(self.eq.m()));
            let residual = lhs.sub(&g_sym.mul_gpoly(&p_sym));
            let equations: Vec<NPoly> = residual.terms.into_values().collect();
            let sys = CoeffSystem {
                unknowns: labels,
                equations,
            };
            let branches = match solve_system_with_cap(&sys, ANSATZ_UNKNOWN_CAP, budget) {
                Ok(b) => b,
                Err(SystemError::Timeout) => {
                    return Err(DarbouxError::Timeout {
                        partial: self.pairs.clone(),
                    })
                }
                Err(SystemError::CapExceeded { unknowns, cap }) => {
                    log::warn!(
                        "skipping degree-{} pass: {} unknowns exceed cap {}",
                        d,
                        unknowns,
                        cap
                    );
                    continue;
                }
            };
            for branch in branches {
                let samples: Vec<BTreeMap<String, Coef>> = if branch.has_free() {
                    log::warn!(
                        "continuum of eigenpolynomials at degree {} (the equation has a rational first integral); sampling parameter values 0 and 1",
                        d
                    );
                    vec![
                        branch.instantiate(&sys, &Coef::from_int_value(0)),
                        branch.instantiate(&sys, &Coef::from_int_value(1)),
                    ]
                } else {
                    vec![branch.instantiate(&sys, &Coef::from_int_value(0))]
                };
                for values in samples {
                    let mut p = MPoly::monomial(Coef::one(), lead);
                    for m in &support {
                        let v = &values[&format!("a{}_{}", m.dx, m.dy)];
                        p = p.add(&MPoly::monomial(v.clone(), *m));
                    }
                    let p = p.normalized();
                    if self.pairs.iter().any(|q| q.p == p) {
                        continue;
                    }
                    // exclude products of previously found eigenpolynomials
                    if self
                        .pairs
                        .iter()
                        .any(|q| q.p.total_degree() < p.total_degree() && q.p.divides(&p))
                    {
                        continue;
                    }
                    let dp = self.eq.apply_d(&p);
                    match dp.exact_div(&p) {
                        Some(g) => self.pairs.push(DarbouxPair { p, g }),
                        None => {
                            log::warn!("candidate failed the exact division check; skipping");
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// All eigenpolynomial/cofactor pairs with `deg p <= max_degree`,
/// deduplicated up to constant multiples and sorted by degree then
/// term order.
pub fn find_darboux(
    eq: &Foode,
    max_degree: u32,
    budget: &Budget,
) -> Result<Vec<DarbouxPair>, DarbouxError> {
    assert!(max_degree >= 1, "degree bound must be at least 1");
    let mut finder = DarbouxFinder::new(eq);
    finder.extend_to(max_degree, budget)?;
    Ok(finder.pairs)
}

/// Bivariate polynomial whose coefficients are polynomials in the
/// ansatz unknowns.
struct GPoly {
    nvars: usize,
    terms: BTreeMap<Mono, NPoly>,
}

impl GPoly {
    fn new(nvars: usize) -> Self {
        GPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    fn set(&mut self, m: Mono, c: NPoly) {
        if !c.is_zero() {
            self.terms.insert(m, c);
        }
    }

    fn add_term(&mut self, m: Mono, c: NPoly) {
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

    fn add(&self, rhs: &Self) -> Self {
        let mut out = GPoly {
            nvars: self.nvars,
            terms: self.terms.clone(),
        };
        for (m, c) in rhs.terms.iter() {
            out.add_term(*m, c.clone());
        }
        out
    }

    fn sub(&self, rhs: &Self) -> Self {
        let mut out = GPoly {
            nvars: self.nvars,
            terms: self.terms.clone(),
        };
        for (m, c) in rhs.terms.iter() {
            out.add_term(*m, c.neg());
        }
        out
    }

    fn deriv_x(&self) -> Self {
        let mut out = GPoly::new(self.nvars);
        for (m, c) in self.terms.iter() {
            if m.dx > 0 {
                out.add_term(
                    Mono::new(m.dx - 1, m.dy),
                    c.mul_coef(&Coef::from_int_value(m.dx as i64)),
                );
            }
        }
        out
    }

    fn deriv_y(&self) -> Self {
        let mut out = GPoly::new(self.nvars);
        for (m, c) in self.terms.iter() {
            if m.dy > 0 {
                out.add_term(
                    Mono::new(m.dx, m.dy - 1),
                    c.mul_coef(&Coef::from_int_value(m.dy as i64)),
                );
            }
        }
        out
    }

    fn mul_mpoly(&self, p: &MPoly) -> Self {
        let mut out = GPoly::new(self.nvars);
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in p.terms() {
                out.add_term(ma.mul(mb), ca.mul_coef(cb));
            }
        }
        out
    }

    fn mul_gpoly(&self, rhs: &Self) -> Self {
        let mut out = GPoly::new(self.nvars);
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in rhs.terms.iter() {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_foode;

    fn x() -> MPoly {
        MPoly::var_x()
    }

    fn y() -> MPoly {
        MPoly::var_y()
    }

    fn int(n: i64) -> MPoly {
        MPoly::from_int(n)
    }

    fn pairs_of(src: &str, d: u32) -> Vec<DarbouxPair> {
        let eq = parse_foode(src, &[]).unwrap();
        find_darboux(&eq, d, &Budget::unlimited()).unwrap()
    }

    #[test]
    fn kamke_i129_pairs() {
        // M = xy - y^2, N = x + 1: pairs (y, x - y) and (x + 1, 1)
        let pairs = pairs_of("dy/dx = (x*y - y^2)/(x + 1)", 1);
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].p, y());
        assert_eq!(pairs[0].g, x().sub(&y()));
        assert_eq!(pairs[1].p, x().add(&int(1)));
        assert_eq!(pairs[1].g, int(1));
    }

    #[test]
    fn abel_pairs() {
        // M = y^2 (y + x - 1), N = x^2
        let pairs = pairs_of("dy/dx = y^2*(y + x - 1)/x^2", 1);
        let ps: Vec<&MPoly> = pairs.iter().map(|q| &q.p).collect();
        assert!(ps.contains(&&x()));
        assert!(ps.contains(&&y()));
        assert!(ps.contains(&&x().add(&y())));
        assert_eq!(pairs.len(), 3);
        // cofactor of x + y is x - y + y^2
        let xy = pairs.iter().find(|q| q.p == x().add(&y())).unwrap();
        assert_eq!(xy.g, y().pow(2).add(&x()).sub(&y()));
        // cofactor of y is y^2 + xy - y
        let py = pairs.iter().find(|q| q.p == y()).unwrap();
        assert_eq!(py.g, y().pow(2).add(&x().mul(&y())).sub(&y()));
    }

    #[test]
    fn family_sampling() {
        // M = y, N = x: x and y are eigenpolynomials; the family
        // x + t y is sampled at t = 1 as x + y
        let pairs = pairs_of("dy/dx = y/x", 1);
        let ps: Vec<&MPoly> = pairs.iter().map(|q| &q.p).collect();
        assert!(ps.contains(&&x()));
        assert!(ps.contains(&&y()));
        for q in &pairs {
            assert_eq!(q.g, int(1));
        }
    }

    #[test]
    fn identity_holds_for_all_returned_pairs() {
        for src in [
            "dy/dx = (x*y - y^2)/(x + 1)",
            "dy/dx = y^2*(y + x - 1)/x^2",
            "dy/dx = y^2 + y*x + x - 1",
            "dy/dx = (3*x^2*y^2 + x^3 + 1)/(4*(x+1)*(x^2-x+1)*y)",
        ] {
            let eq = parse_foode(src, &[]).unwrap();
            let bound = 2;
            let pairs = find_darboux(&eq, bound, &Budget::unlimited()).unwrap();
            assert!(!pairs.is_empty(), "no pairs for {}", src);
            for q in &pairs {
                assert_eq!(eq.apply_d(&q.p), q.g.mul(&q.p), "bad pair for {}", src);
                assert!(
                    q.g.total_degree() <= eq.max_degree().saturating_sub(1),
                    "cofactor degree bound violated for {}",
                    src
                );
            }
        }
    }

    #[test]
    fn kamke_i18_pair() {
        // M = y^2 + xy + x - 1, N = 1: single pair (y + 1, y + x - 1)
        let pairs = pairs_of("dy/dx = y^2 + y*x + x - 1", 1);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].p, y().add(&int(1)));
        assert_eq!(pairs[0].g, x().add(&y()).sub(&int(1)));
    }

    #[test]
    fn kamke211_finds_both_factors() {
        let pairs = pairs_of(
            "dy/dx = (3*x^2*y^2 + x^3 + 1)/(4*(x+1)*(x^2-x+1)*y)",
            2,
        );
        let ps: Vec<&MPoly> = pairs.iter().map(|q| &q.p).collect();
        assert!(ps.contains(&&x().add(&int(1))));
        let quad = x().pow(2).sub(&x()).add(&int(1));
        assert!(ps.contains(&&quad));
    }

    #[test]
    fn products_are_excluded() {
        // M = y^3 + y, N = 1: pairs y and y^2 + 1; their product
        // y^3 + y solves the degree-3 ansatz but is excluded
        let pairs = pairs_of("dy/dx = y^3 + y", 3);
        let ps: Vec<&MPoly> = pairs.iter().map(|q| &q.p).collect();
        assert!(ps.contains(&&y()));
        let quad = y().pow(2).add(&int(1));
        assert!(ps.contains(&&quad));
        let cubic = y().pow(3).add(&y());
        assert!(!ps.iter().any(|p| **p == cubic));
        assert_eq!(pairs.len(), 2);
    }
}
