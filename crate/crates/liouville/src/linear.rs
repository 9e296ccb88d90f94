//! Exact linear solving over the coefficient field with parametric
//! (affine) solution spaces.
//!
//! Forward elimination is fraction-free (Bareiss) on
//! denominator-cleared rows; back-division then produces the unique
//! reduced row-echelon form, so output is deterministic no matter how
//! rows were scaled.

use crate::coef::Coef;
use crate::upoly::UniPoly;

/// Affine space `particular + span(basis)`, with one basis vector per
/// free variable (reduced echelon form, so the basis is independent).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineSolutionSpace {
    pub variable_names: Vec<String>,
    pub particular: Vec<Coef>,
    pub basis: Vec<Vec<Coef>>,
}

impl AffineSolutionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Point for the given free-parameter values.
    pub fn point(&self, t: &[Coef]) -> Vec<Coef> {
        assert_eq!(t.len(), self.basis.len());
        let mut out = self.particular.clone();
        for (w, v) in t.iter().zip(self.basis.iter()) {
            for (o, e) in out.iter_mut().zip(v.iter()) {
                *o = o.add(&w.mul(e));
            }
        }
        out
    }

    /// The particular solution: all free parameters at zero.
    pub fn origin(&self) -> Vec<Coef> {
        self.particular.clone()
    }
}

/// Solve `A v = b` exactly; `None` when inconsistent.
pub fn solve_parametric(
    rows: &[Vec<Coef>],
    rhs: &[Coef],
    names: &[String],
) -> Option<AffineSolutionSpace> {
    let n = names.len();
    let m = rows.len();
    assert_eq!(rhs.len(), m, "rhs length mismatch");
    for r in rows {
        assert_eq!(r.len(), n, "row length mismatch");
    }
    // augmented, denominator-cleared matrix
    let mut a: Vec<Vec<Coef>> = Vec::with_capacity(m);
    for (row, b) in rows.iter().zip(rhs.iter()) {
        let mut full: Vec<Coef> = row.to_vec();
        full.push(b.clone());
        clear_row(&mut full);
        a.push(full);
    }

    // Bareiss forward elimination
    let mut prev = Coef::one();
    let mut pivot_row = 0usize;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..n {
        if pivot_row >= m {
            break;
        }
        let mut best: Option<usize> = None;
        for (i, row) in a.iter().enumerate().skip(pivot_row) {
            if row[col].is_zero() {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(j) if entry_weight(&a[j][col]) > entry_weight(&a[i][col]) => best = Some(i),
                _ => {}
            }
        }
        let Some(r) = best else { continue };
        a.swap(pivot_row, r);
        for i in pivot_row + 1..m {
            for j in col + 1..=n {
                let t = a[pivot_row][col]
                    .mul(&a[i][j])
                    .sub(&a[i][col].mul(&a[pivot_row][j]));
                a[i][j] = t.div(&prev);
            }
            a[i][col] = Coef::zero();
        }
        prev = a[pivot_row][col].clone();
        pivots.push((pivot_row, col));
        pivot_row += 1;
    }

    // inconsistency: zero coefficients, nonzero right-hand side
    for row in &a {
        if row[..n].iter().all(|e| e.is_zero()) && !row[n].is_zero() {
            return None;
        }
    }

    // back-division to reduced echelon form
    for k in (0..pivots.len()).rev() {
        let (r, c) = pivots[k];
        let inv = a[r][c].inv();
        for j in 0..=n {
            a[r][j] = a[r][j].mul(&inv);
        }
        for i in 0..r {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..=n {
                let t = a[i][j].sub(&f.mul(&a[r][j]));
                a[i][j] = t;
            }
        }
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut particular = vec![Coef::zero(); n];
    for &(r, c) in &pivots {
        particular[c] = a[r][n].clone();
    }
    let mut basis = Vec::new();
    for f in 0..n {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![Coef::zero(); n];
        v[f] = Coef::one();
        for &(r, c) in &pivots {
            v[c] = a[r][f].neg();
        }
        basis.push(v);
    }
    Some(AffineSolutionSpace {
        variable_names: names.to_vec(),
        particular,
        basis,
    })
}

/// Restrict a space by additional rows over the same variables.
pub fn intersect_constraints(
    space: &AffineSolutionSpace,
    rows: &[Vec<Coef>],
    rhs: &[Coef],
) -> Option<AffineSolutionSpace> {
    if rows.is_empty() {
        return Some(space.clone());
    }
    let k = space.basis.len();
    let t_names: Vec<String> = (0..k).map(|i| format!("t{}", i)).collect();
    let mut t_rows = Vec::with_capacity(rows.len());
    let mut t_rhs = Vec::with_capacity(rows.len());
    for (row, b) in rows.iter().zip(rhs.iter()) {
        assert_eq!(row.len(), space.particular.len());
        let mut tr = Vec::with_capacity(k);
        for v in &space.basis {
            tr.push(dot(row, v));
        }
        t_rows.push(tr);
        t_rhs.push(b.sub(&dot(row, &space.particular)));
    }
    let t_space = solve_parametric(&t_rows, &t_rhs, &t_names)?;
    let particular = space.point(&t_space.particular);
    let mut basis = Vec::new();
    for w in &t_space.basis {
        let mut v = vec![Coef::zero(); space.particular.len()];
        for (wt, bv) in w.iter().zip(space.basis.iter()) {
            for (o, e) in v.iter_mut().zip(bv.iter()) {
                *o = o.add(&wt.mul(e));
            }
        }
        basis.push(v);
    }
    Some(AffineSolutionSpace {
        variable_names: space.variable_names.clone(),
        particular,
        basis,
    })
}

fn dot(a: &[Coef], b: &[Coef]) -> Coef {
    let mut acc = Coef::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        acc = acc.add(&x.mul(y));
    }
    acc
}

/// Scale a row so every entry is a polynomial in the parameter with
/// integral rational coefficients.
fn clear_row(row: &mut [Coef]) {
    use num::bigint::BigInt;
    use num::{Integer, One};
    let mut den_lcm = UniPoly::one();
    for e in row.iter() {
        den_lcm = den_lcm.lcm(e.den());
    }
    let mut q_lcm = BigInt::one();
    for e in row.iter() {
        let scaled = e.num().mul(&den_lcm.exact_div(e.den()).unwrap());
        for r in scaled.coeffs() {
            if !r.is_zero() {
                q_lcm = q_lcm.lcm(r.denom());
            }
        }
    }
    let s = Coef::new(
        UniPoly::constant(crate::rat::Rat::from_bigs(q_lcm, BigInt::one())).mul(&den_lcm),
        UniPoly::one(),
    );
    for e in row.iter_mut() {
        *e = e.mul(&s);
    }
}

/// Pivot preference: smaller is better; keeps Bareiss growth down and
/// makes the pivot choice deterministic.
fn entry_weight(e: &Coef) -> (usize, usize) {
    let deg = e.num().degree().unwrap_or(0) + e.den().degree().unwrap_or(0);
    let bits: usize = e
        .num()
        .coeffs()
        .iter()
        .map(|r| (r.numer().bits() + r.denom().bits()) as usize)
        .sum();
    (deg, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::Rat;

    fn c(n: i64) -> Coef {
        Coef::from_int_value(n)
    }

    fn cr(n: i64, d: i64) -> Coef {
        Coef::from_rat_value(&Rat::new(n, d))
    }

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identity_system() {
        let rows = vec![vec![c(1), c(0)], vec![c(0), c(1)]];
        let s = solve_parametric(&rows, &[c(1), c(2)], &names(&["a", "b"])).unwrap();
        assert_eq!(s.particular, vec![c(1), c(2)]);
        assert!(s.basis.is_empty());
    }

    #[test]
    fn inconsistent_system() {
        let rows = vec![vec![c(0)]];
        assert!(solve_parametric(&rows, &[c(1)], &names(&["c"])).is_none());
    }

    #[test]
    fn constraint_system_with_free_variable() {
        // c1 = 0; c1 + 2 c2 + 2 c3 = -6; c2 + c3 = -3
        let rows = vec![
            vec![c(1), c(0), c(0)],
            vec![c(1), c(2), c(2)],
            vec![c(0), c(1), c(1)],
        ];
        let rhs = vec![c(0), c(-6), c(-3)];
        let s = solve_parametric(&rows, &rhs, &names(&["c1", "c2", "c3"])).unwrap();
        // {c1 = 0, c2 = -c3 - 3, c3 free}
        assert_eq!(s.particular, vec![c(0), c(-3), c(0)]);
        assert_eq!(s.basis, vec![vec![c(0), c(-1), c(1)]]);

        // fixing c3 = -1 gives {0, -2, -1}
        let s2 = intersect_constraints(&s, &[vec![c(0), c(0), c(1)]], &[c(-1)]).unwrap();
        assert_eq!(s2.particular, vec![c(0), c(-2), c(-1)]);
        assert!(s2.basis.is_empty());

        // intersecting with an empty constraint set leaves the space alone
        let s3 = intersect_constraints(&s, &[], &[]).unwrap();
        assert_eq!(s3, s);

        // contradictory pinnings are inconsistent
        let s4 = intersect_constraints(
            &s2,
            &[vec![c(0), c(0), c(1)]],
            &[c(2)],
        );
        assert!(s4.is_none());
    }

    #[test]
    fn residuals_vanish() {
        let rows = vec![vec![c(2), c(4), c(-2)], vec![c(1), c(2), c(3)]];
        let rhs = vec![c(6), c(7)];
        let s = solve_parametric(&rows, &rhs, &names(&["u", "v", "w"])).unwrap();
        let check = |v: &Vec<Coef>| {
            for (row, b) in rows.iter().zip(rhs.iter()) {
                assert_eq!(dot(row, v), *b);
            }
        };
        check(&s.particular);
        for bvec in &s.basis {
            let mut p = s.particular.clone();
            for (o, e) in p.iter_mut().zip(bvec.iter()) {
                *o = o.add(e);
            }
            check(&p);
        }
    }

    #[test]
    fn rational_entries() {
        let rows = vec![vec![cr(1, 2), cr(1, 3)]];
        let rhs = vec![c(1)];
        let s = solve_parametric(&rows, &rhs, &names(&["u", "v"])).unwrap();
        assert_eq!(s.particular, vec![c(2), c(0)]);
        assert_eq!(s.basis, vec![vec![cr(-2, 3), c(1)]]);
    }
}
