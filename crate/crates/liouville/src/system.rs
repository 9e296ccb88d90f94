//! Complete rational solving of the small bilinear coefficient systems
//! produced by the Darboux search.
//!
//! The pipeline: substitute away every unknown that occurs linearly
//! with a constant coefficient (in the monic ansatz that removes all
//! cofactor unknowns), run Buchberger with lex order on the residue,
//! and back-substitute from the least significant variable up, keeping
//! rational roots only. Branches with algebraic irrational solutions
//! are dropped with a logged note.

use crate::budget::Budget;
use crate::coef::Coef;
use crate::npoly::NPoly;
use crate::rat::Rat;
use crate::upoly::UniPoly;
use num::bigint::BigInt;
use num::ToPrimitive;
use num::{Integer, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const DEFAULT_UNKNOWN_CAP: usize = 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SystemError {
    #[error("system has {unknowns} unknowns, more than the cap {cap}")]
    CapExceeded { unknowns: usize, cap: usize },
    #[error("time budget exhausted while solving the system")]
    Timeout,
}

/// Polynomial equations over labeled unknowns; every equation is
/// implicitly `= 0`.
#[derive(Clone, Debug)]
pub struct CoeffSystem {
    pub unknowns: Vec<String>,
    pub equations: Vec<NPoly>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BranchValue {
    Value(Coef),
    /// Polynomial in the remaining free unknowns.
    Expr(NPoly),
    Free,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolutionBranch {
    pub assignments: BTreeMap<String, BranchValue>,
}

impl SolutionBranch {
    /// Concrete values with every free unknown set to `free_val`.
    pub fn instantiate(&self, sys: &CoeffSystem, free_val: &Coef) -> BTreeMap<String, Coef> {
        let mut out = BTreeMap::new();
        for (label, v) in &self.assignments {
            let value = match v {
                BranchValue::Value(c) => c.clone(),
                BranchValue::Free => free_val.clone(),
                BranchValue::Expr(p) => {
                    let mut q = p.clone();
                    for i in 0..sys.unknowns.len() {
                        if q.contains_var(i) {
                            q = q.substitute_value(i, free_val);
                        }
                    }
                    q.as_constant().expect("resolved expression")
                }
            };
            out.insert(label.clone(), value);
        }
        out
    }

    pub fn has_free(&self) -> bool {
        self.assignments
            .values()
            .any(|v| !matches!(v, BranchValue::Value(_)))
    }
}

pub fn solve_system(sys: &CoeffSystem, budget: &Budget) -> Result<Vec<SolutionBranch>, SystemError> {
    solve_system_with_cap(sys, DEFAULT_UNKNOWN_CAP, budget)
}

pub fn solve_system_with_cap(
    sys: &CoeffSystem,
    cap: usize,
    budget: &Budget,
) -> Result<Vec<SolutionBranch>, SystemError> {
    let n = sys.unknowns.len();
    if n > cap {
        return Err(SystemError::CapExceeded { unknowns: n, cap });
    }
    let mut eqs: Vec<NPoly> = Vec::new();
    for e in &sys.equations {
        if e.is_zero() {
            continue;
        }
        if e.is_constant() {
            return Ok(Vec::new());
        }
        eqs.push(e.scaled());
    }

    // stage 1: eliminate unknowns occurring linearly with constant
    // coefficient (covers all cofactor unknowns of a monic ansatz)
    let mut elim: Vec<(usize, NPoly)> = Vec::new();
    'outer: loop {
        if budget.expired() {
            return Err(SystemError::Timeout);
        }
        for v in 0..n {
            if elim.iter().any(|(w, _)| *w == v) {
                continue;
            }
            for eq in &eqs {
                if eq.degree_in(v) != 1 {
                    continue;
                }
                let Some((a, b)) = eq.split_linear(v) else { continue };
                let Some(c) = a.as_constant() else { continue };
                if c.is_zero() {
                    continue;
                }
                let expr = b.mul_coef(&c.inv()).neg();
                let mut next = Vec::with_capacity(eqs.len());
                for e in &eqs {
                    let s = e.substitute_poly(v, &expr);
                    if s.is_zero() {
                        continue;
                    }
                    if s.is_constant() {
                        return Ok(Vec::new());
                    }
                    next.push(s.scaled());
                }
                eqs = next;
                elim.push((v, expr));
                continue 'outer;
            }
        }
        break;
    }

    // stage 2 and 3: structural branching with a lex Groebner basis
    // as the fallback
    if log::log_enabled!(log::Level::Debug) {
        let md = eqs.iter().map(|e| e.terms().map(|(m, _)| m.iter().sum::<u32>()).max().unwrap_or(0)).max().unwrap_or(0);
        let mt = eqs.iter().map(|e| e.num_terms()).max().unwrap_or(0);
        log::debug!("residual: {} eqs, max total degree {}, max terms {}", eqs.len(), md, mt);
    }
    let mut nodes: u32 = 0;
    let raw_branches = back_branches(eqs, n, budget, false, 2 * n as u32 + 4, &mut nodes)?;

    // stage 4: resolve expressions and package full assignments
    let mut out = Vec::new();
    'branches: for partial in raw_branches {
        let mut resolved: BTreeMap<usize, BranchValue> = BTreeMap::new();
        // back-substitution assigns expressions that only mention
        // smaller variable indices, so resolve in ascending order
        let mut keys: Vec<usize> = partial.keys().cloned().collect();
        keys.sort_unstable();
        for v in keys {
            let val = match &partial[&v] {
                BranchValue::Expr(p) => classify(resolve(p, &resolved)),
                other => other.clone(),
            };
            resolved.insert(v, val);
        }
        for v in 0..n {
            let eliminated = elim.iter().any(|(w, _)| *w == v);
            if !resolved.contains_key(&v) && !eliminated {
                resolved.insert(v, BranchValue::Free);
            }
        }
        // eliminated unknowns in reverse elimination order
        for (v, expr) in elim.iter().rev() {
            let val = classify(resolve(expr, &resolved));
            resolved.insert(*v, val);
        }
        // soundness: the branch must annihilate every original equation
        for eq in &sys.equations {
            if !resolve(eq, &resolved).is_zero() {
                log::debug!("dropping a spurious candidate branch");
                continue 'branches;
            }
        }
        let assignments = resolved
            .into_iter()
            .map(|(v, val)| (sys.unknowns[v].clone(), val))
            .collect();
        out.push(SolutionBranch { assignments });
    }

    out.sort_by(|a, b| cmp_branch(a, b));
    out.dedup();
    Ok(out)
}

fn classify(p: NPoly) -> BranchValue {
    match p.as_constant() {
        Some(c) => BranchValue::Value(c),
        None => BranchValue::Expr(p),
    }
}

/// Substitute every resolved unknown into `p`, leaving free unknowns
/// symbolic.
fn resolve(p: &NPoly, resolved: &BTreeMap<usize, BranchValue>) -> NPoly {
    let mut q = p.clone();
    for (v, val) in resolved {
        if !q.contains_var(*v) {
            continue;
        }
        match val {
            BranchValue::Value(c) => q = q.substitute_value(*v, c),
            BranchValue::Expr(e) => q = q.substitute_poly(*v, e),
            BranchValue::Free => {}
        }
    }
    q
}

fn cmp_branch(a: &SolutionBranch, b: &SolutionBranch) -> std::cmp::Ordering {
    let av: Vec<_> = a.assignments.iter().collect();
    let bv: Vec<_> = b.assignments.iter().collect();
    for ((ka, va), (kb, vb)) in av.iter().zip(bv.iter()) {
        let ord = ka.cmp(kb).then_with(|| cmp_value(va, vb));
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    av.len().cmp(&bv.len())
}

fn cmp_value(a: &BranchValue, b: &BranchValue) -> std::cmp::Ordering {
    use BranchValue::*;
    match (a, b) {
        (Value(x), Value(y)) => x.cmp(y),
        (Value(_), _) => std::cmp::Ordering::Less,
        (_, Value(_)) => std::cmp::Ordering::Greater,
        (Expr(x), Expr(y)) => x.cmp_order(y),
        (Expr(_), Free) => std::cmp::Ordering::Less,
        (Free, Expr(_)) => std::cmp::Ordering::Greater,
        (Free, Free) => std::cmp::Ordering::Equal,
    }
}

/// Recursive back-substitution: branch on univariate equations and
/// constant-coefficient linear isolations directly; fall back to a lex
/// Groebner basis only when the raw system exposes neither.
fn back_branches(
    eqs: Vec<NPoly>,
    nvars: usize,
    budget: &Budget,
    gb_done: bool,
    combos_left: u32,
    nodes: &mut u32,
) -> Result<Vec<BTreeMap<usize, BranchValue>>, SystemError> {
    if budget.expired() {
        return Err(SystemError::Timeout);
    }
    *nodes += 1;
    if *nodes > NODE_CAP {
        if *nodes == NODE_CAP + 1 {
            log::warn!("abandoning branch exploration past the node cap");
        }
        return Ok(Vec::new());
    }
    if eqs.iter().any(|e| e.is_constant() && !e.is_zero()) {
        return Ok(Vec::new());
    }
    let eqs: Vec<NPoly> = eqs.into_iter().filter(|e| !e.is_zero()).collect();
    if eqs.is_empty() {
        return Ok(vec![BTreeMap::new()]);
    }

    // univariate equation: every solution's coordinate is one of its
    // roots, so branching is complete
    let univar = eqs
        .iter()
        .filter_map(|e| e.only_var().map(|v| (v, e)))
        .max_by(|(va, ea), (vb, eb)| {
            va.cmp(vb)
                .then_with(|| eb.degree_in(*vb).cmp(&ea.degree_in(*va)))
        });
    if let Some((v, _)) = univar {
        let mut g = UniPoly::zero();
        for e in &eqs {
            if e.only_var() == Some(v) {
                if let Some(u) = e.as_unipoly(v) {
                    g = g.gcd(&u);
                }
            }
        }
        if g.is_constant() {
            return Ok(Vec::new());
        }
        let Some(roots) = rational_roots(&g) else {
            log::warn!("discarding branch with non-rational roots");
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for r in roots {
            let next: Vec<NPoly> = eqs
                .iter()
                .map(|e| e.substitute_value(v, &r))
                .filter(|e| !e.is_zero())
                .map(|e| e.scaled())
                .collect();
            for mut m in back_branches(next, nvars, budget, false, combos_left, nodes)? {
                m.insert(v, BranchValue::Value(r.clone()));
                out.push(m);
            }
        }
        return Ok(out);
    }

    // linear isolation with a constant coefficient (an equality, so
    // substitution loses nothing); prefer the least significant
    // variable for determinism
    let mut isolation: Option<(usize, NPoly)> = None;
    for eq in &eqs {
        if let Some(vmax) = eq.max_var() {
            for v in (0..=vmax).rev() {
                if eq.degree_in(v) != 1 {
                    continue;
                }
                let Some((a, b)) = eq.split_linear(v) else { continue };
                let Some(c) = a.as_constant() else { continue };
                if c.is_zero() {
                    continue;
                }
                let expr = b.mul_coef(&c.inv()).neg();
                if isolation.as_ref().map(|(w, _)| *w < v).unwrap_or(true) {
                    isolation = Some((v, expr));
                }
                break;
            }
        }
    }
    if let Some((v, expr)) = isolation {
        let next: Vec<NPoly> = eqs
            .iter()
            .map(|e| e.substitute_poly(v, &expr))
            .filter(|e| !e.is_zero())
            .map(|e| e.scaled())
            .collect();
        let mut out = Vec::new();
        for mut m in back_branches(next, nvars, budget, false, combos_left, nodes)? {
            m.insert(v, BranchValue::Expr(expr.clone()));
            out.push(m);
        }
        return Ok(out);
    }

    // monomial factor split: `v * h = 0` branches into `v = 0` and
    // `h = 0`; the union is the full solution set
    for (idx, eq) in eqs.iter().enumerate() {
        let Some((v, h)) = eq.monomial_factor_split() else {
            continue;
        };
        let zero = Coef::zero();
        let next_a: Vec<NPoly> = eqs
            .iter()
            .map(|e| e.substitute_value(v, &zero))
            .filter(|e| !e.is_zero())
            .map(|e| e.scaled())
            .collect();
        let mut out = Vec::new();
        for mut m in back_branches(next_a, nvars, budget, false, combos_left, nodes)? {
            m.insert(v, BranchValue::Value(zero.clone()));
            out.push(m);
        }
        let mut next_b = eqs.clone();
        next_b[idx] = h.scaled();
        out.extend(back_branches(next_b, nvars, budget, false, combos_left, nodes)?);
        return Ok(out);
    }

    // two unknowns: eliminate one with a resultant; every common
    // solution of the system is a common solution of any pair, so the
    // roots of a nonzero pairwise resultant cover all candidates
    {
        let mut present: Vec<usize> = Vec::new();
        for w in 0..nvars {
            if eqs.iter().any(|e| e.contains_var(w)) {
                present.push(w);
            }
        }
        if present.len() == 2 && eqs.len() >= 2 {
            let (u, v) = (present[0], present[1]);
            let mut res_poly: Option<UniPoly<Coef>> = None;
            'pairs: for i in 0..eqs.len() {
                for j in i + 1..eqs.len() {
                    if budget.expired() {
                        return Err(SystemError::Timeout);
                    }
                    let r = resultant_in(&eqs[i], &eqs[j], u, v);
                    if let Some(r) = r {
                        if !r.is_zero() {
                            res_poly = Some(r);
                            break 'pairs;
                        }
                    }
                }
            }
            if let Some(r) = res_poly {
                if r.is_constant() {
                    return Ok(Vec::new());
                }
                let Some(roots) = rational_roots(&r) else {
                    log::warn!("discarding branch with non-rational eliminant roots");
                    return Ok(Vec::new());
                };
                let mut out = Vec::new();
                for root in roots {
                    let next: Vec<NPoly> = eqs
                        .iter()
                        .map(|e| e.substitute_value(v, &root))
                        .filter(|e| !e.is_zero())
                        .map(|e| e.scaled())
                        .collect();
                    for mut m in back_branches(next, nvars, budget, false, combos_left, nodes)? {
                        m.insert(v, BranchValue::Value(root.clone()));
                        out.push(m);
                    }
                }
                return Ok(out);
            }
        }
    }

    // linear-block elimination with symbolic entries: when every
    // unknown but one (z) occurs linearly with no cross products, the
    // system is linear over the polynomials in z. Fraction-free
    // forward elimination produces consistency polynomials in z (the
    // generic branch) and pivot polynomials whose vanishing covers the
    // degenerate loci; each becomes a univariate equation joined to
    // the original system, so the recursion pins z next. Spurious
    // candidates from the generic branch (where a pivot vanishes) are
    // screened by the final check against the original system.
    // two unknowns: eliminate one with a resultant; every common
    // solution of the system is a common solution of any pair, so the
    // roots of a nonzero pairwise resultant cover all candidates
    {
        let mut present: Vec<usize> = Vec::new();
        for w in 0..nvars {
            if eqs.iter().any(|e| e.contains_var(w)) {
                present.push(w);
            }
        }
        if present.len() == 2 && eqs.len() >= 2 {
            let (u, v) = (present[0], present[1]);
            let mut res_poly: Option<UniPoly<Coef>> = None;
            'pairs: for i in 0..eqs.len() {
                for j in i + 1..eqs.len() {
                    if budget.expired() {
                        return Err(SystemError::Timeout);
                    }
                    let r = resultant_in(&eqs[i], &eqs[j], u, v);
                    if let Some(r) = r {
                        if !r.is_zero() {
                            res_poly = Some(r);
                            break 'pairs;
                        }
                    }
                }
            }
            if let Some(r) = res_poly {
                if r.is_constant() {
                    return Ok(Vec::new());
                }
                let Some(roots) = rational_roots(&r) else {
                    log::warn!("discarding branch with non-rational eliminant roots");
                    return Ok(Vec::new());
                };
                let mut out = Vec::new();
                for root in roots {
                    let next: Vec<NPoly> = eqs
                        .iter()
                        .map(|e| e.substitute_value(v, &root))
                        .filter(|e| !e.is_zero())
                        .map(|e| e.scaled())
                        .collect();
                    for mut m in back_branches(next, nvars, budget, false, combos_left, nodes)? {
                        m.insert(v, BranchValue::Value(root.clone()));
                        out.push(m);
                    }
                }
                return Ok(out);
            }
        }
    }

    // linear-block elimination with symbolic entries: when a set of
    // unknowns occurs linearly with no products among themselves, the
    // system is linear over the polynomial ring in the remaining
    // "scalar" unknowns. Fraction-free forward elimination yields
    // consistency polynomials (generic branch) and pivot polynomials
    // (degenerate loci). Each scalar system is solved recursively, its
    // assignments are substituted into the original equations, and the
    // now-constant-coefficient block is solved by the earlier rules.
    // Spurious candidates from generic branches are screened by the
    // final check against the original system.
    if combos_left > 0 {
        if let Some((scalars, block)) = linear_block(&eqs, nvars) {
            if let Some((pivots, consistency, feasible)) =
                block_eliminate(&eqs, nvars, &scalars, &block, budget)?
            {
            let scalar_only: Vec<NPoly> = eqs
                .iter()
                .filter(|e| block.iter().all(|&w| !e.contains_var(w)))
                .cloned()
                .collect();
            let mut z_systems: Vec<Vec<NPoly>> = Vec::new();
            for piv in &pivots {
                if !piv.is_constant() {
                    let mut zs = scalar_only.clone();
                    zs.push(piv.scaled());
                    z_systems.push(zs);
                }
            }
            let constant_contradiction = consistency
                .iter()
                .any(|c| c.is_constant() && !c.is_zero());
            if !consistency.is_empty() && !constant_contradiction {
                let mut zs = scalar_only.clone();
                zs.extend(consistency.iter().map(|c| c.scaled()));
                z_systems.push(zs);
            }
            if consistency.is_empty() && feasible && !scalars.is_empty() {
                log::warn!(
                    "solution family over a non-linear parameter; keeping only degenerate branches"
                );
            }
            if !z_systems.is_empty() || constant_contradiction {
                let mut out = Vec::new();
                for zs in z_systems {
                    for z_map in back_branches(zs, nvars, budget, false, combos_left - 1, nodes)? {
                        let mut substituted = Vec::with_capacity(eqs.len());
                        for e in &eqs {
                            let mut q = e.clone();
                            for (v, val) in &z_map {
                                if !q.contains_var(*v) {
                                    continue;
                                }
                                match val {
                                    BranchValue::Value(c) => q = q.substitute_value(*v, c),
                                    BranchValue::Expr(p) => q = q.substitute_poly(*v, p),
                                    BranchValue::Free => {}
                                }
                            }
                            if !q.is_zero() {
                                substituted.push(q.scaled());
                            }
                        }
                        for m2 in
                            back_branches(substituted, nvars, budget, false, combos_left - 1, nodes)?
                        {
                            let mut merged = z_map.clone();
                            for (v, val) in m2 {
                                merged.entry(v).or_insert(val);
                            }
                            out.push(merged);
                        }
                    }
                }
                return Ok(out);
            }
            }
        }
    }

    if gb_done {
        log::warn!("cannot isolate a variable in the residual system; dropping branch");
        return Ok(Vec::new());
    }
    if log::log_enabled!(log::Level::Debug) {
        let mut degs = std::collections::BTreeMap::new();
        for e in &eqs {
            for (m, _) in e.terms() {
                for (i, &x) in m.iter().enumerate() {
                    if x > 0 {
                        let d = degs.entry(i).or_insert(0u32);
                        *d = (*d).max(e.degree_in(i));
                    }
                }
            }
        }
        log::debug!("falling back to groebner on {} eqs, var degrees {:?}:", eqs.len(), degs);
        for e in &eqs {
            let parts: Vec<String> = e
                .terms()
                .map(|(m, c)| {
                    let vars: Vec<String> = m
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| **e > 0)
                        .map(|(i, e)| format!("v{}^{}", i, e))
                        .collect();
                    format!(
                        "{}*{}",
                        c.as_rat().map(|r| r.to_string()).unwrap_or("?".into()),
                        vars.join("*")
                    )
                })
                .collect();
            log::debug!("  {}", parts.join(" + "));
        }
    }
    let Some(basis) = buchberger(eqs, budget)? else {
        log::warn!("dropping a branch whose basis computation exceeded the effort cap");
        return Ok(Vec::new());
    };
    back_branches(basis, nvars, budget, true, combos_left, nodes)
}


/// Detect a block of unknowns that occur at most linearly with no
/// products among themselves; every other occurring unknown is a
/// "scalar" of the coefficient ring.
fn linear_block(eqs: &[NPoly], nvars: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut present = vec![false; nvars];
    for e in eqs {
        for (m, _) in e.terms() {
            for (i, &x) in m.iter().enumerate() {
                if x > 0 {
                    present[i] = true;
                }
            }
        }
    }
    let vars: Vec<usize> = (0..nvars).filter(|&i| present[i]).collect();
    if vars.len() < 2 {
        return None;
    }
    let mut block: Vec<usize> = vars
        .iter()
        .cloned()
        .filter(|&v| eqs.iter().all(|e| e.degree_in(v) <= 1))
        .collect();
    // drop block members that multiply each other until none collide
    loop {
        let mut collide: Option<usize> = None;
        'scan: for e in eqs {
            for (m, _) in e.terms() {
                let hits: Vec<usize> = block.iter().cloned().filter(|&v| m[v] > 0).collect();
                if hits.len() > 1 {
                    collide = Some(hits[0]);
                    break 'scan;
                }
            }
        }
        match collide {
            Some(v) => block.retain(|&w| w != v),
            None => break,
        }
    }
    if block.is_empty() {
        return None;
    }
    let scalars: Vec<usize> = vars
        .iter()
        .cloned()
        .filter(|v| !block.contains(v))
        .collect();
    // at least one block coefficient must be non-constant, otherwise
    // the constant-pivot isolation already applies
    let involved = eqs.iter().any(|e| {
        block.iter().any(|&w| {
            e.split_linear(w)
                .map(|(a, _)| !a.is_zero() && a.as_constant().is_none())
                .unwrap_or(false)
        })
    });
    if !involved {
        return None;
    }
    Some((scalars, block))
}

/// Fraction-free (Bareiss) elimination of the linear block over the
/// polynomial ring in the scalar unknowns. Returns pivot polynomials,
/// consistency polynomials of the generic branch, and whether the
/// generic system stayed feasible.
#[allow(clippy::type_complexity)]
fn block_eliminate(
    eqs: &[NPoly],
    nvars: usize,
    _scalars: &[usize],
    block: &[usize],
    budget: &Budget,
) -> Result<Option<(Vec<NPoly>, Vec<NPoly>, bool)>, SystemError> {
    let k = block.len();
    let mut rows: Vec<Vec<NPoly>> = Vec::with_capacity(eqs.len());
    for e in eqs {
        let mut row: Vec<NPoly> = Vec::with_capacity(k + 1);
        let mut rest = e.clone();
        for &w in block {
            let (a, b) = rest.split_linear(w).expect("block is linear");
            row.push(a);
            rest = b;
        }
        row.push(rest);
        rows.push(row);
    }
    let m = rows.len();
    let mut prev = NPoly::one(nvars);
    let mut pivot_row = 0usize;
    let mut pivots: Vec<NPoly> = Vec::new();
    for col in 0..k {
        if pivot_row >= m {
            break;
        }
        if budget.expired() {
            return Err(SystemError::Timeout);
        }
        let weight = |p: &NPoly| -> (u32, usize) {
            let d = p
                .terms()
                .map(|(mm, _)| mm.iter().sum::<u32>())
                .max()
                .unwrap_or(0);
            (d, p.num_terms())
        };
        let mut best: Option<usize> = None;
        for (i, row) in rows.iter().enumerate().skip(pivot_row) {
            if row[col].is_zero() {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(j) if weight(&rows[j][col]) > weight(&row[col]) => best = Some(i),
                _ => {}
            }
        }
        let Some(r) = best else { continue };
        rows.swap(pivot_row, r);
        for i in pivot_row + 1..m {
            for j in col + 1..=k {
                let t = rows[pivot_row][col]
                    .mul(&rows[i][j])
                    .sub(&rows[i][col].mul(&rows[pivot_row][j]));
                let t = exact_div_npoly(&t, &prev).unwrap_or(t);
                if t.num_terms() > 200
                    || t.terms().map(|(m, _)| m.iter().sum::<u32>()).max().unwrap_or(0) > 24
                    || t.coeff_bits() > COEFF_BITS_CAP
                {
                    log::warn!("abandoning a block elimination past the effort cap");
                    return Ok(None);
                }
                rows[i][j] = t;
            }
            rows[i][col] = NPoly::zero(nvars);
        }
        prev = rows[pivot_row][col].clone();
        pivots.push(prev.clone());
        pivot_row += 1;
    }
    let mut consistency = Vec::new();
    let mut feasible = true;
    for row in rows.iter().skip(pivot_row) {
        if row[..k].iter().all(|e| e.is_zero()) {
            let c = &row[k];
            if !c.is_zero() {
                if c.is_constant() {
                    feasible = false;
                    consistency.push(c.clone());
                } else {
                    consistency.push(c.clone());
                }
            }
        }
    }
    Ok(Some((pivots, consistency, feasible)))
}


/// Resultant of two polynomials in the unknown `u`, as a univariate
/// polynomial in `v`, via fraction-free Bareiss on the Sylvester
/// matrix. `None` when either input does not involve `u`.
fn resultant_in(f: &NPoly, g: &NPoly, u: usize, v: usize) -> Option<UniPoly<Coef>> {
    let fu = coeffs_in(f, u, v)?;
    let gu = coeffs_in(g, u, v)?;
    let m = fu.len() - 1;
    let n = gu.len() - 1;
    if m == 0 || n == 0 {
        return None;
    }
    let vdeg_f = fu.iter().map(|c| c.deg()).max().unwrap_or(0);
    let vdeg_g = gu.iter().map(|c| c.deg()).max().unwrap_or(0);
    let bound = n * vdeg_f + m * vdeg_g;
    if bound > RESULTANT_DEGREE_CAP
        || f.coeff_bits() > COEFF_BITS_CAP
        || g.coeff_bits() > COEFF_BITS_CAP
    {
        log::warn!("skipping a resultant past the effort cap");
        return None;
    }
    // evaluation-interpolation: numeric Sylvester determinants at
    // nodes where neither leading coefficient vanishes
    let mut points: Vec<(Coef, Coef)> = Vec::with_capacity(bound + 1);
    let mut t = 0i64;
    let mut tried = 0;
    while points.len() <= bound && tried < 4 * (bound + 4) {
        let node = Coef::from_int_value(t);
        t = if t >= 0 { -(t + 1) } else { -t };
        tried += 1;
        let lf = fu.last().unwrap().eval(&node);
        let lg = gu.last().unwrap().eval(&node);
        if lf.is_zero() || lg.is_zero() {
            continue;
        }
        let fv: Vec<Coef> = fu.iter().map(|c| c.eval(&node)).collect();
        let gv: Vec<Coef> = gu.iter().map(|c| c.eval(&node)).collect();
        let det = sylvester_det(&fv, &gv);
        points.push((node, det));
    }
    if points.len() <= bound {
        return None;
    }
    Some(UniPoly::interpolate(&points))
}

/// Determinant of the Sylvester matrix of two numeric coefficient
/// lists (ascending), by fraction-free elimination.
fn sylvester_det(fv: &[Coef], gv: &[Coef]) -> Coef {
    let m = fv.len() - 1;
    let n = gv.len() - 1;
    let size = m + n;
    let mut a: Vec<Vec<Coef>> = vec![vec![Coef::zero(); size]; size];
    for i in 0..n {
        for (k, c) in fv.iter().enumerate() {
            a[i][i + (m - k)] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in gv.iter().enumerate() {
            a[n + i][i + (n - k)] = c.clone();
        }
    }
    let mut sign = false;
    let mut prev = Coef::one();
    for col in 0..size {
        if a[col][col].is_zero() {
            let swap = (col + 1..size).find(|&r| !a[r][col].is_zero());
            match swap {
                Some(r) => {
                    a.swap(col, r);
                    sign = !sign;
                }
                None => return Coef::zero(),
            }
        }
        for i in col + 1..size {
            for j in col + 1..size {
                let t = a[col][col].mul(&a[i][j]).sub(&a[i][col].mul(&a[col][j]));
                a[i][j] = t.div(&prev);
            }
            a[i][col] = Coef::zero();
        }
        prev = a[col][col].clone();
    }
    let det = a[size - 1][size - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

/// Coefficient list of `p` in `u` (ascending), each entry univariate
/// in `v`; `None` when `p` has no `u` or mentions other unknowns.
fn coeffs_in(p: &NPoly, u: usize, v: usize) -> Option<Vec<UniPoly<Coef>>> {
    if p.degree_in(u) == 0 {
        return None;
    }
    let mut out = vec![vec![]; p.degree_in(u) as usize + 1];
    for (m, c) in p.terms() {
        for (i, &e) in m.iter().enumerate() {
            if i != u && i != v && e > 0 {
                return None;
            }
        }
        let du = m[u] as usize;
        let dv = m[v] as usize;
        if out[du].len() <= dv {
            out[du].resize(dv + 1, Coef::zero());
        }
        out[du][dv] = out[du][dv].add(c);
    }
    Some(out.into_iter().map(UniPoly::from_coeffs).collect())
}

/// Exact multivariate division, `None` when not divisible.
fn exact_div_npoly(f: &NPoly, d: &NPoly) -> Option<NPoly> {
    if d.is_constant() {
        let c = d.as_constant()?;
        if c.is_zero() {
            return None;
        }
        return Some(f.mul_coef(&c.inv()));
    }
    let mut rem = f.clone();
    let mut quo = NPoly::zero(f.nvars());
    let (dm, dc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
    while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
        if !dm.iter().zip(rm.iter()).all(|(a, b)| a <= b) {
            return None;
        }
        let q: Vec<u32> = rm.iter().zip(dm.iter()).map(|(a, b)| a - b).collect();
        let qc = rc.div(&dc);
        quo = quo.plus_term(q.clone(), qc.clone());
        rem = rem.sub_mul_term(&qc, &q, d);
    }
    Some(quo)
}

/// Deterministic effort caps: searches beyond these are abandoned
/// with a logged note instead of grinding; every system the solver
/// actually needs stays far below them.
const GB_BASIS_CAP: usize = 48;
const GB_STEP_CAP: u64 = 4_000;
const RESULTANT_DEGREE_CAP: usize = 32;
const COEFF_BITS_CAP: u64 = 256;
const NODE_CAP: u32 = 600;

/// Buchberger with interreduction over graded reverse-lex leading
/// terms; returns the reduced basis, or `None` past the effort caps.
/// Pairs are processed smallest lcm total degree first.
fn buchberger(gens: Vec<NPoly>, budget: &Budget) -> Result<Option<Vec<NPoly>>, SystemError> {
    let mut basis: Vec<NPoly> = Vec::new();
    for g in gens {
        if !g.is_zero() {
            basis.push(g.scaled());
        }
    }
    let mut steps: u64 = 0;
    basis = match interreduce(basis, budget, &mut steps)? {
        Some(b) => b,
        None => return Ok(None),
    };
    let mut pairs: BTreeSet<(u32, Vec<u32>, usize, usize)> = BTreeSet::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            pairs.insert(pair_key(&basis, i, j));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    while let Some(entry) = pairs.iter().next().cloned() {
        pairs.remove(&entry);
        if budget.expired() {
            return Err(SystemError::Timeout);
        }
        let (_, lcm, i, j) = entry;
        done.insert((i, j));
        let (mi, _) = basis[i].leading().unwrap();
        let (mj, _) = basis[j].leading().unwrap();
        // product criterion: coprime leading monomials reduce to zero
        let sum: Vec<u32> = mi.iter().zip(mj.iter()).map(|(a, b)| a + b).collect();
        if sum == lcm {
            continue;
        }
        // chain criterion: some k with lt(k) | lcm(i,j) and both
        // (i,k), (j,k) already handled
        let chain = (0..basis.len()).any(|k| {
            if k == i || k == j {
                return false;
            }
            let (mk, _) = basis[k].leading().unwrap();
            mk.iter().zip(lcm.iter()).all(|(a, b)| a <= b)
                && done.contains(&key_of(i, k))
                && done.contains(&key_of(j, k))
        });
        if chain {
            continue;
        }
        let s = spoly(&basis[i], &basis[j]);
        let r = normal_form(s, &basis, budget, &mut steps)?;
        if steps > GB_STEP_CAP
            || basis.len() > GB_BASIS_CAP
            || r.coeff_bits() > COEFF_BITS_CAP
        {
            log::warn!("abandoning a basis computation past the effort cap");
            return Ok(None);
        }
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(Some(vec![NPoly::one(r.nvars())]));
        }
        let r = r.scaled();
        let k = basis.len();
        basis.push(r);
        for i in 0..k {
            pairs.insert(pair_key(&basis, i, k));
        }
    }
    basis = match interreduce(basis, budget, &mut steps)? {
        Some(b) => b,
        None => return Ok(None),
    };
    basis.sort_by(|a, b| a.cmp_order(b));
    basis.dedup();
    Ok(Some(basis))
}

fn key_of(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

fn pair_key(basis: &[NPoly], i: usize, j: usize) -> (u32, Vec<u32>, usize, usize) {
    let (mi, _) = basis[i].leading().unwrap();
    let (mj, _) = basis[j].leading().unwrap();
    let lcm: Vec<u32> = mi.iter().zip(mj.iter()).map(|(a, b)| *a.max(b)).collect();
    (lcm.iter().sum(), lcm, i, j)
}

fn spoly(f: &NPoly, g: &NPoly) -> NPoly {
    let (mf, cf) = f.leading().unwrap();
    let (mg, cg) = g.leading().unwrap();
    let lcm: Vec<u32> = mf.iter().zip(mg.iter()).map(|(a, b)| *a.max(b)).collect();
    let df: Vec<u32> = lcm.iter().zip(mf.iter()).map(|(l, m)| l - m).collect();
    let dg: Vec<u32> = lcm.iter().zip(mg.iter()).map(|(l, m)| l - m).collect();
    let zero = NPoly::zero(f.nvars());
    zero.sub_mul_term(&cf.inv().neg(), &df, f)
        .sub_mul_term(&cg.inv(), &dg, g)
}

/// Full multivariate division by the basis, fraction-free: each step
/// cancels the largest reducible monomial by a cross-multiplication
/// and rescales the whole polynomial to primitive form, so
/// coefficients stay bounded. The result is the normal form up to a
/// nonzero constant, which is all the solver needs.
fn normal_form(
    mut f: NPoly,
    basis: &[NPoly],
    budget: &Budget,
    steps: &mut u64,
) -> Result<NPoly, SystemError> {
    'outer: loop {
        *steps += 1;
        if *steps % 32 == 0 && budget.expired() {
            return Err(SystemError::Timeout);
        }
        if *steps > GB_STEP_CAP {
            return Ok(f);
        }
        // largest reducible monomial in grevlex order
        let mut monos: Vec<(Vec<u32>, Coef)> =
            f.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        monos.sort_by(|(a, _), (b, _)| crate::npoly::grevlex_cmp(b, a));
        for (m, c) in monos {
            for g in basis {
                let (gm, gc) = g.leading().unwrap();
                if gm.iter().zip(m.iter()).all(|(a, b)| a <= b) {
                    let q: Vec<u32> = m.iter().zip(gm.iter()).map(|(a, b)| a - b).collect();
                    // f := gc * f - c * t^q * g, then rescale
                    f = f.mul_coef(gc).sub_mul_term(&c, &q, g).scaled();
                    continue 'outer;
                }
            }
        }
        return Ok(f);
    }
}

fn interreduce(
    mut basis: Vec<NPoly>,
    budget: &Budget,
    steps: &mut u64,
) -> Result<Option<Vec<NPoly>>, SystemError> {
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < basis.len() {
            if budget.expired() {
                return Err(SystemError::Timeout);
            }
            if *steps > GB_STEP_CAP {
                log::warn!("abandoning an interreduction past the effort cap");
                return Ok(None);
            }
            let f = basis.remove(i);
            let r = normal_form(f.clone(), &basis, budget, steps)?;
            if r.is_zero() {
                changed = true;
                continue;
            }
            let r = r.scaled();
            if r != f {
                changed = true;
            }
            basis.insert(i, r);
            i += 1;
        }
        if !changed {
            return Ok(Some(basis));
        }
    }
}

/// All rational roots; `None` when the polynomial has non-rational
/// coefficients of degree above one or coefficients too large to
/// factor.
fn rational_roots(u: &UniPoly<Coef>) -> Option<Vec<Coef>> {
    let mut u = u.clone();
    let mut roots: Vec<Coef> = Vec::new();
    // strip powers of the variable
    while !u.is_zero() && u.coeff(0).is_zero() {
        let coeffs = u.coeffs()[1..].to_vec();
        u = UniPoly::from_coeffs(coeffs);
        if roots.is_empty() {
            roots.push(Coef::zero());
        }
    }
    match u.degree() {
        None | Some(0) => return Some(roots),
        Some(1) => {
            roots.push(u.coeff(0).div(&u.coeff(1)).neg());
            return Some(roots);
        }
        _ => {}
    }
    // rational-root candidates require plain rational coefficients
    let mut ints: Vec<BigInt> = Vec::new();
    let mut den_lcm = BigInt::from(1);
    let mut rats = Vec::new();
    for c in u.coeffs() {
        let r = c.as_rat()?;
        den_lcm = den_lcm.lcm(r.denom());
        rats.push(r);
    }
    for r in &rats {
        let scaled = r.mul(&Rat::from_bigs(den_lcm.clone(), BigInt::from(1)));
        ints.push(scaled.to_integer().expect("cleared denominator"));
    }
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let p_divs = divisors(&a0)?;
    let q_divs = divisors(&an)?;
    for p in &p_divs {
        for q in &q_divs {
            for sign in [1i64, -1] {
                let cand = Rat::from_bigs(p * BigInt::from(sign), q.clone());
                let c = Coef::from_rat_value(&cand);
                if u.eval(&c).is_zero() && !roots.contains(&c) {
                    roots.push(c);
                }
            }
        }
    }
    Some(roots)
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    if n.is_zero() {
        return Some(vec![]);
    }
    let n = n.to_u64().filter(|&v| v <= 1_000_000_000_000)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d != n / d {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    out.sort();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Coef {
        Coef::from_int_value(n)
    }

    fn sys(unknowns: &[&str], eqs: Vec<NPoly>) -> CoeffSystem {
        CoeffSystem {
            unknowns: unknowns.iter().map(|s| s.to_string()).collect(),
            equations: eqs,
        }
    }

    #[test]
    fn bilinear_two_branches() {
        // u v - 1 = 0, u - v = 0 -> {u=1,v=1}, {u=-1,v=-1}
        let u = NPoly::var(2, 0);
        let v = NPoly::var(2, 1);
        let s = sys(
            &["u", "v"],
            vec![u.mul(&v).sub(&NPoly::one(2)), u.sub(&v)],
        );
        let branches = solve_system(&s, &Budget::unlimited()).unwrap();
        assert_eq!(branches.len(), 2);
        let vals: Vec<_> = branches
            .iter()
            .map(|b| {
                (
                    b.assignments["u"].clone(),
                    b.assignments["v"].clone(),
                )
            })
            .collect();
        assert!(vals.contains(&(BranchValue::Value(c(1)), BranchValue::Value(c(1)))));
        assert!(vals.contains(&(BranchValue::Value(c(-1)), BranchValue::Value(c(-1)))));
    }

    #[test]
    fn empty_system_is_all_free() {
        let s = sys(&["u", "v"], vec![]);
        let branches = solve_system(&s, &Budget::unlimited()).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].assignments["u"], BranchValue::Free);
        assert_eq!(branches[0].assignments["v"], BranchValue::Free);
    }

    #[test]
    fn inconsistent_system_has_no_branches() {
        let s = sys(&["u"], vec![NPoly::one(1)]);
        assert!(solve_system(&s, &Budget::unlimited()).unwrap().is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let s = sys(&["u", "v"], vec![]);
        assert_eq!(
            solve_system_with_cap(&s, 1, &Budget::unlimited()),
            Err(SystemError::CapExceeded {
                unknowns: 2,
                cap: 1
            })
        );
    }

    #[test]
    fn underdetermined_linear_gives_expression() {
        // u - v = 0 with v free
        let s = sys(&["u", "v"], vec![NPoly::var(2, 0).sub(&NPoly::var(2, 1))]);
        let branches = solve_system(&s, &Budget::unlimited()).unwrap();
        assert_eq!(branches.len(), 1);
        let b = &branches[0];
        assert_eq!(b.assignments["v"], BranchValue::Free);
        match &b.assignments["u"] {
            BranchValue::Expr(p) => assert_eq!(p, &NPoly::var(2, 1)),
            other => panic!("expected expression, got {:?}", other),
        }
        // instantiating at 0 and 1 gives u = v
        let at0 = b.instantiate(&s, &c(0));
        assert_eq!(at0["u"], c(0));
        let at1 = b.instantiate(&s, &c(1));
        assert_eq!(at1["u"], c(1));
    }

    #[test]
    fn planted_soundness() {
        // (u - 2)(u + 3) = 0, v + u = 1
        let u = NPoly::var(2, 0);
        let v = NPoly::var(2, 1);
        let e1 = u
            .sub(&NPoly::constant(2, c(2)))
            .mul(&u.add(&NPoly::constant(2, c(3))));
        let e2 = v.add(&u).sub(&NPoly::one(2));
        let s = sys(&["u", "v"], vec![e1.clone(), e2.clone()]);
        let branches = solve_system(&s, &Budget::unlimited()).unwrap();
        assert_eq!(branches.len(), 2);
        for b in &branches {
            let vals = b.instantiate(&s, &c(0));
            for eq in &s.equations {
                let mut r = eq.clone();
                r = r.substitute_value(0, &vals["u"]);
                r = r.substitute_value(1, &vals["v"]);
                assert!(r.is_zero());
            }
        }
    }
}
