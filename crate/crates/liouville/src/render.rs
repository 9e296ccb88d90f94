//! Deterministic text output for every value the crate produces.
//!
//! Everything rendered here parses back through [`crate::parse`]; the
//! term order is graded lex, so equal values always print identically.

use crate::coef::Coef;
use crate::poly::MPoly;
use crate::rat::Rat;
use crate::ratfunc::RatFunc;
use crate::upoly::UniPoly;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Style {
    /// Human spacing: `x^2 + 2*x*y - 1`.
    Plain,
    /// Compact form for embedding in JSON: `x^2+2*x*y-1`.
    Json,
}

impl Style {
    fn plus(&self) -> &'static str {
        match self {
            Style::Plain => " + ",
            Style::Json => "+",
        }
    }

    fn minus(&self) -> &'static str {
        match self {
            Style::Plain => " - ",
            Style::Json => "-",
        }
    }

    fn times(&self) -> &'static str {
        match self {
            Style::Plain => " * ",
            Style::Json => "*",
        }
    }

    /// Multiplication separator for composed renderings.
    pub fn times_str(&self) -> &'static str {
        self.times()
    }
}

pub fn rat_str(r: &Rat) -> String {
    r.to_string()
}

/// Univariate polynomial in a named variable, descending powers.
pub fn upoly_str(p: &UniPoly<Rat>, var: &str, style: Style) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for i in (0..p.coeffs().len()).rev() {
        let c = p.coeff(i);
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(if neg { style.minus() } else { style.plus() });
        }
        let var_part = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{}^{}", var, i),
        };
        if var_part.is_empty() {
            out.push_str(&rat_str(&mag));
        } else if mag.is_one() {
            out.push_str(&var_part);
        } else {
            out.push_str(&format!("{}*{}", rat_str(&mag), var_part));
        }
    }
    out
}

fn upoly_fragment(p: &UniPoly<Rat>, var: &str, style: Style) -> String {
    let nonzero = p.coeffs().iter().filter(|c| !c.is_zero()).count();
    let s = upoly_str(p, var, style);
    if nonzero > 1 {
        format!("({})", s)
    } else {
        s
    }
}

/// A nonnegative-leading coefficient as a multiplicative fragment.
/// Left-associative `/` and `*` make `num/den*mono` parse back as
/// `(num/den)*mono`, so single-term numerators and denominators need no
/// parentheses.
fn coef_str(c: &Coef, param: &str, style: Style) -> String {
    if let Some(r) = c.as_rat() {
        return rat_str(&r);
    }
    let num = upoly_fragment(c.num(), param, style);
    if c.den().is_one() {
        num
    } else {
        format!("{}/{}", num, upoly_fragment(c.den(), param, style))
    }
}

fn mono_str(dx: u32, dy: u32) -> String {
    let mut parts = Vec::new();
    match dx {
        0 => {}
        1 => parts.push("x".to_string()),
        _ => parts.push(format!("x^{}", dx)),
    }
    match dy {
        0 => {}
        1 => parts.push("y".to_string()),
        _ => parts.push(format!("y^{}", dy)),
    }
    parts.join("*")
}

/// Bivariate polynomial, graded-lex descending.
pub fn poly_str(p: &MPoly, style: Style, param: Option<&str>) -> String {
    let param = param.unwrap_or("b");
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (m, c) in p.terms().rev() {
        let neg = c.display_negative();
        let mag = if neg { c.neg() } else { c.clone() };
        if first {
            if neg {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(if neg { style.minus() } else { style.plus() });
        }
        let mono = mono_str(m.dx, m.dy);
        if mono.is_empty() {
            out.push_str(&coef_str(&mag, param, style));
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{}*{}", coef_str(&mag, param, style), mono));
        }
    }
    out
}

/// True when the polynomial prints as a single power of one variable
/// with unit coefficient, i.e. needs no parentheses as a base or
/// denominator.
fn is_bare_power(p: &MPoly) -> bool {
    if p.num_terms() != 1 {
        return false;
    }
    let (m, c) = p.terms().next().unwrap();
    c.is_one() && (m.dx == 0 || m.dy == 0) && m.total() > 0
}

pub fn ratfunc_str(f: &RatFunc, style: Style, param: Option<&str>) -> String {
    if f.is_polynomial() {
        return poly_str(f.num(), style, param);
    }
    let num = f.num();
    let num_str = if num.num_terms() == 1 {
        poly_str(num, style, param)
    } else {
        format!("({})", poly_str(num, style, param))
    };
    let den = f.den();
    let den_str = if is_bare_power(den) {
        poly_str(den, style, param)
    } else {
        format!("({})", poly_str(den, style, param))
    };
    format!("{}/{}", num_str, den_str)
}

/// `exp(r0) * p1^c1 * ...`; the exponential is never expanded.
pub fn factor_str(r0: &RatFunc, factors: &[(MPoly, Rat)], style: Style, param: Option<&str>) -> String {
    let mut pieces = Vec::new();
    if !r0.is_zero() {
        pieces.push(format!("exp({})", ratfunc_str(r0, style, param)));
    }
    for (p, c) in factors {
        let base = if is_bare_power(p) && p.total_degree() == 1 {
            poly_str(p, style, param)
        } else {
            format!("({})", poly_str(p, style, param))
        };
        if c.is_one() {
            pieces.push(base);
        } else {
            pieces.push(format!("{}^{}", base, rat_str(c)));
        }
    }
    if pieces.is_empty() {
        "1".to_string()
    } else {
        pieces.join(style.times())
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
    fn poly_rendering() {
        assert_eq!(poly_str(&MPoly::zero(), Style::Plain, None), "0");
        let p = x().pow(3).add(&int(1));
        assert_eq!(poly_str(&p, Style::Plain, None), "x^3 + 1");
        assert_eq!(poly_str(&p, Style::Json, None), "x^3+1");
        let q = x()
            .mul(&y())
            .mul_rat(&Rat::new(-1, 2))
            .add(&y().pow(2))
            .sub(&int(3));
        assert_eq!(poly_str(&q, Style::Plain, None), "-1/2*x*y + y^2 - 3");
    }

    #[test]
    fn factor_rendering() {
        // exp(x) * y^-2 * (x + 1)^-2
        let r0 = RatFunc::from_poly(x());
        let factors = vec![
            (y(), Rat::from_int(-2)),
            (x().add(&int(1)), Rat::from_int(-2)),
        ];
        assert_eq!(
            factor_str(&r0, &factors, Style::Plain, None),
            "exp(x) * y^-2 * (x + 1)^-2"
        );
        assert_eq!(factor_str(&RatFunc::zero(), &[], Style::Plain, None), "1");
    }

    #[test]
    fn param_coefficients() {
        // (1/b) * y
        let p = y().mul_coef(&Coef::param().inv());
        assert_eq!(poly_str(&p, Style::Plain, Some("b")), "1/b*y");
    }

    #[test]
    fn ratfunc_rendering() {
        let f = RatFunc::new(x().add(&y()), x().mul(&y()));
        assert_eq!(ratfunc_str(&f, Style::Plain, None), "(x + y)/(x*y)");
        let g = RatFunc::new(x(), y().pow(2));
        assert_eq!(ratfunc_str(&g, Style::Plain, None), "x/y^2");
    }
}
