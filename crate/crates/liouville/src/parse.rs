//! Recursive-descent parser for the ODE input grammar and for rendered
//! values (polynomials, rational functions, multiplier products).
//!
//! Grammar for equations:
//!
//! ```text
//! ode    := "dy/dx" "=" expr
//!         | expr "*" "dy/dx" ("+" | "-") expr "=" "0"
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | power
//! power  := atom ["^" nonneg-integer]
//! atom   := integer | "x" | "y" | parameter | "(" expr ")"
//! ```
//!
//! Implicit multiplication is rejected; `^` only takes nonnegative
//! integer exponents inside equations. Multiplier strings additionally
//! allow `exp(<expr>)` heads and signed rational exponents such as
//! `^-3/2`.

use crate::ode::{Foode, OdeError};
use crate::poly::MPoly;
use crate::rat::Rat;
use crate::ratfunc::RatFunc;
use crate::coef::Coef;
use num::bigint::BigInt;
use num::Num;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("non-rational input at position {pos}: {msg}")]
    NonRational { pos: usize, msg: String },
    #[error("denominator is identically zero (division at position {pos})")]
    ZeroDenominator { pos: usize },
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let pos = i;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
            }
            '+' => {
                toks.push(Token { tok: Tok::Plus, pos });
                i += 1;
            }
            '-' => {
                toks.push(Token { tok: Tok::Minus, pos });
                i += 1;
            }
            '*' => {
                toks.push(Token { tok: Tok::Star, pos });
                i += 1;
            }
            '/' => {
                toks.push(Token { tok: Tok::Slash, pos });
                i += 1;
            }
            '^' => {
                toks.push(Token { tok: Tok::Caret, pos });
                i += 1;
            }
            '(' => {
                toks.push(Token { tok: Tok::LParen, pos });
                i += 1;
            }
            ')' => {
                toks.push(Token { tok: Tok::RParen, pos });
                i += 1;
            }
            '=' => {
                toks.push(Token { tok: Tok::Eq, pos });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = BigInt::from_str_radix(&src[start..i], 10)
                    .map_err(|_| syntax(start, "bad integer literal"))?;
                toks.push(Token {
                    tok: Tok::Int(n),
                    pos: start,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    pos: start,
                });
            }
            other => return Err(syntax(pos, format!("unexpected character '{}'", other))),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    param: Option<&'a str>,
    end: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &str, param: Option<&'a str>) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            param,
            end: src.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, off: usize) -> Option<&Tok> {
        self.toks.get(self.pos + off).map(|t| &t.tok)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.pos).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<usize, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(t) if &t.tok == tok => Ok(t.pos),
            _ => Err(syntax(pos, format!("expected {}", what))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(syntax(self.here(), "unexpected trailing input"))
        }
    }

    /// `dy` `/` `dx` starting `off` tokens ahead of the cursor?
    fn dydx_at(&self, off: usize) -> bool {
        matches!(self.peek_at(off), Some(Tok::Ident(s)) if s == "dy")
            && matches!(self.peek_at(off + 1), Some(Tok::Slash))
            && matches!(self.peek_at(off + 2), Some(Tok::Ident(s)) if s == "dx")
    }

    fn at_dydx(&self) -> bool {
        self.dydx_at(0)
    }

    fn eat_dydx(&mut self) -> Result<(), ParseError> {
        if !self.at_dydx() {
            return Err(syntax(self.here(), "expected dy/dx"));
        }
        self.pos += 3;
        Ok(())
    }

    fn expr(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                // stop before `* dy/dx` so the equation-level parser
                // can pick up the derivative marker
                Some(Tok::Star) if self.dydx_at(1) => return Ok(acc),
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    let pos = self.here();
                    self.bump();
                    let rhs = self.factor()?;
                    if rhs.is_zero() {
                        return Err(ParseError::ZeroDenominator { pos });
                    }
                    acc = acc.div(&rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFunc, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let pos = self.here();
            match self.bump().map(|t| t.tok) {
                Some(Tok::Int(n)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| syntax(pos, "exponent out of range"))?;
                    let num = base.num().pow(e);
                    let den = base.den().pow(e);
                    return Ok(RatFunc::new(num, den));
                }
                _ => {
                    return Err(syntax(
                        pos,
                        "exponent must be a nonnegative integer literal",
                    ))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, ParseError> {
        let pos = self.here();
        match self.bump().map(|t| t.tok) {
            Some(Tok::Int(n)) => Ok(RatFunc::from_rat(&Rat::from_bigs(n, BigInt::from(1)))),
            Some(Tok::Ident(name)) => {
                if matches!(self.peek(), Some(Tok::LParen)) {
                    return Err(ParseError::NonRational {
                        pos,
                        msg: format!("function call '{}' is outside the grammar", name),
                    });
                }
                match name.as_str() {
                    "x" => Ok(RatFunc::from_poly(MPoly::var_x())),
                    "y" => Ok(RatFunc::from_poly(MPoly::var_y())),
                    s if Some(s) == self.param => {
                        Ok(RatFunc::from_poly(MPoly::constant(Coef::param())))
                    }
                    other => Err(ParseError::NonRational {
                        pos,
                        msg: format!("unknown symbol '{}'", other),
                    }),
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "closing parenthesis")?;
                Ok(inner)
            }
            _ => Err(syntax(pos, "expected a value")),
        }
    }

    /// Signed rational exponent for multiplier factors: `[-] int [/ int]`.
    fn signed_rational(&mut self) -> Result<Rat, ParseError> {
        let mut negative = false;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            negative = true;
        }
        let pos = self.here();
        let n = match self.bump().map(|t| t.tok) {
            Some(Tok::Int(n)) => n,
            _ => return Err(syntax(pos, "expected integer exponent")),
        };
        let mut r = Rat::from_bigs(n, BigInt::from(1));
        if matches!(self.peek(), Some(Tok::Slash))
            && matches!(self.peek_at(1), Some(Tok::Int(_)))
        {
            self.bump();
            let dpos = self.here();
            if let Some(Tok::Int(d)) = self.bump().map(|t| t.tok) {
                if d == BigInt::from(0) {
                    return Err(syntax(dpos, "zero exponent denominator"));
                }
                r = r.div(&Rat::from_bigs(d, BigInt::from(1)));
            }
        }
        if negative {
            r = r.neg();
        }
        Ok(r)
    }
}

fn single_param<'a>(params: &'a [String]) -> Result<Option<&'a str>, ParseError> {
    match params.len() {
        0 => Ok(None),
        1 => Ok(Some(params[0].as_str())),
        _ => Err(ParseError::NonRational {
            pos: 0,
            msg: "at most one named parameter is supported".to_string(),
        }),
    }
}

/// Parse a full equation into a normalized [`Foode`].
pub fn parse_foode(src: &str, params: &[String]) -> Result<Foode, ParseError> {
    let param = single_param(params)?;
    let mut p = Parser::new(src, param)?;
    let rhs = if p.at_dydx() {
        p.eat_dydx()?;
        p.expect(&Tok::Eq, "'='")?;
        let rhs = p.expr()?;
        p.expect_end()?;
        rhs
    } else {
        // expr1 * dy/dx +/- expr2 = 0
        let lhs = p.expr()?;
        let star_pos = p.expect(&Tok::Star, "'*' before dy/dx")?;
        p.eat_dydx()?;
        let negate_rhs = match p.bump().map(|t| t.tok) {
            Some(Tok::Plus) => true,
            Some(Tok::Minus) => false,
            _ => return Err(syntax(p.here(), "expected '+' or '-' after dy/dx")),
        };
        let rhs2 = p.expr()?;
        p.expect(&Tok::Eq, "'='")?;
        let zpos = p.here();
        match p.bump().map(|t| t.tok) {
            Some(Tok::Int(n)) if n == BigInt::from(0) => {}
            _ => return Err(syntax(zpos, "expected 0 on the right-hand side")),
        }
        p.expect_end()?;
        if lhs.is_zero() {
            return Err(ParseError::ZeroDenominator { pos: star_pos });
        }
        let rhs2 = if negate_rhs { rhs2.neg() } else { rhs2 };
        rhs2.div(&lhs)
    };
    Foode::from_ratio(&rhs, param.map(|s| s.to_string())).map_err(|e| match e {
        OdeError::ZeroDenominator => ParseError::ZeroDenominator { pos: 0 },
    })
}

/// Parse a bare expression into a rational function.
pub fn parse_expr(src: &str, params: &[String]) -> Result<RatFunc, ParseError> {
    let param = single_param(params)?;
    let mut p = Parser::new(src, param)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parse a rendered multiplier: `exp(<expr>) * p1^c1 * ...`.
/// Constant factors are dropped (the multiplier is defined up to a
/// constant scale); repeated bases merge by adding exponents.
pub fn parse_integrating_factor(
    src: &str,
    params: &[String],
) -> Result<(RatFunc, Vec<(MPoly, Rat)>), ParseError> {
    let param = single_param(params)?;
    let mut p = Parser::new(src, param)?;
    let mut r0 = RatFunc::zero();
    let mut factors: Vec<(MPoly, Rat)> = Vec::new();
    loop {
        let pos = p.here();
        // exp( ... ) head
        if matches!(p.peek(), Some(Tok::Ident(s)) if s == "exp")
            && matches!(p.peek_at(1), Some(Tok::LParen))
        {
            p.bump();
            p.bump();
            let inner = p.expr()?;
            p.expect(&Tok::RParen, "closing parenthesis")?;
            r0 = r0.add(&inner);
        } else {
            let base = p.atom()?;
            let exp = if matches!(p.peek(), Some(Tok::Caret)) {
                p.bump();
                p.signed_rational()?
            } else {
                Rat::one()
            };
            if !base.is_constant() {
                if !base.is_polynomial() {
                    return Err(ParseError::NonRational {
                        pos,
                        msg: "factor base must be a polynomial".to_string(),
                    });
                }
                let poly = base.num().normalized();
                if !exp.is_zero() {
                    if let Some(entry) = factors.iter_mut().find(|(q, _)| *q == poly) {
                        entry.1 = entry.1.add(&exp);
                    } else {
                        factors.push((poly, exp));
                    }
                }
            }
        }
        if matches!(p.peek(), Some(Tok::Star)) {
            p.bump();
            continue;
        }
        break;
    }
    p.expect_end()?;
    factors.retain(|(_, c)| !c.is_zero());
    Ok((r0, factors))
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
    fn parse_rhs_form() {
        let eq = parse_foode(
            "dy/dx = (3*x^2*y^2 + x^3 + 1)/(4*(x+1)*(x^2-x+1)*y)",
            &[],
        )
        .unwrap();
        let m = x()
            .pow(2)
            .mul(&y().pow(2))
            .mul(&int(3))
            .add(&x().pow(3))
            .add(&int(1));
        let n = x().pow(3).add(&int(1)).mul(&y()).mul(&int(4));
        assert_eq!(eq.m(), &m);
        assert_eq!(eq.n(), &n);
    }

    #[test]
    fn parse_polynomial_rhs() {
        let eq = parse_foode("dy/dx = y^2 + y*x + x - 1", &[]).unwrap();
        let m = y()
            .pow(2)
            .add(&x().mul(&y()))
            .add(&x())
            .sub(&int(1));
        assert_eq!(eq.m(), &m);
        assert_eq!(eq.n(), &int(1));
    }

    #[test]
    fn parse_implicit_form() {
        let eq = parse_foode("(x + 1) * dy/dx + y*(y - x) = 0", &[]).unwrap();
        // y' = y(x - y)/(x + 1)
        assert_eq!(eq.m(), &x().mul(&y()).sub(&y().pow(2)));
        assert_eq!(eq.n(), &x().add(&int(1)));
    }

    #[test]
    fn zero_denominator_is_reported() {
        assert!(matches!(
            parse_foode("dy/dx = 1/0", &[]),
            Err(ParseError::ZeroDenominator { .. })
        ));
    }

    #[test]
    fn syntax_error_carries_position() {
        match parse_foode("dy/dx = (x", &[]) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn unknown_symbol_is_non_rational() {
        assert!(matches!(
            parse_foode("dy/dx = z + 1", &[]),
            Err(ParseError::NonRational { .. })
        ));
        assert!(matches!(
            parse_foode("dy/dx = exp(x)", &[]),
            Err(ParseError::NonRational { .. })
        ));
    }

    #[test]
    fn implicit_multiplication_rejected() {
        assert!(parse_foode("dy/dx = 2x", &[]).is_err());
    }

    #[test]
    fn parameter_symbol() {
        let eq = parse_foode("dy/dx = (-b*y)/(x*y + 1)", &["b".to_string()], ).unwrap();
        assert_eq!(eq.param(), Some("b"));
        assert_eq!(eq.m(), &y().mul_coef(&Coef::param()).neg());
    }

    #[test]
    fn factor_roundtrip() {
        let (r0, factors) =
            parse_integrating_factor("exp(x) * y^-2 * (x + 1)^-2", &[]).unwrap();
        assert_eq!(r0, RatFunc::from_poly(x()));
        assert_eq!(
            factors,
            vec![
                (y(), Rat::from_int(-2)),
                (x().add(&int(1)), Rat::from_int(-2)),
            ]
        );
        let (r0, factors) = parse_integrating_factor("(x^3 + 1)^-3/2", &[]).unwrap();
        assert!(r0.is_zero());
        assert_eq!(factors, vec![(x().pow(3).add(&int(1)), Rat::new(-3, 2))]);
        let (r0, factors) = parse_integrating_factor("1", &[]).unwrap();
        assert!(r0.is_zero());
        assert!(factors.is_empty());
    }
}
