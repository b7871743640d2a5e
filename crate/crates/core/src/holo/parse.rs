//! Text syntax: `+ - * / ^`, parentheses, `z`, `i`, `pi`, `e`, `exp`, `log`,
//! `sqrt`, decimal literals and named real parameters. Exponents must fold
//! to real constants.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use num_complex::Complex64;

use super::{HoloError, HoloExpr};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, HoloError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |column: usize, message: String| HoloError::Parse { column, message };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when followed by a digit, so `2*e` stays Euler's number
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| err(col, format!("bad number `{text}`")))?;
            out.push((Tok::Num(v), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else {
            return Err(err(col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    params: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn error(&self, message: impl Into<String>) -> HoloError {
        HoloError::Parse { column: self.column(), message: message.into() }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), HoloError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<HoloExpr, HoloError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = lhs.add(&self.term()?);
            } else if self.eat('-') {
                lhs = lhs.sub(&self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<HoloExpr, HoloError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = lhs.mul(&self.unary()?);
            } else if self.eat('/') {
                let col = self.column();
                let rhs = self.unary()?;
                if rhs.is_zero() {
                    return Err(HoloError::Parse { column: col, message: "division by zero".into() });
                }
                lhs = lhs.div(&rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<HoloExpr, HoloError> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<HoloExpr, HoloError> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let col = self.column();
        let exponent = self.unary()?;
        match exponent.as_const() {
            Some(c) if c.im == 0.0 && c.re.is_finite() => Ok(base.powf(c.re)),
            _ => Err(HoloError::Parse { column: col, message: "exponent must be a real constant".into() }),
        }
    }

    fn primary(&mut self) -> Result<HoloExpr, HoloError> {
        let col = self.column();
        match self.toks.get(self.pos).map(|t| t.0.clone()) {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(HoloExpr::real(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "z" => Ok(HoloExpr::var()),
                    "i" => Ok(HoloExpr::constant(Complex64::new(0.0, 1.0))),
                    "pi" => Ok(HoloExpr::real(PI)),
                    "e" => Ok(HoloExpr::real(E)),
                    "exp" | "log" | "sqrt" => {
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(match name.as_str() {
                            "exp" => arg.exp(),
                            "log" => arg.ln(),
                            _ => arg.powf(0.5),
                        })
                    }
                    other => match self.params.get(other) {
                        Some(v) => Ok(HoloExpr::real(*v)),
                        None => Err(HoloError::Parse { column: col, message: format!("unknown name `{other}`") }),
                    },
                }
            }
            Some(Tok::Op(c)) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses an expression in `z` with named real parameters.
pub fn parse_expr_with(src: &str, params: &BTreeMap<String, f64>) -> Result<HoloExpr, HoloError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.chars().count() + 1, params };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

pub fn parse_expr(src: &str) -> Result<HoloExpr, HoloError> {
    parse_expr_with(src, &BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, z: Complex64) -> Complex64 {
        parse_expr(src).unwrap().eval(z)
    }

    #[test]
    fn precedence() {
        let z = Complex64::new(2.0, 0.0);
        assert_eq!(at("1 + 2*3", z).re, 7.0);
        assert_eq!(at("-z^2", z).re, -4.0);
        assert_eq!(at("2^3^2", z).re, 512.0);
        assert_eq!(at("z^-1", z).re, 0.5);
        assert_eq!(at("8/2/2", z).re, 2.0);
        assert!((at("2*e", z).re - 2.0 * E).abs() < 1e-15);
        assert_eq!(at("1e-3*z", z).re, 2e-3);
        assert!((at("exp(i*pi)", z) + 1.0).norm() < 1e-15);
        assert!((at("sqrt(z)", z).re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn parameters() {
        let mut p = BTreeMap::new();
        p.insert("mu".to_string(), 0.8);
        let e = parse_expr_with("(1 - mu^2)/(4*mu) * z^(-mu - 1)", &p).unwrap();
        let v = e.eval(Complex64::new(1.0, 0.0));
        assert!((v.re - 0.36 / 3.2).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_columns() {
        assert!(matches!(parse_expr("z + "), Err(HoloError::Parse { column: 5, .. })));
        assert!(matches!(parse_expr("z ^ z"), Err(HoloError::Parse { column: 5, .. })));
        assert!(matches!(parse_expr("foo(z)"), Err(HoloError::Parse { column: 1, .. })));
        assert!(matches!(parse_expr("z $ 2"), Err(HoloError::Parse { column: 3, .. })));
        assert!(matches!(parse_expr("(z"), Err(HoloError::Parse { .. })));
        assert!(matches!(parse_expr("1/0"), Err(HoloError::Parse { .. })));
    }
}
