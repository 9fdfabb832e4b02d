//! Human-readable infix format: `x1^2 + 2*x2^2 + 4*x3^2 - 1`.
//!
//! Printing emits terms in descending graded-lex order. Rational coefficients
//! print as `p/q`; complex coefficients print with Rust's shortest round-trip
//! float formatting and `I` as the imaginary unit, so `parse(print(p)) == p`
//! holds exactly in both domains.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Signed;
use thiserror::Error;

use super::{Coeff, MultiPoly, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("unexpected character {0:?} at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected token {0:?}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("invalid number literal {0:?}")]
    BadNumber(String),
    #[error("exponent must be a non-negative integer, got {0:?}")]
    BadExponent(String),
    #[error("division by a non-constant or zero expression")]
    BadDivision,
    #[error("imaginary unit is not available for exact coefficients")]
    ImaginaryInExact,
}

/// Names `x1, …, xn`.
pub fn default_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

pub trait TextCoeff: Coeff {
    fn parse_number(lit: &str) -> Option<Self>;
    fn imaginary_unit() -> Option<Self>;
    /// `(negative, magnitude_text, magnitude_is_one)` for a term coefficient.
    fn term_parts(&self) -> (bool, String, bool);
}

impl TextCoeff for Rational {
    fn parse_number(lit: &str) -> Option<Self> {
        parse_decimal_exact(lit)
    }

    fn imaginary_unit() -> Option<Self> {
        None
    }

    fn term_parts(&self) -> (bool, String, bool) {
        let neg = self.is_negative();
        let a = self.abs();
        let text = if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        };
        let unit = a == Coeff::one();
        (neg, text, unit)
    }
}

impl TextCoeff for Complex64 {
    fn parse_number(lit: &str) -> Option<Self> {
        lit.parse::<f64>().ok().map(|v| Complex64::new(v, 0.0))
    }

    fn imaginary_unit() -> Option<Self> {
        Some(Complex64::new(0.0, 1.0))
    }

    fn term_parts(&self) -> (bool, String, bool) {
        if self.im == 0.0 {
            (self.re < 0.0, format!("{:?}", self.re.abs()), self.re.abs() == 1.0)
        } else if self.re == 0.0 {
            (self.im < 0.0, format!("{:?}*I", self.im.abs()), false)
        } else {
            let sign = if self.im < 0.0 { '-' } else { '+' };
            (false, format!("({:?} {} {:?}*I)", self.re, sign, self.im.abs()), false)
        }
    }
}

fn parse_decimal_exact(lit: &str) -> Option<Rational> {
    let (mantissa, exp) = match lit.find(['e', 'E']) {
        Some(i) => (&lit[..i], lit[i + 1..].parse::<i64>().ok()?),
        None => (lit, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let n: BigInt = digits.parse().ok()?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

impl<C: TextCoeff> MultiPoly<C> {
    /// Prints with the given variable names (must have length `nvars`).
    pub fn to_text(&self, vars: &[String]) -> String {
        assert_eq!(vars.len(), self.nvars());
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms().rev().enumerate() {
            let (neg, mag, unit) = c.term_parts();
            let mono: Vec<String> = m
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        vars[v].clone()
                    } else {
                        format!("{}^{}", vars[v], e)
                    }
                })
                .collect();
            let body = if mono.is_empty() {
                mag
            } else if unit {
                mono.join("*")
            } else {
                format!("{}*{}", mag, mono.join("*"))
            };
            match (i, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
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
            out.push(Token::Num(chars[start..i].iter().collect()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(ParseError::UnexpectedChar(c, i));
        }
    }
    Ok(out)
}

struct Parser<'a, C: TextCoeff> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a [String],
    _c: std::marker::PhantomData<C>,
}

impl<'a, C: TextCoeff> Parser<'a, C> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly<C>, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('+') {
                acc = acc + self.unary()?;
            } else if self.eat('-') {
                acc = acc - self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MultiPoly<C>, ParseError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.term()
        }
    }

    fn term(&mut self) -> Result<MultiPoly<C>, ParseError> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc * self.power()?;
            } else if self.eat('/') {
                let d = self.power()?;
                acc = acc.div_constant(&d).map_err(|_| ParseError::BadDivision)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<MultiPoly<C>, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.next() {
                Some(Token::Num(s)) => {
                    let e: u32 = s.parse().map_err(|_| ParseError::BadExponent(s.clone()))?;
                    Ok(base.pow(e))
                }
                Some(t) => Err(ParseError::BadExponent(format!("{t:?}"))),
                None => Err(ParseError::UnexpectedEnd),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly<C>, ParseError> {
        let n = self.vars.len();
        match self.next() {
            Some(Token::Num(s)) => {
                let c = C::parse_number(&s).ok_or(ParseError::BadNumber(s))?;
                Ok(MultiPoly::constant(n, c))
            }
            Some(Token::Ident(name)) => {
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    Ok(MultiPoly::var(n, i))
                } else if name == "I" {
                    C::imaginary_unit()
                        .map(|c| MultiPoly::constant(n, c))
                        .ok_or(ParseError::ImaginaryInExact)
                } else {
                    Err(ParseError::UnknownVariable(name))
                }
            }
            Some(Token::Op('(')) => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return match self.peek() {
                        Some(t) => Err(ParseError::UnexpectedToken(format!("{t:?}"))),
                        None => Err(ParseError::UnexpectedEnd),
                    };
                }
                Ok(e)
            }
            Some(t) => Err(ParseError::UnexpectedToken(format!("{t:?}"))),
            None => Err(ParseError::UnexpectedEnd),
        }
    }
}

/// Parses infix text over the named variables.
pub fn parse_poly<C: TextCoeff>(text: &str, vars: &[String]) -> Result<MultiPoly<C>, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser::<C> { toks, pos: 0, vars, _c: std::marker::PhantomData };
    let out = p.expr()?;
    match p.peek() {
        None => Ok(out),
        Some(t) => Err(ParseError::UnexpectedToken(format!("{t:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{random_complex_poly, random_dense_poly, QPoly};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prints_ellipsoid() {
        let p: QPoly = parse_poly("x1^2 + 2*x2^2 + 4*x3^2 - 1", &default_vars(3)).unwrap();
        assert_eq!(p.to_string(), "x1^2 + 2*x2^2 + 4*x3^2 - 1");
    }

    #[test]
    fn exact_decimals() {
        let p: QPoly = parse_poly("0.25*x1 - 1.5e2", &default_vars(1)).unwrap();
        assert_eq!(p.to_string(), "1/4*x1 - 150");
    }

    #[test]
    fn errors() {
        let v = default_vars(2);
        assert!(matches!(parse_poly::<Rational>("x3 + 1", &v), Err(ParseError::UnknownVariable(_))));
        assert!(matches!(parse_poly::<Rational>("x1 ^ x2", &v), Err(ParseError::BadExponent(_))));
        assert!(matches!(parse_poly::<Rational>("x1 / x2", &v), Err(ParseError::BadDivision)));
        assert!(matches!(parse_poly::<Rational>("2*I", &v), Err(ParseError::ImaginaryInExact)));
        assert!(matches!(parse_poly::<Rational>("(x1 + 1", &v), Err(ParseError::UnexpectedEnd)));
        assert!(matches!(parse_poly::<Rational>("x1 $ 2", &v), Err(ParseError::UnexpectedChar('$', 3))));
    }

    #[test]
    fn complex_literals() {
        let v = default_vars(1);
        let p: MultiPoly<Complex64> = parse_poly("(1.5 - 2*I)*x1^2 + 3*I", &v).unwrap();
        assert_eq!(p.coeff(&[2]), Complex64::new(1.5, -2.0));
        assert_eq!(p.coeff(&[0]), Complex64::new(0.0, 3.0));
    }

    proptest! {
        #[test]
        fn complex_round_trip(seed in 0u64..500, n in 1usize..4, d in 0u32..4) {
            let p = random_complex_poly(n, d, seed);
            let v = default_vars(n);
            let back: MultiPoly<Complex64> = parse_poly(&p.to_text(&v), &v).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn real_float_round_trip(seed in 0u64..500) {
            let p = random_dense_poly(3, 3, seed);
            let v = default_vars(3);
            let back: MultiPoly<Complex64> = parse_poly(&p.to_text(&v), &v).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn rational_round_trip(
            terms in prop::collection::vec((prop::collection::vec(0u32..4, 2), -50i64..50, 1i64..9), 0..6)
        ) {
            let p = QPoly::from_terms(2, terms.into_iter().map(|(e, n, d)| (e, Rational::from_ratio(n, d))));
            let v = default_vars(2);
            let back: QPoly = parse_poly(&p.to_text(&v), &v).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
