use hypercurv_core::poly::{default_vars, parse_poly, QPoly, Rational};
use hypercurv_core::quadric::QuadricSpec;
use serde_json::{json, Value};

use crate::CliError;

pub enum Surface {
    Quadric(QuadricSpec),
    Poly { text: String, poly: QPoly },
}

fn parse_rational(text: &str) -> Result<Rational, CliError> {
    let p = parse_poly::<Rational>(text.trim(), &[])
        .map_err(|e| CliError::Input(format!("bad number '{text}': {e}")))?;
    Ok(p.coeff(&[]))
}

pub fn parse_rationals(list: &str) -> Result<Vec<Rational>, CliError> {
    list.split(',').map(parse_rational).collect()
}

pub fn parse_floats(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Input(format!("bad number '{s}'"))))
        .collect()
}

/// Largest `k` such that `xk` occurs in the text.
fn highest_variable(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut best = 0;
    for i in 0..bytes.len() {
        if bytes[i] != b'x' || (i > 0 && bytes[i - 1].is_ascii_alphanumeric()) {
            continue;
        }
        let digits: String = text[i + 1..].chars().take_while(|c| c.is_ascii_digit()).collect();
        if let Ok(k) = digits.parse::<usize>() {
            best = best.max(k);
        }
    }
    best
}

impl Surface {
    /// `min_vars` pads the variable list, e.g. for a polynomial that omits a coordinate.
    pub fn from_args(quadric: Option<&str>, poly: Option<&str>, min_vars: usize) -> Result<Self, CliError> {
        match (quadric, poly) {
            (Some(q), None) => {
                let a = parse_rationals(q)?;
                if a.is_empty() {
                    return Err(CliError::Input("empty coefficient list".into()));
                }
                Ok(Surface::Quadric(QuadricSpec::new(a)))
            }
            (None, Some(text)) => {
                let n = highest_variable(text).max(min_vars).max(1);
                let poly = parse_poly::<Rational>(text, &default_vars(n))
                    .map_err(|e| CliError::Input(format!("cannot parse polynomial: {e}")))?;
                Ok(Surface::Poly { text: text.to_string(), poly })
            }
            _ => Err(CliError::Input("give exactly one of --quadric or --poly".into())),
        }
    }

    pub fn polynomial(&self) -> QPoly {
        match self {
            Surface::Quadric(q) => q.polynomial(),
            Surface::Poly { poly, .. } => poly.clone(),
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            Surface::Quadric(q) => q.n(),
            Surface::Poly { poly, .. } => poly.nvars(),
        }
    }

    pub fn describe(&self) -> Value {
        let p = self.polynomial();
        let text = p.to_text(&default_vars(p.nvars()));
        match self {
            Surface::Quadric(q) => json!({
                "kind": "quadric",
                "coefficients": q.coefficients().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "class": q.classify(),
                "polynomial": text,
            }),
            Surface::Poly { text: input, .. } => json!({
                "kind": "poly",
                "input": input,
                "polynomial": text,
            }),
        }
    }

    pub fn echo(&self) -> String {
        match self {
            Surface::Quadric(q) => format!(
                "--quadric {}",
                q.coefficients().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
            ),
            Surface::Poly { text, .. } => format!("--poly {text:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_scan() {
        assert_eq!(highest_variable("x1^2 + 3*x12 - x3"), 12);
        assert_eq!(highest_variable("max + 1"), 0);
    }

    #[test]
    fn rational_lists() {
        let a = parse_rationals("1, -2,1/2,0.25").unwrap();
        assert_eq!(a[2], Rational::new(1.into(), 2.into()));
        assert_eq!(a[3], Rational::new(1.into(), 4.into()));
        assert!(parse_rationals("1,,2").is_err());
    }
}
