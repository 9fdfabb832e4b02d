use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{parse_poly, CPoly, Coeff, MultiPoly, ParseError, TextCoeff};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("equation {index} has {got} variables, system declares {expected}")]
    VariableCount { index: usize, expected: usize, got: usize },
    #[error("symmetry action {0:?} has the wrong length")]
    ActionLength(String),
    #[error("missing `vars:` header line")]
    MissingHeader,
    #[error("equation {line}: {source}")]
    Parse { line: usize, source: ParseError },
}

/// Coordinate sign flips `z_i -> signs[i] * z_i` mapping solutions to solutions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignAction {
    pub name: String,
    pub signs: Vec<i8>,
}

impl SignAction {
    pub fn new(name: impl Into<String>, signs: Vec<i8>) -> Self {
        SignAction { name: name.into(), signs }
    }

    pub fn identity(n: usize) -> Self {
        SignAction::new("identity", vec![1; n])
    }

    pub fn apply(&self, z: &[Complex64]) -> Vec<Complex64> {
        z.iter()
            .zip(&self.signs)
            .map(|(v, &s)| if s < 0 { -v } else { *v })
            .collect()
    }

    pub fn compose(&self, other: &SignAction) -> SignAction {
        SignAction::new(
            format!("{}∘{}", self.name, other.name),
            self.signs.iter().zip(&other.signs).map(|(a, b)| a * b).collect(),
        )
    }

    pub fn is_identity(&self) -> bool {
        self.signs.iter().all(|&s| s > 0)
    }
}

/// Ordered equations over named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem<C: Coeff> {
    vars: Vec<String>,
    eqs: Vec<MultiPoly<C>>,
    symmetry: Vec<SignAction>,
}

impl<C: Coeff> PolySystem<C> {
    pub fn new(vars: Vec<String>, eqs: Vec<MultiPoly<C>>) -> Result<Self, SystemError> {
        for (index, e) in eqs.iter().enumerate() {
            if e.nvars() != vars.len() {
                return Err(SystemError::VariableCount {
                    index,
                    expected: vars.len(),
                    got: e.nvars(),
                });
            }
        }
        Ok(PolySystem { vars, eqs, symmetry: Vec::new() })
    }

    pub fn with_symmetry(mut self, actions: Vec<SignAction>) -> Result<Self, SystemError> {
        for a in &actions {
            if a.signs.len() != self.vars.len() {
                return Err(SystemError::ActionLength(a.name.clone()));
            }
        }
        self.symmetry = actions;
        Ok(self)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn eqs(&self) -> &[MultiPoly<C>] {
        &self.eqs
    }

    pub fn symmetry(&self) -> &[SignAction] {
        &self.symmetry
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn len(&self) -> usize {
        self.eqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.eqs.len() == self.vars.len()
    }

    /// Product of the equation degrees; zero equations are skipped.
    pub fn bezout(&self) -> BigUint {
        self.eqs
            .iter()
            .filter_map(MultiPoly::total_degree)
            .fold(BigUint::from(1u32), |acc, d| acc * BigUint::from(d))
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.eqs.iter().map(MultiPoly::degree).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn to_complex(&self) -> PolySystem<Complex64> {
        PolySystem {
            vars: self.vars.clone(),
            eqs: self.eqs.iter().map(MultiPoly::to_complex).collect(),
            symmetry: self.symmetry.clone(),
        }
    }

    /// Values of all equations at a complex point.
    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.eqs
            .iter()
            .map(|e| e.eval_c64(z).expect("dimension checked at construction"))
            .collect()
    }

    /// Max modulus over equation values.
    pub fn residual(&self, z: &[Complex64]) -> f64 {
        self.eval(z).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Residual relative to `1 + ‖z‖^maxdeg`.
    pub fn scaled_residual(&self, z: &[Complex64]) -> f64 {
        let norm = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
        self.residual(z) / (1.0 + norm.powi(self.max_degree() as i32))
    }

    pub fn push(&mut self, eq: MultiPoly<C>) {
        assert_eq!(eq.nvars(), self.vars.len());
        self.eqs.push(eq);
    }
}

impl PolySystem<Complex64> {
    pub fn from_cpolys(vars: Vec<String>, eqs: Vec<CPoly>) -> Result<Self, SystemError> {
        Self::new(vars, eqs)
    }
}

impl<C: TextCoeff> PolySystem<C> {
    /// Header line `vars: a, b, c` followed by one equation per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("vars: {}\n", self.vars.join(", "));
        for e in &self.eqs {
            s.push_str(&e.to_text(&self.vars));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self, SystemError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or(SystemError::MissingHeader)?;
        let rest = header.strip_prefix("vars:").ok_or(SystemError::MissingHeader)?;
        let vars: Vec<String> = rest
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        let eqs = lines
            .enumerate()
            .map(|(line, l)| parse_poly(l, &vars).map_err(|source| SystemError::Parse { line, source }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vars, eqs)
    }
}

impl<C: TextCoeff> fmt::Display for PolySystem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{default_vars, QPoly, Rational};

    #[test]
    fn bezout_and_square() {
        let v = default_vars(2);
        let eqs = vec![
            parse_poly::<Rational>("x1^2 - 1", &v).unwrap(),
            parse_poly("x2^3 - 4", &v).unwrap(),
        ];
        let s = PolySystem::new(v, eqs).unwrap();
        assert!(s.is_square());
        assert_eq!(s.bezout(), BigUint::from(6u32));
    }

    #[test]
    fn zero_equation_skipped_in_bezout() {
        let s = PolySystem::new(default_vars(1), vec![QPoly::zero(1), QPoly::var(1, 0).pow(2)]).unwrap();
        assert_eq!(s.bezout(), BigUint::from(2u32));
    }

    #[test]
    fn text_round_trip() {
        let v = vec!["x".to_string(), "lambda".to_string()];
        let eqs = vec![
            parse_poly::<Rational>("x^2 - 1/3", &v).unwrap(),
            parse_poly("4*lambda^2*x^2 - 1", &v).unwrap(),
        ];
        let s = PolySystem::new(v, eqs).unwrap();
        let back = PolySystem::<Rational>::parse_text(&s.to_text()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_mismatched_equations() {
        let r = PolySystem::new(default_vars(2), vec![QPoly::var(3, 0)]);
        assert!(matches!(r, Err(SystemError::VariableCount { .. })));
    }

    #[test]
    fn sign_action_composition() {
        let a = SignAction::new("a", vec![1, -1, -1]);
        let b = SignAction::new("b", vec![-1, -1, 1]);
        assert_eq!(a.compose(&b).signs, vec![-1, 1, -1]);
        assert!(a.compose(&a).is_identity());
    }
}
