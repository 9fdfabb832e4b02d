//! Sparse multivariate polynomials over exact rationals or complex floats.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic, so iteration order (and therefore printing) is
//! deterministic. Zero coefficients are never stored.

mod coeff;
mod random;
mod system;
mod text;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub use coeff::{rational_from_f64, rational_to_f64, Coeff, Domain, Rational};
pub use random::{random_complex_poly, random_dense_poly, random_homogeneous_poly};
pub use system::{PolySystem, SignAction, SystemError};
pub use text::{default_vars, parse_poly, ParseError, TextCoeff};

/// Complex-floating polynomial.
pub type CPoly = MultiPoly<Complex64>;
/// Exact rational polynomial.
pub type QPoly = MultiPoly<Rational>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot homogenize the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("division by a non-constant or zero polynomial")]
    BadDivision,
}

/// Exponent vector with graded-lex ordering.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<C: Coeff> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(nvars, Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, Monomial(e), C::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: C) -> Self {
        assert_eq!(m.0.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { nvars, terms }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree; 0 for the zero polynomial (see [`Self::is_zero`]).
    pub fn degree(&self) -> u32 {
        self.total_degree().unwrap_or(0)
    }

    /// Maximum total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Evaluates in the coefficient domain (exact for rationals).
    pub fn eval(&self, point: &[C]) -> Result<C, PolyError> {
        self.check_dim(point.len())?;
        let max_deg = self.degree() as usize;
        let powers: Vec<Vec<C>> = point
            .iter()
            .map(|x| {
                let mut row = Vec::with_capacity(max_deg + 1);
                row.push(C::one());
                for k in 1..=max_deg {
                    let next = row[k - 1].clone() * x.clone();
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t * powers[v][e as usize].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Evaluates at a complex point, converting coefficients as needed.
    pub fn eval_c64(&self, point: &[Complex64]) -> Result<Complex64, PolyError> {
        self.check_dim(point.len())?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_c64();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= point[v].powu(e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Real part of the value at a real point.
    pub fn eval_real(&self, point: &[f64]) -> Result<f64, PolyError> {
        let pc: Vec<Complex64> = point.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Ok(self.eval_c64(&pc)?.re)
    }

    fn check_dim(&self, got: usize) -> Result<(), PolyError> {
        if got != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got });
        }
        Ok(())
    }

    /// Formal partial derivative with respect to `var`.
    pub fn diff(&self, var: usize) -> Self {
        assert!(var < self.nvars, "variable index {var} out of range");
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c.clone() * C::from_i64(e as i64));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.diff(i)).collect()
    }

    /// Homogenizes with a new variable placed at index 0: the result `F`
    /// satisfies `F(1, x) = p(x)` and is homogeneous of degree `deg p`.
    pub fn homogenize(&self) -> Result<Self, PolyError> {
        let d = self.total_degree().ok_or(PolyError::ZeroPolynomial)?;
        let mut out = Self::zero(self.nvars + 1);
        for (m, c) in &self.terms {
            let mut exps = Vec::with_capacity(self.nvars + 1);
            exps.push(d - m.degree());
            exps.extend_from_slice(&m.0);
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Sets variable `var` to 1 and removes it.
    pub fn dehomogenize(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps.remove(var);
            out.add_term(Monomial(exps), c.clone());
        }
        out
    }

    /// Re-indexes variables into a larger ring: variable `i` becomes `map[i]`.
    pub fn embed(&self, new_nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let mut out = Self::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0; new_nvars];
            for (i, &e) in m.0.iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(Monomial(exps), c.clone());
        }
        out
    }

    /// Substitutes polynomial `subs[i]` for variable `i`.
    pub fn compose(&self, subs: &[MultiPoly<C>]) -> MultiPoly<C> {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map_or(0, |s| s.nvars);
        let mut out = MultiPoly::zero(target);
        let mut pow_cache: Vec<Vec<MultiPoly<C>>> =
            subs.iter().map(|s| vec![MultiPoly::one(s.nvars)]).collect();
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                let cache = &mut pow_cache[i];
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * &subs[i];
                    cache.push(next);
                }
                if e > 0 {
                    t = &t * &cache[e as usize];
                }
            }
            out = out + t;
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn to_complex(&self) -> CPoly {
        self.map_coeffs(Coeff::to_c64)
    }

    /// Divides by a nonzero constant polynomial.
    pub fn div_constant(&self, other: &Self) -> Result<Self, PolyError> {
        if !other.is_constant() || other.is_zero() {
            return Err(PolyError::BadDivision);
        }
        let c = other.coeff(&vec![0; other.nvars]);
        let inv = c.inv().ok_or(PolyError::BadDivision)?;
        Ok(self.scale(&inv))
    }

    /// Largest coefficient modulus (after conversion to f64).
    pub fn max_coeff_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_c64().norm())
            .fold(0.0, f64::max)
    }

    /// Coefficient-wise max distance to `other`.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        (self - other).max_coeff_abs()
    }
}

impl<C: Coeff> Add for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Mul for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl<C: Coeff> $tr for MultiPoly<C> {
            type Output = MultiPoly<C>;
            fn $f(self, rhs: MultiPoly<C>) -> MultiPoly<C> {
                (&self).$f(&rhs)
            }
        }
        impl<C: Coeff> $tr<&MultiPoly<C>> for MultiPoly<C> {
            type Output = MultiPoly<C>;
            fn $f(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Coeff> Neg for MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        -&self
    }
}

impl<C: TextCoeff> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&default_vars(self.nvars)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn ellipsoid() -> QPoly {
        parse_poly("x1^2 + 2*x2^2 + 4*x3^2 - 1", &default_vars(3)).unwrap()
    }

    #[test]
    fn eval_ellipsoid_on_axis() {
        let p = ellipsoid();
        assert_eq!(p.eval(&[q(1), q(0), q(0)]).unwrap(), q(0));
        let pc = p.to_complex();
        let z = Complex64::new(0.0, 0.0);
        let v = pc.eval(&[Complex64::new(1.0, 0.0), z, z]).unwrap();
        assert_eq!(v, z);
    }

    #[test]
    fn eval_zero_and_monomial() {
        let z = QPoly::zero(2);
        assert_eq!(z.eval(&[q(5), q(-7)]).unwrap(), q(0));
        let x2 = QPoly::var(1, 0).pow(2);
        assert_eq!(x2.eval(&[q(3)]).unwrap(), q(9));
    }

    #[test]
    fn eval_dimension_mismatch() {
        let p = ellipsoid();
        assert_eq!(
            p.eval(&[q(1)]),
            Err(PolyError::DimensionMismatch { expected: 3, got: 1 })
        );
    }

    #[test]
    fn diff_examples() {
        let vars = default_vars(3);
        let p = parse_poly::<Rational>("3*x1^2 + 5*x2^2 + 7*x3^2 - 1", &vars).unwrap();
        assert_eq!(p.diff(0), parse_poly("6*x1", &vars).unwrap());
        let c = QPoly::constant(3, q(4));
        assert!(c.diff(1).is_zero());
        let p = parse_poly::<Rational>("x1*x2^3", &vars).unwrap();
        assert_eq!(p.diff(1), parse_poly("3*x1*x2^2", &vars).unwrap());
    }

    #[test]
    fn homogenize_examples() {
        let v3 = default_vars(3);
        let hv = ["x0", "x1", "x2", "x3"].map(String::from);
        let p = parse_poly::<Rational>("x1^2 + x2 - 1", &v3).unwrap();
        assert_eq!(
            p.homogenize().unwrap(),
            parse_poly("x1^2 + x2*x0 - x0^2", &hv).unwrap()
        );
        let p = parse_poly::<Rational>("x1^2 + x2^2", &v3).unwrap();
        let h = p.homogenize().unwrap();
        assert_eq!(h, parse_poly("x1^2 + x2^2", &hv).unwrap());
        assert_eq!(h.degree_in(0), 0);
        let e = parse_poly::<Rational>("3*x1^2 + 5*x2^2 + 7*x3^2 - 1", &v3).unwrap();
        let h = e.homogenize().unwrap();
        assert_eq!(h, parse_poly("3*x1^2 + 5*x2^2 + 7*x3^2 - x0^2", &hv).unwrap());
        assert_eq!(h.dehomogenize(0), e);
        assert_eq!(QPoly::zero(2).homogenize(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn degree_of_zero_is_flagged() {
        let z = CPoly::zero(3);
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
        assert_eq!(z.total_degree(), None);
    }

    #[test]
    fn grlex_order() {
        let a = Monomial::new(vec![0, 2]);
        let b = Monomial::new(vec![1, 0]);
        let c = Monomial::new(vec![2, 0]);
        assert!(b < a);
        assert!(a < c);
    }

    fn small_qpoly(nvars: usize) -> impl Strategy<Value = QPoly> {
        prop::collection::vec(
            (prop::collection::vec(0u32..3, nvars), -5i64..6),
            0..6,
        )
        .prop_map(move |ts| QPoly::from_terms(nvars, ts.into_iter().map(|(e, c)| (e, q(c)))))
    }

    proptest! {
        #[test]
        fn product_evaluates_to_product_exact(
            p in small_qpoly(3), r in small_qpoly(3),
            pt in prop::collection::vec(-4i64..5, 3)
        ) {
            let pt: Vec<Rational> = pt.into_iter().map(q).collect();
            let lhs = (&p * &r).eval(&pt).unwrap();
            prop_assert_eq!(lhs, p.eval(&pt).unwrap() * r.eval(&pt).unwrap());
        }

        #[test]
        fn product_evaluates_to_product_float(seed in 0u64..1000) {
            let p = random_complex_poly(3, 3, seed);
            let r = random_complex_poly(3, 2, seed + 7);
            let pt = [Complex64::new(0.3, -0.7), Complex64::new(1.1, 0.2), Complex64::new(-0.4, 0.9)];
            let lhs = (&p * &r).eval(&pt).unwrap();
            let rhs = p.eval(&pt).unwrap() * r.eval(&pt).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }

        #[test]
        fn mixed_partials_commute(p in small_qpoly(3), i in 0usize..3, j in 0usize..3) {
            prop_assert_eq!(p.diff(i).diff(j), p.diff(j).diff(i));
        }

        #[test]
        fn euler_relation_on_homogenization(p in small_qpoly(3)) {
            prop_assume!(!p.is_zero());
            let h = p.homogenize().unwrap();
            let d = h.degree() as i64;
            let mut lhs = QPoly::zero(4);
            for i in 0..4 {
                lhs = lhs + &QPoly::var(4, i) * &h.diff(i);
            }
            prop_assert_eq!(lhs, h.scale(&q(d)));
        }

        #[test]
        fn homogenization_dehomogenizes_back(p in small_qpoly(2)) {
            prop_assume!(!p.is_zero());
            let h = p.homogenize().unwrap();
            prop_assert!(h.is_homogeneous());
            prop_assert_eq!(h.dehomogenize(0), p);
        }
    }
}
