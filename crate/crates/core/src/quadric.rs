//! Closed-form curvature theory of the diagonal quadric `Σ aᵢxᵢ² = 1`.
//!
//! At a surface point `x` the principal curvatures are `λ·y` over the roots
//! `y` of the degree-`(n−1)` polynomial `m_x(y) = Σ μ_j(x) y^{n−1−j}`, with
//! `λ = 1/‖∇f(x)‖`. Umbilics are double roots; in three variables they and
//! the critical curvature points have explicit coordinates.

use std::cmp::Ordering;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::{rational_to_f64, Coeff, MultiPoly, PolySystem, QPoly, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadricError {
    #[error("expected {expected} coefficients, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("coefficients are degenerate (a zero or a repeated value)")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadricClass {
    Ellipsoid,
    OneSheeted,
    TwoSheeted,
    Empty,
    Degenerate,
}

/// Either a finite list or the "infinitely many" outcome of degenerate input.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Points<T> {
    Finite(Vec<T>),
    Infinite,
}

impl<T> Points<T> {
    pub fn finite(&self) -> Option<&[T]> {
        match self {
            Points::Finite(v) => Some(v),
            Points::Infinite => None,
        }
    }
}

/// Diagonal coefficients in user order plus the permutation sorting them ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadricSpec {
    a: Vec<Rational>,
    /// `sorted[k] = a[order[k]]`.
    order: Vec<usize>,
    degenerate: bool,
}

fn rat(v: i64) -> Rational {
    Rational::from_i64(v)
}

impl QuadricSpec {
    /// Exact coefficients; degeneracy is decided exactly.
    pub fn new(a: Vec<Rational>) -> Self {
        let degenerate = exact_degenerate(&a);
        let mut order: Vec<usize> = (0..a.len()).collect();
        order.sort_by(|&i, &j| a[i].cmp(&a[j]).then(i.cmp(&j)));
        QuadricSpec { a, order, degenerate }
    }

    pub fn from_ints(a: &[i64]) -> Self {
        Self::new(a.iter().map(|&v| rat(v)).collect())
    }

    /// Floating coefficients; zero or repeated values are detected with a
    /// relative tolerance of 1e-12.
    pub fn from_f64(a: &[f64]) -> Self {
        let mut spec = Self::new(a.iter().map(|&v| Rational::from_f64(v)).collect());
        spec.degenerate = float_degenerate(a);
        spec
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.a
    }

    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.a.iter().map(rational_to_f64).collect()
    }

    pub fn sorted(&self) -> Vec<Rational> {
        self.order.iter().map(|&i| self.a[i].clone()).collect()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Maps a point in sorted coordinates back to user coordinates.
    pub fn unsort<T: Clone>(&self, sorted_point: &[T]) -> Vec<T> {
        let mut out = sorted_point.to_vec();
        for (k, &i) in self.order.iter().enumerate() {
            out[i] = sorted_point[k].clone();
        }
        out
    }

    /// `Σ aᵢxᵢ² − 1`.
    pub fn polynomial(&self) -> QPoly {
        quadric_polynomial(&self.a)
    }

    pub fn classify(&self) -> QuadricClass {
        if self.degenerate {
            return QuadricClass::Degenerate;
        }
        class_from_positives(self.a.iter().filter(|v| v.is_positive()).count(), self.n())
    }
}

fn exact_degenerate(a: &[Rational]) -> bool {
    a.iter().any(Zero::is_zero)
        || (0..a.len()).any(|i| (i + 1..a.len()).any(|j| a[i] == a[j]))
}

fn float_degenerate(a: &[f64]) -> bool {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;
    a.iter().any(|v| v.abs() <= tol)
        || (0..a.len()).any(|i| (i + 1..a.len()).any(|j| (a[i] - a[j]).abs() <= tol))
}

fn class_from_positives(pos: usize, n: usize) -> QuadricClass {
    match (n, pos) {
        (_, 0) => QuadricClass::Empty,
        (n, p) if p == n => QuadricClass::Ellipsoid,
        (n, p) if p == n - 1 => QuadricClass::OneSheeted,
        _ => QuadricClass::TwoSheeted,
    }
}

/// Classification of the surface `Σ aᵢxᵢ² = 1` in three variables, exact.
pub fn classify_quadric(a: &[Rational]) -> QuadricClass {
    if exact_degenerate(a) {
        return QuadricClass::Degenerate;
    }
    class_from_positives(a.iter().filter(|v| v.is_positive()).count(), a.len())
}

/// Same as [`classify_quadric`] with a 1e-12 relative degeneracy tolerance.
pub fn classify_quadric_f64(a: &[f64]) -> QuadricClass {
    if float_degenerate(a) {
        return QuadricClass::Degenerate;
    }
    class_from_positives(a.iter().filter(|&&v| v > 0.0).count(), a.len())
}

pub fn quadric_polynomial(a: &[Rational]) -> QPoly {
    let n = a.len();
    let mut terms: Vec<(Vec<u32>, Rational)> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 2;
            (e, a[i].clone())
        })
        .collect();
    terms.push((vec![0; n], rat(-1)));
    QPoly::from_terms(n, terms)
}

/// Elementary symmetric polynomials `e_0..e_k` of the given items.
fn elementary<C: Coeff>(items: &[MultiPoly<C>], nvars: usize) -> Vec<MultiPoly<C>> {
    let mut e = vec![MultiPoly::one(nvars)];
    for it in items {
        e.push(MultiPoly::zero(nvars));
        for k in (1..e.len()).rev() {
            e[k] = &e[k] + &(&e[k - 1] * it);
        }
    }
    e
}

/// `μ_j = 2^{−(n−1−j)} Σᵢ e_j(a without aᵢ) aᵢ² xᵢ²` for `j = 0..n−1`, with
/// `a` and `x` given as polynomials over a common ring (so either may be symbolic).
pub fn m_coefficient_polys<C: Coeff>(a: &[MultiPoly<C>], x: &[MultiPoly<C>]) -> Vec<MultiPoly<C>> {
    let n = a.len();
    assert_eq!(x.len(), n);
    let nv = a.first().map(|p| p.nvars()).unwrap_or(0);
    let mut mu = vec![MultiPoly::zero(nv); n];
    for i in 0..n {
        let others: Vec<MultiPoly<C>> =
            (0..n).filter(|&k| k != i).map(|k| a[k].clone()).collect();
        let e = elementary(&others, nv);
        let w = &(&(&a[i] * &a[i]) * &x[i]) * &x[i];
        for (j, m) in mu.iter_mut().enumerate() {
            *m = &*m + &(&e[j] * &w);
        }
    }
    for (j, m) in mu.iter_mut().enumerate() {
        let half = C::from_ratio(1, 1i64 << (n - 1 - j));
        *m = m.scale(&half);
    }
    mu
}

/// Numeric `μ_0..μ_{n−1}` at a point.
pub fn m_coefficients<C: Coeff>(a: &[C], x: &[C]) -> Vec<C> {
    let ap: Vec<MultiPoly<C>> = a.iter().map(|v| MultiPoly::constant(0, v.clone())).collect();
    let xp: Vec<MultiPoly<C>> = x.iter().map(|v| MultiPoly::constant(0, v.clone())).collect();
    m_coefficient_polys(&ap, &xp)
        .iter()
        .map(|p| p.eval(&[]).expect("constant"))
        .collect()
}

/// Coefficients in `x` only, for fixed exact `a`.
pub fn m_coefficients_in_x(a: &[Rational]) -> Vec<QPoly> {
    let n = a.len();
    let ap: Vec<QPoly> = a.iter().map(|v| QPoly::constant(n, v.clone())).collect();
    let xp: Vec<QPoly> = (0..n).map(|i| QPoly::var(n, i)).collect();
    m_coefficient_polys(&ap, &xp)
}

/// Roots of `Σ c_j y^{k−j}` (leading coefficient first).
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c[0].norm() == 0.0 {
        c.remove(0);
    }
    let deg = c.len().saturating_sub(1);
    match deg {
        0 => Vec::new(),
        1 => vec![-c[1] / c[0]],
        2 => {
            let (a, b, cc) = (c[0], c[1], c[2]);
            let disc = (b * b - a * cc * 4.0).sqrt();
            // pick the sign avoiding cancellation
            let s = if (b.conj() * disc).re >= 0.0 { b + disc } else { b - disc };
            if s.norm() == 0.0 {
                return vec![Complex64::new(0.0, 0.0); 2];
            }
            let q = -s / 2.0;
            vec![q / a, cc / q]
        }
        _ => durand_kerner(&c),
    }
}

fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let deg = c.len() - 1;
    let lead = c[0];
    let monic: Vec<Complex64> = c.iter().map(|v| v / lead).collect();
    let bound = 1.0 + monic[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32) * bound).collect();
    let eval = |z: Complex64| monic.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc * z + v);
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    roots
}

/// Roots of `m_x`, i.e. the values `y` with `λ·y` a principal curvature.
pub fn m_roots(a: &[f64], x: &[f64]) -> Vec<Complex64> {
    let ac: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    polynomial_roots(&m_coefficients(&ac, &xc))
}

fn check3(a: &[Rational]) -> Result<(), QuadricError> {
    if a.len() != 3 {
        return Err(QuadricError::Dimension { expected: 3, got: a.len() });
    }
    Ok(())
}

/// `μ₁² − 4μ₀μ₂` written out as the explicit quartic in `x`.
pub fn umbilic_discriminant(a: &[Rational]) -> Result<QPoly, QuadricError> {
    check3(a)?;
    umbilic_discriminant_poly(&a.iter().map(|v| QPoly::constant(3, v.clone())).collect::<Vec<_>>(), 3, 0)
        .map_err(|_| QuadricError::Dimension { expected: 3, got: a.len() })
}

/// Explicit quartic with `a` given as polynomials; `x` occupies variables
/// `x_offset..x_offset+3` of an `nvars`-variable ring.
fn umbilic_discriminant_poly(a: &[QPoly], nvars: usize, x_offset: usize) -> Result<QPoly, ()> {
    let x: Vec<QPoly> = (0..3).map(|i| QPoly::var(nvars, x_offset + i)).collect();
    let sq = |p: &QPoly| p * p;
    let (a1, a2, a3) = (&a[0], &a[1], &a[2]);
    let (x1, x2, x3) = (&x[0], &x[1], &x[2]);
    let q = |v: i64, d: i64| QPoly::constant(nvars, Rational::from_ratio(v, d));
    let d12 = a1 - a2;
    let d23 = a2 - a3;
    let d31 = a3 - a1;
    let d13 = a1 - a3;
    let terms = [
        &q(1, 4) * &(&(&sq(&sq(a1)) * &sq(&d23)) * &sq(&sq(x1))),
        &q(1, 4) * &(&(&sq(&sq(a2)) * &sq(&d13)) * &sq(&sq(x2))),
        &q(1, 4) * &(&(&sq(&sq(a3)) * &sq(&d12)) * &sq(&sq(x3))),
        &q(-1, 2) * &(&(&(&(&sq(a1) * &sq(a2)) * &d31) * &d23) * &(&sq(x1) * &sq(x2))),
        &q(-1, 2) * &(&(&(&(&sq(a1) * &sq(a3)) * &d12) * &d23) * &(&sq(x1) * &sq(x3))),
        &q(-1, 2) * &(&(&(&(&sq(a2) * &sq(a3)) * &d12) * &d31) * &(&sq(x2) * &sq(x3))),
    ];
    Ok(terms.iter().fold(QPoly::zero(nvars), |acc, t| &acc + t))
}

/// Ring `ℚ[a1, a2, a3, x1, x2, x3]` forms of the discriminant identities:
/// returns `(μ₁² − 4μ₀μ₂, explicit quartic, four-factor product, sum of squares)`.
///
/// The four linear factors carry square roots of the `a` differences; their
/// product only involves the squares `A² = a1²(a2−a3)x1²`, `B² = a2²(a3−a1)x2²`,
/// `C² = a3²(a1−a2)x3²`, namely `¼[(A² − C²)² − 2B²(A² + C²) + B⁴]`.
pub fn symbolic_discriminant_forms() -> [QPoly; 4] {
    let nv = 6;
    let a: Vec<QPoly> = (0..3).map(|i| QPoly::var(nv, i)).collect();
    let x: Vec<QPoly> = (3..6).map(|i| QPoly::var(nv, i)).collect();
    let mu = m_coefficient_polys(&a, &x);
    let four = QPoly::constant(nv, rat(4));
    let disc = &(&mu[1] * &mu[1]) - &(&four * &(&mu[0] * &mu[2]));
    let explicit = umbilic_discriminant_poly(&a, nv, 3).expect("three coefficients");

    let sq = |p: &QPoly| p * p;
    let q = |v: i64, d: i64| QPoly::constant(nv, Rational::from_ratio(v, d));
    let (a1, a2, a3) = (&a[0], &a[1], &a[2]);
    let (x1, x2, x3) = (&x[0], &x[1], &x[2]);
    let big_a = &(&sq(a1) * &(a2 - a3)) * &sq(x1);
    let big_b = &(&sq(a2) * &(a3 - a1)) * &sq(x2);
    let big_c = &(&sq(a3) * &(a1 - a2)) * &sq(x3);
    let product = &q(1, 4)
        * &(&(&sq(&(&big_a - &big_c)) - &(&q(2, 1) * &(&big_b * &(&big_a + &big_c)))) + &sq(&big_b));

    // sum of squares, valid as an identity for all a (nonnegativity needs a1 ≤ a2 ≤ a3)
    let sos_terms = [
        &q(1, 4) * &sq(&(&(&(&sq(a1) * &(a2 - a3)) * &sq(x1)) + &(&(&sq(a3) * &(a2 - a1)) * &sq(x3)))),
        &q(1, 4) * &(&(&sq(&sq(a2)) * &sq(&(a1 - a3))) * &sq(&sq(x2))),
        &q(1, 2) * &(&(&(&(&sq(a1) * &sq(a2)) * &(a3 - a1)) * &(a3 - a2)) * &(&sq(x1) * &sq(x2))),
        &q(1, 2) * &(&(&(&(&sq(a2) * &sq(a3)) * &(a1 - a2)) * &(a1 - a3)) * &(&sq(x2) * &sq(x3))),
    ];
    let sos = sos_terms.iter().fold(QPoly::zero(nv), |acc, t| &acc + t);
    [disc, explicit, product, sos]
}

/// The four complex linear forms whose product, times ¼, is the discriminant.
pub fn discriminant_linear_factors(a: &[f64]) -> Vec<[Complex64; 3]> {
    let s = |v: f64| Complex64::new(v, 0.0).sqrt();
    let c1 = s(a[1] - a[2]) * a[0];
    let c2 = s(a[2] - a[0]) * a[1];
    let c3 = s(a[0] - a[1]) * a[2];
    [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)]
        .iter()
        .map(|&(s2, s3)| [c1, c2 * s2, c3 * s3])
        .collect()
}

/// A line through the origin in a coordinate plane on which the discriminant vanishes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UmbilicLine {
    /// Index of the coordinate that vanishes on the line (user order).
    pub zero_coord: usize,
    pub direction: [Complex64; 3],
    pub real: bool,
}

/// The three pairs of lines: in the plane `x_k = 0` (others `i < j`),
/// `P x_i² + Q x_j² = 0` with `P = a_i²(a_j − a_k)`, `Q = −a_j²(a_k − a_i)`
/// up to the cyclic sign convention; a pair is real iff `P·Q < 0`.
pub fn umbilic_lines(a: &[Rational]) -> Result<Vec<UmbilicLine>, QuadricError> {
    check3(a)?;
    if exact_degenerate(a) {
        return Err(QuadricError::Degenerate);
    }
    let mut out = Vec::with_capacity(6);
    for k in 0..3 {
        let (i, j) = other_two(k);
        let (p, q) = plane_form(a, k);
        let real = (&p * &q).is_negative();
        let ratio = rational_to_f64(&(-(&q / &p)));
        let s = Complex64::new(ratio, 0.0).sqrt();
        for sign in [1.0, -1.0] {
            let mut d = [Complex64::new(0.0, 0.0); 3];
            d[i] = s * sign;
            d[j] = Complex64::new(1.0, 0.0);
            out.push(UmbilicLine { zero_coord: k, direction: d, real });
        }
    }
    Ok(out)
}

fn other_two(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Coefficients `(P, Q)` of the plane quadratic `P x_i² + Q x_j²` obtained by
/// setting `x_k = 0` in the discriminant's factor pairing.
fn plane_form(a: &[Rational], k: usize) -> (Rational, Rational) {
    let sq = |v: &Rational| v * v;
    let (a1, a2, a3) = (&a[0], &a[1], &a[2]);
    match k {
        0 => (sq(a2) * (a3 - a1), -(sq(a3) * (a1 - a2))),
        1 => (sq(a1) * (a2 - a3), -(sq(a3) * (a1 - a2))),
        _ => (sq(a1) * (a2 - a3), -(sq(a2) * (a3 - a1))),
    }
}

/// All twelve complex umbilics: each line meets the surface twice.
pub fn complex_umbilics(a: &[Rational]) -> Result<Points<[Complex64; 3]>, QuadricError> {
    check3(a)?;
    if exact_degenerate(a) {
        return Ok(Points::Infinite);
    }
    let af: Vec<f64> = a.iter().map(rational_to_f64).collect();
    let mut pts = Vec::with_capacity(12);
    for line in umbilic_lines(a)? {
        let d = line.direction;
        let s: Complex64 = (0..3).map(|i| d[i] * d[i] * af[i]).sum();
        let t = Complex64::new(1.0, 0.0) / s.sqrt();
        for sign in [1.0, -1.0] {
            pts.push([d[0] * t * sign, d[1] * t * sign, d[2] * t * sign]);
        }
    }
    Ok(Points::Finite(pts))
}

/// Real umbilics from the closed form in sorted coordinates: they lie in the
/// plane of the middle coefficient and exist iff
/// `(a3²/a1)(a1 − a2)/(a2 − a3) + a3 > 0`.
pub fn real_umbilics(a: &[Rational]) -> Result<Points<[f64; 3]>, QuadricError> {
    check3(a)?;
    let spec = QuadricSpec::new(a.to_vec());
    if spec.is_degenerate() {
        return Ok(Points::Infinite);
    }
    let s = spec.sorted();
    let (a1, a2, a3) = (&s[0], &s[1], &s[2]);
    let ratio = (a1 - a2) / (a2 - a3);
    let value = &(&(a3 * a3) / a1) * &ratio + a3;
    if !value.is_positive() {
        return Ok(Points::Finite(Vec::new()));
    }
    let x3 = 1.0 / rational_to_f64(&value).sqrt();
    let x1 = rational_to_f64(&(a3 / a1)) * rational_to_f64(&ratio).sqrt() * x3;
    let mut pts = Vec::with_capacity(4);
    for s1 in [1.0, -1.0] {
        for s3 in [1.0, -1.0] {
            let sorted = [s1 * x1, 0.0, s3 * x3];
            let p = spec.unsort(&sorted);
            pts.push([p[0], p[1], p[2]]);
        }
    }
    Ok(Points::Finite(pts))
}

/// A closed-form critical curvature point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcPoint {
    pub x: [Complex64; 3],
    pub on_axis: bool,
    pub real: bool,
}

/// All eighteen complex critical curvature points: the six axis points
/// `±e_i/√a_i` and, in each plane `x_k = 0` with the other indices `i, j`,
/// `a_i a_k (a_j − a_i) x_i² = a_j (a_k − a_i)` and
/// `a_j a_k (a_i − a_j) x_j² = a_i (a_k − a_j)`.
pub fn complex_cc_points(a: &[Rational]) -> Result<Points<CcPoint>, QuadricError> {
    check3(a)?;
    if exact_degenerate(a) {
        return Ok(Points::Infinite);
    }
    let mut pts = Vec::with_capacity(18);
    for i in 0..3 {
        let v = Complex64::new(rational_to_f64(&(rat(1) / &a[i])), 0.0).sqrt();
        for sign in [1.0, -1.0] {
            let mut x = [Complex64::new(0.0, 0.0); 3];
            x[i] = v * sign;
            pts.push(CcPoint { x, on_axis: true, real: a[i].is_positive() });
        }
    }
    for k in 0..3 {
        let (i, j) = other_two(k);
        let xi2 = (&a[j] * (&a[k] - &a[i])) / (&a[i] * &a[k] * (&a[j] - &a[i]));
        let xj2 = (&a[i] * (&a[k] - &a[j])) / (&a[j] * &a[k] * (&a[i] - &a[j]));
        let real = xi2.is_positive() && xj2.is_positive();
        let ri = Complex64::new(rational_to_f64(&xi2), 0.0).sqrt();
        let rj = Complex64::new(rational_to_f64(&xj2), 0.0).sqrt();
        for si in [1.0, -1.0] {
            for sj in [1.0, -1.0] {
                let mut x = [Complex64::new(0.0, 0.0); 3];
                x[i] = ri * si;
                x[j] = rj * sj;
                pts.push(CcPoint { x, on_axis: false, real });
            }
        }
    }
    Ok(Points::Finite(pts))
}

/// Real critical curvature points in user coordinates.
pub fn real_cc_points(a: &[Rational]) -> Result<Points<[f64; 3]>, QuadricError> {
    Ok(match complex_cc_points(a)? {
        Points::Infinite => Points::Infinite,
        Points::Finite(v) => Points::Finite(
            v.into_iter()
                .filter(|p| p.real)
                .map(|p| [p.x[0].re, p.x[1].re, p.x[2].re])
                .collect(),
        ),
    })
}

/// Reduced critical-curvature system in unknowns `x1..xn, lambda, y1, t`:
/// `f`, `m_x(y1)`, `λ²η − 1`, and for each `i`
/// `η Σ_j y1^{n−1−j} ∂μ_j/∂x_i + (t + q·a_i)·a_i·x_i` with `q = 8·y1·m_x'(y1)`.
pub fn quadric_cc_system(a: &[Rational]) -> PolySystem<Rational> {
    let n = a.len();
    let nv = n + 3;
    let (lam_i, y_i, t_i) = (n, n + 1, n + 2);
    let map: Vec<usize> = (0..n).collect();
    let mu: Vec<QPoly> = m_coefficients_in_x(a).iter().map(|p| p.embed(nv, &map)).collect();
    let x: Vec<QPoly> = (0..n).map(|i| QPoly::var(nv, i)).collect();
    let lam = QPoly::var(nv, lam_i);
    let y = QPoly::var(nv, y_i);
    let t = QPoly::var(nv, t_i);
    let c = |v: &Rational| QPoly::constant(nv, v.clone());
    let one = QPoly::one(nv);

    let f = quadric_polynomial(a).embed(nv, &map);
    let eta = (0..n).fold(QPoly::zero(nv), |acc, i| {
        let g = &c(&(&a[i] * rat(2))) * &x[i];
        &acc + &(&g * &g)
    });
    let ypow: Vec<QPoly> = (0..n).map(|k| y.pow(k as u32)).collect();
    let m = (0..n).fold(QPoly::zero(nv), |acc, j| &acc + &(&mu[j] * &ypow[n - 1 - j]));
    // y·m'(y) = Σ (n−1−j) μ_j y^{n−1−j}
    let ym = (0..n).fold(QPoly::zero(nv), |acc, j| {
        &acc + &(&(&mu[j] * &ypow[n - 1 - j]) * &c(&rat((n - 1 - j) as i64)))
    });
    let q = &c(&rat(8)) * &ym;

    let mut eqs = vec![f, m, &(&(&lam * &lam) * &eta) - &one];
    for i in 0..n {
        let s = (0..n).fold(QPoly::zero(nv), |acc, j| &acc + &(&ypow[n - 1 - j] * &mu[j].diff(i)));
        let lin = &(&t + &(&q * &c(&a[i]))) * &(&c(&a[i]) * &x[i]);
        eqs.push(&(&eta * &s) + &lin);
    }
    let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    names.extend(["lambda", "y1", "t"].iter().map(|s| s.to_string()));
    PolySystem::new(names, eqs).expect("arity is consistent")
}

/// Completes a candidate `x` to a start `(x, λ, y1, t)` for the reduced
/// system: `λ = 1/‖∇f‖`, `y1` the root of `m_x` nearest a double root when
/// two roots coincide (else the one with smaller residual in the stationarity
/// equations), and `t` by least squares.
pub fn complete_cc_start(a: &[Rational], x: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let af: Vec<Complex64> = a.iter().map(|v| Complex64::new(rational_to_f64(v), 0.0)).collect();
    let eta: Complex64 = (0..n).map(|i| (af[i] * x[i] * 2.0).powu(2)).sum();
    let lam = Complex64::new(1.0, 0.0) / eta.sqrt();
    let roots = polynomial_roots(&m_coefficients(&af, x));
    let sys = quadric_cc_system(a).to_complex();
    let mut out = Vec::new();
    for y in roots {
        // gradient rows are affine in t: r(t) = r0 + t·r1
        let mut z: Vec<Complex64> = x.to_vec();
        z.extend([lam, y, Complex64::new(0.0, 0.0)]);
        let r0 = sys.eval(&z);
        z[n + 2] = Complex64::new(1.0, 0.0);
        let r1: Vec<Complex64> = sys.eval(&z).iter().zip(&r0).map(|(a, b)| a - b).collect();
        let num: Complex64 = (3..3 + n).map(|k| r1[k].conj() * r0[k]).sum();
        let den: f64 = (3..3 + n).map(|k| r1[k].norm_sqr()).sum();
        z[n + 2] = if den > 0.0 { -num / den } else { Complex64::new(0.0, 0.0) };
        out.push(z);
    }
    out.sort_by(|p, q| {
        sys.residual(p).partial_cmp(&sys.residual(q)).unwrap_or(Ordering::Equal)
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curvature_data;
    use crate::solver::{newton_refine, Status};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn ints(a: &[i64]) -> Vec<Rational> {
        a.iter().map(|&v| rat(v)).collect()
    }

    #[test]
    fn classification() {
        assert_eq!(classify_quadric(&ints(&[1, 2, 4])), QuadricClass::Ellipsoid);
        assert_eq!(classify_quadric(&ints(&[-1, 2, 4])), QuadricClass::OneSheeted);
        assert_eq!(classify_quadric(&ints(&[-2, -1, 4])), QuadricClass::TwoSheeted);
        assert_eq!(classify_quadric(&ints(&[-2, -1, -4])), QuadricClass::Empty);
        assert_eq!(classify_quadric(&ints(&[1, 1, 2])), QuadricClass::Degenerate);
        assert_eq!(classify_quadric(&ints(&[0, 1, 2])), QuadricClass::Degenerate);
        assert_eq!(classify_quadric_f64(&[1.0, 1.0 + 1e-14, 2.0]), QuadricClass::Degenerate);
        assert_eq!(classify_quadric_f64(&[1.0, 1.0 + 1e-9, 2.0]), QuadricClass::Ellipsoid);
    }

    #[test]
    fn m_coefficients_examples() {
        let mu = m_coefficients(&ints(&[1, 2, 4]), &ints(&[1, 0, 0]));
        assert_eq!(mu, vec![Rational::from_ratio(1, 4), rat(3), rat(8)]);
        let r = m_roots(&[1.0, 2.0, 4.0], &[1.0, 0.0, 0.0]);
        let mut re: Vec<f64> = r.iter().map(|c| c.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 8.0).abs() < 1e-12 && (re[1] + 4.0).abs() < 1e-12);
        // λ = 1/2 turns the roots into the curvature magnitudes 4 and 2
        let zero = m_coefficients(&ints(&[1, 2, 4]), &ints(&[0, 0, 0]));
        assert!(zero.iter().all(Zero::is_zero));
    }

    #[test]
    fn sphere_has_double_root() {
        let x = [0.6, 0.0, 0.8];
        let r = m_roots(&[1.0, 1.0, 1.0], &x);
        assert!((r[0] - r[1]).norm() < 1e-7);
        assert!((r[0] + 2.0).norm() < 1e-7);
        // m_x(y) = ¼(y + 2)²·Σx²
        let mu = m_coefficients(&ints(&[1, 1, 1]), &ints(&[1, 0, 0]));
        assert_eq!(mu, vec![Rational::from_ratio(1, 4), rat(1), rat(1)]);
    }

    #[test]
    fn discriminant_is_the_quadratic_discriminant() {
        let a = ints(&[1, 2, 4]);
        let mu = m_coefficients_in_x(&a);
        let disc = &(&mu[1] * &mu[1]) - &(&mu[0] * &mu[2]).scale(&rat(4));
        assert_eq!(umbilic_discriminant(&a).unwrap(), disc);
        let [d, e, p, s] = symbolic_discriminant_forms();
        assert_eq!(d, e);
        assert_eq!(d, p);
        assert_eq!(d, s);
    }

    #[test]
    fn discriminant_factors_numerically() {
        let a = [1.0, 2.0, 4.0];
        let disc = umbilic_discriminant(&ints(&[1, 2, 4])).unwrap().to_complex();
        let mut prod = crate::poly::CPoly::constant(3, Complex64::new(0.25, 0.0));
        for f in discriminant_linear_factors(&a) {
            let lin = crate::poly::CPoly::from_terms(
                3,
                (0..3).map(|i| {
                    let mut e = vec![0; 3];
                    e[i] = 1;
                    (e, f[i])
                }),
            );
            prod = &prod * &lin;
        }
        assert!(disc.max_coeff_distance(&prod) < 1e-10);
    }

    #[test]
    fn lines_and_reality() {
        for a in [[1, 2, 4], [-1, 2, 4], [-2, -1, 4]] {
            let lines = umbilic_lines(&ints(&a)).unwrap();
            assert_eq!(lines.len(), 6);
            assert_eq!(lines.iter().filter(|l| l.real).count(), 2);
            let disc = umbilic_discriminant(&ints(&a)).unwrap();
            for l in &lines {
                let pt: Vec<Complex64> = l.direction.iter().map(|c| c * 0.7).collect();
                assert!(disc.eval_c64(&pt).unwrap().norm() < 1e-10);
            }
        }
        assert_eq!(umbilic_lines(&ints(&[1, 1, 2])), Err(QuadricError::Degenerate));
    }

    #[test]
    fn one_sheeted_real_lines_miss_the_surface() {
        let a = ints(&[-1, 2, 4]);
        let af = [-1.0, 2.0, 4.0];
        for l in umbilic_lines(&a).unwrap().into_iter().filter(|l| l.real) {
            let d: Vec<f64> = l.direction.iter().map(|c| c.re).collect();
            let s: f64 = (0..3).map(|i| af[i] * d[i] * d[i]).sum();
            assert!(s <= 0.0, "t²·{s} = 1 has no real solution");
        }
    }

    #[test]
    fn real_umbilic_counts_and_coordinates() {
        let pts = real_umbilics(&ints(&[1, 2, 4])).unwrap();
        let pts = pts.finite().unwrap();
        assert_eq!(pts.len(), 4);
        let (x1, x3) = ((2.0f64 / 3.0).sqrt(), 1.0 / (2.0 * 3f64.sqrt()));
        for p in pts {
            assert!((p[0].abs() - x1).abs() < 1e-12 && p[1] == 0.0 && (p[2].abs() - x3).abs() < 1e-12);
        }
        assert_eq!(real_umbilics(&ints(&[-1, 2, 4])).unwrap().finite().unwrap().len(), 0);
        assert_eq!(real_umbilics(&ints(&[-2, -1, 4])).unwrap().finite().unwrap().len(), 4);
        assert_eq!(real_umbilics(&ints(&[1, 1, 2])).unwrap(), Points::Infinite);
    }

    #[test]
    fn real_umbilics_are_umbilic() {
        for a in [[1, 2, 4], [-2, -1, 4], [4, 1, 2], [3, -5, 7]] {
            let ar = ints(&a);
            let f = quadric_polynomial(&ar);
            let disc = umbilic_discriminant(&ar).unwrap();
            for p in real_umbilics(&ar).unwrap().finite().unwrap() {
                assert!(f.eval_real(p).unwrap().abs() < 1e-10);
                assert!(disc.eval_real(p).unwrap().abs() < 1e-10);
                let cd = curvature_data(&f, p, 1e-8).unwrap();
                let k = &cd.principal_curvatures;
                assert!((k[0] - k[1]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn complex_umbilics_lie_on_surface_and_discriminant() {
        let a = ints(&[1, 2, 4]);
        let f = quadric_polynomial(&a);
        let disc = umbilic_discriminant(&a).unwrap();
        let pts = complex_umbilics(&a).unwrap();
        let pts = pts.finite().unwrap();
        assert_eq!(pts.len(), 12);
        for p in pts {
            assert!(f.eval_c64(p).unwrap().norm() < 1e-12);
            assert!(disc.eval_c64(p).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn cc_point_lists() {
        let counts = |a: &[i64]| real_cc_points(&ints(a)).unwrap().finite().unwrap().len();
        assert_eq!(counts(&[1, 2, 4]), 10);
        assert_eq!(counts(&[-1, 2, 4]), 4);
        assert_eq!(counts(&[-2, -1, 4]), 6);
        assert_eq!(real_cc_points(&ints(&[1, 1, 2])).unwrap(), Points::Infinite);
        let all = complex_cc_points(&ints(&[1, 2, 4])).unwrap();
        assert_eq!(all.finite().unwrap().len(), 18);
    }

    #[test]
    fn off_axis_cc_points_are_the_umbilics() {
        let a = ints(&[1, 2, 4]);
        let cc = complex_cc_points(&a).unwrap();
        let um = complex_umbilics(&a).unwrap();
        let um = um.finite().unwrap();
        for p in cc.finite().unwrap().iter().filter(|p| !p.on_axis) {
            assert!(um.iter().any(|u| (0..3).all(|i| (u[i] - p.x[i]).norm() < 1e-10)));
        }
    }

    #[test]
    fn cc_system_shape_and_axis_refinement() {
        let a = ints(&[1, 2, 4]);
        let sys = quadric_cc_system(&a);
        assert_eq!(sys.degrees(), vec![2, 4, 4, 5, 5, 5]);
        assert_eq!(sys.bezout(), 4000u32.into());
        let csys = sys.to_complex();
        for p in real_cc_points(&a).unwrap().finite().unwrap() {
            let x: Vec<Complex64> = p.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let start = &complete_cc_start(&a, &x)[0];
            let r = newton_refine(&csys, start, 40, 1e-14).unwrap();
            assert!(r.residual < 1e-10, "{p:?}: {}", r.residual);
            assert!(r.status != Status::Diverged);
        }
    }

    fn random_surface_point(rng: &mut ChaCha8Rng, a: &[f64]) -> Option<Vec<f64>> {
        let d: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
        let s: f64 = (0..3).map(|i| a[i] * d[i] * d[i]).sum();
        (s > 1e-3).then(|| d.iter().map(|v| v / s.sqrt()).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn roots_match_principal_curvatures(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<f64> = (0..3).map(|_| (rng.gen_range(-40i64..40) as f64) / 8.0).collect();
            prop_assume!(!float_degenerate(&a));
            let ar: Vec<Rational> = a.iter().map(|&v| Rational::from_f64(v)).collect();
            let f = quadric_polynomial(&ar);
            let Some(x) = random_surface_point(&mut rng, &a) else { return Ok(()) };
            let cd = curvature_data(&f, &x, 1e-8).unwrap();
            let lam = 1.0 / cd.eta.sqrt();
            let mut from_roots: Vec<f64> = m_roots(&a, &x).iter().map(|r| (r * lam).norm()).collect();
            let mut from_shape: Vec<f64> = cd.principal_curvatures.iter().map(|k| k.abs()).collect();
            from_roots.sort_by(f64::total_cmp);
            from_shape.sort_by(f64::total_cmp);
            for (r, s) in from_roots.iter().zip(&from_shape) {
                prop_assert!((r - s).abs() < 1e-8 * (1.0 + s));
            }
        }
    }
}
