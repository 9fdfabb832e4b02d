//! Exact degree bookkeeping for curvature loci of degree-`d` surfaces.
//!
//! A small Chow-ring calculator (graded rings presented by generators and
//! rewrite rules, with coefficients that are polynomials in the degree `d`)
//! replays the computation of the degree of the curvature variety, and the
//! remaining counts are derived from their defining formulas with the
//! relations between them asserted.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::poly::{Coeff, QPoly, Rational};

/// Univariate polynomial in the surface degree `d` (variable 0).
pub type DPoly = QPoly;

/// Largest degree accepted by the integer-valued ledgers.
pub const MAX_DEGREE: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumerativeError {
    #[error("degree must be at least 2, got {0}")]
    DegreeTooLow(u64),
    #[error("degree {0} exceeds the supported maximum {MAX_DEGREE}")]
    DegreeTooHigh(u64),
    #[error("classes live in different rings")]
    RingMismatch,
    #[error("monomial {0:?} has top degree but no evaluation rule")]
    NoTopEvaluation(Vec<u32>),
    #[error("rule for generator {generator} is not homogeneous of degree {expected}")]
    InhomogeneousRule { generator: usize, expected: u32 },
    #[error("no published critical curvature count for degree {0}")]
    OutsideTable(u64),
    #[error("identity failed: {0}")]
    IdentityFailed(String),
    #[error("value {0} is not an integer")]
    NotInteger(String),
}

/// `Σ cᵢ dⁱ` from ascending integer coefficients.
pub fn d_poly(coeffs: &[i64]) -> DPoly {
    DPoly::from_terms(
        1,
        coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (vec![i as u32], Rational::from_i64(c))),
    )
}

pub fn d_var() -> DPoly {
    DPoly::var(1, 0)
}

fn d_const(c: i64) -> DPoly {
    DPoly::constant(1, Rational::from_i64(c))
}

/// Value of a `d`-polynomial at an integer, required to be integral.
pub fn eval_at(p: &DPoly, d: i64) -> Result<BigInt, EnumerativeError> {
    let v = p.eval(&[Rational::from_i64(d)]).expect("arity one");
    if !v.is_integer() {
        return Err(EnumerativeError::NotInteger(v.to_string()));
    }
    Ok(v.to_integer())
}

fn to_i128(v: &BigInt) -> i128 {
    v.to_i128().expect("ledger values fit in i128 for supported degrees")
}

/// `generator^power → Σ coeff·monomial`; an empty replacement means zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RewriteRule {
    pub generator: usize,
    pub power: u32,
    pub replacement: Vec<(Vec<u32>, DPoly)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedRingSpec {
    pub names: Vec<String>,
    pub degrees: Vec<u32>,
    /// Classes of degree above this vanish.
    pub dimension: u32,
    pub rules: Vec<RewriteRule>,
    /// Point counts of the top-degree normal monomials.
    pub top: Vec<(Vec<u32>, DPoly)>,
}

impl GradedRingSpec {
    /// `ℤ[h]/(h^{n+1})` with `hⁿ` one point.
    pub fn projective_space(n: u32) -> Self {
        GradedRingSpec {
            names: vec!["h".into()],
            degrees: vec![1],
            dimension: n,
            rules: vec![RewriteRule { generator: 0, power: n + 1, replacement: Vec::new() }],
            top: vec![(vec![n], d_const(1))],
        }
    }

    /// Projectivization of a rank-`r` bundle over a surface of degree `d`
    /// in ℙ³, with `h` the hyperplane class (`h² = d` points), `ζ` the
    /// tautological class, and `ζ^r = −(c₁ζ^{r−1} + c₂ζ^{r−2})`.
    pub fn projective_bundle_over_surface(rank: u32, c1: DPoly, c2: DPoly) -> Self {
        let r = rank;
        GradedRingSpec {
            names: vec!["h".into(), "zeta".into()],
            degrees: vec![1, 1],
            dimension: r + 1,
            rules: vec![
                RewriteRule { generator: 0, power: 3, replacement: Vec::new() },
                RewriteRule {
                    generator: 1,
                    power: r,
                    replacement: vec![
                        (vec![1, r - 1], c1.scale(&Rational::from_i64(-1))),
                        (vec![2, r - 2], c2.scale(&Rational::from_i64(-1))),
                    ],
                },
            ],
            top: vec![(vec![2, r - 1], d_var())],
        }
    }

    fn weighted_degree(&self, m: &[u32]) -> u32 {
        m.iter().zip(&self.degrees).map(|(e, w)| e * w).sum()
    }

    /// Checks that every rule preserves the grading.
    pub fn validate(&self) -> Result<(), EnumerativeError> {
        for rule in &self.rules {
            let expected = rule.power * self.degrees[rule.generator];
            if rule.replacement.iter().any(|(m, _)| self.weighted_degree(m) != expected) {
                return Err(EnumerativeError::InhomogeneousRule { generator: rule.generator, expected });
            }
        }
        Ok(())
    }

    fn applicable(&self, m: &[u32]) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| m[r.generator] >= r.power)
    }
}

/// The ring of the degree computation: rank 5 with
/// `c(E) = (1 + (d−2)h)(1 + (d−1)h)⁴`.
pub fn curvature_bundle_ring() -> GradedRingSpec {
    let c = whitney_total_class(&[d_poly(&[-2, 1]), d_poly(&[-1, 1]), d_poly(&[-1, 1]), d_poly(&[-1, 1]), d_poly(&[-1, 1])], 2);
    GradedRingSpec::projective_bundle_over_surface(5, c[1].clone(), c[2].clone())
}

/// Coefficients of `Π(1 + aᵢh)` truncated above `h^max_degree`.
pub fn whitney_total_class(twists: &[DPoly], max_degree: usize) -> Vec<DPoly> {
    let mut c = vec![d_const(1)];
    for a in twists {
        let mut next = vec![DPoly::zero(1); (c.len() + 1).min(max_degree + 1)];
        for (k, ck) in c.iter().enumerate() {
            if k < next.len() {
                next[k] = &next[k] + ck;
            }
            if k + 1 < next.len() {
                next[k + 1] = &next[k + 1] + &(ck * a);
            }
        }
        c = next;
    }
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChowClass {
    ring: Arc<GradedRingSpec>,
    terms: BTreeMap<Vec<u32>, DPoly>,
}

impl ChowClass {
    pub fn zero(ring: &Arc<GradedRingSpec>) -> Self {
        ChowClass { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<GradedRingSpec>, c: DPoly) -> Self {
        Self::monomial(ring, vec![0; ring.names.len()], c)
    }

    pub fn generator(ring: &Arc<GradedRingSpec>, i: usize) -> Self {
        let mut m = vec![0; ring.names.len()];
        m[i] = 1;
        Self::monomial(ring, m, d_const(1))
    }

    pub fn monomial(ring: &Arc<GradedRingSpec>, m: Vec<u32>, c: DPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        let mut out = ChowClass { ring: ring.clone(), terms };
        out.normalize();
        out
    }

    pub fn ring(&self) -> &Arc<GradedRingSpec> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, DPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &DPoly) -> Self {
        let mut out = ChowClass::zero(&self.ring);
        for (m, v) in &self.terms {
            add_term(&mut out.terms, m.clone(), &(v * c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, EnumerativeError> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (m, v) in &other.terms {
            add_term(&mut out.terms, m.clone(), v);
        }
        Ok(out)
    }

    fn same_ring(&self, other: &Self) -> Result<(), EnumerativeError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring {
            Ok(())
        } else {
            Err(EnumerativeError::RingMismatch)
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = ChowClass::constant(&self.ring, d_const(1));
        for _ in 0..e {
            out = chow_mul(&out, self).expect("same ring");
        }
        out
    }

    fn normalize(&mut self) {
        self.normalize_with(|_| 0);
    }

    /// Rewrites to normal form, letting `pick` choose which reducible
    /// monomial to rewrite next (index into the current reducible list).
    fn normalize_with(&mut self, mut pick: impl FnMut(usize) -> usize) {
        let dim = self.ring.dimension;
        let ring = self.ring.clone();
        self.terms.retain(|m, c| !c.is_zero() && ring.weighted_degree(m) <= dim);
        loop {
            let reducible: Vec<Vec<u32>> =
                self.terms.keys().filter(|m| ring.applicable(m).is_some()).cloned().collect();
            if reducible.is_empty() {
                break;
            }
            let m = reducible[pick(reducible.len()) % reducible.len()].clone();
            let c = self.terms.remove(&m).expect("listed above");
            let rule = ring.applicable(&m).expect("listed above");
            let mut rest = m.clone();
            rest[rule.generator] -= rule.power;
            for (rm, rc) in &rule.replacement {
                let nm: Vec<u32> = rest.iter().zip(rm).map(|(a, b)| a + b).collect();
                if ring.weighted_degree(&nm) <= dim {
                    add_term(&mut self.terms, nm, &(&c * rc));
                }
            }
        }
    }

    /// Number of points of the top-degree part.
    pub fn degree(&self) -> Result<DPoly, EnumerativeError> {
        let mut total = DPoly::zero(1);
        for (m, c) in &self.terms {
            if self.ring.weighted_degree(m) != self.ring.dimension {
                continue;
            }
            let w = self
                .ring
                .top
                .iter()
                .find(|(tm, _)| tm == m)
                .map(|(_, w)| w)
                .ok_or_else(|| EnumerativeError::NoTopEvaluation(m.clone()))?;
            total = &total + &(c * w);
        }
        Ok(total)
    }
}

fn add_term(terms: &mut BTreeMap<Vec<u32>, DPoly>, m: Vec<u32>, c: &DPoly) {
    let sum = match terms.get(&m) {
        Some(v) => v + c,
        None => c.clone(),
    };
    if sum.is_zero() {
        terms.remove(&m);
    } else {
        terms.insert(m, sum);
    }
}

/// Product reduced to normal form.
pub fn chow_mul(a: &ChowClass, b: &ChowClass) -> Result<ChowClass, EnumerativeError> {
    a.same_ring(b)?;
    let mut out = ChowClass::zero(&a.ring);
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            add_term(&mut out.terms, m, &(ca * cb));
        }
    }
    out.normalize();
    Ok(out)
}

/// Degree of the curvature variety with `d` symbolic: `ζ⁶` reduced in the bundle ring.
pub fn degree_y_symbolic() -> Result<DPoly, EnumerativeError> {
    let ring = Arc::new(curvature_bundle_ring());
    ring.validate()?;
    ChowClass::generator(&ring, 1).pow(6).degree()
}

fn check_degree(d: u64) -> Result<i64, EnumerativeError> {
    if d < 2 {
        return Err(EnumerativeError::DegreeTooLow(d));
    }
    if d > MAX_DEGREE {
        return Err(EnumerativeError::DegreeTooHigh(d));
    }
    Ok(d as i64)
}

/// Degree of the curvature variety for a surface of degree `d`, by ring
/// reduction with the Chern classes evaluated at `d`.
pub fn degree_y(d: u64) -> Result<i128, EnumerativeError> {
    let di = check_degree(d)?;
    let c = whitney_total_class(
        &[d_const(di - 2), d_const(di - 1), d_const(di - 1), d_const(di - 1), d_const(di - 1)],
        2,
    );
    let mut ring = GradedRingSpec::projective_bundle_over_surface(5, c[1].clone(), c[2].clone());
    ring.top = vec![(vec![2, 4], d_const(di))];
    let ring = Arc::new(ring);
    ring.validate()?;
    let deg = ChowClass::generator(&ring, 1).pow(6).degree()?;
    Ok(to_i128(&eval_at(&deg, 0)?))
}

/// Number of flexes of a plane curve of degree `d`: the curve meets its
/// Hessian curve (degree `3(d−2)`) in `ℙ²`.
pub fn flex_count(d: u64) -> Result<i128, EnumerativeError> {
    let di = check_degree(d)?;
    let ring = Arc::new(GradedRingSpec::projective_space(2));
    let h = ChowClass::generator(&ring, 0);
    let prod = chow_mul(&h.scale(&d_const(di)), &h.scale(&d_const(3 * (di - 2))))?;
    Ok(to_i128(&eval_at(&prod.degree()?, 0)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SalmonLedger {
    pub degree: u64,
    pub deg_dual: i128,
    pub deg_c0: i128,
    pub flexes: i128,
    pub deg_y: i128,
    pub deg_yn: i128,
    pub umbilics: i128,
    /// Canonical class of the incidence surface on `(h_Y, h_X)`.
    pub k_z: (i128, i128),
}

fn formula(coeffs: &[i64], d: i64) -> i128 {
    coeffs.iter().rev().fold(0i128, |acc, &c| acc * d as i128 + c as i128)
}

/// Every degree in the chain, each from its own formula, with the
/// subtraction relations between them asserted.
pub fn salmon_ledger(d: u64) -> Result<SalmonLedger, EnumerativeError> {
    let di = check_degree(d)?;
    let deg_dual = formula(&[0, 1, -2, 1], di);
    let deg_c0 = formula(&[0, 5, -9, 4], di);
    let flexes = flex_count(d)?;
    if flexes != formula(&[0, -6, 3], di) {
        return Err(EnumerativeError::IdentityFailed(format!("flexes({d}) = {flexes}")));
    }
    let deg_y = degree_y(d)?;
    let deg_yn = formula(&[0, 21, -34, 14], di);
    let umbilics = formula(&[0, 22, -28, 10], di);
    if deg_yn != deg_y - deg_dual {
        return Err(EnumerativeError::IdentityFailed(format!(
            "deg_YN = {deg_yn} but deg_Y − deg_dual = {}",
            deg_y - deg_dual
        )));
    }
    if umbilics != deg_yn - deg_c0 - flexes {
        return Err(EnumerativeError::IdentityFailed(format!(
            "umbilics = {umbilics} but deg_YN − deg_C0 − flexes = {}",
            deg_yn - deg_c0 - flexes
        )));
    }
    Ok(SalmonLedger {
        degree: d,
        deg_dual,
        deg_c0,
        flexes,
        deg_y,
        deg_yn,
        umbilics,
        k_z: (-5, 6 * di as i128 - 10),
    })
}

/// The ledger relations as polynomial identities in `d`.
pub fn ledger_identities_symbolic() -> Result<(), EnumerativeError> {
    let deg_y = degree_y_symbolic()?;
    let expect = |name: &str, got: &DPoly, want: &DPoly| {
        if got == want {
            Ok(())
        } else {
            Err(EnumerativeError::IdentityFailed(name.to_string()))
        }
    };
    expect("deg_Y = 15d³ − 36d² + 22d", &deg_y, &d_poly(&[0, 22, -36, 15]))?;
    let dual = d_poly(&[0, 1, -2, 1]);
    let yn = d_poly(&[0, 21, -34, 14]);
    expect("deg_YN = deg_Y − deg_dual", &(&deg_y - &dual), &yn)?;
    let c0 = &(&d_poly(&[-5, 4]) * &d_poly(&[-1, 1])) * &d_var();
    let flex = &d_poly(&[0, 3]) * &d_poly(&[-2, 1]);
    expect("umbilics = deg_YN − deg_C0 − flexes", &(&(&yn - &c0) - &flex), &d_poly(&[0, 22, -28, 10]))
}

/// `(699/2)d³ − (1611/2)d² + 462d`, checked against `(2796d³ − 6444d² + 3696d)/8`.
pub fn cc_upper_bound(d: u64) -> Result<Rational, EnumerativeError> {
    let di = check_degree(d)?;
    let r = |n: i64, m: i64| Rational::new(BigInt::from(n), BigInt::from(m));
    let x = Rational::from_i64(di);
    let x2 = &x * &x;
    let x3 = &x2 * &x;
    let bound = &(&(&r(699, 2) * &x3) - &(&r(1611, 2) * &x2)) + &(&r(462, 1) * &x);
    let pre = &(&(&r(2796, 1) * &x3) - &(&r(6444, 1) * &x2)) + &(&r(3696, 1) * &x);
    if &pre / &r(8, 1) != bound {
        return Err(EnumerativeError::IdentityFailed(format!("bound quotient at d = {d}")));
    }
    Ok(bound)
}

/// The quotient identity as rational polynomials in `d`.
pub fn cc_bound_identity_symbolic() -> Result<(), EnumerativeError> {
    let half = |n: i64| Rational::new(BigInt::from(n), BigInt::from(2));
    let bound = DPoly::from_terms(
        1,
        [(vec![3], half(699)), (vec![2], half(-1611)), (vec![1], Rational::from_i64(462))],
    );
    let pre = d_poly(&[0, 3696, -6444, 2796]).scale(&Rational::new(BigInt::one(), BigInt::from(8)));
    if pre == bound {
        Ok(())
    } else {
        Err(EnumerativeError::IdentityFailed("bound quotient".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KnownCcCount {
    pub degree: u64,
    pub value: u64,
    pub exact: bool,
    pub is_lower_bound: bool,
}

/// Published critical curvature counts for general surfaces.
pub fn known_cc_counts(d: u64) -> Result<KnownCcCount, EnumerativeError> {
    let (value, exact) = match d {
        2 => (18, true),
        3 => (456, false),
        4 => (1808, false),
        _ => return Err(EnumerativeError::OutsideTable(d)),
    };
    Ok(KnownCcCount { degree: d, value, exact, is_lower_bound: !exact })
}

impl ChowClass {
    /// Normal form reached when rewrites are applied in the order chosen by `pick`.
    pub fn renormalized_with(&self, pick: impl FnMut(usize) -> usize) -> Self {
        let mut out = self.clone();
        out.normalize_with(pick);
        out
    }

    /// Unreduced product (for rewriting-order experiments).
    pub fn raw_product(a: &ChowClass, b: &ChowClass) -> Result<ChowClass, EnumerativeError> {
        a.same_ring(b)?;
        let mut out = ChowClass::zero(&a.ring);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                add_term(&mut out.terms, m, &(ca * cb));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projective_space_truncation() {
        let ring = Arc::new(GradedRingSpec::projective_space(3));
        let h = ChowClass::generator(&ring, 0);
        assert!(chow_mul(&h, &h.pow(3)).unwrap().is_zero());
        assert_eq!(h.pow(3).degree().unwrap(), d_const(1));
    }

    #[test]
    fn flex_product() {
        let ring = Arc::new(GradedRingSpec::projective_space(2));
        let h = ChowClass::generator(&ring, 0);
        let p = chow_mul(&h.scale(&d_var()), &h.scale(&d_poly(&[-6, 3]))).unwrap();
        assert_eq!(p.degree().unwrap(), d_poly(&[0, -6, 3]));
        assert_eq!(flex_count(3).unwrap(), 9);
        assert_eq!(flex_count(4).unwrap(), 24);
    }

    #[test]
    fn bundle_relation() {
        let ring = Arc::new(curvature_bundle_ring());
        let z5 = ChowClass::generator(&ring, 1).pow(5);
        let mut want = BTreeMap::new();
        want.insert(vec![1, 4], d_poly(&[6, -5]));
        want.insert(vec![2, 3], (&d_poly(&[-1, 1]) * &d_poly(&[-14, 10])).scale(&Rational::from_i64(-1)));
        assert_eq!(z5.terms(), &want);
    }

    #[test]
    fn whitney_sum() {
        let c = whitney_total_class(
            &[d_poly(&[-2, 1]), d_poly(&[-1, 1]), d_poly(&[-1, 1]), d_poly(&[-1, 1]), d_poly(&[-1, 1])],
            2,
        );
        assert_eq!(c.len(), 3);
        assert_eq!(c[0], d_const(1));
        assert_eq!(c[1], d_poly(&[-6, 5]));
        assert_eq!(c[2], &d_poly(&[-1, 1]) * &d_poly(&[-14, 10]));
    }

    #[test]
    fn degree_of_curvature_variety() {
        assert_eq!(degree_y_symbolic().unwrap(), d_poly(&[0, 22, -36, 15]));
        assert_eq!(degree_y(2).unwrap(), 20);
        assert_eq!(degree_y(3).unwrap(), 147);
        for d in 2..=20u64 {
            assert_eq!(degree_y(d).unwrap(), formula(&[0, 22, -36, 15], d as i64));
        }
    }

    #[test]
    fn ledger_values() {
        let l = salmon_ledger(2).unwrap();
        assert_eq!((l.deg_dual, l.deg_c0, l.flexes, l.deg_y, l.deg_yn, l.umbilics), (2, 6, 0, 20, 18, 12));
        assert_eq!(l.k_z, (-5, 2));
        assert_eq!(salmon_ledger(3).unwrap().umbilics, 84);
        for d in 2..=20 {
            salmon_ledger(d).unwrap();
        }
        ledger_identities_symbolic().unwrap();
        assert_eq!(salmon_ledger(1), Err(EnumerativeError::DegreeTooLow(1)));
    }

    #[test]
    fn bounds_and_table() {
        let b: Vec<Rational> = (2..=4).map(|d| cc_upper_bound(d).unwrap()).collect();
        assert_eq!(b, vec![Rational::from_i64(498), Rational::from_i64(3573), Rational::from_i64(11328)]);
        cc_bound_identity_symbolic().unwrap();
        assert_eq!(known_cc_counts(2).unwrap(), KnownCcCount { degree: 2, value: 18, exact: true, is_lower_bound: false });
        assert!(known_cc_counts(3).unwrap().is_lower_bound);
        assert_eq!(known_cc_counts(4).unwrap().value, 1808);
        assert_eq!(known_cc_counts(5), Err(EnumerativeError::OutsideTable(5)));
    }

    #[test]
    fn ring_mismatch() {
        let a = ChowClass::generator(&Arc::new(GradedRingSpec::projective_space(2)), 0);
        let b = ChowClass::generator(&Arc::new(GradedRingSpec::projective_space(3)), 0);
        assert_eq!(chow_mul(&a, &b), Err(EnumerativeError::RingMismatch));
    }

    fn random_class(ring: &Arc<GradedRingSpec>, rng: &mut ChaCha8Rng) -> ChowClass {
        let mut c = ChowClass::zero(ring);
        for _ in 0..rng.gen_range(1..4) {
            let m: Vec<u32> = (0..ring.names.len()).map(|_| rng.gen_range(0..4)).collect();
            let coef = d_poly(&[rng.gen_range(-5..6), rng.gen_range(-5..6)]);
            c = c.add(&ChowClass::monomial(ring, m, coef)).unwrap();
        }
        c
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn ring_laws(seed in 0u64..1_000_000) {
            let ring = Arc::new(curvature_bundle_ring());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_class(&ring, &mut rng);
            let b = random_class(&ring, &mut rng);
            let c = random_class(&ring, &mut rng);
            prop_assert_eq!(chow_mul(&a, &b).unwrap(), chow_mul(&b, &a).unwrap());
            let left = chow_mul(&chow_mul(&a, &b).unwrap(), &c).unwrap();
            let right = chow_mul(&a, &chow_mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn rewriting_order_is_irrelevant(seed in 0u64..1_000_000) {
            let ring = Arc::new(curvature_bundle_ring());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_class(&ring, &mut rng);
            let b = random_class(&ring, &mut rng);
            let raw = ChowClass::raw_product(&a, &b).unwrap();
            let first = raw.renormalized_with(|_| 0);
            let random = raw.renormalized_with(|n| rng.gen_range(0..n));
            prop_assert_eq!(first, random);
        }

        #[test]
        fn powers_vanish_past_dimension(k in 0u32..6, m in 0u32..6) {
            let ring = Arc::new(GradedRingSpec::projective_space(4));
            let h = ChowClass::generator(&ring, 0);
            let p = chow_mul(&h.pow(k), &h.pow(m)).unwrap();
            prop_assert_eq!(p.is_zero(), k + m > 4);
        }
    }
}
