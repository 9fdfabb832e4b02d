use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{CPoly, Monomial};

/// All exponent vectors of total degree exactly `d` in `n` variables,
/// ascending in graded-lex order.
pub(crate) fn monomials_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n - 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in 0..=d {
            prefix.push(e);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out.sort_by(|a, b| Monomial::new(a.clone()).cmp(&Monomial::new(b.clone())));
    out
}

fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    (0..=d).flat_map(|k| monomials_of_degree(n, k)).collect()
}

/// Dense polynomial with independent standard-normal real coefficients on
/// every monomial of total degree at most `d`. Deterministic in `seed`.
pub fn random_dense_poly(n: usize, d: u32, seed: u64) -> CPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CPoly::from_terms(
        n,
        monomials_up_to(n, d).into_iter().map(|e| {
            let c: f64 = StandardNormal.sample(&mut rng);
            (e, Complex64::new(c, 0.0))
        }),
    )
}

/// Dense polynomial with independent complex Gaussian coefficients.
pub fn random_complex_poly(n: usize, d: u32, seed: u64) -> CPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CPoly::from_terms(
        n,
        monomials_up_to(n, d).into_iter().map(|e| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            (e, Complex64::new(re, im))
        }),
    )
}

/// Homogeneous form of degree `d` in `n` variables with real Gaussian coefficients.
pub fn random_homogeneous_poly(n: usize, d: u32, seed: u64) -> CPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CPoly::from_terms(
        n,
        monomials_of_degree(n, d).into_iter().map(|e| {
            let c: f64 = StandardNormal.sample(&mut rng);
            (e, Complex64::new(c, 0.0))
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        assert_eq!(random_dense_poly(3, 2, 11), random_dense_poly(3, 2, 11));
    }

    #[test]
    fn dense_support() {
        assert_eq!(random_dense_poly(3, 3, 5).num_terms(), 20);
        assert_eq!(random_homogeneous_poly(3, 4, 5).num_terms(), 15);
    }

    #[test]
    fn seeds_differ() {
        let a = random_dense_poly(3, 2, 1);
        let b = random_dense_poly(3, 2, 2);
        let differs = a
            .terms()
            .zip(b.terms())
            .any(|((ma, ca), (mb, cb))| ma != mb || ca != cb);
        assert!(differs);
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_up_to(3, 3).len(), 20);
        assert_eq!(monomials_of_degree(4, 2).len(), 10);
    }
}
