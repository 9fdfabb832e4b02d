//! Deflation of singular endpoints.
//!
//! At a singular root `z` of `F` with Jacobian corank `k`, the augmented
//! system `F(z) = 0, J(z)·V = 0, R·V = I` in the unknowns `(z, V)` is
//! overdetermined and, for an isolated root, typically regular. Gauss-Newton
//! on it converges quadratically to the root; a rank-deficient augmented
//! Jacobian at the limit points to a positive-dimensional solution set.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::eval::CompiledSystem;
use super::linalg::{least_squares, CMat};
use super::norm_inf;
use crate::poly::{CPoly, PolySystem};

/// Relative singular-value threshold for the numerical corank of `J(z)`.
const RANK_TOL: f64 = 1e-5;
/// Smallest accepted `σ_min / σ_max` of the augmented Jacobian.
const REGULAR_TOL: f64 = 1e-11;
const MAX_ITER: usize = 40;
const RESIDUAL_OK: f64 = 1e-10;
/// Largest relative distance between a singular endpoint and its refinement.
const MAX_MOVE: f64 = 5e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct Deflated {
    pub coords: Vec<Complex64>,
    pub corank: usize,
    /// Max modulus of the original equations at `coords`.
    pub residual: f64,
    /// `σ_max / σ_min` of the augmented Jacobian.
    pub condition: f64,
}

/// Augmented systems are built lazily for each corank met.
pub struct Deflator {
    n: usize,
    base: CompiledSystem,
    partials: Vec<Vec<CPoly>>,
    augmented: Vec<Option<(CompiledSystem, Vec<Vec<Complex64>>)>>,
    seed: u64,
}

fn to_dmatrix(a: &CMat) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.n, a.m, |i, j| a.get(i, j))
}

fn singular_values(a: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = to_dmatrix(a).singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

impl Deflator {
    pub fn new(system: &PolySystem<Complex64>, seed: u64) -> Self {
        let n = system.nvars();
        let partials = system
            .eqs()
            .iter()
            .map(|f| (0..n).map(|j| f.diff(j)).collect())
            .collect();
        Deflator {
            n,
            base: CompiledSystem::from_system(system),
            partials,
            augmented: vec![None; n + 1],
            seed,
        }
    }

    fn ensure_augmented(&mut self, k: usize) {
        if self.augmented[k].is_none() {
            let n = self.n;
            let nv = n + n * k;
            let zmap: Vec<usize> = (0..n).collect();
            // J·V column by column, then R·V − I; F itself is evaluated separately
            let mut eqs: Vec<CPoly> = Vec::new();
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (k as u64).wrapping_mul(0x9e37_79b9));
            let r: Vec<Vec<Complex64>> = (0..k)
                .map(|_| {
                    (0..n)
                        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                        .collect()
                })
                .collect();
            for c in 0..k {
                for row in &self.partials {
                    let mut g = CPoly::zero(nv);
                    for (j, p) in row.iter().enumerate() {
                        let v = CPoly::var(nv, n + c * n + j);
                        g = &g + &(&p.embed(nv, &zmap) * &v);
                    }
                    eqs.push(g);
                }
            }
            for (a, ra) in r.iter().enumerate() {
                for c in 0..k {
                    let mut g = CPoly::constant(nv, Complex64::new(if a == c { -1.0 } else { 0.0 }, 0.0));
                    for (j, &coef) in ra.iter().enumerate() {
                        g = &g + &CPoly::var(nv, n + c * n + j).scale(&coef);
                    }
                    eqs.push(g);
                }
            }
            self.augmented[k] = Some((CompiledSystem::new(nv, &eqs), r));
        }
    }

    /// Refines a singular point; `None` when the augmented system is not
    /// regular at the limit (non-isolated root) or Gauss-Newton fails.
    pub fn deflate(&mut self, z0: &[Complex64]) -> Option<Deflated> {
        let n = self.n;
        let (_, jac) = self.base.eval_with_jacobian(z0);
        let m = to_dmatrix(&jac);
        let svd = m.svd(false, true);
        let sigma = &svd.singular_values;
        let smax = sigma.max();
        if !smax.is_finite() {
            return None;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| sigma[a].total_cmp(&sigma[b]));
        let k = order.iter().filter(|&&i| sigma[i] <= RANK_TOL * smax).count().max(1);
        let v_t = svd.v_t.expect("requested");
        // null vectors: rows of Vᴴ for the smallest singular values, conjugated
        let nulls: Vec<Vec<Complex64>> = order[..k]
            .iter()
            .map(|&i| (0..n).map(|j| v_t[(i, j)].conj()).collect())
            .collect();

        self.ensure_augmented(k);
        let base = &self.base;
        let (aug, r) = self.augmented[k].as_ref().map(|a| (&a.0, &a.1)).expect("built above");
        // normalize V so that R·V = I
        let mut rv = DMatrix::<Complex64>::zeros(k, k);
        for a in 0..k {
            for c in 0..k {
                rv[(a, c)] = (0..n).map(|j| r[a][j] * nulls[c][j]).sum();
            }
        }
        let inv = rv.try_inverse()?;
        let mut w: Vec<Complex64> = z0.to_vec();
        for c in 0..k {
            for j in 0..n {
                w.push((0..k).map(|b| nulls[b][j] * inv[(b, c)]).sum());
            }
        }

        let base_rows = base.neqs();
        let full_eval = |w: &[Complex64]| -> (Vec<Complex64>, CMat) {
            let (f, jf) = base.eval_with_jacobian(&w[..n]);
            let (g, jg) = aug.eval_with_jacobian(w);
            let rows = base_rows + aug.neqs();
            let mut jac = CMat::zeros(rows, w.len());
            for i in 0..base_rows {
                for j in 0..n {
                    jac.set(i, j, jf.get(i, j));
                }
            }
            for i in 0..aug.neqs() {
                for j in 0..w.len() {
                    jac.set(base_rows + i, j, jg.get(i, j));
                }
            }
            let mut vals = f;
            vals.extend(g);
            (vals, jac)
        };

        let mut converged = false;
        let mut last = f64::INFINITY;
        for _ in 0..MAX_ITER {
            let (vals, jac) = full_eval(&w);
            let rhs: Vec<Complex64> = vals.iter().map(|v| -v).collect();
            let dw = least_squares(&jac, &rhs);
            let dn = norm_inf(&dw);
            if !dn.is_finite() {
                return None;
            }
            for (a, b) in w.iter_mut().zip(&dw) {
                *a += b;
            }
            last = dn;
            if dn <= 1e-13 * (1.0 + norm_inf(&w)) {
                converged = true;
                break;
            }
        }
        // rounding can keep the last steps just above the floor
        converged |= last <= 1e-10 * (1.0 + norm_inf(&w));
        let (vals, jac) = full_eval(&w);
        let z = w[..n].to_vec();
        let zn = norm_inf(&z);
        let residual = vals[..base_rows].iter().map(|v| v.norm()).fold(0.0, f64::max);
        let aug_res = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let s = singular_values(&jac);
        let condition = s[0] / s[s.len() - 1].max(f64::MIN_POSITIVE);
        let moved = z.iter().zip(z0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let ok = converged
            && residual <= RESIDUAL_OK * (1.0 + zn)
            && aug_res <= RESIDUAL_OK * (1.0 + norm_inf(&w))
            && 1.0 / condition > REGULAR_TOL
            && moved <= MAX_MOVE * (1.0 + zn);
        ok.then_some(Deflated { coords: z, corank: k, residual, condition })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{default_vars, parse_poly, Rational};

    fn system(eqs: &[&str], n: usize) -> PolySystem<Complex64> {
        let vars = default_vars(n);
        let polys = eqs.iter().map(|e| parse_poly::<Rational>(e, &vars).unwrap().to_complex()).collect();
        PolySystem::new(vars, polys).unwrap()
    }

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn double_root_is_sharpened() {
        // (x1 − 1)² = 0, x2 − 2 = 0
        let sys = system(&["x1^2 - 2*x1 + 1", "x2 - 2"], 2);
        let mut d = Deflator::new(&sys, 3);
        let out = d.deflate(&[c(1.0 + 3e-5), c(2.0)]).unwrap();
        assert_eq!(out.corank, 1);
        assert!((out.coords[0] - c(1.0)).norm() < 1e-12);
        assert!((out.coords[1] - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn tangency_point_is_isolated() {
        // a circle touching a line: isolated double intersection at (0, 1)
        let sys = system(&["x1^2 + x2^2 - 1", "x2 - 1"], 2);
        let mut d = Deflator::new(&sys, 1);
        let out = d.deflate(&[c(2e-6), c(1.0)]).unwrap();
        assert!(out.coords[0].norm() < 1e-12);
    }

    #[test]
    fn curve_of_roots_is_rejected() {
        // both equations vanish on the whole line x1 = x2
        let sys = system(&["x1 - x2", "x1^2 - x1*x2"], 2);
        let mut d = Deflator::new(&sys, 5);
        assert!(d.deflate(&[c(0.3), c(0.3 + 1e-7)]).is_none());
    }
}
