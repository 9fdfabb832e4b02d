//! Dense complex linear algebra for the tracker: LU with partial pivoting,
//! an ∞-norm condition number from the factors, and least squares.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Row-major square matrix.
#[derive(Clone, Debug)]
pub struct CMat {
    pub n: usize,
    pub m: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize, m: usize) -> Self {
        CMat { n, m, data: vec![Complex64::new(0.0, 0.0); n * m] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.m + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.m + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.m + j] += v;
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.m).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.m).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    singular: bool,
}

impl Lu {
    pub fn factor(a: &CMat) -> Lu {
        assert_eq!(a.n, a.m, "LU needs a square matrix");
        let n = a.n;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f.re != 0.0 || f.im != 0.0 {
                    for j in k + 1..n {
                        let u = lu[k * n + j];
                        lu[i * n + j] -= f * u;
                    }
                }
            }
        }
        Lu { n, lu, perm, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Solves `A x = b`; `None` if the factorization hit a zero pivot.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        if self.singular {
            return None;
        }
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Some(x)
        } else {
            None
        }
    }

    /// `‖A‖∞ · ‖A⁻¹‖∞`, with the inverse assembled column by column from the factors.
    pub fn condition(&self, a: &CMat) -> f64 {
        if self.singular {
            return f64::INFINITY;
        }
        let n = self.n;
        let mut row_sums = vec![0.0; n];
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            match self.solve(&e) {
                Some(col) => {
                    for i in 0..n {
                        row_sums[i] += col[i].norm();
                    }
                }
                None => return f64::INFINITY,
            }
        }
        let inv_norm = row_sums.into_iter().fold(0.0, f64::max);
        a.norm_inf() * inv_norm
    }
}

/// Minimum-norm least-squares solution of `A x = b` (any shape), via SVD.
pub fn least_squares(a: &CMat, b: &[Complex64]) -> Vec<Complex64> {
    let m = DMatrix::from_fn(a.n, a.m, |i, j| a.get(i, j));
    let rhs = nalgebra::DVector::from_column_slice(b);
    let svd = m.svd(true, true);
    let eps = 1e-13 * svd.singular_values.max().max(1e-300);
    let x = svd.solve(&rhs, eps).expect("both factors were requested");
    x.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_small_system() {
        let mut a = CMat::zeros(2, 2);
        a.set(0, 0, c(0.0, 0.0));
        a.set(0, 1, c(2.0, 1.0));
        a.set(1, 0, c(1.0, 0.0));
        a.set(1, 1, c(3.0, 0.0));
        let b = vec![c(1.0, 0.0), c(2.0, -1.0)];
        let lu = Lu::factor(&a);
        let x = lu.solve(&b).unwrap();
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_detected() {
        let mut a = CMat::zeros(2, 2);
        a.set(0, 0, c(1.0, 0.0));
        a.set(0, 1, c(2.0, 0.0));
        a.set(1, 0, c(2.0, 0.0));
        a.set(1, 1, c(4.0, 0.0));
        let lu = Lu::factor(&a);
        assert!(lu.is_singular() || lu.condition(&a) > 1e15);
    }

    #[test]
    fn identity_condition_is_one() {
        let mut a = CMat::zeros(3, 3);
        for i in 0..3 {
            a.set(i, i, c(1.0, 0.0));
        }
        assert!((Lu::factor(&a).condition(&a) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn least_squares_overdetermined() {
        // x = 1 + i fits all three rows exactly
        let mut a = CMat::zeros(3, 1);
        a.set(0, 0, c(1.0, 0.0));
        a.set(1, 0, c(2.0, 0.0));
        a.set(2, 0, c(0.0, 1.0));
        let b = vec![c(1.0, 1.0), c(2.0, 2.0), c(-1.0, 1.0)];
        let x = least_squares(&a, &b);
        assert!((x[0] - c(1.0, 1.0)).norm() < 1e-12);
    }
}
