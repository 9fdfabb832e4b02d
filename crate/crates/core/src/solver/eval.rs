//! Flattened sparse representation of a polynomial system for fast repeated
//! evaluation of values and Jacobians.

use num_complex::Complex64;

use super::linalg::CMat;
use crate::poly::{CPoly, PolySystem};

#[derive(Clone, Debug)]
struct Term {
    coeff: Complex64,
    start: u32,
    len: u32,
}

#[derive(Clone, Debug)]
pub struct CompiledSystem {
    nvars: usize,
    eq_starts: Vec<usize>,
    terms: Vec<Term>,
    factors: Vec<(u32, u32)>,
    max_exp: Vec<u32>,
    pow_offsets: Vec<usize>,
    pow_len: usize,
    degrees: Vec<u32>,
}

/// Scratch space reused across evaluations of one [`CompiledSystem`].
#[derive(Clone, Debug)]
pub struct EvalScratch {
    pows: Vec<Complex64>,
    prefix: Vec<Complex64>,
}

impl CompiledSystem {
    pub fn new(nvars: usize, eqs: &[CPoly]) -> Self {
        let mut eq_starts = Vec::with_capacity(eqs.len() + 1);
        let mut terms = Vec::new();
        let mut factors = Vec::new();
        let mut max_exp = vec![0u32; nvars];
        let mut degrees = Vec::with_capacity(eqs.len());
        for eq in eqs {
            assert_eq!(eq.nvars(), nvars, "equation arity differs from system");
            eq_starts.push(terms.len());
            degrees.push(eq.degree());
            for (m, c) in eq.terms() {
                let start = factors.len() as u32;
                for (v, &e) in m.exps().iter().enumerate() {
                    if e > 0 {
                        factors.push((v as u32, e));
                        max_exp[v] = max_exp[v].max(e);
                    }
                }
                terms.push(Term { coeff: *c, start, len: factors.len() as u32 - start });
            }
        }
        eq_starts.push(terms.len());
        let mut pow_offsets = Vec::with_capacity(nvars);
        let mut acc = 0;
        for &e in &max_exp {
            pow_offsets.push(acc);
            acc += e as usize + 1;
        }
        CompiledSystem {
            nvars,
            eq_starts,
            terms,
            factors,
            max_exp,
            pow_offsets,
            pow_len: acc,
            degrees,
        }
    }

    pub fn from_system(sys: &PolySystem<Complex64>) -> Self {
        Self::new(sys.nvars(), sys.eqs())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn neqs(&self) -> usize {
        self.eq_starts.len() - 1
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn scratch(&self) -> EvalScratch {
        EvalScratch {
            pows: vec![Complex64::new(0.0, 0.0); self.pow_len],
            prefix: Vec::with_capacity(16),
        }
    }

    fn fill_powers(&self, z: &[Complex64], pows: &mut [Complex64]) {
        for v in 0..self.nvars {
            let off = self.pow_offsets[v];
            let mut p = Complex64::new(1.0, 0.0);
            pows[off] = p;
            for k in 1..=self.max_exp[v] as usize {
                p *= z[v];
                pows[off + k] = p;
            }
        }
    }

    /// Values into `vals`; if `jac` is given, the Jacobian is written into
    /// rows `row0..row0+neqs` and columns `0..nvars`, scaled by `scale` (values too).
    pub fn eval_into(
        &self,
        z: &[Complex64],
        scale: Complex64,
        vals: &mut [Complex64],
        mut jac: Option<(&mut CMat, usize)>,
        s: &mut EvalScratch,
    ) {
        self.fill_powers(z, &mut s.pows);
        let zero = Complex64::new(0.0, 0.0);
        for i in 0..self.neqs() {
            let mut val = zero;
            for t in &self.terms[self.eq_starts[i]..self.eq_starts[i + 1]] {
                let fs = &self.factors[t.start as usize..(t.start + t.len) as usize];
                if let Some((j, row0)) = jac.as_mut() {
                    // prefix products, then sweep back with a suffix product
                    s.prefix.clear();
                    let mut acc = t.coeff;
                    for &(v, e) in fs {
                        s.prefix.push(acc);
                        acc *= s.pows[self.pow_offsets[v as usize] + e as usize];
                    }
                    val += acc;
                    let mut suffix = scale;
                    for (k, &(v, e)) in fs.iter().enumerate().rev() {
                        let off = self.pow_offsets[v as usize];
                        let d = s.prefix[k] * suffix * s.pows[off + e as usize - 1] * e as f64;
                        j.add(*row0 + i, v as usize, d);
                        suffix *= s.pows[off + e as usize];
                    }
                } else {
                    let mut acc = t.coeff;
                    for &(v, e) in fs {
                        acc *= s.pows[self.pow_offsets[v as usize] + e as usize];
                    }
                    val += acc;
                }
            }
            vals[i] = val * scale;
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut s = self.scratch();
        let mut vals = vec![Complex64::new(0.0, 0.0); self.neqs()];
        self.eval_into(z, Complex64::new(1.0, 0.0), &mut vals, None, &mut s);
        vals
    }

    /// Values and Jacobian (neqs × nvars).
    pub fn eval_with_jacobian(&self, z: &[Complex64]) -> (Vec<Complex64>, CMat) {
        let mut s = self.scratch();
        let mut vals = vec![Complex64::new(0.0, 0.0); self.neqs()];
        let mut jac = CMat::zeros(self.neqs(), self.nvars);
        self.eval_into(z, Complex64::new(1.0, 0.0), &mut vals, Some((&mut jac, 0)), &mut s);
        (vals, jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::random_complex_poly;

    #[test]
    fn matches_direct_evaluation_and_derivatives() {
        let eqs: Vec<CPoly> = (0..3).map(|k| random_complex_poly(3, 3, 40 + k)).collect();
        let sys = CompiledSystem::new(3, &eqs);
        let z = [
            Complex64::new(0.3, -0.2),
            Complex64::new(-1.1, 0.4),
            Complex64::new(0.7, 0.9),
        ];
        let (vals, jac) = sys.eval_with_jacobian(&z);
        for (i, eq) in eqs.iter().enumerate() {
            assert!((vals[i] - eq.eval_c64(&z).unwrap()).norm() < 1e-12);
            for v in 0..3 {
                let d = eq.diff(v).eval_c64(&z).unwrap();
                assert!((jac.get(i, v) - d).norm() < 1e-12);
            }
        }
    }
}
