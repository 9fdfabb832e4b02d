//! Polynomial systems whose solutions are the special points of a hypersurface.
//!
//! Variable and equation orders are fixed; downstream code indexes into them.
//! The curvature variety uses `x1..xn, lambda, u1..un, y1, y2`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::poly::{Coeff, MultiPoly, PolySystem, SignAction};
use crate::solver::linalg::{least_squares, CMat};
use crate::solver::CompiledSystem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemsError {
    #[error("polynomial is constant")]
    Constant,
    #[error("expected {expected} variables, got {got}")]
    VariableCount { expected: usize, got: usize },
    #[error("polynomial must be homogeneous")]
    NotHomogeneous,
    #[error("degree {got} is below the minimum {min}")]
    DegreeTooLow { got: u32, min: u32 },
    #[error("point has length {got}, system has {expected} unknowns")]
    PointLength { expected: usize, got: usize },
    #[error("point is not on the curvature variety (residual {0:e})")]
    NotOnVariety(f64),
}

/// Index layout of the curvature-variety unknowns for `n` ambient variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurvatureLayout {
    pub n: usize,
}

impl CurvatureLayout {
    pub fn x(&self, i: usize) -> usize {
        i
    }
    pub fn lambda(&self) -> usize {
        self.n
    }
    pub fn u(&self, i: usize) -> usize {
        self.n + 1 + i
    }
    pub fn y1(&self) -> usize {
        2 * self.n + 1
    }
    pub fn y2(&self) -> usize {
        2 * self.n + 2
    }
    pub fn len(&self) -> usize {
        2 * self.n + 3
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn equations(&self) -> usize {
        self.n + 4
    }
    pub fn names(&self) -> Vec<String> {
        let n = self.n;
        let mut v: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        v.push("lambda".into());
        v.extend((1..=n).map(|i| format!("u{i}")));
        v.push("y1".into());
        v.push("y2".into());
        v
    }
}

fn var<C: Coeff>(nv: usize, i: usize) -> MultiPoly<C> {
    MultiPoly::var(nv, i)
}

fn constant<C: Coeff>(nv: usize, v: i64) -> MultiPoly<C> {
    MultiPoly::constant(nv, C::from_i64(v))
}

fn sum<C: Coeff>(nv: usize, it: impl IntoIterator<Item = MultiPoly<C>>) -> MultiPoly<C> {
    it.into_iter().fold(MultiPoly::zero(nv), |a, b| &a + &b)
}

/// The `n + 4` equations cutting out the curvature variety, over `total`
/// variables whose first `2n + 3` follow [`CurvatureLayout`].
fn curvature_equations<C: Coeff>(f: &MultiPoly<C>, total: usize) -> Vec<MultiPoly<C>> {
    let n = f.nvars();
    let lay = CurvatureLayout { n };
    let map: Vec<usize> = (0..n).collect();
    let fe = f.embed(total, &map);
    let grad: Vec<MultiPoly<C>> = f.gradient().iter().map(|g| g.embed(total, &map)).collect();
    let hess: Vec<Vec<MultiPoly<C>>> = f
        .gradient()
        .iter()
        .map(|g| g.gradient().iter().map(|h| h.embed(total, &map)).collect())
        .collect();
    let lam = var::<C>(total, lay.lambda());
    let u: Vec<MultiPoly<C>> = (0..n).map(|i| var(total, lay.u(i))).collect();
    let y1 = var::<C>(total, lay.y1());
    let y2 = var::<C>(total, lay.y2());
    let eta = sum(total, grad.iter().map(|g| g * g));

    let mut eqs = vec![fe];
    eqs.push(&(&(&lam * &lam) * &eta) - &constant(total, 1));
    eqs.push(sum(total, (0..n).map(|i| &u[i] * &grad[i])));
    eqs.push(&sum(total, u.iter().map(|v| v * v)) - &constant(total, 1));
    for i in 0..n {
        let hu = sum(total, (0..n).map(|j| &hess[i][j] * &u[j]));
        eqs.push(&(&hu + &(&y1 * &u[i])) + &(&y2 * &grad[i]));
    }
    eqs
}

pub fn curvature_variety_system<C: Coeff>(f: &MultiPoly<C>) -> Result<PolySystem<C>, SystemsError> {
    if f.is_constant() {
        return Err(SystemsError::Constant);
    }
    let lay = CurvatureLayout { n: f.nvars() };
    let eqs = curvature_equations(f, lay.len());
    Ok(PolySystem::new(lay.names(), eqs).expect("arity is consistent"))
}

/// `g = λ·y1`, the signed principal curvature carried by a point of the
/// curvature variety. Checks the point against the variety first.
pub fn evaluate_g<C: Coeff>(f: &MultiPoly<C>, point: &[Complex64]) -> Result<Complex64, SystemsError> {
    let sys = curvature_variety_system(f)?;
    if point.len() != sys.nvars() {
        return Err(SystemsError::PointLength { expected: sys.nvars(), got: point.len() });
    }
    let r = sys.to_complex().scaled_residual(point);
    if !(r < 1e-8) {
        return Err(SystemsError::NotOnVariety(r));
    }
    let lay = CurvatureLayout { n: f.nvars() };
    Ok(point[lay.lambda()] * point[lay.y1()])
}

/// Umbilic system of a surface: the six entries of
/// `Hf(x) + y1·I − (∇f wᵀ + w ∇fᵀ) = 0` (upper triangle, row-major) followed
/// by `f = 0`, in unknowns `x1, x2, x3, y1, w1, w2, w3`.
pub fn umbilic_system<C: Coeff>(f: &MultiPoly<C>) -> Result<PolySystem<C>, SystemsError> {
    if f.nvars() != 3 {
        return Err(SystemsError::VariableCount { expected: 3, got: f.nvars() });
    }
    if f.is_constant() {
        return Err(SystemsError::Constant);
    }
    let total = 7;
    let map = [0, 1, 2];
    let grad: Vec<MultiPoly<C>> = f.gradient().iter().map(|g| g.embed(total, &map)).collect();
    let y1 = var::<C>(total, 3);
    let w: Vec<MultiPoly<C>> = (0..3).map(|i| var(total, 4 + i)).collect();
    let mut eqs = Vec::with_capacity(7);
    for i in 0..3 {
        let fi = f.diff(i);
        for j in i..3 {
            let mut e = fi.diff(j).embed(total, &map);
            if i == j {
                e = &e + &y1;
            }
            let sym = &(&grad[i] * &w[j]) + &(&w[i] * &grad[j]);
            eqs.push(&e - &sym);
        }
    }
    eqs.push(f.embed(total, &map));
    let names = ["x1", "x2", "x3", "y1", "w1", "w2", "w3"].iter().map(|s| s.to_string()).collect();
    Ok(PolySystem::new(names, eqs).expect("arity is consistent"))
}

/// Completes an umbilic candidate `x` to `(x, y1, w)` by linear least squares.
pub fn complete_umbilic(f: &MultiPoly<impl Coeff>, x: &[Complex64]) -> Vec<Complex64> {
    let g: Vec<Complex64> = f.gradient().iter().map(|p| p.eval_c64(x).unwrap()).collect();
    let mut a = CMat::zeros(6, 4);
    let mut b = Vec::with_capacity(6);
    let mut row = 0;
    for i in 0..3 {
        let fi = f.diff(i);
        for j in i..3 {
            let h = fi.diff(j).eval_c64(x).unwrap();
            // h + δ·y1 − g_i w_j − g_j w_i = 0
            if i == j {
                a.set(row, 0, Complex64::new(1.0, 0.0));
            }
            a.add(row, 1 + j, -g[i]);
            a.add(row, 1 + i, -g[j]);
            b.push(-h);
            row += 1;
        }
    }
    let sol = least_squares(&a, &b);
    let mut out = x.to_vec();
    out.extend(sol);
    out
}

/// Number of unknowns of the general critical-curvature system, `3n + 7`.
pub fn critical_curvature_unknowns(n: usize) -> usize {
    3 * n + 7
}

/// Sign actions of the critical-curvature system (see [`critical_curvature_system_general`]).
pub fn critical_curvature_symmetries(n: usize) -> Vec<SignAction> {
    let lay = CurvatureLayout { n };
    let total = critical_curvature_unknowns(n);
    let m = lay.len();
    // ν_k ↦ ε·s_k·ν_k where s_k is the sign picked up by equation k and ε by g
    let build = |name: &str, z_flip: &dyn Fn(usize) -> bool, eq_signs: &[i8], eps: i8| {
        let mut signs = vec![1i8; total];
        for (k, s) in signs.iter_mut().enumerate().take(m) {
            if z_flip(k) {
                *s = -1;
            }
        }
        for (k, &s) in eq_signs.iter().enumerate() {
            signs[m + k] = eps * s;
        }
        SignAction::new(name, signs)
    };
    let mut dir_signs = vec![1i8, 1, -1, 1];
    dir_signs.extend(std::iter::repeat(-1).take(n));
    let flat = vec![1i8; n + 4];
    let is_u_or_y2 = |k: usize| (lay.u(0)..lay.u(0) + n).contains(&k) || k == lay.y2();
    let is_lambda = |k: usize| k == lay.lambda();
    vec![
        build("direction", &is_u_or_y2, &dir_signs, 1),
        // (u, y0, y1, y2) ↦ (−u, −y0, −y1, y2) is (−u, y2 ↦ −y2) in the chart y0 = 1
        build("y_block", &is_u_or_y2, &dir_signs, 1),
        build("lambda", &is_lambda, &flat, -1),
    ]
}

/// Lagrange stationarity of `g = λ·y1` on the curvature variety: the `n + 4`
/// variety equations followed by `∂g/∂z_m − Σ_k ν_k ∂E_k/∂z_m` for every
/// variety unknown `z_m`, with multipliers `nu1..nu(n+4)` appended to the
/// variables. Carries the sign actions as symmetry metadata.
pub fn critical_curvature_system_general<C: Coeff>(
    f: &MultiPoly<C>,
) -> Result<PolySystem<C>, SystemsError> {
    if f.is_constant() {
        return Err(SystemsError::Constant);
    }
    let n = f.nvars();
    if n < 2 {
        return Err(SystemsError::VariableCount { expected: 2, got: n });
    }
    let lay = CurvatureLayout { n };
    let m = lay.len();
    let total = critical_curvature_unknowns(n);
    let base = curvature_equations(f, total);
    let nu: Vec<MultiPoly<C>> = (0..n + 4).map(|k| var(total, m + k)).collect();
    let mut eqs = base.clone();
    for zm in 0..m {
        let dg = if zm == lay.lambda() {
            var(total, lay.y1())
        } else if zm == lay.y1() {
            var(total, lay.lambda())
        } else {
            MultiPoly::zero(total)
        };
        let lag = sum(total, base.iter().zip(&nu).map(|(e, v)| &e.diff(zm) * v));
        eqs.push(&dg - &lag);
    }
    let mut names = lay.names();
    names.extend((1..=n + 4).map(|k| format!("nu{k}")));
    let sys = PolySystem::new(names, eqs).expect("arity is consistent");
    Ok(sys
        .with_symmetry(critical_curvature_symmetries(n))
        .expect("action lengths match"))
}

/// Fills the multipliers of a critical-curvature start `z` (length `2n + 3`)
/// by least squares on the stationarity equations.
pub fn complete_multipliers(f: &MultiPoly<impl Coeff>, z: &[Complex64]) -> Vec<Complex64> {
    let n = f.nvars();
    let lay = CurvatureLayout { n };
    let cv = curvature_variety_system(f).unwrap().to_complex();
    let compiled = CompiledSystem::from_system(&cv);
    let (_, jac) = compiled.eval_with_jacobian(z);
    let m = lay.len();
    let k = n + 4;
    // Jᵀ ν = ∇g
    let mut a = CMat::zeros(m, k);
    for i in 0..k {
        for j in 0..m {
            a.set(j, i, jac.get(i, j));
        }
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[lay.lambda()] = z[lay.y1()];
    b[lay.y1()] = z[lay.lambda()];
    let nu = least_squares(&a, &b);
    let mut out = z.to_vec();
    out.extend(nu);
    out
}

/// Expands a 3×3 polynomial determinant along the first row.
fn det3<C: Coeff>(m: &[Vec<MultiPoly<C>>]) -> MultiPoly<C> {
    let minor = |a: usize, b: usize, c: usize, d: usize| &(&m[1][a] * &m[2][b]) - &(&m[1][c] * &m[2][d]);
    let t0 = &m[0][0] * &minor(1, 2, 2, 1);
    let t1 = &m[0][1] * &minor(0, 2, 2, 0);
    let t2 = &m[0][2] * &minor(0, 1, 1, 0);
    &(&t0 - &t1) + &t2
}

/// Hessian determinant of a form in three variables.
pub fn hessian_determinant<C: Coeff>(big_f: &MultiPoly<C>) -> MultiPoly<C> {
    let h: Vec<Vec<MultiPoly<C>>> = big_f
        .gradient()
        .iter()
        .map(|g| g.gradient())
        .collect();
    det3(&h)
}

/// Flexes of a plane curve `F = 0`: `{F, det HF, ℓ(x) − 1}` with a random
/// real linear chart `ℓ` drawn from `seed`. Unknowns `x0, x1, x2`.
pub fn flex_system<C: Coeff>(big_f: &MultiPoly<C>, seed: u64) -> Result<PolySystem<C>, SystemsError> {
    if big_f.nvars() != 3 {
        return Err(SystemsError::VariableCount { expected: 3, got: big_f.nvars() });
    }
    if !big_f.is_homogeneous() {
        return Err(SystemsError::NotHomogeneous);
    }
    if big_f.degree() < 3 {
        return Err(SystemsError::DegreeTooLow { got: big_f.degree(), min: 3 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chart = sum(
        3,
        (0..3).map(|i| {
            let c: f64 = rng.sample(StandardNormal);
            // short binary expansions keep exact arithmetic cheap
            let c = (c * 1024.0).round() / 1024.0;
            MultiPoly::var(3, i).scale(&C::from_f64(c))
        }),
    );
    let eqs = vec![
        big_f.clone(),
        hessian_determinant(big_f),
        &chart - &constant(3, 1),
    ];
    let names = ["x0", "x1", "x2"].iter().map(|s| s.to_string()).collect();
    Ok(PolySystem::new(names, eqs).expect("arity is consistent"))
}
