//! Pointwise differential geometry of an implicit hypersurface `{f = 0}`.
//!
//! Curvatures are signed relative to the unit normal `∇f/‖∇f‖`: the normal
//! curvature in a unit tangent direction `v` is `-vᵀ Hf v / ‖∇f‖`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::poly::{Coeff, MultiPoly, PolyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is not on the surface: |f(p)| = {value:e} exceeds {bound:e}")]
    NotOnSurface { value: f64, bound: f64 },
    #[error("singular point: gradient norm {0:e}")]
    SingularPoint(f64),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("degree {0} is too low")]
    DegreeTooLow(u32),
}

impl From<PolyError> for GeometryError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::DimensionMismatch { expected, got } => {
                GeometryError::DimensionMismatch { expected, got }
            }
            _ => GeometryError::NotHomogeneous,
        }
    }
}

pub const DEFAULT_SURFACE_TOL: f64 = 1e-8;
const SINGULAR_GRADIENT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureData {
    pub point: Vec<f64>,
    pub gradient: Vec<f64>,
    /// Squared gradient norm.
    pub eta: f64,
    pub tangent_frame: Vec<Vec<f64>>,
    pub shape_matrix: Vec<Vec<f64>>,
    /// Ascending.
    pub principal_curvatures: Vec<f64>,
}

fn check_dim<C: Coeff>(f: &MultiPoly<C>, p: &[f64]) -> Result<(), GeometryError> {
    if f.nvars() != p.len() {
        return Err(GeometryError::DimensionMismatch { expected: f.nvars(), got: p.len() });
    }
    Ok(())
}

pub fn gradient<C: Coeff>(f: &MultiPoly<C>, p: &[f64]) -> Result<Vec<f64>, GeometryError> {
    check_dim(f, p)?;
    (0..f.nvars())
        .map(|i| f.diff(i).eval_real(p).map_err(Into::into))
        .collect()
}

/// Matrix of second partials; the lower triangle is a mirror of the upper.
pub fn hessian<C: Coeff>(f: &MultiPoly<C>, p: &[f64]) -> Result<Vec<Vec<f64>>, GeometryError> {
    check_dim(f, p)?;
    let n = f.nvars();
    let mut h = vec![vec![0.0; n]; n];
    for i in 0..n {
        let fi = f.diff(i);
        for j in i..n {
            let v = fi.diff(j).eval_real(p)?;
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    Ok(h)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal basis of the hyperplane orthogonal to `normal`.
///
/// Completes `normal/‖normal‖` with the standard basis vectors, dropping the
/// one most aligned with the normal (lowest index on ties), and runs
/// Gram–Schmidt twice for stability.
pub fn tangent_frame(normal: &[f64]) -> Vec<Vec<f64>> {
    let n = normal.len();
    let len = norm(normal);
    let unit: Vec<f64> = normal.iter().map(|x| x / len).collect();
    let mut drop = 0;
    for k in 1..n {
        if unit[k].abs() > unit[drop].abs() {
            drop = k;
        }
    }
    let mut basis: Vec<Vec<f64>> = vec![unit];
    for k in (0..n).filter(|&k| k != drop) {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let l = norm(&v);
        v.iter_mut().for_each(|x| *x /= l);
        basis.push(v);
    }
    basis.remove(0);
    basis
}

/// `B_ij = -v_iᵀ H v_j / ‖∇f‖` for the given tangent frame.
pub fn shape_matrix(hess: &[Vec<f64>], frame: &[Vec<f64>], grad_norm: f64) -> Vec<Vec<f64>> {
    let m = frame.len();
    let hv: Vec<Vec<f64>> = frame
        .iter()
        .map(|v| hess.iter().map(|row| dot(row, v)).collect())
        .collect();
    let mut b = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = -dot(&frame[i], &hv[j]) / grad_norm;
            b[i][j] = v;
            b[j][i] = v;
        }
    }
    b
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    if n == 0 {
        return Vec::new();
    }
    let mat = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let mut ev: Vec<f64> = SymmetricEigen::new(mat).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn curvature_data<C: Coeff>(
    f: &MultiPoly<C>,
    p: &[f64],
    tol: f64,
) -> Result<CurvatureData, GeometryError> {
    check_dim(f, p)?;
    let value = f.eval_real(p)?;
    let bound = tol * (1.0 + norm(p).powi(f.degree() as i32));
    if !(value.abs() < bound) {
        return Err(GeometryError::NotOnSurface { value: value.abs(), bound });
    }
    let grad = gradient(f, p)?;
    let eta = dot(&grad, &grad);
    let gn = eta.sqrt();
    if !(gn > SINGULAR_GRADIENT * (1.0 + norm(p))) {
        return Err(GeometryError::SingularPoint(gn));
    }
    let hess = hessian(f, p)?;
    let frame = tangent_frame(&grad);
    let shape = shape_matrix(&hess, &frame, gn);
    let principal_curvatures = symmetric_eigenvalues(&shape);
    Ok(CurvatureData {
        point: p.to_vec(),
        gradient: grad,
        eta,
        tangent_frame: frame,
        shape_matrix: shape,
        principal_curvatures,
    })
}

/// Normal curvature `-vᵀ Hf(p) v / ‖∇f(p)‖` of a unit tangent direction.
pub fn normal_curvature<C: Coeff>(
    f: &MultiPoly<C>,
    p: &[f64],
    v: &[f64],
) -> Result<f64, GeometryError> {
    let grad = gradient(f, p)?;
    let hess = hessian(f, p)?;
    let hv: Vec<f64> = hess.iter().map(|row| dot(row, v)).collect();
    Ok(-dot(v, &hv) / norm(&grad))
}

/// The quadratic form `x ↦ xᵀ HF(p) x` of a homogeneous `F`, exact in the
/// coefficient domain.
pub fn projective_hessian_quadric<C: Coeff>(
    big_f: &MultiPoly<C>,
    p: &[C],
) -> Result<MultiPoly<C>, GeometryError> {
    if !big_f.is_homogeneous() {
        return Err(GeometryError::NotHomogeneous);
    }
    if big_f.degree() < 2 {
        return Err(GeometryError::DegreeTooLow(big_f.degree()));
    }
    let n = big_f.nvars();
    if p.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, got: p.len() });
    }
    let mut terms = Vec::new();
    for i in 0..n {
        let fi = big_f.diff(i);
        for j in i..n {
            let h = fi.diff(j).eval(p)?;
            if h.is_zero() {
                continue;
            }
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            let c = if i == j { h } else { h.clone() + h };
            terms.push((e, c));
        }
    }
    Ok(MultiPoly::from_terms(n, terms))
}
