use num_complex::Complex64;

use super::eval::CompiledSystem;
use super::linalg::Lu;
use super::{norm_inf, SolutionPoint, SolverError, Status};
use crate::poly::PolySystem;

const DIVERGE_NORM: f64 = 1e8;
const RESIDUAL_OK: f64 = 1e-10;
const RESIDUAL_LOOSE: f64 = 1e-6;
const COND_MAX: f64 = 1e10;

/// Damped Newton from `start`. Never fails on divergence; the returned
/// point carries a [`Status`] instead.
pub fn newton_refine(
    system: &PolySystem<Complex64>,
    start: &[Complex64],
    max_iter: usize,
    tol: f64,
) -> Result<SolutionPoint, SolverError> {
    if !system.is_square() {
        return Err(SolverError::NotSquare { eqs: system.len(), vars: system.nvars() });
    }
    if start.len() != system.nvars() {
        return Err(SolverError::StartLength { expected: system.nvars(), got: start.len() });
    }
    let compiled = CompiledSystem::from_system(system);
    Ok(refine_compiled(&compiled, start, max_iter, tol))
}

fn residual_of(vals: &[Complex64]) -> f64 {
    vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn refine_compiled(
    sys: &CompiledSystem,
    start: &[Complex64],
    max_iter: usize,
    tol: f64,
) -> SolutionPoint {
    let maxdeg = sys.degrees().iter().copied().max().unwrap_or(0) as i32;
    let mut z = start.to_vec();
    let mut steps: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut blown = false;
    for _ in 0..max_iter {
        let (vals, jac) = sys.eval_with_jacobian(&z);
        let r0 = residual_of(&vals);
        if !r0.is_finite() {
            blown = true;
            break;
        }
        let lu = Lu::factor(&jac);
        let rhs: Vec<Complex64> = vals.iter().map(|v| -v).collect();
        let Some(dz) = lu.solve(&rhs) else { break };
        let dn = norm_inf(&dz);
        let zn = norm_inf(&z);
        let small = dn <= 1e-6 * (1.0 + zn);
        let mut alpha = 1.0;
        let mut next: Vec<Complex64>;
        loop {
            next = z.iter().zip(&dz).map(|(a, b)| a + b * alpha).collect();
            if small || alpha < 1.0 / 256.0 {
                break;
            }
            let r1 = residual_of(&sys.eval(&next));
            if r1 <= r0 {
                break;
            }
            alpha *= 0.5;
        }
        z = next;
        steps.push(dn * alpha);
        if norm_inf(&z) > DIVERGE_NORM || z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            blown = true;
            break;
        }
        if dn <= tol * (1.0 + norm_inf(&z)) {
            converged = true;
            break;
        }
    }

    let zn = norm_inf(&z);
    let (vals, jac) = sys.eval_with_jacobian(&z);
    let residual = residual_of(&vals);
    let scaled_residual = residual / (1.0 + zn.powi(maxdeg));
    let lu = Lu::factor(&jac);
    let condition_estimate = lu.condition(&jac);
    let newton_contraction = contraction(&steps, zn);
    let last_step = steps.last().copied().unwrap_or(0.0);
    let tight = last_step <= 1e-10 * (1.0 + zn);

    let status = if blown || !residual.is_finite() || zn > DIVERGE_NORM || scaled_residual > RESIDUAL_LOOSE {
        Status::Diverged
    } else if scaled_residual < RESIDUAL_OK
        && (converged || tight)
        && newton_contraction < 0.5
        && condition_estimate < COND_MAX
    {
        Status::FiniteNonsingular
    } else {
        Status::SingularSuspect
    };
    SolutionPoint {
        coords: z,
        residual,
        scaled_residual,
        newton_contraction,
        condition_estimate,
        status,
        deflation_corank: None,
    }
}

/// Largest ratio of consecutive step norms over the last two pairs whose
/// leading step is above the rounding floor; 0 if no such pair exists.
fn contraction(steps: &[f64], zn: f64) -> f64 {
    let floor = 1e-12 * (1.0 + zn);
    let ratios: Vec<f64> = steps
        .windows(2)
        .filter(|w| w[0] > floor)
        .map(|w| w[1] / w[0])
        .collect();
    ratios.iter().rev().take(2).copied().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, CPoly};

    fn sys(eqs: &[&str], vars: &[&str]) -> PolySystem<Complex64> {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let eqs: Vec<CPoly> = eqs.iter().map(|e| parse_poly(e, &vars).unwrap()).collect();
        PolySystem::new(vars, eqs).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn converges_to_simple_root() {
        let s = sys(&["x^2 - 1", "y^2 - 4"], &["x", "y"]);
        let p = newton_refine(&s, &[c(1.1), c(2.1)], 50, 1e-14).unwrap();
        assert_eq!(p.status, Status::FiniteNonsingular);
        assert!(p.residual < 1e-14);
        assert!((p.coords[0] - c(1.0)).norm() < 1e-14);
        assert!((p.coords[1] - c(2.0)).norm() < 1e-14);
    }

    #[test]
    fn far_start_with_few_iterations_diverges() {
        let s = sys(&["x^2 - 1", "y^2 - 4"], &["x", "y"]);
        let p = newton_refine(&s, &[c(1e5), c(-3e5)], 3, 1e-14).unwrap();
        assert_eq!(p.status, Status::Diverged);
    }

    #[test]
    fn double_root_is_flagged() {
        let s = sys(&["x^2", "y - 1"], &["x", "y"]);
        let p = newton_refine(&s, &[c(0.3), c(1.2)], 80, 1e-14).unwrap();
        assert_eq!(p.status, Status::SingularSuspect);
    }

    #[test]
    fn rejects_non_square() {
        let s = sys(&["x^2 - 1"], &["x", "y"]);
        assert!(matches!(
            newton_refine(&s, &[c(1.0), c(1.0)], 10, 1e-12),
            Err(SolverError::NotSquare { .. })
        ));
    }
}
