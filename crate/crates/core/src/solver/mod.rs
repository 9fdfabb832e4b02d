//! Numerical enumeration of the isolated complex solutions of square
//! polynomial systems by total-degree homotopy continuation.

mod classify;
mod deflation;
mod eval;
mod homotopy;
pub mod linalg;
mod newton;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use classify::{classify_and_project, dedupe_points, quotient_by_symmetry, same_point};
pub use deflation::{Deflated, Deflator};
pub use eval::{CompiledSystem, EvalScratch};
pub use homotopy::{total_degree_homotopy, Predictor};
pub use newton::{newton_refine, refine_compiled};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("system is not square: {eqs} equations in {vars} unknowns")]
    NotSquare { eqs: usize, vars: usize },
    #[error("Bezout number {bezout} exceeds the path budget {budget}")]
    BudgetExceeded { bezout: String, budget: u64 },
    #[error("equation {0} is constant; no start system exists")]
    ConstantEquation(usize),
    #[error("start vector has length {got}, system has {expected} unknowns")]
    StartLength { expected: usize, got: usize },
    #[error("symmetry action '{name}' does not map solutions to solutions (residual {residual:e})")]
    ActionFailed { name: String, residual: f64 },
    #[error("symmetry action '{0}' has the wrong length")]
    ActionLength(String),
    #[error("projection block index {0} out of range")]
    BlockIndex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    FiniteNonsingular,
    SingularSuspect,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPoint {
    pub coords: Vec<Complex64>,
    /// Max modulus of the equations at `coords`.
    pub residual: f64,
    /// `residual / (1 + ‖coords‖∞^maxdeg)`.
    pub scaled_residual: f64,
    pub newton_contraction: f64,
    pub condition_estimate: f64,
    pub status: Status,
    /// Jacobian corank at a singular point confirmed isolated by deflation.
    #[serde(default)]
    pub deflation_corank: Option<usize>,
}

impl SolutionPoint {
    pub fn is_nonsingular(&self) -> bool {
        self.status == Status::FiniteNonsingular
    }

    /// Nonsingular, or singular but confirmed isolated.
    pub fn is_isolated(&self) -> bool {
        self.is_nonsingular() || (self.status == Status::SingularSuspect && self.deflation_corank.is_some())
    }

    pub fn max_imag(&self) -> f64 {
        self.coords.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }
}

/// A distinct point of the projection of the solution set onto a block of variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub coords: Vec<Complex64>,
    pub real: bool,
    /// Number of solution points lying over this projection.
    pub fiber: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStats {
    pub paths: u64,
    pub finite_nonsingular: u64,
    pub singular: u64,
    pub diverged: u64,
    pub failed: u64,
    pub retracked: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub vars: Vec<String>,
    /// Deduplicated finite endpoints, nonsingular and singular alike.
    pub points: Vec<SolutionPoint>,
    /// Variable indices of the projection block.
    pub block: Vec<usize>,
    /// Distinct projections of the isolated finite points.
    pub x_projections: Vec<Projection>,
    pub complex_count: usize,
    pub real_count: usize,
    /// Distinct singular endpoints not confirmed isolated (not counted above).
    pub singular_count: usize,
    /// Distinct singular points confirmed isolated by deflation (counted above).
    #[serde(default)]
    pub isolated_singular_count: usize,
    pub nonisolated_suspected: bool,
    /// Orbit sizes after a symmetry quotient; empty otherwise.
    #[serde(default)]
    pub orbit_sizes: Vec<usize>,
    pub seed: u64,
    pub gamma: Complex64,
    pub bezout: u64,
    pub stats: PathStats,
    pub real_tol: f64,
    pub dedupe_tol: f64,
    pub diagnostics: Vec<String>,
}

impl SolutionSet {
    pub fn nonsingular_points(&self) -> impl Iterator<Item = &SolutionPoint> {
        self.points.iter().filter(|p| p.is_nonsingular())
    }

    pub fn real_projections(&self) -> impl Iterator<Item = &Projection> {
        self.x_projections.iter().filter(|p| p.real)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub seed: u64,
    pub budget: u64,
    /// Worker count; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    pub real_tol: f64,
    pub dedupe_tol: f64,
    pub predictor: Predictor,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub endgame_t: f64,
    pub newton_max_iter: usize,
    pub progress: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            seed: 0,
            budget: 50_000,
            threads: None,
            real_tol: 1e-8,
            dedupe_tol: 1e-6,
            predictor: Predictor::Euler,
            initial_step: 0.02,
            max_step: 0.05,
            min_step: 1e-14,
            endgame_t: 1e-6,
            newton_max_iter: 50,
            progress: false,
        }
    }
}

impl SolverSettings {
    pub fn with_seed(seed: u64) -> Self {
        SolverSettings { seed, ..Default::default() }
    }
}

pub(crate) fn norm_inf(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
