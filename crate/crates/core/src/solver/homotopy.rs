//! Total-degree homotopy tracked in projective space.
//!
//! The target is homogenized with an extra leading coordinate and paths live
//! on a random affine patch `⟨c, Z⟩ = 1`, so solutions at infinity stay at
//! bounded coordinates and are recognized by a vanishing leading coordinate.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::{build_set, same_point};
use super::deflation::Deflator;
use super::eval::{CompiledSystem, EvalScratch};
use super::linalg::{CMat, Lu};
use super::newton::refine_compiled;
use super::{norm_inf, PathStats, SolutionPoint, SolutionSet, SolverError, SolverSettings, Status};
use crate::poly::{CPoly, PolySystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    Euler,
    RungeKutta4,
}

const START_RETRIES: usize = 8;
const RETRACK_ROUNDS: usize = 3;
const ENDGAME_ZONE: f64 = 1e-2;
/// Smallest `t` the endgame tracks to before giving up on polishing.
const FINAL_T: f64 = 1e-14;
/// Relative drop of the leading coordinate between the last two endgame
/// stops beyond which the path is taken to go to infinity.
const SETTLED: f64 = 0.99;
/// Largest relative move accepted from the final Newton polish.
const POLISH_MATCH: f64 = 1e-4;

struct Homotopy {
    target: CompiledSystem,
    degrees: Vec<u32>,
    r: Vec<Complex64>,
    gamma: Complex64,
    patch: Vec<Complex64>,
}

struct Work {
    scratch: EvalScratch,
    fvals: Vec<Complex64>,
    jac: CMat,
    h: Vec<Complex64>,
    ht: Vec<Complex64>,
}

#[derive(Clone, Copy)]
struct TrackParams {
    initial_step: f64,
    max_step: f64,
    min_step: f64,
    endgame_t: f64,
    corrector_tol: f64,
    predictor: Predictor,
}

#[derive(Clone, Debug)]
enum PathEnd {
    /// Endgame reached; projective point, polished at `t = 0` when Newton
    /// on the homogenized target converges.
    Reached(Vec<Complex64>),
    /// The leading coordinate kept shrinking through the last endgame stops.
    Infinite,
    Failed,
}

impl Homotopy {
    fn n(&self) -> usize {
        self.degrees.len()
    }

    fn work(&self) -> Work {
        let n = self.n();
        Work {
            scratch: self.target.scratch(),
            fvals: vec![Complex64::new(0.0, 0.0); n],
            jac: CMat::zeros(n + 1, n + 1),
            h: vec![Complex64::new(0.0, 0.0); n + 1],
            ht: vec![Complex64::new(0.0, 0.0); n + 1],
        }
    }

    /// Fills `w.h`, `w.jac` and `w.ht` at `(z, t)`.
    fn eval(&self, z: &[Complex64], t: f64, w: &mut Work) {
        let n = self.n();
        w.jac.fill_zero();
        self.target.eval_into(
            z,
            Complex64::new(1.0, 0.0),
            &mut w.fvals,
            Some((&mut w.jac, 0)),
            &mut w.scratch,
        );
        let s = 1.0 - t;
        let tg = self.gamma * t;
        for i in 0..n {
            for j in 0..=n {
                let v = w.jac.get(i, j) * s;
                w.jac.set(i, j, v);
            }
            let d = self.degrees[i];
            let df = d as f64;
            let zi = z[i + 1];
            let z0 = z[0];
            let zi_pm = zi.powu(d - 1);
            let z0_pm = z0.powu(d - 1);
            let g = zi_pm * zi - self.r[i] * z0_pm * z0;
            w.jac.add(i, i + 1, tg * df * zi_pm);
            w.jac.add(i, 0, -tg * df * self.r[i] * z0_pm);
            w.h[i] = w.fvals[i] * s + tg * g;
            w.ht[i] = self.gamma * g - w.fvals[i];
        }
        let mut lin = Complex64::new(-1.0, 0.0);
        for j in 0..=n {
            w.jac.set(n, j, self.patch[j]);
            lin += self.patch[j] * z[j];
        }
        w.h[n] = lin;
        w.ht[n] = Complex64::new(0.0, 0.0);
    }

    /// `dz/dt` at `(z, t)`.
    fn tangent(&self, z: &[Complex64], t: f64, w: &mut Work) -> Option<Vec<Complex64>> {
        self.eval(z, t, w);
        let lu = Lu::factor(&w.jac);
        let rhs: Vec<Complex64> = w.ht.iter().map(|v| -v).collect();
        lu.solve(&rhs)
    }

    fn predict(&self, z: &[Complex64], t: f64, h: f64, p: Predictor, w: &mut Work) -> Option<Vec<Complex64>> {
        let axpy = |a: &[Complex64], b: &[Complex64], s: f64| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, y)| x + y * s).collect()
        };
        // moving from t to t - h
        match p {
            Predictor::Euler => {
                let k1 = self.tangent(z, t, w)?;
                Some(axpy(z, &k1, -h))
            }
            Predictor::RungeKutta4 => {
                let k1 = self.tangent(z, t, w)?;
                let k2 = self.tangent(&axpy(z, &k1, -h / 2.0), t - h / 2.0, w)?;
                let k3 = self.tangent(&axpy(z, &k2, -h / 2.0), t - h / 2.0, w)?;
                let k4 = self.tangent(&axpy(z, &k3, -h), t - h, w)?;
                Some(
                    (0..z.len())
                        .map(|i| z[i] - (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
                        .collect(),
                )
            }
        }
    }

    /// Up to three Newton steps at fixed `t`; `Some` when the update falls
    /// below `tol` with the iteration contracting.
    fn correct(&self, z: &[Complex64], t: f64, tol: f64, w: &mut Work) -> Option<Vec<Complex64>> {
        let mut z = z.to_vec();
        let mut prev = f64::INFINITY;
        for _ in 0..3 {
            self.eval(&z, t, w);
            let lu = Lu::factor(&w.jac);
            let rhs: Vec<Complex64> = w.h.iter().map(|v| -v).collect();
            let dz = lu.solve(&rhs)?;
            let dn = norm_inf(&dz);
            for (a, b) in z.iter_mut().zip(&dz) {
                *a += b;
            }
            let zn = norm_inf(&z);
            if dn <= tol * (1.0 + zn) {
                return Some(z);
            }
            if dn > 0.5 * prev {
                return None;
            }
            prev = dn;
        }
        None
    }

    fn track(&self, start: Vec<Complex64>, p: &TrackParams, w: &mut Work) -> PathEnd {
        let mut z = start;
        let mut t = 1.0;
        let mut dt = p.initial_step;
        let mut streak = 0;
        let mut stop = p.endgame_t;
        let mut prev_ratio: Option<f64> = None;
        loop {
            let stalled = loop {
                if t <= stop {
                    break false;
                }
                let h = dt.min(t - stop);
                let t1 = t - h;
                let stepped = self
                    .predict(&z, t, h, p.predictor, w)
                    .and_then(|zp| self.correct(&zp, t1, p.corrector_tol, w));
                match stepped {
                    Some(zn) => {
                        z = zn;
                        t = t1;
                        streak += 1;
                        if streak >= 5 {
                            dt = (dt * 2.0).min(p.max_step);
                            streak = 0;
                        }
                        // near the end the admissible step is proportional to t
                        dt = dt.min(t);
                    }
                    None => {
                        dt *= 0.5;
                        streak = 0;
                        if dt < p.min_step * t.min(1.0).max(1e-3) {
                            // close to the target, hand the point to the endgame
                            // (singular and infinite endpoints stall the corrector)
                            if t < ENDGAME_ZONE {
                                break true;
                            }
                            return PathEnd::Failed;
                        }
                    }
                }
                if norm_inf(&z) > 1e8 {
                    return PathEnd::Failed;
                }
            };
            if let Some(zz) = self.polish(&z, w) {
                return PathEnd::Reached(zz);
            }
            // fast-moving paths are still far from their endpoint: keep
            // tracking through smaller t before trusting Newton at t = 0
            let ratio = z[0].norm() / norm_inf(&z);
            if stalled || stop <= FINAL_T {
                // a finite endpoint has a settled leading coordinate by now
                if let Some(prev) = prev_ratio {
                    if ratio < SETTLED * prev {
                        return PathEnd::Infinite;
                    }
                }
                return PathEnd::Reached(z);
            }
            prev_ratio = Some(ratio);
            stop *= 1e-2;
        }
    }

    /// Projective Newton on the target itself; `Some` when it converges
    /// quadratically to a point close to `z`.
    fn polish(&self, z: &[Complex64], w: &mut Work) -> Option<Vec<Complex64>> {
        let mut zz = z.to_vec();
        let mut prev = f64::INFINITY;
        for _ in 0..12 {
            self.eval(&zz, 0.0, w);
            let lu = Lu::factor(&w.jac);
            let rhs: Vec<Complex64> = w.h.iter().map(|v| -v).collect();
            let dz = lu.solve(&rhs)?;
            let dn = norm_inf(&dz);
            if dn > 0.9 * prev && dn > 1e-12 {
                return None;
            }
            for (a, b) in zz.iter_mut().zip(&dz) {
                *a += b;
            }
            prev = dn;
            let zn = norm_inf(&zz);
            if dn <= 1e-13 * (1.0 + zn) {
                let moved = zz.iter().zip(z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                return (zn <= 1e8 && moved <= POLISH_MATCH * (1.0 + zn)).then_some(zz);
            }
        }
        None
    }
}

struct PathOutcome {
    point: Option<SolutionPoint>,
    failed: bool,
    at_infinity: bool,
}

fn start_point(h: &Homotopy, index: u64) -> Vec<Complex64> {
    let n = h.n();
    let mut z = Vec::with_capacity(n + 1);
    z.push(Complex64::new(1.0, 0.0));
    let mut rem = index;
    for i in 0..n {
        let d = h.degrees[i] as u64;
        let k = rem % d;
        rem /= d;
        let root = h.r[i].powf(1.0 / d as f64);
        let phase = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64);
        z.push(root * phase);
    }
    let s: Complex64 = z.iter().zip(&h.patch).map(|(a, b)| a * b).sum();
    z.iter().map(|v| v / s).collect()
}

/// Endpoints whose affine refinement lands farther than this (relative, on
/// the tracking patch) from the tracked point are treated as not converged:
/// slowly escaping paths must not be pulled onto unrelated finite roots.
const ENDPOINT_MATCH: f64 = 1e-2;

fn finish(
    h: &Homotopy,
    affine: &CompiledSystem,
    end: PathEnd,
    newton_max_iter: usize,
) -> PathOutcome {
    let escaped = PathOutcome { point: None, failed: false, at_infinity: true };
    match end {
        PathEnd::Failed => PathOutcome { point: None, failed: true, at_infinity: false },
        PathEnd::Infinite => escaped,
        PathEnd::Reached(z) => {
            let zn = norm_inf(&z);
            if z[0].norm() <= 1e-8 * zn {
                return escaped;
            }
            let x: Vec<Complex64> = z[1..].iter().map(|v| v / z[0]).collect();
            let p = refine_compiled(affine, &x, newton_max_iter, 1e-14);
            if p.status == Status::Diverged {
                return escaped;
            }
            let mut back = Vec::with_capacity(z.len());
            back.push(Complex64::new(1.0, 0.0));
            back.extend_from_slice(&p.coords);
            let s: Complex64 = back.iter().zip(&h.patch).map(|(a, b)| a * b).sum();
            let dist = back.iter().zip(&z).map(|(a, b)| (a / s - b).norm()).fold(0.0, f64::max);
            if dist > ENDPOINT_MATCH * zn.max(1.0) {
                return escaped;
            }
            PathOutcome { point: Some(p), failed: false, at_infinity: false }
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    let theta: f64 = rng.gen_range(0.0..2.0 * PI);
    Complex64::from_polar(1.0, theta)
}

fn random_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Tracks all Bézout-many paths of the total-degree homotopy to `system`.
pub fn total_degree_homotopy(
    system: &PolySystem<Complex64>,
    settings: &SolverSettings,
) -> Result<SolutionSet, SolverError> {
    if !system.is_square() {
        return Err(SolverError::NotSquare { eqs: system.len(), vars: system.nvars() });
    }
    let bezout = system.bezout();
    let bezout_u64 = bezout.to_u64().filter(|&b| b <= settings.budget).ok_or_else(|| {
        SolverError::BudgetExceeded { bezout: bezout.to_string(), budget: settings.budget }
    })?;
    let degrees = system.degrees();
    if let Some(i) = degrees.iter().position(|&d| d == 0) {
        return Err(SolverError::ConstantEquation(i));
    }
    let n = system.nvars();
    let homog: Vec<CPoly> = system
        .eqs()
        .iter()
        .map(|e| e.homogenize().expect("equation is nonzero"))
        .collect();
    let target = CompiledSystem::new(n + 1, &homog);
    let affine = CompiledSystem::from_system(system);

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut gamma = random_unit(&mut rng);
    let mut r: Vec<Complex64> = (0..n).map(|_| random_unit(&mut rng)).collect();
    // avoid nearly real gamma and coincident start constants
    for _ in 0..START_RETRIES {
        let degenerate = gamma.im.abs() < 1e-3 || gamma.re.abs() < 1e-3;
        if !degenerate {
            break;
        }
        gamma = random_unit(&mut rng);
        r = (0..n).map(|_| random_unit(&mut rng)).collect();
    }
    let patch: Vec<Complex64> = (0..=n).map(|_| random_gaussian(&mut rng)).collect();
    let hom = Homotopy { target, degrees, r, gamma, patch };

    let base = TrackParams {
        initial_step: settings.initial_step,
        max_step: settings.max_step,
        min_step: settings.min_step,
        endgame_t: settings.endgame_t,
        corrector_tol: 1e-9,
        predictor: settings.predictor,
    };

    let done = AtomicUsize::new(0);
    let total = bezout_u64 as usize;
    let run = |indices: &[u64], params: TrackParams| -> Vec<PathOutcome> {
        indices
            .par_iter()
            .map_init(
                || hom.work(),
                |w, &idx| {
                    let end = hom.track(start_point(&hom, idx), &params, w);
                    let out = finish(&hom, &affine, end, settings.newton_max_iter);
                    if settings.progress {
                        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                        if k % 500 == 0 || k == total {
                            eprintln!("tracked {k}/{total} paths");
                        }
                    }
                    out
                },
            )
            .collect()
    };
    let execute = || -> (Vec<PathOutcome>, u64) {
        let all: Vec<u64> = (0..bezout_u64).collect();
        let mut outcomes = run(&all, base);
        let mut retracked = 0u64;
        for round in 0..RETRACK_ROUNDS {
            let suspects = suspicious_paths(&outcomes, settings.dedupe_tol);
            if suspects.is_empty() {
                break;
            }
            let factor = 4f64.powi(round as i32 + 1);
            let tight = TrackParams {
                initial_step: base.initial_step / factor,
                max_step: base.max_step / factor,
                corrector_tol: base.corrector_tol / factor,
                predictor: Predictor::RungeKutta4,
                ..base
            };
            retracked += suspects.len() as u64;
            let redo = run(&suspects, tight);
            for (idx, out) in suspects.into_iter().zip(redo) {
                outcomes[idx as usize] = out;
            }
        }
        (outcomes, retracked)
    };
    let (outcomes, retracked) = match settings.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map(|pool| pool.install(execute))
            .unwrap_or_else(|_| execute()),
        None => execute(),
    };

    let mut stats = PathStats { paths: bezout_u64, retracked, ..Default::default() };
    let mut deflator = Deflator::new(system, settings.seed);
    let maxdeg = system.degrees().into_iter().max().unwrap_or(1) as i32;
    let mut points = Vec::new();
    for o in outcomes {
        if o.failed {
            stats.failed += 1;
        } else if o.at_infinity {
            stats.diverged += 1;
        }
        if let Some(mut p) = o.point {
            if p.status == Status::SingularSuspect {
                sharpen_singular(&mut deflator, &mut p, maxdeg);
            }
            match p.status {
                Status::FiniteNonsingular => stats.finite_nonsingular += 1,
                Status::SingularSuspect => stats.singular += 1,
                Status::Diverged => stats.diverged += 1,
            }
            points.push(p);
        }
    }
    let mut set = build_set(
        system.vars().to_vec(),
        points,
        (0..n).collect(),
        settings.real_tol,
        settings.dedupe_tol,
    );
    set.seed = settings.seed;
    set.gamma = gamma;
    set.bezout = bezout_u64;
    set.stats = stats;
    Ok(set)
}

/// Replaces a singular endpoint by its deflated refinement when the root
/// turns out isolated.
fn sharpen_singular(deflator: &mut Deflator, p: &mut SolutionPoint, maxdeg: i32) {
    if let Some(d) = deflator.deflate(&p.coords) {
        let zn = norm_inf(&d.coords);
        p.coords = d.coords;
        p.residual = d.residual;
        p.scaled_residual = d.residual / (1.0 + zn.powi(maxdeg));
        p.condition_estimate = d.condition;
        p.deflation_corank = Some(d.corank);
    }
}

/// Paths whose nonsingular endpoints coincide with another path's (a
/// nonsingular root is reached by exactly one path, so one of them jumped),
/// plus failed paths.
fn suspicious_paths(outcomes: &[PathOutcome], dedupe_tol: f64) -> Vec<u64> {
    let mut ids: Vec<(usize, &SolutionPoint)> = outcomes
        .iter()
        .enumerate()
        .filter_map(|(i, o)| o.point.as_ref().filter(|p| p.is_nonsingular()).map(|p| (i, p)))
        .collect();
    ids.sort_by(|a, b| a.1.coords[0].re.total_cmp(&b.1.coords[0].re));
    let mut flagged = vec![false; outcomes.len()];
    for a in 0..ids.len() {
        for b in a + 1..ids.len() {
            let (ia, pa) = ids[a];
            let (ib, pb) = ids[b];
            let scale = 1.0 + norm_inf(&pa.coords).max(norm_inf(&pb.coords));
            if pb.coords[0].re - pa.coords[0].re > dedupe_tol * scale {
                break;
            }
            if same_point(&pa.coords, &pb.coords, dedupe_tol) {
                flagged[ia] = true;
                flagged[ib] = true;
            }
        }
    }
    for (i, o) in outcomes.iter().enumerate() {
        if o.failed {
            flagged[i] = true;
        }
    }
    flagged
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .map(|(i, _)| i as u64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn sys(eqs: &[&str], vars: &[&str]) -> PolySystem<Complex64> {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let eqs: Vec<CPoly> = eqs.iter().map(|e| parse_poly(e, &vars).unwrap()).collect();
        PolySystem::new(vars, eqs).unwrap()
    }

    #[test]
    fn two_quadrics_decoupled() {
        let s = sys(&["x^2 - 1", "y^2 - 4"], &["x", "y"]);
        let set = total_degree_homotopy(&s, &SolverSettings::with_seed(3)).unwrap();
        assert_eq!(set.complex_count, 4);
        assert_eq!(set.real_count, 4);
    }

    #[test]
    fn solutions_at_infinity_are_dropped() {
        // a line and a parabola: 2 of the Bezout 2 are finite; x*y - 1 and x - 1 has one finite root
        let s = sys(&["x*y - 1", "x - y"], &["x", "y"]);
        let set = total_degree_homotopy(&s, &SolverSettings::with_seed(1)).unwrap();
        assert_eq!(set.complex_count, 2);
        let s = sys(&["x*y - 1", "x - 2"], &["x", "y"]);
        let set = total_degree_homotopy(&s, &SolverSettings::with_seed(1)).unwrap();
        assert_eq!(set.complex_count, 1);
        assert_eq!(set.stats.diverged + set.stats.failed, 1);
    }

    #[test]
    fn budget_enforced() {
        let s = sys(&["x^3 - 1", "y^3 - 1"], &["x", "y"]);
        let settings = SolverSettings { budget: 8, ..SolverSettings::with_seed(0) };
        assert!(matches!(
            total_degree_homotopy(&s, &settings),
            Err(SolverError::BudgetExceeded { .. })
        ));
    }
}
