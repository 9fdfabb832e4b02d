use std::cmp::Ordering;

use num_complex::Complex64;

use super::{norm_inf, PathStats, Projection, SolutionPoint, SolutionSet, SolverError, Status};
use crate::poly::{PolySystem, SignAction};

const ACTION_RESIDUAL: f64 = 1e-8;
/// Imaginary parts within this factor above `real_tol` are reported as borderline.
const NEAR_REAL_BAND: f64 = 1e3;

/// Relative ∞-norm closeness.
pub fn same_point(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let scale = 1.0 + norm_inf(a).max(norm_inf(b));
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * scale)
}

fn quantize(v: f64) -> i64 {
    (v * 1e7).round() as i64
}

/// Canonical order: lexicographic on coordinates rounded to 1e-7, exact values as tie-break.
fn canonical_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    let ka = a.iter().flat_map(|c| [quantize(c.re), quantize(c.im)]);
    let kb = b.iter().flat_map(|c| [quantize(c.re), quantize(c.im)]);
    ka.cmp(kb).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

fn is_real(z: &[Complex64], tol: f64) -> bool {
    let scale = 1.0 + norm_inf(z);
    z.iter().all(|c| c.im.abs() < tol * scale)
}

fn max_rel_imag(z: &[Complex64]) -> f64 {
    let scale = 1.0 + norm_inf(z);
    z.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / scale
}

fn status_rank(p: &SolutionPoint) -> u8 {
    match p.status {
        Status::FiniteNonsingular => 0,
        Status::SingularSuspect if p.deflation_corank.is_some() => 1,
        Status::SingularSuspect => 2,
        Status::Diverged => 3,
    }
}

/// Drops diverged points and merges coincident ones, keeping the best status
/// (then the smaller residual). Output is in canonical order.
pub fn dedupe_points(points: Vec<SolutionPoint>, tol: f64) -> Vec<SolutionPoint> {
    let mut pts: Vec<SolutionPoint> =
        points.into_iter().filter(|p| p.status != Status::Diverged).collect();
    pts.sort_by(|a, b| {
        status_rank(a)
            .cmp(&status_rank(b))
            .then(a.residual.total_cmp(&b.residual))
            .then_with(|| canonical_cmp(&a.coords, &b.coords))
    });
    let mut kept: Vec<SolutionPoint> = Vec::new();
    for p in pts {
        if !kept.iter().any(|k| same_point(&k.coords, &p.coords, tol)) {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| canonical_cmp(&a.coords, &b.coords));
    kept
}

pub(crate) fn build_set(
    vars: Vec<String>,
    points: Vec<SolutionPoint>,
    block: Vec<usize>,
    real_tol: f64,
    dedupe_tol: f64,
) -> SolutionSet {
    let points = dedupe_points(points, dedupe_tol);
    let mut set = SolutionSet {
        vars,
        points,
        block,
        x_projections: Vec::new(),
        complex_count: 0,
        real_count: 0,
        singular_count: 0,
        isolated_singular_count: 0,
        nonisolated_suspected: false,
        orbit_sizes: Vec::new(),
        seed: 0,
        gamma: Complex64::new(1.0, 0.0),
        bezout: 0,
        stats: PathStats::default(),
        real_tol,
        dedupe_tol,
        diagnostics: Vec::new(),
    };
    project(&mut set);
    set
}

fn project(set: &mut SolutionSet) {
    let mut projections: Vec<Projection> = Vec::new();
    let mut diagnostics = Vec::new();
    for p in set.points.iter().filter(|p| p.is_isolated()) {
        let coords: Vec<Complex64> = set.block.iter().map(|&i| p.coords[i]).collect();
        match projections.iter_mut().find(|q| same_point(&q.coords, &coords, set.dedupe_tol)) {
            Some(q) => q.fiber += 1,
            None => {
                let real = is_real(&coords, set.real_tol);
                projections.push(Projection { coords, real, fiber: 1 });
            }
        }
    }
    projections.sort_by(|a, b| canonical_cmp(&a.coords, &b.coords));
    for (k, q) in projections.iter().enumerate() {
        let im = max_rel_imag(&q.coords);
        if !q.real && im < NEAR_REAL_BAND * set.real_tol {
            diagnostics.push(format!(
                "projection {k} has relative imaginary part {im:.3e}, just above the reality tolerance; counted as non-real"
            ));
        }
    }
    let singular = set
        .points
        .iter()
        .filter(|p| p.status == Status::SingularSuspect && p.deflation_corank.is_none())
        .count();
    let isolated = set.points.iter().filter(|p| p.deflation_corank.is_some()).count();
    set.singular_count = singular;
    set.isolated_singular_count = isolated;
    if isolated > 0 {
        diagnostics.push(format!(
            "{isolated} isolated singular solutions confirmed by deflation (included in the projections)"
        ));
    }
    set.nonisolated_suspected = singular >= 2;
    if singular >= 2 {
        diagnostics.push(format!(
            "{singular} distinct singular endpoints: non-isolated solutions suspected"
        ));
    } else if singular == 1 {
        diagnostics.push("one singular endpoint suspected".to_string());
    }
    set.complex_count = projections.len();
    set.real_count = projections.iter().filter(|q| q.real).count();
    set.x_projections = projections;
    set.diagnostics.retain(|d| !d.starts_with("projection ") && !d.contains("singular endpoint") && !d.contains("by deflation"));
    set.diagnostics.extend(diagnostics);
}

/// Re-derives reality flags and projections onto `block` from the stored points.
pub fn classify_and_project(
    set: &SolutionSet,
    block: &[usize],
    real_tol: f64,
    dedupe_tol: f64,
) -> Result<SolutionSet, SolverError> {
    let nvars = set.vars.len();
    if let Some(&bad) = block.iter().find(|&&i| i >= nvars) {
        return Err(SolverError::BlockIndex(bad));
    }
    let mut out = set.clone();
    out.block = block.to_vec();
    out.real_tol = real_tol;
    out.dedupe_tol = dedupe_tol;
    if dedupe_tol != set.dedupe_tol {
        out.points = dedupe_points(out.points, dedupe_tol);
    }
    project(&mut out);
    Ok(out)
}

fn group_closure(actions: &[SignAction], n: usize) -> Vec<SignAction> {
    let mut group = vec![SignAction::identity(n)];
    let mut frontier = group.clone();
    while let Some(g) = frontier.pop() {
        for a in actions {
            let h = g.compose(a);
            if !group.iter().any(|k| k.signs == h.signs) {
                group.push(h.clone());
                frontier.push(h);
            }
        }
    }
    group
}

/// One representative per orbit of the group generated by `actions`.
pub fn quotient_by_symmetry(
    set: &SolutionSet,
    system: &PolySystem<Complex64>,
    actions: &[SignAction],
) -> Result<SolutionSet, SolverError> {
    let n = set.vars.len();
    for a in actions {
        if a.signs.len() != n {
            return Err(SolverError::ActionLength(a.name.clone()));
        }
        for p in set.nonsingular_points() {
            let img = a.apply(&p.coords);
            let r = system.scaled_residual(&img);
            if !(r < ACTION_RESIDUAL) {
                return Err(SolverError::ActionFailed { name: a.name.clone(), residual: r });
            }
        }
    }
    let group = group_closure(actions, n);
    let pts = &set.points;
    let mut orbit_of = vec![usize::MAX; pts.len()];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    for i in 0..pts.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        orbit_of[i] = reps.len();
        let mut size = 1;
        for g in &group {
            let img = g.apply(&pts[i].coords);
            for j in 0..pts.len() {
                if orbit_of[j] == usize::MAX && same_point(&img, &pts[j].coords, set.dedupe_tol) {
                    orbit_of[j] = reps.len();
                    size += 1;
                }
            }
        }
        reps.push(pts[i].clone());
        sizes.push(size);
    }
    let mut out = set.clone();
    out.points = reps;
    project(&mut out);
    let mut hist: Vec<(usize, usize)> = Vec::new();
    for &s in &sizes {
        match hist.iter_mut().find(|(k, _)| *k == s) {
            Some(e) => e.1 += 1,
            None => hist.push((s, 1)),
        }
    }
    hist.sort();
    out.diagnostics.push(format!(
        "quotient by a group of order {}: {} orbits, sizes {:?}",
        group.len(),
        sizes.len(),
        hist
    ));
    out.orbit_sizes = sizes;
    Ok(out)
}
