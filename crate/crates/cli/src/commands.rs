use hypercurv_core::enumerative::{
    cc_upper_bound, curvature_bundle_ring, degree_y, degree_y_symbolic, known_cc_counts,
    ledger_identities_symbolic, salmon_ledger, cc_bound_identity_symbolic, EnumerativeError,
};
use hypercurv_core::geometry::curvature_data;
use hypercurv_core::poly::{rational_to_f64, PolySystem};
use hypercurv_core::quadric::{complex_cc_points, complex_umbilics, Points, QuadricSpec};
use hypercurv_core::quadric::quadric_cc_system;
use hypercurv_core::solver::{classify_and_project, total_degree_homotopy, SolutionSet, SolverSettings};
use hypercurv_core::systems::{critical_curvature_system_general, flex_system, umbilic_system};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::report::{Counts, Point, RunReport};
use crate::surface::{parse_floats, Surface};
use crate::CliError;

const DEDUPE_TOL: f64 = 1e-6;
const CLOSED_FORM_TOL: f64 = 1e-6;
const PLANE_TOL: f64 = 1e-8;

pub struct Context {
    pub seed: u64,
    pub tol: f64,
    pub budget: u64,
    pub threads: Option<usize>,
}

impl Context {
    fn solve(&self, sys: &PolySystem<Complex64>, block: &[usize]) -> Result<SolutionSet, CliError> {
        let settings = SolverSettings {
            seed: self.seed,
            budget: self.budget,
            threads: self.threads,
            real_tol: self.tol,
            dedupe_tol: DEDUPE_TOL,
            ..Default::default()
        };
        let set = total_degree_homotopy(sys, &settings)?;
        Ok(classify_and_project(&set, block, self.tol, DEDUPE_TOL)?)
    }
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest distance from a closed-form point to its nearest solver point,
/// and whether the two lists match one to one within tolerance.
fn compare(closed: &[Vec<Complex64>], solved: &[Vec<Complex64>]) -> (bool, f64) {
    let mut worst: f64 = 0.0;
    for c in closed {
        let best = solved.iter().map(|s| dist(c, s)).fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    for s in solved {
        let best = closed.iter().map(|c| dist(c, s)).fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    (closed.len() == solved.len() && worst <= CLOSED_FORM_TOL, worst)
}

fn closed_form_report(closed: &[(Vec<Complex64>, bool)], set: &SolutionSet) -> Value {
    let solved: Vec<Vec<Complex64>> = set.x_projections.iter().map(|p| p.coords.clone()).collect();
    let solved_real: Vec<Vec<Complex64>> =
        set.real_projections().map(|p| p.coords.clone()).collect();
    let all: Vec<Vec<Complex64>> = closed.iter().map(|(p, _)| p.clone()).collect();
    let real: Vec<Vec<Complex64>> = closed.iter().filter(|(_, r)| *r).map(|(p, _)| p.clone()).collect();
    let (ok_all, dev_all) = compare(&all, &solved);
    let (ok_real, dev_real) = compare(&real, &solved_real);
    json!({
        "complex": all.len(),
        "real": real.len(),
        "agreement": ok_all && ok_real,
        "max_deviation": dev_all.max(dev_real),
    })
}

fn projection_points(set: &SolutionSet) -> Vec<Point> {
    set.x_projections.iter().map(|p| Point::new(&p.coords, p.real)).collect()
}

fn need_three(surface: &Surface) -> Result<(), CliError> {
    if surface.nvars() != 3 {
        return Err(CliError::Input(format!("surface must live in 3 variables, got {}", surface.nvars())));
    }
    Ok(())
}

fn infinite(report: &mut RunReport, what: &str) {
    report.counts = Some(Counts::infinite());
    report.diagnostics.push(format!("degenerate quadric: infinitely many {what}"));
}

pub fn curvature(ctx: &Context, surface: &Surface, point: &str, report: &mut RunReport) -> Result<(), CliError> {
    let p = parse_floats(point)?;
    if p.len() != surface.nvars() {
        return Err(CliError::Input(format!(
            "point has {} coordinates, surface has {} variables",
            p.len(),
            surface.nvars()
        )));
    }
    let data = curvature_data(&surface.polynomial(), &p, ctx.tol)?;
    let mut magnitudes: Vec<f64> = data.principal_curvatures.iter().map(|k| k.abs()).collect();
    magnitudes.sort_by(f64::total_cmp);
    report.points = vec![Point::new(&p.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>(), true)];
    report.result = Some(json!({
        "principal_curvatures": data.principal_curvatures,
        "magnitudes": magnitudes,
        "gradient": data.gradient,
        "eta": data.eta,
        "tangent_frame": data.tangent_frame,
        "shape_matrix": data.shape_matrix,
    }));
    Ok(())
}

pub fn umbilics(ctx: &Context, surface: &Surface, report: &mut RunReport) -> Result<(), CliError> {
    need_three(surface)?;
    if let Surface::Quadric(q) = surface {
        if q.is_degenerate() {
            infinite(report, "umbilics");
            return Ok(());
        }
    }
    let sys = umbilic_system(&surface.polynomial())?.to_complex();
    let set = ctx.solve(&sys, &[0, 1, 2])?;
    report.counts = Some(Counts::finite(set.complex_count, set.real_count));
    report.points = projection_points(&set);
    report.diagnostics.extend(set.diagnostics.iter().cloned());
    if let Surface::Quadric(q) = surface {
        let closed = match complex_umbilics(q.coefficients())? {
            Points::Finite(v) => v
                .into_iter()
                .map(|p| {
                    let real = p.iter().all(|c| c.im == 0.0);
                    (p.to_vec(), real)
                })
                .collect::<Vec<_>>(),
            Points::Infinite => unreachable!("degenerate case handled above"),
        };
        report.closed_form = Some(closed_form_report(&closed, &set));
    }
    Ok(())
}

fn in_coordinate_plane(x: &[Complex64]) -> bool {
    let scale = x.iter().map(|c| c.norm()).fold(1.0, f64::max);
    x.iter().any(|c| c.norm() <= PLANE_TOL * scale)
}

pub fn critcurv(ctx: &Context, surface: &Surface, report: &mut RunReport) -> Result<(), CliError> {
    let n = surface.nvars();
    let block: Vec<usize> = (0..n).collect();
    match surface {
        Surface::Quadric(q) => critcurv_quadric(ctx, q, &block, report),
        Surface::Poly { poly, .. } => {
            let sys = critical_curvature_system_general(poly)?.to_complex();
            let set = ctx.solve(&sys, &block)?;
            report.counts = Some(Counts::finite(set.complex_count, set.real_count));
            report.points = projection_points(&set);
            report.diagnostics.extend(set.diagnostics.iter().cloned());
            Ok(())
        }
    }
}

fn critcurv_quadric(ctx: &Context, q: &QuadricSpec, block: &[usize], report: &mut RunReport) -> Result<(), CliError> {
    if q.is_degenerate() {
        infinite(report, "critical curvature points");
        return Ok(());
    }
    let sys = quadric_cc_system(q.coefficients()).to_complex();
    let set = ctx.solve(&sys, block)?;
    report.counts = Some(Counts::finite(set.complex_count, set.real_count));
    report.points = set
        .x_projections
        .iter()
        .map(|p| {
            let mut pt = Point::new(&p.coords, p.real);
            pt.in_coordinate_plane = Some(in_coordinate_plane(&p.coords));
            pt
        })
        .collect();
    let all_planar = set.x_projections.iter().all(|p| in_coordinate_plane(&p.coords));
    report.result = Some(json!({ "all_in_coordinate_planes": all_planar }));
    report.diagnostics.extend(set.diagnostics.iter().cloned());
    if q.n() == 3 {
        if let Points::Finite(v) = complex_cc_points(q.coefficients())? {
            let closed: Vec<(Vec<Complex64>, bool)> = v.into_iter().map(|p| (p.x.to_vec(), p.real)).collect();
            report.closed_form = Some(closed_form_report(&closed, &set));
        }
    }
    Ok(())
}

pub fn flexes(ctx: &Context, surface: &Surface, report: &mut RunReport) -> Result<(), CliError> {
    let poly = match surface {
        Surface::Poly { poly, .. } => poly,
        Surface::Quadric(_) => return Err(CliError::Input("flexes needs a plane curve given by --poly".into())),
    };
    let sys = flex_system(poly, ctx.seed)?.to_complex();
    let set = ctx.solve(&sys, &[0, 1, 2])?;
    report.counts = Some(Counts::finite(set.complex_count, set.real_count));
    report.points = projection_points(&set);
    report.diagnostics.extend(set.diagnostics.iter().cloned());
    Ok(())
}

fn degree_arg(d: u64) -> Result<u64, CliError> {
    salmon_ledger(d).map(|_| d).map_err(|e| match e {
        EnumerativeError::DegreeTooLow(_) | EnumerativeError::DegreeTooHigh(_) => CliError::Input(e.to_string()),
        other => CliError::Internal(other.to_string()),
    })
}

pub fn counts(d: u64, report: &mut RunReport) -> Result<(), CliError> {
    let d = degree_arg(d)?;
    let ledger = salmon_ledger(d).map_err(internal)?;
    let bound = cc_upper_bound(d).map_err(internal)?;
    let known = known_cc_counts(d).ok();
    report.ledger = Some(json!({
        "salmon": ledger,
        "cc_upper_bound": bound.to_string(),
        "cc_upper_bound_value": rational_to_f64(&bound),
        "known_cc": known,
    }));
    Ok(())
}

pub fn chow(d: u64, report: &mut RunReport) -> Result<(), CliError> {
    let d = degree_arg(d)?;
    let vars = vec!["d".to_string()];
    let ring = curvature_bundle_ring();
    let relation = &ring.rules[1].replacement;
    let c1 = relation[0].1.scale(&(-hypercurv_core::poly::Rational::from_integer(1.into())));
    let c2 = relation[1].1.scale(&(-hypercurv_core::poly::Rational::from_integer(1.into())));
    let deg_sym = degree_y_symbolic().map_err(internal)?;
    let ledger = salmon_ledger(d).map_err(internal)?;
    report.ledger = Some(json!({
        "ring": {
            "generators": ring.names,
            "relations": ["h^3 = 0", "zeta^5 = -(c1*zeta^4 + c2*zeta^3)"],
            "c1": format!("({})*h", c1.to_text(&vars)),
            "c2": format!("({})*h^2", c2.to_text(&vars)),
            "point_class": "h^2*zeta^4 = d",
        },
        "deg_y_symbolic": deg_sym.to_text(&vars),
        "deg_y": degree_y(d).map_err(internal)?.to_string(),
        "salmon": ledger,
        "identities_hold": ledger_identities_symbolic().is_ok() && cc_bound_identity_symbolic().is_ok(),
    }));
    Ok(())
}

fn internal(e: EnumerativeError) -> CliError {
    CliError::Internal(e.to_string())
}
