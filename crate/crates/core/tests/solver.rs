use hypercurv_core::poly::{default_vars, parse_poly, random_complex_poly, PolySystem, Rational, SignAction};
use hypercurv_core::quadric::QuadricSpec;
use hypercurv_core::solver::{
    classify_and_project, quotient_by_symmetry, total_degree_homotopy, SolutionSet, SolverSettings,
};
use hypercurv_core::systems::umbilic_system;
use num_complex::Complex64;

fn solve(sys: &PolySystem<Complex64>, seed: u64, threads: Option<usize>) -> SolutionSet {
    let settings = SolverSettings { seed, threads, ..Default::default() };
    total_degree_homotopy(sys, &settings).unwrap()
}

fn quadric_umbilics(a: &[i64]) -> PolySystem<Complex64> {
    umbilic_system(&QuadricSpec::from_ints(a).polynomial()).unwrap().to_complex()
}

#[test]
fn two_decoupled_quadrics() {
    let vars = default_vars(2);
    let eqs = ["x1^2 - 1", "x2^2 - 4"]
        .iter()
        .map(|e| parse_poly::<Rational>(e, &vars).unwrap().to_complex())
        .collect();
    let sys = PolySystem::new(vars, eqs).unwrap();
    let set = solve(&sys, 5, None);
    assert_eq!(set.nonsingular_points().count(), 4);
    for p in set.nonsingular_points() {
        assert!(p.residual < 1e-14);
        assert!((p.coords[0].norm() - 1.0).abs() < 1e-12 && (p.coords[1].norm() - 2.0).abs() < 1e-12);
    }
}

#[test]
fn generic_dense_systems_attain_bezout() {
    let shapes: [&[u32]; 20] = [
        &[2, 2], &[2, 3], &[3, 3], &[3, 4], &[4, 4], &[2, 5], &[5, 5], &[4, 6], &[6, 6], &[7, 8],
        &[2, 2, 2], &[2, 2, 3], &[2, 3, 3], &[3, 3, 3], &[2, 3, 4], &[3, 3, 4], &[4, 4, 4], &[2, 4, 4],
        &[2, 2, 2, 2], &[2, 2, 2, 4],
    ];
    for (k, degs) in shapes.iter().enumerate() {
        let n = degs.len();
        let eqs = degs
            .iter()
            .enumerate()
            .map(|(i, &d)| random_complex_poly(n, d, 1000 * k as u64 + i as u64))
            .collect();
        let sys = PolySystem::new(default_vars(n), eqs).unwrap();
        let bezout: u64 = degs.iter().map(|&d| d as u64).product();
        assert!(bezout <= 64);
        let set = solve(&sys, 17, None);
        assert_eq!(set.nonsingular_points().count() as u64, bezout, "degrees {degs:?}");
        for p in set.nonsingular_points() {
            assert!(p.scaled_residual < 1e-10);
        }
    }
}

#[test]
fn counts_do_not_depend_on_seed_or_workers() {
    for a in [[1, 2, 4], [-1, 2, 4], [-2, -1, 4]] {
        let sys = quadric_umbilics(&a);
        let base = classify_and_project(&solve(&sys, 1, Some(1)), &[0, 1, 2], 1e-8, 1e-6).unwrap();
        for seed in [2, 3] {
            let other = classify_and_project(&solve(&sys, seed, None), &[0, 1, 2], 1e-8, 1e-6).unwrap();
            assert_eq!((other.complex_count, other.real_count), (base.complex_count, base.real_count));
        }
        let parallel = classify_and_project(&solve(&sys, 1, Some(3)), &[0, 1, 2], 1e-8, 1e-6).unwrap();
        assert_eq!(parallel, base);
    }
}

#[test]
fn point_reflection_pairs_quadric_umbilics() {
    let sys = quadric_umbilics(&[1, 2, 4]);
    let set = classify_and_project(&solve(&sys, 1, None), &[0, 1, 2], 1e-8, 1e-6).unwrap();
    // f(-x) = f(x), so (x, y1, w) ↦ (-x, y1, -w) preserves the system
    let flip = SignAction::new("reflect", vec![-1, -1, -1, 1, -1, -1, -1]);
    let q = quotient_by_symmetry(&set, &sys, &[flip]).unwrap();
    assert_eq!(q.points.len() * 2, set.points.len());
    assert!(q.orbit_sizes.iter().all(|&s| s == 2));
    assert_eq!(q.complex_count * 2, set.complex_count);

    let bogus = SignAction::new("bogus", vec![-1, 1, 1, 1, 1, 1, 1]);
    assert!(quotient_by_symmetry(&set, &sys, &[bogus]).is_err());
}
