use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use robin_lab::fem::{solve_torsion, ScalarField, SolveOptions};
use robin_lab::geometry::{build_mesh, DomainSpec, TriangleMesh};
use robin_lab::rearrange::*;
use robin_lab::Error;

fn mesh(spec: DomainSpec, h: f64) -> Arc<TriangleMesh> {
    Arc::new(build_mesh(&spec, h).unwrap())
}

fn unit_square(h: f64) -> Arc<TriangleMesh> {
    mesh(DomainSpec::rectangle(1.0, 1.0).with_center([0.5, 0.5]), h)
}

/// Nodal interpolant of the closed-form radial solution on a disk mesh,
/// using the discrete area.
fn radial_field(h: f64, beta: f64) -> ScalarField {
    let m = mesh(DomainSpec::disk(1.0), h);
    let a = m.area();
    ScalarField::from_fn(m, |p| (a - PI * (p[0] * p[0] + p[1] * p[1])) / (4.0 * PI) + a.sqrt() / (2.0 * PI.sqrt() * beta))
}

fn radial_vm(f: &ScalarField, beta: f64) -> f64 {
    f.mesh().area().sqrt() / (2.0 * PI.sqrt() * beta)
}

#[test]
fn constant_field_rearranges_to_itself() {
    let f = ScalarField::from_fn(mesh(DomainSpec::ellipse(1.5, 1.0), 0.2), |_| 0.7);
    let area = f.mesh().area();
    let r = decreasing_rearrangement(&f);
    assert_eq!(distribution(&f, 0.69), area);
    assert_eq!(distribution(&f, 0.7), 0.0);
    for s in [0.0, 0.3, 1.0, area * 0.999, area] {
        assert_abs_diff_eq!(r.eval(s).unwrap(), 0.7, epsilon = 1e-10);
    }
}

#[test]
fn linear_field_on_unit_square() {
    let f = ScalarField::from_fn(unit_square(0.08), |p| p[0]);
    let r = decreasing_rearrangement(&f);
    for i in 0..=100 {
        let s = i as f64 / 100.0;
        assert_abs_diff_eq!(distribution(&f, s), (1.0 - s).clamp(0.0, 1.0), epsilon = 1e-10);
        assert_abs_diff_eq!(r.eval(s).unwrap(), 1.0 - s, epsilon = 1e-10);
    }
}

#[test]
fn evaluation_outside_measure_range_is_rejected() {
    let f = ScalarField::from_fn(unit_square(0.2), |p| p[0]);
    let r = decreasing_rearrangement(&f);
    assert!(matches!(r.eval(-1e-9), Err(Error::OutOfRange { .. })));
    assert!(matches!(r.eval(1.0 + 1e-9), Err(Error::OutOfRange { .. })));
    assert!(schwartz_value(&r, [1.0, 0.0]).is_err());
}

#[test]
fn radial_distribution_converges_at_second_order() {
    let mut errs = Vec::new();
    for h in [0.1, 0.05] {
        let f = radial_field(h, 1.0);
        let (vm, area) = (radial_vm(&f, 1.0), f.mesh().area());
        let r = decreasing_rearrangement(&f);
        let vmax = vm + area / (4.0 * PI);
        let mut err = 0.0f64;
        for i in 1..100 {
            let t = vm + (vmax - vm) * i as f64 / 100.0;
            err = err.max((distribution(&f, t) - (area - 4.0 * PI * (t - vm))).abs());
            let s = area * i as f64 / 100.0;
            err = err.max(4.0 * PI * (r.eval(s).unwrap() - ((area - s) / (4.0 * PI) + vm)).abs());
        }
        errs.push(err);
    }
    assert!(errs[0] < 0.05, "{errs:?}");
    assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
}

#[test]
fn round_trip_reproduces_distribution_at_breakpoints() {
    let m = mesh(DomainSpec::ellipse(1.5, 1.0), 0.12);
    let f = ScalarField::from_fn(m, |p| 2.0 + (2.0 * p[0]).sin() * p[1] + 0.3 * p[0]);
    let r = decreasing_rearrangement(&f);
    let mu = r.distribution();
    let area = mu.total_measure();
    for (k, &t) in mu.breakpoints().iter().enumerate() {
        let back = r.measure_above(t);
        assert!((back - mu.at_breakpoint(k)).abs() <= 1e-12 * area, "k={k} {back} {}", mu.at_breakpoint(k));
    }
}

#[test]
fn plateaus_follow_the_generalized_inverse() {
    // vertices left of x = 0.537 are flattened onto the minimum
    let f = ScalarField::from_fn(unit_square(0.05), |p| p[0].max(0.537));
    let r = decreasing_rearrangement(&f);
    let mu = r.distribution();
    let (lo, hi) = (mu.at_breakpoint(0), mu.left_limit(0));
    assert_eq!(mu.breakpoints()[0], 0.537);
    assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
    assert!(lo < 0.5 && lo > 0.4, "{lo}");
    assert_eq!(mu.eval(0.537), lo);
    for s in [lo, 0.5 * (lo + hi), hi] {
        assert_eq!(r.eval(s).unwrap(), 0.537);
    }
    assert!(r.eval(lo * (1.0 - 1e-9)).unwrap() > 0.537);
    assert!((r.measure_above(0.537) - lo).abs() < 1e-12);
}

#[test]
fn equidistribution_of_norms() {
    for f in [
        radial_field(0.1, 1.0),
        ScalarField::from_fn(mesh(DomainSpec::rectangle(2.0, 1.0), 0.1), |p| 1.0 + p[0] * p[0] - 0.5 * p[1]),
    ] {
        let r = decreasing_rearrangement(&f);
        for p in [1, 2] {
            let (a, b) = (f.lp_norm(p).unwrap(), r.lp_norm(p).unwrap());
            assert!((a - b).abs() <= 1e-10 * a, "p={p}: {a} vs {b}");
        }
        assert!(r.lp_norm(3).is_err());
    }
}

#[test]
fn schwartz_value_at_origin_is_the_maximum() {
    let f = radial_field(0.1, 1.0);
    let r = decreasing_rearrangement(&f);
    assert_eq!(schwartz_value(&r, [0.0, 0.0]).unwrap(), f.extrema().1);
}

#[test]
fn schwartz_rearrangement_fixes_radial_fields() {
    let mut errs = Vec::new();
    for h in [0.1, 0.05] {
        let f = radial_field(h, 1.0);
        let r = decreasing_rearrangement(&f);
        let rad = (f.mesh().area() / PI).sqrt();
        let err = f
            .mesh()
            .vertices()
            .iter()
            .zip(f.values())
            .filter(|(p, _)| p[0].hypot(p[1]) <= rad)
            .map(|(&p, &v)| (schwartz_value(&r, p).unwrap() - v).abs())
            .fold(0.0, f64::max);
        errs.push(err);
    }
    assert!(errs[0] < 2e-3 && errs[0] / errs[1] > 3.0, "{errs:?}");
}

#[test]
fn unit_square_half_level_set() {
    let f = ScalarField::from_fn(unit_square(0.1), |p| p[0]);
    let g = level_set_geometry(&f, 0.5).unwrap();
    assert_abs_diff_eq!(g.interior_perimeter, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(g.exterior_length, 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(g.enclosed_area, 0.5, epsilon = 1e-12);
    assert_eq!(g.contours.len(), 1);
    assert!(!g.contours[0].closed);
    let res = isoperimetric_residual(&f, 0.5).unwrap();
    assert_abs_diff_eq!(res, 3.0 - 2.0 * (PI / 2.0).sqrt(), epsilon = 1e-12);
}

#[test]
fn level_set_requires_open_value_range() {
    let f = ScalarField::from_fn(unit_square(0.2), |p| p[0]);
    assert!(level_set_geometry(&f, 0.0).is_err());
    assert!(level_set_geometry(&f, 1.0).is_err());
    assert!(isoperimetric_residual(&f, 2.0).is_err());
}

#[test]
fn enclosed_area_matches_distribution() {
    let m = mesh(DomainSpec::perturbed_disk(1.0, 0.2, 3), 0.1);
    let f = ScalarField::from_fn(m, |p| 1.0 + (p[0] - 0.2).powi(2) + 0.5 * p[1].sin());
    let (lo, hi) = f.extrema();
    for i in 1..=20 {
        let t = lo + (hi - lo) * (i as f64 - 0.37) / 20.0;
        let g = level_set_geometry(&f, t).unwrap();
        assert!((g.enclosed_area - distribution(&f, t)).abs() < 1e-12);
    }
    let near_top = level_set_geometry(&f, hi - 1e-9 * (hi - lo)).unwrap();
    assert!(near_top.enclosed_area < 1e-12);
}

#[test]
fn radial_level_sets_are_circles() {
    let f = radial_field(0.05, 1.0);
    let (vm, area) = (radial_vm(&f, 1.0), f.mesh().area());
    let vmax = f.extrema().1;
    let mut fits = Vec::new();
    for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let t = vm + frac * (vmax - vm);
        let g = level_set_geometry(&f, t).unwrap();
        let r = ((area - 4.0 * PI * (t - vm)) / PI).sqrt();
        assert_eq!(g.exterior_length, 0.0);
        assert!(g.contours.iter().all(|c| c.closed));
        assert!((g.interior_perimeter - 2.0 * PI * r).abs() < 1e-2 * r, "t={t}");
        assert!(isoperimetric_residual(&f, t).unwrap().abs() < 5e-3);
        let fit = circle_fit(&g).unwrap();
        assert!(fit.rms_residual <= 1e-3, "{fit:?}");
        assert!(fit.center[0].hypot(fit.center[1]) < 1e-3);
        fits.push(fit);
    }
    assert!(center_spread(&fits) < 1e-3);
}

#[test]
fn translated_disk_solution_has_concentric_level_sets() {
    let x0 = [0.7, -0.4];
    let m = mesh(DomainSpec::disk(1.0).with_center(x0), 0.05);
    let u = solve_torsion(m, 1.0, &SolveOptions::default()).unwrap();
    let (lo, hi) = u.extrema();
    let fits: Vec<_> = [0.1, 0.3, 0.5, 0.7, 0.9]
        .iter()
        .map(|f| circle_fit(&level_set_geometry(&u, lo + f * (hi - lo)).unwrap()).unwrap())
        .collect();
    for fit in &fits {
        assert!((fit.center[0] - x0[0]).hypot(fit.center[1] - x0[1]) < 1e-3, "{fit:?}");
    }
    assert!(center_spread(&fits) < 1e-3);
}

#[test]
fn ellipse_level_sets_are_not_circles() {
    let mut rms = Vec::new();
    let mut iso = Vec::new();
    for h in [0.1, 0.05] {
        let u = solve_torsion(mesh(DomainSpec::ellipse(1.5, 1.0), h), 1.0, &SolveOptions::default()).unwrap();
        let (lo, hi) = u.extrema();
        let t = 0.5 * (lo + hi);
        rms.push(circle_fit(&level_set_geometry(&u, t).unwrap()).unwrap().rms_residual);
        iso.push(isoperimetric_residual(&u, t).unwrap());
    }
    assert!(rms.iter().all(|&r| r > 0.02), "{rms:?}");
    assert!((rms[0] - rms[1]).abs() < 0.2 * rms[1]);
    assert!(iso.iter().all(|&r| r > 0.01), "{iso:?}");
}

#[test]
fn circle_fit_rejects_degenerate_input() {
    assert!(matches!(fit_points(&[[0.0, 0.0], [1.0, 1.0]]), Err(Error::DegenerateFit(_))));
    let line: Vec<_> = (0..10).map(|i| [i as f64, 2.0 * i as f64]).collect();
    assert!(matches!(fit_points(&line), Err(Error::DegenerateFit(_))));
    let circle: Vec<_> = (0..7)
        .map(|i| {
            let a = i as f64;
            [3.0 + 2.0 * a.cos(), -1.0 + 2.0 * a.sin()]
        })
        .collect();
    let fit = fit_points(&circle).unwrap();
    assert_abs_diff_eq!(fit.radius, 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(fit.center[0], 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(fit.center[1], -1.0, epsilon = 1e-12);
    assert!(fit.rms_residual < 1e-14);
}

#[test]
fn reciprocal_boundary_integral_of_radial_field() {
    let f = radial_field(0.05, 1.0);
    let vm = radial_vm(&f, 1.0);
    let below = exterior_reciprocal_integral(&f, 0.5 * vm).unwrap();
    // all boundary vertices lie on the unit circle and share one value
    let e = &f.mesh().boundary_edges()[0];
    let vb = f.values()[e.vertices[0]];
    assert!((below - f.mesh().perimeter() / vb).abs() < 1e-12 * below);
    assert!((below - 4.0 * PI).abs() < 4.0 * PI * 1e-3);
    // every boundary value is below this threshold
    assert_eq!(exterior_reciprocal_integral(&f, vm * 1.01).unwrap(), 0.0);
    assert!(exterior_reciprocal_integral(&f, -0.1).is_err());
    assert!(exterior_reciprocal_integral(&f, f.extrema().1).is_err());
}

#[test]
fn reciprocal_integral_matches_quadrature_on_a_slanted_trace() {
    let f = ScalarField::from_fn(unit_square(0.1), |p| 0.2 + 3.0 * p[0] + p[1]);
    let exact = exterior_reciprocal_integral(&f, 0.0).unwrap();
    // the bottom edge alone: ∫₀¹ dx/(0.2+3x)
    let mut quad = 0.0;
    let n = 20000;
    for e in f.mesh().boundary_edges() {
        let [i, j] = e.vertices;
        let (pi, pj) = (f.mesh().vertices()[i], f.mesh().vertices()[j]);
        let len = (pj[0] - pi[0]).hypot(pj[1] - pi[1]);
        for k in 0..n {
            let s = (k as f64 + 0.5) / n as f64;
            let u = f.values()[i] + s * (f.values()[j] - f.values()[i]);
            quad += len / n as f64 / u;
        }
    }
    assert!((exact - quad).abs() < 1e-6 * exact);
}

#[test]
fn weighted_boundary_moment_equals_half_the_trace_integral() {
    // for any positive field the moment equals ½∮u
    let m = mesh(DomainSpec::ellipse(1.5, 1.0), 0.1);
    let f = ScalarField::from_fn(m.clone(), |p| 1.0 + 0.3 * p[0] + 0.1 * p[1] * p[1]);
    let half_trace = 0.5 * f.boundary_integral();
    assert!((weighted_boundary_moment(&f).unwrap() - half_trace).abs() < 1e-10 * half_trace);
    for beta in [0.5, 2.0] {
        let u = solve_torsion(m.clone(), beta, &SolveOptions::default()).unwrap();
        let target = m.area() / (2.0 * beta);
        assert!((weighted_boundary_moment(&u).unwrap() - target).abs() < 1e-8 * target);
    }
}

#[test]
fn coarea_formula_on_radial_bands() {
    let f = radial_field(0.05, 1.0);
    let vm = radial_vm(&f, 1.0);
    let vmax = f.extrema().1;
    let (t1, t2) = (vm + 0.2 * (vmax - vm), vm + 0.8 * (vmax - vm));
    let (lhs, rhs) = coarea_sides(&f, t1, t2, 200).unwrap();
    assert!((lhs - rhs).abs() < 0.05 * rhs, "{lhs} {rhs}");
    assert!((lhs - rhs).abs() < 1e-3 * rhs, "{lhs} {rhs}");
}

#[test]
fn radial_field_has_no_plateaus() {
    let f = radial_field(0.05, 1.0);
    let vm = radial_vm(&f, 1.0);
    assert_eq!(plateau_measure(&f, vm, f.extrema().1), 0.0);
    let flat = ScalarField::from_fn(unit_square(0.2), |_| 1.0);
    assert_abs_diff_eq!(plateau_measure(&flat, 0.0, 2.0), 1.0, epsilon = 1e-12);
}

#[test]
fn profile_csv_headers() {
    let f = ScalarField::from_fn(unit_square(0.25), |p| p[0]);
    let r = decreasing_rearrangement(&f);
    let mu_csv = r.distribution().to_csv();
    let us_csv = r.to_csv();
    assert!(mu_csv.starts_with("t,mu\n"));
    assert!(us_csv.starts_with("s,u_star\n"));
    let last: Vec<f64> = us_csv.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_abs_diff_eq!(last[0], 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(last[1], 0.0, epsilon = 1e-12);
}

fn coarse_mesh() -> Arc<TriangleMesh> {
    use std::sync::OnceLock;
    static M: OnceLock<Arc<TriangleMesh>> = OnceLock::new();
    M.get_or_init(|| mesh(DomainSpec::ellipse(1.3, 1.0), 0.25)).clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profiles_are_monotone_and_round_trip(
        c in prop::array::uniform4(-1.0f64..1.0),
        quant in prop::sample::select(vec![0.0, 0.25]),
    ) {
        let f = ScalarField::from_fn(coarse_mesh(), |p| {
            let v = 2.0 + c[0] * p[0] + c[1] * p[1] + c[2] * p[0] * p[1] + c[3] * (3.0 * p[0]).sin();
            // optional quantisation creates plateaus
            if quant > 0.0 { (v / quant).round() * quant } else { v }
        });
        let r = decreasing_rearrangement(&f);
        let mu = r.distribution();
        let bp = mu.breakpoints();
        let area = mu.total_measure();
        for k in 0..bp.len() {
            prop_assert!(mu.at_breakpoint(k) <= mu.left_limit(k) + 1e-12 * area);
            if k + 1 < bp.len() {
                prop_assert!(mu.at_breakpoint(k + 1) <= mu.at_breakpoint(k) + 1e-12 * area);
                // right continuity
                let t = bp[k] + 1e-12 * (bp[k + 1] - bp[k]);
                prop_assert!((mu.eval(t) - mu.at_breakpoint(k)).abs() <= 1e-9 * area);
            }
            prop_assert!((r.measure_above(bp[k]) - mu.at_breakpoint(k)).abs() <= 1e-12 * area);
            prop_assert!((distribution(&f, bp[k]) - mu.at_breakpoint(k)).abs() <= 1e-12 * area);
        }
        let mut prev = f64::INFINITY;
        for (_, v) in r.sample(64) {
            prop_assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn level_set_area_agrees_with_distribution(
        c in prop::array::uniform3(-1.0f64..1.0),
        frac in 0.01f64..0.99,
    ) {
        let f = ScalarField::from_fn(coarse_mesh(), |p| 1.0 + p[0] * c[0] + p[1] * c[1] + c[2] * p[0] * p[0]);
        let (lo, hi) = f.extrema();
        let t = lo + frac * (hi - lo);
        let g = level_set_geometry(&f, t).unwrap();
        prop_assert!((g.enclosed_area - distribution(&f, t)).abs() <= 1e-12);
        prop_assert!(isoperimetric_residual(&f, t).unwrap() >= -1e-12);
    }
}
