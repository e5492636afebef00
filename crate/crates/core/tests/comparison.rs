use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use robin_lab::comparison::*;
use robin_lab::fem::ScalarField;
use robin_lab::geometry::{build_mesh, DomainSpec};
use robin_lab::rearrange::{decreasing_rearrangement, DistributionProfile};
use robin_lab::Error;

fn settings() -> AnalysisSettings {
    AnalysisSettings::default()
}

fn disk_fine() -> &'static Analysis {
    static A: OnceLock<Analysis> = OnceLock::new();
    A.get_or_init(|| analyze(&DomainSpec::disk(1.0), 1.0, 0.02, &settings()).unwrap())
}

fn ellipse(h: f64) -> Analysis {
    analyze(&DomainSpec::ellipse(1.5, 1.0).scaled_to_area(PI), 1.0, h, &settings()).unwrap()
}

#[test]
fn radial_reference_closed_forms() {
    let r = RadialReference::new(PI, 1.0).unwrap();
    assert_abs_diff_eq!(r.radial_value(0.0).unwrap(), 0.75, epsilon = 1e-15);
    assert_abs_diff_eq!(r.radial_value(1.0).unwrap(), r.v_min(), epsilon = 1e-15);
    assert_abs_diff_eq!(r.vstar(PI).unwrap(), r.v_min(), epsilon = 1e-15);
    assert_abs_diff_eq!(r.vstar(0.0).unwrap(), r.v_max(), epsilon = 1e-15);
    assert_abs_diff_eq!(r.phi(0.4), PI);
    assert_abs_diff_eq!(r.phi(0.8), 0.0);
    // Dirichlet limit
    let stiff = RadialReference::new(PI, 1e12).unwrap();
    assert_abs_diff_eq!(stiff.radial_value(0.5).unwrap(), (PI - PI * 0.25) / (4.0 * PI), epsilon = 1e-12);
    assert!(r.radial_value(-0.1).is_err());
    assert!(RadialReference::new(-1.0, 1.0).is_err());
}

#[test]
fn radial_norms_match_quadrature() {
    let r = RadialReference::new(2.7, 0.6).unwrap();
    let n = 200_000;
    let big_r = r.radius();
    let (mut l1, mut l2) = (0.0, 0.0);
    for i in 0..n {
        let rho = (i as f64 + 0.5) / n as f64 * big_r;
        let v = r.radial_value(rho).unwrap();
        let w = 2.0 * PI * rho * big_r / n as f64;
        l1 += v * w;
        l2 += v * v * w;
    }
    assert!((r.lp_norm(1).unwrap() - l1).abs() < 1e-8 * l1);
    assert!((r.lp_norm(2).unwrap() - l2.sqrt()).abs() < 1e-8 * l2);
    assert!((r.boundary_moment() - r.area() / (2.0 * r.beta())).abs() < 1e-14);
}

proptest! {
    #[test]
    fn vstar_is_the_radial_value_in_measure_coordinates(rho in 0.0f64..1.0, area in 0.5f64..5.0, beta in 0.1f64..10.0) {
        let r = RadialReference::new(area, beta).unwrap();
        let x = rho * r.radius();
        let a = r.vstar(PI * x * x).unwrap();
        let b = r.radial_value(x).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * b);
        // φ inverts v*
        let s = PI * x * x;
        prop_assert!((r.phi(a) - s).abs() <= 1e-12 * area);
    }
}

#[test]
fn discrete_radial_field_satisfies_the_level_set_identity() {
    let v_mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0), 0.02).unwrap());
    let r = RadialReference::new(v_mesh.area(), 1.0).unwrap();
    let v = r.interpolate(v_mesh, [0.0, 0.0]);
    let mu = DistributionProfile::new(&v);
    let res = lemma_residuals(&v, &mu, 1.0, &lemma_grid(&v, 200)).unwrap();
    let worst = res.iter().map(|x| x.abs()).fold(0.0, f64::max);
    assert!(worst <= 0.05 * 4.0 * PI, "{worst}");
}

#[test]
fn lemma_grid_must_stay_inside_the_value_range() {
    let a = disk_fine();
    let (lo, _) = a.field.extrema();
    let err = lemma_residuals(&a.field, a.rearrangement.distribution(), 1.0, &[lo]).unwrap_err();
    assert!(matches!(err, Error::OutOfRange { .. }));
}

#[test]
fn disk_is_the_equality_case() {
    let a = disk_fine();
    assert!(a.report.all_pass(), "{:#?}", a.report.failures().collect::<Vec<_>>());
    let gap = (0..1000)
        .map(|i| {
            let s = a.reference.area() * i as f64 / 999.0;
            (a.rearrangement.eval(s).unwrap() - a.reference.vstar(s).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    assert!(gap <= 1e-3, "{gap}");
    let l1 = a.report.check("norm_l1").unwrap();
    assert!((l1.lhs - 5.0 * PI / 8.0).abs() < 1e-3);
    assert!((l1.rhs - 5.0 * PI / 8.0).abs() < 1e-3);
    let m = a.report.check("minima").unwrap();
    assert!((m.lhs - m.rhs).abs() < 1e-3);
}

#[test]
fn ellipse_comparisons_are_strict_and_stable() {
    let (coarse, fine) = (ellipse(0.05), ellipse(0.025));
    for a in [&coarse, &fine] {
        assert!(a.report.all_pass(), "{:#?}", a.report.failures().collect::<Vec<_>>());
        let rm = a.report.check("minima").unwrap();
        assert!(rm.lhs < 0.5 - 0.01);
        for name in ["norm_l1", "norm_l2", "pointwise"] {
            assert!(a.report.check(name).unwrap().residual < -0.01, "{name}");
        }
        let res = lemma_residuals(&a.field, a.rearrangement.distribution(), 1.0, &lemma_grid(&a.field, 200)).unwrap();
        assert!(res[50..150].iter().all(|&r| r > 0.1));
    }
    for name in ["norm_l1", "norm_l2", "pointwise", "minima"] {
        let (x, y) = (coarse.report.check(name).unwrap().residual, fine.report.check(name).unwrap().residual);
        assert!((x - y).abs() < 0.2 * y.abs(), "{name}: {x} {y}");
    }
}

#[test]
fn square_distribution_is_strictly_below_phi_on_an_interval() {
    let a = analyze(&DomainSpec::rectangle(1.0, 1.0).scaled_to_area(PI), 1.0, 0.04, &settings()).unwrap();
    assert!(a.report.all_pass());
    let mu = a.rearrangement.distribution();
    let strict = (0..200)
        .map(|i| 0.45 + 0.3 * i as f64 / 199.0)
        .filter(|&t| mu.eval(t) < a.reference.phi(t) - 1e-3)
        .count();
    assert!(strict > 50, "{strict}");
    assert_eq!(mu.eval(a.reference.v_max()), 0.0);
    assert_abs_diff_eq!(a.reference.phi(a.reference.v_max()), 0.0, epsilon = 1e-12);
    assert!(a.report.check("norm_l1").unwrap().lhs < 5.0 * PI / 8.0);
}

#[test]
fn full_measure_below_the_minimum() {
    let a = ellipse(0.05);
    let rec = a.report.check("full_measure").unwrap();
    assert!(rec.pass && rec.residual == 0.0);
    assert_eq!(a.rearrangement.distribution().eval(a.field.extrema().0 - 1e-9), a.field.mesh().area());
}

#[test]
fn checks_flag_violations() {
    // a field pushed above the reference must fail the one-sided checks
    let a = disk_fine();
    let lifted = ScalarField::new(a.field.mesh().clone(), a.field.values().iter().map(|v| v + 0.01).collect()).unwrap();
    let out = analyze_field(lifted, 1.0, "disk:1", &settings()).unwrap();
    for name in ["pointwise", "minima", "norm_l1", "distribution", "flux"] {
        assert!(!out.report.check(name).unwrap().pass, "{name}");
    }
    let r = RadialReference::new(PI, 1.0).unwrap();
    let u = decreasing_rearrangement(&r.interpolate(a.field.mesh().clone(), [0.0, 0.0]));
    assert!(pointwise_comparison(&u, &r, 1000, 0.0).unwrap().residual.abs() < 1e-3);
    assert!(norm_comparison(&a.field, &r, 3, 0.0).is_err());
}

#[test]
fn report_serialization() {
    let a = ellipse(0.1);
    let json = a.report.to_json();
    let back = ComparisonReport::from_json(&json).unwrap();
    assert_eq!(back, a.report);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["domain", "beta", "h", "area"] {
        assert!(v["meta"].get(key).is_some(), "{key}");
    }
    for key in ["name", "anchor", "lhs", "rhs", "residual", "tol", "pass"] {
        assert!(v["checks"][0].get(key).is_some(), "{key}");
    }
    let csv = a.report.to_csv();
    assert!(csv.starts_with("name,anchor,lhs,rhs,residual,tol,pass\n"));
    assert_eq!(csv.lines().count(), a.report.checks.len() + 1);
}

#[test]
fn tolerance_model_is_linear_in_h() {
    let t = Tolerances::default();
    assert_abs_diff_eq!(t.eps(0.02), 2.0 * t.eps(0.01), epsilon = 1e-18);
    assert_abs_diff_eq!(t.with_scale(3.0).eps(0.01), 3.0 * t.eps(0.01), epsilon = 1e-18);
}

#[test]
fn rigidity_probe_on_ellipses() {
    let family: Vec<_> = [1.5, 1.0, 1.25, 1.1].iter().map(|&a| DomainSpec::ellipse(a, 1.0)).collect();
    let table = rigidity_probe(&family, 1.0, 0.04, &settings()).unwrap();
    assert!(table.all_pass(), "{:#?}", table.checks);
    assert!(table.rows.windows(2).all(|w| w[0].asymmetry < w[1].asymmetry));
    assert!(table.rows.iter().all(|r| r.deficit >= 0.0 && (r.domain.area() - PI).abs() < 1e-12));
    assert!(table.rows[0].is_round());
    let csv = table.to_csv();
    assert!(csv.starts_with("asymmetry,deficit,min_gap,u_m,v_m,u_M,v_M\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn rigidity_probe_rejects_an_empty_family() {
    assert!(matches!(rigidity_probe(&[], 1.0, 0.1, &settings()), Err(Error::InvalidParameter { .. })));
}
