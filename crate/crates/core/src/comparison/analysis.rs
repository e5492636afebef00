use std::sync::Arc;

use super::checks::*;
use super::radial::RadialReference;
use super::report::{ComparisonReport, ReportMeta};
use crate::fem::{solve_torsion, ScalarField, SolveOptions};
use crate::geometry::{build_mesh, DomainSpec};
use crate::rearrange::{decreasing_rearrangement, RearrangementProfile};
use crate::Result;

/// Grid sizes, tolerances and solver options shared by every pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    pub tolerances: Tolerances,
    pub s_points: usize,
    pub t_points: usize,
    pub solve: SolveOptions,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            tolerances: Tolerances::default(),
            s_points: 1000,
            t_points: 200,
            solve: SolveOptions::default(),
        }
    }
}

/// Solved field together with its rearrangement, reference and report.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub field: ScalarField,
    pub rearrangement: RearrangementProfile,
    pub reference: RadialReference,
    pub report: ComparisonReport,
}

/// Mesh `spec` at `h`, solve, and run every comparison check.
pub fn analyze(spec: &DomainSpec, beta: f64, h: f64, settings: &AnalysisSettings) -> Result<Analysis> {
    let mesh = Arc::new(build_mesh(spec, h)?);
    let field = solve_torsion(mesh, beta, &settings.solve)?;
    analyze_field(field, beta, &spec.to_string(), settings)
}

/// Run every comparison check on an already solved field.
pub fn analyze_field(field: ScalarField, beta: f64, domain: &str, settings: &AnalysisSettings) -> Result<Analysis> {
    let mesh = field.mesh().clone();
    let area = mesh.area();
    let h = mesh.h();
    let tol = &settings.tolerances;
    let eps = tol.eps(h);
    let reference = RadialReference::new(area, beta)?;
    let rearrangement = decreasing_rearrangement(&field);
    let mu = rearrangement.distribution();

    let mut report = ComparisonReport::new(ReportMeta {
        domain: domain.to_string(),
        beta,
        h,
        area,
    });
    report.push(flux_check(&field, beta, tol.flux_rel));
    report.push(pointwise_comparison(&rearrangement, &reference, settings.s_points, eps)?);
    for p in [1, 2] {
        report.push(norm_comparison(&field, &reference, p, eps)?);
    }
    report.push(minima_comparison(&field, &reference, eps));
    report.push(full_measure_check(mu, settings.t_points));
    report.push(distribution_comparison(mu, &reference, settings.t_points, eps));
    let levels = lemma_grid(&field, settings.t_points);
    let residuals = lemma_residuals(&field, mu, beta, &levels)?;
    report.push(lemma_check(&residuals, tol.lemma_eps(h)));
    report.push(boundary_moment_check(&field, beta, tol.moment_rel)?);
    Ok(Analysis {
        field,
        rearrangement,
        reference,
        report,
    })
}
