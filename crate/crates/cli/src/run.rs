use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use robin_lab::comparison::{
    analyze_field, flux_check, rigidity_probe, AnalysisSettings, CheckRecord, ComparisonReport, RadialReference,
    ReportMeta, Tolerances,
};
use robin_lab::comparison::{lemma_grid, lemma_residuals};
use robin_lab::fem::{
    field_to_string, rayleigh_quotient, solve_torsion, torsional_rigidity, FieldManifest, ScalarField, SolveOptions,
};
use robin_lab::geometry::{build_mesh, mesh_to_string, Shape, TriangleMesh};
use sha2::{Digest, Sha256};

use crate::config::{Experiment, ExperimentConfig};
use crate::CliError;

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ComparisonReport,
    /// Artifact file names relative to the output directory, manifest last.
    pub artifacts: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.report.all_pass()
    }
}

/// Files produced by a pipeline; written together at the end.
#[derive(Default)]
struct Artifacts(Vec<(String, String)>);

impl Artifacts {
    fn add(&mut self, name: &str, contents: String) {
        self.0.push((name.to_string(), contents));
    }

    fn write(mut self, dir: &Path, config_hash: &str) -> Result<Vec<String>, CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut manifest = format!("config_hash = {config_hash}\n");
        for (name, contents) in &self.0 {
            let digest: String = Sha256::digest(contents.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
            let _ = writeln!(manifest, "artifact = {name} sha256:{digest}");
        }
        self.add("manifest.txt", manifest);
        for (name, contents) in &self.0 {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(io(&path))?;
        }
        Ok(self.0.into_iter().map(|(n, _)| n).collect())
    }
}

fn settings(cfg: &ExperimentConfig) -> AnalysisSettings {
    AnalysisSettings {
        tolerances: Tolerances::default().with_scale(cfg.tol_scale),
        s_points: cfg.s_grid,
        t_points: cfg.t_grid,
        solve: SolveOptions::default(),
    }
}

fn solved_field_artifacts(out: &mut Artifacts, field: &ScalarField, beta: f64, tol: f64) {
    out.add("mesh.txt", mesh_to_string(field.mesh()));
    out.add("field.txt", field_to_string(field));
    let manifest = FieldManifest {
        mesh: "mesh.txt".into(),
        beta,
        tol,
    };
    out.add("field_manifest.txt", manifest.to_text());
}

/// Executes the configured experiment and writes its artifacts.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut out = Artifacts::default();
    let report = match cfg.experiment {
        Experiment::Solve => run_solve(cfg, &mut out)?,
        Experiment::Compare => run_compare(cfg, &mut out)?,
        Experiment::Convergence => run_convergence(cfg, &mut out)?,
        Experiment::RigiditySweep => run_rigidity(cfg, &mut out)?,
    };
    out.add("report.json", report.to_json() + "\n");
    out.add("report.csv", report.to_csv());
    let artifacts = out.write(&cfg.out, &cfg.hash())?;
    Ok(Outcome { report, artifacts })
}

fn domain_of(cfg: &ExperimentConfig) -> &robin_lab::geometry::DomainSpec {
    cfg.domain.as_ref().expect("validated config carries a domain")
}

fn run_solve(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<ComparisonReport, CliError> {
    let spec = domain_of(cfg);
    let opts = SolveOptions::default();
    let mesh = Arc::new(build_mesh(spec, cfg.h)?);
    let field = solve_torsion(mesh.clone(), cfg.beta, &opts)?;
    solved_field_artifacts(out, &field, cfg.beta, opts.tolerance);
    let mut report = ComparisonReport::new(ReportMeta {
        domain: spec.to_string(),
        beta: cfg.beta,
        h: mesh.h(),
        area: mesh.area(),
    });
    report.push(flux_check(&field, cfg.beta, Tolerances::default().flux_rel));
    let t = torsional_rigidity(&field);
    let q = rayleigh_quotient(&field, cfg.beta)?;
    report.push(CheckRecord::new("rayleigh", "T = (int u)^2 / (int |grad u|^2 + beta int u^2)", t, q, (t - q).abs() / t, 1e-8));
    Ok(report)
}

fn run_compare(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<ComparisonReport, CliError> {
    let spec = domain_of(cfg);
    let st = settings(cfg);
    let mesh = Arc::new(build_mesh(spec, cfg.h)?);
    let field = solve_torsion(mesh, cfg.beta, &st.solve)?;
    solved_field_artifacts(out, &field, cfg.beta, st.solve.tolerance);
    let a = analyze_field(field, cfg.beta, &spec.to_string(), &st)?;
    let mu = a.rearrangement.distribution();
    out.add("distribution.csv", mu.to_csv());
    out.add("rearrangement.csv", a.rearrangement.to_csv());

    let mut s_csv = String::from("s,u_star,v_star\n");
    let area = a.rearrangement.total_measure().min(a.reference.area());
    for i in 0..st.s_points {
        let s = if i + 1 == st.s_points { area } else { area * i as f64 / (st.s_points - 1) as f64 };
        let _ = writeln!(s_csv, "{s:.16e},{:.16e},{:.16e}", a.rearrangement.eval(s)?, a.reference.vstar(s)?);
    }
    out.add("profile_s.csv", s_csv);

    let levels = lemma_grid(&a.field, st.t_points);
    let res = lemma_residuals(&a.field, mu, cfg.beta, &levels)?;
    let mut t_csv = String::from("t,mu,phi,level_set_residual\n");
    for (t, r) in levels.iter().zip(&res) {
        let _ = writeln!(t_csv, "{t:.16e},{:.16e},{:.16e},{r:.16e}", mu.eval(*t), a.reference.phi(*t));
    }
    out.add("profile_t.csv", t_csv);
    Ok(a.report)
}

/// Smallest observed order over consecutive levels with positive errors.
fn orders(h: &[f64], err: &[f64]) -> Vec<Option<f64>> {
    (0..h.len())
        .map(|k| {
            (k > 0 && err[k] > 0.0 && err[k - 1] > 0.0 && err[k].is_finite() && err[k - 1].is_finite())
                .then(|| (err[k - 1] / err[k]).ln() / (h[k - 1] / h[k]).ln())
        })
        .collect()
}

fn max_disk_error(field: &ScalarField, reference: &RadialReference, center: [f64; 2]) -> f64 {
    let exact = reference.interpolate(field.mesh().clone(), center);
    field.values().iter().zip(exact.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn run_convergence(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<ComparisonReport, CliError> {
    let spec = domain_of(cfg);
    let opts = SolveOptions::default();
    let is_disk = matches!(spec.shape, Shape::Disk { .. });
    // the closed form on the exact disk, not the discrete area
    let exact = RadialReference::new(spec.area(), cfg.beta)?;
    let mut mesh: TriangleMesh = build_mesh(spec, cfg.h)?;
    let (mut hs, mut errs, mut rig, mut nv) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut last = None;
    for level in 0..=cfg.levels {
        if level > 0 {
            mesh = mesh.refine_uniform()?;
        }
        let m = Arc::new(mesh.clone());
        let u = solve_torsion(m.clone(), cfg.beta, &opts)?;
        let t = torsional_rigidity(&u);
        hs.push(m.h());
        nv.push(m.num_vertices());
        errs.push(if is_disk {
            max_disk_error(&u, &exact, spec.center)
        } else {
            // successive differences of T stand in for the error
            rig.last().map_or(f64::NAN, |prev: &f64| (t - prev).abs())
        });
        rig.push(t);
        last = Some(u);
    }
    let ord = orders(&hs, &errs);
    let mut csv = String::from("level,h,vertices,error,order,rigidity\n");
    for k in 0..hs.len() {
        let fmt_opt = |v: Option<f64>| v.filter(|x| x.is_finite()).map(|x| format!("{x:.16e}")).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{k},{:.16e},{},{},{},{:.16e}",
            hs[k],
            nv[k],
            fmt_opt(Some(errs[k])),
            fmt_opt(ord[k]),
            rig[k]
        );
    }
    out.add("orders.csv", csv);

    let u = last.expect("at least one level");
    let mut report = ComparisonReport::new(ReportMeta {
        domain: spec.to_string(),
        beta: cfg.beta,
        h: *hs.last().unwrap(),
        area: u.mesh().area(),
    });
    report.push(flux_check(&u, cfg.beta, Tolerances::default().flux_rel));
    if is_disk && cfg.levels > 0 {
        let min_order = ord.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        report.push(CheckRecord::new(
            "convergence_order",
            "max |u_h - v| = O(h^p), p >= 1.8",
            min_order,
            1.8,
            1.8 - min_order,
            0.0,
        ));
        let e = *errs.last().unwrap();
        report.push(CheckRecord::new("finest_error", "max |u_h - v| <= 2e-3", e, 2e-3, e - 2e-3, 0.0));
    }
    Ok(report)
}

fn run_rigidity(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<ComparisonReport, CliError> {
    let st = settings(cfg);
    let table = rigidity_probe(&cfg.family, cfg.beta, cfg.h, &st)?;
    out.add("deficit.csv", table.to_csv());
    let mut members = String::from("asymmetry,domain,h,circle_rms_max,center_spread\n");
    for r in &table.rows {
        let rms = r.circle_fits.iter().map(|f| f.rms_residual).fold(0.0, f64::max);
        let spread = robin_lab::rearrange::center_spread(&r.circle_fits);
        let _ = writeln!(members, "{:.16e},{},{:.16e},{rms:.16e},{spread:.16e}", r.asymmetry, r.domain, r.h);
    }
    out.add("members.csv", members);
    let names: Vec<String> = cfg.family.iter().map(|d| d.to_string()).collect();
    let mut report = ComparisonReport::new(ReportMeta {
        domain: names.join(";"),
        beta: cfg.beta,
        h: table.rows.iter().map(|r| r.h).fold(0.0, f64::max),
        area: PI,
    });
    for c in table.checks {
        report.push(c);
    }
    Ok(report)
}
