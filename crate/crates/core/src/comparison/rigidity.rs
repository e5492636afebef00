use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use super::analysis::AnalysisSettings;
use super::radial::RadialReference;
use super::report::CheckRecord;
use crate::fem::solve_torsion;
use crate::geometry::{build_mesh, DomainSpec};
use crate::rearrange::{center_spread, circle_fit, decreasing_rearrangement, level_set_geometry, CircleFit};
use crate::{Error, Result};

/// Fractions of `(u_m, u_M)` at which level sets are fitted with circles.
pub const FIT_LEVELS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Asymmetry below which a member counts as a disk.
const ROUND: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct RigidityRow {
    /// Family member rescaled to area π.
    pub domain: DomainSpec,
    pub asymmetry: f64,
    /// `max(0, max_s (v*(s) − u*(s)))`.
    pub deficit: f64,
    /// `max(v_m − u_m, min over interior s of (v* − u*))`.
    pub min_gap: f64,
    pub u_min: f64,
    pub v_min: f64,
    pub u_max: f64,
    pub v_max: f64,
    pub h: f64,
    pub circle_fits: Vec<CircleFit>,
}

impl RigidityRow {
    pub fn is_round(&self) -> bool {
        self.asymmetry <= ROUND
    }
}

#[derive(Debug, Clone)]
pub struct RigidityTable {
    /// Sorted by asymmetry.
    pub rows: Vec<RigidityRow>,
    pub checks: Vec<CheckRecord>,
}

impl RigidityTable {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// CSV with header `asymmetry,deficit,min_gap,u_m,v_m,u_M,v_M`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("asymmetry,deficit,min_gap,u_m,v_m,u_M,v_M\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.asymmetry, r.deficit, r.min_gap, r.u_min, r.v_min, r.u_max, r.v_max
            );
        }
        s
    }
}

fn probe_member(spec: &DomainSpec, beta: f64, h: f64, settings: &AnalysisSettings) -> Result<RigidityRow> {
    let domain = spec.scaled_to_area(PI);
    let mesh = Arc::new(build_mesh(&domain, h)?);
    let u = solve_torsion(mesh.clone(), beta, &settings.solve)?;
    let reference = RadialReference::new(mesh.area(), beta)?;
    let ustar = decreasing_rearrangement(&u);
    let area = ustar.total_measure().min(reference.area());
    let n = settings.s_points.max(3);
    let mut deficit = 0.0f64;
    let mut interior_gap = f64::INFINITY;
    for i in 0..n {
        let s = if i + 1 == n { area } else { area * i as f64 / (n - 1) as f64 };
        let gap = reference.vstar(s)? - ustar.eval(s)?;
        deficit = deficit.max(gap);
        if i > 0 && i + 1 < n {
            interior_gap = interior_gap.min(gap);
        }
    }
    let (u_min, u_max) = u.extrema();
    let circle_fits = FIT_LEVELS
        .iter()
        .map(|f| circle_fit(&level_set_geometry(&u, u_min + f * (u_max - u_min))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(RigidityRow {
        asymmetry: domain.asymmetry(),
        deficit,
        min_gap: (reference.v_min() - u_min).max(interior_gap),
        u_min,
        v_min: reference.v_min(),
        u_max,
        v_max: reference.v_max(),
        h: mesh.h(),
        circle_fits,
        domain,
    })
}

fn strict(mut c: CheckRecord) -> CheckRecord {
    c.pass = c.residual < c.tol;
    c
}

/// Solve every member (rescaled to area π) concurrently and tabulate how far
/// each is from the equality case.
pub fn rigidity_probe(family: &[DomainSpec], beta: f64, h: f64, settings: &AnalysisSettings) -> Result<RigidityTable> {
    if family.is_empty() {
        return Err(Error::InvalidParameter {
            name: "family",
            reason: "at least one domain is required".into(),
        });
    }
    let mut rows = family
        .par_iter()
        .map(|spec| probe_member(spec, beta, h, settings))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.asymmetry.total_cmp(&b.asymmetry));

    let tol = &settings.tolerances;
    let mut checks = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let eps = tol.eps(r.h);
        if r.is_round() {
            checks.push(CheckRecord::new(
                format!("round_deficit[{i}]"),
                "v*(s) - u*(s) vanishes on the disk",
                r.deficit,
                0.0,
                r.deficit,
                eps,
            ));
            let rms = r.circle_fits.iter().map(|f| f.rms_residual).fold(0.0, f64::max);
            checks.push(CheckRecord::new(
                format!("round_level_sets[{i}]"),
                "every level set {u > t} is a disk",
                rms,
                0.0,
                rms,
                tol.circle,
            ));
            let spread = center_spread(&r.circle_fits);
            checks.push(CheckRecord::new(
                format!("concentric_level_sets[{i}]"),
                "level sets are concentric disks",
                spread,
                0.0,
                spread,
                tol.circle,
            ));
        } else {
            // at least one extremum comparison is strict
            let gap = (r.u_min - r.v_min).min(r.u_max - r.v_max);
            checks.push(strict(CheckRecord::new(
                format!("extremum_gap[{i}]"),
                "not (u_m = v_m and u_M = v_M) off the disk",
                gap,
                -eps,
                gap + eps,
                0.0,
            )));
        }
    }
    if rows.len() > 1 {
        let worst = rows
            .windows(2)
            .map(|w| w[0].deficit - w[1].deficit)
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(strict(CheckRecord::new(
            "deficit_increasing",
            "deficit increases with asymmetry",
            worst,
            0.0,
            worst,
            0.0,
        )));
    }
    Ok(RigidityTable { rows, checks })
}
