use super::level_set::LevelSetGeometry;
use crate::{Error, Point, Result};

/// Least-squares circle through a level-set contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub center: Point,
    pub radius: f64,
    /// Root-mean-square of `|x − c| − r` over the points, divided by `r`.
    pub rms_residual: f64,
}

/// Algebraic (Kåsa) fit of all contour points of the level set.
pub fn circle_fit(geometry: &LevelSetGeometry) -> Result<CircleFit> {
    let pts: Vec<Point> = geometry.contour_points().collect();
    fit_points(&pts)
}

/// Algebraic circle fit: minimizes Σ (|x − c|² − r²)² over `c`, `r`.
pub fn fit_points(pts: &[Point]) -> Result<CircleFit> {
    if pts.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} points, need at least 3", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    // centred moments keep the normal equations well conditioned
    let (mut suu, mut suv, mut svv, mut suuu, mut svvv, mut suvv, mut svuu) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for p in pts {
        let (u, v) = (p[0] - mx, p[1] - my);
        suu += u * u;
        suv += u * v;
        svv += v * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    let det = suu * svv - suv * suv;
    let scale = (suu + svv).powi(2);
    if scale == 0.0 || det.abs() <= 1e-12 * scale {
        return Err(Error::DegenerateFit("contour points are collinear".into()));
    }
    let r1 = 0.5 * (suuu + suvv);
    let r2 = 0.5 * (svvv + svuu);
    let uc = (r1 * svv - r2 * suv) / det;
    let vc = (suu * r2 - suv * r1) / det;
    let radius = (uc * uc + vc * vc + (suu + svv) / n).sqrt();
    let center = [uc + mx, vc + my];
    let ss: f64 = pts
        .iter()
        .map(|p| {
            let d = (p[0] - center[0]).hypot(p[1] - center[1]) - radius;
            d * d
        })
        .sum();
    Ok(CircleFit {
        center,
        radius,
        rms_residual: (ss / n).sqrt() / radius,
    })
}

/// Largest distance between any two centres.
pub fn center_spread(fits: &[CircleFit]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in fits.iter().enumerate() {
        for b in &fits[i + 1..] {
            best = best.max((a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1]));
        }
    }
    best
}
