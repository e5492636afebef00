use std::f64::consts::PI;

use super::radial::RadialReference;
use super::report::CheckRecord;
use crate::fem::ScalarField;
use crate::rearrange::{exterior_reciprocal_integral, weighted_boundary_moment, DistributionProfile, RearrangementProfile};
use crate::{Error, Result};

/// Discretization tolerances `ε(h) = C·h·scale` for one-sided checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Constant for value comparisons (u*, u_m, norms, μ).
    pub value_c: f64,
    /// Constant for the level-set derivative identity, in units of 4π.
    pub lemma_c: f64,
    /// Relative tolerance of the discrete flux identity.
    pub flux_rel: f64,
    /// Relative tolerance of the weighted boundary identity.
    pub moment_rel: f64,
    /// Circle-fit rms and centre spread on round domains.
    pub circle: f64,
    /// User multiplier applied to the `ε(h)` tolerances.
    pub scale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            value_c: 0.05,
            lemma_c: 2.0,
            flux_rel: 1e-9,
            moment_rel: 1e-3,
            circle: 1e-3,
            scale: 1.0,
        }
    }
}

impl Tolerances {
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn eps(&self, h: f64) -> f64 {
        self.value_c * h * self.scale
    }

    pub fn lemma_eps(&self, h: f64) -> f64 {
        self.lemma_c * 4.0 * PI * h * self.scale
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// Largest `u*(s) − v*(s)` over an `n`-point grid of `[0, |Ω_h|]`.
pub fn pointwise_comparison(u: &RearrangementProfile, reference: &RadialReference, n: usize, tol: f64) -> Result<CheckRecord> {
    let area = u.total_measure().min(reference.area());
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
    for s in grid(0.0, area, n) {
        let (a, b) = (u.eval(s)?, reference.vstar(s)?);
        if a - b > worst.0 {
            worst = (a - b, a, b);
        }
    }
    Ok(CheckRecord::new("pointwise", "u*(s) <= v*(s) on [0,|Omega|]", worst.1, worst.2, worst.0, tol))
}

/// `‖u‖_p ≤ ‖v‖_p` for `p ∈ {1, 2}`.
pub fn norm_comparison(u: &ScalarField, reference: &RadialReference, p: u32, tol: f64) -> Result<CheckRecord> {
    let (a, b) = (u.lp_norm(p)?, reference.lp_norm(p)?);
    Ok(CheckRecord::new(format!("norm_l{p}"), format!("||u||_{p} <= ||v||_{p}"), a, b, a - b, tol))
}

/// `u_m ≤ v_m`.
pub fn minima_comparison(u: &ScalarField, reference: &RadialReference, tol: f64) -> CheckRecord {
    let um = u.extrema().0;
    let vm = reference.v_min();
    CheckRecord::new("minima", "u_m <= v_m", um, vm, um - vm, tol)
}

/// `μ(t) = |Ω_h|` for every `t < u_m`, checked on `n` levels below `u_m`.
pub fn full_measure_check(mu: &DistributionProfile, n: usize) -> CheckRecord {
    let um = mu.min_value();
    let total = mu.total_measure();
    let worst = grid(0.0, um, n + 1)
        .take(n)
        .map(|t| (mu.eval(t) - total).abs())
        .fold(0.0, f64::max);
    CheckRecord::new("full_measure", "mu(t) = |Omega| for t < u_m", total - worst, total, worst, 1e-12 * total)
}

/// Largest `μ(t) − φ(t)` over `n` levels spanning both value ranges.
pub fn distribution_comparison(mu: &DistributionProfile, reference: &RadialReference, n: usize, tol: f64) -> CheckRecord {
    let lo = mu.min_value().min(reference.v_min());
    let hi = mu.max_value().max(reference.v_max());
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
    for t in grid(lo, hi, n) {
        let (a, b) = (mu.eval(t), reference.phi(t));
        if a - b > worst.0 {
            worst = (a - b, a, b);
        }
    }
    CheckRecord::new("distribution", "mu(t) <= phi(t)", worst.1, worst.2, worst.0, tol)
}

/// `n` uniformly spaced levels strictly inside `(u_m + δ, u_M − δ)`,
/// `δ = 10⁻³(u_M − u_m)`.
pub fn lemma_grid(u: &ScalarField, n: usize) -> Vec<f64> {
    let (lo, hi) = u.extrema();
    let d = 1e-3 * (hi - lo);
    let (a, b) = (lo + d, hi - d);
    (1..=n).map(|i| a + (b - a) * i as f64 / (n + 1) as f64).collect()
}

/// `r(t) = −μ′(t) + (1/β)∫_{∂U_t^ext} 1/u − 4π` on a level grid.
/// `μ′` is a central difference with step `10⁻³(u_M − u_m)`.
pub fn lemma_residuals(u: &ScalarField, mu: &DistributionProfile, beta: f64, levels: &[f64]) -> Result<Vec<f64>> {
    let (lo, hi) = u.extrema();
    let d = 1e-3 * (hi - lo);
    levels
        .iter()
        .map(|&t| {
            if !(t - d > lo && t + d < hi) {
                return Err(Error::OutOfRange {
                    what: "level",
                    value: t,
                    lo: lo + d,
                    hi: hi - d,
                });
            }
            let dmu = (mu.eval(t + d) - mu.eval(t - d)) / (2.0 * d);
            Ok(-dmu + exterior_reciprocal_integral(u, t)? / beta - 4.0 * PI)
        })
        .collect()
}

/// One-sided record of `min r(t) ≥ −tol`.
pub fn lemma_check(residuals: &[f64], tol: f64) -> CheckRecord {
    let min = residuals.iter().copied().fold(f64::INFINITY, f64::min);
    CheckRecord::new(
        "level_set_identity",
        "-mu'(t) + (1/beta) int_{dU_t ext} 1/u >= 4 pi",
        min + 4.0 * PI,
        4.0 * PI,
        -min,
        tol,
    )
}

/// `β ∮ u = |Ω_h|`, exact for the discrete solution.
pub fn flux_check(u: &ScalarField, beta: f64, rel_tol: f64) -> CheckRecord {
    let area = u.mesh().area();
    let lhs = beta * u.boundary_integral();
    CheckRecord::new("flux", "beta int_dOmega u = |Omega|", lhs, area, (lhs - area).abs(), rel_tol * area)
}

/// `∫ t (∫_{∂U_t^ext} 1/u) dt = |Ω_h|/(2β)`, relative.
pub fn boundary_moment_check(u: &ScalarField, beta: f64, rel_tol: f64) -> Result<CheckRecord> {
    let lhs = weighted_boundary_moment(u)?;
    let rhs = u.mesh().area() / (2.0 * beta);
    Ok(CheckRecord::new(
        "boundary_moment",
        "int_0^{u_M} t int_{dU_t ext} 1/u dt = |Omega|/(2 beta)",
        lhs,
        rhs,
        (lhs - rhs).abs() / rhs,
        rel_tol,
    ))
}
