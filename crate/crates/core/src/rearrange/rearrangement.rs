use std::fmt::Write as _;

use super::distribution::DistributionProfile;
use crate::fem::ScalarField;
use crate::{Error, Point, Result};

/// Decreasing rearrangement `u*(s) = sup{t : μ(t) > s}` on `[0, |Ω_h|]`.
#[derive(Debug, Clone)]
pub struct RearrangementProfile {
    mu: DistributionProfile,
}

/// Builds the decreasing rearrangement of a field.
pub fn decreasing_rearrangement(field: &ScalarField) -> RearrangementProfile {
    RearrangementProfile::new(DistributionProfile::new(field))
}

impl RearrangementProfile {
    pub fn new(mu: DistributionProfile) -> Self {
        RearrangementProfile { mu }
    }

    pub fn distribution(&self) -> &DistributionProfile {
        &self.mu
    }

    pub fn total_measure(&self) -> f64 {
        self.mu.total_measure()
    }

    /// u*(s). At `s = |Ω_h|` the limit value, the field minimum, is returned.
    pub fn eval(&self, s: f64) -> Result<f64> {
        let total = self.total_measure();
        if !(0.0..=total).contains(&s) {
            return Err(Error::OutOfRange {
                what: "s",
                value: s,
                lo: 0.0,
                hi: total,
            });
        }
        let bp = self.mu.breakpoints();
        if s >= total {
            return Ok(bp[0]);
        }
        // first breakpoint whose value no longer exceeds s
        let (mut k, mut hi) = (0, bp.len());
        while k < hi {
            let mid = (k + hi) / 2;
            if self.mu.at_breakpoint(mid) > s {
                k = mid + 1;
            } else {
                hi = mid;
            }
        }
        if k == 0 {
            return Ok(bp[0]);
        }
        if self.mu.left_limit(k) > s {
            // plateau at t_k: μ jumps across s
            return Ok(bp[k]);
        }
        // the crossing lies inside piece k-1, where μ decreases through s
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if self.mu.piece_at(k - 1, mid) > s {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON {
                break;
            }
        }
        let w = bp[k] - bp[k - 1];
        Ok(bp[k - 1] + 0.5 * (lo + hi) * w)
    }

    /// |{s ∈ (0, |Ω_h|) : u*(s) > t}|, found by bisection on `s`.
    pub fn measure_above(&self, t: f64) -> f64 {
        let total = self.total_measure();
        let above = |s: f64| self.eval(s).map(|v| v > t).unwrap_or(false);
        if !above(0.0) {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, total);
        if above(total) {
            return total;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if above(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// ‖u*‖_p on `[0, |Ω_h|]` for `p ∈ {1, 2}`, via ∫ t^p d(−μ).
    pub fn lp_norm(&self, p: u32) -> Result<f64> {
        if p != 1 && p != 2 {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: format!("only p = 1 and p = 2 are supported, got {p}"),
            });
        }
        let bp = self.mu.breakpoints();
        let pw = |t: f64| t.abs().powi(p as i32);
        let mut sum = 0.0;
        for (k, &t) in bp.iter().enumerate() {
            sum += pw(t) * (self.mu.left_limit(k) - self.mu.at_breakpoint(k));
        }
        // two-point Gauss rule is exact for the cubic integrand
        let g = 0.5 / 3f64.sqrt();
        for k in 0..self.mu.num_pieces() {
            let [_, c1, c2] = self.mu.piece(k);
            let w = bp[k + 1] - bp[k];
            for x in [0.5 - g, 0.5 + g] {
                let dmu = -(c1 + 2.0 * c2 * x);
                sum += 0.5 * dmu * pw(bp[k] + x * w);
            }
        }
        Ok(if p == 1 { sum } else { sum.sqrt() })
    }

    /// Samples on a uniform grid of `n ≥ 2` points over `[0, |Ω_h|]`.
    pub fn sample(&self, n: usize) -> Vec<(f64, f64)> {
        let total = self.total_measure();
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let s = if i + 1 == n { total } else { total * i as f64 / (n - 1) as f64 };
                (s, self.eval(s).expect("grid inside range"))
            })
            .collect()
    }

    /// CSV with header `s,u_star`, one row per breakpoint of μ.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,u_star\n");
        let bp = self.mu.breakpoints();
        for k in (0..bp.len()).rev() {
            let _ = writeln!(out, "{:.16e},{:.16e}", self.mu.at_breakpoint(k), bp[k]);
        }
        let _ = writeln!(out, "{:.16e},{:.16e}", self.total_measure(), bp[0]);
        out
    }
}

/// u♯(x) = u*(π|x|²) on the disk of area |Ω_h| centred at the origin.
pub fn schwartz_value(profile: &RearrangementProfile, x: Point) -> Result<f64> {
    let s = std::f64::consts::PI * (x[0] * x[0] + x[1] * x[1]);
    if s > profile.total_measure() {
        return Err(Error::OutOfRange {
            what: "π|x|²",
            value: s,
            lo: 0.0,
            hi: profile.total_measure(),
        });
    }
    profile.eval(s)
}
