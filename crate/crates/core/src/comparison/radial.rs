use std::f64::consts::PI;
use std::sync::Arc;

use crate::fem::ScalarField;
use crate::geometry::TriangleMesh;
use crate::{Error, Point, Result};

/// Closed-form torsion function of the disk of area `area` centred at the
/// origin: `v(x) = (A − π|x|²)/(4π) + A^{1/2}/(2√π β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialReference {
    area: f64,
    beta: f64,
}

impl RadialReference {
    pub fn new(area: f64, beta: f64) -> Result<Self> {
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "area",
                reason: format!("must be positive, got {area}"),
            });
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: format!("must be positive, got {beta}"),
            });
        }
        Ok(RadialReference { area, beta })
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn radius(&self) -> f64 {
        (self.area / PI).sqrt()
    }

    /// Boundary value `R/(2β)`.
    pub fn v_min(&self) -> f64 {
        self.radius() / (2.0 * self.beta)
    }

    /// Central value `v_min + A/(4π)`.
    pub fn v_max(&self) -> f64 {
        self.v_min() + self.area / (4.0 * PI)
    }

    pub fn radial_value(&self, r: f64) -> Result<f64> {
        let big_r = self.radius();
        if !(0.0..=big_r).contains(&r) {
            return Err(Error::OutOfRange {
                what: "radius",
                value: r,
                lo: 0.0,
                hi: big_r,
            });
        }
        Ok((self.area - PI * r * r) / (4.0 * PI) + self.v_min())
    }

    /// Decreasing rearrangement `v*(s) = (A − s)/(4π) + v_min`.
    pub fn vstar(&self, s: f64) -> Result<f64> {
        if !(0.0..=self.area).contains(&s) {
            return Err(Error::OutOfRange {
                what: "s",
                value: s,
                lo: 0.0,
                hi: self.area,
            });
        }
        Ok((self.area - s) / (4.0 * PI) + self.v_min())
    }

    /// Distribution function `φ(t) = |{v > t}|`.
    pub fn phi(&self, t: f64) -> f64 {
        (self.area - 4.0 * PI * (t - self.v_min())).clamp(0.0, self.area)
    }

    /// ‖v‖_p over the disk for `p ∈ {1, 2}`.
    pub fn lp_norm(&self, p: u32) -> Result<f64> {
        let (a, m) = (self.area, self.v_min());
        match p {
            1 => Ok(a * m + a * a / (8.0 * PI)),
            2 => Ok((m * m * a + m * a * a / (4.0 * PI) + a.powi(3) / (48.0 * PI * PI)).sqrt()),
            _ => Err(Error::InvalidParameter {
                name: "p",
                reason: format!("only p = 1 and p = 2 are supported, got {p}"),
            }),
        }
    }

    /// Nodal interpolant of `v(· − center)` on `mesh`. Points outside the
    /// disk get the formula value continued past the radius.
    pub fn interpolate(&self, mesh: Arc<TriangleMesh>, center: Point) -> ScalarField {
        let (a, m) = (self.area, self.v_min());
        ScalarField::from_fn(mesh, |p| {
            let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
            (a - PI * (dx * dx + dy * dy)) / (4.0 * PI) + m
        })
    }

    /// ∫ over `∂V_t ∩ ∂Ω♯` of `1/v`: the full circle below `v_min`, else 0.
    pub fn reciprocal_boundary_integral(&self, t: f64) -> f64 {
        if t < self.v_min() {
            2.0 * PI * self.radius() / self.v_min()
        } else {
            0.0
        }
    }

    /// ∫₀^{v_max} t·(∫_{∂V_t^ext} 1/v) dt, which equals `A/(2β)`.
    pub fn boundary_moment(&self) -> f64 {
        let m = self.v_min();
        0.5 * m * m * self.reciprocal_boundary_integral(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_disk_values() {
        let r = RadialReference::new(PI, 1.0).unwrap();
        assert!((r.radial_value(0.0).unwrap() - 0.75).abs() < 1e-15);
        assert!((r.radial_value(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((r.lp_norm(1).unwrap() - 5.0 * PI / 8.0).abs() < 1e-14);
        assert!((r.boundary_moment() - PI / 2.0).abs() < 1e-14);
        assert!(r.radial_value(1.0 + 1e-9).is_err());
        assert!(r.vstar(-1e-12).is_err());
        assert!(r.lp_norm(3).is_err());
        assert!(RadialReference::new(PI, 0.0).is_err());
    }
}
