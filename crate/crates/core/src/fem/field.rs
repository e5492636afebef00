use std::sync::Arc;

use super::element::{clip_above, gradient, polygon_integral};
use crate::geometry::TriangleMesh;
use crate::{Error, Point, Result};

/// Continuous piecewise-linear function given by its vertex values.
#[derive(Debug, Clone)]
pub struct ScalarField {
    mesh: Arc<TriangleMesh>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: Arc<TriangleMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: format!(
                    "{} values for a mesh with {} vertices",
                    values.len(),
                    mesh.num_vertices()
                ),
            });
        }
        Ok(ScalarField { mesh, values })
    }

    /// Nodal interpolant of `f`.
    pub fn from_fn(mesh: Arc<TriangleMesh>, f: impl Fn(Point) -> f64) -> Self {
        let values = mesh.vertices().iter().map(|&p| f(p)).collect();
        ScalarField { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<TriangleMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn triangle_values(&self, k: usize) -> [f64; 3] {
        let t = self.mesh.triangles()[k];
        [self.values[t[0]], self.values[t[1]], self.values[t[2]]]
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        ScalarField {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `(min, max)` over vertex values; the extrema of the interpolant.
    pub fn extrema(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn triangle_gradient(&self, k: usize) -> [f64; 2] {
        gradient(&self.mesh.triangle_points(k), self.triangle_values(k))
    }

    /// ∫_Ω u.
    pub fn integral(&self) -> f64 {
        (0..self.mesh.num_triangles())
            .map(|k| {
                let v = self.triangle_values(k);
                self.mesh.triangle_area(k) * (v[0] + v[1] + v[2]) / 3.0
            })
            .sum()
    }

    /// ∫_Ω |u|, splitting triangles along the zero line.
    pub fn integral_abs(&self) -> f64 {
        (0..self.mesh.num_triangles())
            .map(|k| {
                let p = self.mesh.triangle_points(k);
                let v = self.triangle_values(k);
                if v.iter().all(|&x| x >= 0.0) {
                    return self.mesh.triangle_area(k) * (v[0] + v[1] + v[2]) / 3.0;
                }
                let pos = polygon_integral(&clip_above(&p, v, 0.0)).1;
                let neg = polygon_integral(&clip_above(&p, [-v[0], -v[1], -v[2]], 0.0)).1;
                pos + neg
            })
            .sum()
    }

    /// ∫_Ω u².
    pub fn integral_sq(&self) -> f64 {
        (0..self.mesh.num_triangles())
            .map(|k| {
                let [a, b, c] = self.triangle_values(k);
                self.mesh.triangle_area(k) / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a)
            })
            .sum()
    }

    /// ‖u‖_{L^p(Ω)} for p ∈ {1, 2}.
    pub fn lp_norm(&self, p: u32) -> Result<f64> {
        match p {
            1 => Ok(self.integral_abs()),
            2 => Ok(self.integral_sq().sqrt()),
            _ => Err(Error::InvalidParameter {
                name: "p",
                reason: format!("only p = 1 and p = 2 are supported, got {p}"),
            }),
        }
    }

    /// ∫_Ω |∇u|².
    pub fn dirichlet_energy(&self) -> f64 {
        (0..self.mesh.num_triangles())
            .map(|k| {
                let g = self.triangle_gradient(k);
                self.mesh.triangle_area(k) * (g[0] * g[0] + g[1] * g[1])
            })
            .sum()
    }

    /// ∮_∂Ω u dH¹.
    pub fn boundary_integral(&self) -> f64 {
        self.mesh
            .boundary_edges()
            .iter()
            .map(|e| {
                let (a, b) = (self.values[e.vertices[0]], self.values[e.vertices[1]]);
                0.5 * self.mesh.edge_length(e) * (a + b)
            })
            .sum()
    }

    /// ∮_∂Ω u² dH¹.
    pub fn boundary_integral_sq(&self) -> f64 {
        self.mesh
            .boundary_edges()
            .iter()
            .map(|e| {
                let (a, b) = (self.values[e.vertices[0]], self.values[e.vertices[1]]);
                self.mesh.edge_length(e) * (a * a + a * b + b * b) / 3.0
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, DomainSpec};

    #[test]
    fn constant_field_integrals() {
        let mesh = Arc::new(build_mesh(&DomainSpec::rectangle(2.0, 1.0), 0.3).unwrap());
        let f = ScalarField::from_fn(mesh, |_| 1.5);
        assert!((f.integral() - 3.0).abs() < 1e-13);
        assert!((f.lp_norm(2).unwrap() - (4.5f64).sqrt()).abs() < 1e-13);
        assert!((f.boundary_integral() - 9.0).abs() < 1e-13);
        assert_eq!(f.extrema(), (1.5, 1.5));
        assert!(f.lp_norm(3).is_err());
    }

    #[test]
    fn sign_changing_abs_integral() {
        // |x| over [-1,1]x[0,1] centered rectangle equals 1
        let mesh = Arc::new(build_mesh(&DomainSpec::rectangle(2.0, 1.0), 0.27).unwrap());
        let f = ScalarField::from_fn(mesh, |p| p[0]);
        assert!((f.integral_abs() - 1.0).abs() < 1e-12);
        assert!(f.integral().abs() < 1e-12);
    }

    #[test]
    fn wrong_length_rejected() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0), 0.5).unwrap());
        assert!(ScalarField::new(mesh, vec![0.0; 2]).is_err());
    }
}
