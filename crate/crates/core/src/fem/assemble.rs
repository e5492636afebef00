use std::sync::Arc;

use super::element::{local_robin, local_stiffness};
use super::sparse::CsrMatrix;
use crate::geometry::TriangleMesh;
use crate::{Error, Result};

/// Discrete Robin torsion system `(K + β M_∂) u = f` with `f_i = ∫ φ_i`.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub mesh: Arc<TriangleMesh>,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub beta: f64,
}

pub fn stiffness_matrix(mesh: &TriangleMesh) -> CsrMatrix {
    let mut t = Vec::with_capacity(9 * mesh.num_triangles());
    for (k, tri) in mesh.triangles().iter().enumerate() {
        let local = local_stiffness(&mesh.triangle_points(k));
        for i in 0..3 {
            for j in 0..3 {
                t.push((tri[i], tri[j], local[i][j]));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.num_vertices(), &t)
}

/// Consistent boundary mass matrix scaled by `beta`.
pub fn robin_matrix(mesh: &TriangleMesh, beta: f64) -> CsrMatrix {
    let mut t = Vec::with_capacity(4 * mesh.boundary_edges().len());
    for e in mesh.boundary_edges() {
        let local = local_robin(mesh.edge_length(e), beta);
        for i in 0..2 {
            for j in 0..2 {
                t.push((e.vertices[i], e.vertices[j], local[i][j]));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.num_vertices(), &t)
}

pub fn load_vector(mesh: &TriangleMesh) -> Vec<f64> {
    let mut f = vec![0.0; mesh.num_vertices()];
    for (k, tri) in mesh.triangles().iter().enumerate() {
        let third = mesh.triangle_area(k) / 3.0;
        for &i in tri {
            f[i] += third;
        }
    }
    f
}

pub fn assemble_robin_system(mesh: Arc<TriangleMesh>, beta: f64) -> Result<SparseSystem> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("Robin parameter must be positive, got {beta}"),
        });
    }
    let matrix = stiffness_matrix(&mesh).add(&robin_matrix(&mesh, beta));
    let rhs = load_vector(&mesh);
    Ok(SparseSystem {
        mesh,
        matrix,
        rhs,
        beta,
    })
}
