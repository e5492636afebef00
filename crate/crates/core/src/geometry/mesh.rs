use std::collections::HashMap;

use super::{dist, signed_area, DomainSpec};
use crate::{Error, Point, Result};

/// Boundary edge `from → to`, oriented so the domain lies on its left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub normal: Point,
}

/// Conforming triangulation with counter-clockwise triangles.
///
/// Meshes built from a [`DomainSpec`] remember it, so that uniform refinement
/// can put new boundary vertices back on the true curve.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<BoundaryEdge>,
    h: f64,
    domain: Option<DomainSpec>,
}

impl TriangleMesh {
    /// Builds a mesh from vertices and triangles; triangles given clockwise are
    /// flipped, boundary edges and normals are derived.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        Self::with_domain(vertices, triangles, None)
    }

    pub(crate) fn with_domain(
        vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        domain: Option<DomainSpec>,
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        for (k, t) in triangles.iter_mut().enumerate() {
            if t.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::InvalidMesh(format!("triangle {k} indexes past the vertex list")));
            }
            let a = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if a == 0.0 || !a.is_finite() {
                return Err(Error::InvalidMesh(format!("triangle {k} is degenerate")));
            }
            if a < 0.0 {
                t.swap(1, 2);
            }
        }
        let boundary = derive_boundary(&vertices, &triangles)?;
        let mut mesh = TriangleMesh {
            vertices,
            triangles,
            boundary,
            h: 0.0,
            domain,
        };
        mesh.h = mesh.max_edge_length();
        Ok(mesh)
    }

    /// Assembles a mesh from fully specified parts (used by the file reader).
    pub(crate) fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let mut mesh = TriangleMesh {
            vertices,
            triangles,
            boundary,
            h: 0.0,
            domain: None,
        };
        mesh.h = mesh.max_edge_length();
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    /// Maximum edge length.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn domain(&self) -> Option<&DomainSpec> {
        self.domain.as_ref()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, k: usize) -> [Point; 3] {
        let t = self.triangles[k];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    pub fn triangle_area(&self, k: usize) -> f64 {
        let [a, b, c] = self.triangle_points(k);
        signed_area(a, b, c)
    }

    pub fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        dist(self.vertices[e.vertices[0]], self.vertices[e.vertices[1]])
    }

    /// Flags for vertices lying on the boundary.
    pub fn boundary_vertex_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for e in &self.boundary {
            mask[e.vertices[0]] = true;
            mask[e.vertices[1]] = true;
        }
        mask
    }

    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| {
                (0..3).map(move |i| dist(self.vertices[t[i]], self.vertices[t[(i + 1) % 3]]))
            })
            .fold(0.0, f64::max)
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_degrees(&self) -> f64 {
        let mut worst = 180.0f64;
        for k in 0..self.triangles.len() {
            let p = self.triangle_points(k);
            for i in 0..3 {
                let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let ang = (u[0] * v[1] - u[1] * v[0])
                    .abs()
                    .atan2(u[0] * v[0] + u[1] * v[1]);
                worst = worst.min(ang.to_degrees());
            }
        }
        worst
    }

    /// Checks orientation, boundary-loop closure and outward normals.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (k, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= n) {
                return Err(Error::InvalidMesh(format!("triangle {k} indexes past the vertex list")));
            }
            if self.triangle_area(k) <= 0.0 {
                return Err(Error::InvalidMesh(format!("triangle {k} has non-positive area")));
            }
        }
        let mut owners: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (k, t) in self.triangles.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                owners.entry((a.min(b), a.max(b))).or_default().push(k);
            }
        }
        let mut degree = vec![0i64; n];
        for (idx, e) in self.boundary.iter().enumerate() {
            let [a, b] = e.vertices;
            if a >= n || b >= n {
                return Err(Error::InvalidMesh(format!("boundary edge {idx} indexes past the vertex list")));
            }
            let tri = match owners.get(&(a.min(b), a.max(b))) {
                Some(v) if v.len() == 1 => v[0],
                _ => {
                    return Err(Error::InvalidMesh(format!(
                        "boundary edge {idx} does not belong to exactly one triangle"
                    )))
                }
            };
            degree[a] += 1;
            degree[b] -= 1;
            let p = self.triangle_points(tri);
            let centroid = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
            let (va, vb) = (self.vertices[a], self.vertices[b]);
            let mid = [0.5 * (va[0] + vb[0]), 0.5 * (va[1] + vb[1])];
            let outward = e.normal[0] * (mid[0] - centroid[0]) + e.normal[1] * (mid[1] - centroid[1]);
            let unit = e.normal[0].hypot(e.normal[1]);
            if outward <= 0.0 || (unit - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidMesh(format!("boundary edge {idx} has a bad outward normal")));
            }
        }
        let single = owners.values().filter(|v| v.len() == 1).count();
        if single != self.boundary.len() {
            return Err(Error::InvalidMesh(format!(
                "{single} edges belong to one triangle but {} boundary edges are listed",
                self.boundary.len()
            )));
        }
        if owners.values().any(|v| v.len() > 2) {
            return Err(Error::InvalidMesh("non-manifold edge".into()));
        }
        if degree.iter().any(|&d| d != 0) {
            return Err(Error::InvalidMesh("boundary edges do not form closed loops".into()));
        }
        Ok(())
    }

    /// Sum of triangle areas.
    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|k| self.triangle_area(k)).sum()
    }

    /// Sum of boundary edge lengths.
    pub fn perimeter(&self) -> f64 {
        self.boundary.iter().map(|e| self.edge_length(e)).sum()
    }

    /// Shoelace area of the boundary loops.
    pub fn boundary_shoelace_area(&self) -> f64 {
        self.boundary
            .iter()
            .map(|e| {
                let (a, b) = (self.vertices[e.vertices[0]], self.vertices[e.vertices[1]]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            * 0.5
    }

    /// Splits every triangle into four through its edge midpoints. Boundary
    /// midpoints of curved domains are moved onto the true boundary curve.
    pub fn refine_uniform(&self) -> Result<TriangleMesh> {
        let mut vertices = self.vertices.clone();
        let mut boundary_pairs: HashMap<(usize, usize), ()> = HashMap::new();
        for e in &self.boundary {
            let [a, b] = e.vertices;
            boundary_pairs.insert((a.min(b), a.max(b)), ());
        }
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
            let key = (a.min(b), a.max(b));
            *mids.entry(key).or_insert_with(|| {
                let (pa, pb) = (vertices[key.0], vertices[key.1]);
                let p = match (&self.domain, boundary_pairs.contains_key(&key)) {
                    (Some(d), true) => d.boundary_midpoint(pa, pb),
                    _ => [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])],
                };
                vertices.push(p);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        for (k, t) in triangles.iter().enumerate() {
            if signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "refined triangle {k} inverted by boundary projection"
                )));
            }
        }
        TriangleMesh::with_domain(vertices, triangles, self.domain.clone())
    }

    /// Copy of the mesh translated by `offset`.
    pub fn translated(&self, offset: Point) -> TriangleMesh {
        let mut m = self.clone();
        for p in &mut m.vertices {
            p[0] += offset[0];
            p[1] += offset[1];
        }
        m.domain = m.domain.map(|d| {
            let c = d.center;
            d.with_center([c[0] + offset[0], c[1] + offset[1]])
        });
        m
    }
}

fn derive_boundary(vertices: &[Point], triangles: &[[usize; 3]]) -> Result<Vec<BoundaryEdge>> {
    let mut count: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
    for t in triangles {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            let entry = count.entry((a.min(b), a.max(b))).or_insert((0, [a, b]));
            entry.0 += 1;
        }
    }
    if count.values().any(|(c, _)| *c > 2) {
        return Err(Error::InvalidMesh("edge shared by more than two triangles".into()));
    }
    let mut directed: Vec<[usize; 2]> = count
        .values()
        .filter(|(c, _)| *c == 1)
        .map(|(_, e)| *e)
        .collect();
    // walk loops so boundary edges come out in traversal order
    directed.sort_unstable();
    let mut next: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, e) in directed.iter().enumerate() {
        next.entry(e[0]).or_default().push(i);
    }
    let mut used = vec![false; directed.len()];
    let mut ordered = Vec::with_capacity(directed.len());
    for start in 0..directed.len() {
        if used[start] {
            continue;
        }
        let mut cur = start;
        loop {
            used[cur] = true;
            ordered.push(directed[cur]);
            let head = directed[cur][1];
            match next.get(&head).and_then(|v| v.iter().copied().find(|&j| !used[j])) {
                Some(j) => cur = j,
                None => break,
            }
        }
    }
    Ok(ordered
        .into_iter()
        .map(|[a, b]| {
            let (pa, pb) = (vertices[a], vertices[b]);
            let len = dist(pa, pb);
            BoundaryEdge {
                vertices: [a, b],
                normal: [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len],
            }
        })
        .collect())
}
