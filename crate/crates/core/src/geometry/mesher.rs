//! Boundary-conforming triangulation: boundary polyline on the true curve,
//! hexagonal interior lattice, constrained Delaunay connectivity and a few
//! rounds of Laplacian smoothing.

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::{point_in_polygon, segment_distance, DomainSpec, TriangleMesh};
use crate::{Error, Point, Result};

/// Lattice spacing as a fraction of the requested maximum edge length.
const SPACING_FRACTION: f64 = 0.8;
const SMOOTHING_ROUNDS: usize = 6;
const MAX_ATTEMPTS: usize = 12;

/// Triangulates `spec` so that every edge is at most `h_target` long.
pub fn build_mesh(spec: &DomainSpec, h_target: f64) -> Result<TriangleMesh> {
    spec.validate()?;
    if !(h_target.is_finite() && h_target > 0.0) {
        return Err(Error::InvalidParameter {
            name: "h_target",
            reason: format!("must be positive, got {h_target}"),
        });
    }
    // too coarse for the curve at all
    spec.boundary_polyline(h_target)?;

    let mut spacing = SPACING_FRACTION * h_target;
    for _ in 0..MAX_ATTEMPTS {
        let mesh = triangulate(spec, spacing)?;
        if mesh.h() <= h_target {
            mesh.validate()?;
            return Ok(mesh);
        }
        spacing *= 0.9;
    }
    Err(Error::Meshing(format!(
        "could not reach maximum edge length {h_target}"
    )))
}

fn triangulate(spec: &DomainSpec, spacing: f64) -> Result<TriangleMesh> {
    let boundary = spec.boundary_polyline(spacing)?;
    let nb = boundary.len();
    let mut points = boundary.clone();
    let front = front_layer(&boundary, spacing);
    points.extend(lattice_points(spec, &boundary, spacing, &front));
    points.extend(front);

    let mut triangles = delaunay(&points, nb)?;
    for _ in 0..SMOOTHING_ROUNDS {
        smooth(&mut points, &triangles, nb, &boundary, spacing);
        triangles = delaunay(&points, nb)?;
    }

    // drop lattice points that ended up unused
    let mut remap = vec![usize::MAX; points.len()];
    let mut used = Vec::with_capacity(points.len());
    for t in &triangles {
        for &i in t {
            if remap[i] == usize::MAX {
                remap[i] = 0;
            }
        }
    }
    for (i, r) in remap.iter_mut().enumerate() {
        if *r == 0 {
            *r = used.len();
            used.push(points[i]);
        }
    }
    let triangles = triangles
        .into_iter()
        .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
        .collect();
    TriangleMesh::with_domain(used, triangles, Some(spec.clone()))
}

/// One advancing-front layer: for every boundary edge, the apex of the
/// inward equilateral triangle, kept when it is well inside the domain and
/// not crowding an earlier apex.
fn front_layer(boundary: &[Point], spacing: f64) -> Vec<Point> {
    let n = boundary.len();
    let index = BoundaryIndex::new(boundary, spacing);
    let mut out: Vec<Point> = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (boundary[i], boundary[(i + 1) % n]);
        let len = super::dist(a, b);
        let height = 0.5 * 3f64.sqrt() * len;
        // inward normal of a counter-clockwise edge points left
        let apex = [
            0.5 * (a[0] + b[0]) - height * (b[1] - a[1]) / len,
            0.5 * (a[1] + b[1]) + height * (b[0] - a[0]) / len,
        ];
        let crowded = out
            .last()
            .into_iter()
            .chain(out.first())
            .any(|&q| super::dist(q, apex) < 0.6 * spacing);
        if !crowded && index.clear_of(apex, 0.75 * height) && point_in_polygon(apex, boundary) {
            out.push(apex);
        }
    }
    out
}

fn lattice_points(spec: &DomainSpec, boundary: &[Point], spacing: f64, front: &[Point]) -> Vec<Point> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in boundary {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let dy = spacing * 3f64.sqrt() / 2.0;
    let c = spec.center;
    let j0 = ((lo[1] - c[1]) / dy).floor() as i64;
    let j1 = ((hi[1] - c[1]) / dy).ceil() as i64;
    let i0 = ((lo[0] - c[0]) / spacing).floor() as i64 - 1;
    let i1 = ((hi[0] - c[0]) / spacing).ceil() as i64 + 1;
    let clearance = 0.55 * spacing;
    let index = BoundaryIndex::new(boundary, spacing);
    let mut out = Vec::new();
    for j in j0..=j1 {
        let shift = if j.rem_euclid(2) == 1 { 0.5 * spacing } else { 0.0 };
        for i in i0..=i1 {
            let p = [c[0] + i as f64 * spacing + shift, c[1] + j as f64 * dy];
            let near_front = front.iter().any(|&q| super::dist(q, p) < 0.7 * spacing);
            if !near_front && index.clear_of(p, clearance) && point_in_polygon(p, boundary) {
                out.push(p);
            }
        }
    }
    out
}

/// Bucket grid over boundary segments answering "is `p` at least `d` away
/// from the boundary" for `d` up to the cell size.
struct BoundaryIndex<'a> {
    boundary: &'a [Point],
    origin: Point,
    cell: f64,
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl<'a> BoundaryIndex<'a> {
    fn new(boundary: &'a [Point], cell: f64) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in boundary {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let dims = [
            ((hi[0] - lo[0]) / cell) as usize + 1,
            ((hi[1] - lo[1]) / cell) as usize + 1,
        ];
        let mut index = BoundaryIndex {
            boundary,
            origin: lo,
            cell,
            dims,
            buckets: vec![Vec::new(); dims[0] * dims[1]],
        };
        let n = boundary.len();
        for i in 0..n {
            let (a, b) = (boundary[i], boundary[(i + 1) % n]);
            let (ca, cb) = (index.cell_of(a), index.cell_of(b));
            for cx in ca[0].min(cb[0])..=ca[0].max(cb[0]) {
                for cy in ca[1].min(cb[1])..=ca[1].max(cb[1]) {
                    index.buckets[cy * dims[0] + cx].push(i);
                }
            }
        }
        index
    }

    fn cell_of(&self, p: Point) -> [usize; 2] {
        let f = |d: usize| {
            (((p[d] - self.origin[d]) / self.cell).floor().max(0.0) as usize).min(self.dims[d] - 1)
        };
        [f(0), f(1)]
    }

    fn clear_of(&self, p: Point, d: f64) -> bool {
        debug_assert!(d <= self.cell);
        let c = self.cell_of(p);
        let n = self.boundary.len();
        for cx in c[0].saturating_sub(1)..=(c[0] + 1).min(self.dims[0] - 1) {
            for cy in c[1].saturating_sub(1)..=(c[1] + 1).min(self.dims[1] - 1) {
                for &i in &self.buckets[cy * self.dims[0] + cx] {
                    if segment_distance(p, self.boundary[i], self.boundary[(i + 1) % n]) < d {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn delaunay(points: &[Point], nb: usize) -> Result<Vec<[usize; 3]>> {
    let verts: Vec<Point2<f64>> = points.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let edges: Vec<[usize; 2]> = (0..nb).map(|i| [i, (i + 1) % nb]).collect();
    let cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(verts, edges)
        .map_err(|e| Error::Meshing(format!("triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != points.len() {
        return Err(Error::Meshing("coincident mesh points".into()));
    }
    // inside = reached from the outer face across an odd number of
    // constraint edges; robust for near-collinear boundary points
    let nf = cdt.num_all_faces();
    let mut adjacency: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nf];
    for e in cdt.directed_edges() {
        let constrained = cdt.is_constraint_edge(e.as_undirected().fix());
        adjacency[e.face().fix().index()].push((e.rev().face().fix().index(), constrained));
    }
    let outer = cdt.outer_face().fix().index();
    let mut parity: Vec<Option<bool>> = vec![None; nf];
    parity[outer] = Some(false);
    let mut queue = std::collections::VecDeque::from([outer]);
    while let Some(f) = queue.pop_front() {
        let pf = parity[f].unwrap();
        for &(g, constrained) in &adjacency[f] {
            if parity[g].is_none() {
                parity[g] = Some(pf ^ constrained);
                queue.push_back(g);
            }
        }
    }
    let mut tris = Vec::with_capacity(cdt.num_inner_faces());
    for face in cdt.inner_faces() {
        if parity[face.fix().index()] != Some(true) {
            continue;
        }
        let v = face.vertices();
        tris.push([v[0].fix().index(), v[1].fix().index(), v[2].fix().index()]);
    }
    Ok(tris)
}

fn smooth(points: &mut [Point], triangles: &[[usize; 3]], nb: usize, boundary: &[Point], spacing: f64) {
    let mut sum = vec![[0.0f64; 2]; points.len()];
    let mut count = vec![0usize; points.len()];
    for t in triangles {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            for (x, y) in [(a, b), (b, a)] {
                sum[x][0] += points[y][0];
                sum[x][1] += points[y][1];
                count[x] += 1;
            }
        }
    }
    let floor = 0.3 * spacing;
    let index = BoundaryIndex::new(boundary, spacing);
    for i in nb..points.len() {
        if count[i] == 0 {
            continue;
        }
        let target = [sum[i][0] / count[i] as f64, sum[i][1] / count[i] as f64];
        if index.clear_of(target, floor) && point_in_polygon(target, boundary) {
            points[i] = target;
        }
    }
}
