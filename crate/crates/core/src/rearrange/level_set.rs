use std::collections::HashMap;

use crate::fem::element::{clip_above, polygon_integral};
use crate::fem::ScalarField;
use crate::geometry::TriangleMesh;
use crate::{Error, Point, Result};

/// One piece of the interior boundary of a super-level set.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    /// Polyline points; a closed contour does not repeat its first point.
    pub points: Vec<Point>,
    pub closed: bool,
}

impl Contour {
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        let segs = if self.closed { n } else { n.saturating_sub(1) };
        (0..segs)
            .map(|i| {
                let (a, b) = (self.points[i], self.points[(i + 1) % n]);
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum()
    }
}

/// Sub-segment of a boundary edge on which the field exceeds the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment {
    pub points: [Point; 2],
    pub values: [f64; 2],
}

impl BoundarySegment {
    pub fn length(&self) -> f64 {
        let [a, b] = self.points;
        (b[0] - a[0]).hypot(b[1] - a[1])
    }

    /// ∫ 1/u along the segment for the linear interpolant of the end values.
    pub fn reciprocal_integral(&self) -> f64 {
        let len = self.length();
        let [u0, u1] = self.values;
        let x = (u1 - u0) / (u1 + u0);
        if x.abs() < 1e-3 {
            // ln((1+x)/(1-x)) / (2x) expanded around x = 0
            let x2 = x * x;
            2.0 * len / (u0 + u1) * (1.0 + x2 / 3.0 + x2 * x2 / 5.0)
        } else {
            len * (u1 / u0).ln() / (u1 - u0)
        }
    }
}

/// Geometry of `U_t = {u > t}` for one threshold.
#[derive(Debug, Clone)]
pub struct LevelSetGeometry {
    pub threshold: f64,
    /// Pieces of `∂U_t ∩ Ω`.
    pub contours: Vec<Contour>,
    /// Pieces of `∂U_t ∩ ∂Ω`.
    pub exterior: Vec<BoundarySegment>,
    pub interior_perimeter: f64,
    pub exterior_length: f64,
    pub enclosed_area: f64,
}

impl LevelSetGeometry {
    /// Perimeter of `U_t`: interior contours plus the exterior part.
    pub fn perimeter(&self) -> f64 {
        self.interior_perimeter + self.exterior_length
    }

    /// All contour points, in contour order.
    pub fn contour_points(&self) -> impl Iterator<Item = Point> + '_ {
        self.contours.iter().flat_map(|c| c.points.iter().copied())
    }
}

fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

fn edge_key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Boundary sub-segments where `u > t`.
pub fn exterior_segments(field: &ScalarField, t: f64) -> Vec<BoundarySegment> {
    let mesh = field.mesh();
    let (pts, vals) = (mesh.vertices(), field.values());
    let mut out = Vec::new();
    for e in mesh.boundary_edges() {
        let [i, j] = e.vertices;
        let (pi, pj, ui, uj) = (pts[i], pts[j], vals[i], vals[j]);
        match (ui > t, uj > t) {
            (true, true) => out.push(BoundarySegment {
                points: [pi, pj],
                values: [ui, uj],
            }),
            (true, false) => {
                let s = (t - ui) / (uj - ui);
                out.push(BoundarySegment {
                    points: [pi, lerp(pi, pj, s)],
                    values: [ui, t],
                })
            }
            (false, true) => {
                let s = (t - ui) / (uj - ui);
                out.push(BoundarySegment {
                    points: [lerp(pi, pj, s), pj],
                    values: [t, uj],
                })
            }
            (false, false) => {}
        }
    }
    out
}

fn trace_contours(mesh: &TriangleMesh, vals: &[f64], t: f64) -> Vec<Contour> {
    let pts = mesh.vertices();
    let mut point_of: HashMap<(usize, usize), Point> = HashMap::new();
    let mut links: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for tri in mesh.triangles() {
        let mut ends = Vec::with_capacity(2);
        for a in 0..3 {
            let (i, j) = (tri[a], tri[(a + 1) % 3]);
            if (vals[i] > t) != (vals[j] > t) {
                let key = edge_key(i, j);
                point_of.entry(key).or_insert_with(|| {
                    let (lo, hi) = key;
                    lerp(pts[lo], pts[hi], (t - vals[lo]) / (vals[hi] - vals[lo]))
                });
                ends.push(key);
            }
        }
        if let [a, b] = ends[..] {
            links.entry(a).or_default().push(b);
            links.entry(b).or_default().push(a);
        }
    }
    // deterministic start order; open chains (ending on ∂Ω) first
    let mut keys: Vec<_> = links.keys().copied().collect();
    keys.sort_unstable();
    keys.sort_by_key(|k| links[k].len() != 1);
    let mut visited: HashMap<(usize, usize), bool> = HashMap::with_capacity(keys.len());
    let mut contours = Vec::new();
    for start in keys {
        if visited.contains_key(&start) {
            continue;
        }
        let mut chain = vec![start];
        visited.insert(start, true);
        let mut prev = None;
        let mut cur = start;
        let closed = loop {
            let next = links[&cur].iter().copied().find(|&n| Some(n) != prev && !visited.contains_key(&n));
            match next {
                Some(n) => {
                    visited.insert(n, true);
                    chain.push(n);
                    prev = Some(cur);
                    cur = n;
                }
                None => break chain.len() > 2 && links[&cur].contains(&start),
            }
        };
        contours.push(Contour {
            points: chain.iter().map(|k| point_of[k]).collect(),
            closed,
        });
    }
    contours
}

fn check_open_range(field: &ScalarField, t: f64) -> Result<()> {
    let (lo, hi) = field.extrema();
    if t > lo && t < hi {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "threshold",
            value: t,
            lo,
            hi,
        })
    }
}

/// Contours, exterior boundary portion and area of `{u > t}`.
/// Requires `min u < t < max u`.
pub fn level_set_geometry(field: &ScalarField, t: f64) -> Result<LevelSetGeometry> {
    check_open_range(field, t)?;
    let mesh = field.mesh();
    let contours = trace_contours(mesh, field.values(), t);
    let exterior = exterior_segments(field, t);
    let enclosed_area = (0..mesh.num_triangles())
        .map(|k| polygon_integral(&clip_above(&mesh.triangle_points(k), field.triangle_values(k), t)).0)
        .sum();
    Ok(LevelSetGeometry {
        threshold: t,
        interior_perimeter: contours.iter().map(Contour::length).sum(),
        exterior_length: exterior.iter().map(BoundarySegment::length).sum(),
        contours,
        exterior,
        enclosed_area,
    })
}

/// `P(U_t) − 2√π·|U_t|^{1/2}`; non-negative by the isoperimetric inequality.
pub fn isoperimetric_residual(field: &ScalarField, t: f64) -> Result<f64> {
    let g = level_set_geometry(field, t)?;
    Ok(g.perimeter() - 2.0 * (std::f64::consts::PI * g.enclosed_area).sqrt())
}

/// ∫ over `∂U_t ∩ ∂Ω` of `1/u`, exact for the linear trace on each edge.
/// Requires `0 ≤ t < max u`.
pub fn exterior_reciprocal_integral(field: &ScalarField, t: f64) -> Result<f64> {
    let (_, hi) = field.extrema();
    if !(t >= 0.0 && t < hi) {
        return Err(Error::OutOfRange {
            what: "threshold",
            value: t,
            lo: 0.0,
            hi,
        });
    }
    if field.extrema().0 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "field",
            reason: "reciprocal integral needs a positive field".into(),
        });
    }
    Ok(exterior_segments(field, t).iter().map(BoundarySegment::reciprocal_integral).sum())
}

const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// ∫₀^{max u} t·(∫_{∂U_t^ext} 1/u) dt by composite Gauss–Legendre
/// quadrature between consecutive boundary values, where the inner
/// integral is smooth in `t`.
pub fn weighted_boundary_moment(field: &ScalarField) -> Result<f64> {
    let mesh = field.mesh();
    let vals = field.values();
    let mut nodes: Vec<f64> = mesh
        .boundary_edges()
        .iter()
        .flat_map(|e| e.vertices)
        .map(|i| vals[i])
        .collect();
    nodes.push(0.0);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let mut sum = 0.0;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a < 0.0 {
            continue;
        }
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, wt) in &GAUSS8 {
            let t = mid + half * x;
            sum += half * wt * t * exterior_reciprocal_integral(field, t)?;
        }
    }
    Ok(sum)
}

/// Both sides of the coarea formula on the band `t1 < u < t2`:
/// `(∫_{t1}^{t2} P(∂U_t ∩ Ω) dt, ∫_{band} |∇u|)`. The left side uses
/// `n` two-point Gauss panels.
pub fn coarea_sides(field: &ScalarField, t1: f64, t2: f64, n: usize) -> Result<(f64, f64)> {
    check_open_range(field, t1)?;
    check_open_range(field, t2)?;
    let mesh = field.mesh();
    let n = n.max(1);
    let dt = (t2 - t1) / n as f64;
    let g = 0.5 / 3f64.sqrt();
    let mut lhs = 0.0;
    for i in 0..n {
        for x in [0.5 - g, 0.5 + g] {
            let t = t1 + (i as f64 + x) * dt;
            let len: f64 = trace_contours(mesh, field.values(), t).iter().map(Contour::length).sum();
            lhs += 0.5 * dt * len;
        }
    }
    let rhs = (0..mesh.num_triangles())
        .map(|k| {
            let p = mesh.triangle_points(k);
            let v = field.triangle_values(k);
            let band = polygon_integral(&clip_above(&p, v, t1)).0 - polygon_integral(&clip_above(&p, v, t2)).0;
            let gr = field.triangle_gradient(k);
            band * gr[0].hypot(gr[1])
        })
        .sum();
    Ok((lhs, rhs))
}

/// Total area of triangles on which the field is constant with a value in
/// the open interval `(lo, hi)`: the flat part of the graph that would give
/// μ a jump inside that range.
pub fn plateau_measure(field: &ScalarField, lo: f64, hi: f64) -> f64 {
    let mesh = field.mesh();
    (0..mesh.num_triangles())
        .filter(|&k| {
            let [a, b, c] = field.triangle_values(k);
            a == b && b == c && a > lo && a < hi
        })
        .map(|k| mesh.triangle_area(k))
        .sum()
}
