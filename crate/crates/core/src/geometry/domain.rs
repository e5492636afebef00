use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{cross, polygon_area, segment_distance, sub};
use crate::{Error, Point, Result};

/// Shape of a domain, described relative to its center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Rectangle { width: f64, height: f64 },
    /// Counter-clockwise vertex list.
    Polygon { vertices: Vec<Point> },
    /// Boundary `r(θ) = radius + amplitude·cos(mode·θ)`.
    PerturbedDisk {
        radius: f64,
        amplitude: f64,
        mode: u32,
    },
}

/// A planar Lipschitz domain: a shape translated to `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub shape: Shape,
    pub center: Point,
}

const ASYMMETRY_SAMPLES: usize = 200_000;

impl DomainSpec {
    pub fn disk(radius: f64) -> Self {
        Shape::Disk { radius }.into()
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        Shape::Ellipse { a, b }.into()
    }

    pub fn rectangle(width: f64, height: f64) -> Self {
        Shape::Rectangle { width, height }.into()
    }

    pub fn polygon(vertices: Vec<Point>) -> Self {
        Shape::Polygon { vertices }.into()
    }

    pub fn perturbed_disk(radius: f64, amplitude: f64, mode: u32) -> Self {
        Shape::PerturbedDisk {
            radius,
            amplitude,
            mode,
        }
        .into()
    }

    pub fn with_center(mut self, center: Point) -> Self {
        self.center = center;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |what: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidDomain(format!("{what} must be positive, got {x}")))
            }
        };
        if !(self.center[0].is_finite() && self.center[1].is_finite()) {
            return Err(Error::InvalidDomain("non-finite center".into()));
        }
        match &self.shape {
            Shape::Disk { radius } => positive("disk radius", *radius),
            Shape::Ellipse { a, b } => {
                positive("ellipse semi-axis a", *a)?;
                positive("ellipse semi-axis b", *b)
            }
            Shape::Rectangle { width, height } => {
                positive("rectangle width", *width)?;
                positive("rectangle height", *height)
            }
            Shape::PerturbedDisk {
                radius,
                amplitude,
                mode,
            } => {
                positive("perturbed disk radius", *radius)?;
                if !(amplitude.is_finite() && *amplitude >= 0.0 && *amplitude <= 0.3 * radius) {
                    return Err(Error::InvalidDomain(format!(
                        "perturbation amplitude {amplitude} must lie in [0, 0.3·radius]"
                    )));
                }
                if *mode < 2 {
                    return Err(Error::InvalidDomain(format!(
                        "angular mode {mode} must be at least 2"
                    )));
                }
                Ok(())
            }
            Shape::Polygon { vertices } => validate_polygon(vertices),
        }
    }

    /// Exact area of the continuous domain.
    pub fn area(&self) -> f64 {
        match &self.shape {
            Shape::Disk { radius } => PI * radius * radius,
            Shape::Ellipse { a, b } => PI * a * b,
            Shape::Rectangle { width, height } => width * height,
            Shape::Polygon { vertices } => polygon_area(vertices),
            Shape::PerturbedDisk {
                radius, amplitude, ..
            } => PI * radius * radius + 0.5 * PI * amplitude * amplitude,
        }
    }

    /// Uniform scaling about the center.
    pub fn scaled(&self, factor: f64) -> Self {
        let shape = match &self.shape {
            Shape::Disk { radius } => Shape::Disk {
                radius: radius * factor,
            },
            Shape::Ellipse { a, b } => Shape::Ellipse {
                a: a * factor,
                b: b * factor,
            },
            Shape::Rectangle { width, height } => Shape::Rectangle {
                width: width * factor,
                height: height * factor,
            },
            Shape::Polygon { vertices } => Shape::Polygon {
                vertices: vertices.iter().map(|p| [p[0] * factor, p[1] * factor]).collect(),
            },
            Shape::PerturbedDisk {
                radius,
                amplitude,
                mode,
            } => Shape::PerturbedDisk {
                radius: radius * factor,
                amplitude: amplitude * factor,
                mode: *mode,
            },
        };
        DomainSpec {
            shape,
            center: self.center,
        }
    }

    pub fn scaled_to_area(&self, area: f64) -> Self {
        self.scaled((area / self.area()).sqrt())
    }

    /// True when the boundary is a smooth curve rather than a polygon.
    pub fn is_curved(&self) -> bool {
        matches!(
            self.shape,
            Shape::Disk { .. } | Shape::Ellipse { .. } | Shape::PerturbedDisk { .. }
        )
    }

    /// Point of a curved boundary at parameter `theta` (None for polygons).
    pub(crate) fn curve_point(&self, theta: f64) -> Option<Point> {
        let (c, s) = (theta.cos(), theta.sin());
        let local = match self.shape {
            Shape::Disk { radius } => [radius * c, radius * s],
            Shape::Ellipse { a, b } => [a * c, b * s],
            Shape::PerturbedDisk {
                radius,
                amplitude,
                mode,
            } => {
                let r = radius + amplitude * (mode as f64 * theta).cos();
                [r * c, r * s]
            }
            _ => return None,
        };
        Some([self.center[0] + local[0], self.center[1] + local[1]])
    }

    /// Curve parameter of a point near a curved boundary.
    fn curve_parameter(&self, p: Point) -> f64 {
        let d = sub(p, self.center);
        match self.shape {
            Shape::Ellipse { a, b } => (d[1] / b).atan2(d[0] / a),
            _ => d[1].atan2(d[0]),
        }
    }

    /// Point on the true boundary associated with the midpoint of the boundary
    /// chord `p`–`q`. For polygonal shapes the chord midpoint itself.
    pub(crate) fn boundary_midpoint(&self, p: Point, q: Point) -> Point {
        let mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
        if !self.is_curved() {
            return mid;
        }
        // bisect the parameter interval; the shorter arc between p and q
        let tp = self.curve_parameter(p);
        let tq = self.curve_parameter(q);
        let mut dt = tq - tp;
        if dt > PI {
            dt -= 2.0 * PI;
        } else if dt < -PI {
            dt += 2.0 * PI;
        }
        self.curve_point(tp + 0.5 * dt).unwrap_or(mid)
    }

    /// Counter-clockwise boundary polyline with consecutive vertex distance at
    /// most `spacing`. Curved boundaries get vertices exactly on the curve.
    pub(crate) fn boundary_polyline(&self, spacing: f64) -> Result<Vec<Point>> {
        let pts = match &self.shape {
            Shape::Disk { radius } => {
                let n = (2.0 * PI * radius / spacing).ceil() as usize;
                check_count(spacing, n)?;
                (0..n)
                    .map(|i| {
                        let th = 2.0 * PI * i as f64 / n as f64;
                        [
                            self.center[0] + radius * th.cos(),
                            self.center[1] + radius * th.sin(),
                        ]
                    })
                    .collect()
            }
            Shape::Ellipse { .. } | Shape::PerturbedDisk { .. } => {
                self.equal_arc_points(spacing)?
            }
            Shape::Rectangle { width, height } => {
                let (w, h) = (0.5 * width, 0.5 * height);
                subdivide_polygon(&[[-w, -h], [w, -h], [w, h], [-w, h]], spacing, self.center)
            }
            Shape::Polygon { vertices } => subdivide_polygon(vertices, spacing, self.center),
        };
        Ok(pts)
    }

    fn equal_arc_points(&self, spacing: f64) -> Result<Vec<Point>> {
        const SAMPLES: usize = 1 << 16;
        let thetas: Vec<f64> = (0..=SAMPLES)
            .map(|i| 2.0 * PI * i as f64 / SAMPLES as f64)
            .collect();
        let pts: Vec<Point> = thetas.iter().map(|&t| self.curve_point(t).unwrap()).collect();
        let mut arc = Vec::with_capacity(pts.len());
        arc.push(0.0);
        for w in pts.windows(2) {
            arc.push(arc.last().unwrap() + super::dist(w[0], w[1]));
        }
        let total = *arc.last().unwrap();
        // the sampled length slightly underestimates the true arc length
        let n = (total * (1.0 + 1e-6) / spacing).ceil() as usize;
        check_count(spacing, n)?;
        let mut out = Vec::with_capacity(n);
        let mut j = 0;
        for i in 0..n {
            let target = total * i as f64 / n as f64;
            while arc[j + 1] < target {
                j += 1;
            }
            let frac = (target - arc[j]) / (arc[j + 1] - arc[j]);
            let th = thetas[j] + frac * (thetas[j + 1] - thetas[j]);
            out.push(self.curve_point(th).unwrap());
        }
        Ok(out)
    }

    /// Normalized area of the symmetric difference between the domain and the
    /// disk of equal area centered at the domain's centroid.
    pub fn asymmetry(&self) -> f64 {
        let area = self.area();
        let r0sq = area / PI;
        match &self.shape {
            Shape::Disk { .. } => 0.0,
            Shape::Ellipse { .. } | Shape::PerturbedDisk { .. } => {
                // polar integral of |r(θ)² − R0²| / 2, midpoint rule
                let n = ASYMMETRY_SAMPLES;
                let dth = 2.0 * PI / n as f64;
                let sum: f64 = (0..n)
                    .map(|i| {
                        let th = (i as f64 + 0.5) * dth;
                        let p = sub(self.curve_point(th).unwrap(), self.center);
                        (p[0] * p[0] + p[1] * p[1] - r0sq).abs()
                    })
                    .sum();
                0.5 * sum * dth / area
            }
            Shape::Rectangle { width, height } => {
                let (w, h) = (0.5 * width, 0.5 * height);
                polygon_asymmetry(&[[-w, -h], [w, -h], [w, h], [-w, h]])
            }
            Shape::Polygon { vertices } => polygon_asymmetry(vertices),
        }
    }
}

impl From<Shape> for DomainSpec {
    fn from(shape: Shape) -> Self {
        DomainSpec {
            shape,
            center: [0.0, 0.0],
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Disk { radius } => write!(f, "disk:{radius}")?,
            Shape::Ellipse { a, b } => write!(f, "ellipse:{a},{b}")?,
            Shape::Rectangle { width, height } => write!(f, "rect:{width},{height}")?,
            Shape::Polygon { vertices } => write!(f, "polygon:{}-gon", vertices.len())?,
            Shape::PerturbedDisk {
                radius,
                amplitude,
                mode,
            } => write!(f, "perturbed_disk:{radius},{amplitude},{mode}")?,
        }
        if self.center != [0.0, 0.0] {
            write!(f, "@({},{})", self.center[0], self.center[1])?;
        }
        Ok(())
    }
}

fn check_count(spacing: f64, n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::MeshTooCoarse {
            h_target: spacing,
            count: n,
        })
    } else {
        Ok(())
    }
}

fn subdivide_polygon(vertices: &[Point], spacing: f64, center: Point) -> Vec<Point> {
    let n = vertices.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        let len = super::dist(a, b);
        let m = ((len / spacing).ceil() as usize).max(1);
        for j in 0..m {
            let s = j as f64 / m as f64;
            out.push([
                center[0] + a[0] + s * (b[0] - a[0]),
                center[1] + a[1] + s * (b[1] - a[1]),
            ]);
        }
    }
    out
}

fn validate_polygon(vertices: &[Point]) -> Result<()> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::InvalidDomain(format!(
            "polygon needs at least 3 vertices, got {n}"
        )));
    }
    if vertices.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(Error::InvalidDomain("non-finite polygon vertex".into()));
    }
    for i in 0..n {
        if super::dist(vertices[i], vertices[(i + 1) % n]) == 0.0 {
            return Err(Error::InvalidDomain(format!("repeated polygon vertex {i}")));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return Err(Error::InvalidDomain(format!(
                    "polygon edges {i} and {j} intersect"
                )));
            }
        }
    }
    if polygon_area(vertices) <= 0.0 {
        return Err(Error::InvalidDomain(
            "polygon vertices must be counter-clockwise".into(),
        ));
    }
    Ok(())
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = cross(sub(b, a), sub(c, a));
    let o2 = cross(sub(b, a), sub(d, a));
    let o3 = cross(sub(d, c), sub(a, c));
    let o4 = cross(sub(d, c), sub(b, c));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    // touching or collinear overlap
    let eps = 1e-14;
    (o1.abs() < eps && segment_distance(c, a, b) < eps)
        || (o2.abs() < eps && segment_distance(d, a, b) < eps)
        || (o3.abs() < eps && segment_distance(a, c, d) < eps)
        || (o4.abs() < eps && segment_distance(b, c, d) < eps)
}

fn polygon_centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let w = cross(p, q);
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    let a6 = 6.0 * polygon_area(poly);
    [cx / a6, cy / a6]
}

fn polygon_asymmetry(poly: &[Point]) -> f64 {
    let area = polygon_area(poly);
    let c = polygon_centroid(poly);
    let local: Vec<Point> = poly.iter().map(|&p| sub(p, c)).collect();
    let r = (area / PI).sqrt();
    let inter = polygon_disk_intersection(&local, r);
    (2.0 * area - 2.0 * inter) / area
}

/// Area of a counter-clockwise polygon intersected with the disk of radius `r`
/// centered at the origin.
pub(crate) fn polygon_disk_intersection(poly: &[Point], r: f64) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| triangle_disk_signed(poly[i], poly[(i + 1) % n], r))
        .sum()
}

// Signed area of triangle (0, a, b) ∩ disk(0, r).
fn triangle_disk_signed(a: Point, b: Point, r: f64) -> f64 {
    let d = sub(b, a);
    let qa = d[0] * d[0] + d[1] * d[1];
    if qa == 0.0 {
        return 0.0;
    }
    let qb = 2.0 * (a[0] * d[0] + a[1] * d[1]);
    let qc = a[0] * a[0] + a[1] * a[1] - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        // the supporting line misses the open disk
        return 0.5 * r * r * cross(a, b).atan2(a[0] * b[0] + a[1] * b[1]);
    }
    let mut cuts = vec![0.0];
    {
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t > 0.0 && t < 1.0 {
                cuts.push(t);
            }
        }
    }
    cuts.push(1.0);
    let at = |t: f64| [a[0] + t * d[0], a[1] + t * d[1]];
    cuts.windows(2)
        .map(|w| {
            let (p, q) = (at(w[0]), at(w[1]));
            let m = at(0.5 * (w[0] + w[1]));
            if m[0] * m[0] + m[1] * m[1] <= r * r {
                0.5 * cross(p, q)
            } else {
                let ang = cross(p, q).atan2(p[0] * q[0] + p[1] * q[1]);
                0.5 * r * r * ang
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_specs() {
        assert!(DomainSpec::disk(0.0).validate().is_err());
        assert!(DomainSpec::ellipse(1.0, -1.0).validate().is_err());
        assert!(DomainSpec::perturbed_disk(1.0, 0.5, 3).validate().is_err());
        assert!(DomainSpec::perturbed_disk(1.0, 0.1, 1).validate().is_err());
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(DomainSpec::polygon(bowtie).validate().is_err());
        let cw = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        assert!(DomainSpec::polygon(cw).validate().is_err());
        let ell = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        DomainSpec::polygon(ell).validate().unwrap();
    }

    #[test]
    fn analytic_areas() {
        assert!((DomainSpec::ellipse(1.5, 1.0).area() - 4.71238898038469).abs() < 1e-12);
        let pd = DomainSpec::perturbed_disk(1.0, 0.2, 3);
        // quadrature of r(θ)²/2
        let n = 10_000;
        let q: f64 = (0..n)
            .map(|i| {
                let th = 2.0 * PI * (i as f64 + 0.5) / n as f64;
                let r = 1.0 + 0.2 * (3.0 * th).cos();
                0.5 * r * r
            })
            .sum::<f64>()
            * 2.0
            * PI
            / n as f64;
        assert!((pd.area() - q).abs() < 1e-10);
        assert!((pd.scaled_to_area(PI).area() - PI).abs() < 1e-12);
    }

    #[test]
    fn polygon_disk_intersection_limits() {
        let sq = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]];
        assert!((polygon_disk_intersection(&sq, 10.0) - 1.0).abs() < 1e-14);
        assert!((polygon_disk_intersection(&sq, 0.25) - PI / 16.0).abs() < 1e-14);
        // inscribed circle of radius 1/2 touches the square
        assert!((polygon_disk_intersection(&sq, 0.5) - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetry_values() {
        assert_eq!(DomainSpec::disk(2.0).asymmetry(), 0.0);
        assert!(DomainSpec::perturbed_disk(1.0, 0.0, 3).asymmetry() < 1e-12);
        let e1 = DomainSpec::ellipse(1.1, 1.0).asymmetry();
        let e2 = DomainSpec::ellipse(1.5, 1.0).asymmetry();
        assert!(e1 > 0.0 && e2 > e1);
        // scale invariance
        let s = DomainSpec::rectangle(2.0, 1.0);
        assert!((s.asymmetry() - s.scaled(3.0).asymmetry()).abs() < 1e-12);
    }

    #[test]
    fn boundary_points_on_curve() {
        let e = DomainSpec::ellipse(1.5, 1.0).with_center([0.3, -0.2]);
        let pts = e.boundary_polyline(0.05).unwrap();
        for p in &pts {
            let (x, y) = ((p[0] - 0.3) / 1.5, (p[1] + 0.2) / 1.0);
            assert!((x * x + y * y - 1.0).abs() < 1e-12);
        }
        for i in 0..pts.len() {
            assert!(super::super::dist(pts[i], pts[(i + 1) % pts.len()]) <= 0.05);
        }
        assert!(polygon_area(&pts) > 0.0);
        assert!(matches!(
            DomainSpec::disk(1.0).boundary_polyline(10.0),
            Err(Error::MeshTooCoarse { .. })
        ));
    }
}
