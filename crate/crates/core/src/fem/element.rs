//! Per-element formulas for continuous piecewise-linear functions.

use crate::geometry::signed_area;
use crate::Point;

/// Gradients of the three barycentric coordinates of a triangle.
pub fn barycentric_gradients(p: &[Point; 3]) -> [[f64; 2]; 3] {
    let two_a = 2.0 * signed_area(p[0], p[1], p[2]);
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        g[i] = [(p[j][1] - p[k][1]) / two_a, (p[k][0] - p[j][0]) / two_a];
    }
    g
}

/// Element stiffness matrix ∫ ∇φ_i · ∇φ_j for linear basis functions.
pub fn local_stiffness(p: &[Point; 3]) -> [[f64; 3]; 3] {
    let area = signed_area(p[0], p[1], p[2]);
    let g = barycentric_gradients(p);
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
        }
    }
    k
}

/// Boundary block β ∫_e φ_i φ_j on an edge of the given length.
pub fn local_robin(length: f64, beta: f64) -> [[f64; 2]; 2] {
    let c = beta * length / 6.0;
    [[2.0 * c, c], [c, 2.0 * c]]
}

/// Gradient of the linear interpolant of `v` on the triangle `p`.
pub fn gradient(p: &[Point; 3], v: [f64; 3]) -> [f64; 2] {
    let g = barycentric_gradients(p);
    [
        v[0] * g[0][0] + v[1] * g[1][0] + v[2] * g[2][0],
        v[0] * g[0][1] + v[1] * g[1][1] + v[2] * g[2][1],
    ]
}

/// Polygon of `{v > t}` inside the triangle, with interpolated values.
/// Empty, a triangle, or a quadrilateral; counter-clockwise if `p` is.
pub fn clip_above(p: &[Point; 3], v: [f64; 3], t: f64) -> Vec<(Point, f64)> {
    let mut out = Vec::with_capacity(4);
    for i in 0..3 {
        let j = (i + 1) % 3;
        let (ai, aj) = (v[i] > t, v[j] > t);
        if ai {
            out.push((p[i], v[i]));
        }
        if ai != aj {
            let s = (t - v[i]) / (v[j] - v[i]);
            out.push((
                [p[i][0] + s * (p[j][0] - p[i][0]), p[i][1] + s * (p[j][1] - p[i][1])],
                t,
            ));
        }
    }
    out
}

/// Exact integral of a linear function over a convex polygon given by its
/// vertices and vertex values (fan triangulation).
pub fn polygon_integral(poly: &[(Point, f64)]) -> (f64, f64) {
    let mut area = 0.0;
    let mut integral = 0.0;
    for k in 1..poly.len().saturating_sub(1) {
        let a = signed_area(poly[0].0, poly[k].0, poly[k + 1].0);
        area += a;
        integral += a * (poly[0].1 + poly[k].1 + poly[k + 1].1) / 3.0;
    }
    (area, integral)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_right_triangle_stiffness() {
        let k = local_stiffness(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let expected = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn robin_block_matches_edge_quadrature() {
        // Simpson is exact for the quadratic products of linear hat functions
        let (len, beta) = (0.37, 2.5);
        let phi = |s: f64| [1.0 - s, s];
        let m = local_robin(len, beta);
        for i in 0..2 {
            for j in 0..2 {
                let f = |s: f64| phi(s)[i] * phi(s)[j];
                let q = beta * len * (f(0.0) + 4.0 * f(0.5) + f(1.0)) / 6.0;
                assert!((m[i][j] - q).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn clip_area_matches_closed_form() {
        let p = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        // u = x: {x > t} in the unit triangle has area (1 − t)²/2
        for t in [-0.5, 0.0, 0.25, 0.5, 0.9, 1.0] {
            let (area, _) = polygon_integral(&clip_above(&p, [0.0, 1.0, 0.0], t));
            let expected = if t < 0.0 { 0.5 } else { 0.5 * (1.0 - t).max(0.0).powi(2) };
            assert!((area - expected).abs() < 1e-15, "t={t}");
        }
    }
}
