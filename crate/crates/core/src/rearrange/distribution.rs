use std::fmt::Write as _;

use crate::fem::ScalarField;

/// Area of `{u > t}` inside a triangle of area `area` whose vertex values,
/// sorted, are `a ≤ b ≤ c`.
pub(crate) fn triangle_superlevel_area(area: f64, [a, b, c]: [f64; 3], t: f64) -> f64 {
    if t < a {
        area
    } else if t >= c {
        0.0
    } else if t < b {
        area * (1.0 - (t - a) * (t - a) / ((c - a) * (b - a)))
    } else {
        area * (c - t) * (c - t) / ((c - a) * (c - b))
    }
}

fn sorted3(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(f64::total_cmp);
    v
}

/// μ(t) = |{u > t}|, exact for the piecewise-linear interpolant.
pub fn distribution(field: &ScalarField, t: f64) -> f64 {
    let mesh = field.mesh();
    (0..mesh.num_triangles())
        .map(|k| triangle_superlevel_area(mesh.triangle_area(k), sorted3(field.triangle_values(k)), t))
        .sum()
}

/// Exact distribution function of a piecewise-linear field.
///
/// Between consecutive distinct vertex values `t_k < t_{k+1}` the function
/// is a quadratic polynomial; it is stored in the local variable
/// `x = (t − t_k)/(t_{k+1} − t_k) ∈ [0, 1]`, where every per-triangle
/// contribution is bounded by the triangle area.
#[derive(Debug, Clone)]
pub struct DistributionProfile {
    breakpoints: Vec<f64>,
    // coefficients of c0 + c1 x + c2 x² on [t_k, t_{k+1})
    pieces: Vec<[f64; 3]>,
    // area of triangles on which the field is constant at each breakpoint
    plateau: Vec<f64>,
    total: f64,
}

impl DistributionProfile {
    pub fn new(field: &ScalarField) -> Self {
        let mesh = field.mesh();
        let mut breakpoints: Vec<f64> = field.values().to_vec();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let nk = breakpoints.len();
        let mut pieces = vec![[0.0f64; 3]; nk.saturating_sub(1)];
        // full-triangle contributions for intervals entirely below `a`
        let mut full = vec![0.0f64; nk];
        let mut plateau = vec![0.0f64; nk];
        let index_of = |v: f64| breakpoints.partition_point(|&x| x < v);
        let mut total = 0.0;
        for k in 0..mesh.num_triangles() {
            let area = mesh.triangle_area(k);
            total += area;
            let [a, b, c] = sorted3(field.triangle_values(k));
            let (ia, ib, ic) = (index_of(a), index_of(b), index_of(c));
            full[ia] += area;
            if ia == ic {
                plateau[ia] += area;
            }
            for j in ia..ib {
                let (tk, w) = (breakpoints[j], breakpoints[j + 1] - breakpoints[j]);
                let d = tk - a;
                let den = (c - a) * (b - a);
                let p = &mut pieces[j];
                p[0] += area * (1.0 - d * d / den);
                p[1] -= area * 2.0 * d * w / den;
                p[2] -= area * w * w / den;
            }
            for j in ib..ic {
                let (tk, w) = (breakpoints[j], breakpoints[j + 1] - breakpoints[j]);
                let e = c - tk;
                let den = (c - a) * (c - b);
                let p = &mut pieces[j];
                p[0] += area * e * e / den;
                p[1] -= area * 2.0 * e * w / den;
                p[2] += area * w * w / den;
            }
        }
        // suffix sums: triangles whose minimum lies above interval j
        let mut above = 0.0;
        for j in (0..pieces.len()).rev() {
            above += full[j + 1];
            pieces[j][0] += above;
        }
        DistributionProfile {
            breakpoints,
            pieces,
            plateau,
            total,
        }
    }

    /// |Ω_h|.
    pub fn total_measure(&self) -> f64 {
        self.total
    }

    /// Sorted distinct vertex values.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn min_value(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn max_value(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    fn width(&self, k: usize) -> f64 {
        self.breakpoints[k + 1] - self.breakpoints[k]
    }

    pub(crate) fn piece(&self, k: usize) -> [f64; 3] {
        self.pieces[k]
    }

    pub(crate) fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// Piece `k` at local coordinate `x`. The right half is expanded about
    /// `x = 1`, anchored at the exact left limit, so that values near a
    /// quadratic zero do not suffer cancellation.
    pub(crate) fn piece_at(&self, k: usize, x: f64) -> f64 {
        let p = self.pieces[k];
        if x <= 0.5 {
            p[0] + x * (p[1] + x * p[2])
        } else {
            let y = x - 1.0;
            self.left_limit(k + 1) + y * (p[1] + 2.0 * p[2] + y * p[2])
        }
    }

    /// μ(t); right-continuous and non-increasing.
    pub fn eval(&self, t: f64) -> f64 {
        if t < self.breakpoints[0] {
            return self.total;
        }
        if t >= self.max_value() {
            return 0.0;
        }
        let k = self.breakpoints.partition_point(|&x| x <= t) - 1;
        self.piece_at(k, (t - self.breakpoints[k]) / self.width(k))
    }

    /// μ at the k-th breakpoint.
    pub fn at_breakpoint(&self, k: usize) -> f64 {
        if k < self.pieces.len() {
            self.pieces[k][0]
        } else {
            0.0
        }
    }

    /// Left limit μ(t_k⁻); differs from μ(t_k) only on plateaus.
    pub fn left_limit(&self, k: usize) -> f64 {
        if k == 0 {
            self.total
        } else {
            self.at_breakpoint(k) + self.plateau[k]
        }
    }

    /// μ′(t) of the quadratic piece containing `t` (right derivative).
    pub fn derivative(&self, t: f64) -> f64 {
        if t < self.breakpoints[0] || t >= self.max_value() {
            return 0.0;
        }
        let k = self.breakpoints.partition_point(|&x| x <= t) - 1;
        let x = (t - self.breakpoints[k]) / self.width(k);
        let p = self.pieces[k];
        (p[1] + 2.0 * x * p[2]) / self.width(k)
    }

    /// CSV with header `t,mu`, one row per breakpoint.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,mu\n");
        for k in 0..self.breakpoints.len() {
            let _ = writeln!(s, "{:.16e},{:.16e}", self.breakpoints[k], self.at_breakpoint(k));
        }
        s
    }
}
