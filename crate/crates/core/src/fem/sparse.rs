//! Compressed sparse row storage and a Jacobi-preconditioned conjugate
//! gradient solver.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Square matrix from (row, col, value) triplets; duplicates are summed in
    /// input order, so the result is deterministic for a fixed triplet order.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1, k));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (r, c, v) = triplets[k];
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// Row sums, accumulated with Neumaier compensation.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (mut sum, mut comp) = (0.0f64, 0.0f64);
                for (_, v) in self.row(i) {
                    let t = sum + v;
                    comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
                    sum = t;
                }
                sum + comp
            })
            .collect()
    }

    /// `y = A x` evaluated as `Σ_j a_ij (x_j − x_i) + x_i Σ_j a_ij`. For
    /// operators that nearly annihilate constants this avoids the
    /// cancellation of large terms in the plain product.
    pub fn mul_vec_centered_into(&self, row_sums: &[f64], x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let xi = x[i];
            *yi = self.row(i).map(|(c, v)| v * (x[c] - xi)).sum::<f64>() + xi * row_sums[i];
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// Largest |a_ij − a_ji| relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }

    /// Entry-wise sum of two matrices with the same dimension.
    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for m in [self, other] {
            for i in 0..m.n {
                t.extend(m.row(i).map(|(j, v)| (i, j, v)));
            }
        }
        CsrMatrix::from_triplets(self.n, &t)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Expected residual norm produced by rounding `x` to double precision,
/// `u ‖ (Σ_j (a_ij x_j)²)^½ ‖` with unit roundoff `u`. Targets well below it
/// are unattainable.
pub fn rounding_floor(a: &CsrMatrix, x: &[f64]) -> f64 {
    let v: Vec<f64> = (0..a.dim())
        .map(|i| a.row(i).map(|(c, v)| (v * x[c]).powi(2)).sum::<f64>().sqrt() * 0.5 * f64::EPSILON)
        .collect();
    norm(&v)
}

const FLOOR_FACTOR: f64 = 2.0;
const MAX_RESTARTS: usize = 30;

#[derive(Debug, Clone, Copy)]
pub struct CgOutcome {
    pub iterations: usize,
    /// True relative residual ‖Ax − b‖ / ‖b‖ of the returned iterate. Above
    /// the requested tolerance only when that tolerance is below the rounding
    /// floor of the iterate.
    pub relative_residual: f64,
}

/// Solves `a x = b` for symmetric positive definite `a`, starting from zero.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    b: &[f64],
    tolerance: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, CgOutcome)> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((
            x,
            CgOutcome {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let sums = a.row_sums();
    let residual_of = |x: &[f64]| -> Vec<f64> {
        let mut ax = vec![0.0; n];
        a.mul_vec_centered_into(&sums, x, &mut ax);
        ax.iter().zip(b).map(|(ax, b)| b - ax).collect()
    };
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    let mut floor = 0.0;
    let mut restarts = 0;
    // recurrence residual can drift from the true one; confirm before stopping
    while iterations < max_iterations {
        a.mul_vec_centered_into(&sums, &p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Discretization(
                "system matrix is not positive definite".into(),
            ));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        iterations += 1;
        let mut restart = false;
        if norm(&r) <= tolerance.max(FLOOR_FACTOR * floor / bnorm) * bnorm {
            let true_r = residual_of(&x);
            floor = rounding_floor(a, &x);
            if norm(&true_r) <= tolerance.max(FLOOR_FACTOR * floor / bnorm) * bnorm {
                break;
            }
            r = true_r;
            restart = true;
            restarts += 1;
            if restarts > MAX_RESTARTS {
                break;
            }
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = if restart { 0.0 } else { rz_new / rz };
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let residual = residual_of(&x);
    let relative_residual = norm(&residual) / bnorm;
    if relative_residual > tolerance.max(FLOOR_FACTOR * rounding_floor(a, &x) / bnorm) {
        return Err(Error::NotConverged {
            iterations,
            residual: relative_residual,
        });
    }
    Ok((
        x,
        CgOutcome {
            iterations,
            relative_residual,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0), (0, 1, -1.0)]);
        assert_eq!(m.to_dense(), vec![vec![4.0, -1.0], vec![2.0, 0.0]]);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn cg_solves_small_spd() {
        let m = CsrMatrix::from_triplets(
            3,
            &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0), (1, 2, 1.0), (2, 1, 1.0), (2, 2, 2.0)],
        );
        let (x, out) = conjugate_gradient(&m, &[1.0, 2.0, 3.0], 1e-14, 50).unwrap();
        let ax = m.mul_vec(&x);
        for (a, b) in ax.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(out.relative_residual <= 1e-14);
    }

    #[test]
    fn iteration_limit_reports_residual() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + i as f64));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let m = CsrMatrix::from_triplets(n, &t);
        match conjugate_gradient(&m, &vec![1.0; n], 1e-14, 2) {
            Err(Error::NotConverged { iterations, residual }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 1e-14);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
