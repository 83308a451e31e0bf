//! Dense row-major matrices and LU-based solves for the collocation systems.

use std::sync::Once;

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Mat, MatRef, Par};

use crate::error::{LeviError, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LeviError::Dimension(format!(
                "{} entries for a {rows}×{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Mutable row-major storage, e.g. for parallel row assembly via `chunks_mut(cols)`.
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(LeviError::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_one(&self) -> f64 {
        let mut col = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (c, v) in col.iter_mut().zip(self.row(i)) {
                *c += v.abs();
            }
        }
        col.into_iter().fold(0.0, f64::max)
    }

    /// First non-finite entry, if any.
    pub fn find_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|k| (k / self.cols, k % self.cols))
    }

    fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }
}

fn sequential_factorization() {
    static INIT: Once = Once::new();
    INIT.call_once(|| faer::set_global_parallelism(Par::Seq));
}

/// Partial-pivoting LU factors of a square matrix.
pub struct LuFactorization {
    lu: PartialPivLu<f64>,
    n: usize,
    norm_one: f64,
}

impl std::fmt::Debug for LuFactorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LuFactorization").field("n", &self.n).finish_non_exhaustive()
    }
}

const PIVOT_TOLERANCE: f64 = 1e-14;

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactorization> {
    if a.rows != a.cols {
        return Err(LeviError::Dimension(format!(
            "LU needs a square matrix, got {}×{}",
            a.rows, a.cols
        )));
    }
    if let Some((row, col)) = a.find_non_finite() {
        return Err(LeviError::Assembly {
            block: "matrix",
            row,
            col,
        });
    }
    sequential_factorization();
    let n = a.rows;
    let lu = a.to_faer().partial_piv_lu();
    let scale = a.norm_inf();
    let u: MatRef<'_, f64> = lu.U();
    for step in 0..n {
        let pivot = u[(step, step)];
        if !(pivot.abs() >= PIVOT_TOLERANCE * scale) {
            return Err(LeviError::SingularSystem {
                step,
                pivot,
                condition: f64::INFINITY,
            });
        }
    }
    Ok(LuFactorization {
        lu,
        n,
        norm_one: a.norm_one(),
    })
}

impl LuFactorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.solve_impl(b, false)
    }

    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.solve_impl(b, true)
    }

    fn solve_impl(&self, b: &[f64], transpose: bool) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(LeviError::Dimension(format!(
                "right-hand side of length {} for a system of size {}",
                b.len(),
                self.n
            )));
        }
        let mut rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        if transpose {
            self.lu.solve_transpose_in_place(rhs.as_mut());
        } else {
            self.lu.solve_in_place(rhs.as_mut());
        }
        Ok((0..self.n).map(|i| rhs[(i, 0)]).collect())
    }

    /// Hager's 1-norm estimate of `‖A‖₁‖A⁻¹‖₁`.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut estimate = 0.0;
        let mut last_index = usize::MAX;
        for _ in 0..5 {
            let Ok(y) = self.solve(&x) else {
                return f64::INFINITY;
            };
            estimate = y.iter().map(|v| v.abs()).sum::<f64>();
            let signs: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let Ok(z) = self.solve_transpose(&signs) else {
                return f64::INFINITY;
            };
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.abs()))
                .fold((0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx || j == last_index {
                break;
            }
            last_index = j;
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        if estimate.is_finite() {
            estimate * self.norm_one
        } else {
            f64::INFINITY
        }
    }
}

/// Solution plus diagnostics from [`solve_system`].
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution {
    pub solution: Vec<f64>,
    pub condition: f64,
    /// `‖Ax − b‖∞ / (‖A‖∞‖x‖∞ + ‖b‖∞)`
    pub relative_residual: f64,
}

fn relative_residual(a: &DenseMatrix, x: &[f64], b: &[f64]) -> Result<(f64, Vec<f64>)> {
    let ax = a.matvec(x)?;
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let rn = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bn = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = a.norm_inf() * xn + bn;
    Ok((if scale > 0.0 { rn / scale } else { rn }, r))
}

/// Factor, solve, apply one refinement step if needed and estimate the condition.
pub fn solve_system(a: &DenseMatrix, b: &[f64]) -> Result<SystemSolution> {
    let lu = lu_factor(a)?;
    let mut x = lu.solve(b)?;
    let (mut rel, r) = relative_residual(a, &x, b)?;
    if rel > 1e-12 {
        let dx = lu.solve(&r)?;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        rel = relative_residual(a, &x, b)?.0;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LeviError::SingularSystem {
            step: 0,
            pivot: f64::NAN,
            condition: lu.condition_estimate(),
        });
    }
    Ok(SystemSolution {
        solution: x,
        condition: lu.condition_estimate(),
        relative_residual: rel,
    })
}

pub fn lu_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(solve_system(a, b)?.solution)
}

/// 1-norm condition estimate; `∞` for numerically singular matrices.
pub fn condition_estimate(a: &DenseMatrix) -> f64 {
    match lu_factor(a) {
        Ok(lu) => lu.condition_estimate(),
        Err(_) => f64::INFINITY,
    }
}
