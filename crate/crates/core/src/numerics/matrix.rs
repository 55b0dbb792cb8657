use std::fmt;

use crate::error::{Error, Result};

/// Dense real matrix stored row-major.
///
/// Integer-valued matrices (01-relations and their products) are held exactly,
/// since every value involved at desk scale is far below 2^53.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Structural(format!(
                "matrix must have at least one row and column, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Structural(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != c) {
            return Err(Error::Structural(format!(
                "row {i} has {} entries, expected {c}",
                row.len()
            )));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// The all-ones matrix `J`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 1.0)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {:?} x {:?}",
            self.shape(),
            other.shape()
        );
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Matrix { rows: self.rows, cols: other.cols, data: out }
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "elementwise shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    /// Entrywise (Schur) product.
    pub fn schur(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Matrix, s: f64) {
        assert_eq!(self.shape(), other.shape(), "elementwise shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Frobenius inner product `tr(Aᵀ B)`.
    pub fn dot(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "inner product shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "comparison shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for r in 0..self.rows {
            for (s, a) in sums.iter_mut().zip(self.row(r)) {
                *s += a;
            }
        }
        sums
    }

    /// First pair `(i, j)` with `i < j` whose mirrored entries differ by more than `tol`.
    pub fn first_asymmetry(&self, tol: f64) -> Option<(usize, usize, f64)> {
        if !self.is_square() {
            return None;
        }
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                let d = (self.get(i, j) - self.get(j, i)).abs();
                if d > tol {
                    return Some((i, j, d));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && self.first_asymmetry(tol).is_none()
    }

    /// First entry (row-major) that is neither 0 nor 1.
    pub fn first_non_binary(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|&a| a != 0.0 && a != 1.0)
            .map(|p| (p / self.cols, p % self.cols))
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|a| a.fract() == 0.0 && a.abs() < 9.0e15)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == 0.0)
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "submatrix out of range");
        Matrix::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j))
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block out of range"
        );
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    /// Positions of nonzero entries in row-major order.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0.0)
            .map(move |(p, _)| (p / cols, p % cols))
    }

    /// Symmetric part `(A + Aᵀ) / 2`.
    pub fn symmetrized(&self) -> Matrix {
        assert!(self.is_square(), "symmetrization needs a square matrix");
        Matrix::from_fn(self.rows, self.cols, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Returns `None` when a pivot falls below `tiny` relative to the matrix scale.
    pub fn inverse(&self, tiny: f64) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a.get(x, col).abs().total_cmp(&a.get(y, col).abs()))
                .unwrap_or(col);
            let p = a.get(pivot, col);
            if p.abs() <= tiny * scale {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    let (u, v) = (a.get(col, j), a.get(pivot, j));
                    a.set(col, j, v);
                    a.set(pivot, j, u);
                    let (u, v) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, v);
                    inv.set(pivot, j, u);
                }
            }
            for j in 0..n {
                a.set(col, j, a.get(col, j) / p);
                inv.set(col, j, inv.get(col, j) / p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - f * a.get(col, j));
                    inv.set(r, j, inv.get(r, j) - f * inv.get(col, j));
                }
            }
        }
        Some(inv)
    }

    /// Infinity-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|a| a.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(Matrix::new(0, 2, vec![]).is_err());
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn products_and_traces() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = a.transpose();
        let ab = a.matmul(&b);
        assert_eq!(ab.data(), &[5.0, 11.0, 11.0, 25.0]);
        assert_eq!(a.trace(), 5.0);
        assert_eq!(a.dot(&a), 30.0);
        assert_eq!(a.schur(&a).sum(), 30.0);
        assert_eq!(a.first_asymmetry(0.0), Some((0, 1, 1.0)));
        assert!(ab.is_symmetric(0.0));
    }

    #[test]
    fn inverse_round_trip() {
        let a = Matrix::from_rows(&[vec![3.0, 4.0], vec![2.0_f64.sqrt(), -(2.0_f64.sqrt())]])
            .unwrap();
        let inv = a.inverse(1e-14).unwrap();
        assert!(a.matmul(&inv).max_abs_diff(&Matrix::identity(2)) < 1e-14);
        let singular = Matrix::ones(2, 2);
        assert!(singular.inverse(1e-12).is_none());
    }

    #[test]
    fn blocks() {
        let mut m = Matrix::zeros(3, 3);
        m.set_block(1, 1, &Matrix::ones(2, 2));
        assert_eq!(m.submatrix(1, 1, 2, 2), Matrix::ones(2, 2));
        assert_eq!(m.support().collect::<Vec<_>>(), vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
        assert_eq!(m.first_non_binary(), None);
    }
}
