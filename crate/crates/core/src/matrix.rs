//! Small dense matrices over a [`Scalar`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pivot threshold for float elimination, relative to the largest entry.
const FLOAT_PIVOT_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, T::one())
    }

    /// `value * I_n`
    pub fn scalar(n: usize, value: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = value.clone();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, v) in diag.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&T) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn scale(&self, s: &T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.clone() * s.clone()).collect() }
    }

    /// `self + s * I`
    pub fn shift(&self, s: &T) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] = m[(i, i)].clone() + s.clone();
        }
        m
    }

    /// `A B - B A`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `A B + B A`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Entrywise max-abs norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Exact zero on the rational backend, max-abs below `tol * scale` on floats.
    pub fn is_negligible(&self, scale: f64, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(scale, tol))
    }

    /// Max-abs of the largest entry, exact when the backend is.
    pub fn max_abs_exact(&self) -> T {
        self.data
            .iter()
            .map(|x| x.abs())
            .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn trace(&self) -> T {
        self.diagonal().into_iter().fold(T::zero(), |a, b| a + b)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let candidate = if T::EXACT {
                (r..self.rows).find(|&i| !self[(i, c)].is_zero())
            } else {
                (r..self.rows)
                    .max_by(|&a, &b| {
                        self[(a, c)].to_f64().abs().total_cmp(&self[(b, c)].to_f64().abs())
                    })
                    .filter(|&i| self[(i, c)].to_f64().abs() > FLOAT_PIVOT_TOL * scale)
            };
            let Some(p) = candidate else {
                if !T::EXACT {
                    for i in r..self.rows {
                        self[(i, c)] = T::zero();
                    }
                }
                continue;
            };
            self.swap_rows(r, p);
            let inv = T::one() / self[(r, c)].clone();
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].clone() * inv.clone();
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if !self[(r, j)].is_zero() {
                        self[(i, j)] = self[(i, j)].clone() - f.clone() * self[(r, j)].clone();
                    }
                }
                self[(i, c)] = T::zero();
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Basis of the right null space as the columns of the returned matrix,
    /// together with the free column indices. Row `free[k]` of the basis is
    /// the `k`-th unit vector.
    pub fn nullspace(&self) -> (Matrix<T>, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis[(f, k)] = T::one();
            for (r, &p) in pivots.iter().enumerate() {
                basis[(p, k)] = -m[(r, f)].clone();
            }
        }
        (basis, free)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Numerical("singular matrix".into()));
        }
        Ok(Matrix::from_fn(n, n, |i, j| aug[(i, j + n)].clone()))
    }

    pub fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl Matrix<f64> {
    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T: Scalar> Mul<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }
}

impl<'a, T: Scalar> Add<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "matrix sum dimension mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<'a, T: Scalar> Sub<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "matrix difference dimension mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.data[i * self.cols..(i + 1) * self.cols].iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: &Matrix<f64>) -> (Vec<f64>, Matrix<f64>) {
    let eig = nalgebra::SymmetricEigen::new(m.to_nalgebra());
    let mut order: Vec<usize> = (0..m.rows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(m.rows(), m.rows(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues (possibly complex) of a general real matrix, sorted by real part.
pub fn general_eigenvalues(m: &Matrix<f64>) -> Vec<num_complex::Complex64> {
    if m.rows() == 0 {
        return Vec::new();
    }
    let ev = m.to_nalgebra().complex_eigenvalues();
    let mut out: Vec<_> = ev.iter().copied().collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

/// Groups sorted values into clusters separated by more than `tol` (relative).
pub fn count_distinct(sorted: &[f64], tol: f64) -> usize {
    let mut count = 0;
    let mut last: Option<f64> = None;
    for &v in sorted {
        match last {
            Some(l) if (v - l).abs() <= tol * (1.0 + l.abs().max(v.abs())) => {}
            _ => count += 1,
        }
        last = Some(v);
    }
    count
}
