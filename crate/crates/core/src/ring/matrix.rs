use std::ops::{Index, IndexMut};

use super::{LaurentPoly, RingError};
use crate::scalar::Coefficient;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Builds from rows; every row must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self, RingError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(RingError::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |r, c| {
            self.get(rows[r], cols[c]).clone()
        })
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(columns: &[Vec<T>], rows: usize) -> Self {
        Matrix::from_fn(rows, columns.len(), |r, c| columns[c][r].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.data
            .iter()
            .enumerate()
            .map(move |(i, x)| (i / self.cols.max(1), i % self.cols.max(1), x))
    }

    /// Block matrix from a grid of blocks; block rows must agree in height
    /// and block columns in width.
    pub fn from_blocks(
        row_sizes: &[usize],
        col_sizes: &[usize],
        block: impl Fn(usize, usize) -> Option<Matrix<T>>,
        zero: T,
    ) -> Result<Self, RingError> {
        let rows: usize = row_sizes.iter().sum();
        let cols: usize = col_sizes.iter().sum();
        let mut out = Matrix::filled(rows, cols, zero);
        let mut r0 = 0;
        for (bi, &h) in row_sizes.iter().enumerate() {
            let mut c0 = 0;
            for (bj, &w) in col_sizes.iter().enumerate() {
                if let Some(b) = block(bi, bj) {
                    if b.shape() != (h, w) {
                        return Err(RingError::Shape(format!(
                            "block ({bi},{bj}) is {}x{}, expected {h}x{w}",
                            b.rows, b.cols
                        )));
                    }
                    for r in 0..h {
                        for c in 0..w {
                            out[(r0 + r, c0 + c)] = b.get(r, c).clone();
                        }
                    }
                }
                c0 += w;
            }
            r0 += h;
        }
        Ok(out)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<C: Coefficient> Matrix<LaurentPoly<C>> {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        Matrix::filled(rows, cols, LaurentPoly::zero(nvars))
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| {
            if r == c {
                LaurentPoly::one(nvars)
            } else {
                LaurentPoly::zero(nvars)
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(LaurentPoly::is_zero)
    }

    pub fn checked_mul(&self, rhs: &Self, nvars: usize) -> Result<Self, RingError> {
        if self.cols != rhs.rows {
            return Err(RingError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols, nvars);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        out[(r, c)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, RingError> {
        if self.shape() != rhs.shape() {
            return Err(RingError::Shape(format!(
                "cannot add {}x{} to {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |r, c| {
            self.get(r, c) + rhs.get(r, c)
        }))
    }

    pub fn scale(&self, p: &LaurentPoly<C>) -> Self {
        self.map(|x| x * p)
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x)
    }

    pub fn mul_vec(&self, v: &[LaurentPoly<C>], nvars: usize) -> Vec<LaurentPoly<C>> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = LaurentPoly::zero(nvars);
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self, nvars: usize) -> Result<LaurentPoly<C>, RingError> {
        if !self.is_square() {
            return Err(RingError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).fold(LaurentPoly::zero(nvars), |acc, i| acc + self.get(i, i)))
    }
}
