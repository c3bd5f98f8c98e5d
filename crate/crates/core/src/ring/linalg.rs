//! Fraction-free linear algebra over ℤ[V][t^±].
//!
//! All rank, pivot and determinant computations go through one Bareiss
//! elimination with full pivoting. At every step the pivot is the nonzero
//! entry with the fewest terms, ties broken by lowest row and then lowest
//! column (original indices). Intermediate entries are minors of the input,
//! so every division is exact.

use super::{LaurentPoly, Matrix, RationalFunction, RingError};
use crate::scalar::Coefficient;

/// Outcome of a fraction-free elimination.
#[derive(Debug, Clone)]
pub struct Elimination<C> {
    /// Pivot rows in the order they were chosen.
    pub pivot_rows: Vec<usize>,
    /// Pivot columns in the order they were chosen.
    pub pivot_cols: Vec<usize>,
    last_pivot: LaurentPoly<C>,
}

fn permutation_sign(seq: &[usize]) -> bool {
    // true for an odd permutation
    let mut odd = false;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                odd = !odd;
            }
        }
    }
    odd
}

impl<C: Coefficient> Elimination<C> {
    pub fn run(m: &Matrix<LaurentPoly<C>>, nvars: usize) -> Self {
        let mut a = m.clone();
        let mut rows: Vec<usize> = (0..m.rows()).collect();
        let mut cols: Vec<usize> = (0..m.cols()).collect();
        let mut pivot_rows = Vec::new();
        let mut pivot_cols = Vec::new();
        let mut prev = LaurentPoly::one(nvars);
        loop {
            let mut best: Option<(usize, usize, usize)> = None;
            for &r in &rows {
                for &c in &cols {
                    let x = a.get(r, c);
                    if x.is_zero() {
                        continue;
                    }
                    let key = (x.num_terms(), r, c);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
            let Some((_, pr, pc)) = best else { break };
            rows.retain(|&r| r != pr);
            cols.retain(|&c| c != pc);
            let pivot = a.get(pr, pc).clone();
            for &r in &rows {
                let arc = a.get(r, pc).clone();
                for &c in &cols {
                    let updated = &(&pivot * a.get(r, c)) - &(&arc * a.get(pr, c));
                    a[(r, c)] = updated
                        .exact_div(&prev)
                        .expect("Bareiss step divides exactly");
                }
                a[(r, pc)] = LaurentPoly::zero(nvars);
            }
            prev = pivot;
            pivot_rows.push(pr);
            pivot_cols.push(pc);
        }
        Elimination {
            pivot_rows,
            pivot_cols,
            last_pivot: prev,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }

    pub fn sorted_rows(&self) -> Vec<usize> {
        let mut v = self.pivot_rows.clone();
        v.sort_unstable();
        v
    }

    pub fn sorted_cols(&self) -> Vec<usize> {
        let mut v = self.pivot_cols.clone();
        v.sort_unstable();
        v
    }

    /// Determinant of the nonsingular minor on the sorted pivot rows and
    /// sorted pivot columns.
    pub fn minor_det(&self) -> LaurentPoly<C> {
        let odd = permutation_sign(&rank_order(&self.pivot_rows))
            ^ permutation_sign(&rank_order(&self.pivot_cols));
        if odd {
            -&self.last_pivot
        } else {
            self.last_pivot.clone()
        }
    }
}

/// Replaces each entry of `seq` by its rank within `seq`.
fn rank_order(seq: &[usize]) -> Vec<usize> {
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    seq.iter()
        .map(|x| sorted.binary_search(x).expect("present"))
        .collect()
}

pub fn det<C: Coefficient>(
    m: &Matrix<LaurentPoly<C>>,
    nvars: usize,
) -> Result<LaurentPoly<C>, RingError> {
    if !m.is_square() {
        return Err(RingError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let e = Elimination::run(m, nvars);
    if e.rank() < m.rows() {
        Ok(LaurentPoly::zero(nvars))
    } else {
        Ok(e.minor_det())
    }
}

/// Classical adjugate: `adj(m) · m = det(m) · 1`.
pub fn adjugate<C: Coefficient>(
    m: &Matrix<LaurentPoly<C>>,
    nvars: usize,
) -> Result<Matrix<LaurentPoly<C>>, RingError> {
    if !m.is_square() {
        return Err(RingError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 1 {
        return Ok(Matrix::identity(1, nvars));
    }
    let mut adj = Matrix::zeros(n, n, nvars);
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = det(&m.submatrix(&rows, &cols), nvars)?;
            adj[(j, i)] = if (i + j) % 2 == 1 { -minor } else { minor };
        }
    }
    Ok(adj)
}

/// Solves `a · x = b` over the fraction field for `a` of full column rank.
///
/// Returns `None` when `a` is rank deficient or the system is inconsistent.
pub fn solve<C: Coefficient>(
    a: &Matrix<LaurentPoly<C>>,
    b: &[LaurentPoly<C>],
    nvars: usize,
) -> Option<Vec<RationalFunction<C>>> {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    let n = a.cols();
    let e = Elimination::run(a, nvars);
    if e.rank() < n {
        return None;
    }
    let rows = e.sorted_rows();
    let square = a.submatrix(&rows, &(0..n).collect::<Vec<_>>());
    let d = det(&square, nvars).ok()?;
    let mut nums = Vec::with_capacity(n);
    for j in 0..n {
        let mut replaced = square.clone();
        for (i, &r) in rows.iter().enumerate() {
            replaced[(i, j)] = b[r].clone();
        }
        nums.push(det(&replaced, nvars).ok()?);
    }
    // every row, not just the pivot rows, must be satisfied
    for (r, rhs) in b.iter().enumerate() {
        let mut lhs = LaurentPoly::zero(nvars);
        for (j, x) in nums.iter().enumerate() {
            lhs += &(a.get(r, j) * x);
        }
        if lhs != rhs * &d {
            return None;
        }
    }
    nums.into_iter()
        .map(|x| RationalFunction::new(x, d.clone()).ok())
        .collect()
}

/// A matrix over the fraction field stored as a polynomial matrix with one
/// denominator per row: entry (r, c) is `num[r][c] / row_den[r]`.
///
/// Row scaling does not change which minors vanish, so pivot selection runs
/// on the numerator alone.
#[derive(Debug, Clone, PartialEq)]
pub struct FracMatrix<C> {
    pub num: Matrix<LaurentPoly<C>>,
    pub row_den: Vec<LaurentPoly<C>>,
}

impl<C: Coefficient> FracMatrix<C> {
    pub fn from_poly(m: Matrix<LaurentPoly<C>>, nvars: usize) -> Self {
        let row_den = vec![LaurentPoly::one(nvars); m.rows()];
        FracMatrix { num: m, row_den }
    }

    /// Clears denominators row by row.
    pub fn from_rational(m: &Matrix<RationalFunction<C>>, nvars: usize) -> Self {
        let mut num = Matrix::zeros(m.rows(), m.cols(), nvars);
        let mut row_den = Vec::with_capacity(m.rows());
        for r in 0..m.rows() {
            let mut den = LaurentPoly::one(nvars);
            for x in m.row(r) {
                if !x.is_zero() && den.exact_div(x.denominator()).is_none() {
                    den = &den * x.denominator();
                }
            }
            for c in 0..m.cols() {
                let x = m.get(r, c);
                if !x.is_zero() {
                    let cofactor = den
                        .exact_div(x.denominator())
                        .expect("row denominator is a multiple");
                    num[(r, c)] = x.numerator() * &cofactor;
                }
            }
            row_den.push(den);
        }
        FracMatrix { num, row_den }
    }

    pub fn rows(&self) -> usize {
        self.num.rows()
    }

    pub fn cols(&self) -> usize {
        self.num.cols()
    }

    pub fn entry(&self, r: usize, c: usize) -> RationalFunction<C> {
        RationalFunction::new(self.num.get(r, c).clone(), self.row_den[r].clone())
            .expect("row denominators are nonzero")
    }

    pub fn to_rational(&self) -> Matrix<RationalFunction<C>> {
        Matrix::from_fn(self.rows(), self.cols(), |r, c| self.entry(r, c))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        FracMatrix {
            num: self.num.submatrix(rows, cols),
            row_den: rows.iter().map(|&r| self.row_den[r].clone()).collect(),
        }
    }

    /// Multiplies column `c` by `p`.
    pub fn scale_column(&mut self, c: usize, p: &LaurentPoly<C>) {
        for r in 0..self.rows() {
            let x = self.num.get(r, c) * p;
            self.num[(r, c)] = x;
        }
    }

    /// Divides row `r` by `p`.
    pub fn divide_row(&mut self, r: usize, p: &LaurentPoly<C>) {
        self.row_den[r] = &self.row_den[r] * p;
    }

    pub fn det(&self, nvars: usize) -> Result<RationalFunction<C>, RingError> {
        let num = det(&self.num, nvars)?;
        let den = self
            .row_den
            .iter()
            .fold(LaurentPoly::one(nvars), |acc, d| &acc * d);
        RationalFunction::new(num, den)
    }
}

pub fn det_rational<C: Coefficient>(
    m: &Matrix<RationalFunction<C>>,
    nvars: usize,
) -> Result<RationalFunction<C>, RingError> {
    FracMatrix::from_rational(m, nvars).det(nvars)
}
