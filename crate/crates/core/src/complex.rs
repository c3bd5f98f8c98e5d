//! Based chain complexes of free modules over ℤ[V][t^±].

use thiserror::Error;

use crate::ring::{solve, Elimination, LaurentPoly, Matrix, RingError, RingSpec};
use crate::scalar::Coefficient;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degree {0} is out of range")]
    DegreeOutOfRange(i64),
    #[error("basis index {index} out of range in degree {degree}")]
    IndexOutOfRange { degree: i64, index: usize },
    #[error("{0} is not a monomial unit")]
    NotUnit(String),
    #[error("d^2 != 0 at degree {0}")]
    NotAComplex(i64),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A finite chain complex with an ordered basis in each degree.
///
/// Degrees run from `min_degree` to `min_degree + dims.len() - 1`. The
/// boundary ∂ᵢ: Cᵢ → Cᵢ₋₁ is a `dim(i-1) × dim(i)` matrix acting on column
/// vectors; it is stored for every degree from `min_degree` to one past the
/// top, the two ends being empty matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasedChainComplex<C> {
    ring: RingSpec,
    min_degree: i64,
    dims: Vec<usize>,
    labels: Vec<Vec<String>>,
    d: Vec<Matrix<LaurentPoly<C>>>,
}

/// Outcome of [`BasedChainComplex::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    /// Degrees i at which ∂ᵢ₋₁∂ᵢ ≠ 0, with the offending entries.
    pub failures: Vec<(i64, Vec<(usize, usize)>)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failing_degrees(&self) -> Vec<i64> {
        self.failures.iter().map(|(d, _)| *d).collect()
    }
}

/// Homology classes over the fraction field, represented by polynomial cycle
/// vectors in the chain basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyBasis<C> {
    pub min_degree: i64,
    pub vectors: Vec<Vec<Vec<LaurentPoly<C>>>>,
}

impl<C: Coefficient> HomologyBasis<C> {
    pub fn empty(min_degree: i64, len: usize) -> Self {
        HomologyBasis {
            min_degree,
            vectors: vec![Vec::new(); len],
        }
    }

    pub fn in_degree(&self, i: i64) -> &[Vec<LaurentPoly<C>>] {
        usize::try_from(i - self.min_degree)
            .ok()
            .and_then(|k| self.vectors.get(k))
            .map_or(&[], Vec::as_slice)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.vectors.iter().map(Vec::len).collect()
    }
}

fn default_labels(min_degree: i64, dims: &[usize]) -> Vec<Vec<String>> {
    dims.iter()
        .enumerate()
        .map(|(k, &n)| {
            (0..n)
                .map(|j| format!("e{}_{j}", min_degree + k as i64))
                .collect()
        })
        .collect()
}

impl<C: Coefficient> BasedChainComplex<C> {
    /// `boundaries[k]` is ∂ from degree `min_degree + k + 1` to
    /// `min_degree + k`, of shape `dims[k] × dims[k + 1]`.
    pub fn new(
        ring: RingSpec,
        min_degree: i64,
        dims: Vec<usize>,
        boundaries: Vec<Matrix<LaurentPoly<C>>>,
    ) -> Result<Self, ComplexError> {
        ring.validate()?;
        let expected = dims.len().saturating_sub(1);
        if boundaries.len() != expected {
            return Err(ComplexError::Shape(format!(
                "{} boundary matrices for {} degrees, expected {expected}",
                boundaries.len(),
                dims.len()
            )));
        }
        let nvars = ring.rank();
        for (k, b) in boundaries.iter().enumerate() {
            if b.shape() != (dims[k], dims[k + 1]) {
                return Err(ComplexError::Shape(format!(
                    "boundary of degree {} is {}x{}, expected {}x{}",
                    min_degree + k as i64 + 1,
                    b.rows(),
                    b.cols(),
                    dims[k],
                    dims[k + 1]
                )));
            }
            if let Some(x) = b.iter().map(|(_, _, x)| x).find(|x| x.nvars() != nvars) {
                return Err(RingError::Mismatch {
                    left: nvars,
                    right: x.nvars(),
                }
                .into());
            }
        }
        let mut d = Vec::with_capacity(dims.len() + 1);
        d.push(Matrix::zeros(0, dims.first().copied().unwrap_or(0), nvars));
        d.extend(boundaries);
        d.push(Matrix::zeros(dims.last().copied().unwrap_or(0), 0, nvars));
        let labels = default_labels(min_degree, &dims);
        Ok(BasedChainComplex {
            ring,
            min_degree,
            dims,
            labels,
            d,
        })
    }

    /// The zero complex.
    pub fn empty(ring: RingSpec) -> Self {
        Self::new(ring, 0, Vec::new(), Vec::new()).expect("empty complex is well formed")
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self, ComplexError> {
        if labels.len() != self.dims.len()
            || labels.iter().zip(&self.dims).any(|(l, &n)| l.len() != n)
        {
            return Err(ComplexError::Shape("labels do not match dims".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.ring.rank()
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    /// Top degree; below `min_degree` for the zero complex.
    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.min_degree..=self.max_degree()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, i: i64) -> usize {
        self.slot(i).map_or(0, |k| self.dims[k])
    }

    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    fn slot(&self, i: i64) -> Option<usize> {
        usize::try_from(i - self.min_degree)
            .ok()
            .filter(|&k| k < self.dims.len())
    }

    /// ∂ᵢ: Cᵢ → Cᵢ₋₁, an empty or zero matrix outside the stored range.
    pub fn boundary(&self, i: i64) -> Matrix<LaurentPoly<C>> {
        match usize::try_from(i - self.min_degree) {
            Ok(k) if k < self.d.len() => self.d[k].clone(),
            _ => Matrix::zeros(self.dim(i - 1), self.dim(i), self.nvars()),
        }
    }

    pub(crate) fn boundary_ref(&self, i: i64) -> Option<&Matrix<LaurentPoly<C>>> {
        usize::try_from(i - self.min_degree)
            .ok()
            .and_then(|k| self.d.get(k))
    }

    /// The boundaries in the serialized layout accepted by [`Self::new`].
    pub fn boundaries(&self) -> &[Matrix<LaurentPoly<C>>] {
        if self.dims.is_empty() {
            &[]
        } else {
            &self.d[1..self.dims.len()]
        }
    }

    pub fn is_empty(&self) -> bool {
        self.dims.iter().all(|&n| n == 0)
    }

    /// Checks ∂ᵢ₋₁∂ᵢ = 0 in every degree.
    pub fn validate(&self) -> ValidationReport {
        let nvars = self.nvars();
        let mut report = ValidationReport::default();
        for i in self.min_degree + 1..=self.max_degree() {
            let lower = self.boundary(i - 1);
            let upper = self.boundary(i);
            let prod = lower
                .checked_mul(&upper, nvars)
                .expect("stored shapes are consistent");
            let bad: Vec<(usize, usize)> = prod
                .iter()
                .filter(|(_, _, x)| !x.is_zero())
                .map(|(r, c, _)| (r, c))
                .collect();
            if !bad.is_empty() {
                report.failures.push((i, bad));
            }
        }
        report
    }

    pub fn ensure_valid(&self) -> Result<(), ComplexError> {
        match self.validate().failures.first() {
            Some((i, _)) => Err(ComplexError::NotAComplex(*i)),
            None => Ok(()),
        }
    }

    /// Rank of ∂ᵢ over the fraction field.
    pub fn boundary_rank(&self, i: i64) -> usize {
        self.boundary_ref(i)
            .map_or(0, |m| Elimination::run(m, self.nvars()).rank())
    }

    /// Ranks of Hᵢ over the fraction field, one per degree.
    pub fn homology_ranks(&self) -> Vec<usize> {
        self.degrees()
            .map(|i| self.dim(i) - self.boundary_rank(i) - self.boundary_rank(i + 1))
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology_ranks().iter().all(|&r| r == 0)
    }

    /// A basis of Hᵢ over the fraction field in every degree.
    ///
    /// Kernel vectors come from Cramer's rule on a maximal nonsingular minor
    /// of ∂ᵢ, with denominators cleared; they are then kept greedily while
    /// independent of the boundaries and of each other.
    pub fn homology_basis(&self) -> HomologyBasis<C> {
        let nvars = self.nvars();
        let mut vectors = Vec::with_capacity(self.dims.len());
        for i in self.degrees() {
            let n = self.dim(i);
            let di = self.boundary(i);
            let kernel = kernel_basis(&di, nvars);
            let up = self.boundary(i + 1);
            let up_elim = Elimination::run(&up, nvars);
            let mut columns: Vec<Vec<LaurentPoly<C>>> = up_elim
                .sorted_cols()
                .into_iter()
                .map(|c| up.column(c))
                .collect();
            let mut chosen = Vec::new();
            for v in kernel {
                columns.push(v.clone());
                let m = Matrix::from_columns(&columns, n);
                if Elimination::run(&m, nvars).rank() == columns.len() {
                    chosen.push(v);
                } else {
                    columns.pop();
                }
            }
            vectors.push(chosen);
        }
        HomologyBasis {
            min_degree: self.min_degree,
            vectors,
        }
    }

    /// Multiplies the `index`-th basis vector of Cᵢ by the unit `u`.
    ///
    /// Column `index` of ∂ᵢ is multiplied by `u` and row `index` of ∂ᵢ₊₁
    /// by `u⁻¹`.
    pub fn rebase(&self, i: i64, index: usize, u: &LaurentPoly<C>) -> Result<Self, ComplexError> {
        let (neg, m) = u
            .as_unit()
            .ok_or_else(|| ComplexError::NotUnit(u.display(&self.ring).to_string()))?;
        if u.nvars() != self.nvars() {
            return Err(RingError::Mismatch {
                left: self.nvars(),
                right: u.nvars(),
            }
            .into());
        }
        let k = self.slot(i).ok_or(ComplexError::DegreeOutOfRange(i))?;
        if index >= self.dims[k] {
            return Err(ComplexError::IndexOutOfRange { degree: i, index });
        }
        let sign = |p: LaurentPoly<C>| if neg { -p } else { p };
        let inv = m.inverse();
        let mut out = self.clone();
        let down = &mut out.d[k];
        for r in 0..down.rows() {
            let x = sign(down.get(r, index).shift(m));
            down[(r, index)] = x;
        }
        let up = &mut out.d[k + 1];
        for c in 0..up.cols() {
            let x = sign(up.get(index, c).shift(&inv));
            up[(index, c)] = x;
        }
        Ok(out)
    }

    /// Re-indexes Cᵢ as Cᵢ₊ₖ.
    pub fn shift_degrees(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.min_degree += k;
        out
    }

    /// Direct sum with bases concatenated degreewise.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, ComplexError> {
        if self.ring != other.ring {
            return Err(RingError::Mismatch {
                left: self.nvars(),
                right: other.nvars(),
            }
            .into());
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.max_degree().max(other.max_degree());
        let nvars = self.nvars();
        let dims: Vec<usize> = (lo..=hi).map(|i| self.dim(i) + other.dim(i)).collect();
        let boundaries = (lo + 1..=hi)
            .map(|i| {
                let (a, b) = (self.boundary(i), other.boundary(i));
                Matrix::from_blocks(
                    &[a.rows(), b.rows()],
                    &[a.cols(), b.cols()],
                    |r, c| match (r, c) {
                        (0, 0) => Some(a.clone()),
                        (1, 1) => Some(b.clone()),
                        _ => None,
                    },
                    LaurentPoly::zero(nvars),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.ring.clone(), lo, dims, boundaries)
    }
}

/// Polynomial vectors spanning ker(m) over the fraction field, one per
/// non-pivot column.
pub fn kernel_basis<C: Coefficient>(
    m: &Matrix<LaurentPoly<C>>,
    nvars: usize,
) -> Vec<Vec<LaurentPoly<C>>> {
    let e = Elimination::run(m, nvars);
    let rows = e.sorted_rows();
    let cols = e.sorted_cols();
    let minor = m.submatrix(&rows, &cols);
    let mut out = Vec::new();
    for f in (0..m.cols()).filter(|c| !cols.contains(c)) {
        let rhs: Vec<LaurentPoly<C>> = rows.iter().map(|&r| -m.get(r, f)).collect();
        let x = solve(&minor, &rhs, nvars).expect("pivot minor is nonsingular");
        // clear denominators with a common multiple
        let mut den = LaurentPoly::one(nvars);
        for xi in &x {
            if den.exact_div(xi.denominator()).is_none() {
                den = &den * xi.denominator();
            }
        }
        let mut v = vec![LaurentPoly::zero(nvars); m.cols()];
        v[f] = den.clone();
        for (xi, &c) in x.iter().zip(&cols) {
            v[c] = xi.numerator() * &den.exact_div(xi.denominator()).expect("common multiple");
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type P = LaurentPoly<BigInt>;

    fn ring() -> RingSpec {
        RingSpec::default()
    }
    fn t() -> P {
        P::t_power(1, 0)
    }
    fn c(n: i64) -> P {
        P::from_int(n, 0)
    }
    fn one_by_one(p: P) -> Matrix<P> {
        Matrix::from_rows(vec![vec![p]], 1).unwrap()
    }

    #[test]
    fn two_term_complex_is_valid_and_acyclic() {
        let cx =
            BasedChainComplex::new(ring(), 0, vec![1, 1], vec![one_by_one(&c(1) - &t())]).unwrap();
        assert!(cx.validate().is_valid());
        assert_eq!(cx.homology_ranks(), vec![0, 0]);
    }

    #[test]
    fn broken_square_is_reported_at_degree_two() {
        let d1 = one_by_one(c(1));
        let d2 = one_by_one(t());
        let cx = BasedChainComplex::new(ring(), 0, vec![1, 1, 1], vec![d1, d2]).unwrap();
        let report = cx.validate();
        assert_eq!(report.failing_degrees(), vec![2]);
        assert_eq!(cx.ensure_valid(), Err(ComplexError::NotAComplex(2)));
    }

    #[test]
    fn empty_complex_is_valid() {
        let cx = BasedChainComplex::<BigInt>::empty(ring());
        assert!(cx.validate().is_valid());
        assert!(cx.homology_ranks().is_empty());
        let zeros =
            BasedChainComplex::<BigInt>::new(ring(), 0, vec![0, 0], vec![Matrix::zeros(0, 0, 0)])
                .unwrap();
        assert!(zeros.validate().is_valid());
    }

    #[test]
    fn zero_boundaries_give_full_homology() {
        let cx = BasedChainComplex::<BigInt>::new(
            ring(),
            0,
            vec![1, 3, 3, 1],
            vec![
                Matrix::zeros(1, 3, 0),
                Matrix::zeros(3, 3, 0),
                Matrix::zeros(3, 1, 0),
            ],
        )
        .unwrap();
        assert_eq!(cx.homology_ranks(), vec![1, 3, 3, 1]);
        assert_eq!(cx.homology_basis().ranks(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn shape_errors_are_caught() {
        let err =
            BasedChainComplex::<BigInt>::new(ring(), 0, vec![1, 2], vec![Matrix::zeros(2, 1, 0)]);
        assert!(matches!(err, Err(ComplexError::Shape(_))));
    }

    #[test]
    fn homology_basis_vectors_are_cycles() {
        // ∂₁ = [t - 1, 1 - t] has a one-dimensional kernel
        let d1 = Matrix::from_rows(vec![vec![&t() - &c(1), &c(1) - &t()]], 2).unwrap();
        let cx = BasedChainComplex::new(ring(), 0, vec![1, 2], vec![d1.clone()]).unwrap();
        let h = cx.homology_basis();
        assert_eq!(h.ranks(), vec![0, 1]);
        let v = &h.vectors[1][0];
        assert!(d1.mul_vec(v, 0).iter().all(P::is_zero));
    }

    #[test]
    fn rebase_scales_column_and_row() {
        let d1 = one_by_one(&c(1) - &t());
        let cx = BasedChainComplex::new(ring(), 0, vec![1, 1], vec![d1]).unwrap();
        let re = cx.rebase(1, 0, &t()).unwrap();
        assert_eq!(re.boundary(1).get(0, 0), &(&t() - &t().pow(2)));
        let re0 = cx.rebase(0, 0, &t()).unwrap();
        assert_eq!(re0.boundary(1).get(0, 0), &(&P::t_power(-1, 0) - &c(1)));
        assert!(matches!(
            cx.rebase(1, 0, &c(2)),
            Err(ComplexError::NotUnit(_))
        ));
    }
}
