//! The 3-dimensional invariant I₃ = ζ·det(P).
//!
//! Relative classes are modeled as H₁ plus one torsor offset γ per object:
//! a series f with offset γ stands for the function h ↦ f(h + γ). Rebasing
//! a row of P by g multiplies det(P) by g and moves γ by g, so the relative
//! function is unchanged.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::novikov::{offset_factor, EulerLift, NovikovComplex, NovikovError};
use crate::ring::{det, LaurentPoly, Matrix, Monomial, NovikovTruncation, RingError, RingSpec};
use crate::scalar::Coefficient;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThreeDimError {
    #[error("path matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("path matrix entry ({row},{col}) has negative t-degree")]
    NegativeTDegree { row: usize, col: usize },
    #[error("{0} labels for {1} critical points")]
    LabelCount(usize, usize),
    #[error("class at t-degree {degree} is outside the truncation order {order}")]
    OutOfRange { degree: i64, order: i64 },
    #[error("Novikov complex has generators in degree {0}; only degrees 1 and 2 are allowed")]
    DegreeOutsideRange(i64),
    #[error("path matrix is {path}x{path} but the complex has {index1} index-1 and {index2} index-2 critical points")]
    DimensionMismatch {
        path: usize,
        index1: usize,
        index2: usize,
    },
    #[error("order {requested} exceeds the known order {available}")]
    InsufficientOrder { requested: i64, available: i64 },
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Flow-line counts from index-2 critical points (rows) to index-1
/// critical points (columns), with torsor offset γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathMatrix<C> {
    pub ring: RingSpec,
    pub matrix: Matrix<LaurentPoly<C>>,
    pub offset: Monomial,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl<C: Coefficient> PathMatrix<C> {
    pub fn new(
        ring: RingSpec,
        matrix: Matrix<LaurentPoly<C>>,
        offset: Monomial,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self, ThreeDimError> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(ThreeDimError::NotSquare { rows, cols });
        }
        let nvars = ring.rank();
        if offset.nvars() != nvars {
            return Err(RingError::Mismatch {
                left: nvars,
                right: offset.nvars(),
            }
            .into());
        }
        for (row, col, x) in matrix.iter() {
            if x.nvars() != nvars {
                return Err(RingError::Mismatch {
                    left: nvars,
                    right: x.nvars(),
                }
                .into());
            }
            if x.min_t().is_some_and(|m| m < 0) {
                return Err(ThreeDimError::NegativeTDegree { row, col });
            }
        }
        for labels in [&row_labels, &col_labels] {
            if labels.len() != rows {
                return Err(ThreeDimError::LabelCount(labels.len(), rows));
            }
        }
        Ok(PathMatrix {
            ring,
            matrix,
            offset,
            row_labels,
            col_labels,
        })
    }

    /// Labels `x{i}` for rows and `y{j}` for columns, zero offset.
    pub fn from_matrix(
        ring: RingSpec,
        matrix: Matrix<LaurentPoly<C>>,
    ) -> Result<Self, ThreeDimError> {
        let offset = Monomial::one(ring.rank());
        let rows = (0..matrix.rows()).map(|i| format!("x{i}")).collect();
        let cols = (0..matrix.cols()).map(|j| format!("y{j}")).collect();
        Self::new(ring, matrix, offset, rows, cols)
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Multiplies row `i` by the unit g; γ moves by g. A negative t-power
    /// in g is allowed only if the row stays in non-negative t-degree.
    pub fn rebase_row(&self, i: usize, g: &Monomial) -> Result<Self, ThreeDimError> {
        let mut out = self.clone();
        for c in 0..self.size() {
            out.matrix[(i, c)] = self.matrix.get(i, c).shift(g);
        }
        out.offset = &self.offset + g;
        Self::new(
            out.ring,
            out.matrix,
            out.offset,
            out.row_labels,
            out.col_labels,
        )
    }

    /// Multiplies column `j` by the unit h⁻¹; γ moves by −h.
    pub fn rebase_col(&self, j: usize, h: &Monomial) -> Result<Self, ThreeDimError> {
        let mut out = self.clone();
        let inv = h.inverse();
        for r in 0..self.size() {
            out.matrix[(r, j)] = self.matrix.get(r, j).shift(&inv);
        }
        out.offset = &self.offset - h;
        Self::new(
            out.ring,
            out.matrix,
            out.offset,
            out.row_labels,
            out.col_labels,
        )
    }
}

/// det(P) together with the torsor offset it is read against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDeterminant<C> {
    pub det: LaurentPoly<C>,
    pub offset: Monomial,
}

pub fn path_matrix_det<C: Coefficient>(p: &PathMatrix<C>) -> PathDeterminant<C> {
    PathDeterminant {
        det: det(&p.matrix, p.ring.rank()).expect("square by construction"),
        offset: p.offset.clone(),
    }
}

/// A truncated function on H₁: h ↦ coefficient of `series` at h + offset.
#[derive(Debug, Clone)]
pub struct CoefficientFunction<C> {
    pub series: NovikovTruncation<C>,
    pub offset: Monomial,
}

impl<C: Coefficient> CoefficientFunction<C> {
    pub fn new(series: NovikovTruncation<C>, offset: Monomial) -> Self {
        CoefficientFunction { series, offset }
    }

    pub fn order(&self) -> i64 {
        self.series.order()
    }

    /// The value at class h; errors when h + offset lies above the order.
    pub fn value(&self, h: &Monomial) -> Result<C, ThreeDimError> {
        let m = h + &self.offset;
        if m.t > self.order() {
            return Err(ThreeDimError::OutOfRange {
                degree: m.t,
                order: self.order(),
            });
        }
        Ok(self.series.poly().coefficient(&m))
    }

    /// Non-zero values keyed by class relative to the offset.
    pub fn support(&self) -> BTreeMap<Monomial, C> {
        self.series
            .poly()
            .terms()
            .map(|(m, c)| (m - &self.offset, c.clone()))
            .collect()
    }

    /// The same function read against offset 0.
    pub fn normalized(&self) -> NovikovTruncation<C> {
        self.series.shift(&self.offset.inverse())
    }

    /// Equal as functions on H₁, through the smaller of the two orders.
    pub fn same_function(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }

    pub fn same_function_up_to_sign(&self, other: &Self) -> bool {
        let (a, b) = (self.normalized(), other.normalized());
        a == b || a == b.neg()
    }
}

/// I₃ = ζ·det(P) truncated at t-degree `k`, carrying det(P)'s offset.
pub fn i3_coefficients<C: Coefficient>(
    zeta: &NovikovTruncation<C>,
    det_p: &PathDeterminant<C>,
    k: i64,
) -> CoefficientFunction<C> {
    let product = zeta.mul(&NovikovTruncation::exact(det_p.det.clone()));
    CoefficientFunction::new(product.truncated(k), det_p.offset.clone())
}

/// The integer T at the class of ξ: the coefficient at `xi_offset`.
pub fn t_invariant<C: Coefficient>(
    coeffs: &CoefficientFunction<C>,
    xi_offset: &Monomial,
) -> Result<C, ThreeDimError> {
    coeffs.value(xi_offset)
}

/// det(P)(· + γ) = ±τ(CN)(ξ)(· + ⟨ξ⟩) through t-degree `k`, where ⟨ξ⟩ is
/// the class by which ξ moves the torsion.
///
/// P must agree entrywise with the transpose of ∂₂ of CN based by ξ
/// through t-degree `k`; otherwise the check fails.
pub fn sw_consistency_check<C: Coefficient>(
    p: &PathMatrix<C>,
    cn: &NovikovComplex<C>,
    xi: &EulerLift,
    k: i64,
) -> Result<bool, ThreeDimError> {
    let c = &cn.complex;
    if let Some(i) = c.degrees().find(|&i| !(1..=2).contains(&i) && c.dim(i) > 0) {
        return Err(ThreeDimError::DegreeOutsideRange(i));
    }
    if let Some(o) = cn.order {
        if k > o {
            return Err(ThreeDimError::InsufficientOrder {
                requested: k,
                available: o,
            });
        }
    }
    let n = p.size();
    let (index1, index2) = (c.dim(1), c.dim(2));
    if index1 != n || index2 != n {
        return Err(ThreeDimError::DimensionMismatch {
            path: n,
            index1,
            index2,
        });
    }
    let based = cn.rebased(xi)?;
    let d2 = based.boundary(2);
    for r in 0..n {
        for col in 0..n {
            if d2.get(col, r).truncate(k) != p.matrix.get(r, col).truncate(k) {
                return Ok(false);
            }
        }
    }
    let nvars = p.ring.rank();
    let lhs = CoefficientFunction::new(
        NovikovTruncation::new(path_matrix_det(p).det, k),
        p.offset.clone(),
    );
    let xi_class = offset_factor(c.min_degree(), c.dims(), &xi.offsets, nvars);
    let rhs = match cn.tau_series(xi, k)? {
        Some(s) => CoefficientFunction::new(s, xi_class),
        None => CoefficientFunction::new(
            NovikovTruncation::new(LaurentPoly::zero(nvars), k),
            xi_class,
        ),
    };
    Ok(lhs.same_function_up_to_sign(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::BasedChainComplex;
    use crate::ring::RationalFunction;
    use num_bigint::BigInt;

    type P = LaurentPoly<BigInt>;

    fn t(k: i64) -> P {
        P::t_power(k, 0)
    }
    fn c(n: i64) -> P {
        P::from_int(n, 0)
    }
    fn path(rows: Vec<Vec<P>>) -> PathMatrix<BigInt> {
        let n = rows.len();
        PathMatrix::from_matrix(RingSpec::default(), Matrix::from_rows(rows, n).unwrap()).unwrap()
    }
    fn cn12(d2: Vec<Vec<P>>) -> NovikovComplex<BigInt> {
        let n = d2.len();
        let cx = BasedChainComplex::new(
            RingSpec::default(),
            1,
            vec![n, n],
            vec![Matrix::from_rows(d2, n).unwrap()],
        )
        .unwrap();
        NovikovComplex::new(cx, None).unwrap()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(
            path_matrix_det(&path(vec![vec![&c(1) - &t(1)]])).det,
            &c(1) - &t(1)
        );
        let id = path(vec![vec![c(1), c(0)], vec![c(0), c(1)]]);
        assert_eq!(path_matrix_det(&id).det, c(1));
        let p = path(vec![vec![&c(1) - &t(1), t(1)], vec![t(1), &c(1) - &t(1)]]);
        assert_eq!(path_matrix_det(&p).det, &(&c(1) - &t(1)).pow(2) - &t(2));
    }

    #[test]
    fn non_square_and_negative_degree_rejected() {
        let m = Matrix::from_rows(vec![vec![c(1), c(2)]], 2).unwrap();
        assert!(matches!(
            PathMatrix::from_matrix(RingSpec::default(), m),
            Err(ThreeDimError::NotSquare { .. })
        ));
        let m = Matrix::from_rows(vec![vec![t(-1)]], 1).unwrap();
        assert!(PathMatrix::from_matrix(RingSpec::default(), m).is_err());
    }

    #[test]
    fn i3_examples() {
        let one = NovikovTruncation::new(c(1), 8);
        let d = PathDeterminant {
            det: &c(1) - &t(1),
            offset: Monomial::one(0),
        };
        let f = i3_coefficients(&one, &d, 8);
        assert_eq!(f.support().len(), 2);
        assert_eq!(f.value(&Monomial::t_power(1, 0)).unwrap(), BigInt::from(-1));

        let zeta = RationalFunction::new(c(1), &c(1) - &t(1))
            .unwrap()
            .expand(8)
            .unwrap();
        let f = i3_coefficients(&zeta, &d, 8);
        assert_eq!(
            f.support().into_iter().collect::<Vec<_>>(),
            vec![(Monomial::one(0), BigInt::from(1))]
        );

        let cat = RationalFunction::new(
            &(&c(1) - &t(1).scale(&BigInt::from(3))) + &t(2),
            (&c(1) - &t(1)).pow(2),
        )
        .unwrap()
        .expand(2)
        .unwrap();
        let unit = PathDeterminant {
            det: c(1),
            offset: Monomial::one(0),
        };
        let f = i3_coefficients(&cat, &unit, 2);
        let values: Vec<i64> = (0..=2)
            .map(|k| i64::try_from(f.value(&Monomial::t_power(k, 0)).unwrap()).unwrap())
            .collect();
        assert_eq!(values, vec![1, -1, -2]);
    }

    #[test]
    fn t_invariant_examples() {
        let f =
            CoefficientFunction::new(NovikovTruncation::new(&c(1) - &t(1), 2), Monomial::one(0));
        assert_eq!(t_invariant(&f, &Monomial::one(0)).unwrap(), BigInt::from(1));
        assert_eq!(
            t_invariant(&f, &Monomial::t_power(1, 0)).unwrap(),
            BigInt::from(-1)
        );
        assert!(matches!(
            t_invariant(&f, &Monomial::t_power(3, 0)),
            Err(ThreeDimError::OutOfRange {
                degree: 3,
                order: 2
            })
        ));
    }

    #[test]
    fn rebasing_keeps_the_relative_function() {
        let p = path(vec![vec![&c(1) - &t(1), t(1)], vec![t(2), c(1)]]);
        let q = p
            .rebase_row(0, &Monomial::t_power(1, 0))
            .unwrap()
            .rebase_col(1, &Monomial::t_power(-2, 0))
            .unwrap();
        let zeta = NovikovTruncation::new(c(1), 10);
        let a = i3_coefficients(&zeta, &path_matrix_det(&p), 10);
        let b = i3_coefficients(&zeta, &path_matrix_det(&q), 10);
        assert!(a.same_function(&b));
        assert_ne!(a.series.poly(), b.series.poly());
    }

    #[test]
    fn sw_examples() {
        let cn = cn12(vec![vec![&c(1) - &t(1)]]);
        let p = path(vec![vec![&c(1) - &t(1)]]);
        assert!(sw_consistency_check(&p, &cn, &EulerLift::zero(2, 0), 8).unwrap());

        // index-1 generator first, then index-2
        let xi = EulerLift {
            offsets: vec![Monomial::one(0), Monomial::t_power(1, 0)],
        };
        let q = p.rebase_row(0, &Monomial::t_power(1, 0)).unwrap();
        assert!(sw_consistency_check(&q, &cn, &xi, 8).unwrap());
        assert!(!sw_consistency_check(&q, &cn, &EulerLift::zero(2, 0), 8).unwrap());

        let d2 = vec![vec![&c(1) - &t(1), t(1)], vec![c(0), &c(1) - &t(2)]];
        let cn = cn12(d2.clone());
        let transposed = path(d2.clone());
        let proper = path(Matrix::from_rows(d2, 2).unwrap().transpose().to_rows());
        let zero = EulerLift::zero(4, 0);
        assert!(sw_consistency_check(&proper, &cn, &zero, 8).unwrap());
        assert!(!sw_consistency_check(&transposed, &cn, &zero, 8).unwrap());
    }

    #[test]
    fn sw_rejects_other_degrees() {
        let cx = BasedChainComplex::new(
            RingSpec::default(),
            0,
            vec![1, 1],
            vec![Matrix::from_rows(vec![vec![&c(1) - &t(1)]], 1).unwrap()],
        )
        .unwrap();
        let cn = NovikovComplex::new(cx, None).unwrap();
        let p = path(vec![vec![&c(1) - &t(1)]]);
        assert!(matches!(
            sw_consistency_check(&p, &cn, &EulerLift::zero(2, 0), 4),
            Err(ThreeDimError::DegreeOutsideRange(0))
        ));
    }
}
