//! Zeta functions of the gradient flow: orbit exponential, irreducible
//! product, trace exponential and Lefschetz determinant.
//!
//! Convention: ζ = ∏ᵢ det(1 − tφᵢ)^{(-1)^{i+1}}, so that φ₀ = [1] gives
//! (1 − t)⁻¹ and the trace formula holds factorwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::ring::{
    det, LaurentPoly, Matrix, Monomial, NovikovTruncation, RationalFunction, RingError,
};
use crate::scalar::Coefficient;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error("orbit class {0} has t-degree below 1")]
    NonPositiveClass(String),
    #[error("orbit {0} lacks eigenvalue counts")]
    MissingEigenData(usize),
    #[error("orbit {0}: {1}")]
    InvalidOrbit(usize, String),
    #[error("return map {0} is not square")]
    NotSquare(usize),
    #[error("return map {0} has entries involving t")]
    NotTFree(usize),
    #[error("return map is not triangular; eigenvalues cannot be read off")]
    NotTriangular,
    #[error("eigenvalue {0} has absolute value 1")]
    UnitEigenvalue(i64),
    #[error("coefficient of t^{0} is not integral")]
    NonIntegral(i64),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A closed orbit γ with class [γ], period p(γ) and Lefschetz sign ε(γ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedOrbit {
    pub class: Monomial,
    pub period: u32,
    pub sign: i8,
    pub i_minus: Option<u32>,
    pub i_zero: Option<u32>,
    pub return_map: Option<Vec<Vec<i64>>>,
}

/// A square integer matrix as a constant matrix over ℤ[t^±1].
pub fn int_matrix(a: &[Vec<i64>]) -> Matrix<LaurentPoly<BigInt>> {
    Matrix::from_fn(a.len(), a.len(), |r, c| LaurentPoly::from_int(a[r][c], 0))
}

fn int_mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| (0..n).map(|k| a[r][k] * b[k][c]).sum())
                .collect()
        })
        .collect()
}

/// det(I − A) for a small integer matrix.
pub fn det_one_minus(a: &[Vec<i64>]) -> BigInt {
    let n = a.len();
    let m = Matrix::from_fn(n, n, |r, c| {
        LaurentPoly::from_int(i64::from(r == c) - a[r][c], 0)
    });
    let d = det(&m, 0).expect("square");
    d.coefficient(&Monomial::one(0))
}

/// (i₋, i₀): counts of eigenvalues in (−∞, −1) and (−1, 1), read off the
/// diagonal of a triangular matrix.
pub fn eigen_counts(a: &[Vec<i64>]) -> Result<(u32, u32), ZetaError> {
    let n = a.len();
    let upper = (0..n).all(|r| (0..r).all(|c| a[r][c] == 0));
    let lower = (0..n).all(|r| (r + 1..n).all(|c| a[r][c] == 0));
    if !upper && !lower {
        return Err(ZetaError::NotTriangular);
    }
    let (mut minus, mut zero) = (0, 0);
    for (i, row) in a.iter().enumerate() {
        let lambda = row[i];
        if lambda.abs() == 1 {
            return Err(ZetaError::UnitEigenvalue(lambda));
        }
        if lambda < -1 {
            minus += 1;
        } else if lambda == 0 {
            zero += 1;
        }
    }
    Ok((minus, zero))
}

impl ClosedOrbit {
    pub fn new(class: Monomial, period: u32, sign: i8) -> Self {
        ClosedOrbit {
            class,
            period,
            sign,
            i_minus: None,
            i_zero: None,
            return_map: None,
        }
    }

    /// An irreducible orbit whose sign and eigenvalue counts are derived from
    /// a triangular integer return map.
    pub fn from_return_map(class: Monomial, a: Vec<Vec<i64>>) -> Result<Self, ZetaError> {
        let (i_minus, i_zero) = eigen_counts(&a)?;
        let d = det_one_minus(&a);
        Ok(ClosedOrbit {
            class,
            period: 1,
            sign: if d.is_negative() { -1 } else { 1 },
            i_minus: Some(i_minus),
            i_zero: Some(i_zero),
            return_map: Some(a),
        })
    }

    pub fn validate(&self, index: usize) -> Result<(), ZetaError> {
        if self.class.t < 1 {
            return Err(ZetaError::NonPositiveClass(self.class.to_string()));
        }
        if self.period == 0 {
            return Err(ZetaError::InvalidOrbit(
                index,
                "period must be positive".into(),
            ));
        }
        if self.sign != 1 && self.sign != -1 {
            return Err(ZetaError::InvalidOrbit(
                index,
                "sign must be +1 or -1".into(),
            ));
        }
        if let Some(a) = &self.return_map {
            if a.iter().any(|row| row.len() != a.len()) {
                return Err(ZetaError::NotSquare(index));
            }
            let d = det_one_minus(a);
            if d.is_zero() {
                return Err(ZetaError::InvalidOrbit(
                    index,
                    "degenerate return map".into(),
                ));
            }
            if (d.is_negative()) != (self.sign < 0) {
                return Err(ZetaError::InvalidOrbit(
                    index,
                    "sign disagrees with det(I - return map)".into(),
                ));
            }
        }
        Ok(())
    }

    /// γ, γ², … through t-degree `k`, with ε(γᵐ) = sign det(I − Aᵐ).
    pub fn iterates(&self, k: i64) -> Result<Vec<ClosedOrbit>, ZetaError> {
        let a = self
            .return_map
            .as_ref()
            .ok_or_else(|| ZetaError::InvalidOrbit(0, "iterates need a return map".into()))?;
        if self.class.t < 1 {
            return Err(ZetaError::NonPositiveClass(self.class.to_string()));
        }
        let mut out = Vec::new();
        let mut power = a.clone();
        let mut m: u32 = 1;
        while i64::from(m) * self.class.t <= k {
            let d = det_one_minus(&power);
            if d.is_zero() {
                return Err(ZetaError::InvalidOrbit(
                    0,
                    format!("iterate {m} is degenerate"),
                ));
            }
            out.push(ClosedOrbit {
                class: self.class.scale(i64::from(m)),
                period: m,
                sign: if d.is_negative() { -1 } else { 1 },
                i_minus: None,
                i_zero: None,
                return_map: Some(power.clone()),
            });
            power = int_mat_mul(&power, a);
            m += 1;
        }
        Ok(out)
    }
}

/// Return maps φᵢ: Eᵢ → Eᵢ, square matrices over ℤ[V].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnMapData<C> {
    pub phi: Vec<Matrix<LaurentPoly<C>>>,
}

impl<C: Coefficient> ReturnMapData<C> {
    pub fn new(phi: Vec<Matrix<LaurentPoly<C>>>) -> Result<Self, ZetaError> {
        for (i, m) in phi.iter().enumerate() {
            if !m.is_square() {
                return Err(ZetaError::NotSquare(i));
            }
            if m.iter().any(|(_, _, x)| !x.is_t_free()) {
                return Err(ZetaError::NotTFree(i));
            }
        }
        Ok(ReturnMapData { phi })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.phi.iter().map(Matrix::rows).collect()
    }
}

fn to_rational(p: &LaurentPoly<BigInt>) -> LaurentPoly<BigRational> {
    p.map_coefficients(|c| BigRational::from_integer(c.clone()))
}

/// Converts a rational series to integer coefficients, reporting the first
/// non-integral t-degree.
pub fn integral_series(
    s: &NovikovTruncation<BigRational>,
) -> Result<NovikovTruncation<BigInt>, ZetaError> {
    if let Some((m, _)) = s.poly().terms().find(|(_, c)| !c.is_integer()) {
        return Err(ZetaError::NonIntegral(m.t));
    }
    Ok(s.map_coefficients(|c| c.to_integer()))
}

/// exp(Σ ε(γ)/p(γ)·[γ]) through t-degree `k`.
///
/// The orbit list must contain every orbit of t-degree ≤ k, iterates
/// included; this is not checked.
pub fn zeta_exp(
    orbits: &[ClosedOrbit],
    nvars: usize,
    k: i64,
) -> Result<NovikovTruncation<BigRational>, ZetaError> {
    let mut log = LaurentPoly::zero(nvars);
    for (i, o) in orbits.iter().enumerate() {
        o.validate(i)?;
        if o.class.nvars() != nvars {
            return Err(RingError::Mismatch {
                left: nvars,
                right: o.class.nvars(),
            }
            .into());
        }
        if o.class.t <= k {
            let c = BigRational::new(BigInt::from(o.sign), BigInt::from(o.period));
            log.add_term(o.class.clone(), c);
        }
    }
    Ok(NovikovTruncation::new(log, k)
        .exp()
        .expect("rational coefficients divide exactly"))
}

/// ∏ (1 − (−1)^{i₋}[γ])^{−(−1)^{i₀}} over irreducible orbits, through
/// t-degree `k`.
pub fn zeta_product(
    irreducibles: &[ClosedOrbit],
    nvars: usize,
    k: i64,
) -> Result<NovikovTruncation<BigInt>, ZetaError> {
    let mut acc = NovikovTruncation::new(LaurentPoly::one(nvars), k);
    for (i, o) in irreducibles.iter().enumerate() {
        if o.class.t < 1 {
            return Err(ZetaError::NonPositiveClass(o.class.to_string()));
        }
        let (Some(minus), Some(zero)) = (o.i_minus, o.i_zero) else {
            return Err(ZetaError::MissingEigenData(i));
        };
        let g = LaurentPoly::monomial(o.class.clone());
        let factor = if minus % 2 == 0 {
            &LaurentPoly::one(nvars) - &g
        } else {
            &LaurentPoly::one(nvars) + &g
        };
        let term = if zero % 2 == 0 {
            NovikovTruncation::invert(&factor, k)?
        } else {
            NovikovTruncation::new(factor, k)
        };
        acc = acc.mul(&term).truncated(k);
    }
    Ok(acc)
}

fn check_nvars<C: Coefficient>(phi: &ReturnMapData<C>, nvars: usize) -> Result<(), ZetaError> {
    if let Some(x) = phi
        .phi
        .iter()
        .flat_map(|m| m.iter().map(|(_, _, x)| x))
        .find(|x| x.nvars() != nvars)
    {
        return Err(RingError::Mismatch {
            left: nvars,
            right: x.nvars(),
        }
        .into());
    }
    Ok(())
}

/// exp(Σₘ Σᵢ (−1)^i Tr(φᵢᵐ)·tᵐ/m) through t-degree `k`, checked integral.
pub fn zeta_trace(
    phi: &ReturnMapData<BigInt>,
    nvars: usize,
    k: i64,
) -> Result<NovikovTruncation<BigInt>, ZetaError> {
    check_nvars(phi, nvars)?;
    let mut log = LaurentPoly::<BigRational>::zero(nvars);
    for (i, m) in phi.phi.iter().enumerate() {
        let mut power = m.clone();
        for e in 1..=k {
            let tr = power.trace(nvars)?;
            let scale = BigRational::new(
                BigInt::from(if i % 2 == 0 { 1 } else { -1 }),
                BigInt::from(e),
            );
            log += &to_rational(&tr)
                .scale(&scale)
                .shift(&Monomial::t_power(e, nvars));
            if e < k {
                power = power.checked_mul(m, nvars)?;
            }
        }
    }
    let series = NovikovTruncation::new(log, k)
        .exp()
        .expect("rational coefficients divide exactly");
    integral_series(&series)
}

/// det(1 − tφ).
pub fn det_one_minus_t_phi<C: Coefficient>(
    phi: &Matrix<LaurentPoly<C>>,
    nvars: usize,
) -> Result<LaurentPoly<C>, RingError> {
    let t = LaurentPoly::t_power(1, nvars);
    let m = Matrix::identity(phi.rows(), nvars).checked_add(&phi.scale(&t).neg())?;
    det(&m, nvars)
}

/// ∏ᵢ det(1 − tφᵢ)^{(−1)^{i+1}}.
pub fn zeta_lefschetz<C: Coefficient>(
    phi: &ReturnMapData<C>,
    nvars: usize,
) -> Result<RationalFunction<C>, ZetaError> {
    check_nvars(phi, nvars)?;
    let mut num = LaurentPoly::one(nvars);
    let mut den = LaurentPoly::one(nvars);
    for (i, m) in phi.phi.iter().enumerate() {
        let d = det_one_minus_t_phi(m, nvars)?;
        if i % 2 == 0 {
            den = &den * &d;
        } else {
            num = &num * &d;
        }
    }
    Ok(RationalFunction::new(num, den)?)
}

/// Coefficient sequence of a single-variable integer series, for display and
/// comparison in tests.
pub fn t_coefficients(s: &NovikovTruncation<BigInt>, from: i64, to: i64) -> Vec<BigInt> {
    (from..=to)
        .map(|j| {
            let c = s.poly().t_coefficient(j);
            if c.is_zero() {
                BigInt::zero()
            } else {
                c.coefficient(&Monomial::one(s.nvars()))
            }
        })
        .collect()
}
