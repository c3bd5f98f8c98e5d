//! Reidemeister torsion of based complexes.
//!
//! τ is computed as ±∏ det(∂: Aᵢ → Bᵢ₋₁)^{(-1)^i} over a decomposition
//! Cᵢ = Aᵢ ⊕ Bᵢ into spans of basis vectors. τ̂ with a homology basis uses
//! the same exponent convention, so the two agree on acyclic complexes.

use std::fmt;

use thiserror::Error;

use crate::complex::{BasedChainComplex, ComplexError, HomologyBasis};
use crate::ring::{
    det, solve, Elimination, FracMatrix, LaurentPoly, Matrix, RationalFunction, RingError, RingSpec,
};
use crate::scalar::Coefficient;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorsionError {
    #[error("invalid homology basis in degree {degree}: {reason}")]
    InvalidHomologyBasis { degree: i64, reason: String },
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("incompatible bases: {0}")]
    IncompatibleBases(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A torsion value modulo ± monomial units, or 0 for a complex that is not
/// acyclic.
#[derive(Debug, Clone)]
pub enum TorsionValue<C> {
    Zero,
    NonZero(RationalFunction<C>),
}

impl<C: Coefficient> TorsionValue<C> {
    /// Canonicalizes a raw value; `None` stands for 0.
    pub fn from_raw(raw: Option<RationalFunction<C>>) -> Self {
        match raw {
            Some(r) if !r.is_zero() => {
                TorsionValue::NonZero(r.canonical_mod_units().expect("nonzero"))
            }
            _ => TorsionValue::Zero,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TorsionValue::Zero)
    }

    pub fn value(&self) -> Option<&RationalFunction<C>> {
        match self {
            TorsionValue::Zero => None,
            TorsionValue::NonZero(r) => Some(r),
        }
    }

    /// Product of canonical values, canonicalized again.
    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (TorsionValue::NonZero(a), TorsionValue::NonZero(b)) => Self::from_raw(Some(a * b)),
            _ => TorsionValue::Zero,
        }
    }

    pub fn render(&self, ring: &RingSpec) -> String {
        match self {
            TorsionValue::Zero => "0".to_owned(),
            TorsionValue::NonZero(r) => r.display(ring).to_string(),
        }
    }
}

/// Equality modulo ± monomial units.
impl<C: Coefficient> PartialEq for TorsionValue<C> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (TorsionValue::Zero, TorsionValue::Zero) => true,
            (TorsionValue::NonZero(a), TorsionValue::NonZero(b)) => a.equal_mod_units(b),
            _ => false,
        }
    }
}

impl<C: Coefficient> Eq for TorsionValue<C> {}

impl<C: Coefficient> fmt::Display for TorsionValue<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorsionValue::Zero => f.write_str("0"),
            TorsionValue::NonZero(r) => write!(f, "{r}"),
        }
    }
}

/// A based complex over the fraction field: boundaries with per-row
/// denominators, indexed like [`BasedChainComplex`] (one matrix per degree
/// from `min_degree` to one past the top).
#[derive(Debug, Clone)]
pub struct FracComplex<C> {
    pub nvars: usize,
    pub min_degree: i64,
    pub dims: Vec<usize>,
    pub d: Vec<FracMatrix<C>>,
}

impl<C: Coefficient> FracComplex<C> {
    pub fn from_complex(c: &BasedChainComplex<C>) -> Self {
        let top = c.max_degree() + 1;
        FracComplex {
            nvars: c.nvars(),
            min_degree: c.min_degree(),
            dims: c.dims().to_vec(),
            d: (c.min_degree()..=top)
                .map(|i| FracMatrix::from_poly(c.boundary(i), c.nvars()))
                .collect(),
        }
    }

    fn degree(&self, k: usize) -> i64 {
        self.min_degree + k as i64
    }
}

/// Index sets Aᵢ, Bᵢ ⊂ basis of Cᵢ, one pair per degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub min_degree: i64,
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
}

fn complement(n: usize, chosen: &[usize]) -> Vec<usize> {
    (0..n).filter(|j| !chosen.contains(j)).collect()
}

/// The decomposition produced by greedy elimination, bottom degree first;
/// `None` when the complex is not acyclic.
pub fn greedy_decomposition_frac<C: Coefficient>(fc: &FracComplex<C>) -> Option<Decomposition> {
    let mut a = Vec::with_capacity(fc.dims.len());
    let mut b: Vec<Vec<usize>> = Vec::with_capacity(fc.dims.len());
    for k in 0..fc.dims.len() {
        let rows: Vec<usize> = if k == 0 { Vec::new() } else { b[k - 1].clone() };
        let all: Vec<usize> = (0..fc.dims[k]).collect();
        let m = fc.d[k].num.submatrix(&rows, &all);
        let e = Elimination::run(&m, fc.nvars);
        if e.rank() < rows.len() {
            return None;
        }
        let ak = e.sorted_cols();
        b.push(complement(fc.dims[k], &ak));
        a.push(ak);
    }
    if b.last().is_some_and(|top| !top.is_empty()) {
        return None;
    }
    Some(Decomposition {
        min_degree: fc.min_degree,
        a,
        b,
    })
}

pub fn greedy_decomposition<C: Coefficient>(c: &BasedChainComplex<C>) -> Option<Decomposition> {
    greedy_decomposition_frac(&FracComplex::from_complex(c))
}

/// ∏ det(∂: Aᵢ → Bᵢ₋₁)^{(-1)^i}; `None` if the index sets do not form a
/// valid decomposition.
pub fn torsion_from_decomposition_frac<C: Coefficient>(
    fc: &FracComplex<C>,
    dec: &Decomposition,
) -> Option<RationalFunction<C>> {
    if dec.a.len() != fc.dims.len() || dec.b.len() != fc.dims.len() {
        return None;
    }
    if dec.b.last().is_some_and(|top| !top.is_empty()) {
        return None;
    }
    let mut acc = RationalFunction::one(fc.nvars);
    for k in 0..fc.dims.len() {
        let (ak, bk) = (&dec.a[k], &dec.b[k]);
        let mut union: Vec<usize> = ak.iter().chain(bk).copied().collect();
        union.sort_unstable();
        if union != (0..fc.dims[k]).collect::<Vec<_>>() {
            return None;
        }
        let rows: &[usize] = if k == 0 { &[] } else { &dec.b[k - 1] };
        if rows.len() != ak.len() {
            return None;
        }
        let dk = fc.d[k].submatrix(rows, ak).det(fc.nvars).ok()?;
        if dk.is_zero() {
            return None;
        }
        let factor = if fc.degree(k) % 2 == 0 {
            dk
        } else {
            dk.inv().ok()?
        };
        acc = &acc * &factor;
    }
    Some(acc)
}

pub fn torsion_from_decomposition<C: Coefficient>(
    c: &BasedChainComplex<C>,
    dec: &Decomposition,
) -> Option<RationalFunction<C>> {
    torsion_from_decomposition_frac(&FracComplex::from_complex(c), dec)
}

/// Raw torsion from the greedy decomposition, correct up to sign; `None`
/// when the complex is not acyclic.
pub fn raw_torsion_frac<C: Coefficient>(fc: &FracComplex<C>) -> Option<RationalFunction<C>> {
    let dec = greedy_decomposition_frac(fc)?;
    torsion_from_decomposition_frac(fc, &dec)
}

pub fn raw_torsion<C: Coefficient>(c: &BasedChainComplex<C>) -> Option<RationalFunction<C>> {
    raw_torsion_frac(&FracComplex::from_complex(c))
}

/// τ modulo ± monomial units; 0 if the complex is not acyclic.
pub fn torsion_tau<C: Coefficient>(c: &BasedChainComplex<C>) -> TorsionValue<C> {
    TorsionValue::from_raw(raw_torsion(c))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            go(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every valid decomposition. Exponential; meant for small complexes.
pub fn all_decompositions<C: Coefficient>(c: &BasedChainComplex<C>) -> Vec<Decomposition> {
    let fc = FracComplex::from_complex(c);
    let mut out = Vec::new();
    fn go<C: Coefficient>(
        fc: &FracComplex<C>,
        k: usize,
        a: &mut Vec<Vec<usize>>,
        b: &mut Vec<Vec<usize>>,
        out: &mut Vec<Decomposition>,
    ) {
        if k == fc.dims.len() {
            if b.last().is_none_or(Vec::is_empty) {
                out.push(Decomposition {
                    min_degree: fc.min_degree,
                    a: a.clone(),
                    b: b.clone(),
                });
            }
            return;
        }
        let rows: Vec<usize> = if k == 0 { Vec::new() } else { b[k - 1].clone() };
        for ak in subsets(fc.dims[k], rows.len()) {
            let minor = fc.d[k].num.submatrix(&rows, &ak);
            if det(&minor, fc.nvars).map_or(true, |d| d.is_zero()) {
                continue;
            }
            b.push(complement(fc.dims[k], &ak));
            a.push(ak);
            go(fc, k + 1, a, b, out);
            a.pop();
            b.pop();
        }
    }
    go(&fc, 0, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

fn invalid(degree: i64, reason: impl Into<String>) -> TorsionError {
    TorsionError::InvalidHomologyBasis {
        degree,
        reason: reason.into(),
    }
}

/// Checks that `h` consists of cycles whose classes form a basis of homology.
pub fn check_homology_basis<C: Coefficient>(
    c: &BasedChainComplex<C>,
    h: &HomologyBasis<C>,
) -> Result<(), TorsionError> {
    let nvars = c.nvars();
    let ranks = c.homology_ranks();
    if h.vectors
        .iter()
        .enumerate()
        .any(|(k, v)| !v.is_empty() && !c.degrees().contains(&(h.min_degree + k as i64)))
    {
        return Err(invalid(
            h.min_degree,
            "vectors outside the complex's degrees",
        ));
    }
    for (i, &rank) in c.degrees().zip(&ranks) {
        let vs = h.in_degree(i);
        if vs.len() != rank {
            return Err(invalid(
                i,
                format!("{} vectors for homology of rank {rank}", vs.len()),
            ));
        }
        let di = c.boundary(i);
        for v in vs {
            if v.len() != c.dim(i) {
                return Err(invalid(i, "vector length does not match the module rank"));
            }
            if v.iter().any(|x| x.nvars() != nvars) {
                return Err(RingError::Mismatch {
                    left: nvars,
                    right: v
                        .iter()
                        .find(|x| x.nvars() != nvars)
                        .expect("found")
                        .nvars(),
                }
                .into());
            }
            if !di.mul_vec(v, nvars).iter().all(LaurentPoly::is_zero) {
                return Err(invalid(i, "vector is not a cycle"));
            }
        }
    }
    Ok(())
}

/// The change-of-basis matrix [∂bᵢ₊₁ | hᵢ | bᵢ] in degree i, where bᵢ are
/// the basis vectors at the pivot columns of ∂ᵢ.
fn tau_hat_block<C: Coefficient>(
    c: &BasedChainComplex<C>,
    h: &HomologyBasis<C>,
    i: i64,
) -> Matrix<LaurentPoly<C>> {
    let nvars = c.nvars();
    let n = c.dim(i);
    let up = c.boundary(i + 1);
    let mut columns: Vec<Vec<LaurentPoly<C>>> = Elimination::run(&up, nvars)
        .sorted_cols()
        .into_iter()
        .map(|j| up.column(j))
        .collect();
    columns.extend(h.in_degree(i).iter().cloned());
    for j in Elimination::run(&c.boundary(i), nvars).sorted_cols() {
        let mut e = vec![LaurentPoly::zero(nvars); n];
        e[j] = LaurentPoly::one(nvars);
        columns.push(e);
    }
    Matrix::from_columns(&columns, n)
}

/// τ̂(C, e, h) = ∏ det[∂bᵢ₊₁ | hᵢ | bᵢ]^{(-1)^{i+1}}, with its raw sign.
pub fn tau_hat_raw<C: Coefficient>(
    c: &BasedChainComplex<C>,
    h: &HomologyBasis<C>,
) -> Result<RationalFunction<C>, TorsionError> {
    check_homology_basis(c, h)?;
    let nvars = c.nvars();
    let mut acc = RationalFunction::one(nvars);
    for i in c.degrees() {
        let block = tau_hat_block(c, h, i);
        let d = det(&block, nvars)?;
        if d.is_zero() {
            return Err(invalid(i, "classes are dependent modulo boundaries"));
        }
        let d = RationalFunction::from_poly(d);
        acc = if i % 2 == 0 { &acc / &d } else { &acc * &d };
    }
    Ok(acc)
}

pub fn torsion_tau_hat<C: Coefficient>(
    c: &BasedChainComplex<C>,
    h: &HomologyBasis<C>,
) -> Result<TorsionValue<C>, TorsionError> {
    Ok(TorsionValue::from_raw(Some(tau_hat_raw(c, h)?)))
}

/// 0 → C → C′ → C″ → 0 with C′ᵢ = Cᵢ ⊕ C″ᵢ and bases compatible with the
/// splitting, so that ∂′ = [[∂, X], [0, ∂″]].
#[derive(Debug, Clone)]
pub struct ShortExactSequence<C> {
    pub sub: BasedChainComplex<C>,
    pub total: BasedChainComplex<C>,
    pub quotient: BasedChainComplex<C>,
}

impl<C: Coefficient> ShortExactSequence<C> {
    /// Splits `total` with the first `sub_dims[k]` basis vectors of each
    /// degree spanning the subcomplex.
    pub fn from_total(
        total: BasedChainComplex<C>,
        sub_dims: &[usize],
    ) -> Result<Self, TorsionError> {
        if sub_dims.len() != total.dims().len()
            || sub_dims.iter().zip(total.dims()).any(|(s, t)| s > t)
        {
            return Err(TorsionError::IncompatibleBases(
                "subcomplex ranks do not fit the total complex".into(),
            ));
        }
        total.ensure_valid()?;
        let lo = total.min_degree();
        let sub_dim = |i: i64| {
            usize::try_from(i - lo)
                .ok()
                .and_then(|k| sub_dims.get(k))
                .copied()
                .unwrap_or(0)
        };
        let mut sub_b = Vec::new();
        let mut quot_b = Vec::new();
        for i in lo + 1..=total.max_degree() {
            let d = total.boundary(i);
            let (s_rows, s_cols) = (sub_dim(i - 1), sub_dim(i));
            for r in s_rows..d.rows() {
                for c in 0..s_cols {
                    if !d.get(r, c).is_zero() {
                        return Err(TorsionError::NotExact(format!(
                            "boundary of degree {i} does not preserve the subcomplex"
                        )));
                    }
                }
            }
            let rows: Vec<usize> = (0..s_rows).collect();
            let cols: Vec<usize> = (0..s_cols).collect();
            let q_rows: Vec<usize> = (s_rows..d.rows()).collect();
            let q_cols: Vec<usize> = (s_cols..d.cols()).collect();
            sub_b.push(d.submatrix(&rows, &cols));
            quot_b.push(d.submatrix(&q_rows, &q_cols));
        }
        let ring = total.ring().clone();
        let q_dims: Vec<usize> = total
            .dims()
            .iter()
            .zip(sub_dims)
            .map(|(t, s)| t - s)
            .collect();
        let sub = BasedChainComplex::new(ring.clone(), lo, sub_dims.to_vec(), sub_b)?;
        let quotient = BasedChainComplex::new(ring, lo, q_dims, quot_b)?;
        Ok(ShortExactSequence {
            sub,
            total,
            quotient,
        })
    }

    /// Builds C′ from C, C″ and the coupling maps Xᵢ: C″ᵢ → Cᵢ₋₁, given for
    /// degrees `min + 1 ..= max`.
    pub fn from_parts(
        sub: BasedChainComplex<C>,
        quotient: BasedChainComplex<C>,
        coupling: Vec<Matrix<LaurentPoly<C>>>,
    ) -> Result<Self, TorsionError> {
        if sub.ring() != quotient.ring()
            || sub.min_degree() != quotient.min_degree()
            || sub.dims().len() != quotient.dims().len()
        {
            return Err(TorsionError::IncompatibleBases(
                "sub and quotient complexes span different degrees or rings".into(),
            ));
        }
        let nvars = sub.nvars();
        let lo = sub.min_degree();
        let dims: Vec<usize> = sub
            .dims()
            .iter()
            .zip(quotient.dims())
            .map(|(a, b)| a + b)
            .collect();
        if coupling.len() != dims.len().saturating_sub(1) {
            return Err(TorsionError::IncompatibleBases(
                "wrong number of coupling maps".into(),
            ));
        }
        let boundaries = (lo + 1..=sub.max_degree())
            .zip(&coupling)
            .map(|(i, x)| {
                let (d, q) = (sub.boundary(i), quotient.boundary(i));
                Matrix::from_blocks(
                    &[d.rows(), q.rows()],
                    &[d.cols(), q.cols()],
                    |r, c| match (r, c) {
                        (0, 0) => Some(d.clone()),
                        (0, 1) => Some(x.clone()),
                        (1, 1) => Some(q.clone()),
                        _ => None,
                    },
                    LaurentPoly::zero(nvars),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let total = BasedChainComplex::new(sub.ring().clone(), lo, dims, boundaries)?;
        total
            .ensure_valid()
            .map_err(|e| TorsionError::NotExact(e.to_string()))?;
        let sub_dims = sub.dims().to_vec();
        Self::from_total(total, &sub_dims)
    }

    fn sub_dim(&self, i: i64) -> usize {
        self.sub.dim(i)
    }
}

/// Coordinates of the cycle `z` in the basis `h` of homology, modulo the
/// image of `up`.
fn homology_coordinates<C: Coefficient>(
    z: &[LaurentPoly<C>],
    h: &[Vec<LaurentPoly<C>>],
    up: &Matrix<LaurentPoly<C>>,
    nvars: usize,
) -> Option<Vec<RationalFunction<C>>> {
    let mut columns: Vec<Vec<LaurentPoly<C>>> = h.to_vec();
    let e = Elimination::run(up, nvars);
    columns.extend(e.sorted_cols().into_iter().map(|j| up.column(j)));
    let m = Matrix::from_columns(&columns, z.len());
    let mut x = solve(&m, z, nvars)?;
    x.truncate(h.len());
    Some(x)
}

/// The long exact homology sequence as an acyclic complex based by h, h′, h″.
///
/// Hᵢ(C), Hᵢ(C′), Hᵢ(C″) sit in degrees 3i+2, 3i+1, 3i, with maps i_*, p_*
/// and the connecting map δ[z] = [X z].
pub fn long_exact_sequence<C: Coefficient>(
    ses: &ShortExactSequence<C>,
    h: &HomologyBasis<C>,
    h_total: &HomologyBasis<C>,
    h_quot: &HomologyBasis<C>,
) -> Result<FracComplex<C>, TorsionError> {
    check_homology_basis(&ses.sub, h)?;
    check_homology_basis(&ses.total, h_total)?;
    check_homology_basis(&ses.quotient, h_quot)?;
    let nvars = ses.total.nvars();
    let lo = ses.total.min_degree();
    let hi = ses.total.max_degree();
    let len = ses.total.dims().len();
    let mut dims = Vec::with_capacity(3 * len);
    for i in lo..=hi {
        dims.push(h_quot.in_degree(i).len());
        dims.push(h_total.in_degree(i).len());
        dims.push(h.in_degree(i).len());
    }
    let not_exact = |what: &str, i: i64| {
        TorsionError::NotExact(format!("{what} in degree {i} has no homology coordinates"))
    };
    let to_frac = |cols: Vec<Vec<RationalFunction<C>>>, rows: usize| {
        let m = Matrix::from_fn(rows, cols.len(), |r, c| cols[c][r].clone());
        FracMatrix::from_rational(&m, nvars)
    };
    let mut d = Vec::with_capacity(3 * len + 1);
    for i in lo..=hi {
        let s = ses.sub_dim(i);
        // degree 3i: H_i(C″) → H_{i-1}(C) by the connecting map
        let x = ses.total.boundary(i);
        let s_below = ses.sub_dim(i - 1);
        let delta: Vec<Vec<RationalFunction<C>>> = h_quot
            .in_degree(i)
            .iter()
            .map(|z| {
                let mut lift = vec![LaurentPoly::zero(nvars); s];
                lift.extend(z.iter().cloned());
                let image: Vec<LaurentPoly<C>> =
                    x.mul_vec(&lift, nvars).into_iter().take(s_below).collect();
                homology_coordinates(&image, h.in_degree(i - 1), &ses.sub.boundary(i), nvars)
                    .ok_or_else(|| not_exact("connecting map", i))
            })
            .collect::<Result<_, _>>()?;
        d.push(to_frac(delta, h.in_degree(i - 1).len()));
        // degree 3i+1: H_i(C′) → H_i(C″) by projection
        let proj: Vec<Vec<RationalFunction<C>>> = h_total
            .in_degree(i)
            .iter()
            .map(|z| {
                homology_coordinates(
                    &z[s..],
                    h_quot.in_degree(i),
                    &ses.quotient.boundary(i + 1),
                    nvars,
                )
                .ok_or_else(|| not_exact("projection", i))
            })
            .collect::<Result<_, _>>()?;
        d.push(to_frac(proj, h_quot.in_degree(i).len()));
        // degree 3i+2: H_i(C) → H_i(C′) by inclusion
        let incl: Vec<Vec<RationalFunction<C>>> = h
            .in_degree(i)
            .iter()
            .map(|z| {
                let mut v = z.clone();
                v.resize(ses.total.dim(i), LaurentPoly::zero(nvars));
                homology_coordinates(&v, h_total.in_degree(i), &ses.total.boundary(i + 1), nvars)
                    .ok_or_else(|| not_exact("inclusion", i))
            })
            .collect::<Result<_, _>>()?;
        d.push(to_frac(incl, h_total.in_degree(i).len()));
    }
    d.push(FracMatrix::from_poly(
        Matrix::zeros(dims.last().copied().unwrap_or(0), 0, nvars),
        nvars,
    ));
    Ok(FracComplex {
        nvars,
        min_degree: 3 * lo,
        dims,
        d,
    })
}

/// Checks τ̂(C′) = τ̂(C)·τ̂(C″)·τ(L_*) modulo ± monomial units.
pub fn product_formula_check<C: Coefficient>(
    ses: &ShortExactSequence<C>,
    h: &HomologyBasis<C>,
    h_total: &HomologyBasis<C>,
    h_quot: &HomologyBasis<C>,
) -> Result<bool, TorsionError> {
    let lhs = tau_hat_raw(&ses.total, h_total)?;
    let l = long_exact_sequence(ses, h, h_total, h_quot)?;
    let tau_l = raw_torsion_frac(&l)
        .ok_or_else(|| TorsionError::NotExact("homology sequence is not exact".into()))?;
    let rhs = &(&tau_hat_raw(&ses.sub, h)? * &tau_hat_raw(&ses.quotient, h_quot)?) * &tau_l;
    Ok(lhs.equal_mod_units(&rhs))
}
