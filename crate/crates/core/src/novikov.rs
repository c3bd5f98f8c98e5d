//! Novikov complexes, Euler lifts, τ(CN) and the invariant I = ζ·τ(CN).

use thiserror::Error;

use crate::complex::{BasedChainComplex, ComplexError};
use crate::ring::{LaurentPoly, Monomial, NovikovTruncation, RationalFunction, RingError};
use crate::scalar::Coefficient;
use crate::torsion::{greedy_decomposition, raw_torsion, TorsionValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NovikovError {
    #[error("generator {index} has index {found}, expected {expected}")]
    IndexMismatch {
        index: usize,
        expected: i64,
        found: i64,
    },
    #[error("boundary entry ({row},{col}) of degree {degree} has negative t-degree")]
    NegativeTDegree { degree: i64, row: usize, col: usize },
    #[error("{expected} offsets expected, {found} given")]
    OffsetCount { expected: usize, found: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A Novikov complex: one generator per critical point, boundaries counting
/// gradient flow lines. `order` is set when the boundary entries are series
/// truncated above that t-degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovComplex<C> {
    pub complex: BasedChainComplex<C>,
    pub order: Option<i64>,
}

/// Change of lift for each critical point, in generator order (by degree,
/// then basis index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerLift {
    pub offsets: Vec<Monomial>,
}

impl EulerLift {
    pub fn zero(count: usize, nvars: usize) -> Self {
        EulerLift {
            offsets: vec![Monomial::one(nvars); count],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.offsets.iter().all(Monomial::is_one)
    }
}

/// Rebases the first generators of each degree by the given offsets; the
/// offsets are consumed degree by degree, `counts[k]` of them in degree
/// `min_degree + k`.
pub(crate) fn apply_offsets<C: Coefficient>(
    c: &BasedChainComplex<C>,
    counts: &[usize],
    offsets: &[Monomial],
) -> Result<BasedChainComplex<C>, ComplexError> {
    let mut out = c.clone();
    let mut it = offsets.iter();
    for (k, &n) in counts.iter().enumerate() {
        let degree = c.min_degree() + k as i64;
        for j in 0..n {
            let m = it.next().expect("offset count checked by caller");
            if !m.is_one() {
                out = out.rebase(degree, j, &LaurentPoly::monomial(m.clone()))?;
            }
        }
    }
    Ok(out)
}

/// ∏ offset^{(-1)^{deg}}: the factor by which rebasing changes raw torsion.
pub(crate) fn offset_factor(
    min_degree: i64,
    counts: &[usize],
    offsets: &[Monomial],
    nvars: usize,
) -> Monomial {
    let mut acc = Monomial::one(nvars);
    let mut it = offsets.iter();
    for (k, &n) in counts.iter().enumerate() {
        let even = (min_degree + k as i64) % 2 == 0;
        for _ in 0..n {
            let m = it.next().expect("offset count checked by caller");
            acc = if even { &acc + m } else { &acc - m };
        }
    }
    acc
}

impl<C: Coefficient> NovikovComplex<C> {
    /// Checks ∂² = 0 (through `order` for truncated data) and that no
    /// boundary entry has negative t-degree.
    pub fn new(complex: BasedChainComplex<C>, order: Option<i64>) -> Result<Self, NovikovError> {
        for i in complex.min_degree() + 1..=complex.max_degree() {
            let d = complex.boundary(i);
            let negative = d
                .iter()
                .find(|(_, _, x)| x.min_t().is_some_and(|m| m < 0))
                .map(|(r, c, _)| (r, c));
            if let Some((row, col)) = negative {
                return Err(NovikovError::NegativeTDegree {
                    degree: i,
                    row,
                    col,
                });
            }
        }
        match order {
            None => complex.ensure_valid()?,
            Some(k) => {
                let nvars = complex.nvars();
                for i in complex.min_degree() + 2..=complex.max_degree() {
                    let prod = complex
                        .boundary(i - 1)
                        .checked_mul(&complex.boundary(i), nvars)?;
                    if prod.iter().any(|(_, _, x)| !x.truncate(k).is_zero()) {
                        return Err(ComplexError::NotAComplex(i).into());
                    }
                }
            }
        }
        Ok(NovikovComplex { complex, order })
    }

    /// Builds from a complex plus the Morse index of each generator.
    pub fn with_indices(
        complex: BasedChainComplex<C>,
        indices: &[i64],
        order: Option<i64>,
    ) -> Result<Self, NovikovError> {
        let expected: Vec<i64> = complex
            .degrees()
            .flat_map(|i| std::iter::repeat_n(i, complex.dim(i)))
            .collect();
        if indices.len() != expected.len() {
            return Err(NovikovError::OffsetCount {
                expected: expected.len(),
                found: indices.len(),
            });
        }
        if let Some((index, (&e, &f))) = expected
            .iter()
            .zip(indices)
            .enumerate()
            .find(|(_, (e, f))| e != f)
        {
            return Err(NovikovError::IndexMismatch {
                index,
                expected: e,
                found: f,
            });
        }
        Self::new(complex, order)
    }

    pub fn generator_count(&self) -> usize {
        self.complex.dims().iter().sum()
    }

    /// Morse index of every generator, in basis order.
    pub fn indices(&self) -> Vec<i64> {
        self.complex
            .degrees()
            .flat_map(|i| std::iter::repeat_n(i, self.complex.dim(i)))
            .collect()
    }

    fn check_lift(&self, xi: &EulerLift) -> Result<(), NovikovError> {
        if xi.offsets.len() != self.generator_count() {
            return Err(NovikovError::OffsetCount {
                expected: self.generator_count(),
                found: xi.offsets.len(),
            });
        }
        if let Some(m) = xi
            .offsets
            .iter()
            .find(|m| m.nvars() != self.complex.nvars())
        {
            return Err(RingError::Mismatch {
                left: self.complex.nvars(),
                right: m.nvars(),
            }
            .into());
        }
        Ok(())
    }

    /// The complex based by the lifts e(ξ).
    pub fn rebased(&self, xi: &EulerLift) -> Result<BasedChainComplex<C>, NovikovError> {
        self.check_lift(xi)?;
        Ok(apply_offsets(
            &self.complex,
            self.complex.dims(),
            &xi.offsets,
        )?)
    }

    /// Raw τ(CN)(ξ), correct up to sign; `None` when CN is not acyclic.
    pub fn tau_raw(&self, xi: &EulerLift) -> Result<Option<RationalFunction<C>>, NovikovError> {
        Ok(raw_torsion(&self.rebased(xi)?))
    }

    /// τ(CN)(ξ) as a Novikov series, with the precision lost to inverting
    /// truncated determinants accounted for in the returned order.
    pub fn tau_series(
        &self,
        xi: &EulerLift,
        k: i64,
    ) -> Result<Option<NovikovTruncation<C>>, NovikovError> {
        self.check_lift(xi)?;
        let nvars = self.complex.nvars();
        let k = self.order.map_or(k, |o| o.min(k));
        let Some(dec) = greedy_decomposition(&self.complex) else {
            return Ok(None);
        };
        let mut acc = NovikovTruncation::exact(LaurentPoly::one(nvars));
        for (slot, i) in self.complex.degrees().enumerate() {
            let rows: Vec<usize> = if slot == 0 {
                Vec::new()
            } else {
                dec.b[slot - 1].clone()
            };
            let minor = self.complex.boundary(i).submatrix(&rows, &dec.a[slot]);
            let d = crate::ring::det(&minor, nvars)?;
            let known = if self.order.is_some() {
                NovikovTruncation::new(d.clone(), k)
            } else {
                NovikovTruncation::exact(d.clone())
            };
            let factor = if i % 2 == 0 {
                known
            } else {
                let v = d.min_t().unwrap_or(0);
                let precision = if self.order.is_some() { k - v } else { k + v };
                NovikovTruncation::invert(&d, precision)?
            };
            acc = acc.mul(&factor);
        }
        let unit = offset_factor(
            self.complex.min_degree(),
            self.complex.dims(),
            &xi.offsets,
            nvars,
        );
        Ok(Some(acc.shift(&unit).truncated(k)))
    }
}

/// τ(CN)(ξ) modulo ± monomial units; 1 for the empty complex.
pub fn tau_novikov<C: Coefficient>(
    cn: &NovikovComplex<C>,
    xi: &EulerLift,
) -> Result<TorsionValue<C>, NovikovError> {
    Ok(TorsionValue::from_raw(cn.tau_raw(xi)?))
}

/// I = ζ·τ(CN), canonical; 0 when τ(CN) = 0.
pub fn invariant_i<C: Coefficient>(
    zeta: &RationalFunction<C>,
    tau_cn: &TorsionValue<C>,
) -> TorsionValue<C> {
    match tau_cn {
        TorsionValue::Zero => TorsionValue::Zero,
        TorsionValue::NonZero(t) => TorsionValue::from_raw(Some(zeta * t)),
    }
}

/// I with ζ given as a series: ζ·expand(τ(CN)) through t-degree `k`.
pub fn invariant_i_series<C: Coefficient>(
    zeta: &NovikovTruncation<C>,
    tau_cn: &TorsionValue<C>,
    k: i64,
) -> Result<Option<NovikovTruncation<C>>, RingError> {
    match tau_cn {
        TorsionValue::Zero => Ok(None),
        TorsionValue::NonZero(t) => {
            let zeta_low = zeta.poly().min_t().unwrap_or(0);
            let tau = t.expand(k - zeta_low)?;
            Ok(Some(zeta.mul(&tau).truncated(k)))
        }
    }
}

/// Whether CN and the CW complex have equal homology ranks in every degree.
pub fn novikov_rank_check<C: Coefficient>(
    cn: &NovikovComplex<C>,
    cw: &BasedChainComplex<C>,
) -> bool {
    if cn.complex.ring() != cw.ring() {
        return false;
    }
    let a = &cn.complex;
    let (ra, rb) = (a.homology_ranks(), cw.homology_ranks());
    let rank_at = |c: &BasedChainComplex<C>, r: &[usize], i: i64| {
        usize::try_from(i - c.min_degree())
            .ok()
            .and_then(|k| r.get(k))
            .copied()
            .unwrap_or(0)
    };
    let lo = a.min_degree().min(cw.min_degree());
    let hi = a.max_degree().max(cw.max_degree());
    (lo..=hi).all(|i| rank_at(a, &ra, i) == rank_at(cw, &rb, i))
}
