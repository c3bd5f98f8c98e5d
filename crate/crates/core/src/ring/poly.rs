use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::{Monomial, RingError, RingSpec};
use crate::scalar::Coefficient;

/// A Laurent polynomial in t and the group variables of V, with exact
/// coefficients. Zero coefficients are never stored.
///
/// Polynomials with every t-exponent equal to zero are elements of ℤ[V];
/// the general case is the dense subring ℤ[V][t^±] of the Novikov ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> LaurentPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(C::one(), nvars)
    }

    pub fn constant(c: C, nvars: usize) -> Self {
        Self::term(c, Monomial::one(nvars))
    }

    pub fn from_int(c: i64, nvars: usize) -> Self {
        Self::constant(C::from_i64(c).expect("integer fits coefficient"), nvars)
    }

    pub fn term(c: C, m: Monomial) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { nvars, terms }
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(C::one(), m)
    }

    /// t^k.
    pub fn t_power(k: i64, nvars: usize) -> Self {
        Self::monomial(Monomial::t_power(k, nvars))
    }

    /// Sums repeated monomials and drops zeros.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial over a different ring");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Largest term in the monomial order.
    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// Smallest term in the monomial order.
    pub fn lowest(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next()
    }

    pub fn min_t(&self) -> Option<i64> {
        self.lowest().map(|(m, _)| m.t)
    }

    pub fn max_t(&self) -> Option<i64> {
        self.leading().map(|(m, _)| m.t)
    }

    /// True when every monomial has t-exponent zero, i.e. the value lies in ℤ[V].
    pub fn is_t_free(&self) -> bool {
        self.terms.keys().all(|m| m.t == 0)
    }

    /// `Some(±m)` when the polynomial is a unit of ℤ[H₁]: a single monomial
    /// with coefficient ±1. The returned flag is true for a negative sign.
    pub fn as_unit(&self) -> Option<(bool, &Monomial)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        if c.is_one() {
            Some((false, m))
        } else if (-c.clone()).is_one() {
            Some((true, m))
        } else {
            None
        }
    }

    pub fn is_unit(&self) -> bool {
        self.as_unit().is_some()
    }

    /// The ℤ[V] coefficient of t^k, as a t-free polynomial.
    pub fn t_coefficient(&self, k: i64) -> Self {
        let lo = Monomial::new(k, vec![i64::MIN; self.nvars]);
        let hi = Monomial::new(k, vec![i64::MAX; self.nvars]);
        Self::from_terms(
            self.nvars,
            self.terms
                .range(lo..=hi)
                .map(|(m, c)| (m.group_part(), c.clone())),
        )
    }

    /// Drops every term with t-exponent above `k`.
    pub fn truncate(&self, k: i64) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.t <= k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_ring(&self, other: &Self) -> Result<(), RingError> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(RingError::Mismatch {
                left: self.nvars,
                right: other.nvars,
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check_ring(other)?;
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma + mb, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone())),
        )
    }

    /// Multiplication by the group element `m`.
    pub fn shift(&self, m: &Monomial) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k + m, c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Non-negative gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> C {
        self.terms.values().fold(C::zero(), |g, c| g.gcd(c))
    }

    /// Coefficient-wise exact division by a scalar.
    pub fn div_scalar(&self, c: &C) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (m, a) in &self.terms {
            terms.insert(m.clone(), a.exact_div(c)?);
        }
        Some(LaurentPoly {
            nvars: self.nvars,
            terms,
        })
    }

    /// Per-coordinate (min, max) exponents over the support; coordinate 0 is t.
    fn exponent_box(&self) -> Vec<(i64, i64)> {
        let mut bx = vec![(i64::MAX, i64::MIN); self.nvars + 1];
        for m in self.terms.keys() {
            for (i, b) in bx.iter_mut().enumerate() {
                let e = m.coord(i);
                b.0 = b.0.min(e);
                b.1 = b.1.max(e);
            }
        }
        bx
    }

    /// Exact division: `Some(q)` with `q * divisor == self`, else `None`.
    ///
    /// Quotient terms are produced in decreasing monomial order and must lie
    /// in the box allowed by the Newton polytopes of the operands, which
    /// bounds the loop even when the division is not exact.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        assert_eq!(
            self.nvars, divisor.nvars,
            "polynomials over different rings"
        );
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(self.nvars));
        }
        if divisor.terms.len() == 1 {
            let (dm, dc) = divisor.leading()?;
            let inv = dm.inverse();
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                terms.insert(m + &inv, c.exact_div(dc)?);
            }
            return Some(LaurentPoly {
                nvars: self.nvars,
                terms,
            });
        }
        let rb = self.exponent_box();
        let db = divisor.exponent_box();
        let bounds: Vec<(i64, i64)> = rb
            .iter()
            .zip(&db)
            .map(|(r, d)| (r.0 - d.0, r.1 - d.1))
            .collect();
        if bounds.iter().any(|(lo, hi)| lo > hi) {
            return None;
        }
        let (dm, dc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quotient = Self::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm - &dm;
            let inside = bounds
                .iter()
                .enumerate()
                .all(|(i, (lo, hi))| (*lo..=*hi).contains(&qm.coord(i)));
            if !inside {
                return None;
            }
            let qc = rc.exact_div(&dc)?;
            for (m, c) in &divisor.terms {
                rem.add_term(m + &qm, -(c.clone() * qc.clone()));
            }
            quotient.add_term(qm, qc);
        }
        Some(quotient)
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        LaurentPoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), f(c))),
        )
    }

    /// Display with the ring's variable names.
    pub fn display<'a>(&'a self, ring: &'a RingSpec) -> PolyDisplay<'a, C> {
        PolyDisplay { poly: self, ring }
    }

    /// ASCII rendering in increasing monomial order, e.g. `1 - 3*t + t^2`.
    pub fn render(&self, t_name: &str, var_names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_owned();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let mono = m.render(t_name, var_names);
            if m.is_one() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{abs}*{mono}"));
            }
        }
        out
    }
}

pub struct PolyDisplay<'a, C> {
    poly: &'a LaurentPoly<C>,
    ring: &'a RingSpec,
}

impl<C: Coefficient> fmt::Display for PolyDisplay<'_, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.poly.render(&self.ring.t, &self.ring.group_vars))
    }
}

impl<C: Coefficient> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = RingSpec::with_rank(self.nvars);
        f.write_str(&self.render(&ring.t, &ring.group_vars))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<C: Coefficient> $trait<&LaurentPoly<C>> for &LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $method(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
                self.$checked(rhs).expect("polynomial ring mismatch")
            }
        }
        impl<C: Coefficient> $trait<LaurentPoly<C>> for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $method(self, rhs: LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$method(&rhs)
            }
        }
        impl<C: Coefficient> $trait<&LaurentPoly<C>> for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $method(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<C: Coefficient> AddAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn add_assign(&mut self, rhs: &LaurentPoly<C>) {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<C: Coefficient> SubAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn sub_assign(&mut self, rhs: &LaurentPoly<C>) {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<C: Coefficient> Neg for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        -&self
    }
}

impl<C: Coefficient> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}
