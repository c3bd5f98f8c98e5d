use std::fmt;

use super::{LaurentPoly, Monomial, RingError, RingSpec};
use crate::scalar::Coefficient;

/// Order marking a value known exactly, with no truncation.
pub const EXACT: i64 = i64::MAX;

/// A Novikov series Σ_{j ≥ m} a_j t^j with a_j ∈ ℤ[V], known through
/// t-degree `order`. Terms above `order` are never stored.
#[derive(Debug, Clone)]
pub struct NovikovTruncation<C> {
    poly: LaurentPoly<C>,
    order: i64,
}

impl<C: Coefficient> NovikovTruncation<C> {
    pub fn new(poly: LaurentPoly<C>, order: i64) -> Self {
        NovikovTruncation {
            poly: poly.truncate(order),
            order,
        }
    }

    /// A polynomial regarded as a series with no error term.
    pub fn exact(poly: LaurentPoly<C>) -> Self {
        NovikovTruncation { poly, order: EXACT }
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn poly(&self) -> &LaurentPoly<C> {
        &self.poly
    }

    pub fn into_poly(self) -> LaurentPoly<C> {
        self.poly
    }

    pub fn is_exact(&self) -> bool {
        self.order == EXACT
    }

    /// Lowest t-degree that can be nonzero.
    fn valuation(&self) -> i64 {
        self.poly
            .min_t()
            .unwrap_or_else(|| self.order.saturating_add(1))
    }

    /// The ℤ[V] coefficient of t^k.
    ///
    /// # Panics
    /// If `k` exceeds the known order.
    pub fn coefficient(&self, k: i64) -> LaurentPoly<C> {
        assert!(
            k <= self.order,
            "coefficient t^{k} beyond order {}",
            self.order
        );
        self.poly.t_coefficient(k)
    }

    pub fn truncated(&self, k: i64) -> Self {
        Self::new(self.poly.clone(), k.min(self.order))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(&self.poly + &rhs.poly, self.order.min(rhs.order))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(&self.poly - &rhs.poly, self.order.min(rhs.order))
    }

    pub fn neg(&self) -> Self {
        NovikovTruncation {
            poly: -&self.poly,
            order: self.order,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self
            .order
            .saturating_add(rhs.valuation())
            .min(rhs.order.saturating_add(self.valuation()));
        Self::new(&self.poly * &rhs.poly, order)
    }

    /// Multiplication by a group element.
    pub fn shift(&self, m: &Monomial) -> Self {
        NovikovTruncation {
            poly: self.poly.shift(m),
            order: self.order.saturating_add(m.t),
        }
    }

    /// Inverse of a polynomial through t-degree `k`: the returned `s`
    /// satisfies `p·s = 1 + O(t^{k+1})`.
    ///
    /// The lowest t-coefficient of `p` must be a single invertible term.
    pub fn invert(p: &LaurentPoly<C>, k: i64) -> Result<Self, RingError> {
        let nvars = p.nvars();
        let low = p.min_t().ok_or(RingError::DivisionByZero)?;
        let lead = p.t_coefficient(low);
        let unit = (lead.num_terms() == 1)
            .then(|| lead.leading().expect("one term"))
            .and_then(|(m, c)| Some((m.clone(), C::one().exact_div(c)?)))
            .map(|(m, c)| LaurentPoly::term(c, Monomial::t_power(-low, nvars) - m));
        let Some(unit_inv) = unit else {
            return Err(RingError::NonUnitLeading(
                lead.render("t", &RingSpec::with_rank(nvars).group_vars)
                    .to_string(),
            ));
        };
        // q = p / (lead·t^low) = 1 + q_1 t + q_2 t^2 + …
        let q = &unit_inv * p;
        let q_coeffs: Vec<LaurentPoly<C>> = (0..=k.max(0)).map(|j| q.t_coefficient(j)).collect();
        let mut s: Vec<LaurentPoly<C>> = Vec::new();
        for n in 0..=k {
            let n_us = n as usize;
            let mut acc = if n == 0 {
                LaurentPoly::one(nvars)
            } else {
                LaurentPoly::zero(nvars)
            };
            for j in 1..=n_us {
                if !q_coeffs[j].is_zero() && !s[n_us - j].is_zero() {
                    acc -= &(&q_coeffs[j] * &s[n_us - j]);
                }
            }
            s.push(acc);
        }
        let mut out = LaurentPoly::zero(nvars);
        for (n, c) in s.iter().enumerate() {
            out += &c.shift(&Monomial::t_power(n as i64, nvars));
        }
        Ok(NovikovTruncation::new(&out * &unit_inv, k - low))
    }

    /// Agreement of all coefficients through t-degree `k`.
    pub fn agrees_through(&self, other: &Self, k: i64) -> bool {
        self.poly.truncate(k) == other.poly.truncate(k)
    }

    /// exp of a series with no terms of t-degree below 1.
    ///
    /// Returns `None` if a coefficient division is not exact over `C`.
    pub fn exp(&self) -> Option<Self> {
        let nvars = self.nvars();
        if self.poly.min_t().is_some_and(|m| m < 1) {
            return None;
        }
        let k = self.order;
        let s: Vec<LaurentPoly<C>> = (0..=k).map(|j| self.poly.t_coefficient(j)).collect();
        let mut e: Vec<LaurentPoly<C>> = vec![LaurentPoly::one(nvars)];
        for n in 1..=k {
            let mut acc = LaurentPoly::zero(nvars);
            for j in 1..=n {
                let (ju, rest) = (j as usize, (n - j) as usize);
                if !s[ju].is_zero() && !e[rest].is_zero() {
                    let jc = C::from_i64(j).expect("small integer");
                    acc += &(&s[ju] * &e[rest]).scale(&jc);
                }
            }
            let nc = C::from_i64(n).expect("small integer");
            e.push(acc.div_scalar(&nc)?);
        }
        let mut out = LaurentPoly::zero(nvars);
        for (n, c) in e.iter().enumerate() {
            out += &c.shift(&Monomial::t_power(n as i64, nvars));
        }
        Some(Self::new(out, k))
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> NovikovTruncation<D> {
        NovikovTruncation {
            poly: self.poly.map_coefficients(f),
            order: self.order,
        }
    }

    pub fn render(&self, t_name: &str, var_names: &[String]) -> String {
        let body = self.poly.render(t_name, var_names);
        if self.is_exact() {
            body
        } else {
            format!("{body} + O({t_name}^{})", self.order.saturating_add(1))
        }
    }
}

/// Two truncations are equal when they agree through the smaller order.
impl<C: Coefficient> PartialEq for NovikovTruncation<C> {
    fn eq(&self, other: &Self) -> bool {
        self.agrees_through(other, self.order.min(other.order))
    }
}

impl<C: Coefficient> fmt::Display for NovikovTruncation<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = RingSpec::with_rank(self.nvars());
        f.write_str(&self.render(&ring.t, &ring.group_vars))
    }
}
