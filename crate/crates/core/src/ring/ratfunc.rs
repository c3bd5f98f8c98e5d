use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::gcd::lowest_exponents;
use super::{poly_gcd, LaurentPoly, Monomial, NovikovTruncation, RingError, RingSpec};
use crate::scalar::Coefficient;

/// An element of the fraction field of ℤ[V][t^±].
///
/// Values are kept in lowest terms: monomial denominators are folded into
/// the numerator, common integer content and the polynomial gcd are divided
/// out, and the denominator is shifted to touch every coordinate hyperplane
/// with a positive lowest coefficient. Equality is still decided by
/// cross-multiplication.
#[derive(Debug, Clone)]
pub struct RationalFunction<C> {
    num: LaurentPoly<C>,
    den: LaurentPoly<C>,
}

impl<C: Coefficient> RationalFunction<C> {
    pub fn new(num: LaurentPoly<C>, den: LaurentPoly<C>) -> Result<Self, RingError> {
        if den.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        if num.nvars() != den.nvars() {
            return Err(RingError::Mismatch {
                left: num.nvars(),
                right: den.nvars(),
            });
        }
        let mut r = RationalFunction { num, den };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(p: LaurentPoly<C>) -> Self {
        let nvars = p.nvars();
        RationalFunction {
            num: p,
            den: LaurentPoly::one(nvars),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(LaurentPoly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(LaurentPoly::one(nvars))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &LaurentPoly<C> {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly<C> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The value as a polynomial, when the denominator divides out.
    pub fn as_poly(&self) -> Option<LaurentPoly<C>> {
        self.num.exact_div(&self.den)
    }

    fn normalize(&mut self) {
        let nvars = self.nvars();
        if self.num.is_zero() {
            self.den = LaurentPoly::one(nvars);
            return;
        }
        if self.den.num_terms() == 1 {
            let (m, _) = self.den.leading().expect("nonzero");
            let inv = m.inverse();
            self.num = self.num.shift(&inv);
            self.den = self.den.shift(&inv);
        }
        let g = self.num.content().gcd(&self.den.content());
        if !g.is_one() && !g.is_zero() {
            self.num = self.num.div_scalar(&g).expect("content divides");
            self.den = self.den.div_scalar(&g).expect("content divides");
        }
        if let Some(q) = self.num.exact_div(&self.den) {
            self.num = q;
            self.den = LaurentPoly::one(nvars);
        } else {
            let g = poly_gcd(&self.num, &self.den);
            if g.num_terms() > 1 {
                self.num = self.num.exact_div(&g).expect("gcd divides");
                self.den = self.den.exact_div(&g).expect("gcd divides");
            }
            let low = lowest_exponents(&self.den).inverse();
            self.num = self.num.shift(&low);
            self.den = self.den.shift(&low);
        }
        if self.den.lowest().is_some_and(|(_, c)| c.is_negative()) {
            self.num = -&self.num;
            self.den = -&self.den;
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, RingError> {
        Self::new(
            self.num.checked_mul(&rhs.num)?,
            self.den.checked_mul(&rhs.den)?,
        )
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, RingError> {
        if self.den == rhs.den {
            return Self::new(self.num.checked_add(&rhs.num)?, self.den.clone());
        }
        let num = self
            .num
            .checked_mul(&rhs.den)?
            .checked_add(&rhs.num.checked_mul(&self.den)?)?;
        Self::new(num, self.den.checked_mul(&rhs.den)?)
    }

    pub fn inv(&self) -> Result<Self, RingError> {
        if self.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, RingError> {
        self.checked_mul(&rhs.inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, e: i64) -> Result<Self, RingError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = u32::try_from(e.unsigned_abs()).expect("exponent fits u32");
        Self::new(base.num.pow(k), base.den.pow(k))
    }

    /// Multiplication by a group element.
    pub fn shift(&self, m: &Monomial) -> Self {
        RationalFunction {
            num: self.num.shift(m),
            den: self.den.clone(),
        }
    }

    /// Exact equality in the fraction field.
    pub fn frac_equal(&self, other: &Self) -> bool {
        self.num.nvars() == other.num.nvars() && &self.num * &other.den == &other.num * &self.den
    }

    /// Equality up to sign.
    pub fn equal_up_to_sign(&self, other: &Self) -> bool {
        self.frac_equal(other) || self.frac_equal(&-other)
    }

    /// Representative modulo ± monomial units.
    ///
    /// Numerator and denominator are each divided by their lowest monomial;
    /// the sign is then fixed so that both lowest coefficients are positive.
    pub fn canonical_mod_units(&self) -> Result<Self, RingError> {
        if self.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        if let Some(q) = den.exact_div(&num) {
            num = LaurentPoly::one(self.nvars());
            den = q;
        }
        let strip = |p: &LaurentPoly<C>| {
            let (m, c) = p.lowest().expect("nonzero");
            let s = p.shift(&m.inverse());
            if c.is_negative() {
                -s
            } else {
                s
            }
        };
        Ok(RationalFunction {
            num: strip(&num),
            den: strip(&den),
        })
    }

    /// Equality modulo ± monomial units.
    pub fn equal_mod_units(&self, other: &Self) -> bool {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => true,
            (false, false) => {
                let a = self.canonical_mod_units().expect("nonzero");
                let b = other.canonical_mod_units().expect("nonzero");
                a.frac_equal(&b)
            }
            _ => false,
        }
    }

    /// Laurent expansion in the Novikov ring through t-degree `k`.
    ///
    /// The lowest t-coefficient of the denominator must be a unit of ℤ[V].
    pub fn expand(&self, k: i64) -> Result<NovikovTruncation<C>, RingError> {
        let nvars = self.nvars();
        let Some(num_low) = self.num.min_t() else {
            return Ok(NovikovTruncation::new(LaurentPoly::zero(nvars), k));
        };
        let den_low = self.den.min_t().expect("nonzero denominator");
        let inv = NovikovTruncation::invert(&self.den, k + den_low - num_low)?;
        let num = NovikovTruncation::exact(self.num.clone());
        Ok(num.mul(&inv).truncated(k))
    }

    pub fn display<'a>(&'a self, ring: &'a RingSpec) -> RationalDisplay<'a, C> {
        RationalDisplay { value: self, ring }
    }

    /// `num`, `(den)^-1`, or `(num) / (den)` in ASCII.
    pub fn render(&self, t_name: &str, var_names: &[String]) -> String {
        let wrap = |p: &LaurentPoly<C>| {
            let s = p.render(t_name, var_names);
            if p.num_terms() > 1 || s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        };
        if self.den.is_one() {
            self.num.render(t_name, var_names)
        } else if self.num.is_one() {
            format!("{}^-1", wrap(&self.den))
        } else if (-&self.num).is_one() {
            format!("-{}^-1", wrap(&self.den))
        } else {
            format!("{} / {}", wrap(&self.num), wrap(&self.den))
        }
    }
}

pub struct RationalDisplay<'a, C> {
    value: &'a RationalFunction<C>,
    ring: &'a RingSpec,
}

impl<C: Coefficient> fmt::Display for RationalDisplay<'_, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value.render(&self.ring.t, &self.ring.group_vars))
    }
}

impl<C: Coefficient> fmt::Display for RationalFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = RingSpec::with_rank(self.nvars());
        f.write_str(&self.render(&ring.t, &ring.group_vars))
    }
}

impl<C: Coefficient> PartialEq for RationalFunction<C> {
    fn eq(&self, other: &Self) -> bool {
        self.frac_equal(other)
    }
}

impl<C: Coefficient> Eq for RationalFunction<C> {}

impl<C: Coefficient> From<LaurentPoly<C>> for RationalFunction<C> {
    fn from(p: LaurentPoly<C>) -> Self {
        let mut r = Self::from_poly(p);
        r.normalize();
        r
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<C: Coefficient> $trait<&RationalFunction<C>> for &RationalFunction<C> {
            type Output = RationalFunction<C>;
            fn $method(self, rhs: &RationalFunction<C>) -> RationalFunction<C> {
                $body(self, rhs)
            }
        }
        impl<C: Coefficient> $trait<RationalFunction<C>> for RationalFunction<C> {
            type Output = RationalFunction<C>;
            fn $method(self, rhs: RationalFunction<C>) -> RationalFunction<C> {
                $body(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &RationalFunction<C>, b| a
    .checked_add(b)
    .expect("rational function ring mismatch"));
forward_binop!(
    Sub,
    sub,
    |a: &RationalFunction<C>, b: &RationalFunction<C>| a
        .checked_add(&-b)
        .expect("rational function ring mismatch")
);
forward_binop!(Mul, mul, |a: &RationalFunction<C>, b| a
    .checked_mul(b)
    .expect("rational function ring mismatch"));
forward_binop!(Div, div, |a: &RationalFunction<C>, b| a
    .checked_div(b)
    .expect("division by zero rational function"));

impl<C: Coefficient> Neg for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn neg(self) -> RationalFunction<C> {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<C: Coefficient> Neg for RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn neg(self) -> RationalFunction<C> {
        -&self
    }
}
