//! Greatest common divisors of Laurent polynomials, modulo ± monomial units.
//!
//! Recursive primitive pseudo-remainder sequences: a polynomial is viewed
//! as univariate in one coordinate (t first, then the group variables) with
//! coefficients in the remaining ones.

use std::collections::BTreeMap;

use super::{LaurentPoly, Monomial};
use crate::scalar::Coefficient;

/// Componentwise minimum exponent over the support.
pub(crate) fn lowest_exponents<C: Coefficient>(p: &LaurentPoly<C>) -> Monomial {
    let n = p.nvars();
    let mut t = i64::MAX;
    let mut v = vec![i64::MAX; n];
    for (m, _) in p.terms() {
        t = t.min(m.t);
        for (lo, e) in v.iter_mut().zip(&m.v) {
            *lo = (*lo).min(*e);
        }
    }
    Monomial::new(t, v)
}

/// Shifts the support into the non-negative orthant, touching every
/// coordinate hyperplane.
fn to_orthant<C: Coefficient>(p: &LaurentPoly<C>) -> LaurentPoly<C> {
    if p.is_zero() {
        return p.clone();
    }
    p.shift(&lowest_exponents(p).inverse())
}

fn degree_in<C: Coefficient>(p: &LaurentPoly<C>, var: usize) -> i64 {
    p.terms()
        .map(|(m, _)| m.coord(var))
        .max()
        .unwrap_or(i64::MIN)
}

fn with_coord(m: &Monomial, var: usize, e: i64) -> Monomial {
    let mut m = m.clone();
    if var == 0 {
        m.t = e;
    } else {
        m.v[var - 1] = e;
    }
    m
}

/// Coefficients of p as a polynomial in coordinate `var`.
fn coefficients_in<C: Coefficient>(
    p: &LaurentPoly<C>,
    var: usize,
) -> BTreeMap<i64, LaurentPoly<C>> {
    let mut out: BTreeMap<i64, LaurentPoly<C>> = BTreeMap::new();
    for (m, c) in p.terms() {
        out.entry(m.coord(var))
            .or_insert_with(|| LaurentPoly::zero(p.nvars()))
            .add_term(with_coord(m, var, 0), c.clone());
    }
    out
}

fn leading_in<C: Coefficient>(p: &LaurentPoly<C>, var: usize) -> LaurentPoly<C> {
    let d = degree_in(p, var);
    coefficients_in(p, var)
        .remove(&d)
        .expect("non-zero polynomial")
}

fn content_in<C: Coefficient>(p: &LaurentPoly<C>, var: usize) -> LaurentPoly<C> {
    coefficients_in(p, var)
        .into_values()
        .fold(LaurentPoly::zero(p.nvars()), |g, c| {
            gcd_from(&g, &c, var + 1)
        })
}

fn primitive_in<C: Coefficient>(p: &LaurentPoly<C>, var: usize) -> LaurentPoly<C> {
    let c = content_in(p, var);
    p.exact_div(&c).expect("content divides")
}

/// Pseudo-remainder of f by h in coordinate `var`.
fn pseudo_rem<C: Coefficient>(
    f: &LaurentPoly<C>,
    h: &LaurentPoly<C>,
    var: usize,
) -> LaurentPoly<C> {
    let dh = degree_in(h, var);
    let lc_h = leading_in(h, var);
    let mut r = f.clone();
    while !r.is_zero() && degree_in(&r, var) >= dh {
        let shift = with_coord(&Monomial::one(f.nvars()), var, degree_in(&r, var) - dh);
        let lc_r = leading_in(&r, var);
        r = &(&lc_h * &r) - &(&lc_r * &h.shift(&shift));
    }
    r
}

fn gcd_from<C: Coefficient>(a: &LaurentPoly<C>, b: &LaurentPoly<C>, var: usize) -> LaurentPoly<C> {
    let (a, b) = (to_orthant(a), to_orthant(b));
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    if var > a.nvars() {
        return LaurentPoly::constant(a.content().gcd(&b.content()), a.nvars());
    }
    if degree_in(&a, var) == 0 && degree_in(&b, var) == 0 {
        return gcd_from(&a, &b, var + 1);
    }
    let (ca, cb) = (content_in(&a, var), content_in(&b, var));
    let g = gcd_from(&ca, &cb, var + 1);
    let (mut f, mut h) = (primitive_in(&a, var), primitive_in(&b, var));
    if degree_in(&f, var) < degree_in(&h, var) {
        std::mem::swap(&mut f, &mut h);
    }
    while !h.is_zero() {
        let r = pseudo_rem(&f, &h, var);
        f = h;
        h = if r.is_zero() {
            r
        } else {
            primitive_in(&to_orthant(&r), var)
        };
    }
    to_orthant(&(&g * &primitive_in(&f, var)))
}

/// gcd(a, b) modulo units, with support in the non-negative orthant and a
/// positive lowest coefficient. gcd(0, 0) = 0.
pub fn poly_gcd<C: Coefficient>(a: &LaurentPoly<C>, b: &LaurentPoly<C>) -> LaurentPoly<C> {
    assert_eq!(a.nvars(), b.nvars(), "polynomials over different rings");
    let g = gcd_from(a, b, 0);
    match g.lowest() {
        Some((_, c)) if c.is_negative() => -g,
        _ => g,
    }
}
