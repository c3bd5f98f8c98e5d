use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A group element t^a·v^α of H₁ = ℤ⟨t⟩ ⊕ V.
///
/// The derived order is lexicographic with the t-exponent most significant,
/// then the V exponents in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub t: i64,
    pub v: Vec<i64>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            t: 0,
            v: vec![0; nvars],
        }
    }

    pub fn new(t: i64, v: Vec<i64>) -> Self {
        Monomial { t, v }
    }

    pub fn t_power(t: i64, nvars: usize) -> Self {
        Monomial {
            t,
            v: vec![0; nvars],
        }
    }

    /// The i-th group variable.
    pub fn var(i: usize, nvars: usize) -> Self {
        let mut v = vec![0; nvars];
        v[i] = 1;
        Monomial { t: 0, v }
    }

    pub fn nvars(&self) -> usize {
        self.v.len()
    }

    pub fn is_one(&self) -> bool {
        self.t == 0 && self.v.iter().all(|&e| e == 0)
    }

    pub fn inverse(&self) -> Self {
        -self.clone()
    }

    pub fn scale(&self, k: i64) -> Self {
        Monomial {
            t: self.t * k,
            v: self.v.iter().map(|e| e * k).collect(),
        }
    }

    /// Exponent of coordinate `i`, where coordinate 0 is t.
    pub(crate) fn coord(&self, i: usize) -> i64 {
        if i == 0 {
            self.t
        } else {
            self.v[i - 1]
        }
    }

    /// The V part only.
    pub fn group_part(&self) -> Monomial {
        Monomial {
            t: 0,
            v: self.v.clone(),
        }
    }
}

impl Add for Monomial {
    type Output = Monomial;
    fn add(self, rhs: Monomial) -> Monomial {
        &self + &rhs
    }
}

impl Add for &Monomial {
    type Output = Monomial;
    fn add(self, rhs: &Monomial) -> Monomial {
        assert_eq!(self.v.len(), rhs.v.len(), "monomials over different rings");
        Monomial {
            t: self.t + rhs.t,
            v: self.v.iter().zip(&rhs.v).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Monomial {
    type Output = Monomial;
    fn sub(self, rhs: &Monomial) -> Monomial {
        self + &(-rhs.clone())
    }
}

impl Sub for Monomial {
    type Output = Monomial;
    fn sub(self, rhs: Monomial) -> Monomial {
        &self - &rhs
    }
}

impl Neg for Monomial {
    type Output = Monomial;
    fn neg(self) -> Monomial {
        Monomial {
            t: -self.t,
            v: self.v.into_iter().map(|e| -e).collect(),
        }
    }
}

/// Writes the monomial with default variable names `t, v1, v2, …`.
impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.v.len()).map(|i| format!("v{i}")).collect();
        f.write_str(&self.render("t", &names))
    }
}

impl Monomial {
    /// ASCII rendering: `t^2*v1^-1`, or `1` for the identity.
    pub fn render(&self, t_name: &str, var_names: &[String]) -> String {
        let mut factors = Vec::new();
        let mut push = |name: &str, e: i64| match e {
            0 => {}
            1 => factors.push(name.to_owned()),
            _ => factors.push(format!("{name}^{e}")),
        };
        push(t_name, self.t);
        for (name, &e) in var_names.iter().zip(&self.v) {
            push(name, e);
        }
        if factors.is_empty() {
            "1".to_owned()
        } else {
            factors.join("*")
        }
    }
}
