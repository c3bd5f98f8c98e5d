//! Exact rings: the group ring ℤ[V], Laurent polynomials in `t` over it,
//! truncated Novikov series, rational functions, and matrices over all of
//! these.

mod gcd;
mod linalg;
mod matrix;
mod monomial;
mod poly;
mod ratfunc;
mod series;

pub use gcd::poly_gcd;
pub use linalg::{adjugate, det, det_rational, solve, Elimination, FracMatrix};
pub use matrix::Matrix;
pub use monomial::Monomial;
pub use poly::LaurentPoly;
pub use ratfunc::RationalFunction;
pub use series::{NovikovTruncation, EXACT};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("ring mismatch: {left} group variables vs {right}")]
    Mismatch { left: usize, right: usize },
    #[error("invalid ring spec: {0}")]
    InvalidSpec(String),
    #[error("leading coefficient {0} is not a unit of the group ring")]
    NonUnitLeading(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Names of the generators of H₁ = V ⊕ ℤ⟨t⟩, with θ(t) = −1.
///
/// `group_vars` generate the free abelian group V = ker θ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub group_vars: Vec<String>,
    pub t: String,
}

impl Default for RingSpec {
    fn default() -> Self {
        RingSpec {
            group_vars: Vec::new(),
            t: "t".to_owned(),
        }
    }
}

impl RingSpec {
    pub fn new(group_vars: Vec<String>, t: impl Into<String>) -> Result<Self, RingError> {
        let spec = RingSpec {
            group_vars,
            t: t.into(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Ring with `b` group variables named `v1..vb`.
    pub fn with_rank(b: usize) -> Self {
        RingSpec {
            group_vars: (1..=b).map(|i| format!("v{i}")).collect(),
            t: "t".to_owned(),
        }
    }

    pub fn rank(&self) -> usize {
        self.group_vars.len()
    }

    pub fn validate(&self) -> Result<(), RingError> {
        let ident = |s: &str| {
            let mut chars = s.chars();
            matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        };
        if !ident(&self.t) {
            return Err(RingError::InvalidSpec(format!(
                "bad identifier {:?}",
                self.t
            )));
        }
        let mut seen = HashSet::new();
        seen.insert(self.t.as_str());
        for v in &self.group_vars {
            if !ident(v) {
                return Err(RingError::InvalidSpec(format!("bad identifier {v:?}")));
            }
            if !seen.insert(v.as_str()) {
                return Err(RingError::InvalidSpec(format!("duplicate variable {v:?}")));
            }
        }
        Ok(())
    }

    /// θ of a monomial: minus its t-exponent.
    pub fn theta(&self, m: &Monomial) -> i64 {
        -m.t
    }
}
