//! Exact algebra for circle-valued Morse theory.
//!
//! Laurent polynomials over ℤ[H₁], Reidemeister torsion of based chain
//! complexes, Novikov complexes, dynamical zeta functions, cut-system
//! assembly, and the 3-dimensional invariant I₃. Everything is generic over
//! an exact [`scalar::Coefficient`]; the aliases below fix the integer and
//! rational instances.

pub mod complex;
pub mod cut;
pub mod fixture;
pub mod novikov;
pub mod ring;
pub mod scalar;
pub mod three_dim;
pub mod torsion;
pub mod zeta;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use ring::{LaurentPoly, Matrix, Monomial, NovikovTruncation, RationalFunction, RingSpec};

pub type ZPoly = LaurentPoly<BigInt>;
pub type QPoly = LaurentPoly<BigRational>;
pub type ZSeries = NovikovTruncation<BigInt>;
pub type QSeries = NovikovTruncation<BigRational>;
pub type RatFunc = RationalFunction<BigInt>;
pub type QRatFunc = RationalFunction<BigRational>;
pub type ZMatrix = Matrix<ZPoly>;
pub type ZComplex = complex::BasedChainComplex<BigInt>;
pub type QComplex = complex::BasedChainComplex<BigRational>;
pub type ZTorsion = torsion::TorsionValue<BigInt>;
pub type ZNovikov = novikov::NovikovComplex<BigInt>;
pub type ZCutSystem = cut::CutSystem<BigInt>;
pub type ZPathMatrix = three_dim::PathMatrix<BigInt>;
