//! JSON fixtures.
//!
//! A term is `{"c": int, "t": int, "v": [int; b]}`, a polynomial a list of
//! terms, a matrix a row-major list of rows of polynomials. Matrix shapes
//! come from the surrounding object, so empty blocks need no extra data.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::complex::{BasedChainComplex, ComplexError};
use crate::cut::{CutError, CutSystem};
use crate::novikov::{EulerLift, NovikovComplex, NovikovError};
use crate::ring::{LaurentPoly, Matrix, Monomial, RationalFunction, RingSpec};
use crate::three_dim::PathMatrix;
use crate::zeta::{eigen_counts, ClosedOrbit, ReturnMapData};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("ring mismatch at {path}: expected {expected}, found {found}")]
    RingMismatch {
        path: String,
        expected: String,
        found: String,
    },
    #[error("invalid data at {path}: {message}")]
    Invalid { path: String, message: String },
    #[error("d^2 != 0 at degree {degree}")]
    NotAComplex { path: String, degree: i64 },
    #[error("unknown fixture kind {0:?}")]
    UnknownKind(String),
}

impl FixtureError {
    /// Whether the fixture parsed but violates a chain-complex identity.
    pub fn is_violation(&self) -> bool {
        matches!(self, FixtureError::NotAComplex { .. })
    }
}

fn invalid(path: &str, e: impl std::fmt::Display) -> FixtureError {
    FixtureError::Invalid {
        path: path.to_owned(),
        message: e.to_string(),
    }
}

fn complex_error(path: &str, e: ComplexError) -> FixtureError {
    match e {
        ComplexError::NotAComplex(degree) => FixtureError::NotAComplex {
            path: path.to_owned(),
            degree,
        },
        e => invalid(path, e),
    }
}

fn novikov_error(path: &str, e: NovikovError) -> FixtureError {
    match e {
        NovikovError::Complex(e) => complex_error(path, e),
        e => invalid(path, e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDto {
    pub c: i64,
    pub t: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub v: Vec<i64>,
}

pub type PolyDto = Vec<TermDto>;
pub type MatrixDto = Vec<Vec<PolyDto>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDto {
    pub ring: RingSpec,
    #[serde(default)]
    pub min_degree: i64,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
    pub boundaries: Vec<MatrixDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NovikovDto {
    pub ring: RingSpec,
    #[serde(default)]
    pub min_degree: i64,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
    pub boundaries: Vec<MatrixDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<TermDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitDto {
    pub class: Monomial,
    pub period: u32,
    pub sign: i8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_minus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_zero: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub return_map: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitsDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSpec>,
    pub orbits: Vec<OrbitDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReturnMapsDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSpec>,
    pub phi: Vec<MatrixDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutSystemDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSpec>,
    pub sigma: ComplexDto,
    pub phi: Vec<MatrixDto>,
    pub crit_dims: Vec<usize>,
    #[serde(rename = "N")]
    pub n: Vec<MatrixDto>,
    #[serde(rename = "M")]
    pub m: Vec<MatrixDto>,
    #[serde(rename = "W")]
    pub w: Vec<MatrixDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathMatrixDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSpec>,
    #[serde(rename = "P")]
    pub p: MatrixDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<TermDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub col_labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalDto {
    pub ring: RingSpec,
    pub num: PolyDto,
    pub den: PolyDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDto {
    pub ring: RingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<CutSystemDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub novikov: Option<NovikovDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathMatrixDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub returnmaps: Option<ReturnMapsDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbits: Option<OrbitsDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cw: Option<ComplexDto>,
}

/// A Novikov complex with the Euler lift it is read against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovFixture {
    pub cn: NovikovComplex<BigInt>,
    pub xi: EulerLift,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitsFixture {
    pub ring: RingSpec,
    pub orbits: Vec<ClosedOrbit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnMapsFixture {
    pub ring: RingSpec,
    pub maps: ReturnMapData<BigInt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalFixture {
    pub ring: RingSpec,
    pub value: RationalFunction<BigInt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub ring: RingSpec,
    pub description: Option<String>,
    pub cut: Option<CutSystem<BigInt>>,
    pub novikov: Option<NovikovFixture>,
    pub path: Option<PathMatrix<BigInt>>,
    pub returnmaps: Option<ReturnMapData<BigInt>>,
    pub orbits: Option<Vec<ClosedOrbit>>,
    pub cw: Option<BasedChainComplex<BigInt>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Fixture {
    Complex(BasedChainComplex<BigInt>),
    Novikov(NovikovFixture),
    Orbits(OrbitsFixture),
    ReturnMaps(ReturnMapsFixture),
    CutSystem(CutSystem<BigInt>),
    PathMatrix(PathMatrix<BigInt>),
    Rational(RationalFixture),
    Scenario(Box<Scenario>),
}

impl Fixture {
    pub fn kind(&self) -> &'static str {
        match self {
            Fixture::Complex(_) => "complex",
            Fixture::Novikov(_) => "novikov",
            Fixture::Orbits(_) => "orbits",
            Fixture::ReturnMaps(_) => "returnmaps",
            Fixture::CutSystem(_) => "cutsystem",
            Fixture::PathMatrix(_) => "pathmatrix",
            Fixture::Rational(_) => "rational",
            Fixture::Scenario(_) => "scenario",
        }
    }

    pub fn ring(&self) -> &RingSpec {
        match self {
            Fixture::Complex(c) => c.ring(),
            Fixture::Novikov(n) => n.cn.complex.ring(),
            Fixture::Orbits(o) => &o.ring,
            Fixture::ReturnMaps(r) => &r.ring,
            Fixture::CutSystem(c) => c.ring(),
            Fixture::PathMatrix(p) => &p.ring,
            Fixture::Rational(r) => &r.ring,
            Fixture::Scenario(s) => &s.ring,
        }
    }
}

pub fn parse_file(path: impl AsRef<Path>) -> Result<Fixture, FixtureError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| FixtureError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<Fixture, FixtureError> {
    let value: Value = serde_json::from_str(text).map_err(|e| FixtureError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    parse_value(value)
}

fn infer_kind(obj: &serde_json::Map<String, Value>) -> Option<&'static str> {
    let has = |k: &str| obj.contains_key(k);
    if has("P") {
        Some("pathmatrix")
    } else if has("sigma") {
        Some("cutsystem")
    } else if ["cut", "novikov", "path", "returnmaps", "cw"]
        .iter()
        .any(|k| has(k))
    {
        Some("scenario")
    } else if has("orbits") {
        Some("orbits")
    } else if has("phi") {
        Some("returnmaps")
    } else if has("num") {
        Some("rational")
    } else if has("boundaries") && (has("indices") || has("offsets") || has("order")) {
        Some("novikov")
    } else if has("boundaries") {
        Some("complex")
    } else {
        None
    }
}

fn schema<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, FixtureError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner,
            (false, ".") => prefix.to_owned(),
            (false, _) => format!("{prefix}.{inner}"),
        };
        FixtureError::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

/// Parses a fixture, taking its kind from `"kind"` or inferring it from
/// the keys present.
pub fn parse_value(value: Value) -> Result<Fixture, FixtureError> {
    let Value::Object(mut obj) = value else {
        return Err(FixtureError::Schema {
            path: ".".into(),
            message: "fixture must be a JSON object".into(),
        });
    };
    let kind = match obj.remove("kind") {
        Some(Value::String(k)) => k,
        Some(_) => {
            return Err(FixtureError::Schema {
                path: "kind".into(),
                message: "kind must be a string".into(),
            })
        }
        None => infer_kind(&obj)
            .ok_or_else(|| FixtureError::UnknownKind("<none>".into()))?
            .to_owned(),
    };
    let value = Value::Object(obj);
    Ok(match kind.as_str() {
        "complex" => Fixture::Complex(complex_from_dto(&schema(value, "")?, "")?),
        "novikov" => Fixture::Novikov(novikov_from_dto(&schema(value, "")?, None, "")?),
        "orbits" => {
            let dto: OrbitsDto = schema(value, "")?;
            let ring = dto.ring.clone().unwrap_or_default();
            let orbits = orbits_from_dto(&dto, &ring, "")?;
            Fixture::Orbits(OrbitsFixture { ring, orbits })
        }
        "returnmaps" => {
            let dto: ReturnMapsDto = schema(value, "")?;
            let ring = dto.ring.clone().unwrap_or_default();
            let maps = returnmaps_from_dto(&dto.phi, &ring, "phi")?;
            Fixture::ReturnMaps(ReturnMapsFixture { ring, maps })
        }
        "cutsystem" => Fixture::CutSystem(cut_from_dto(&schema(value, "")?, None, "")?),
        "pathmatrix" => Fixture::PathMatrix(path_from_dto(&schema(value, "")?, None, "")?),
        "rational" => {
            let dto: RationalDto = schema(value, "")?;
            check_ring(&dto.ring, "ring")?;
            let nvars = dto.ring.rank();
            let num = poly_from_dto(&dto.num, nvars, "num")?;
            let den = poly_from_dto(&dto.den, nvars, "den")?;
            let value = RationalFunction::new(num, den).map_err(|e| invalid("den", e))?;
            Fixture::Rational(RationalFixture {
                ring: dto.ring,
                value,
            })
        }
        "scenario" => Fixture::Scenario(Box::new(scenario_from_dto(&schema(value, "")?)?)),
        other => return Err(FixtureError::UnknownKind(other.to_owned())),
    })
}

fn check_ring(ring: &RingSpec, path: &str) -> Result<(), FixtureError> {
    ring.validate().map_err(|e| invalid(path, e))
}

fn same_ring(expected: &RingSpec, found: &RingSpec, path: &str) -> Result<(), FixtureError> {
    if expected != found {
        return Err(FixtureError::RingMismatch {
            path: path.to_owned(),
            expected: describe_ring(expected),
            found: describe_ring(found),
        });
    }
    Ok(())
}

fn describe_ring(r: &RingSpec) -> String {
    format!("b={} [{}; {}]", r.rank(), r.group_vars.join(", "), r.t)
}

fn join(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_owned()
    } else {
        format!("{prefix}.{field}")
    }
}

fn monomial_from_term(t: &TermDto, nvars: usize, path: &str) -> Result<Monomial, FixtureError> {
    if t.v.len() != nvars {
        return Err(FixtureError::RingMismatch {
            path: format!("{path}.v"),
            expected: format!("{nvars} group exponents"),
            found: format!("{}", t.v.len()),
        });
    }
    Ok(Monomial::new(t.t, t.v.clone()))
}

fn poly_from_dto(
    p: &PolyDto,
    nvars: usize,
    path: &str,
) -> Result<LaurentPoly<BigInt>, FixtureError> {
    let mut out = LaurentPoly::zero(nvars);
    for (i, t) in p.iter().enumerate() {
        let m = monomial_from_term(t, nvars, &format!("{path}[{i}]"))?;
        out.add_term(m, BigInt::from(t.c));
    }
    Ok(out)
}

fn unit_from_term(t: &TermDto, nvars: usize, path: &str) -> Result<Monomial, FixtureError> {
    if t.c != 1 {
        return Err(invalid(
            &format!("{path}.c"),
            "offsets are group elements; c must be 1",
        ));
    }
    monomial_from_term(t, nvars, path)
}

fn matrix_from_dto(
    m: &MatrixDto,
    rows: usize,
    cols: usize,
    nvars: usize,
    path: &str,
) -> Result<Matrix<LaurentPoly<BigInt>>, FixtureError> {
    let shape_err = |found: String| {
        invalid(
            path,
            format!("expected a {rows}x{cols} matrix, found {found}"),
        )
    };
    if m.len() != rows {
        return Err(shape_err(format!("{} rows", m.len())));
    }
    let mut entries = Vec::with_capacity(rows);
    for (r, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(shape_err(format!("{} entries in row {r}", row.len())));
        }
        let polys = row
            .iter()
            .enumerate()
            .map(|(c, p)| poly_from_dto(p, nvars, &format!("{path}[{r}][{c}]")))
            .collect::<Result<Vec<_>, _>>()?;
        entries.push(polys);
    }
    Ok(Matrix::from_fn(rows, cols, |r, c| entries[r][c].clone()))
}

fn square_from_dto(
    m: &MatrixDto,
    nvars: usize,
    path: &str,
) -> Result<Matrix<LaurentPoly<BigInt>>, FixtureError> {
    matrix_from_dto(m, m.len(), m.len(), nvars, path)
}

fn complex_parts(
    ring: &RingSpec,
    min_degree: i64,
    dims: &[usize],
    labels: &Option<Vec<Vec<String>>>,
    boundaries: &[MatrixDto],
    path: &str,
) -> Result<BasedChainComplex<BigInt>, FixtureError> {
    check_ring(ring, &join(path, "ring"))?;
    let nvars = ring.rank();
    let expected = dims.len().saturating_sub(1);
    if boundaries.len() != expected {
        return Err(invalid(
            &join(path, "boundaries"),
            format!(
                "{} boundaries for {} degrees, expected {expected}",
                boundaries.len(),
                dims.len()
            ),
        ));
    }
    let mats = boundaries
        .iter()
        .enumerate()
        .map(|(k, b)| {
            matrix_from_dto(
                b,
                dims[k],
                dims[k + 1],
                nvars,
                &format!("{}[{k}]", join(path, "boundaries")),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let c = BasedChainComplex::new(ring.clone(), min_degree, dims.to_vec(), mats)
        .map_err(|e| complex_error(path, e))?;
    match labels {
        Some(l) => c
            .with_labels(l.clone())
            .map_err(|e| invalid(&join(path, "labels"), e)),
        None => Ok(c),
    }
}

fn complex_from_dto(
    dto: &ComplexDto,
    path: &str,
) -> Result<BasedChainComplex<BigInt>, FixtureError> {
    complex_parts(
        &dto.ring,
        dto.min_degree,
        &dto.dims,
        &dto.labels,
        &dto.boundaries,
        path,
    )
}

fn novikov_from_dto(
    dto: &NovikovDto,
    parent: Option<&RingSpec>,
    path: &str,
) -> Result<NovikovFixture, FixtureError> {
    if let Some(p) = parent {
        same_ring(p, &dto.ring, &join(path, "ring"))?;
    }
    let complex = complex_parts(
        &dto.ring,
        dto.min_degree,
        &dto.dims,
        &dto.labels,
        &dto.boundaries,
        path,
    )?;
    let nvars = dto.ring.rank();
    let cn = match &dto.indices {
        Some(ix) => NovikovComplex::with_indices(complex, ix, dto.order),
        None => NovikovComplex::new(complex, dto.order),
    }
    .map_err(|e| novikov_error(path, e))?;
    let xi = match &dto.offsets {
        None => EulerLift::zero(cn.generator_count(), nvars),
        Some(offs) => {
            let base = join(path, "offsets");
            if offs.len() != cn.generator_count() {
                return Err(invalid(
                    &base,
                    format!(
                        "{} offsets for {} generators",
                        offs.len(),
                        cn.generator_count()
                    ),
                ));
            }
            let offsets = offs
                .iter()
                .enumerate()
                .map(|(i, t)| unit_from_term(t, nvars, &format!("{base}[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            EulerLift { offsets }
        }
    };
    Ok(NovikovFixture { cn, xi })
}

fn orbits_from_dto(
    dto: &OrbitsDto,
    ring: &RingSpec,
    path: &str,
) -> Result<Vec<ClosedOrbit>, FixtureError> {
    check_ring(ring, &join(path, "ring"))?;
    let nvars = ring.rank();
    dto.orbits
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let at = format!("{}[{i}]", join(path, "orbits"));
            if o.class.nvars() != nvars {
                return Err(FixtureError::RingMismatch {
                    path: format!("{at}.class.v"),
                    expected: format!("{nvars} group exponents"),
                    found: o.class.nvars().to_string(),
                });
            }
            let (mut i_minus, mut i_zero) = (o.i_minus, o.i_zero);
            if let (Some(a), None, None) = (&o.return_map, i_minus, i_zero) {
                if let Ok((m, z)) = eigen_counts(a) {
                    i_minus = Some(m);
                    i_zero = Some(z);
                }
            }
            let orbit = ClosedOrbit {
                class: o.class.clone(),
                period: o.period,
                sign: o.sign,
                i_minus,
                i_zero,
                return_map: o.return_map.clone(),
            };
            orbit.validate(i).map_err(|e| invalid(&at, e))?;
            Ok(orbit)
        })
        .collect()
}

fn returnmaps_from_dto(
    phi: &[MatrixDto],
    ring: &RingSpec,
    path: &str,
) -> Result<ReturnMapData<BigInt>, FixtureError> {
    check_ring(ring, "ring")?;
    let mats = phi
        .iter()
        .enumerate()
        .map(|(i, m)| square_from_dto(m, ring.rank(), &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    ReturnMapData::new(mats).map_err(|e| invalid(path, e))
}

fn cut_from_dto(
    dto: &CutSystemDto,
    parent: Option<&RingSpec>,
    path: &str,
) -> Result<CutSystem<BigInt>, FixtureError> {
    let ring = &dto.sigma.ring;
    if let Some(r) = &dto.ring {
        same_ring(r, ring, &join(path, "sigma.ring"))?;
    }
    if let Some(p) = parent {
        same_ring(p, ring, &join(path, "sigma.ring"))?;
    }
    let sigma = complex_from_dto(&dto.sigma, &join(path, "sigma"))?;
    let nvars = ring.rank();
    let top = dto.sigma.dims.len();
    let e = |i: usize| dto.sigma.dims.get(i).copied().unwrap_or(0);
    let phi = returnmaps_from_dto(&dto.phi, ring, &join(path, "phi"))?;
    let crit = &dto.crit_dims;
    if crit.len() != top + 1 {
        return Err(invalid(
            &join(path, "crit_dims"),
            format!("{} entries, expected {}", crit.len(), top + 1),
        ));
    }
    let blocks = |list: &[MatrixDto], name: &str, shape: &dyn Fn(usize) -> (usize, usize)| {
        let base = join(path, name);
        if list.len() != top {
            return Err(invalid(
                &base,
                format!("{} matrices, expected {top}", list.len()),
            ));
        }
        list.iter()
            .enumerate()
            .map(|(k, m)| {
                let (r, c) = shape(k + 1);
                matrix_from_dto(m, r, c, nvars, &format!("{base}[{k}]"))
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let n = blocks(&dto.n, "N", &|i| (crit[i - 1], crit[i]))?;
    let m = blocks(&dto.m, "M", &|i| (e(i - 1), crit[i]))?;
    let w = blocks(&dto.w, "W", &|i| (crit[i - 1], e(i - 1)))?;
    CutSystem::new(sigma, phi, crit.clone(), n, m, w).map_err(|e| match e {
        CutError::Complex(e) => complex_error(path, e),
        e => invalid(path, e),
    })
}

fn path_from_dto(
    dto: &PathMatrixDto,
    parent: Option<&RingSpec>,
    path: &str,
) -> Result<PathMatrix<BigInt>, FixtureError> {
    let ring = match (&dto.ring, parent) {
        (Some(r), Some(p)) => {
            same_ring(p, r, &join(path, "ring"))?;
            r.clone()
        }
        (Some(r), None) => r.clone(),
        (None, Some(p)) => p.clone(),
        (None, None) => RingSpec::default(),
    };
    check_ring(&ring, &join(path, "ring"))?;
    let nvars = ring.rank();
    let p = square_from_dto(&dto.p, nvars, &join(path, "P"))?;
    let offset = match &dto.offset {
        Some(t) => unit_from_term(t, nvars, &join(path, "offset"))?,
        None => Monomial::one(nvars),
    };
    let n = p.rows();
    let rows = dto
        .row_labels
        .clone()
        .unwrap_or_else(|| (0..n).map(|i| format!("x{i}")).collect());
    let cols = dto
        .col_labels
        .clone()
        .unwrap_or_else(|| (0..n).map(|j| format!("y{j}")).collect());
    PathMatrix::new(ring, p, offset, rows, cols).map_err(|e| invalid(path, e))
}

fn scenario_from_dto(dto: &ScenarioDto) -> Result<Scenario, FixtureError> {
    let ring = &dto.ring;
    check_ring(ring, "ring")?;
    let cut = dto
        .cut
        .as_ref()
        .map(|c| cut_from_dto(c, Some(ring), "cut"))
        .transpose()?;
    let novikov = dto
        .novikov
        .as_ref()
        .map(|n| novikov_from_dto(n, Some(ring), "novikov"))
        .transpose()?;
    let path = dto
        .path
        .as_ref()
        .map(|p| path_from_dto(p, Some(ring), "path"))
        .transpose()?;
    let returnmaps = dto
        .returnmaps
        .as_ref()
        .map(|r| {
            if let Some(own) = &r.ring {
                same_ring(ring, own, "returnmaps.ring")?;
            }
            returnmaps_from_dto(&r.phi, ring, "returnmaps.phi")
        })
        .transpose()?;
    let orbits = dto
        .orbits
        .as_ref()
        .map(|o| {
            if let Some(own) = &o.ring {
                same_ring(ring, own, "orbits.ring")?;
            }
            orbits_from_dto(o, ring, "orbits")
        })
        .transpose()?;
    let cw = dto
        .cw
        .as_ref()
        .map(|c| {
            same_ring(ring, &c.ring, "cw.ring")?;
            complex_from_dto(c, "cw")
        })
        .transpose()?;
    Ok(Scenario {
        ring: ring.clone(),
        description: dto.description.clone(),
        cut,
        novikov,
        path,
        returnmaps,
        orbits,
        cw,
    })
}

fn coefficient(c: &BigInt, path: &str) -> Result<i64, FixtureError> {
    c.to_i64()
        .ok_or_else(|| invalid(path, "coefficient does not fit the fixture format"))
}

pub fn poly_to_dto(p: &LaurentPoly<BigInt>) -> Result<PolyDto, FixtureError> {
    p.terms()
        .map(|(m, c)| {
            Ok(TermDto {
                c: coefficient(c, "term")?,
                t: m.t,
                v: m.v.clone(),
            })
        })
        .collect()
}

fn unit_to_dto(m: &Monomial) -> TermDto {
    TermDto {
        c: 1,
        t: m.t,
        v: m.v.clone(),
    }
}

pub fn matrix_to_dto(m: &Matrix<LaurentPoly<BigInt>>) -> Result<MatrixDto, FixtureError> {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(poly_to_dto).collect())
        .collect()
}

fn matrices_to_dto(ms: &[Matrix<LaurentPoly<BigInt>>]) -> Result<Vec<MatrixDto>, FixtureError> {
    ms.iter().map(matrix_to_dto).collect()
}

pub fn complex_to_dto(c: &BasedChainComplex<BigInt>) -> Result<ComplexDto, FixtureError> {
    Ok(ComplexDto {
        ring: c.ring().clone(),
        min_degree: c.min_degree(),
        dims: c.dims().to_vec(),
        labels: Some(c.labels().to_vec()),
        boundaries: matrices_to_dto(c.boundaries())?,
    })
}

fn novikov_to_dto(n: &NovikovFixture) -> Result<NovikovDto, FixtureError> {
    let c = complex_to_dto(&n.cn.complex)?;
    Ok(NovikovDto {
        ring: c.ring,
        min_degree: c.min_degree,
        dims: c.dims,
        labels: c.labels,
        boundaries: c.boundaries,
        indices: Some(n.cn.indices()),
        offsets: Some(n.xi.offsets.iter().map(unit_to_dto).collect()),
        order: n.cn.order,
    })
}

fn orbits_to_dto(ring: Option<&RingSpec>, orbits: &[ClosedOrbit]) -> OrbitsDto {
    OrbitsDto {
        ring: ring.cloned(),
        orbits: orbits
            .iter()
            .map(|o| OrbitDto {
                class: o.class.clone(),
                period: o.period,
                sign: o.sign,
                i_minus: o.i_minus,
                i_zero: o.i_zero,
                return_map: o.return_map.clone(),
            })
            .collect(),
    }
}

fn cut_to_dto(c: &CutSystem<BigInt>) -> Result<CutSystemDto, FixtureError> {
    Ok(CutSystemDto {
        ring: None,
        sigma: complex_to_dto(&c.sigma)?,
        phi: matrices_to_dto(&c.phi.phi)?,
        crit_dims: c.crit_dims.clone(),
        n: matrices_to_dto(&c.n)?,
        m: matrices_to_dto(&c.m)?,
        w: matrices_to_dto(&c.w)?,
    })
}

fn path_to_dto(p: &PathMatrix<BigInt>, with_ring: bool) -> Result<PathMatrixDto, FixtureError> {
    Ok(PathMatrixDto {
        ring: with_ring.then(|| p.ring.clone()),
        p: matrix_to_dto(&p.matrix)?,
        offset: Some(unit_to_dto(&p.offset)),
        row_labels: Some(p.row_labels.clone()),
        col_labels: Some(p.col_labels.clone()),
    })
}

fn tagged<T: Serialize>(kind: &str, dto: &T) -> Value {
    let mut v = serde_json::to_value(dto).expect("fixture DTOs serialize");
    if let Value::Object(obj) = &mut v {
        obj.insert("kind".into(), Value::String(kind.into()));
    }
    v
}

/// The fixture as JSON, with an explicit `"kind"`.
pub fn to_value(f: &Fixture) -> Result<Value, FixtureError> {
    let kind = f.kind();
    Ok(match f {
        Fixture::Complex(c) => tagged(kind, &complex_to_dto(c)?),
        Fixture::Novikov(n) => tagged(kind, &novikov_to_dto(n)?),
        Fixture::Orbits(o) => tagged(kind, &orbits_to_dto(Some(&o.ring), &o.orbits)),
        Fixture::ReturnMaps(r) => tagged(
            kind,
            &ReturnMapsDto {
                ring: Some(r.ring.clone()),
                phi: matrices_to_dto(&r.maps.phi)?,
            },
        ),
        Fixture::CutSystem(c) => tagged(kind, &cut_to_dto(c)?),
        Fixture::PathMatrix(p) => tagged(kind, &path_to_dto(p, true)?),
        Fixture::Rational(r) => tagged(
            kind,
            &RationalDto {
                ring: r.ring.clone(),
                num: poly_to_dto(r.value.numerator())?,
                den: poly_to_dto(r.value.denominator())?,
            },
        ),
        Fixture::Scenario(s) => tagged(
            kind,
            &ScenarioDto {
                ring: s.ring.clone(),
                description: s.description.clone(),
                cut: s.cut.as_ref().map(cut_to_dto).transpose()?,
                novikov: s.novikov.as_ref().map(novikov_to_dto).transpose()?,
                path: s.path.as_ref().map(|p| path_to_dto(p, false)).transpose()?,
                returnmaps: s
                    .returnmaps
                    .as_ref()
                    .map(|r| {
                        Ok::<_, FixtureError>(ReturnMapsDto {
                            ring: None,
                            phi: matrices_to_dto(&r.phi)?,
                        })
                    })
                    .transpose()?,
                orbits: s.orbits.as_ref().map(|o| orbits_to_dto(None, o)),
                cw: s.cw.as_ref().map(complex_to_dto).transpose()?,
            },
        ),
    })
}

pub fn to_string_pretty(f: &Fixture) -> Result<String, FixtureError> {
    Ok(serde_json::to_string_pretty(&to_value(f)?).expect("JSON values serialize"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn circle_cw() -> Value {
        json!({
            "ring": {"group_vars": [], "t": "t"},
            "min_degree": 0,
            "dims": [1, 1],
            "boundaries": [[[[{"c": 1, "t": 0}, {"c": -1, "t": 1}]]]]
        })
    }

    #[test]
    fn infers_complex_and_round_trips() {
        let f = parse_value(circle_cw()).unwrap();
        assert_eq!(f.kind(), "complex");
        let again = parse_value(to_value(&f).unwrap()).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn missing_coefficient_names_the_path() {
        let mut v = circle_cw();
        v["boundaries"][0][0][0][1] = json!({"t": 1});
        match parse_value(v) {
            Err(FixtureError::Schema { path, message }) => {
                assert_eq!(path, "boundaries[0][0][0][1]");
                assert!(message.contains("`c`"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mixed_rings_are_rejected() {
        let v = json!({
            "kind": "scenario",
            "ring": {"group_vars": ["v1"], "t": "t"},
            "cw": {
                "ring": {"group_vars": ["v1", "v2"], "t": "t"},
                "dims": [1],
                "boundaries": []
            }
        });
        assert!(matches!(
            parse_value(v),
            Err(FixtureError::RingMismatch { .. })
        ));
    }

    #[test]
    fn term_length_must_match_rank() {
        let mut v = circle_cw();
        v["boundaries"][0][0][0][0] = json!({"c": 1, "t": 0, "v": [1]});
        assert!(matches!(
            parse_value(v),
            Err(FixtureError::RingMismatch { .. })
        ));
    }

    #[test]
    fn broken_novikov_is_a_violation() {
        let v = json!({
            "ring": {"group_vars": [], "t": "t"},
            "dims": [1, 1, 1],
            "boundaries": [[[[{"c": 1, "t": 0}]]], [[[{"c": 1, "t": 0}]]]],
            "indices": [0, 1, 2]
        });
        let err = parse_value(v).unwrap_err();
        assert!(err.is_violation());
        assert_eq!(err.to_string(), "d^2 != 0 at degree 2");
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert!(matches!(
            parse_str("{\"dims\": [1,"),
            Err(FixtureError::Syntax { line: 1, .. })
        ));
    }
}
