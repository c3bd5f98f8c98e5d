//! Assembly of X′ from cut data, K-matrices, and the main identity
//! I = τ(X′).
//!
//! In degree i the module of X′ is Dᵢ ⊕ Eᵢ ⊕ Fᵢ with Fᵢ ≅ Eᵢ₋₁, and
//!
//! ```text
//!        Dᵢ     Eᵢ     Fᵢ
//! Dᵢ₋₁ [ Nᵢ     0      Wᵢ        ]
//! Eᵢ₋₁ [ −tMᵢ   ∂ᵢ^Σ   1 − tφᵢ₋₁ ]
//! Fᵢ₋₁ [ 0      0      −∂ᵢ₋₁^Σ   ]
//! ```
//!
//! Eliminating the Fᵢ → Eᵢ₋₁ blocks leaves D with boundary
//! Kᵢ = Nᵢ + tWᵢ(1 − tφᵢ₋₁)⁻¹Mᵢ, and
//! τ(X′) = ∏ᵢ det(1 − tφᵢ₋₁)^{(-1)^i} · τ(D, K).

use thiserror::Error;

use crate::complex::{BasedChainComplex, ComplexError};
use crate::novikov::{apply_offsets, EulerLift, NovikovComplex, NovikovError};
use crate::ring::{
    adjugate, det, FracMatrix, LaurentPoly, Matrix, Monomial, NovikovTruncation, RationalFunction,
    RingError, RingSpec,
};
use crate::scalar::Coefficient;
use crate::torsion::{
    greedy_decomposition_frac, raw_torsion, raw_torsion_frac, FracComplex, TorsionValue,
};
use crate::zeta::{det_one_minus_t_phi, zeta_lefschetz, ReturnMapData, ZetaError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("d^2 != 0 at degree {0}")]
    NotAComplex(i64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("order {requested} exceeds the known order {available}")]
    InsufficientOrder { requested: i64, available: i64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

type PolyMatrix<C> = Matrix<LaurentPoly<C>>;

/// Cut data: the level-set complex Σ (degrees 0..n−1), return maps φᵢ, and
/// the couplings Nᵢ: Dᵢ → Dᵢ₋₁, Mᵢ: Dᵢ → Eᵢ₋₁, Wᵢ: Fᵢ → Dᵢ₋₁ for
/// i = 1..n (stored at index i − 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSystem<C> {
    pub sigma: BasedChainComplex<C>,
    pub phi: ReturnMapData<C>,
    pub crit_dims: Vec<usize>,
    pub n: Vec<PolyMatrix<C>>,
    pub m: Vec<PolyMatrix<C>>,
    pub w: Vec<PolyMatrix<C>>,
}

fn shape_err(name: &str, i: usize, m: (usize, usize), want: (usize, usize)) -> CutError {
    CutError::Shape(format!(
        "{name}_{i} is {}x{}, expected {}x{}",
        m.0, m.1, want.0, want.1
    ))
}

impl<C: Coefficient> CutSystem<C> {
    pub fn new(
        sigma: BasedChainComplex<C>,
        phi: ReturnMapData<C>,
        crit_dims: Vec<usize>,
        n: Vec<PolyMatrix<C>>,
        m: Vec<PolyMatrix<C>>,
        w: Vec<PolyMatrix<C>>,
    ) -> Result<Self, CutError> {
        let top = sigma.dims().len();
        if sigma.min_degree() != 0 && top > 0 {
            return Err(CutError::Shape("sigma must start in degree 0".into()));
        }
        if phi.phi.len() != top {
            return Err(CutError::Shape(format!(
                "{} return maps for a level set with {top} degrees",
                phi.phi.len()
            )));
        }
        if crit_dims.len() != top + 1 {
            return Err(CutError::Shape(format!(
                "crit_dims has {} entries, expected {}",
                crit_dims.len(),
                top + 1
            )));
        }
        for (i, p) in phi.phi.iter().enumerate() {
            let e = sigma.dims()[i];
            if p.shape() != (e, e) {
                return Err(shape_err("phi", i, p.shape(), (e, e)));
            }
        }
        for (name, list) in [("N", &n), ("M", &m), ("W", &w)] {
            if list.len() != top {
                return Err(CutError::Shape(format!(
                    "{} {name} matrices, expected {top}",
                    list.len()
                )));
            }
        }
        let e = |i: usize| sigma.dims().get(i).copied().unwrap_or(0);
        for i in 1..=top {
            let want_n = (crit_dims[i - 1], crit_dims[i]);
            let want_m = (e(i - 1), crit_dims[i]);
            let want_w = (crit_dims[i - 1], e(i - 1));
            if n[i - 1].shape() != want_n {
                return Err(shape_err("N", i, n[i - 1].shape(), want_n));
            }
            if m[i - 1].shape() != want_m {
                return Err(shape_err("M", i, m[i - 1].shape(), want_m));
            }
            if w[i - 1].shape() != want_w {
                return Err(shape_err("W", i, w[i - 1].shape(), want_w));
            }
        }
        let nvars = sigma.nvars();
        let all = n.iter().chain(&m).chain(&w).chain(&phi.phi);
        for x in all.flat_map(|mat| mat.iter().map(|(_, _, x)| x)) {
            if x.nvars() != nvars {
                return Err(RingError::Mismatch {
                    left: nvars,
                    right: x.nvars(),
                }
                .into());
            }
            if !x.is_t_free() {
                return Err(CutError::Shape(
                    "cut data entries must not involve t".into(),
                ));
            }
        }
        Ok(CutSystem {
            sigma,
            phi,
            crit_dims,
            n,
            m,
            w,
        })
    }

    pub fn ring(&self) -> &RingSpec {
        self.sigma.ring()
    }

    pub fn nvars(&self) -> usize {
        self.sigma.nvars()
    }

    /// n: the top degree of X′.
    pub fn top_degree(&self) -> usize {
        self.sigma.dims().len()
    }

    fn e_dim(&self, i: usize) -> usize {
        self.sigma.dims().get(i).copied().unwrap_or(0)
    }

    fn f_dim(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.e_dim(i - 1)
        }
    }

    fn one_minus_t_phi(&self, i: usize) -> PolyMatrix<C> {
        let nvars = self.nvars();
        let t = LaurentPoly::t_power(1, nvars);
        let p = &self.phi.phi[i];
        Matrix::identity(p.rows(), nvars)
            .checked_add(&p.scale(&t).neg())
            .expect("square")
    }

    /// det(1 − tφᵢ).
    pub fn det_one_minus_t_phi(&self, i: usize) -> LaurentPoly<C> {
        det_one_minus_t_phi(&self.phi.phi[i], self.nvars()).expect("square")
    }

    /// Basis labels `D{i}_{j}`, `E{i}_{j}`, `F{i}_{j}` in block order.
    fn labels(&self) -> Vec<Vec<String>> {
        (0..=self.top_degree())
            .map(|i| {
                let block =
                    |name: &'static str, n: usize| (0..n).map(move |j| format!("{name}{i}_{j}"));
                block("D", self.crit_dims[i])
                    .chain(block("E", self.e_dim(i)))
                    .chain(block("F", self.f_dim(i)))
                    .collect()
            })
            .collect()
    }

    fn boundary_block(&self, i: usize) -> PolyMatrix<C> {
        let nvars = self.nvars();
        let t = LaurentPoly::t_power(1, nvars);
        let rows = [self.crit_dims[i - 1], self.e_dim(i - 1), self.f_dim(i - 1)];
        let cols = [self.crit_dims[i], self.e_dim(i), self.f_dim(i)];
        let sigma_i = self.sigma.boundary(i as i64);
        let sigma_below = self.sigma.boundary(i as i64 - 1);
        Matrix::from_blocks(
            &rows,
            &cols,
            |r, c| match (r, c) {
                (0, 0) => Some(self.n[i - 1].clone()),
                (0, 2) => Some(self.w[i - 1].clone()),
                (1, 0) => Some(self.m[i - 1].scale(&-&t)),
                (1, 1) => Some(sigma_i.clone()),
                (1, 2) => Some(self.one_minus_t_phi(i - 1)),
                (2, 2) => Some(sigma_below.neg()),
                _ => None,
            },
            LaurentPoly::zero(nvars),
        )
        .expect("block shapes validated at construction")
    }

    /// The complex X′ without checking ∂² = 0.
    pub fn assemble_unchecked(&self) -> BasedChainComplex<C> {
        let top = self.top_degree();
        let dims: Vec<usize> = (0..=top)
            .map(|i| self.crit_dims[i] + self.e_dim(i) + self.f_dim(i))
            .collect();
        let boundaries = (1..=top).map(|i| self.boundary_block(i)).collect();
        BasedChainComplex::new(self.ring().clone(), 0, dims, boundaries)
            .and_then(|c| c.with_labels(self.labels()))
            .expect("assembled shapes are consistent")
    }
}

/// The complex X′; fails if the cut data do not give ∂² = 0.
pub fn assemble_boundary<C: Coefficient>(
    cs: &CutSystem<C>,
) -> Result<BasedChainComplex<C>, CutError> {
    let c = cs.assemble_unchecked();
    match c.validate().failing_degrees().first() {
        Some(&i) => Err(CutError::NotAComplex(i)),
        None => Ok(c),
    }
}

/// One of the identities equivalent to ∂² = 0 on X′.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockIdentity {
    pub degree: i64,
    pub name: &'static str,
    pub holds: bool,
}

/// The identities ∂² = 0 splits into, for degrees 2..n:
/// Σ is a complex, Nᵢ₋₁Nᵢ = 0, Nᵢ₋₁Wᵢ = Wᵢ₋₁∂ᵢ₋₁^Σ,
/// Mᵢ₋₁Nᵢ + ∂ᵢ₋₁^Σ Mᵢ = 0, and Mᵢ₋₁Wᵢ + ∂ᵢ₋₁^Σ φᵢ₋₁ − φᵢ₋₂∂ᵢ₋₁^Σ = 0.
pub fn block_identities<C: Coefficient>(cs: &CutSystem<C>) -> Vec<BlockIdentity> {
    let nvars = cs.nvars();
    let mul = |a: &PolyMatrix<C>, b: &PolyMatrix<C>| a.checked_mul(b, nvars).expect("shapes");
    let add = |a: &PolyMatrix<C>, b: &PolyMatrix<C>| a.checked_add(b).expect("shapes");
    let mut out = Vec::new();
    for i in 2..=cs.top_degree() {
        let s = cs.sigma.boundary(i as i64 - 1);
        let s_up = cs.sigma.boundary(i as i64);
        let (n0, n1) = (&cs.n[i - 2], &cs.n[i - 1]);
        let (m0, m1) = (&cs.m[i - 2], &cs.m[i - 1]);
        let (w0, w1) = (&cs.w[i - 2], &cs.w[i - 1]);
        let (phi0, phi1) = (&cs.phi.phi[i - 2], &cs.phi.phi[i - 1]);
        let degree = i as i64;
        let mut push = |name, holds| {
            out.push(BlockIdentity {
                degree,
                name,
                holds,
            })
        };
        push("sigma d^2 = 0", mul(&s, &s_up).is_zero());
        push("N N = 0", mul(n0, n1).is_zero());
        push(
            "N W = W d_sigma",
            add(&mul(n0, w1), &mul(w0, &s).neg()).is_zero(),
        );
        push(
            "M N + d_sigma M = 0",
            add(&mul(m0, n1), &mul(&s, m1)).is_zero(),
        );
        let commutator = add(&mul(&s, phi1), &mul(phi0, &s).neg());
        push(
            "M W + d_sigma phi - phi d_sigma = 0",
            add(&mul(m0, w1), &commutator).is_zero(),
        );
    }
    out
}

/// Kᵢ for i = 1..n (index i − 1), each with the row denominator
/// det(1 − tφᵢ₋₁).
pub fn compute_k<C: Coefficient>(cs: &CutSystem<C>) -> Vec<FracMatrix<C>> {
    let nvars = cs.nvars();
    let t = LaurentPoly::t_power(1, nvars);
    (1..=cs.top_degree())
        .map(|i| {
            let a = cs.one_minus_t_phi(i - 1);
            let d = det(&a, nvars).expect("square");
            let adj = adjugate(&a, nvars).expect("square");
            let correction = cs.w[i - 1]
                .checked_mul(&adj, nvars)
                .and_then(|x| x.checked_mul(&cs.m[i - 1], nvars))
                .expect("shapes validated")
                .scale(&t);
            let num = cs.n[i - 1]
                .scale(&d)
                .checked_add(&correction)
                .expect("shapes validated");
            let rows = num.rows();
            FracMatrix {
                num,
                row_den: vec![d; rows],
            }
        })
        .collect()
}

/// Kᵢ as matrices of rational functions.
pub fn compute_k_rational<C: Coefficient>(cs: &CutSystem<C>) -> Vec<Matrix<RationalFunction<C>>> {
    compute_k(cs).iter().map(FracMatrix::to_rational).collect()
}

/// (D, K) as a based complex over the fraction field, rebased by `xi`.
pub fn k_complex<C: Coefficient>(cs: &CutSystem<C>, xi: Option<&EulerLift>) -> FracComplex<C> {
    let nvars = cs.nvars();
    let top = cs.top_degree();
    let mut d = Vec::with_capacity(top + 2);
    d.push(FracMatrix::from_poly(
        Matrix::zeros(0, cs.crit_dims[0], nvars),
        nvars,
    ));
    d.extend(compute_k(cs));
    d.push(FracMatrix::from_poly(
        Matrix::zeros(cs.crit_dims[top], 0, nvars),
        nvars,
    ));
    let mut fc = FracComplex {
        nvars,
        min_degree: 0,
        dims: cs.crit_dims.clone(),
        d,
    };
    if let Some(xi) = xi {
        let mut it = xi.offsets.iter();
        for k in 0..=top {
            for j in 0..cs.crit_dims[k] {
                let m = it.next().expect("offset count checked");
                if m.is_one() {
                    continue;
                }
                let u = LaurentPoly::monomial(m.clone());
                fc.d[k].scale_column(j, &u);
                fc.d[k + 1].divide_row(j, &u);
            }
        }
    }
    fc
}

fn check_offsets<C: Coefficient>(cs: &CutSystem<C>, xi: &EulerLift) -> Result<(), CutError> {
    let count: usize = cs.crit_dims.iter().sum();
    if xi.offsets.len() != count {
        return Err(NovikovError::OffsetCount {
            expected: count,
            found: xi.offsets.len(),
        }
        .into());
    }
    Ok(())
}

/// ∏ᵢ det(1 − tφᵢ₋₁)^{(-1)^i}.
pub fn phi_factor<C: Coefficient>(cs: &CutSystem<C>) -> RationalFunction<C> {
    let nvars = cs.nvars();
    let mut num = LaurentPoly::one(nvars);
    let mut den = LaurentPoly::one(nvars);
    for i in 1..=cs.top_degree() {
        let d = cs.det_one_minus_t_phi(i - 1);
        if i % 2 == 0 {
            num = &num * &d;
        } else {
            den = &den * &d;
        }
    }
    RationalFunction::new(num, den).expect("determinants have constant term 1")
}

/// Raw τ(X′) as ∏ det(1 − tφᵢ₋₁)^{(-1)^i} · τ(D, K); `None` if (D, K) is
/// not acyclic.
pub fn tau_via_products_raw<C: Coefficient>(
    cs: &CutSystem<C>,
    xi: Option<&EulerLift>,
) -> Result<Option<RationalFunction<C>>, CutError> {
    if let Some(xi) = xi {
        check_offsets(cs, xi)?;
    }
    let k = k_complex(cs, xi);
    Ok(raw_torsion_frac(&k).map(|tau| &phi_factor(cs) * &tau))
}

pub fn tau_via_products<C: Coefficient>(cs: &CutSystem<C>) -> Result<TorsionValue<C>, CutError> {
    Ok(TorsionValue::from_raw(tau_via_products_raw(cs, None)?))
}

/// Raw τ(X′) computed directly from the assembled complex.
pub fn tau_direct_raw<C: Coefficient>(
    cs: &CutSystem<C>,
    xi: Option<&EulerLift>,
) -> Result<Option<RationalFunction<C>>, CutError> {
    let x = assemble_boundary(cs)?;
    let x = match xi {
        Some(xi) => {
            check_offsets(cs, xi)?;
            apply_offsets(&x, &cs.crit_dims, &xi.offsets)?
        }
        None => x,
    };
    Ok(raw_torsion(&x))
}

/// det(Ωᵢ) = det(1 − tφᵢ₋₁)·det(Kᵢ: Dᵢᴬ → Dᵢ₋₁ᴮ) per degree, where Ωᵢ is
/// the block of ∂ᵢ on rows Dᵢ₋₁ᴮ ⊕ Eᵢ₋₁ and columns Dᵢᴬ ⊕ Fᵢ. The split
/// D = Dᴬ ⊕ Dᴮ is the greedy decomposition of (D, K); `None` if there is
/// none.
pub fn omega_identity<C: Coefficient>(cs: &CutSystem<C>) -> Option<Vec<(i64, bool)>> {
    let nvars = cs.nvars();
    let kc = k_complex(cs, None);
    let dec = greedy_decomposition_frac(&kc)?;
    let x = cs.assemble_unchecked();
    let mut out = Vec::new();
    for i in 1..=cs.top_degree() {
        let (b_rows, a_cols) = (&dec.b[i - 1], &dec.a[i]);
        let e_start = cs.crit_dims[i - 1];
        let rows: Vec<usize> = b_rows
            .iter()
            .copied()
            .chain(e_start..e_start + cs.e_dim(i - 1))
            .collect();
        let f_start = cs.crit_dims[i] + cs.e_dim(i);
        let cols: Vec<usize> = a_cols
            .iter()
            .copied()
            .chain(f_start..f_start + cs.f_dim(i))
            .collect();
        let omega = det(&x.boundary(i as i64).submatrix(&rows, &cols), nvars).expect("square");
        let k_det = kc.d[i]
            .submatrix(b_rows, a_cols)
            .det(nvars)
            .expect("square");
        let rhs = &RationalFunction::from_poly(cs.det_one_minus_t_phi(i - 1)) * &k_det;
        out.push((
            i as i64,
            RationalFunction::from_poly(omega).frac_equal(&rhs),
        ));
    }
    Some(out)
}

/// Whether the expansion of every Kᵢ agrees with the Novikov boundary
/// ∂ᵢ entrywise through t-degree `k`.
pub fn check_k_vs_novikov<C: Coefficient>(
    cs: &CutSystem<C>,
    cn: &NovikovComplex<C>,
    k: i64,
) -> Result<bool, CutError> {
    let top = cs.top_degree() as i64;
    let c = &cn.complex;
    let outside = c.degrees().any(|i| !(0..=top).contains(&i) && c.dim(i) > 0);
    if outside || (0..=top).any(|i| c.dim(i) != cs.crit_dims[i as usize]) {
        return Err(CutError::DimensionMismatch(format!(
            "critical point counts {:?} do not match the Novikov complex",
            cs.crit_dims
        )));
    }
    if let Some(o) = cn.order {
        if k > o {
            return Err(CutError::InsufficientOrder {
                requested: k,
                available: o,
            });
        }
    }
    for (idx, kmat) in compute_k(cs).iter().enumerate() {
        let i = idx as i64 + 1;
        let d = c.boundary(i);
        for r in 0..kmat.rows() {
            for col in 0..kmat.cols() {
                let series = kmat.entry(r, col).expand(k)?;
                if series.poly() != &d.get(r, col).truncate(k) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn valuation<C: Coefficient>(x: &RationalFunction<C>) -> Option<i64> {
    Some(x.numerator().min_t()? - x.denominator().min_t()?)
}

/// x ≈ y: the expansions agree in the first `k` t-degrees starting from the
/// lower of the two valuations.
pub fn approx_equal<C: Coefficient>(
    x: &RationalFunction<C>,
    y: &RationalFunction<C>,
    k: i64,
) -> Result<bool, RingError> {
    let start = match (valuation(x), valuation(y)) {
        (None, None) => return Ok(true),
        (Some(a), None) | (None, Some(a)) => a,
        (Some(a), Some(b)) => a.min(b),
    };
    let top = start + k - 1;
    Ok(x.expand(top)?.agrees_through(&y.expand(top)?, top))
}

/// Series form of [`approx_equal`]; false when either operand is not known
/// far enough.
pub fn approx_equal_series<C: Coefficient>(
    x: &NovikovTruncation<C>,
    y: &NovikovTruncation<C>,
    k: i64,
) -> bool {
    let start = match (x.poly().min_t(), y.poly().min_t()) {
        (None, None) => return true,
        (Some(a), None) | (None, Some(a)) => a,
        (Some(a), Some(b)) => a.min(b),
    };
    let top = start + k - 1;
    top <= x.order() && top <= y.order() && x.agrees_through(y, top)
}

/// Outcome of [`verify_main_theorem`].
#[derive(Debug, Clone)]
pub struct MainTheoremReport<C> {
    pub order: i64,
    pub zeta: RationalFunction<C>,
    pub tau_cn: TorsionValue<C>,
    pub invariant: TorsionValue<C>,
    pub tau_direct: TorsionValue<C>,
    pub tau_products: TorsionValue<C>,
    /// ζ·τ(CN)(ξ) = τ(X′) modulo ± monomial units.
    pub canonical_equal: bool,
    /// ζ·τ(CN)(ξ) = ±τ(X′) with the bases induced by ξ.
    pub raw_equal_up_to_sign: bool,
    /// The product formula agrees with the direct torsion.
    pub products_equal: bool,
    /// The expansions of both sides agree up to sign through `series_order`.
    pub series_agree: bool,
    pub series_order: i64,
    /// Whether the Novikov data are exact polynomials.
    pub exact_data: bool,
}

impl<C> MainTheoremReport<C> {
    /// Exact equality for exact Novikov data, series agreement otherwise;
    /// the product formula must hold in both cases.
    pub fn holds(&self) -> bool {
        self.products_equal
            && if self.exact_data {
                self.canonical_equal
            } else {
                self.series_agree
            }
    }
}

/// Checks I = ζ·τ(CN)(ξ) against τ(X′) with X′ based compatibly with ξ.
///
/// Requires Kᵢ ≈ ∂ᵢ of CN through t-degree `k`.
pub fn verify_main_theorem<C: Coefficient>(
    cs: &CutSystem<C>,
    cn: &NovikovComplex<C>,
    xi: &EulerLift,
    k: i64,
) -> Result<MainTheoremReport<C>, CutError> {
    if !check_k_vs_novikov(cs, cn, k)? {
        return Err(CutError::Precondition(format!(
            "K does not match the Novikov boundary through t^{k}"
        )));
    }
    check_offsets(cs, xi)?;
    let nvars = cs.nvars();
    let zeta = zeta_lefschetz(&cs.phi, nvars)?;
    let tau_cn_raw = cn.tau_raw(xi)?;
    let invariant_raw = tau_cn_raw.as_ref().map(|t| &zeta * t);
    let direct_raw = tau_direct_raw(cs, Some(xi))?;
    let products_raw = tau_via_products_raw(cs, Some(xi))?;

    let tau_cn = TorsionValue::from_raw(tau_cn_raw);
    let invariant = TorsionValue::from_raw(invariant_raw.clone());
    let tau_direct = TorsionValue::from_raw(direct_raw.clone());
    let tau_products = TorsionValue::from_raw(products_raw);
    let raw_equal_up_to_sign = match (&invariant_raw, &direct_raw) {
        (Some(a), Some(b)) => a.equal_up_to_sign(b),
        (None, None) => true,
        _ => false,
    };

    let (series_agree, series_order) = match (cn.tau_series(xi, k)?, &direct_raw) {
        (Some(tau_series), Some(direct)) => {
            let lhs = zeta.expand(k)?.mul(&tau_series);
            let order = lhs.order().min(k);
            let rhs = direct.expand(order)?;
            let lhs = lhs.truncated(order);
            (lhs == rhs || lhs == rhs.neg(), order)
        }
        (None, None) => (true, k),
        _ => (false, k),
    };

    Ok(MainTheoremReport {
        order: k,
        canonical_equal: invariant == tau_direct,
        products_equal: tau_products == tau_direct,
        zeta,
        tau_cn,
        invariant,
        tau_direct,
        tau_products,
        raw_equal_up_to_sign,
        series_agree,
        series_order,
        exact_data: cn.order.is_none(),
    })
}

/// Expansion of a unit monomial as a series, used when shifting
/// comparisons by an offset.
pub fn monomial_series<C: Coefficient>(m: &Monomial) -> NovikovTruncation<C> {
    NovikovTruncation::exact(LaurentPoly::monomial(m.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type P = LaurentPoly<BigInt>;
    type R = RationalFunction<BigInt>;

    fn c(n: i64) -> P {
        P::from_int(n, 0)
    }
    fn mat(rows: Vec<Vec<i64>>, cols: usize) -> PolyMatrix<BigInt> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(c).collect())
            .collect();
        Matrix::from_rows(rows, cols).unwrap()
    }
    fn empty(r: usize, k: usize) -> PolyMatrix<BigInt> {
        Matrix::zeros(r, k, 0)
    }
    fn point() -> BasedChainComplex<BigInt> {
        BasedChainComplex::new(RingSpec::default(), 0, vec![1], vec![]).unwrap()
    }
    fn torus() -> BasedChainComplex<BigInt> {
        BasedChainComplex::new(
            RingSpec::default(),
            0,
            vec![1, 2, 1],
            vec![empty(1, 2), empty(2, 1)],
        )
        .unwrap()
    }
    fn phi(blocks: Vec<PolyMatrix<BigInt>>) -> ReturnMapData<BigInt> {
        ReturnMapData::new(blocks).unwrap()
    }

    fn circle() -> CutSystem<BigInt> {
        CutSystem::new(
            point(),
            phi(vec![mat(vec![vec![1]], 1)]),
            vec![0, 0],
            vec![empty(0, 0)],
            vec![empty(1, 0)],
            vec![empty(0, 1)],
        )
        .unwrap()
    }

    fn circle_pair() -> CutSystem<BigInt> {
        CutSystem::new(
            point(),
            phi(vec![mat(vec![vec![0]], 1)]),
            vec![1, 1],
            vec![mat(vec![vec![1]], 1)],
            vec![mat(vec![vec![1]], 1)],
            vec![mat(vec![vec![-1]], 1)],
        )
        .unwrap()
    }

    fn cat_map_phi() -> ReturnMapData<BigInt> {
        phi(vec![
            mat(vec![vec![1]], 1),
            mat(vec![vec![2, 1], vec![1, 1]], 2),
            mat(vec![vec![1]], 1),
        ])
    }

    fn cat_map() -> CutSystem<BigInt> {
        CutSystem::new(
            torus(),
            cat_map_phi(),
            vec![0, 0, 0, 0],
            vec![empty(0, 0); 3],
            vec![empty(1, 0), empty(2, 0), empty(1, 0)],
            vec![empty(0, 1), empty(0, 2), empty(0, 1)],
        )
        .unwrap()
    }

    fn crit_0110() -> CutSystem<BigInt> {
        CutSystem::new(
            torus(),
            cat_map_phi(),
            vec![0, 1, 1, 0],
            vec![empty(0, 1), mat(vec![vec![1]], 1), empty(1, 0)],
            vec![
                mat(vec![vec![0]], 1),
                mat(vec![vec![1], vec![1]], 1),
                empty(1, 0),
            ],
            vec![empty(0, 1), mat(vec![vec![1, 0]], 2), mat(vec![vec![0]], 1)],
        )
        .unwrap()
    }

    fn one_minus_t() -> P {
        &c(1) - &P::t_power(1, 0)
    }

    #[test]
    fn circle_assembles_to_one_minus_t() {
        let x = assemble_boundary(&circle()).unwrap();
        assert_eq!(x.boundary(1).get(0, 0), &one_minus_t());
        let tau = tau_via_products(&circle()).unwrap();
        assert_eq!(tau.render(&RingSpec::default()), "(1 - t)^-1");
    }

    #[test]
    fn products_match_direct() {
        for cs in [circle(), circle_pair(), cat_map(), crit_0110()] {
            let direct = TorsionValue::from_raw(tau_direct_raw(&cs, None).unwrap());
            let products = tau_via_products(&cs).unwrap();
            assert!(!direct.is_zero());
            assert_eq!(direct, products);
            let raw_d = tau_direct_raw(&cs, None).unwrap().unwrap();
            let raw_p = tau_via_products_raw(&cs, None).unwrap().unwrap();
            assert!(raw_d.equal_up_to_sign(&raw_p));
        }
    }

    #[test]
    fn cat_map_torsion_is_its_zeta() {
        let cs = cat_map();
        let tau = tau_via_products(&cs).unwrap();
        let zeta = zeta_lefschetz(&cs.phi, 0).unwrap();
        assert_eq!(tau, TorsionValue::from_raw(Some(zeta)));
    }

    #[test]
    fn block_identities_hold() {
        for cs in [cat_map(), crit_0110()] {
            assert!(block_identities(&cs).iter().all(|b| b.holds));
        }
    }

    #[test]
    fn omega_identity_holds() {
        for cs in [circle(), circle_pair(), cat_map(), crit_0110()] {
            assert!(omega_identity(&cs).unwrap().iter().all(|(_, ok)| *ok));
        }
    }

    #[test]
    fn k_examples() {
        // W = 0 kills the correction
        let cs = CutSystem::new(
            point(),
            phi(vec![mat(vec![vec![3]], 1)]),
            vec![1, 1],
            vec![mat(vec![vec![5]], 1)],
            vec![mat(vec![vec![2]], 1)],
            vec![mat(vec![vec![0]], 1)],
        )
        .unwrap();
        assert_eq!(compute_k_rational(&cs)[0].get(0, 0), &R::from_poly(c(5)));
        // 1×1: a + twm/(1 − tf)
        let cs = CutSystem::new(
            point(),
            phi(vec![mat(vec![vec![3]], 1)]),
            vec![1, 1],
            vec![mat(vec![vec![5]], 1)],
            vec![mat(vec![vec![2]], 1)],
            vec![mat(vec![vec![7]], 1)],
        )
        .unwrap();
        let t = P::t_power(1, 0);
        let expected = &R::from_poly(c(5))
            + &R::new(
                t.scale(&BigInt::from(14)),
                &c(1) - &t.scale(&BigInt::from(3)),
            )
            .unwrap();
        assert_eq!(compute_k_rational(&cs)[0].get(0, 0), &expected);
    }

    #[test]
    fn wrong_m_shape_is_rejected() {
        let err = CutSystem::new(
            point(),
            phi(vec![mat(vec![vec![0]], 1)]),
            vec![1, 1],
            vec![mat(vec![vec![1]], 1)],
            vec![mat(vec![vec![1], vec![1]], 1)],
            vec![mat(vec![vec![-1]], 1)],
        );
        assert!(matches!(err, Err(CutError::Shape(_))));
    }

    #[test]
    fn approx_equal_examples() {
        let x = R::new(c(1), one_minus_t()).unwrap();
        let t = P::t_power(1, 0);
        let y = R::from_poly(&(&c(1) + &t) + &t.pow(2));
        assert!(approx_equal(&x, &y, 3).unwrap());
        assert!(!approx_equal(&x, &y, 4).unwrap());
        assert!(approx_equal(&x, &x, 10).unwrap());
    }

    fn cn_from(cs: &CutSystem<BigInt>, k: i64) -> NovikovComplex<BigInt> {
        let ks = compute_k(cs);
        let boundaries = ks
            .iter()
            .map(|m| {
                Matrix::from_fn(m.rows(), m.cols(), |r, col| {
                    m.entry(r, col).expand(k).unwrap().into_poly()
                })
            })
            .collect();
        let cx = BasedChainComplex::new(RingSpec::default(), 0, cs.crit_dims.clone(), boundaries)
            .unwrap();
        NovikovComplex::new(cx, Some(k)).unwrap()
    }

    #[test]
    fn k_check_truncation_semantics() {
        let cs = crit_0110();
        let cn = cn_from(&cs, 10);
        for k in 0..=10 {
            assert!(check_k_vs_novikov(&cs, &cn, k).unwrap());
        }
        let mut perturbed = cn.complex.boundaries().to_vec();
        let bump = P::t_power(3, 0);
        perturbed[1][(0, 0)] = &perturbed[1][(0, 0)] + &bump;
        let cx = BasedChainComplex::new(RingSpec::default(), 0, cs.crit_dims.clone(), perturbed)
            .unwrap();
        let bad = NovikovComplex::new(cx, Some(10)).unwrap();
        assert!(check_k_vs_novikov(&cs, &bad, 2).unwrap());
        assert!(!check_k_vs_novikov(&cs, &bad, 3).unwrap());
    }

    #[test]
    fn main_theorem_on_small_systems() {
        let empty_cn = |cs: &CutSystem<BigInt>| {
            let dims = cs.crit_dims.clone();
            let b = (1..dims.len())
                .map(|i| empty(dims[i - 1], dims[i]))
                .collect();
            NovikovComplex::new(
                BasedChainComplex::new(RingSpec::default(), 0, dims, b).unwrap(),
                None,
            )
            .unwrap()
        };
        for cs in [circle(), cat_map()] {
            let cn = empty_cn(&cs);
            let report = verify_main_theorem(&cs, &cn, &EulerLift::zero(0, 0), 16).unwrap();
            assert!(report.holds(), "{report:?}");
            assert!(report.raw_equal_up_to_sign);
        }
        let cs = circle_pair();
        let d = Matrix::from_rows(vec![vec![one_minus_t()]], 1).unwrap();
        let cn = NovikovComplex::new(
            BasedChainComplex::new(RingSpec::default(), 0, vec![1, 1], vec![d]).unwrap(),
            None,
        )
        .unwrap();
        let xi = EulerLift {
            offsets: vec![Monomial::t_power(2, 0), Monomial::t_power(-1, 0)],
        };
        let report = verify_main_theorem(&cs, &cn, &xi, 16).unwrap();
        assert!(report.holds() && report.raw_equal_up_to_sign, "{report:?}");
    }

    #[test]
    fn main_theorem_with_series_data() {
        let cs = crit_0110();
        let cn = cn_from(&cs, 12);
        let report = verify_main_theorem(&cs, &cn, &EulerLift::zero(2, 0), 12).unwrap();
        assert!(report.holds(), "{report:?}");
        assert!(report.series_order >= 10);
    }
}
