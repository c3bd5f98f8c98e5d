//! Seeded generators shared by the integration tests.
//!
//! Random acyclic complexes are built as direct sums of elementary
//! complexes conjugated by unimodular changes of basis, so their torsion is
//! known from the construction and never from the library.

#![allow(dead_code)]

use std::path::PathBuf;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use torsionlab::{Monomial, RatFunc, RingSpec};
use torsionlab::{ZComplex, ZMatrix, ZPoly};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_paths() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .expect("fixtures directory")
        .map(|e| e.expect("readable entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    out.sort();
    out
}

pub fn load(name: &str) -> torsionlab::fixture::Fixture {
    torsionlab::fixture::parse_file(fixture_dir().join(name)).expect("fixture parses")
}

/// ±t^a·v^b with small exponents.
pub fn random_unit(rng: &mut ChaCha8Rng, nvars: usize) -> ZPoly {
    let m = Monomial::new(
        rng.gen_range(-2..=2),
        (0..nvars).map(|_| rng.gen_range(-2..=2)).collect(),
    );
    let c = if rng.gen_bool(0.5) { 1 } else { -1 };
    ZPoly::term(BigInt::from(c), m)
}

/// A polynomial with up to `terms` terms, coefficients in [-2, 2]; may be 0.
pub fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, terms: usize) -> ZPoly {
    let mut p = ZPoly::zero(nvars);
    for _ in 0..rng.gen_range(0..=terms) {
        let m = Monomial::new(
            rng.gen_range(-1..=2),
            (0..nvars).map(|_| rng.gen_range(-1..=1)).collect(),
        );
        p.add_term(m, BigInt::from(rng.gen_range(-2..=2)));
    }
    p
}

pub fn random_nonzero_poly(rng: &mut ChaCha8Rng, nvars: usize) -> ZPoly {
    loop {
        let p = random_poly(rng, nvars, 3);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A product of elementary matrices and its inverse.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, nvars: usize) -> (ZMatrix, ZMatrix) {
    let mut g = ZMatrix::identity(n, nvars);
    let mut g_inv = ZMatrix::identity(n, nvars);
    if n < 2 {
        return (g, g_inv);
    }
    for _ in 0..rng.gen_range(1..=3) {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = random_nonzero_poly(rng, nvars);
        let e = ZMatrix::from_fn(n, n, |r, s| {
            if r == s {
                ZPoly::one(nvars)
            } else if r == i && s == j {
                c.clone()
            } else {
                ZPoly::zero(nvars)
            }
        });
        let e_inv = ZMatrix::from_fn(n, n, |r, s| {
            if r == s {
                ZPoly::one(nvars)
            } else if r == i && s == j {
                -c.clone()
            } else {
                ZPoly::zero(nvars)
            }
        });
        g = g.checked_mul(&e, nvars).unwrap();
        g_inv = e_inv.checked_mul(&g_inv, nvars).unwrap();
    }
    (g, g_inv)
}

/// An acyclic complex in degrees lo..=lo+2 together with its torsion, read
/// off the elementary blocks: ∂₁-blocks p contribute p^{(-1)^{lo+1}} and
/// ∂₂-blocks q contribute q^{(-1)^{lo+2}}.
pub struct KnownComplex {
    pub complex: ZComplex,
    pub torsion: RatFunc,
}

pub fn random_acyclic(rng: &mut ChaCha8Rng, nvars: usize) -> KnownComplex {
    let (r1, r2) = loop {
        let r1 = rng.gen_range(0..=2usize);
        let r2 = rng.gen_range(0..=2usize);
        if (1..=3).contains(&(r1 + r2)) {
            break (r1, r2);
        }
    };
    let lo = rng.gen_range(-1..=1i64);
    let dims = [r1, r1 + r2, r2];
    let p: Vec<ZPoly> = (0..r1).map(|_| random_nonzero_poly(rng, nvars)).collect();
    let q: Vec<ZPoly> = (0..r2).map(|_| random_nonzero_poly(rng, nvars)).collect();
    let d1 = ZMatrix::from_fn(dims[0], dims[1], |r, c| {
        if r == c {
            p[r].clone()
        } else {
            ZPoly::zero(nvars)
        }
    });
    let d2 = ZMatrix::from_fn(dims[1], dims[2], |r, c| {
        if r == r1 + c {
            q[c].clone()
        } else {
            ZPoly::zero(nvars)
        }
    });
    let (g0, _) = random_unimodular(rng, dims[0], nvars);
    let (g1, g1_inv) = random_unimodular(rng, dims[1], nvars);
    let (_, g2_inv) = random_unimodular(rng, dims[2], nvars);
    let d1 = g0
        .checked_mul(&d1, nvars)
        .unwrap()
        .checked_mul(&g1_inv, nvars)
        .unwrap();
    let d2 = g1
        .checked_mul(&d2, nvars)
        .unwrap()
        .checked_mul(&g2_inv, nvars)
        .unwrap();
    let complex =
        ZComplex::new(RingSpec::with_rank(nvars), lo, dims.to_vec(), vec![d1, d2]).unwrap();

    let prod = |v: &[ZPoly]| v.iter().fold(ZPoly::one(nvars), |acc, x| &acc * x);
    let (pp, qq) = (RatFunc::from_poly(prod(&p)), RatFunc::from_poly(prod(&q)));
    let pp = if (lo + 1) % 2 == 0 {
        pp
    } else {
        pp.inv().unwrap()
    };
    let qq = if (lo + 2) % 2 == 0 {
        qq
    } else {
        qq.inv().unwrap()
    };
    KnownComplex {
        complex,
        torsion: &pp * &qq,
    }
}

/// A complex in degrees 0..=2 that may carry homology: elementary blocks
/// with zero boundaries mixed in.
pub fn random_complex(rng: &mut ChaCha8Rng, nvars: usize) -> ZComplex {
    let dims: Vec<usize> = loop {
        let d: Vec<usize> = (0..3).map(|_| rng.gen_range(0..=2)).collect();
        if d.iter().sum::<usize>() > 0 {
            break d;
        }
    };
    let mut d1 = ZMatrix::zeros(dims[0], dims[1], nvars);
    let mut d2 = ZMatrix::zeros(dims[1], dims[2], nvars);
    // ∂₁ on the first r1 generators of degree 1, ∂₂ into the remaining ones.
    let r1 = rng.gen_range(0..=dims[0].min(dims[1]));
    let r2 = rng.gen_range(0..=dims[2].min(dims[1] - r1));
    for i in 0..r1 {
        d1 = set(&d1, i, i, random_nonzero_poly(rng, nvars));
    }
    for i in 0..r2 {
        d2 = set(&d2, r1 + i, i, random_nonzero_poly(rng, nvars));
    }
    let (g0, _) = random_unimodular(rng, dims[0], nvars);
    let (g1, g1_inv) = random_unimodular(rng, dims[1], nvars);
    let (_, g2_inv) = random_unimodular(rng, dims[2], nvars);
    let d1 = g0
        .checked_mul(&d1, nvars)
        .unwrap()
        .checked_mul(&g1_inv, nvars)
        .unwrap();
    let d2 = g1
        .checked_mul(&d2, nvars)
        .unwrap()
        .checked_mul(&g2_inv, nvars)
        .unwrap();
    ZComplex::new(RingSpec::with_rank(nvars), 0, dims, vec![d1, d2]).unwrap()
}

fn set(m: &ZMatrix, r: usize, c: usize, x: ZPoly) -> ZMatrix {
    ZMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        if (i, j) == (r, c) {
            x.clone()
        } else {
            m.get(i, j).clone()
        }
    })
}

/// Y-maps give couplings X_i = ∂_i Y_i − Y_{i−1} ∂″_i, which always make
/// the block matrix a differential.
pub fn random_coupling(rng: &mut ChaCha8Rng, sub: &ZComplex, quot: &ZComplex) -> Vec<ZMatrix> {
    let nvars = sub.nvars();
    let lo = sub.min_degree();
    let y: Vec<ZMatrix> = sub
        .degrees()
        .map(|i| ZMatrix::from_fn(sub.dim(i), quot.dim(i), |_, _| random_poly(rng, nvars, 2)))
        .collect();
    (lo + 1..=sub.max_degree())
        .map(|i| {
            let k = (i - lo) as usize;
            let a = sub.boundary(i).checked_mul(&y[k], nvars).unwrap();
            let b = y[k - 1].checked_mul(&quot.boundary(i), nvars).unwrap();
            a.checked_add(&b.neg()).unwrap()
        })
        .collect()
}

pub fn random_int_matrix(rng: &mut ChaCha8Rng, n: usize, range: i64) -> Vec<Vec<i64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-range..=range)).collect())
        .collect()
}
