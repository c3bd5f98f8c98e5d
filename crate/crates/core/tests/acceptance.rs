//! Acceptance gate: one line per criterion, non-zero exit if any fails.
//!
//! Randomized criteria use fixed ChaCha seeds so every run sees the same
//! instances.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torsionlab::complex::BasedChainComplex;
use torsionlab::cut::{
    assemble_boundary, check_k_vs_novikov, tau_direct_raw, tau_via_products, tau_via_products_raw,
    verify_main_theorem, CutSystem,
};
use torsionlab::fixture::{Fixture, Scenario};
use torsionlab::novikov::{invariant_i, tau_novikov};
use torsionlab::three_dim::sw_consistency_check;
use torsionlab::torsion::{
    all_decompositions, greedy_decomposition, product_formula_check, raw_torsion,
    torsion_from_decomposition, torsion_tau, ShortExactSequence, TorsionValue,
};
use torsionlab::zeta::{
    int_matrix, integral_series, zeta_exp, zeta_lefschetz, zeta_product, zeta_trace, ClosedOrbit,
    ReturnMapData,
};
use torsionlab::{Monomial, RatFunc, RingSpec, ZMatrix, ZPoly};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn scenario(name: &str) -> Box<Scenario> {
    match common::load(name) {
        Fixture::Scenario(s) => s,
        other => panic!("{name} is a {} fixture", other.kind()),
    }
}

fn poly(terms: &[(i64, i64)]) -> ZPoly {
    ZPoly::from_terms(
        0,
        terms
            .iter()
            .map(|&(c, t)| (Monomial::t_power(t, 0), BigInt::from(c))),
    )
}

fn one_minus_t_inverse() -> RatFunc {
    RatFunc::new(ZPoly::one(0), poly(&[(1, 0), (-1, 1)])).unwrap()
}

fn invariant_of(s: &Scenario) -> Result<TorsionValue<BigInt>, String> {
    let cs = s.cut.as_ref().ok_or("no cut system")?;
    let n = s.novikov.as_ref().ok_or("no Novikov complex")?;
    let zeta = zeta_lefschetz(&cs.phi, s.ring.rank()).map_err(|e| e.to_string())?;
    let tau_cn = tau_novikov(&n.cn, &n.xi).map_err(|e| e.to_string())?;
    Ok(invariant_i(&zeta, &tau_cn))
}

fn c1_circle() -> Verdict {
    let start = Instant::now();
    let s = scenario("circle_scenario.json");
    let cs = s.cut.as_ref().unwrap();
    let n = s.novikov.as_ref().unwrap();
    let expected = TorsionValue::from_raw(Some(one_minus_t_inverse()));
    let i = invariant_of(&s)?;
    let x = torsion_tau(&assemble_boundary(cs).map_err(|e| e.to_string())?);
    let report = verify_main_theorem(cs, &n.cn, &n.xi, 8).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(i == expected, format!("I = {i}"))?;
    ensure(x == expected, format!("tau(X') = {x}"))?;
    ensure(
        report.holds() && report.exact_data,
        "verify_main_theorem failed",
    )?;
    ensure(elapsed.as_secs_f64() < 1.0, format!("took {elapsed:?}"))?;
    Ok(format!(
        "I = tau(X') = (1 - t)^-1 in {:.1} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

fn c2_two_presentations() -> Verdict {
    let expected = TorsionValue::from_raw(Some(one_minus_t_inverse()));
    let a = invariant_of(&scenario("circle_scenario.json"))?;
    let b = invariant_of(&scenario("circle_pair_scenario.json"))?;
    ensure(a == expected && b == expected, format!("I = {a} and {b}"))?;
    let s = scenario("circle_pair_scenario.json");
    let n = s.novikov.as_ref().unwrap();
    let report =
        verify_main_theorem(s.cut.as_ref().unwrap(), &n.cn, &n.xi, 8).map_err(|e| e.to_string())?;
    ensure(report.holds(), "pair presentation fails the main theorem")?;
    Ok("both presentations give (1 - t)^-1".into())
}

fn c3_cat_map() -> Verdict {
    let s = scenario("cat_map_scenario.json");
    let cs = s.cut.as_ref().unwrap();
    let n = s.novikov.as_ref().unwrap();
    let zeta = zeta_lefschetz(&cs.phi, 0).map_err(|e| e.to_string())?;
    let expected = RatFunc::new(
        poly(&[(1, 0), (-3, 1), (1, 2)]),
        poly(&[(1, 0), (-1, 1)]).pow(2),
    )
    .unwrap();
    ensure(
        zeta == expected,
        format!("zeta = {}", zeta.display(&s.ring)),
    )?;
    let report = verify_main_theorem(cs, &n.cn, &n.xi, 8).map_err(|e| e.to_string())?;
    ensure(
        report.holds()
            && report.exact_data
            && report.canonical_equal
            && report.raw_equal_up_to_sign,
        "main theorem does not hold exactly",
    )?;
    let trace = zeta_trace(&cs.phi, 0, 20).map_err(|e| e.to_string())?;
    let expansion = zeta.expand(20).map_err(|e| e.to_string())?;
    ensure(
        trace == expansion,
        "zeta_trace disagrees with the Lefschetz expansion",
    )?;
    Ok("zeta = (1 - 3t + t^2)/(1 - t)^2, exact, trace agrees through t^20".into())
}

fn c4_zeta_cross() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cases = 60;
    for case in 0..cases {
        let degrees = rng.gen_range(1..=3);
        let phi: Vec<ZMatrix> = (0..degrees)
            .map(|_| {
                let n = rng.gen_range(1..=3);
                int_matrix(&common::random_int_matrix(&mut rng, n, 3))
            })
            .collect();
        let maps = ReturnMapData::new(phi).map_err(|e| e.to_string())?;
        let lefschetz = zeta_lefschetz(&maps, 0).map_err(|e| e.to_string())?;
        let expansion = lefschetz
            .expand(20)
            .map_err(|e| format!("case {case}: {e}"))?;
        let trace = zeta_trace(&maps, 0, 20).map_err(|e| format!("case {case}: {e}"))?;
        ensure(
            expansion == trace,
            format!("case {case}: expansions differ"),
        )?;
    }
    Ok(format!(
        "{cases} random return-map sets agree through t^20 with integral coefficients"
    ))
}

fn diagonal_orbit(rng: &mut ChaCha8Rng, nvars: usize) -> ClosedOrbit {
    let mut entry = || {
        let a: i64 = rng.gen_range(2..=4);
        if rng.gen_bool(0.5) {
            a
        } else {
            -a
        }
    };
    let a = vec![vec![entry(), 0], vec![0, entry()]];
    let class = Monomial::new(
        rng.gen_range(1..=3),
        (0..nvars).map(|_| rng.gen_range(-1..=1)).collect(),
    );
    ClosedOrbit::from_return_map(class, a).unwrap()
}

fn c5_exp_vs_product() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k = 12;
    let cases = 40;
    for case in 0..cases {
        let nvars = rng.gen_range(0..=1);
        let irreducibles: Vec<ClosedOrbit> = (0..rng.gen_range(1..=3))
            .map(|_| diagonal_orbit(&mut rng, nvars))
            .collect();
        let mut all = Vec::new();
        for o in &irreducibles {
            all.extend(o.iterates(k).map_err(|e| e.to_string())?);
        }
        let exp = zeta_exp(&all, nvars, k).map_err(|e| e.to_string())?;
        let exp = integral_series(&exp).map_err(|e| format!("case {case}: {e}"))?;
        let product = zeta_product(&irreducibles, nvars, k).map_err(|e| e.to_string())?;
        ensure(
            exp == product,
            format!("case {case}: orbit sum and product differ"),
        )?;
    }
    Ok(format!(
        "{cases} sets of 2x2 diagonal return maps agree through t^{k}"
    ))
}

fn c6_torsion_algebra() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut decompositions = 0;
    for case in 0..40 {
        let known = common::random_acyclic(&mut rng, case % 2);
        let decs = all_decompositions(&known.complex);
        ensure(!decs.is_empty(), format!("case {case}: no decomposition"))?;
        for dec in &decs {
            let tau = torsion_from_decomposition(&known.complex, dec)
                .ok_or_else(|| format!("case {case}: invalid decomposition"))?;
            ensure(
                tau.equal_mod_units(&known.torsion),
                format!("case {case}: pivot-dependent torsion"),
            )?;
            decompositions += 1;
        }
    }

    let ses_cases = 36;
    for case in 0..ses_cases {
        let nvars = case % 2;
        let sub = common::random_complex(&mut rng, nvars);
        let quot = common::random_complex(&mut rng, nvars);
        let coupling = common::random_coupling(&mut rng, &sub, &quot);
        let ses = ShortExactSequence::from_parts(sub, quot, coupling).map_err(|e| e.to_string())?;
        let (h, ht, hq) = (
            ses.sub.homology_basis(),
            ses.total.homology_basis(),
            ses.quotient.homology_basis(),
        );
        let ok =
            product_formula_check(&ses, &h, &ht, &hq).map_err(|e| format!("case {case}: {e}"))?;
        ensure(ok, format!("SES {case}: product formula fails"))?;
    }

    for case in 0..20 {
        let nvars = case % 2;
        let p = common::random_nonzero_poly(&mut rng, nvars);
        let lo = rng.gen_range(-2..=2);
        let m = ZMatrix::from_rows(vec![vec![p.clone()]], 1).unwrap();
        let cx =
            BasedChainComplex::new(RingSpec::with_rank(nvars), lo, vec![1, 1], vec![m]).unwrap();
        let p = RatFunc::from_poly(p);
        let expected = if (lo + 1) % 2 == 0 {
            p
        } else {
            p.inv().unwrap()
        };
        ensure(
            raw_torsion(&cx) == Some(expected),
            format!("two-term case {case}"),
        )?;
    }
    Ok(format!(
        "{decompositions} decompositions agree, {ses_cases} exact sequences satisfy the product formula, two-term identity holds"
    ))
}

fn c7_trefoil() -> Verdict {
    let Fixture::Complex(cw) = common::load("trefoil_zero_surgery_cw.json") else {
        return Err("trefoil fixture is not a complex".into());
    };
    let alexander = poly(&[(1, 0), (-1, 1), (1, 2)]);
    let expected = RatFunc::new(alexander, poly(&[(1, 0), (-1, 1)]).pow(2)).unwrap();
    let tau = torsion_tau(&cw);
    ensure(
        tau == TorsionValue::from_raw(Some(expected)),
        format!("tau = {tau}"),
    )?;
    Ok(format!("tau = {}", tau.render(cw.ring())))
}

fn cut_systems() -> Vec<(String, CutSystem<BigInt>)> {
    let mut out = Vec::new();
    for path in common::fixture_paths() {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        match torsionlab::fixture::parse_file(&path) {
            Ok(Fixture::CutSystem(cs)) => out.push((name, cs)),
            Ok(Fixture::Scenario(s)) => {
                if let Some(cs) = s.cut {
                    out.push((name, cs));
                }
            }
            _ => {}
        }
    }
    out
}

fn c8_products() -> Verdict {
    let mut checked = 0;
    let mut saw_cancel_pair = false;
    for (name, cs) in cut_systems() {
        let direct = torsion_tau(&assemble_boundary(&cs).map_err(|e| format!("{name}: {e}"))?);
        if direct.is_zero() {
            continue;
        }
        let products = tau_via_products(&cs).map_err(|e| format!("{name}: {e}"))?;
        ensure(
            products == direct,
            format!("{name}: {products} vs {direct}"),
        )?;
        let raw_p = tau_via_products_raw(&cs, None).map_err(|e| e.to_string())?;
        let raw_d = tau_direct_raw(&cs, None).map_err(|e| e.to_string())?;
        match (raw_p, raw_d) {
            (Some(a), Some(b)) => {
                ensure(a.equal_up_to_sign(&b), format!("{name}: raw values differ"))?
            }
            _ => return Err(format!("{name}: raw torsion missing")),
        }
        saw_cancel_pair |= cs.crit_dims == [0, 1, 1, 0];
        checked += 1;
    }
    ensure(saw_cancel_pair, "no fixture with crit_dims [0, 1, 1, 0]")?;
    Ok(format!(
        "{checked} cut systems, including crit_dims [0, 1, 1, 0]"
    ))
}

fn c9_k_semantics() -> Verdict {
    let compatible = [
        "circle_scenario.json",
        "circle_pair_scenario.json",
        "cat_map_scenario.json",
        "cancel_pair_scenario.json",
        "trefoil_zero_surgery_scenario.json",
    ];
    for name in compatible {
        let s = scenario(name);
        let n = s.novikov.as_ref().unwrap();
        let ok = check_k_vs_novikov(s.cut.as_ref().unwrap(), &n.cn, 8)
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(
            ok,
            format!("{name}: K and the Novikov boundary differ through t^8"),
        )?;
    }
    let s = scenario("cancel_pair_perturbed.json");
    let n = s.novikov.as_ref().unwrap();
    let cs = s.cut.as_ref().unwrap();
    let at4 = check_k_vs_novikov(cs, &n.cn, 4).map_err(|e| e.to_string())?;
    let at2 = check_k_vs_novikov(cs, &n.cn, 2).map_err(|e| e.to_string())?;
    ensure(!at4, "perturbation at t^3 not detected at k = 4")?;
    ensure(at2, "perturbation at t^3 detected at k = 2")?;
    Ok(format!(
        "{} compatible pairs at k = 8, perturbed pair rejected at k = 4",
        compatible.len()
    ))
}

fn c10_sw() -> Verdict {
    let proper = [
        "path_circle_scenario.json",
        "path_two_pairs_scenario.json",
        "path_two_pairs_rebased.json",
        "path_twisted_scenario.json",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut variants = 0;
    for name in proper {
        let s = scenario(name);
        let n = s.novikov.as_ref().unwrap();
        let p = s.path.as_ref().unwrap();
        ensure(
            sw_consistency_check(p, &n.cn, &n.xi, 10).map_err(|e| format!("{name}: {e}"))?,
            format!("{name}: check fails"),
        )?;
        // Row r of P is index-2 generator r, column j is index-1 generator j.
        let nvars = s.ring.rank();
        let index1 = n.cn.complex.dim(1);
        for _ in 0..5 {
            let mut q = p.clone();
            let mut xi = n.xi.clone();
            for _ in 0..3 {
                let g = Monomial::new(
                    rng.gen_range(0..=2),
                    (0..nvars).map(|_| rng.gen_range(-1..=1)).collect(),
                );
                if rng.gen_bool(0.5) {
                    let r = rng.gen_range(0..q.size());
                    q = q.rebase_row(r, &g).map_err(|e| e.to_string())?;
                    xi.offsets[index1 + r] = &xi.offsets[index1 + r] + &g;
                } else {
                    let j = rng.gen_range(0..q.size());
                    let h = g.inverse();
                    q = q.rebase_col(j, &h).map_err(|e| e.to_string())?;
                    xi.offsets[j] = &xi.offsets[j] + &h;
                }
            }
            let ok = sw_consistency_check(&q, &n.cn, &xi, 10).map_err(|e| e.to_string())?;
            ensure(ok, format!("{name}: rebased variant fails"))?;
            variants += 1;
        }
    }
    let s = scenario("path_two_pairs_transposed.json");
    let n = s.novikov.as_ref().unwrap();
    let wrong = sw_consistency_check(s.path.as_ref().unwrap(), &n.cn, &n.xi, 10)
        .map_err(|e| e.to_string())?;
    ensure(!wrong, "transposed path matrix accepted")?;
    Ok(format!(
        "{} fixtures and {variants} rebased variants pass, transposed P rejected",
        proper.len()
    ))
}

fn c11_equivariance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trials = 100;
    for trial in 0..trials {
        let nvars = rng.gen_range(0..=1);
        let known = common::random_acyclic(&mut rng, nvars);
        let cx = &known.complex;
        let dec = greedy_decomposition(cx).ok_or("random complex is not acyclic")?;
        let degrees: Vec<i64> = cx.degrees().filter(|&i| cx.dim(i) > 0).collect();
        let i = degrees[rng.gen_range(0..degrees.len())];
        let index = rng.gen_range(0..cx.dim(i));
        let u = common::random_unit(&mut rng, nvars);
        let rebased = cx.rebase(i, index, &u).map_err(|e| e.to_string())?;

        let before = torsion_from_decomposition(cx, &dec).ok_or("invalid decomposition")?;
        let after = torsion_from_decomposition(&rebased, &dec).ok_or("invalid decomposition")?;
        let u = RatFunc::from_poly(u);
        let factor = if i % 2 == 0 { u } else { u.inv().unwrap() };
        ensure(
            after == &before * &factor,
            format!("trial {trial}: raw torsion moved wrongly"),
        )?;
        ensure(
            torsion_tau(&rebased) == torsion_tau(cx),
            format!("trial {trial}: canonical value moved"),
        )?;
    }
    Ok(format!(
        "{trials} rebasings scale raw torsion by u^(+-1) and fix canonical values"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("main theorem on the circle", c1_circle),
        ("two circle presentations agree", c2_two_presentations),
        ("cat map mapping torus", c3_cat_map),
        ("zeta Lefschetz vs trace on random maps", c4_zeta_cross),
        ("orbit sum vs irreducible product", c5_exp_vs_product),
        ("torsion algebra", c6_torsion_algebra),
        ("trefoil zero surgery", c7_trefoil),
        ("product formula for tau(X')", c8_products),
        ("K approximates the Novikov boundary", c9_k_semantics),
        ("det(P) vs tau(CN)", c10_sw),
        ("rebasing equivariance", c11_equivariance),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
