//! `torsionlab`: command-line front end over JSON fixtures.
//!
//! Exit codes: 0 success, 2 identity or invariant violation, 3 parse error,
//! 4 precondition failure, 64 usage error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use torsionlab::complex::BasedChainComplex;
use torsionlab::cut::{
    assemble_boundary, block_identities, check_k_vs_novikov, compute_k_rational, omega_identity,
    verify_main_theorem, CutError, CutSystem,
};
use torsionlab::fixture::{parse_file, Fixture, NovikovFixture, Scenario};
use torsionlab::novikov::tau_novikov;
use torsionlab::ring::{LaurentPoly, NovikovTruncation, RationalFunction, RingSpec};
use torsionlab::three_dim::{
    i3_coefficients, path_matrix_det, sw_consistency_check, t_invariant, CoefficientFunction,
};
use torsionlab::torsion::{torsion_tau, torsion_tau_hat, TorsionValue};
use torsionlab::zeta::{
    integral_series, zeta_exp, zeta_lefschetz, zeta_product, zeta_trace, ClosedOrbit, ReturnMapData,
};

const DEFAULT_ORDER: i64 = 16;

#[derive(Parser)]
#[command(
    name = "torsionlab",
    version,
    about = "Exact torsion and zeta computations for circle-valued Morse theory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct FixtureArg {
    /// Fixture file; relative paths are also looked up in $TORSIONLAB_FIXTURE_DIR.
    #[arg(long)]
    fixture: PathBuf,
}

#[derive(clap::Args)]
struct OrderArg {
    /// Truncation order in t.
    #[arg(long)]
    order: Option<i64>,
}

impl OrderArg {
    fn get(&self) -> i64 {
        self.order.unwrap_or(DEFAULT_ORDER)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ZetaMethod {
    Exp,
    Product,
    Trace,
    Lefschetz,
}

#[derive(Subcommand)]
enum Command {
    /// Torsion of a complex, Novikov complex, cut system or scenario.
    Tau {
        #[command(flatten)]
        fixture: FixtureArg,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Torsion with the homology basis chosen from the boundary pivots.
    TauHat {
        #[command(flatten)]
        fixture: FixtureArg,
    },
    /// Zeta function of orbit or return-map data.
    Zeta {
        #[command(flatten)]
        fixture: FixtureArg,
        #[arg(long, value_enum, default_value = "lefschetz")]
        method: ZetaMethod,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Assemble X' from a cut system and report the block identities.
    Assemble {
        #[command(flatten)]
        fixture: FixtureArg,
    },
    /// Check I = zeta * tau(CN) against tau(X').
    VerifyMain {
        #[command(flatten)]
        fixture: FixtureArg,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Compare the K-matrices with the Novikov boundary through t^k.
    CheckK {
        #[command(flatten)]
        fixture: FixtureArg,
        #[command(flatten)]
        order: OrderArg,
    },
    /// I3 = zeta * det(P) and its consistency with tau(CN).
    I3 {
        #[command(flatten)]
        fixture: FixtureArg,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Canonical form of a rational function modulo +-monomial units.
    Canon {
        #[command(flatten)]
        fixture: FixtureArg,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Parse a fixture and check its chain-complex identities.
    Validate {
        #[command(flatten)]
        fixture: FixtureArg,
    },
}

/// A non-zero exit with the text already produced.
struct Failure {
    code: u8,
    output: String,
}

type Outcome = Result<String, Failure>;

fn fail(code: u8, output: String) -> Failure {
    Failure { code, output }
}

const VIOLATION: u8 = 2;
const PARSE: u8 = 3;
const PRECONDITION: u8 = 4;
const USAGE: u8 = 64;

fn resolve(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = std::env::var_os("TORSIONLAB_FIXTURE_DIR") {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

fn load(arg: &FixtureArg) -> Result<Fixture, Failure> {
    parse_file(resolve(&arg.fixture)).map_err(|e| {
        let code = if e.is_violation() { VIOLATION } else { PARSE };
        fail(code, format!("{e}\n"))
    })
}

fn precondition(msg: impl std::fmt::Display) -> Failure {
    fail(PRECONDITION, format!("precondition failed: {msg}\n"))
}

fn wrong_kind(f: &Fixture, wanted: &str) -> Failure {
    precondition(format!("{} fixture given, {wanted} required", f.kind()))
}

fn render_series(s: &NovikovTruncation<BigInt>, ring: &RingSpec) -> String {
    s.render(&ring.t, &ring.group_vars)
}

fn render_poly(p: &LaurentPoly<BigInt>, ring: &RingSpec) -> String {
    p.render(&ring.t, &ring.group_vars)
}

/// One `class: coefficient` line per term, in monomial order.
fn coefficient_lines(out: &mut String, s: &NovikovTruncation<BigInt>, ring: &RingSpec) {
    for (m, c) in s.poly().terms() {
        let _ = writeln!(out, "  {}: {c}", m.render(&ring.t, &ring.group_vars));
    }
}

fn torsion_lines(
    out: &mut String,
    label: &str,
    tau: &TorsionValue<BigInt>,
    ring: &RingSpec,
    order: Option<i64>,
) {
    let _ = writeln!(out, "{label}: {} [canonical]", tau.render(ring));
    if let (Some(k), Some(r)) = (order, tau.value()) {
        match r.expand(k) {
            Ok(s) => {
                let _ = writeln!(out, "expansion: {}", render_series(&s, ring));
            }
            Err(e) => {
                let _ = writeln!(out, "expansion: unavailable ({e})");
            }
        }
    }
}

fn cut_torsion(cs: &CutSystem<BigInt>) -> Result<TorsionValue<BigInt>, Failure> {
    match assemble_boundary(cs) {
        Ok(x) => Ok(torsion_tau(&x)),
        Err(e @ CutError::NotAComplex(_)) => Err(fail(VIOLATION, format!("{e}\n"))),
        Err(e) => Err(precondition(e)),
    }
}

fn novikov_torsion(n: &NovikovFixture) -> Result<TorsionValue<BigInt>, Failure> {
    tau_novikov(&n.cn, &n.xi).map_err(precondition)
}

fn complex_torsion(c: &BasedChainComplex<BigInt>) -> Result<TorsionValue<BigInt>, Failure> {
    if let Some(&i) = c.validate().failing_degrees().first() {
        return Err(fail(VIOLATION, format!("d^2 != 0 at degree {i}\n")));
    }
    Ok(torsion_tau(c))
}

fn cmd_tau(f: &Fixture, order: Option<i64>) -> Outcome {
    let ring = f.ring().clone();
    let tau = match f {
        Fixture::Complex(c) => complex_torsion(c)?,
        Fixture::Novikov(n) => novikov_torsion(n)?,
        Fixture::CutSystem(cs) => cut_torsion(cs)?,
        Fixture::Scenario(s) => match (&s.cw, &s.cut, &s.novikov) {
            (Some(c), _, _) => complex_torsion(c)?,
            (None, Some(cs), _) => cut_torsion(cs)?,
            (None, None, Some(n)) => novikov_torsion(n)?,
            _ => return Err(precondition("scenario has no cw, cut or novikov part")),
        },
        other => return Err(wrong_kind(other, "a complex")),
    };
    let mut out = String::new();
    torsion_lines(&mut out, "tau", &tau, &ring, order);
    Ok(out)
}

fn cmd_tau_hat(f: &Fixture) -> Outcome {
    let c = match f {
        Fixture::Complex(c) => c,
        Fixture::Novikov(n) => &n.cn.complex,
        Fixture::Scenario(s) if s.cw.is_some() => s.cw.as_ref().expect("checked"),
        other => return Err(wrong_kind(other, "a complex")),
    };
    if let Some(&i) = c.validate().failing_degrees().first() {
        return Err(fail(VIOLATION, format!("d^2 != 0 at degree {i}\n")));
    }
    let h = c.homology_basis();
    let tau = torsion_tau_hat(c, &h).map_err(precondition)?;
    let ranks: Vec<String> = c
        .degrees()
        .zip(h.ranks())
        .map(|(i, r)| format!("H{i}={r}"))
        .collect();
    let mut out = format!("homology ranks: {}\n", ranks.join(" "));
    torsion_lines(&mut out, "tau-hat", &tau, c.ring(), None);
    Ok(out)
}

struct ZetaInputs<'a> {
    ring: RingSpec,
    orbits: Option<&'a [ClosedOrbit]>,
    maps: Option<&'a ReturnMapData<BigInt>>,
}

fn zeta_inputs(f: &Fixture) -> Result<ZetaInputs<'_>, Failure> {
    Ok(match f {
        Fixture::Orbits(o) => ZetaInputs {
            ring: o.ring.clone(),
            orbits: Some(&o.orbits),
            maps: None,
        },
        Fixture::ReturnMaps(r) => ZetaInputs {
            ring: r.ring.clone(),
            orbits: None,
            maps: Some(&r.maps),
        },
        Fixture::CutSystem(cs) => ZetaInputs {
            ring: cs.ring().clone(),
            orbits: None,
            maps: Some(&cs.phi),
        },
        Fixture::Scenario(s) => ZetaInputs {
            ring: s.ring.clone(),
            orbits: s.orbits.as_deref(),
            maps: s.returnmaps.as_ref().or(s.cut.as_ref().map(|c| &c.phi)),
        },
        other => return Err(wrong_kind(other, "orbit or return-map data")),
    })
}

/// The listed orbits are irreducible; an orbit with a return map
/// contributes all of its iterates.
fn all_iterates(orbits: &[ClosedOrbit], k: i64) -> Result<Vec<ClosedOrbit>, Failure> {
    let mut out = Vec::new();
    for o in orbits {
        if o.return_map.is_some() {
            out.extend(o.iterates(k).map_err(precondition)?);
        } else {
            out.push(o.clone());
        }
    }
    Ok(out)
}

fn lefschetz(inputs: &ZetaInputs<'_>) -> Result<RationalFunction<BigInt>, Failure> {
    let maps = inputs
        .maps
        .ok_or_else(|| precondition("return maps required"))?;
    zeta_lefschetz(maps, inputs.ring.rank()).map_err(precondition)
}

fn cmd_zeta(f: &Fixture, method: ZetaMethod, order: Option<i64>) -> Outcome {
    let inputs = zeta_inputs(f)?;
    let k = order.unwrap_or(DEFAULT_ORDER);
    let nvars = inputs.ring.rank();
    let ring = &inputs.ring;
    let series = match method {
        ZetaMethod::Exp => {
            let orbits = inputs
                .orbits
                .ok_or_else(|| precondition("orbit data required"))?;
            let s = zeta_exp(&all_iterates(orbits, k)?, nvars, k).map_err(precondition)?;
            integral_series(&s).map_err(|e| fail(VIOLATION, format!("{e}\n")))?
        }
        ZetaMethod::Product => {
            let orbits = inputs
                .orbits
                .ok_or_else(|| precondition("orbit data required"))?;
            zeta_product(orbits, nvars, k).map_err(precondition)?
        }
        ZetaMethod::Trace => {
            let maps = inputs
                .maps
                .ok_or_else(|| precondition("return maps required"))?;
            zeta_trace(maps, nvars, k).map_err(|e| fail(VIOLATION, format!("{e}\n")))?
        }
        ZetaMethod::Lefschetz => {
            let z = lefschetz(&inputs)?;
            let mut out = format!("zeta: {}\n", z.display(ring));
            if order.is_some() {
                let s = z.expand(k).map_err(precondition)?;
                let _ = writeln!(out, "expansion: {}", render_series(&s, ring));
                coefficient_lines(&mut out, &s, ring);
            }
            return Ok(out);
        }
    };
    let mut out = format!("zeta: {}\n", render_series(&series, ring));
    coefficient_lines(&mut out, &series, ring);
    Ok(out)
}

fn cut_of(f: &Fixture) -> Result<&CutSystem<BigInt>, Failure> {
    match f {
        Fixture::CutSystem(cs) => Ok(cs),
        Fixture::Scenario(s) => s
            .cut
            .as_ref()
            .ok_or_else(|| precondition("scenario has no cut system")),
        other => Err(wrong_kind(other, "a cut system")),
    }
}

fn cmd_assemble(f: &Fixture) -> Outcome {
    let cs = cut_of(f)?;
    let ring = cs.ring();
    let x = cs.assemble_unchecked();
    let mut out = String::new();
    let _ = writeln!(out, "dims: {:?}", x.dims());
    for i in 1..=x.max_degree() {
        let d = x.boundary(i);
        let _ = writeln!(out, "d{i}: {}x{}", d.rows(), d.cols());
        for r in 0..d.rows() {
            let row: Vec<String> = d.row(r).iter().map(|p| render_poly(p, ring)).collect();
            let _ = writeln!(out, "  [{}]", row.join(", "));
        }
    }
    let identities = block_identities(cs);
    for b in &identities {
        let _ = writeln!(
            out,
            "degree {}: {}: {}",
            b.degree,
            b.name,
            if b.holds { "OK" } else { "FAILED" }
        );
    }
    for (i, k) in compute_k_rational(cs).iter().enumerate() {
        let entries: Vec<String> = k
            .to_rows()
            .iter()
            .flatten()
            .map(|e| e.display(ring).to_string())
            .collect();
        let _ = writeln!(out, "K{}: [{}]", i + 1, entries.join(", "));
    }
    let failing = x.validate().failing_degrees();
    if let Some(&i) = failing.first() {
        let _ = writeln!(out, "d^2 != 0 at degree {i}");
        return Err(fail(VIOLATION, out));
    }
    if let Some(checks) = omega_identity(cs) {
        for (i, ok) in checks {
            let _ = writeln!(
                out,
                "degree {i}: det Omega = det(1 - t phi) det K: {}",
                if ok { "OK" } else { "FAILED" }
            );
        }
    }
    let _ = writeln!(out, "d^2 = 0: OK");
    Ok(out)
}

fn scenario_of(f: &Fixture) -> Result<&Scenario, Failure> {
    match f {
        Fixture::Scenario(s) => Ok(s),
        other => Err(wrong_kind(other, "a scenario")),
    }
}

fn cut_and_novikov(s: &Scenario) -> Result<(&CutSystem<BigInt>, &NovikovFixture), Failure> {
    match (&s.cut, &s.novikov) {
        (Some(c), Some(n)) => Ok((c, n)),
        _ => Err(precondition(
            "scenario needs both a cut system and a Novikov complex",
        )),
    }
}

fn cut_failure(e: CutError) -> Failure {
    match e {
        CutError::NotAComplex(_) => fail(VIOLATION, format!("{e}\n")),
        CutError::Precondition(msg) => precondition(msg),
        e => precondition(e),
    }
}

fn cmd_verify_main(f: &Fixture, k: i64) -> Outcome {
    let s = scenario_of(f)?;
    let (cs, n) = cut_and_novikov(s)?;
    let ring = &s.ring;
    let report = verify_main_theorem(cs, &n.cn, &n.xi, k).map_err(cut_failure)?;
    let mut out = String::new();
    let _ = writeln!(out, "zeta: {}", report.zeta.display(ring));
    let _ = writeln!(out, "tau(CN): {}", report.tau_cn.render(ring));
    let _ = writeln!(out, "I: {}", report.invariant.render(ring));
    let _ = writeln!(out, "tau(X'): {}", report.tau_direct.render(ring));
    let _ = writeln!(
        out,
        "tau(X') via products: {}",
        report.tau_products.render(ring)
    );
    let yes = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(out, "exact data: {}", yes(report.exact_data));
    let _ = writeln!(out, "equal mod units: {}", yes(report.canonical_equal));
    let _ = writeln!(
        out,
        "equal up to sign with lifts: {}",
        yes(report.raw_equal_up_to_sign)
    );
    let _ = writeln!(out, "product formula: {}", yes(report.products_equal));
    let _ = writeln!(
        out,
        "series agree through t^{}: {}",
        report.series_order,
        yes(report.series_agree)
    );
    if report.holds() {
        let _ = writeln!(out, "I == tau(X'): OK");
        Ok(out)
    } else {
        let _ = writeln!(out, "I == tau(X'): FAILED");
        Err(fail(VIOLATION, out))
    }
}

fn cmd_check_k(f: &Fixture, k: i64) -> Outcome {
    let s = scenario_of(f)?;
    let (cs, n) = cut_and_novikov(s)?;
    let ok = check_k_vs_novikov(cs, &n.cn, k).map_err(cut_failure)?;
    if ok {
        Ok(format!("K ~ d through t^{k}: OK\n"))
    } else {
        Err(fail(VIOLATION, format!("K ~ d through t^{k}: MISMATCH\n")))
    }
}

fn cmd_i3(f: &Fixture, k: i64) -> Outcome {
    let s = scenario_of(f)?;
    let ring = &s.ring;
    let p = s
        .path
        .as_ref()
        .ok_or_else(|| precondition("scenario has no path matrix"))?;
    let nvars = ring.rank();
    let inputs = zeta_inputs(f)?;
    let zeta = if inputs.maps.is_some() {
        lefschetz(&inputs)?.expand(k).map_err(precondition)?
    } else if let Some(orbits) = inputs.orbits {
        zeta_product(orbits, nvars, k).map_err(precondition)?
    } else {
        NovikovTruncation::exact(LaurentPoly::one(nvars))
    };
    let det_p = path_matrix_det(p);
    let mut out = String::new();
    let _ = writeln!(out, "det(P): {}", render_poly(&det_p.det, ring));
    let _ = writeln!(
        out,
        "offset: {}",
        det_p.offset.render(&ring.t, &ring.group_vars)
    );
    let coeffs = i3_coefficients(&zeta, &det_p, k);
    let _ = writeln!(out, "I3: {}", render_series(&coeffs.series, ring));
    coefficient_lines(&mut out, &coeffs.series, ring);
    let _ = writeln!(out, "T at 0: {}", t_at_zero(&coeffs));
    if let Some(n) = &s.novikov {
        let k = n.cn.order.map_or(k, |o| o.min(k));
        match sw_consistency_check(p, &n.cn, &n.xi, k) {
            Ok(true) => {
                let _ = writeln!(out, "det(P)(. + gamma) == tau(CN)(xi): OK");
            }
            Ok(false) => {
                let _ = writeln!(out, "det(P)(. + gamma) == tau(CN)(xi): FAILED");
                return Err(fail(VIOLATION, out));
            }
            Err(e) => return Err(precondition(e)),
        }
    }
    Ok(out)
}

fn t_at_zero(coeffs: &CoefficientFunction<BigInt>) -> String {
    let zero = torsionlab::Monomial::one(coeffs.offset.nvars());
    match t_invariant(coeffs, &zero) {
        Ok(c) => c.to_string(),
        Err(e) => format!("unavailable ({e})"),
    }
}

fn cmd_canon(f: &Fixture, order: Option<i64>) -> Outcome {
    let Fixture::Rational(r) = f else {
        return Err(wrong_kind(f, "a rational function"));
    };
    let tau = TorsionValue::from_raw(Some(r.value.clone()));
    let mut out = format!("value: {}\n", r.value.display(&r.ring));
    torsion_lines(&mut out, "canonical", &tau, &r.ring, order);
    Ok(out)
}

fn validate_complex(out: &mut String, name: &str, c: &BasedChainComplex<BigInt>) -> bool {
    match c.validate().failing_degrees().first() {
        Some(&i) => {
            let _ = writeln!(out, "d^2 != 0 at degree {i}");
            false
        }
        None => {
            let _ = writeln!(out, "{name}: OK");
            true
        }
    }
}

fn cmd_validate(f: &Fixture) -> Outcome {
    let mut out = String::new();
    let ok = match f {
        Fixture::Complex(c) => validate_complex(&mut out, "complex", c),
        Fixture::CutSystem(cs) => {
            validate_complex(&mut out, "cut system", &cs.assemble_unchecked())
        }
        Fixture::Scenario(s) => {
            let mut ok = true;
            if let Some(c) = &s.cw {
                ok &= validate_complex(&mut out, "cw", c);
            }
            if let Some(cs) = &s.cut {
                ok &= validate_complex(&mut out, "cut", &cs.assemble_unchecked());
            }
            if s.novikov.is_some() {
                let _ = writeln!(out, "novikov: OK");
            }
            ok
        }
        other => {
            let _ = writeln!(out, "{}: OK", other.kind());
            true
        }
    };
    if ok {
        Ok(out)
    } else {
        Err(fail(VIOLATION, out))
    }
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Tau { fixture, order } => cmd_tau(&load(fixture)?, order.order),
        Command::TauHat { fixture } => cmd_tau_hat(&load(fixture)?),
        Command::Zeta {
            fixture,
            method,
            order,
        } => cmd_zeta(&load(fixture)?, *method, order.order),
        Command::Assemble { fixture } => cmd_assemble(&load(fixture)?),
        Command::VerifyMain { fixture, order } => cmd_verify_main(&load(fixture)?, order.get()),
        Command::CheckK { fixture, order } => cmd_check_k(&load(fixture)?, order.get()),
        Command::I3 { fixture, order } => cmd_i3(&load(fixture)?, order.get()),
        Command::Canon { fixture, order } => cmd_canon(&load(fixture)?, order.order),
        Command::Validate { fixture } => cmd_validate(&load(fixture)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure { code, output }) => {
            print!("{output}");
            ExitCode::from(code)
        }
    }
}
