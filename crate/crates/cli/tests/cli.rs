//! End-to-end runs of the `torsionlab` binary over the fixture corpus.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsionlab"))
        .args(args)
        .env_remove("TORSIONLAB_FIXTURE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

/// Runs a subcommand on a fixture and returns (exit code, stdout).
fn on(cmd: &str, name: &str, extra: &[&str]) -> (i32, String) {
    let path = fixture(name);
    let mut args = vec![cmd, "--fixture", path.as_str()];
    args.extend_from_slice(extra);
    let o = run(&args);
    (o.status.code().expect("exit code"), stdout(&o))
}

#[test]
fn tau_of_the_circle() {
    assert_eq!(
        on("tau", "circle_cw.json", &[]),
        (0, "tau: (1 - t)^-1 [canonical]\n".into())
    );
}

#[test]
fn tau_of_trefoil_zero_surgery_with_expansion() {
    let (code, out) = on("tau", "trefoil_zero_surgery_cw.json", &["--order", "6"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "tau: (1 - t + t^2) / (1 - 2*t + t^2) [canonical]\n\
         expansion: 1 + t + 2*t^2 + 3*t^3 + 4*t^4 + 5*t^5 + 6*t^6 + O(t^7)\n"
    );
}

#[test]
fn tau_hat_of_the_torus() {
    let (code, out) = on("tau-hat", "torus3_cw.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "homology ranks: H0=1 H1=3 H2=3 H3=1\ntau-hat: 1 [canonical]\n"
    );
}

#[test]
fn cat_map_zeta_in_every_form() {
    let (code, lefschetz) = on("zeta", "cat_map_returnmaps.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(lefschetz, "zeta: (1 - 3*t + t^2) / (1 - 2*t + t^2)\n");
    let (code, trace) = on(
        "zeta",
        "cat_map_returnmaps.json",
        &["--method", "trace", "--order", "5"],
    );
    assert_eq!(code, 0);
    assert!(
        trace.starts_with("zeta: 1 - t - 2*t^2 - 3*t^3 - 4*t^4 - 5*t^5 + O(t^6)\n"),
        "{trace}"
    );
    let (_, expanded) = on(
        "zeta",
        "cat_map_returnmaps.json",
        &["--method", "lefschetz", "--order", "5"],
    );
    assert!(
        expanded.contains("1 - t - 2*t^2 - 3*t^3 - 4*t^4 - 5*t^5 + O(t^6)"),
        "{expanded}"
    );
}

#[test]
fn orbit_sum_and_product_agree_on_diagonal_orbits() {
    let exp = on(
        "zeta",
        "diagonal_orbits.json",
        &["--method", "exp", "--order", "8"],
    );
    let product = on(
        "zeta",
        "diagonal_orbits.json",
        &["--method", "product", "--order", "8"],
    );
    assert_eq!(exp.0, 0);
    assert_eq!(exp, product);
}

#[test]
fn assemble_reports_block_identities() {
    let (code, out) = on("assemble", "circle_scenario.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "dims: [1, 1]\nd1: 1x1\n  [1 - t]\nK1: []\n\
         degree 1: det Omega = det(1 - t phi) det K: OK\nd^2 = 0: OK\n"
    );
}

#[test]
fn verify_main_on_cat_map() {
    let (code, out) = on("verify-main", "cat_map_scenario.json", &["--order", "8"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "zeta: (1 - 3*t + t^2) / (1 - 2*t + t^2)\n\
         tau(CN): 1\n\
         I: (1 - 3*t + t^2) / (1 - 2*t + t^2)\n\
         tau(X'): (1 - 3*t + t^2) / (1 - 2*t + t^2)\n\
         tau(X') via products: (1 - 3*t + t^2) / (1 - 2*t + t^2)\n\
         exact data: yes\n\
         equal mod units: yes\n\
         equal up to sign with lifts: yes\n\
         product formula: yes\n\
         series agree through t^8: yes\n\
         I == tau(X'): OK\n"
    );
}

#[test]
fn verify_main_holds_on_every_scenario_with_a_cut() {
    for name in [
        "circle_scenario.json",
        "circle_pair_scenario.json",
        "cat_map_scenario.json",
        "cancel_pair_scenario.json",
        "trefoil_zero_surgery_scenario.json",
    ] {
        let (code, out) = on("verify-main", name, &["--order", "8"]);
        assert_eq!(code, 0, "{name}: {out}");
        assert!(out.ends_with("I == tau(X'): OK\n"), "{name}: {out}");
    }
}

#[test]
fn check_k_honours_the_truncation_order() {
    assert_eq!(
        on("check-k", "cancel_pair_scenario.json", &["--order", "8"]),
        (0, "K ~ d through t^8: OK\n".into())
    );
    assert_eq!(
        on("check-k", "cancel_pair_perturbed.json", &["--order", "4"]),
        (2, "K ~ d through t^4: MISMATCH\n".into())
    );
    assert_eq!(
        on("check-k", "cancel_pair_perturbed.json", &["--order", "2"]).0,
        0
    );
    assert_eq!(
        on("check-k", "cancel_pair_scenario.json", &["--order", "20"]),
        (
            4,
            "precondition failed: order 20 exceeds the known order 12\n".into()
        )
    );
}

#[test]
fn i3_on_a_rebased_path_matrix() {
    let (code, out) = on("i3", "path_two_pairs_rebased.json", &["--order", "4"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "det(P): t - t^2 - t^3 + t^4\n\
         offset: t\n\
         I3: t - t^2 - t^3 + t^4 + O(t^5)\n  t: 1\n  t^2: -1\n  t^3: -1\n  t^4: 1\n\
         T at 0: 1\n\
         det(P)(. + gamma) == tau(CN)(xi): OK\n"
    );
}

#[test]
fn i3_consistency_across_path_fixtures() {
    for name in [
        "path_circle_scenario.json",
        "path_two_pairs_scenario.json",
        "path_two_pairs_rebased.json",
        "path_twisted_scenario.json",
    ] {
        let (code, out) = on("i3", name, &["--order", "6"]);
        assert_eq!(code, 0, "{name}: {out}");
        assert!(
            out.ends_with("det(P)(. + gamma) == tau(CN)(xi): OK\n"),
            "{name}: {out}"
        );
    }
    let (code, out) = on("i3", "path_two_pairs_transposed.json", &["--order", "6"]);
    assert_eq!(code, 2);
    assert!(
        out.ends_with("det(P)(. + gamma) == tau(CN)(xi): FAILED\n"),
        "{out}"
    );
}

#[test]
fn canon_strips_units() {
    assert_eq!(
        on("canon", "canon_example.json", &[]),
        (
            0,
            "value: t / (1 - t)\ncanonical: (1 - t)^-1 [canonical]\n".into()
        )
    );
}

#[test]
fn validate_exit_codes_across_the_corpus() {
    let mut names: Vec<String> = std::fs::read_dir(fixtures())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    assert!(names.len() >= 20);
    for name in names {
        let (code, out) = on("validate", &name, &[]);
        let expected = if name.starts_with("broken_") { 2 } else { 0 };
        assert_eq!(code, expected, "{name}: {out}");
    }
    assert_eq!(
        on("validate", "broken_dsq.json", &[]).1,
        "d^2 != 0 at degree 2\n"
    );
}

#[test]
fn parse_errors_exit_3() {
    let dir = std::env::temp_dir().join(format!("torsionlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        "{\n  \"ring\": {\"group_vars\": [], \"t\": \"t\"},\n  \"dims\": [1,\n",
    )
    .unwrap();
    let o = run(&["tau", "--fixture", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("line 4"), "{}", stdout(&o));

    let schema = dir.join("schema.json");
    std::fs::write(
        &schema,
        r#"{"ring": {"group_vars": [], "t": "t"}, "min_degree": 0, "dims": [1, 1],
            "boundaries": [[[[{"t": 1}]]]]}"#,
    )
    .unwrap();
    let o = run(&["tau", "--fixture", schema.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(
        stdout(&o).contains("boundaries[0][0][0][0]"),
        "{}",
        stdout(&o)
    );

    let o = run(&[
        "tau",
        "--fixture",
        dir.join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_64_and_help_exits_0() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["tau"]).status.code(), Some(64));
    assert_eq!(
        run(&["zeta", "--fixture", "x.json", "--method", "guess"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn fixture_dir_lookup() {
    let o = Command::new(env!("CARGO_BIN_EXE_torsionlab"))
        .args(["tau", "--fixture", "circle_cw.json"])
        .env("TORSIONLAB_FIXTURE_DIR", fixtures())
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "tau: (1 - t)^-1 [canonical]\n");
}

#[test]
fn output_is_deterministic() {
    for (cmd, name) in [
        ("verify-main", "cancel_pair_scenario.json"),
        ("zeta", "diagonal_orbits.json"),
        ("i3", "path_twisted_scenario.json"),
        ("assemble", "trefoil_zero_surgery_scenario.json"),
    ] {
        assert_eq!(on(cmd, name, &[]), on(cmd, name, &[]), "{cmd} {name}");
    }
}
