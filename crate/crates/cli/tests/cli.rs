//! Subprocess tests for the `normtower` binary: exit-code contract, JSON
//! well-formedness, and end-to-end behavior of every subcommand.

use std::path::PathBuf;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_normtower"))
        .args(args)
        .output()
        .expect("failed to run normtower");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).to_string(),
        String::from_utf8_lossy(&output.stderr).to_string(),
    )
}

struct Fixtures {
    _dir: tempfile::TempDir,
    /// alpha = 3, base Z, G_1 = G_2 = C(2)
    t3: String,
    /// alpha = 3, base C(2), G_1 = G_2 = C(2)
    finite_c2: String,
    /// alpha = w + 1, base Z, all G = C(2)
    w1: String,
    /// invalid: alpha = 1
    bad: String,
}

fn fixtures() -> Fixtures {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| -> String {
        let path: PathBuf = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        path.to_str().unwrap().to_string()
    };
    let t3 = write(
        "t3.json",
        r#"{"alpha": "3", "base": "Z", "assignment": [{"lo": "1", "hi": "3", "group": "C(2)"}]}"#,
    );
    let finite_c2 = write(
        "finite-c2.json",
        r#"{"alpha": "3", "base": "C(2)", "assignment": [{"lo": "1", "hi": "3", "group": "C(2)"}]}"#,
    );
    let w1 = write(
        "w1.json",
        r#"{"alpha": "w + 1", "base": "Z", "assignment": [{"lo": "1", "hi": "w + 1", "group": "C(2)"}]}"#,
    );
    let bad = write(
        "bad.json",
        r#"{"alpha": "1", "base": "Z", "assignment": [{"lo": "1", "hi": "1", "group": "C(2)"}]}"#,
    );
    Fixtures {
        _dir: dir,
        t3,
        finite_c2,
        w1,
        bad,
    }
}

#[test]
fn member_query_with_trace() {
    let fx = fixtures();
    let (code, out, _) = run(&[
        "member",
        "--config",
        &fx.t3,
        "--beta",
        "1",
        "{d=1; g=1; f={}}",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "false");

    let (code, out, _) = run(&[
        "member",
        "--config",
        &fx.t3,
        "--beta",
        "1",
        "--explain",
        "{d=1; g=1; f={}}",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("false"));
    assert!(out.contains("g-part-nontrivial"), "{out}");

    let (code, out, _) = run(&[
        "member",
        "--config",
        &fx.t3,
        "--beta",
        "2",
        "--json",
        "--explain",
        "{d=1; g=1; f={}}",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["member"], serde_json::Value::Bool(true));
    assert!(v["trace"]["steps"].is_array());

    // transfinite indices work end to end
    let (code, out, _) = run(&["member", "--config", &fx.w1, "--beta", "w", "{d=w; g=1; f={}}"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "false");
    let (code, out, _) = run(&[
        "member",
        "--config",
        &fx.w1,
        "--beta",
        "w",
        "{d=5; g=0; f={1: b(2)}}",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "true");
}

#[test]
fn beta_out_of_range_is_a_domain_error() {
    let fx = fixtures();
    let (code, _, err) = run(&["member", "--config", &fx.t3, "--beta", "w^w", "b(1)"]);
    assert_eq!(code, 1);
    assert!(err.contains("exceeds alpha"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    let fx = fixtures();
    let (code, _, _) = run(&[
        "member", "--config", &fx.t3, "--beta", "1", "b(1)", "--bogus",
    ]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    // missing --config
    let (code, _, err) = run(&["member", "--beta", "1", "b(1)"]);
    assert_eq!(code, 2);
    assert!(err.contains("--config"));
    // help is not an error
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("normtower"));
}

#[test]
fn check_config_reports_first_violation() {
    let fx = fixtures();
    let (code, out, _) = run(&["check-config", "--config", &fx.t3]);
    assert_eq!(code, 0);
    assert!(out.contains("alpha = 3"));
    assert!(out.contains("C(2)"));

    let (code, _, err) = run(&["check-config", "--config", &fx.bad]);
    assert_eq!(code, 1);
    assert!(err.contains("alpha must exceed 1"), "{err}");

    let (code, out, _) = run(&["check-config", "--config", &fx.w1, "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["alpha"], "w + 1");
}

#[test]
fn eval_expressions() {
    let fx = fixtures();
    let (code, out, _) = run(&["eval", "--config", &fx.t3, "b(1) * b(2)"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "b(3)");

    // the worked multiplication example
    let (code, out, _) = run(&[
        "eval",
        "--config",
        &fx.t3,
        "{d=1; g=1; f={0: b(1)}} * {d=1; g=0; f={1: b(1)}}",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "{d=1; g=1; f={0: b(2)}}");

    // inverses cancel
    let (code, out, _) = run(&[
        "eval",
        "--config",
        &fx.t3,
        "--json",
        "({d=2; g=1; f={}} * b(5))^-1 * {d=2; g=1; f={}} * b(5)",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["element"], "b(0)");
    assert_eq!(v["level"], "1");

    let (code, _, err) = run(&["eval", "--config", &fx.t3, "b(1) *"]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
}

#[test]
fn normalizes_witness_quotient_flow() {
    let fx = fixtures();
    let s2 = "{d=2; g=1; f={}}";
    let (code, out, _) = run(&["normalizes", "--config", &fx.t3, "--beta", "1", s2]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "false");

    let (code, out, _) = run(&["witness", "--config", &fx.t3, "--beta", "1", "--json", s2]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["l"], "{d=2; g=0; f={1: {d=1; g=1; f={}}}}");
    assert_eq!(v["conjugate"], "{d=1; g=1; f={}}");
    assert_eq!(v["verdicts"]["x_outside_next"], true);
    assert_eq!(v["verdicts"]["l_in_h"], true);
    assert_eq!(v["verdicts"]["conjugate_outside_h"], true);

    // witnessing a normalizing element is a precondition failure
    let (code, _, err) = run(&["witness", "--config", &fx.t3, "--beta", "1", "b(7)"]);
    assert_eq!(code, 1);
    assert!(err.contains("normalizes"), "{err}");

    let (code, out, _) = run(&[
        "quotient",
        "--config",
        &fx.t3,
        "--beta",
        "1",
        "{d=1; g=1; f={}}",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1");

    // quotient outside H_{beta+1} fails
    let (code, _, err) = run(&["quotient", "--config", &fx.t3, "--beta", "1", s2]);
    assert_eq!(code, 1);
    assert!(err.contains("not in H_2"), "{err}");
}

#[test]
fn oracle_command_runs_clean() {
    let fx = fixtures();
    let (code, out, _) = run(&["oracle", "--config", &fx.finite_c2]);
    assert_eq!(code, 0);
    assert!(out.contains("result: PASS"), "{out}");
    assert!(out.contains("|K| = 128"));

    let (code, out, _) = run(&["oracle", "--config", &fx.finite_c2, "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["k_order"], 128);
    assert_eq!(v["per_beta"][0]["normalizer_size"], 64);
    assert_eq!(v["per_beta"][0]["quotient_iso"], true);

    // infinite base is rejected
    let (code, _, err) = run(&["oracle", "--config", &fx.t3]);
    assert_eq!(code, 1);
    assert!(err.contains("finite"), "{err}");

    // cap applies
    let (code, _, err) = run(&["oracle", "--config", &fx.finite_c2, "--cap", "100"]);
    assert_eq!(code, 1);
    assert!(err.contains("cap"), "{err}");

    // generators-only inner loop gives the same verdict
    let (code, out, _) = run(&["oracle", "--config", &fx.finite_c2, "--generators-only"]);
    assert_eq!(code, 0);
    assert!(out.contains("result: PASS"));
}

#[test]
fn oracle_sampled_mode() {
    let fx = fixtures();
    let (code, out, _) = run(&[
        "oracle",
        "--config",
        &fx.finite_c2,
        "--sampled",
        "--seed",
        "7",
        "--iters",
        "500",
        "--json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert!(v["mode"].as_str().unwrap().starts_with("sampled"));
    assert_eq!(v["per_beta"][0]["sampled_pairs"], 500);
    assert_eq!(v["per_beta"][0]["normalizer_match"], true);
}

#[test]
fn fuzz_is_seed_deterministic() {
    let fx = fixtures();
    let args = ["fuzz", "--config", &fx.w1, "--seed", "42", "--iters", "120"];
    let (c1, out1, _) = run(&args);
    let (c2, out2, _) = run(&args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(out1, out2);
    assert!(out1.contains("mul_associative"));
    assert!(out1.contains("ok"));

    let (code, out, _) = run(&[
        "fuzz", "--config", &fx.w1, "--seed", "1", "--iters", "50", "--json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert!(v["properties"].as_array().unwrap().len() >= 10);
}

#[test]
fn report_rows_match_alpha() {
    let fx = fixtures();
    let (code, out, _) = run(&["report", "--config", &fx.t3]);
    assert_eq!(code, 0);
    assert_eq!(
        out.lines()
            .filter(|l| l.trim_start().starts_with("beta"))
            .count(),
        2
    );
    assert!(out.contains("all strict"), "{out}");

    let (code, out, _) = run(&["report", "--config", &fx.w1, "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["alpha"], "w + 1");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["rows"][3]["beta"], "w");
    assert_eq!(v["length_is_alpha"], true);
}

#[test]
fn element_syntax_errors_exit_1() {
    let fx = fixtures();
    let (code, _, err) = run(&["member", "--config", &fx.t3, "--beta", "1", "{d=1; g=1"]);
    assert_eq!(code, 1);
    assert!(err.contains("syntax") || err.contains("expected"), "{err}");
}
