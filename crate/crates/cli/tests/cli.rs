//! End-to-end tests of the `fracdyn` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fracdyn");

const HOMOGENEOUS_OSCILLATOR: &str = "\
order a;
const tau: T;
const omega: T^(-1);
var x: L of t: T;
eq: tau^(2*a-2)*FD(2*a,t)x + omega^2*x = 0;
";

const NAIVE_OSCILLATOR: &str = "\
order a;
const omega: T^(-1);
var x: L of t: T;
eq: FD(2*a,t)x + omega^2*x = 0;
";

const CLASSICAL_OSCILLATOR: &str = "\
const omega: T^(-1);
var x: L of t: T;
eq: D(2,t)x + omega^2*x = 0;
";

const DIFFUSION: &str = "\
const D_c: L^2*T^(-1);
var u: 1 of t: T, x: L;
eq: D(1,t)u - D_c*D(2,x)u = 0;
";

const BROKEN: &str = "\
var x: L of t: T;
eq: D(1,t)x + x = 0;
";

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .env_remove("FRACDYN_TOL")
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).expect("write test file");
    path
}

#[test]
fn help_and_version_exit_cleanly() {
    let help = run(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("fracdyn"));
    let version = run(&["--version"]);
    assert_eq!(code(&version), 0);
}

#[test]
fn check_exit_codes_reflect_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_file(dir.path(), "good.eq", HOMOGENEOUS_OSCILLATOR);
    let naive = write_file(dir.path(), "naive.eq", NAIVE_OSCILLATOR);
    let broken = write_file(dir.path(), "broken.eq", BROKEN);

    let out = run(&["check", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("verdict: homogeneous for all orders"));
    assert!(stdout(&out).contains("term "));

    let out = run(&["check", naive.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("only at a = 1"));
    assert!(stdout(&out).contains("outside the fractional range"));

    let out = run(&["check", broken.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("verdict: inhomogeneous"));
}

#[test]
fn check_reports_errors_on_stderr_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_file(dir.path(), "bad.eq", "eq: x = 0;\n");
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).starts_with("error:"));

    let missing = dir.path().join("nope.eq");
    let out = run(&["check", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn check_json_output_is_structured() {
    let dir = tempfile::tempdir().unwrap();
    let naive = write_file(dir.path(), "naive.eq", NAIVE_OSCILLATOR);
    let out = run(&["check", "--json", naive.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["kind"], "only-at");
    assert_eq!(v["fractionally_homogeneous"], false);
    assert_eq!(v["outside_fractional_range"], true);
    assert_eq!(v["assignments"]["a"], "1");
    assert!(v["per_term"].as_array().unwrap().len() >= 2);

    let good = write_file(dir.path(), "good.eq", HOMOGENEOUS_OSCILLATOR);
    let out = run(&["check", "--json", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["kind"], "for-all-orders");
    assert_eq!(v["fractionally_homogeneous"], true);
}

#[test]
fn embed_then_check_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let classical = write_file(dir.path(), "classical.eq", CLASSICAL_OSCILLATOR);

    // The homogeneous rewrite stays homogeneous for every order.
    let rewritten = dir.path().join("homog.eq");
    let out = run(&[
        "embed",
        classical.to_str().unwrap(),
        "--method",
        "homogeneous",
        "--tau",
        "2.0",
        "-o",
        rewritten.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&rewritten).unwrap();
    assert!(text.starts_with("# tau = 2\n"));
    assert!(text.contains("tau^(2*a-2)*FD(2*a,t)x"));
    let out = run(&["check", rewritten.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    // The naive rewrite is homogeneous only at order one.
    let naive = dir.path().join("naive.eq");
    let out = run(&[
        "embed",
        classical.to_str().unwrap(),
        "--method",
        "direct",
        "-o",
        naive.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&["check", naive.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn embed_rewrites_only_time_derivatives() {
    let dir = tempfile::tempdir().unwrap();
    let diffusion = write_file(dir.path(), "diffusion.eq", DIFFUSION);
    let out = run(&[
        "embed",
        diffusion.to_str().unwrap(),
        "--method",
        "homogeneous",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("tau^(a-1)*FD(a,t)u"));
    assert!(
        text.contains("D(2,x)u"),
        "space derivative left alone: {text}"
    );

    // Piped back through check, the rewrite is homogeneous for all orders.
    let rewritten = write_file(dir.path(), "rewritten.eq", &text);
    let out = run(&["check", rewritten.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn ml_evaluates_the_series() {
    let out = run(&["ml", "--lambda", "1.0", "--z", "1.0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let value: f64 = text.trim().rsplit(" = ").next().unwrap().parse().unwrap();
    assert!((value - std::f64::consts::E).abs() < 1e-12, "{text}");

    let out = run(&["ml", "--lambda", "2.0", "--z", "-4.0"]);
    assert_eq!(code(&out), 0);
    let value: f64 = stdout(&out)
        .trim()
        .rsplit(" = ")
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 2.0f64.cos()).abs() < 1e-12);
}

#[test]
fn ml_honors_the_tolerance_env_var() {
    let ok = Command::new(BIN)
        .env("FRACDYN_TOL", "1e-6")
        .args(["ml", "--lambda", "0.9", "--z", "-1.5"])
        .output()
        .unwrap();
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));

    let bad = Command::new(BIN)
        .env("FRACDYN_TOL", "abc")
        .args(["ml", "--lambda", "1.0", "--z", "1.0"])
        .output()
        .unwrap();
    assert_eq!(code(&bad), 1);
    assert!(stderr(&bad).contains("FRACDYN_TOL"));
}

#[test]
fn caputo_differentiates_a_csv_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,x\n");
    for i in 0..=8 {
        let t = i as f64 * 0.125;
        csv.push_str(&format!("{t},{t}\n"));
    }
    let input = write_file(dir.path(), "ramp.csv", &csv);
    let output = dir.path().join("deriv.csv");

    let out = run(&[
        "caputo",
        "--mu",
        "0.5",
        "--input",
        input.to_str().unwrap(),
        "-o",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows: Vec<(f64, f64)> = fs::read_to_string(&output)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (t, x) = l.split_once(',').unwrap();
            (t.parse().unwrap(), x.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 9);
    // The half derivative of t is 2*sqrt(t/pi); the scheme reproduces
    // piecewise-linear inputs exactly up to roundoff.
    let want = 2.0 * (1.0f64 / std::f64::consts::PI).sqrt();
    assert!((rows[8].1 - want).abs() < 1e-10, "{:?}", rows[8]);
    assert_eq!(rows[0].1, 0.0);

    // A time scale multiplies by tau^(mu-1) = 4^(-1/2) = 1/2.
    let scaled = dir.path().join("scaled.csv");
    let out = run(&[
        "caputo",
        "--mu",
        "0.5",
        "--tau",
        "4.0",
        "--input",
        input.to_str().unwrap(),
        "-o",
        scaled.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let last = fs::read_to_string(&scaled).unwrap();
    let last: f64 = last
        .lines()
        .last()
        .unwrap()
        .split_once(',')
        .unwrap()
        .1
        .parse()
        .unwrap();
    assert!((last - 0.5 * want).abs() < 1e-10);
}

#[test]
fn caputo_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_file(dir.path(), "bad.csv", "t,x\n0,1\n0.1,not-a-number\n");
    let out = run(&["caputo", "--mu", "0.5", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn oscillator_writes_report_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("run");
    let out = run(&[
        "oscillator",
        "--n",
        "64",
        "--b",
        "1.0",
        "--outdir",
        outdir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("naive rewrite: homogeneous only at a = 1"));
    assert!(text.contains("homogeneous rewrite: homogeneous for all orders"));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(outdir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["alpha"], 0.75);
    assert_eq!(report["n_steps"], 64);
    assert_eq!(
        report["ml_argument_dimensions"]["inhomogeneous"],
        "T^(2*a-2)"
    );
    assert!(report["abm_vs_closed_max"].as_f64().unwrap() < 1e-2);

    for name in [
        "osc_numerical_a0.75_tau2.csv",
        "osc_homogeneous_a0.75_tau2.csv",
        "osc_nondim_a0.75_tau2.csv",
        "osc_inhomogeneous_a0.75_tau2.csv",
    ] {
        let path = outdir.join(name);
        assert!(path.exists(), "missing {name}");
        let body = fs::read_to_string(&path).unwrap();
        assert!(body.starts_with("t,x\n"));
        assert_eq!(body.lines().count(), 66, "{name}");
    }
}

#[test]
fn oscillator_flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "config.json",
        r#"{"alpha": 0.6, "n": 32, "b": 1.0}"#,
    );
    let outdir = dir.path().join("run");
    let out = run(&[
        "oscillator",
        "--config",
        config.to_str().unwrap(),
        "--alpha",
        "0.5",
        "--outdir",
        outdir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(outdir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["alpha"], 0.5);
    assert_eq!(report["n_steps"], 32);
    assert!(outdir.join("osc_homogeneous_a0.5_tau2.csv").exists());
}

#[test]
fn oscillator_rejects_bad_configuration() {
    let out = run(&["oscillator", "--alpha", "1.5", "--outdir", "/tmp"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("invalid configuration"));
}

#[test]
fn verify_coherence_sits_at_the_roundoff_floor() {
    let out = run(&["verify", "--what", "coherence", "--n", "16"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("roundoff floor"), "{text}");
}

#[test]
fn verify_scaling_shows_a_convergence_ladder() {
    let out = run(&["verify", "--what", "scaling", "--n", "32"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("n = ").count(), 3, "{text}");
    assert!(text.contains("observed order"), "{text}");
}

#[test]
fn verify_equivalence_runs_quickly() {
    let out = run(&[
        "verify",
        "--what",
        "equivalence",
        "--n",
        "16",
        "--tau",
        "2.0",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("gap = "));
}

#[test]
fn verify_fracconst_is_roundoff_small() {
    let out = run(&["verify", "--what", "fracconst", "--n", "16"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("roundoff floor"), "{}", stdout(&out));
}
