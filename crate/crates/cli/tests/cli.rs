use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn apw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apw"))
        .args(args)
        .env_remove("APW_NUM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn value_after(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
}

#[test]
fn solve_well_prints_eigenvalue_and_amplitudes() {
    let o = apw(&["solve-well", "--v0", "1", "--a", "pi"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!((value_after(&out, "E1 =") - -0.457591).abs() < 1e-5);
    assert!((value_after(&out, "A =") - 0.657960).abs() < 1e-4);
    assert!((value_after(&out, "C =") - 4.05791).abs() < 1e-4);
    let j = apw(&["solve-well", "--a", "2*pi/2", "--json"]);
    let v: Value = serde_json::from_slice(&j.stdout).unwrap();
    assert!((v["E1"].as_f64().unwrap() - -0.457591).abs() < 1e-5);
}

#[test]
fn interval_demo_prints_the_pair() {
    let o = apw(&["interval-demo"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("Dirichlet/Neumann: (1, 0)"), "{out}");
    assert!(out.contains("NOT an upper bound"));
}

#[test]
fn missing_config_exits_with_one() {
    let o = apw(&["certify", "--config", "missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("config not found"), "{}", stderr(&o));
}

#[test]
fn unknown_keys_are_named() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "o.json", r#"{"gram": [[1]], "grma": 2}"#);
    let o = apw(&["orthonormalize", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("grma"), "{}", stderr(&o));
}

#[test]
fn overlapping_spheres_name_the_assumption() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "bands.json",
        r#"{
            "geometry": {"cell": "2*pi", "spheres": [
                {"center": [1, 1, 1], "radius": 1.0},
                {"center": [2, 1, 1], "radius": 1.0}
            ]},
            "k_points": [[0, 0, 0]], "g_count": 5, "l_max": 4, "window": [0.1, 1]
        }"#,
    );
    let o = apw(&["apw-bands", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("(A')") && err.contains("error[apw_basis::InvalidGeometry]"),
        "{err}"
    );
}

#[test]
fn numerical_errors_exit_with_two_and_the_module_name() {
    let o = apw(&["sweep-well", "--gammas", "0,100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("error[experiments::NoRealSolution]"),
        "{}",
        stderr(&o)
    );
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "g.json", r#"{"gram": [[1, 2], [2, 1]]}"#);
    let o = apw(&["orthonormalize", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("orthonorm::NotPositiveDefinite"));
}

#[test]
fn sweep_writes_csv_files_deterministically() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let plot = dir.path().join(format!("plot-{name}"));
        let o = apw(&[
            "sweep-well",
            "--output",
            out.to_str().unwrap(),
            "--plot",
            plot.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (
            std::fs::read(out).unwrap(),
            std::fs::read_to_string(plot).unwrap(),
        )
    };
    let (a, plot) = run("a.csv");
    let (b, _) = run("b.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 32);
    assert!(text.starts_with("gamma,tilde_E1,jump_h32,deficit"));
    assert!(plot.starts_with("gamma,tilde_E1"));
    // thread count does not change the bytes
    let out = dir.path().join("c.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_apw"))
        .args(["sweep-well", "--output", out.to_str().unwrap()])
        .env("APW_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(out).unwrap(), text);
}

#[test]
fn sweep_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "s.json",
        r#"{"v0": 1, "a": "pi", "gammas": [0, 0.1]}"#,
    );
    let o = apw(&["sweep-well", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row: Vec<f64> = out
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row[0], 0.1);
    assert!((row[1] - -0.484263).abs() < 1e-4);
}

#[test]
fn bad_thread_count_is_a_validation_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_apw"))
        .args(["interval-demo"])
        .env("APW_NUM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

fn empty_lattice_config(dir: &TempDir) -> String {
    write(
        dir,
        "bands.json",
        r#"{
            "geometry": {"cell": "2*pi", "spheres": [{"center": [3.0, 3.1, 3.2], "radius": 2.0}]},
            "k_points": [[0.1, 0.2, 0.3]],
            "g_count": 7, "l_max": 16, "window": [0.01, 0.5], "n_scan": 16, "root_tol": 1e-12
        }"#,
    )
}

#[test]
fn apw_bands_on_the_empty_lattice() {
    let dir = TempDir::new().unwrap();
    let cfg = empty_lattice_config(&dir);
    let o = apw(&["apw-bands", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let roots = v["k_points"][0]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0]["energy"].as_f64().unwrap() - 0.14).abs() < 1e-10);
    let again = apw(&["apw-bands", "--config", &cfg]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn apw_convergence_reports_rows_and_gaps() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "conv.json",
        r#"{
            "geometry": {"cell": "2*pi", "spheres": [{"center": ["pi", "pi", "pi"], "radius": 2.0}]},
            "potential": {"spheres": [{"kind": "constant_well", "depth": 1.0}]},
            "k": [0, 0, 0], "g_count": 9, "l_max_list": [2, 6], "window": [-1.0, 0.2], "n_scan": 24
        }"#,
    );
    let o = apw(&["apw-convergence", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(v["root_gaps"].as_array().unwrap().len(), 1);
    let cert = &rows[1]["certificate"];
    assert_eq!(cert["M"], 1);
    assert_eq!(cert["C_provenance"], "user_supplied");
}

#[test]
fn certify_well_fits_c() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        r#"{"problem": {"kind": "well", "v0": 1, "a": "pi"}, "C": 2}"#,
    );
    let o = apw(&["certify", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let c_fit = v["C_fit"].as_f64().unwrap();
    assert!(c_fit > 0.0 && c_fit < 2.0, "{c_fit}");
    assert_eq!(v["violations"], 0);
    assert_eq!(v["points"].as_array().unwrap().len(), 31);
}

#[test]
fn certify_custom_without_reference_fails() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        r#"{"problem": {"kind": "custom", "points": [[0.1, -1.0]], "M": 1}}"#,
    );
    let o = apw(&["certify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("certificate::ReferenceUnavailable"));
}

#[test]
fn certify_apw_emits_a_certificate() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        r#"{"problem": {"kind": "apw",
            "geometry": {"cell": "2*pi", "spheres": [{"center": [3, 3, 3], "radius": 2}]},
            "potential": {"spheres": [{"kind": "constant_well", "depth": 0.5}]},
            "k": [0, 0, 0], "g_count": 7, "l_max": 4, "energy": 0.3, "m0": 2}, "C": 2}"#,
    );
    let o = apw(&["certify", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in [
        "M",
        "tilde_E",
        "jump_sums",
        "C",
        "C_provenance",
        "penalty",
        "smallness_statistic",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["M"], 2);
}

#[test]
fn orthonormalize_reports_the_bound() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "g.json",
        r#"{"gram": [[1, [0.05, 0.02]], [[0.05, -0.02], 1.01]]}"#,
    );
    let o = apw(&["orthonormalize", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["bound_ok"], true);
    assert!(v["residual"].as_f64().unwrap() < 1e-14);
    assert_eq!(v["B"][0][1], serde_json::json!([0.0, 0.0]));
}

#[test]
fn norm_tools_operations() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, text: &str| {
        let cfg = write(&dir, name, text);
        let o = apw(&["norm-tools", "--config", &cfg]);
        assert!(o.status.success(), "{}", stderr(&o));
        serde_json::from_slice::<Value>(&o.stdout).unwrap()
    };
    let v = run(
        "layered.json",
        r#"{"task": {"operation": "layered", "radii": [1, 2], "values": [1, 3, 2]}}"#,
    );
    assert_eq!(v["constants"], serde_json::json!([1.0, 2.0, -1.0]));
    let v = run(
        "norm.json",
        r#"{"task": {"operation": "boundary_norm", "radius": 1, "s": 1.5, "coeffs": [1, 0, 0, 0]}}"#,
    );
    assert!((v["norm"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    let v = run(
        "h2.json",
        r#"{"task": {"operation": "h2_constant", "radius": 1, "l_eval": 10}}"#,
    );
    assert_eq!(v["per_l"].as_array().unwrap().len(), 11);
}

#[test]
fn help_lists_every_subcommand() {
    let o = apw(&["--help"]);
    let out = stdout(&o);
    for cmd in [
        "solve-well",
        "sweep-well",
        "apw-bands",
        "apw-convergence",
        "certify",
        "orthonormalize",
        "interval-demo",
        "norm-tools",
    ] {
        assert!(out.contains(cmd), "missing {cmd}");
    }
    let o = apw(&["sweep-well", "--help"]);
    let out = stdout(&o);
    for flag in [
        "--v0", "--a", "--tol", "--config", "--gammas", "--output", "--plot",
    ] {
        assert!(out.contains(flag), "missing {flag}");
    }
    assert!(!Path::new("missing.json").exists());
}
