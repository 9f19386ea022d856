use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strongdamp")).current_dir(dir).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const ZERO: &str = r#"{
  "operator": {"kind": "explicit", "lambdas": [0, 1, 2.5, 40]},
  "coefficient": {"family": "zero", "horizon": 2},
  "delta": 0.5, "sigma": 0.5,
  "initial": {"u0": {"kind": "explicit", "values": [1, 0, -1, 0.25]},
              "u1": {"kind": "explicit", "values": [0.5, 1, 2, -3]}},
  "times": {"horizon": 2, "points": 8}
}"#;

#[test]
fn zero_coefficient_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "zero.json", ZERO);
    let o = run(dir.path(), &["solve", "--config", "zero.json", "--out", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let u0 = [1.0, 0.0, -1.0, 0.25];
    let u1 = [0.5, 1.0, 2.0, -3.0];
    for (n, &lambda) in [0.0, 1.0, 2.5, 40.0f64].iter().enumerate() {
        let path = dir.path().join(format!("out/trajectory/mode_{n:04}.csv"));
        let mut rd = csv::Reader::from_path(path).unwrap();
        let mut rows = 0;
        for rec in rd.records() {
            let rec = rec.unwrap();
            let f = |i: usize| rec[i].parse::<f64>().unwrap();
            let (t, u, du) = (f(0), f(2), f(3));
            let exact = strongdamp::modal::closed_form::zero_speed_solution(0.5, 0.5, lambda, u0[n], u1[n], t);
            assert_eq!((u, du), exact, "mode {n} t {t}");
            // u' = u1 e^{-2κt}, u = u0 + u1 (1 - e^{-2κt}) / (2κ), κ = δλ^{2σ}
            let kappa = 0.5 * lambda;
            let (u_ref, du_ref) = if kappa == 0.0 {
                (u0[n] + u1[n] * t, u1[n])
            } else {
                let e = (-2.0 * kappa * t).exp();
                (u0[n] + u1[n] * (1.0 - e) / (2.0 * kappa), u1[n] * e)
            };
            assert!((u - u_ref).abs() <= 1e-14 * (1.0 + u_ref.abs()), "{u} vs {u_ref}");
            assert!((du - du_ref).abs() <= 1e-14 * (1.0 + du_ref.abs()), "{du} vs {du_ref}");
            rows += 1;
        }
        assert_eq!(rows, 9);
    }
    let norms = json(dir.path().join("out/norms.json"));
    assert_eq!(norms.as_array().unwrap().len(), 9);
}

#[test]
fn power_law_decay_passes() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "solve.json",
        r#"{
  "operator": {"kind": "geometric", "count": 5, "first": 10, "ratio": 10},
  "coefficient": {"family": "power", "exponent": 2, "k": 1, "alpha": 1},
  "delta": 1, "sigma": 0.5,
  "initial": {"u0": {"kind": "power", "exponent": 1}, "u1": {"kind": "random"}},
  "times": {"horizon": 1, "points": 10}
}"#,
    );
    let o = run(dir.path(), &["solve", "--config", "solve.json", "--out", "out", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let e = json(dir.path().join("out/energy.json"));
    assert_eq!(e["asserted"], true);
    let nu = e["constants"]["nu"].as_f64().unwrap();
    let modes = e["modes"].as_array().unwrap();
    let expected = [10.0, 100.0, 1000.0, 10000.0, 100000.0f64].iter().filter(|&&l| l >= nu).count();
    assert!(expected >= 3);
    assert_eq!(modes.len(), expected);
    for m in modes {
        assert_eq!(m["verdict"]["status"], "pass", "{m}");
        assert!(m["min_log_margin"].as_f64().unwrap() >= 0.0);
        assert!(dir.path().join("out").join(m["csv"].as_str().unwrap()).exists());
    }
}

#[test]
fn missing_sigma_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let body = ZERO.replace(r#""sigma": 0.5,"#, "");
    write(dir.path(), "bad.json", &body);
    let o = run(dir.path(), &["solve", "--config", "bad.json", "--out", "out"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sigma"), "{}", stderr(&o));
}

#[test]
fn nested_errors_carry_the_field_path() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ce.json", r#"{"params": {"n_max": 2, "colour": 1}}"#);
    let o = run(dir.path(), &["counterexample", "--config", "ce.json", "--out", "out"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("params.colour"), "{}", stderr(&o));
}

#[test]
fn missing_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["solve", "--out", "out"]);
    assert_eq!(code(&o), 2);
    let o = run(dir.path(), &["norms", "--config", "absent.json", "--out", "out"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn counterexample_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["counterexample", "--out", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(dir.path().join("out/verdicts.json"));
    for key in ["conditions", "gaps", "regularity", "pathology"] {
        assert_eq!(v[key], true, "{key}");
    }
    for f in ["bundle.json", "sequences.json", "coefficient.csv", "regularity.json", "pathology.json"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let bundle = json(dir.path().join("out/bundle.json"));
    assert_eq!(bundle["blocks"].as_array().unwrap().len(), 7);
}

#[test]
fn counterexample_depth_four() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ce.json", r#"{"params": {"delta": 1, "sigma": 0, "k": 0, "alpha": 1, "n_max": 4}}"#);
    let o = run(dir.path(), &["counterexample", "--config", "ce.json", "--out", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(dir.path().join("out/verdicts.json"));
    assert_eq!(v["pathology"], true);
}

#[test]
fn counterexample_single_block() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ce.json", r#"{"params": {"n_max": 0}}"#);
    let o = run(dir.path(), &["counterexample", "--config", "ce.json", "--out", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(dir.path().join("out/verdicts.json"));
    assert_eq!(v["conditions"], true);
    assert_eq!(v["regularity"], true);
    assert!(v["pathology"].is_null());
    let bundle = json(dir.path().join("out/bundle.json"));
    assert_eq!(bundle["blocks"].as_array().unwrap().len(), 1);
}

#[test]
fn counterexample_rejects_threshold_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let threshold = 1.0 / 3.0;
    write(dir.path(), "ce.json", &format!(r#"{{"params": {{"sigma": {threshold}}}}}"#));
    let o = run(dir.path(), &["counterexample", "--config", "ce.json", "--out", "out"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sigma"), "{}", stderr(&o));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "solve.json",
        r#"{
  "operator": {"kind": "geometric", "count": 6, "first": 10, "ratio": 10},
  "coefficient": {"family": "sin-squared", "frequency": 5, "horizon": 0.5, "k": 1, "alpha": 1},
  "delta": 1, "sigma": 0.5,
  "initial": {"u0": {"kind": "random"}, "u1": {"kind": "gevrey", "order": 2, "radius": 0.1}},
  "times": {"horizon": 0.5, "points": 16},
  "norms": [{"space": "sobolev", "alpha": 0.5}, {"space": "ultradistribution", "alpha": 0, "order": 2, "radius": 1}]
}"#,
    );
    for out in ["a", "b"] {
        let o = run(dir.path(), &["solve", "--config", "solve.json", "--out", out, "--seed", "11", "--threads", "3"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let mut files = vec![];
    for sub in ["", "trajectory", "energy"] {
        for e in fs::read_dir(dir.path().join("a").join(sub)).unwrap() {
            let e = e.unwrap();
            if e.file_type().unwrap().is_file() {
                files.push(Path::new(sub).join(e.file_name()));
            }
        }
    }
    assert!(files.len() >= 8);
    for f in files {
        assert_eq!(fs::read(dir.path().join("a").join(&f)).unwrap(), fs::read(dir.path().join("b").join(&f)).unwrap(), "{f:?}");
    }

    let o = run(dir.path(), &["solve", "--config", "solve.json", "--out", "c", "--seed", "12"]);
    assert_eq!(code(&o), 0);
    assert_ne!(
        fs::read(dir.path().join("a/trajectory/mode_0000.csv")).unwrap(),
        fs::read(dir.path().join("c/trajectory/mode_0000.csv")).unwrap()
    );
}

#[test]
fn phase_diagram_labels() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ph.json", r#"{"k_plus_alpha": [1, 2], "sigma": [0.2, 0.25, 0.4], "lambdas": [100, 300, 1000, 3000]}"#);
    let o = run(dir.path(), &["phase-diagram", "--config", "ph.json", "--out", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rd = csv::Reader::from_path(dir.path().join("out/phase.csv")).unwrap();
    assert_eq!(rd.headers().unwrap(), vec!["k_plus_alpha", "sigma", "analytic", "empirical", "fitted_exponent"]);
    let rows: Vec<(String, String, String)> =
        rd.records().map(|r| r.unwrap()).map(|r| (format!("{}/{}", &r[0], &r[1]), r[2].to_string(), r[3].to_string())).collect();
    let label = |key: &str| rows.iter().find(|r| r.0 == key).unwrap().1.clone();
    assert_eq!(label("2.0/0.4"), "sobolev-wellposed");
    assert_eq!(label("1.0/0.2"), "pathological");
    assert_eq!(label("2.0/0.25"), "borderline");
    assert_eq!(rows.len(), 6);
}

#[test]
fn phase_diagram_rejects_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ph.json", r#"{"k_plus_alpha": [], "sigma": [0.2]}"#);
    let o = run(dir.path(), &["phase-diagram", "--config", "ph.json", "--out", "out"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn approximation_margins() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ok.json", r#"{"coefficient": {"family": "power", "exponent": 2, "k": 1, "alpha": 1}, "lambdas": [10, 1000]}"#);
    let o = run(dir.path(), &["approximate-coefficient", "--config", "ok.json", "--out", "ok"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let a = json(dir.path().join("ok/approximation.json"));
    assert_eq!(a["checks"].as_array().unwrap().len(), 2);
    let rows = csv::Reader::from_path(dir.path().join("ok/gamma/lambda_001.csv")).unwrap().records().count();
    assert_eq!(rows, 10_000);

    // a Hölder constant far below the true one makes γ_λ too coarse
    write(dir.path(), "bad.json", r#"{"coefficient": {"family": "power", "exponent": 0.5, "k": 0, "alpha": 0.5, "holder": 0.01}, "lambdas": [100]}"#);
    let o = run(dir.path(), &["approximate-coefficient", "--config", "bad.json", "--out", "bad"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn norms_of_csv_vector() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "v.csv", "lambda,u,log_abs_u,sign_u\n1,0.5,,\n4,-0.25,,\n9,0,-3000,1\n");
    write(
        dir.path(),
        "nm.json",
        r#"{"vector": "v.csv", "norms": [{"space": "sobolev", "alpha": 0.5}, {"space": "gevrey", "alpha": 0, "order": 2, "radius": 1}]}"#,
    );
    let o = run(dir.path(), &["norms", "--config", "nm.json", "--out", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let n = json(dir.path().join("out/norms.json"));
    let sob = n["norms"][0]["norm_sq"].as_f64().unwrap();
    assert!((sob - (4.0 * 0.25 + 25.0 * 0.0625)).abs() < 1e-15);
    let gev = n["norms"][1]["norm_sq"].as_f64().unwrap();
    let oracle = (2.0f64).exp() * 0.25 + (4.0f64).exp() * 0.0625;
    assert!((gev - oracle).abs() < 1e-14 * oracle);
}

#[test]
fn numerical_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "tight.json",
        r#"{
  "operator": {"kind": "explicit", "lambdas": [10]},
  "coefficient": {"family": "power", "exponent": 2, "k": 1, "alpha": 1},
  "delta": 1, "sigma": 0.5,
  "initial": {"u0": {"kind": "explicit", "values": [1]}, "u1": {"kind": "zero"}},
  "times": {"horizon": 1, "points": 4},
  "tolerances": {"rel_tol": 1e-30, "abs_tol": 1e-300}
}"#,
    );
    let o = run(dir.path(), &["solve", "--config", "tight.json", "--out", "out"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}
