use std::fs;
use std::path::Path;

use frac_yamabe::cli::{main_with_args, EXIT_IO, EXIT_OK, EXIT_VALIDATION};
use frac_yamabe::halfspace::GridField;
use serde_json::Value;

fn run(args: &[&str]) -> i32 {
    let mut v = vec!["frac-yamabe"];
    v.extend_from_slice(args);
    main_with_args(v)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn constants_rows_and_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let code = run(&["constants", "--n", "3", "--gamma", "0.5,1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["command"], "constants");
    assert!(v["build_id"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["c_ext"].as_f64().unwrap(), 1.0);
    assert!((rows[1]["lambda_sphere"].as_f64().unwrap() - 5.47765).abs() < 1e-3);
    assert!(rows[1]["theta_hat"].is_null());
    for r in rows {
        for key in ["n", "gamma", "tol", "build_id", "s_sobolev", "s_bar", "d_gamma", "c_poisson"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
    }
    // nothing but the report is left behind
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn twelve_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    assert_eq!(run(&["constants", "--gamma", "0.3", "--format", "csv", "--out", out.to_str().unwrap()]), 0);
    let text = fs::read_to_string(&out).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let s = row[header.iter().position(|h| *h == "s_sobolev").unwrap()];
    let mantissa: String = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect();
    assert!(mantissa.trim_start_matches('0').len() <= 12, "{s}");
    assert!(mantissa.len() >= 10, "{s}");
}

#[test]
fn validation_failures_exit_two() {
    assert_eq!(run(&["constants", "--gamma", "1.5"]), EXIT_VALIDATION);
    assert_eq!(run(&["sphere-yamabe", "--beta", "3.5"]), EXIT_VALIDATION);
    assert_eq!(run(&["sphere-yamabe", "--n", "3,4"]), EXIT_VALIDATION);
    assert_eq!(run(&["halfspace-solve", "--grid", "8"]), EXIT_VALIDATION);
    assert_eq!(run(&["bubble-check", "--mu", "-1"]), EXIT_VALIDATION);
    assert_eq!(run(&["no-such-verb"]), EXIT_VALIDATION);
    assert_eq!(run(&["constants", "--config", "/nonexistent/cfg.toml"]), EXIT_IO);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("scan.csv");
    fs::write(
        &cfg,
        format!(
            "command = \"solvability-scan\"\nn = [3, 4, 5, 6, 7, 8]\ngamma = 0.25\nformat = \"csv\"\nout = \"{}\"\n",
            out.display()
        ),
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(run(&["solvability-scan", "--config", c, "--gamma", "0.5"]), EXIT_OK);
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    let solvable: Vec<&str> = rows.iter().map(|r| *r.last().unwrap()).collect();
    assert_eq!(solvable, ["false", "false", "false", "true", "true", "true"]);
    assert_eq!(rows[2][4], "0.0");
    assert_eq!(run(&["constants", "--config", c]), EXIT_VALIDATION);
    fs::write(&cfg, "bogus_key = 1\n").unwrap();
    assert_eq!(run(&["constants", "--config", c]), EXIT_VALIDATION);
}

#[test]
fn sphere_yamabe_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let args = [
        "sphere-yamabe", "--n", "3", "--gamma", "0.5", "--band-limit", "16", "--beta", "2.8,2,2.4",
        "--perturb", "0.3", "--seed", "42", "--out", out.to_str().unwrap(),
    ];
    assert_eq!(run(&args), EXIT_OK);
    let v = json(&out);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["summary"]["all_converged"], true);
    assert_eq!(v["summary"]["c_beta_nonincreasing"], true);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let got = r["c_beta"].as_f64().unwrap();
        let want = r["c_beta_constant"].as_f64().unwrap();
        assert!((got - want).abs() < 1e-6 * want);
        assert_eq!(r["positivity_flag"], true);
        for key in ["iterations", "final_residual", "min_value", "converged_flag", "monotone_after_damping", "final_damping"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
    }
    assert_eq!(v["fields"].as_array().unwrap()[0]["coeffs"].as_array().unwrap().len(), 17);
    // same seed, same output
    let again = dir.path().join("s2.json");
    let mut args2 = args;
    args2[args2.len() - 1] = again.to_str().unwrap();
    assert_eq!(run(&args2), EXIT_OK);
    assert_eq!(json(&again)["rows"], v["rows"]);
}

#[test]
fn bubble_check_meets_sharp_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.json");
    assert_eq!(run(&["bubble-check", "--n", "3", "--gamma", "0.5", "--mu", "1", "--out", out.to_str().unwrap()]), 0);
    let r = &json(&out)["rows"][0];
    assert!(r["relative_error"].as_f64().unwrap() < 1e-4);
}

#[test]
fn halfspace_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demo.json");
    assert_eq!(run(&["extension-demo", "--gamma", "0.7", "--grid", "128,128", "--out", out.to_str().unwrap()]), 0);
    let v = json(&out);
    assert_eq!(v["summary"]["monotone_error"], true);
    assert_eq!(v["summary"]["monotone_dtn_error"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);

    let field = dir.path().join("u.bin");
    let out = dir.path().join("solve.csv");
    let code = run(&[
        "halfspace-solve", "--gamma", "0.3", "--grid", "64,32", "--mode", "2", "--format", "csv",
        "--field-out", field.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let u = GridField::load(&field).unwrap();
    assert_eq!((u.strip().nx(), u.strip().ny()), (64, 32));
    assert!(fs::read_to_string(&out).unwrap().contains("true"));

    let out = dir.path().join("hopf.json");
    assert_eq!(run(&["hopf-check", "--gamma", "0.5", "--grid", "64,64", "--out", out.to_str().unwrap()]), 0);
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows[0]["passed"], true);
    assert_eq!(rows[0]["above_solver_noise"], true);
    assert_eq!(rows[1]["value"].as_f64().unwrap(), 0.0);
}
