//! End-to-end checks of the qcar command-line surface.

use std::process::{Command, Output};

fn qcar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        !out.stdout.is_empty(),
        "no stdout; stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn check_diagonal_point_is_renormalizable() {
    let out = qcar(&[
        "check", "--phi", "1.5707963", "--theta", "0.37", "--axis", "0,0,1", "--cells", "8",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["predicate"], true);
    assert_eq!(v["numeric"], true);
    assert_eq!(v["agreement"], true);
    let witnesses: Vec<String> = v["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w.as_str().unwrap().to_string())
        .collect();
    assert!(witnesses.contains(&"Q1".to_string()));
    assert!(witnesses.contains(&"Q2".to_string()));
}

#[test]
fn check_local_unitary_case() {
    let out = qcar(&["check", "--phi", "0", "--theta", "1.1", "--axis", "1,0,0"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["numeric"], true);
    assert_eq!(v["predicate"], true);
}

#[test]
fn check_generic_axis_fails() {
    let out = qcar(&["check", "--phi", "1.0", "--theta", "0.5", "--axis", "1,0,0"]);
    assert!(out.status.success(), "agreement between false verdicts is fine");
    let v = stdout_json(&out);
    assert_eq!(v["numeric"], false);
    assert_eq!(v["predicate"], false);
}

#[test]
fn check_json_round_trips_bit_identically() {
    let out = qcar(&["check", "--phi", "2/3 pi", "--theta", "0.37"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: qca_renorm::report::CheckReport = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&parsed).unwrap();
    assert_eq!(text.trim_end(), again);
}

#[test]
fn renorm_reports_the_fixed_point() {
    let out = qcar(&[
        "renorm", "--phi", "2/3 pi", "--theta", "2/3 pi", "--axis", "0,0,1", "--proj", "Q2",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["fixed_point"], true);
    assert_eq!(v["result"]["renormalizable"], true);
    let cf = &v["closed_form"];
    assert!(cf["distance"].as_f64().unwrap() < 1e-9);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FIXED-POINT"));
}

#[test]
fn renorm_q1_matches_closed_form_column() {
    let out = qcar(&["renorm", "--phi", "1/3 pi", "--theta", "1/5 pi", "--proj", "Q1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let cf = &v["closed_form"];
    assert_eq!(cf["projection"], "Q1_a");
    // phi' = 2 phi
    let phi_p = cf["fitted_phi_prime"].as_f64().unwrap();
    assert!((phi_p - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-9);
    assert!(cf["distance"].as_f64().unwrap() < 1e-9);
}

#[test]
fn renorm_refuses_non_renormalizable_input() {
    let out = qcar(&["renorm", "--phi", "1.0", "--theta", "0.5", "--axis", "1,0,0"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["renormalizable"], false);
    let residuals = v["per_tile_residuals"].as_array().unwrap();
    assert_eq!(residuals.len(), 6);
    for r in residuals {
        assert!(r[1].as_f64().unwrap() > 1e-2);
    }
}

#[test]
fn renorm_classifies_the_shift() {
    let out = qcar(&["renorm", "--generator", "shift:1", "--proj", "Q1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["result"]["classification"]["Shift"]["offset"], 1);
}

#[test]
fn scan_small_grid_csv() {
    let out = qcar(&[
        "scan", "--phi-steps", "4", "--theta-steps", "4", "--cells", "8", "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "phi,theta,nx,ny,nz,predicate,numeric,witness,max_residual"
    );
    assert_eq!(lines.count(), 48);
    // decimal points, not locale commas, in the numeric fields
    assert!(text.contains("0.785398163397448") || text.contains("1.5707963267948966"));
}

#[test]
fn scan_json_is_deterministic() {
    let args = ["scan", "--phi-steps", "2", "--theta-steps", "2", "--cells", "6"];
    let a = qcar(&args);
    let b = qcar(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flow_trajectory_reaches_fixed_point() {
    let out = qcar(&[
        "flow", "--phi", "2/3 pi", "--theta", "2/3 pi", "--proj", "Q2", "--validate", "4",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["trajectory"]["terminated_by"], "fixed_point");
    assert_eq!(v["trajectory"]["states"].as_array().unwrap().len(), 1);
    let cv = v["cross_validation"].as_array().unwrap();
    assert!(cv[0].as_f64().unwrap() < 1e-8);
}

#[test]
fn flow_sign_doubling_example() {
    let out = qcar(&["flow", "--phi", "1/2 pi", "--theta", "1/7 pi", "--proj", "Q2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let states = v["trajectory"]["states"].as_array().unwrap();
    // pi/2 -> pi -> 0 (local)
    assert!((states[1]["phi"].as_f64().unwrap().abs() - std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(states[2]["case"], "local");
}

#[test]
fn flow_rejects_non_renormalizable_start() {
    let out = qcar(&["flow", "--phi", "1.0", "--theta", "0.5", "--axis", "1,0,0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn flow_fixed_point_search() {
    let out = qcar(&["flow", "--proj", "Q2", "--fixed-points", "24"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["isolated"].as_array().unwrap().len(), 2);
    assert_eq!(v["includes_phi_zero_line"], true);
}

#[test]
fn flow_csv_output() {
    let out = qcar(&[
        "flow", "--phi", "1/2 pi", "--theta", "1/7 pi", "--proj", "Q2", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "step,phi,theta,case,projection");
    assert!(text.lines().count() >= 3);
}

#[test]
fn renorm_json_round_trips_bit_identically() {
    let out = qcar(&["renorm", "--phi", "1/3 pi", "--theta", "1/5 pi", "--proj", "Q2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: qca_renorm::report::RenormReport = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&parsed).unwrap();
    assert_eq!(text.trim_end(), again);
}

#[test]
fn random_probe_flag_reports_probe_residuals() {
    let out = qcar(&[
        "check", "--phi", "1.0", "--theta", "0.5", "--axis", "1,0,0", "--random-probes", "3",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let residuals = v["residuals"].as_array().unwrap();
    assert_eq!(residuals.len(), 9); // 6 enumerated + 3 probes
    assert_eq!(v["numeric"], false);
}

#[test]
fn index_of_generators() {
    let out = qcar(&["index", "--generator", "shift:1", "--cells", "6"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["index"]["value"].as_f64().unwrap(), 2.0);
    assert_eq!(v["index"]["dim_l"], 16);
    assert_eq!(v["margolus_realizable"], false);

    let out = qcar(&["index", "--generator", "identity"]);
    let v = stdout_json(&out);
    assert_eq!(v["index"]["value"].as_f64().unwrap(), 1.0);
    assert_eq!(v["margolus_realizable"], true);

    let out = qcar(&[
        "index", "--generator", "qubit", "--phi", "1.0", "--theta", "0.5", "--axis", "0,0,1",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["index"]["value"].as_f64().unwrap(), 1.0);
}

#[test]
fn generator_from_matrix_file_and_out_flag() {
    let dir = std::env::temp_dir().join("qcar-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let gen_path = dir.join("shift.json");
    let m = qca_renorm::linalg::translation_operator(6, 1);
    std::fs::write(&gen_path, serde_json::to_string(&m).unwrap()).unwrap();
    let out_path = dir.join("index.json");
    let out = qcar(&[
        "index",
        "--generator", &format!("file:{}", gen_path.display()),
        "--cells", "6",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["index"]["value"].as_f64().unwrap(), 2.0);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = std::env::temp_dir().join("qcar-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "phi = 1/2 pi\ntheta = 0.37\naxis = 0,0,1\ncells = 8\n").unwrap();
    let out = qcar(&["check", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["phi"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert_eq!(v["numeric"], true);

    // the explicit flag wins over the file value
    let out = qcar(&["check", "--config", cfg.to_str().unwrap(), "--axis", "1,0,0"]);
    let v = stdout_json(&out);
    assert_eq!(v["numeric"], false);
}

#[test]
fn bad_config_exits_with_two() {
    let out = qcar(&["check", "--phi", "not-an-angle", "--theta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qcar(&["check", "--theta", "0.3"]);
    assert_eq!(out.status.code(), Some(2), "--phi is required");
    let out = qcar(&["index", "--generator", "shift:1", "--cells", "4"]);
    assert_eq!(out.status.code(), Some(2), "lattice below the minimum");
}

#[test]
fn euler_parameter_ingestion() {
    let out = qcar(&["check", "--phi", "0.9", "--euler", "0.3,0.5,0.2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    // generic euler rotation is neither diagonal nor antidiagonal
    assert_eq!(v["predicate"], false);
    assert_eq!(v["numeric"], false);
}

#[test]
fn custom_projector_from_file() {
    let dir = std::env::temp_dir().join("qcar-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("q2.json");
    // Q2 = |01><01| + |10><10| as {re, im} arrays
    let q2 = serde_json::json!({
        "re": [
            [0, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 0]
        ],
        "im": [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    });
    std::fs::write(&path, serde_json::to_string(&q2).unwrap()).unwrap();
    let out = qcar(&[
        "renorm",
        "--phi", "2/3 pi",
        "--theta", "2/3 pi",
        "--proj", &format!("file:{}", path.display()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["renormalizable"], true);
}
