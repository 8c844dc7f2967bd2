use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn logpot(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logpot"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("LOGPOT_OUT")
        .output()
        .expect("binary runs")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn file_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .map(|it| it.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect())
        .unwrap_or_default();
    names.sort();
    names
}

#[test]
fn rejects_weak_field() {
    let dir = TempDir::new().unwrap();
    let out = logpot(&["spectrum", "--nu", "0.4", "--m", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("2ν>1 violated"));
    assert!(file_names(dir.path()).is_empty());
}

#[test]
fn rejects_level_above_bound() {
    let dir = TempDir::new().unwrap();
    let out = logpot(&["spectrum", "--nu", "2", "--m", "3"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("m ≤ ⌊ν−1/2⌋ violated"));
}

#[test]
fn rejects_unknown_flag_and_bad_resolution() {
    let dir = TempDir::new().unwrap();
    assert_eq!(logpot(&["spectrum", "--kmin", "3"], dir.path()).status.code(), Some(1));
    assert_eq!(logpot(&["spectrum", "--n-angular", "7"], dir.path()).status.code(), Some(1));
    assert_eq!(logpot(&["spectrum", "--format", "xml"], dir.path()).status.code(), Some(1));
    assert!(file_names(dir.path()).is_empty());
}

#[test]
fn spectrum_csv_with_invalid_rows_exits_two() {
    let dir = TempDir::new().unwrap();
    let out = logpot(&["spectrum", "--nu", "2", "--m", "1", "--kmax", "6", "--n-radial", "32", "--n-angular", "64"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,lambda_oracle,lambda_closed,flag,rel_residual");
    assert_eq!(lines.len(), 8);
    for (k, line) in lines[1..].iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[0], k.to_string());
        let oracle: f64 = fields[1].parse().unwrap();
        assert!(oracle > 0.0);
        let mantissa = fields[1].split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    }
    assert!(!dir.path().join("spectrum_fit.csv").exists());
}

#[test]
fn spectrum_with_fit_block() {
    let dir = TempDir::new().unwrap();
    let out = logpot(&["spectrum", "--kmax", "55", "--n-radial", "32", "--n-angular", "64", "--format", "json"], dir.path());
    assert_ne!(out.status.code(), Some(1), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 56);
    assert_eq!(json["fit"]["k_range"], serde_json::json!([50, 55]));
    assert!(json["fit"]["slope"].as_f64().unwrap() < 0.0);
    assert_eq!(json["params"]["m"], 0);
}

#[test]
fn verify_default_parameters_pass() {
    let dir = TempDir::new().unwrap();
    let out = logpot(&["verify", "--kmax", "6"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["all_pass"], true);
    let ledger = fs::read_to_string(dir.path().join("reconciliation.txt")).unwrap();
    assert_eq!(report["reconciliation_ledger"].as_str().unwrap(), ledger);
    assert!(ledger.contains("diagonal.status = VALID"));
    assert!(ledger.contains("diagonal.as_printed.verdict = mismatch"));
    let names: Vec<&str> = report["properties"].as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    for expected in ["richardson_certification", "basis_gram", "rotation_commutation", "image_orthogonality", "closed_form_vs_oracle", "eigen_residual"] {
        assert!(names.contains(&expected), "{expected}");
    }
}

#[test]
fn verify_reports_underresolved_rule() {
    let dir = TempDir::new().unwrap();
    let out = logpot(&["verify", "--kmax", "4", "--n-radial", "2", "--n-angular", "16"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    let richardson = report["properties"].as_array().unwrap().iter().find(|p| p["name"] == "richardson_certification").unwrap();
    assert_eq!(richardson["pass"], false);
    assert!(stderr(&out).contains("richardson_certification"));
}

#[test]
fn action_profile_matches_oracle() {
    let dir = TempDir::new().unwrap();
    let out = logpot(&["action", "--nu", "2", "--m", "1", "--k", "3", "--samples", "5"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("action.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "rho,closed,oracle,rel_diff");
    assert_eq!(lines.len(), 6);
    for line in &lines[1..] {
        let rel: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(rel < 1e-6);
    }
}

#[test]
fn action_json_reports_boundary_exponent() {
    let dir = TempDir::new().unwrap();
    let out = logpot(&["action", "--nu", "2", "--m", "1", "--format", "json", "--samples", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("action.json")).unwrap()).unwrap();
    assert_eq!(json["k"], 1);
    assert_eq!(json["branch"], "diagonal");
    assert!((json["boundary_exponent"].as_f64().unwrap() - 3.0).abs() < 0.05);
}

#[test]
fn runs_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["spectrum", "--nu", "3.5", "--m", "2", "--kmax", "8", "--n-radial", "32", "--n-angular", "64", "--format", "json"];
    logpot(&args, a.path());
    logpot(&args, b.path());
    assert_eq!(fs::read(a.path().join("spectrum.json")).unwrap(), fs::read(b.path().join("spectrum.json")).unwrap());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(&config, "# parameters\nnu = 2\nm = 1\nkmax = 2\nn_radial = 32\nn_angular = 64\nformat = json\n").unwrap();
    let out = logpot(&["spectrum", "--config", config.to_str().unwrap(), "--kmax", "3"], dir.path());
    assert_ne!(out.status.code(), Some(1), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 4);
    assert_eq!(json["params"]["m"], 1);

    fs::write(&config, "nu = 2\ncolour = blue\n").unwrap();
    let bad = logpot(&["spectrum", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("unknown key"));
}

#[test]
fn output_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_logpot"))
        .args(["action", "--samples", "2"])
        .env("LOGPOT_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(dir.path().join("action.csv").exists());
}
