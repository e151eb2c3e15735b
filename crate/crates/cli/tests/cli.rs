use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn apqr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apqr")).args(args).output().unwrap()
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Compares stdout with a golden file; `APQR_REGEN_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str]) {
    let out = apqr(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let path = golden_dir().join(name);
    if std::env::var_os("APQR_REGEN_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, &out.stdout).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected, "{name}");
}

#[test]
fn golden_encode() {
    golden("encode_d.json", &["encode"]);
    golden("encode_zero.csv", &["encode", "--theta", "0", "--format", "csv"]);
}

#[test]
fn golden_syndrome_scan() {
    golden("syndrome_bit_flip.csv", &["syndrome-scan", "--format", "csv"]);
    golden("syndrome_phase_flip.json", &["syndrome-scan", "--channel", "phase-flip", "--p", "1"]);
}

#[test]
fn golden_loss_readout() {
    golden("loss_readout_6.csv", &["loss-readout", "--loss", "6", "--format", "csv"]);
}

#[test]
fn golden_connections() {
    golden("connect_1.csv", &["connect", "--lost", "1", "--format", "csv"]);
    golden("rgs_loss_2.csv", &["rgs-loss", "--lost", "2", "--format", "csv"]);
}

#[test]
fn golden_rate() {
    golden("rate.csv", &["rate", "--n-max", "4", "--m-max", "3", "--format", "csv"]);
    golden("rate.json", &["rate", "--n-max", "3", "--m-max", "2", "--shots", "10000", "--seed", "5"]);
}

#[test]
fn golden_photonics() {
    golden("photonics_rate.json", &["photonics-rate", "--shots", "100000", "--seed", "7"]);
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = apqr(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn encode_reports_codeword() {
    let v = json(&["encode", "--theta", "1.5707963267948966", "--phi", "0"]);
    assert_eq!(v["schema_version"], 1);
    let bits: Vec<&str> = v["nonzeros"].as_array().unwrap().iter().map(|e| e["bits"].as_str().unwrap()).collect();
    assert_eq!(bits, ["000000000", "000111111", "111000111", "111111000"]);
    for s in v["stabilizers"].as_array().unwrap() {
        assert!((s["expectation"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
    let zero = json(&["encode", "--theta", "0"]);
    assert_eq!(zero["nonzeros"].as_array().unwrap().len(), 8);
}

#[test]
fn syndrome_scan_follows_linear_response() {
    let v = json(&["syndrome-scan", "--channel", "bit-flip", "--qubit", "4"]);
    assert_eq!(v["probes"], serde_json::json!(["S_Z^3"]));
    for row in v["rows"].as_array().unwrap() {
        let p = row["p"].as_f64().unwrap();
        assert!((row["expectations"][2].as_f64().unwrap() - (1.0 - 2.0 * p)).abs() < 1e-10);
    }
}

#[test]
fn noisy_runs_degrade() {
    let v = json(&["rgs-loss", "--lost", "2", "--noise", "0.7"]);
    let f = v["mean"]["F"].as_f64().unwrap();
    assert!(f > 0.5 && f < 1.0, "{f}");
    let v = json(&["loss-readout", "--loss", "4,6", "--noise", "0.7", "--theta", "1.5707963267948966", "--phi", "3.141592653589793"]);
    assert!(v["mean_fidelity"].as_f64().unwrap() < 1.0);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| apqr(args).status.code().unwrap();
    assert_eq!(code(&["loss-readout", "--loss", "1"]), 3);
    assert_eq!(code(&["loss-readout", "--loss", "4,5,6"]), 3);
    assert_eq!(code(&["connect", "--lost", "3"]), 3);
    assert_eq!(code(&["rgs-loss", "--lost", "3"]), 3);
    assert_eq!(code(&["rgs-loss", "--lost", "4"]), 2);
    assert_eq!(code(&["rate", "--eta", "1.5"]), 2);
    assert_eq!(code(&["rate", "--n-max", "0"]), 2);
    assert_eq!(code(&["rate", "--noise", "0.7"]), 2);
    assert_eq!(code(&["loss-readout", "--loss", "10"]), 2);
    assert_eq!(code(&["connect", "--shots", "10"]), 2);
    assert_eq!(code(&["photonics-rate"]), 2);
    assert_eq!(code(&["syndrome-scan", "--p", "1.2"]), 2);
    assert_eq!(code(&["--bogus"]), 2);
    assert_eq!(code(&[]), 2);
    let err = apqr(&["connect", "--lost", "3"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("loss tolerance violated"));
    let err = apqr(&["loss-readout", "--loss", "1"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("output qubit lost"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "rate", "eta": 0.8, "q": 0.5, "n_max": 2, "m_max": 2}"#).unwrap();
    let from_file = json(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(from_file["eta"], 0.8);
    let overridden = json(&["--config", cfg.to_str().unwrap(), "rate", "--eta", "0.6"]);
    assert_eq!(overridden["eta"], 0.6);
    assert_eq!(overridden["n_max"], 2);

    std::fs::write(&cfg, r#"{"command": "rate", "etta": 0.8}"#).unwrap();
    assert_eq!(apqr(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_out_writes_optimum_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = apqr(&["rate", "--format", "csv", "--out", out.to_str().unwrap(), "--n-max", "3", "--m-max", "3"]);
    assert!(status.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# apqr rate v1\neta,q,n,m,p_side,p_connect,efficiency\n"));
    assert_eq!(text.lines().count(), 2 + 9);
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.optimum.json")).unwrap()).unwrap();
    assert_eq!(side["schema_version"], 1);
    assert!(side["optimum"]["n"].is_u64());
}

#[test]
fn rate_rows_square_side_probability() {
    let v = json(&["rate", "--n-max", "3", "--m-max", "3"]);
    for r in v["sweep"].as_array().unwrap() {
        let s = r["p_side"].as_f64().unwrap();
        assert_eq!(r["p_connect"].as_f64().unwrap(), s * s);
    }
}

#[test]
fn sampled_connection_keeps_ideal_branches() {
    let v = json(&["connect", "--lost", "2", "--shots", "500", "--seed", "9"]);
    let counts: u64 = v["branches"].as_array().unwrap().iter().map(|b| b["count"].as_u64().unwrap()).sum();
    assert_eq!(counts, 500);
    assert!((v["mean"]["W"].as_f64().unwrap() + 0.5).abs() < 1e-10);
}
