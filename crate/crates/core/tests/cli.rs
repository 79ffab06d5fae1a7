use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_modloc-lab");

const THERMAL_MAP: &str = r#"
experiment = "thermal-map"

[params]
betas = [1.0, 6.283185307179586]
interval = [-1.0, 2.0]
grid_points = 40
"#;

const ENTROPY_ILL_CONDITIONED: &str = r#"
experiment = "entropy-scan"

[params]
n_sites = 400
ir_product = 1e-3
vacuum_lengths = [8, 16, 32, 64]
thermal_beta = 20.0
thermal_lengths = [40, 80, 120, 160]
purity_sites = [64]
purity_mass = 1.0
"#;

fn modloc(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("MODLOC_OUT");
    if let Some(dir) = env_out {
        cmd.env("MODLOC_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn passing_run_exits_zero_and_writes_manifest() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "tm.toml", THERMAL_MAP);
    let out = tmp.path().join("run");
    let o = modloc(&["thermal-map", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let m = manifest(&out);
    assert_eq!(m["experiment"], "thermal-map");
    assert_eq!(m["exit_code"], 0);
    let records = m["records"].as_array().unwrap();
    let iso = records.iter().find(|r| r["name"] == "isomorphism[beta=6.283185307179586]").unwrap();
    assert_eq!(iso["verdict"], "pass");
    assert!(iso["measured"].as_f64().unwrap() < 1e-10);
    assert!(records.iter().any(|r| r["verdict"] == "unverified-by-design"));

    for f in m["files"].as_array().unwrap() {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap(), bytes.len() as u64);
        assert_eq!(f["sha256"].as_str().unwrap().len(), 64);
    }
    assert!(out.join("thermal-map_kernel.csv").exists());
    assert!(out.join("thermal-map_kernel_vs_separation.dat").exists());
}

#[test]
fn json_config_is_accepted() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "tm.json",
        r#"{"experiment": "thermal-map", "params": {"betas": [1.0], "interval": [-1.0, 2.0], "grid_points": 20}}"#,
    );
    let out = tmp.path().join("run");
    let o = modloc(&["thermal-map", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn failed_check_exits_one() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "tm.toml", &format!("{THERMAL_MAP}\n[tolerances]\nisomorphism = 1e-30\n"));
    let out = tmp.path().join("run");
    let o = modloc(&["thermal-map", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 1);
    let m = manifest(&out);
    assert_eq!(m["exit_code"], 1);
    assert!(m["records"].as_array().unwrap().iter().any(|r| r["verdict"] == "fail"));
}

#[test]
fn empty_parameter_block_exits_two_with_field_message() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "u.toml", "experiment = \"unruh\"\n[params]\n");
    let out = tmp.path().join("run");
    let o = modloc(&["unruh", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("missing field `accelerations`"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn config_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let unknown_key = write_config(&tmp, "k.toml", &format!("{THERMAL_MAP}\ncolour = 3\n"));
    let out_of_range = write_config(&tmp, "r.toml", &THERMAL_MAP.replace("grid_points = 40", "grid_points = 1"));
    let mismatch = write_config(&tmp, "m.toml", THERMAL_MAP);
    let cases: Vec<Vec<&str>> = vec![
        vec!["no-such-experiment", "--config", unknown_key.to_str().unwrap()],
        vec!["thermal-map"],
        vec!["thermal-map", "--config", "/nonexistent/config.toml"],
        vec!["thermal-map", "--config", unknown_key.to_str().unwrap()],
        vec!["thermal-map", "--config", out_of_range.to_str().unwrap()],
        vec!["unruh", "--config", mismatch.to_str().unwrap()],
        vec!["thermal-map", "--config", mismatch.to_str().unwrap(), "--parallel", "0"],
    ];
    for args in cases {
        let mut full = args.clone();
        let out = tmp.path().join("never");
        full.extend(["--out", out.to_str().unwrap()]);
        let o = modloc(&full, None);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(!out.exists(), "{args:?}");
    }
}

#[test]
fn numeric_error_exits_three_with_diagnostic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "e.toml", ENTROPY_ILL_CONDITIONED);
    let out = tmp.path().join("run");
    let o = modloc(&["entropy-scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 3);
    let m = manifest(&out);
    assert_eq!(m["exit_code"], 3);
    let diag = m["diagnostics"][0].as_str().unwrap();
    assert!(diag.contains("uncertainty bound"), "{diag}");
}

#[test]
fn output_directory_precedence() {
    let tmp = TempDir::new().unwrap();
    let configured = tmp.path().join("configured");
    let text = format!("output_dir = {:?}\n{THERMAL_MAP}", configured.to_str().unwrap());
    let cfg = write_config(&tmp, "tm.toml", &text);
    let cfg = cfg.to_str().unwrap();

    assert_eq!(code(&modloc(&["thermal-map", "--config", cfg], None)), 0);
    assert!(configured.join("manifest.json").exists());

    let env_dir = tmp.path().join("from-env");
    assert_eq!(code(&modloc(&["thermal-map", "--config", cfg], Some(&env_dir))), 0);
    assert!(env_dir.join("manifest.json").exists());

    let cli_dir = tmp.path().join("from-cli");
    assert_eq!(code(&modloc(&["thermal-map", "--config", cfg, "--out", cli_dir.to_str().unwrap()], Some(&env_dir))), 0);
    assert!(cli_dir.join("manifest.json").exists());
}

#[test]
fn identical_configs_give_identical_csv_bytes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "tm.toml", THERMAL_MAP);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = modloc(&["thermal-map", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()], None);
        assert_eq!(code(&o), 0);
    }
    let (ma, mb) = (manifest(&a), manifest(&b));
    assert_eq!(ma["files"], mb["files"]);
    for f in ma["files"].as_array().unwrap() {
        let name = f["path"].as_str().unwrap();
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn plots_regenerate_from_run_directory() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "tm.toml", THERMAL_MAP);
    let out = tmp.path().join("run");
    assert_eq!(code(&modloc(&["thermal-map", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None)), 0);
    let dat = out.join("thermal-map_defect_vs_separation.dat");
    let original = fs::read(&dat).unwrap();
    fs::remove_file(&dat).unwrap();

    let o = modloc(&["plots", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read(&dat).unwrap(), original);
    assert!(String::from_utf8_lossy(&original).starts_with("# separation rel_err\n"));

    fs::remove_file(out.join("thermal-map_kernel.csv")).unwrap();
    assert_eq!(code(&modloc(&["plots", out.to_str().unwrap()], None)), 3);
    assert_eq!(code(&modloc(&["plots", tmp.path().to_str().unwrap()], None)), 3);
}

#[test]
fn verify_all_filter_and_aggregate_manifest() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("all");
    let o = modloc(
        &["verify-all", "--only", "thermal-map", "--only", "zf-algebra", "--parallel", "2", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = manifest(&out);
    let ran: Vec<&str> = m["experiments"].as_array().unwrap().iter().map(|e| e["experiment"].as_str().unwrap()).collect();
    assert_eq!(ran, ["thermal-map", "zf-algebra"]);
    assert!(out.join("zf-algebra").join("zf-algebra_phase_vs_theta.dat").exists());
    assert!(!out.join("unruh").exists());

    let single = write_config(&tmp, "tm.toml", THERMAL_MAP);
    let o = modloc(&["verify-all", "--config", single.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
}
