use std::process::{Command, Output};

fn harvestctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harvestctl"))
        .args(args)
        .env_remove("HARVESTLAB_CACHE_DIR")
        .output()
        .expect("spawn harvestctl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn preset_prints_scenario_and_sweep() {
    let o = harvestctl(&["preset", "fig7"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["scenario"]["coupling"].as_f64().unwrap() > 0.0);
    assert!(v["sweep"]["grid"].as_array().unwrap().len() > 10);
}

#[test]
fn sweep_writes_csv_to_out() {
    let dir = std::env::temp_dir().join(format!("harvestctl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec_path = dir.join("spec.json");
    let out_path = dir.join("fig2.csv");
    let o = harvestctl(&["preset", "fig2"]);
    let mut v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let spec = &mut v["sweep"];
    spec["grid"] = serde_json::json!([0.0, 4.0, 8.0]);
    std::fs::write(&spec_path, spec.to_string()).unwrap();
    let o = harvestctl(&["sweep", spec_path.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(stdout(&o).is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn accept_suite_passes() {
    let o = harvestctl(&["accept", "orthogonal-fig2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.starts_with("PASS  5 orthogonal-fig2"), "{text}");
    assert!(text.ends_with("1/1 criteria passed\n"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let o = harvestctl(&["accept", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn injected_gamma_fault_is_caught() {
    let o = harvestctl(&["accept", "non-selective-identity", "--inject-fault", "flip-gamma"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = harvestctl(&["accept", "non-orthogonal", "--inject-fault", "flip-gamma"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("FAIL  4 non-orthogonal"));
}
