use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn simulate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simulate")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, json: &serde_json::Value) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(json).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn two_kicks(experiment: &str) -> serde_json::Value {
    serde_json::json!({
        "experiment": experiment,
        "system": { "kind": "model_qubit", "delta_e": 1.0 },
        "series": [{
            "label": "pair",
            "pulses": [
                { "shape": "gaussian", "axis": "x", "alpha": 0.3, "center": 1.0, "width": 0.01 },
                { "shape": "gaussian", "axis": "y", "alpha": 0.2, "center": 2.0, "width": 0.01 }
            ]
        }],
        "t_end": 3.0,
        "samples": 20
    })
}

#[test]
fn builtin_figure_writes_datasets_and_prints_finals() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(&["figure1", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2, "{text}");
    assert!(text.contains("alpha1_first") && text.contains("alpha2_first"));
    for name in ["figure1_alpha1_first.csv", "figure1_alpha2_first.csv", "figure1.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("figure1.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "figure1");
    assert_eq!(report["series"].as_array().unwrap().len(), 2);
}

#[test]
fn custom_config_with_dt_override_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "custom.json", &two_kicks("custom"));
    let out_dir = dir.path().join("out");
    let out = simulate(&["custom", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--dt", "0.0004"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("custom_pair.csv")).unwrap();
    let echo = csv.lines().find_map(|l| l.strip_prefix("# config: ")).unwrap();
    let echoed: serde_json::Value = serde_json::from_str(echo).unwrap();
    assert_eq!(echoed["dt"], 0.0004);
    assert!(csv.lines().any(|l| l == "t,P1,P2,norm"));
}

#[test]
fn rerunning_an_echoed_config_reproduces_the_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "custom.json", &two_kicks("custom"));
    let first = dir.path().join("a");
    assert!(simulate(&["custom", "--config", &cfg, "--out", first.to_str().unwrap()]).status.success());

    let csv = fs::read_to_string(first.join("custom_pair.csv")).unwrap();
    let echo = csv.lines().find_map(|l| l.strip_prefix("# config: ")).unwrap();
    let echoed = dir.path().join("echo.json");
    fs::write(&echoed, echo).unwrap();
    let second = dir.path().join("b");
    let out = simulate(&["custom", "--config", echoed.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(out.status.success());
    for name in ["custom_pair.csv", "custom.json"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn config_errors_exit_with_2_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out_dir = out_dir.to_str().unwrap();

    let mut bad = two_kicks("custom");
    bad["series"][0]["pulses"][1]["width"] = serde_json::json!(-1.0);
    let cfg = write_config(dir.path(), "bad.json", &bad);
    let out = simulate(&["custom", "--config", &cfg, "--out", out_dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("series[0].pulses[1]"));

    let mut unknown = two_kicks("custom");
    unknown["series"][0]["pulses"][0]["axis"] = serde_json::json!("w");
    let cfg = write_config(dir.path(), "axis.json", &unknown);
    let out = simulate(&["custom", "--config", &cfg, "--out", out_dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("series[0].pulses[0].axis"));

    let cfg = write_config(dir.path(), "mismatch.json", &two_kicks("figure1"));
    assert_eq!(simulate(&["custom", "--config", &cfg, "--out", out_dir]).status.code(), Some(2));

    assert_eq!(simulate(&["figure9", "--out", out_dir]).status.code(), Some(2));
    assert_eq!(simulate(&["custom", "--out", out_dir]).status.code(), Some(2));
    assert_eq!(simulate(&["figure1", "--out", out_dir, "--convention", "two_pi"]).status.code(), Some(2));
    assert_eq!(simulate(&["figure1", "--out", out_dir, "--dt", "-1"]).status.code(), Some(2));
}

#[test]
fn divergence_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut huge = two_kicks("custom");
    huge["series"][0]["pulses"][0]["alpha"] = serde_json::json!(1e300);
    let cfg = write_config(dir.path(), "huge.json", &huge);
    let out = simulate(&["custom", "--config", &cfg, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn surface_and_convergence_modes() {
    let dir = tempfile::tempdir().unwrap();
    let surface = serde_json::json!({
        "experiment": "figure7",
        "system": { "kind": "model_qubit", "delta_e": 1.0 },
        "surface": { "epsilon_points": 4, "phi_points": 6 }
    });
    let cfg = write_config(dir.path(), "surface.json", &surface);
    let out = simulate(&["figure7", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("24 surface points"));
    let csv = fs::read_to_string(dir.path().join("figure7_surface.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "epsilon,phi,p2,p2_no_ordering,diff"));

    let out = simulate(&["convergence", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let slope: f64 = stdout(&out)
        .lines()
        .find_map(|l| l.strip_prefix("slope "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope - 1.0).abs() < 0.2, "slope {slope}");
}

#[test]
fn hydrogen_convention_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(&["figure5", "--out", dir.path().to_str().unwrap(), "--convention", "two_pi", "--dt", "0.05"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "csv"))
        .unwrap();
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.lines().any(|l| l == "# convention: two_pi"));
    assert!(text.lines().any(|l| l == "t,P1,P2,P3,P_target,norm"));
}

#[test]
fn shipped_configs_run() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(&configs).unwrap() {
        let path = entry.unwrap().path();
        let id = path.file_stem().unwrap().to_str().unwrap().to_string();
        let out = simulate(&[&id, "--config", path.to_str().unwrap(), "--out", dir.path().join(&id).to_str().unwrap()]);
        assert!(out.status.success(), "{id}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
