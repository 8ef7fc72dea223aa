use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn relamp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relamp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn default_causality_reproduces_the_reference_row() {
    let tmp = TempDir::new().unwrap();
    let o = relamp(&["causality", "--tau", "5", "--rho-max", "10", "--step", "0.1", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(tmp.path().join("out/causality.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("rho,C"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 100);
    let c55 = rows.iter().find(|(r, _)| *r == 5.0).expect("row at rho = 5").1;
    assert!((c55 - 0.996958).abs() < 2e-4, "{c55}");
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("C(5, 5) = 0.99695") && stdout.contains("min C"), "{stdout}");

    let m = manifest(&tmp.path().join("out"));
    assert_eq!(m["status"], "passed");
    assert_eq!(m["command"], "causality");
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    let names: Vec<&str> = m["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"reference_C(5, 5)") && names.contains(&"unitarity"), "{names:?}");
}

#[test]
fn superluminal_velocity_exits_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "boost.json",
        r#"{"particle": {"m0": 1.0},
            "carrier": {"gaussian": {"packet": {"p_bar": [0, 0, 0], "sigma_p": 0.3}}},
            "transformations": [{"boost": {"beta": [1.2, 0, 0]}}]}"#,
    );
    let o = relamp(&["transform", "--config", &cfg, "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("transformations[0].boost.beta") && err.contains("velocity bound"), "{err}");
    assert_eq!(manifest(&tmp.path().join("out"))["status"], "invalid_input");

    let cfg = write(tmp.path(), "bp.json", r#"{"average_event": {"beta0": [0, 1.2, 0]}}"#);
    let o = relamp(&["boost-position", "--config", &cfg, "--out", "out2"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("average_event.beta0"));
}

#[test]
fn empty_transformation_list_is_the_identity() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "id.json",
        r#"{"particle": {"m0": 1.0, "two_s": 1},
            "carrier": {"gaussian": {
                "packet": {"p_bar": [0.2, 0, 0.1], "sigma_p": 0.3, "weights": [[0.6, 0], [0, 0.8]]}}},
            "transformations": []}"#,
    );
    let o = relamp(&["transform", "--config", &cfg, "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(tmp.path().join("out/transform.csv")).unwrap();
    let mut n = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        assert_eq!(&rec[4], &rec[6]);
        assert_eq!(&rec[5], &rec[7]);
        n += 1;
    }
    assert_eq!(n, 82);
}

#[test]
fn unknown_keys_are_rejected_with_their_path() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"tau": 5, "reference": {"tau": 5, "rho": 5, "value": 1, "tol": 1}}"#);
    let o = relamp(&["causality", "--config", &cfg, "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("reference.tol") && err.contains("unknown field"), "{err}");
}

#[test]
fn failing_check_exits_1_and_is_named() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"reference": {"tau": 5, "rho": 5, "value": 0.99, "tolerance": 1e-4}}"#);
    let o = relamp(&["causality", "--config", &cfg, "--rho-max", "1", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("reference_C(5, 5)"));
    // --tol-scale loosens it
    let o = relamp(&["causality", "--config", &cfg, "--rho-max", "1", "--tol-scale", "100", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn serial_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "nw.json",
        r#"{"random": {"count": 2, "seed": 3, "p_range": 0.5, "x_range": 1.0, "sigma_min": 0.2, "sigma_max": 0.4}}"#,
    );
    for out in ["a", "b"] {
        let o = relamp(&["nw-check", "--config", &cfg, "--serial", "--out", out], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let o = relamp(&["causality", "--both-paths", "--rho-max", "3", "--serial", "--out", out], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["nw_identity.csv", "hermiticity.csv", "causality.csv", "wavefunction.csv"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn dirac_and_boost_position_defaults_pass() {
    let tmp = TempDir::new().unwrap();
    for cmd in ["dirac", "boost-position"] {
        let o = relamp(&[cmd, "--out", cmd], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stderr(&o));
        let m = manifest(&tmp.path().join(cmd));
        assert!(m["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
        assert!(!m["outputs"].as_array().unwrap().is_empty());
    }
}

#[test]
fn shipped_configs_run_clean() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = TempDir::new().unwrap();
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
        let cmd = match stem.split('_').next().unwrap() {
            "transform" => "transform",
            "causality" => "causality",
            "nw" => "nw-check",
            "boost" => "boost-position",
            "dirac" => "dirac",
            other => panic!("no command for {other}"),
        };
        let o = relamp(&[cmd, "--config", path.to_str().unwrap(), "--out", &stem], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{stem}: {}", stderr(&o));
        seen += 1;
    }
    assert_eq!(seen, 6);
}
