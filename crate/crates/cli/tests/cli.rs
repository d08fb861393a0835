use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_supercrit");

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/run_config.schema.json");
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn run(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(BIN)
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env("SUPERCRIT_THREADS", "1")
        .output()
        .unwrap()
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const DISK: &str = r#"{
  "p": 4,
  "profile": { "shape": { "kind": "ball", "center": [0, 0], "radius": 1 } },
  "solver": { "h": 0.0625 }
}"#;

#[test]
fn certify_ball_fixture_gives_nonexistence() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run("certify", &configs_dir().join("certify_ball.json"), &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cert = read_json(&out.join("certificate.json"));
    assert_eq!(cert["verdict"], "NONEXISTENCE");
    assert_eq!(cert["thresholdExact"], "6");
    assert!(out.join("config.resolved.json").exists());
}

#[test]
fn failed_hypotheses_exit_two_but_keep_the_certificate() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "bell.json",
        r#"{
  "p": 6,
  "profile": { "shape": { "kind": "dumbbell", "dimension": 3, "first_center": 2, "second_center": 6,
                          "radius": 1, "neck_half_width": 0.1 } },
  "certify": { "kind": "doubly_starshaped", "multiplicities": [1], "ambient": 4, "t0": 1, "t1": 7 }
}"#,
    );
    let out = tmp.path().join("out");
    let o = run("certify", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let cert = read_json(&out.join("certificate.json"));
    assert_eq!(cert["verdict"], "INCONCLUSIVE");
    assert!(!cert["failedChecks"].as_array().unwrap().is_empty());
}

#[test]
fn disk_solve_writes_consistent_json_csv_and_pgm() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "disk.json", DISK);
    let out = tmp.path().join("out");
    let o = run("solve", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["summary"]["converged"], true);
    let inside = report["insideNodes"].as_u64().unwrap() as usize;

    let csv = fs::read_to_string(out.join("field.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x0,x1,value"));
    let values: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), inside);

    let pgm = fs::read_to_string(out.join("field.pgm")).unwrap();
    let note = pgm.lines().nth(1).unwrap();
    let (min, max) = note
        .strip_prefix("# min=")
        .and_then(|r| r.split_once(" max="))
        .map(|(a, b)| (a.parse::<f64>().unwrap(), b.parse::<f64>().unwrap()))
        .unwrap();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!((min, max), (lo, hi));
    assert_eq!(report["fieldMax"].as_f64().unwrap(), hi);
}

#[test]
fn empty_config_exits_two_without_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "empty.json", "");
    let out = tmp.path().join("out");
    let o = run("solve", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty"));
    assert!(!out.exists());
}

#[test]
fn unknown_key_is_reported_with_its_line() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "typo.json", "{\n  \"p\": 4,\n  \"solver\": { \"hh\": 0.1 }\n}\n");
    let out = tmp.path().join("out");
    let o = run("solve", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("typo.json:3:"), "{msg}");
    assert!(msg.contains("unknown field `hh`"), "{msg}");
    assert!(!out.exists());
}

#[test]
fn hypothesis_errors_exit_two_without_artifacts() {
    let tmp = TempDir::new().unwrap();
    // p = 6 is the critical exponent of a 3-D ball.
    let cfg = write_config(
        &tmp,
        "crit.json",
        r#"{ "p": 6, "profile": { "shape": { "kind": "ball", "center": [0, 0, 0], "radius": 1 } }, "solver": { "h": 0.25 } }"#,
    );
    let out = tmp.path().join("out");
    let o = run("solve", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("hypothesis"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unconverged_solve_exits_three_with_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "disk.json",
        &DISK.replace("\"h\": 0.0625", "\"h\": 0.0625, \"max_iterations\": 1"),
    );
    let out = tmp.path().join("out");
    let o = run("solve", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(read_json(&out.join("report.json"))["summary"]["converged"], false);
    assert!(out.join("field.csv").exists());
}

#[test]
fn unwritable_output_exits_two() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "disk.json", DISK);
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = run("solve", &cfg, &blocker.join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("i/o"), "{}", stderr(&o));
}

fn artifact_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "config.resolved.json")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn same_seed_gives_identical_bytes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "disk.json", DISK);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(run("solve", &cfg, out, &["--seed", "7"]).status.code(), Some(0));
    }
    let (fa, fb) = (artifact_bytes(&a), artifact_bytes(&b));
    assert_eq!(fa.len(), 3);
    assert_eq!(fa, fb);
}

#[test]
fn rerun_from_the_echo_reproduces_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "disk.json", DISK);
    let first = tmp.path().join("first");
    assert_eq!(
        run("solve", &cfg, &first, &["--seed", "3", "--h", "0.05"])
            .status
            .code(),
        Some(0)
    );
    let echo = first.join("config.resolved.json");
    let resolved = read_json(&echo);
    assert_eq!(resolved["seed"], 3);
    assert_eq!(resolved["solver"]["h"], 0.05);
    assert_eq!(resolved["solver"]["max_iterations"], 500);

    let second = tmp.path().join("second");
    let o = run("solve", &echo, &second, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(artifact_bytes(&first), artifact_bytes(&second));
}

#[test]
fn flags_override_file_values() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "shoot.json",
        r#"{ "p": 3, "oracle": { "kind": "shooting", "dimension": 2 } }"#,
    );
    let out = tmp.path().join("out");
    assert_eq!(run("oracle", &cfg, &out, &["--p", "4"]).status.code(), Some(0));
    let oracle = read_json(&out.join("oracle.json"));
    assert_eq!(oracle["p"], 4.0);
    let rows = fs::read_to_string(out.join("radial_profile.csv"))
        .unwrap()
        .lines()
        .count();
    assert!(rows > 10);
}

#[test]
fn command_mismatch_and_bad_thread_count_exit_two() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "c.json", r#"{ "command": "certify" }"#);
    let out = tmp.path().join("out");
    assert_eq!(run("solve", &cfg, &out, &[]).status.code(), Some(2));
    let o = Command::new(BIN)
        .args(["oracle", "--config"])
        .arg(&cfg)
        .env("SUPERCRIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn algebra_verification_passes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "alg.json",
        r#"{ "algebra": { "samples": 500, "morphism_points": 20 } }"#,
    );
    let out = tmp.path().join("out");
    let o = run("verify-algebra", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_json(&out.join("algebra.json"));
    assert_eq!(report["pass"], true);
    assert_eq!(report["calibration"]["constant"], 4.0);
    assert_eq!(report["algebras"].as_array().unwrap().len(), 4);
}

#[test]
fn ball_product_writes_the_constructed_profile() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run("certify", &configs_dir().join("certify_ball_product.json"), &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let built = read_json(&out.join("constructed_profile.json"));
    let rho = built["rho"].as_f64().unwrap();
    assert!(rho > 0.0 && rho < 3.0);
    assert_eq!(built["profile"]["kind"], "ball");
}

#[test]
fn sample_configs_and_echoes_validate_against_the_schema() {
    let schema = schema();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let mut seen = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = read_json(&path);
        let errors: Vec<String> = validator.iter_errors(&cfg).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{}: {errors:?}", path.display());
        seen += 1;
    }
    assert!(seen >= 5);

    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    assert_eq!(
        run("certify", &configs_dir().join("certify_ball.json"), &out, &[])
            .status
            .code(),
        Some(0)
    );
    let echo = read_json(&out.join("config.resolved.json"));
    assert!(
        validator.is_valid(&echo),
        "{:?}",
        validator.iter_errors(&echo).map(|e| e.to_string()).collect::<Vec<_>>()
    );

    let typo: Value = serde_json::from_str(r#"{ "solver": { "hh": 1 } }"#).unwrap();
    assert!(!validator.is_valid(&typo));
}

#[test]
fn schema_lists_exactly_the_config_sections() {
    let schema = schema();
    let mut keys: Vec<&str> = schema["properties"]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    keys.sort_unstable();
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    assert_eq!(
        run("certify", &configs_dir().join("certify_ball.json"), &out, &[])
            .status
            .code(),
        Some(0)
    );
    let echo = read_json(&out.join("config.resolved.json"));
    let mut fields: Vec<&str> = echo.as_object().unwrap().keys().map(String::as_str).collect();
    fields.sort_unstable();
    assert_eq!(keys, fields);
}
