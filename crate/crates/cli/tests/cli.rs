use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn qew(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qew"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("QEW_TOL")
        .output()
        .expect("qew runs")
}

fn run(file: &str, out: &Path) -> Output {
    qew(&["run", scenario(file).to_str().unwrap()], out)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn shoot_is_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let o = run("bryant.toml", dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for file in ["bryant.report.txt", "bryant.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{file} differs between runs");
    }
}

#[test]
fn stdout_matches_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = qew(&["run", scenario("hyperbolic_warped.toml").to_str().unwrap(), "--format", "jsonl"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file = std::fs::read(dir.path().join("hyperbolic-warped.report.jsonl")).unwrap();
    assert_eq!(o.stdout, file);
    for line in String::from_utf8(file).unwrap().lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
}

#[test]
fn zero_weight_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("zero_weight.toml", dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("qew: exit=2 kind=schema"), "{err}");
    assert!(!dir.path().join("zero-weight.report.txt").exists());
}

#[test]
fn perturbed_warped_product_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("perturbed_warped.toml", dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kind=check-failed"));
    let report = std::fs::read_to_string(dir.path().join("perturbed-warped.report.txt")).unwrap();
    assert!(report.contains("CHECK einstein_residual") && report.ends_with("OVERALL FAIL\n"));
}

#[test]
fn violated_hypothesis_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("hypothesis_violation.toml", dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("kind=hypothesis"));
}

#[test]
fn missing_and_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = qew(&["run", dir.path().join("absent.toml").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(4));
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = \n").unwrap();
    assert_eq!(qew(&["run", bad.to_str().unwrap()], dir.path()).status.code(), Some(2));
}

#[test]
fn env_tolerance_applies_when_file_is_silent() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qew"))
        .args(["run", scenario("perturbed_warped.toml").to_str().unwrap(), "--out"])
        .arg(dir.path())
        .env("QEW_TOL", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_qew"))
        .args(["run", scenario("bryant.toml").to_str().unwrap(), "--out"])
        .arg(dir.path())
        .env("QEW_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn blow_up_line_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("line_blowup.toml", dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("line-blowup.csv")).unwrap();
    assert!(csv.starts_with("r,w,wp,f,fp,R,mu_pointwise\n"));
    assert!(csv.trim_end().lines().last().unwrap().starts_with("# classification=potential_blow_up(r*=1.99999"));

    let path = scenario("line_blowup.toml");
    let o = qew(&["sweep", path.to_str().unwrap(), "--range", "-1:1:5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sweep = std::fs::read_to_string(dir.path().join("line-blowup.sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 6);
    assert!(dir.path().join("line-blowup.sweep.report.txt").exists());

    let o = qew(&["sweep", path.to_str().unwrap(), "--range", "-1:1:5", "--param", "lambda"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = qew(&["sweep", scenario("bryant_rescale.toml").to_str().unwrap(), "--range", "0:1:2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_example_scenario_parses() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let r = qew_cli::load_scenario(&path, None);
            if path.file_name().unwrap() == "zero_weight.toml" {
                assert_eq!(r.unwrap_err().exit_code(), 2);
            } else {
                r.unwrap_or_else(|e| panic!("{}: {e:?}", path.display()));
            }
            count += 1;
        }
    }
    assert!(count >= 10);
}
