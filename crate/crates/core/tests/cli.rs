use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn symsep() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_symsep"));
    cmd.env_remove("SYMSEP_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    symsep().args(args).output().expect("binary runs")
}

struct Fixture {
    name: String,
    args: Vec<String>,
    exit: i32,
    failed: Vec<String>,
}

fn fixtures() -> Vec<Fixture> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "args"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let mut f = Fixture {
                name: p.file_stem().unwrap().to_string_lossy().into_owned(),
                args: Vec::new(),
                exit: -1,
                failed: Vec::new(),
            };
            for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
                if let Some(v) = line.strip_prefix("# expect-exit:") {
                    f.exit = v.trim().parse().unwrap();
                } else if let Some(v) = line.strip_prefix("# expect-failed:") {
                    f.failed.push(v.trim().to_string());
                } else if !line.starts_with('#') {
                    f.args.push(line.to_string());
                }
            }
            f
        })
        .collect()
}

#[test]
fn fixtures_honor_exit_codes() {
    let all = fixtures();
    assert!(all.len() >= 2);
    for f in all {
        let out = symsep().args(&f.args).output().unwrap();
        assert_eq!(out.status.code(), Some(f.exit), "{}: {}", f.name, String::from_utf8_lossy(&out.stderr));
        if f.exit == 1 {
            let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
            for id in &f.failed {
                let r = v["reports"].as_array().unwrap().iter().find(|r| r["check_id"] == id.as_str()).unwrap();
                assert_eq!(r["status"], "fail", "{}", f.name);
                assert!(!r["witnesses"].as_array().unwrap().is_empty());
            }
            let stderr = String::from_utf8_lossy(&out.stderr);
            assert!(f.failed.iter().all(|id| stderr.contains(id.as_str())), "{stderr}");
        }
    }
}

#[test]
fn json_reports_are_byte_identical() {
    let a = run(&["verify", "all", "--seed", "42", "--format", "json"]);
    let b = run(&["verify", "all", "--seed", "42", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);

    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["seed"], 42);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 5);
    for r in reports {
        for key in ["check_id", "status", "max_residual", "tolerance", "witnesses", "runtime_ms", "seed"] {
            assert!(r.get(key).is_some(), "{key} missing");
        }
        assert_eq!(r["status"], "pass");
        // pass implies residual within tolerance
        if let Some(x) = r["max_residual"].as_f64() {
            assert!(x <= r["tolerance"].as_f64().unwrap());
        } else {
            assert_eq!(r["max_residual"], "exact-zero");
        }
    }
    let c = run(&["verify", "all", "--seed", "43", "--format", "json"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn single_check_matches_its_slot_in_all() {
    let all: serde_json::Value = serde_json::from_slice(&run(&["verify", "all", "--seed", "7"]).stdout).unwrap();
    let one: serde_json::Value = serde_json::from_slice(&run(&["verify", "cpn", "--seed", "7"]).stdout).unwrap();
    let slot = all["reports"].as_array().unwrap().iter().find(|r| r["check_id"] == "cpn").unwrap();
    assert_eq!(&one["reports"][0], slot);
}

#[test]
fn output_destinations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.txt");
    let out = run(&["verify", "f4", "--format", "text", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("[pass] f4"), "{text}");

    let out = symsep()
        .args(["verify", "cpn"])
        .env("SYMSEP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(json.contains("\"check_id\": \"cpn\""));

    let missing = dir.path().join("no/such/dir/r.json");
    let out = run(&["verify", "cpn", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "cpn", "--seed", "x"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "cpn", "--tol", "cpn"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
