use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn roby(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roby")).args(args).current_dir(dir).output().expect("binary runs")
}

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn strip_timing(s: &str) -> String {
    s.lines().filter(|l| !l.starts_with("timing.")).collect::<Vec<_>>().join("\n")
}

#[test]
fn quadric_pipeline_writes_outputs_that_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = specs().join("quadric.toml");
    let o = roby(&["pipeline", spec.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("dim.module: 8"));

    let out = tmp.path().join("out");
    let v = roby(&["roby", "verify", out.join("quadric_module.toml").to_str().unwrap()], tmp.path());
    assert_eq!(v.status.code(), Some(0));
    let c = roby(&["charmor", "--morphism", out.join("quadric_morphism.toml").to_str().unwrap()], tmp.path());
    assert_eq!(c.status.code(), Some(0));
    let c2 = roby(&["charmor", out.join("quadric_module.toml").to_str().unwrap()], tmp.path());
    assert_eq!(c2.status.code(), Some(0));

    let r = roby(&["report", out.join("quadric_report.json").to_str().unwrap()], tmp.path());
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout(&r).contains("result: PASS"));
}

#[test]
fn reports_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    for fmt in ["text", "json"] {
        let a = roby(&["--format", fmt, "pipeline", "--example", "quadric"], tmp.path());
        let b = roby(&["--format", fmt, "pipeline", "--example", "quadric"], tmp.path());
        if fmt == "text" {
            assert_eq!(strip_timing(&stdout(&a)), strip_timing(&stdout(&b)));
        } else {
            let mut x: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
            let mut y: serde_json::Value = serde_json::from_str(&stdout(&b)).unwrap();
            x["timing_ms"] = serde_json::Value::Null;
            y["timing_ms"] = serde_json::Value::Null;
            assert_eq!(x, y);
            assert_eq!(x["schema_version"], 1);
        }
    }
}

#[test]
fn corrupted_seed_fails_with_the_entry() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(specs().join("quadric_module_seed.toml")).unwrap();
    let bad = text.replacen(r#"rows = [["0", "0", "0", "x"]"#, r#"rows = [["0", "0", "0", "x + 1"]"#, 1);
    assert_ne!(bad, text);
    let p = tmp.path().join("bad.toml");
    std::fs::write(&p, bad).unwrap();
    let o = roby(&["pipeline", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert!(s.contains("[FAIL] seed: seed rejected: Roby identity fails: entry ("), "{s}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(roby(&["pipeline", "missing.toml"], tmp.path()).status.code(), Some(2));
    assert_eq!(roby(&["cohom", "table", "1"], tmp.path()).status.code(), Some(2));
    assert_eq!(roby(&["frobnicate"], tmp.path()).status.code(), Some(2));
    assert_eq!(roby(&["roby", "build", "--form", "y1^2 + y2^2", "--args", "y1,y2"], tmp.path()).status.code(), Some(0));

    // the square of this action is 2*y1^2, not y1^2
    let p = tmp.path().join("m.toml");
    std::fs::write(&p, "[module]\ngrading = [0, 1]\nform = \"y1^2\"\nargs = [\"y1\"]\n[[module.action]]\narg = \"y1\"\nrows = [[\"0\", \"1\"], [\"2\", \"0\"]]\n").unwrap();
    let o = roby(&["roby", "verify", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL] roby identity: entry (0,0)"));

    let cap = tmp.path().join("cap.toml");
    std::fs::write(&cap, "field_order_cap = 1\n").unwrap();
    let o = roby(&["--config", cap.to_str().unwrap(), "pipeline", "--example", "quadric"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let o = roby(&["cohom", "table", "3", "--csv"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\n1,6,6\n"));
    let o = roby(&["numerology", "beta", "0", "--steps", "3", "--csv"], tmp.path());
    assert_eq!(stdout(&o), "m,beta,closed_form\n0,0,0\n1,3/4,3/4\n2,15/16,15/16\n3,63/64,63/64\n");
    let o = roby(&["cohom", "scan", "3", "-2", "--lo", "-6", "--hi", "4"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let o = roby(&["numerology", "monad", "--rank", "1", "--degree", "2", "--m", "6"], tmp.path());
    assert!(stdout(&o).contains("O(-1)^6 -> O^14 -> O(1)^6"));
}

#[test]
fn charpoly_and_splitting() {
    let tmp = tempfile::tempdir().unwrap();
    let o = roby(&["charpoly", specs().join("quadric.toml").to_str().unwrap(), "--bind", "z2=0"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("input.chi: -G2^2*x*y + G1^2 - 2*G1*t + t^2"));
    let o = roby(&["cohom", "splitting", specs().join("bundle_trivial.toml").to_str().unwrap()], tmp.path());
    assert!(stdout(&o).contains("(0, 0)"));
    let o = roby(&["cohom", "splitting", specs().join("bundle_unbalanced.toml").to_str().unwrap()], tmp.path());
    assert!(stdout(&o).contains("(1, -1)"));
}
