use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pgroup_core::setfile::parse_set_file;

fn pgroup(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgroup"))
        .args(args)
        .current_dir(dir)
        .env_remove("PGROUP_BUDGET")
        .env_remove("PGROUP_WORKERS")
        .env_remove("PGROUP_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn has_line(text: &str, prefix: &str) -> bool {
    text.lines().any(|l| l.starts_with(prefix))
}

#[test]
fn tightness_example_reports_its_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgroup(dir.path(), &["example", "tightness", "--r", "3", "--K", "2", "-o", "t.set"]);
    assert!(o.status.success());
    let o = pgroup(dir.path(), &["report", "t.set"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(has_line(&out, "doubling=2 "), "{out}");
    assert!(has_line(&out, "spanning=3 "), "{out}");
}

#[test]
fn half_integer_doubling_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgroup(dir.path(), &["example", "tightness", "--r", "3", "--K", "5/2"]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("tightness-r3-K5-2.set")).unwrap();
    let (g, a) = parse_set_file(&text).unwrap();
    assert_eq!((g.order(), a.len()), (27, 4));
    assert!(has_line(&stdout(&o), "spanning=27/4 (≈6.75)"));
}

#[test]
fn sum_compression_sweep_on_cyclic_nine() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgroup(dir.path(), &["verify", "compression-doubling", "--group", "3^2", "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_exit_codes_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgroup(dir.path(), &["verify", "compression-doubling", "--group", "3^1 x 3^1", "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let o = pgroup(
        dir.path(),
        &["verify", "compression-doubling", "--group", "2^3", "--exhaustive", "--report", "r.txt"],
    );
    assert_eq!(o.status.code(), Some(1));
    let report = fs::read_to_string(dir.path().join("r.txt")).unwrap();
    for key in ["property=compression-doubling", "group=2^3", "mode=exhaustive", "verdict=counterexample"] {
        assert!(has_line(&report, key), "{report}");
    }
    let set = report
        .split("[counterexample]\n")
        .nth(1)
        .and_then(|s| s.split("[provenance]").next())
        .unwrap();
    let (g, a) = parse_set_file(set).unwrap();
    assert_eq!(g.to_string(), "2^3");
    assert!(!a.is_empty());
    let o = pgroup(dir.path(), &["verify", "main-bound", "--group", "3^3", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_stable_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "structure", "--group", "2^1 x 2^2", "--samples", "300", "--seed", "4", "--json"];
    let a = stdout(&pgroup(dir.path(), &args));
    let b = stdout(&pgroup(dir.path(), &["--workers", "1"].iter().chain(&args).copied().collect::<Vec<_>>()));
    assert_eq!(a, b);
    assert!(!a.contains("elapsed"));
    let file = fs::read_to_string(dir.path().join("verify-structure.txt")).unwrap();
    assert!(file.contains("[provenance]\n"));
}

#[test]
fn bound_eval_main() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgroup(dir.path(), &["bound", "eval", "main", "--q", "9", "--p", "3", "--K", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(has_line(&out, "value=27 "), "{out}");
    assert!(has_line(&out, "constant_undetermined=false"));
    let o = pgroup(dir.path(), &["bound", "eval", "power-of-two", "--q", "4", "--p", "2", "--K", "2"]);
    assert!(has_line(&stdout(&o), "constant_undetermined=true"));
}

#[test]
fn compress_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.set"), "3^1 x 3^2\n0,0\n1,0\n0,1\n2,4\n1,7\n").unwrap();
    let o = pgroup(dir.path(), &["compress", "a.set", "--dir", "0,3", "-o", "c.set"]);
    assert!(o.status.success());
    let (g, c) = parse_set_file(&fs::read_to_string(dir.path().join("c.set")).unwrap()).unwrap();
    assert_eq!((g.to_string().as_str(), c.len()), ("3^1 x 3^2", 5));

    let o = pgroup(dir.path(), &["compress", "--fixpoint", "a.set", "-o", "f.set"]);
    assert!(o.status.success());
    let trace = fs::read_to_string(dir.path().join("a.trace")).unwrap();
    let steps: Vec<&str> = trace.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(!steps.is_empty());
    for s in steps {
        let f: Vec<&str> = s.split(' ').collect();
        assert!(f[2].parse::<u64>().unwrap() < f[1].parse::<u64>().unwrap());
    }
    let o = pgroup(dir.path(), &["sumset", "f.set"]);
    assert!(parse_set_file(&stdout(&o)).is_ok());
}

#[test]
fn order_listing() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgroup(dir.path(), &["order", "list", "3^2"]);
    assert_eq!(stdout(&o), "0\n3\n6\n1\n4\n7\n2\n5\n8\n");
    let o = pgroup(dir.path(), &["order", "list", "3^2", "--pseudo"]);
    assert_eq!(stdout(&o), "0\n1\n2\n3\n4\n5\n6\n7\n8\n");
    let o = pgroup(dir.path(), &["order", "rank", "3^1 x 3^2", "1,3"]);
    assert_eq!(stdout(&o), "4\n");
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pgroup(dir.path(), &["frobnicate"]).status.code(), Some(64));
    assert_eq!(pgroup(dir.path(), &["verify", "no-such", "--group", "3^2"]).status.code(), Some(64));
    assert_eq!(pgroup(dir.path(), &["report", "missing.set"]).status.code(), Some(74));
    assert_eq!(
        pgroup(dir.path(), &["example", "tightness", "--r", "2", "--K", "2"]).status.code(),
        Some(65)
    );
    fs::write(dir.path().join("bad.set"), "3^2\n9\n").unwrap();
    assert_eq!(pgroup(dir.path(), &["report", "bad.set"]).status.code(), Some(65));
}
