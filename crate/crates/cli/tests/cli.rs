use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use fkglab::measure::{self, Measure};
use fkglab::rational;
use fkglab_cli::run;
use serde_json::Value;
use tempfile::TempDir;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn write(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const MU3: &str =
    r#"{"n":3,"weights":{"000":"1/3","100":"1/6","010":"1/6","001":"1/6","111":"1/6"}}"#;
const COUNTER: &str =
    r#"{"n":3,"k":3,"A":["110","101","011","111"],"B":["000"],"C":[["100"],["010"],["001"]]}"#;
const TRIANGLE: &str = "3 3\n0 1 1/2\n1 2 1/2\n0 2 1/2\n";

#[test]
fn check_fkg_exit_codes() {
    let f = Fixture::new();
    let mu3 = f.write("mu3.json", MU3);
    let r = run(["fkglab", "check-fkg", s(&mu3)]);
    assert_eq!(r.exit_code, 1);
    assert!(r.stdout.contains("a = 100 {1}"));
    assert!(r.stdout.contains("b = 010 {2}"));
    assert!(r.stdout.contains("0 < 1/36"));

    let prod = f.write(
        "prod.json",
        &measure::product_measure(&[rational::ratio(1, 3), rational::ratio(3, 4)])
            .unwrap()
            .to_json(),
    );
    assert_eq!(run(["fkglab", "check-fkg", s(&prod)]).exit_code, 0);

    let bad = f.write("bad.json", r#"{"n":1,"weights":{"0":"1/0","1":"1"}}"#);
    let r = run(["fkglab", "check-fkg", s(&bad)]);
    assert_eq!(r.exit_code, 2);
    assert!(r.stderr.contains("invalid-input"));
}

#[test]
fn strong_exit_codes() {
    let f = Fixture::new();
    let mu3 = f.write("mu3.json", MU3);
    let counter = f.write("counter.json", COUNTER);
    let r = run(["fkglab", "strong", s(&mu3), s(&counter)]);
    assert_eq!(r.exit_code, 1);
    assert!(r.stdout.contains("1/18 < 1/12"));

    let uni = f.write(
        "uni.json",
        r#"{"n":2,"weights":{"00":"1/4","10":"1/4","01":"1/4","11":"1/4"}}"#,
    );
    let rank = f.write(
        "rank.json",
        r#"{"n":2,"k":2,"A":["11"],"B":["00"],"C":[["10"],["01"]]}"#,
    );
    let r = run(["fkglab", "strong", s(&uni), s(&rank)]);
    assert_eq!(r.exit_code, 0);
    assert!(r.stdout.contains("1/16 = 1/16"));

    let broken = f.write(
        "broken.json",
        r#"{"n":2,"k":2,"A":[],"B":["00","11"],"C":[["10"],["01"]]}"#,
    );
    let r = run(["fkglab", "strong", s(&uni), s(&broken)]);
    assert_eq!(r.exit_code, 2);
    assert!(r.stderr.contains("C1"), "{}", r.stderr);
}

#[test]
fn json_report_mirrors_fields() {
    let f = Fixture::new();
    let mu3 = f.write("mu3.json", MU3);
    let counter = f.write("counter.json", COUNTER);
    let r = run(["fkglab", "--json", "strong", s(&mu3), s(&counter)]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["command"], "strong");
    assert_eq!(v["verdict"], "violated");
    assert_eq!(v["exitCode"], 1);
    assert_eq!(v["witnesses"]["lhs"], "1/18");
    assert_eq!(v["witnesses"]["rhs"], "1/12");

    let bad = f.write("bad.json", "{");
    let r = run(["fkglab", "--json", "check-pa", s(&bad)]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["verdict"], "invalid-input");
    assert_eq!(v["exitCode"], 2);
}

#[test]
fn mu_fixed_output_round_trips() {
    let f = Fixture::new();
    let out = f.path("mu.json");
    let r = run(["fkglab", "mu-fixed", "3", "--out", s(&out)]);
    assert_eq!(r.exit_code, 0);
    let expected = measure::fixed_point_measure(3).unwrap();
    let loaded = Measure::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(loaded, expected);
    // Printing the reloaded file gives the same bytes.
    assert_eq!(loaded.to_json(), fs::read_to_string(&out).unwrap());

    let rows: Vec<_> = r
        .stdout
        .lines()
        .filter(|l| !l.starts_with("verdict"))
        .collect();
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        let w = row.split_whitespace().nth(1).unwrap();
        assert_eq!(&rational::parse(w).unwrap(), expected.weight_at(i));
    }
}

#[test]
fn realize_then_verify() {
    let f = Fixture::new();
    let mu = f.write(
        "ising.json",
        r#"{"n":2,"weights":{"00":"1/5","10":"1/5","01":"1/5","11":"2/5"}}"#,
    );
    let out = f.path("real.json");
    let r = run(["fkglab", "realize", s(&mu), s(&out)]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("3/5"));
    assert_eq!(
        run(["fkglab", "verify-realization", s(&out), s(&mu)]).exit_code,
        0
    );

    let other = f.write(
        "uni.json",
        r#"{"n":2,"weights":{"00":"1/4","10":"1/4","01":"1/4","11":"1/4"}}"#,
    );
    let r = run(["fkglab", "verify-realization", s(&out), s(&other)]);
    assert_eq!(r.exit_code, 1);
    assert!(r.stdout.contains("law mismatch"));

    let mu3 = f.write("mu3.json", MU3);
    assert_eq!(
        run(["fkglab", "realize", s(&mu3), s(&f.path("x.json"))]).exit_code,
        2
    );
}

#[test]
fn percolation_and_degree() {
    let f = Fixture::new();
    let g = f.write("tri.txt", TRIANGLE);
    let r = run(["fkglab", "percolation", s(&g), "0", "1", "2"]);
    assert_eq!(r.exit_code, 0);
    for line in ["123    1/2", "12|3   1/8", "1|2|3  1/8", "1/16 > 3/64"] {
        assert!(r.stdout.contains(line), "{line}");
    }
    let r = run([
        "fkglab",
        "--workers",
        "3",
        "percolation",
        s(&g),
        "0",
        "1",
        "2",
        "--mc",
        "20000",
        "5",
    ]);
    assert_eq!(r.exit_code, 0);
    assert!(r.stdout.contains("monte carlo"));
    assert_eq!(
        run(["fkglab", "percolation", s(&g), "0", "1", "7"]).exit_code,
        2
    );

    let r = run(["fkglab", "degree", "2"]);
    assert_eq!(r.exit_code, 0);
    assert!(r.stdout.contains("1  1/4  0.250000"));
    assert!(r.stdout.contains("limit 0.414214"));
    assert_eq!(run(["fkglab", "degree", "4"]).exit_code, 2);
}

#[test]
fn trace_requires_product_measure() {
    let f = Fixture::new();
    let mu3 = f.write("mu3.json", MU3);
    let counter = f.write("counter.json", COUNTER);
    assert_eq!(run(["fkglab", "trace", s(&mu3), s(&counter)]).exit_code, 2);
    let prod = f.write(
        "prod.json",
        &measure::product_measure(&[
            rational::ratio(1, 3),
            rational::ratio(1, 2),
            rational::ratio(2, 5),
        ])
        .unwrap()
        .to_json(),
    );
    let r = run(["fkglab", "trace", s(&prod), s(&counter)]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("orientation"));
}

#[test]
fn suite_is_deterministic_and_worker_independent() {
    let a = run(["fkglab", "suite", "42", "60"]);
    let b = run(["fkglab", "suite", "42", "60"]);
    assert_eq!(a.exit_code, 0);
    assert_eq!(a.stdout, b.stdout);
    let v1 = run(["fkglab", "--json", "--verbose", "suite", "9", "40"]);
    let v4 = run([
        "fkglab",
        "--json",
        "--verbose",
        "--workers",
        "4",
        "suite",
        "9",
        "40",
    ]);
    assert_eq!(v1.stdout, v4.stdout);
}

#[test]
fn binary_exit_status() {
    let f = Fixture::new();
    let mu3 = f.write("mu3.json", MU3);
    let bin = env!("CARGO_BIN_EXE_fkglab");
    let st = Command::new(bin)
        .args(["check-fkg", s(&mu3)])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&st.stdout).contains("verdict: violated"));
    let st = Command::new(bin)
        .args(["check-fkg", "/nonexistent/file.json"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = Command::new(bin).arg("no-such-command").output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}
