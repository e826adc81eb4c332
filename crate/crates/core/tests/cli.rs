use std::fs;
use std::path::Path;

use clap::Parser;
use sideinfo::cli::{run, RunConfig};

const DSBS: &str = r#"{"x_alphabet":["0","1"],"y_alphabet":["0","1"],"pmf":[[0.375,0.125],[0.125,0.375]]}"#;
const IDENTITY: &str = r#"{"x_alphabet":["a","b","c"],"y_alphabet":["a","b","c"],"pmf":[[0.3,0,0],[0,0.3,0],[0,0,0.4]]}"#;
const RANDOM_3X3: &str =
    r#"{"x_alphabet":["a","b","c"],"y_alphabet":["u","v","w"],"pmf":[[0.12,0.05,0.2],[0.03,0.18,0.07],[0.1,0.15,0.1]]}"#;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn sideinfo(args: &[&str]) -> Run {
    let config = RunConfig::try_parse_from(std::iter::once("sideinfo").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&config, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    let i = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[i].to_string()).collect()
}

#[test]
fn quantities_reports_hhe() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "dsbs.json", DSBS);
    let r = sideinfo(&["quantities", "-i", &pmf, "--eps", "0.2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let row = r.stdout.lines().find(|l| l.starts_with("1,hhe,")).unwrap();
    let value: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((value - 0.561278).abs() < 1e-6);
    assert!(row.ends_with("i*=3"));
}

#[test]
fn verify_theorem1_on_random_pmf() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "p.json", RANDOM_3X3);
    for theorem in ["1", "2", "3", "4", "lemma5", "rcom"] {
        let r = sideinfo(&["verify", "-i", &pmf, "--theorem", theorem, "--eps", "0.1", "--seeds", "50", "--n", "3"]);
        assert_eq!(r.code, 0, "theorem {theorem}: {}", r.stderr);
        assert!(column(&r.stdout, "pass").iter().all(|p| p == "true"));
    }
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "bad.json", "{\"x_alphabet\": [");
    let r = sideinfo(&["quantities", "-i", &pmf, "--eps", "0.1"]);
    assert_eq!(r.code, 2);
    let err: serde_json::Value = serde_json::from_str(r.stderr.trim()).unwrap();
    assert_eq!(err["error"], "input");
    assert_eq!(err["exit_code"], 2);
    assert!(r.stdout.is_empty());
}

#[test]
fn out_of_range_eps_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "dsbs.json", DSBS);
    assert_eq!(sideinfo(&["quantities", "-i", &pmf, "--eps", "1.5"]).code, 2);
}

#[test]
fn budget_exceeded_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let labels: Vec<String> = (0..5).map(|i| format!("\"{i}\"")).collect();
    let labels = labels.join(",");
    let row = format!("[{}]", vec!["0.04"; 5].join(","));
    let body = format!(r#"{{"x_alphabet":[{labels}],"y_alphabet":[{labels}],"pmf":[{}]}}"#, vec![row; 5].join(","));
    let pmf = write(dir.path(), "big.json", &body);
    let r = sideinfo(&["quantities", "-i", &pmf, "--eps", "0.1"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("\"budget\""));
}

#[test]
fn identity_stream_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "id.json", IDENTITY);
    let symbols: Vec<&str> = (0..1000).map(|i| ["a", "b", "c"][(i * 7 + i / 3) % 3]).collect();
    let xs = write(dir.path(), "x.txt", &(symbols.join("\n") + "\n"));
    let bits = dir.path().join("s.bin");
    let codec = dir.path().join("c.json");
    let (bits, codec) = (bits.to_str().unwrap(), codec.to_str().unwrap());
    let r = sideinfo(&[
        "encode", "-i", &pmf, "--symbols", &xs, "--side-info", &xs, "--delta", "2", "--eps-budget", "uniform:0.1",
        "--bits", bits, "--codec", codec,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(column(&r.stdout, "total_bits"), ["5000"]);
    assert_eq!(column(&r.stdout, "decoded"), ["1000"]);
    let r = sideinfo(&["decode", "-i", &pmf, "--codec", codec, "--bits", bits, "--side-info", &xs]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(column(&r.stdout, "decoded"), symbols);
    assert!(column(&r.stdout, "outcome").iter().all(|o| o == "decoded"));
}

#[test]
fn empty_stream_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "id.json", IDENTITY);
    let xs = write(dir.path(), "x.txt", "");
    let bits = dir.path().join("s.bin");
    let codec = dir.path().join("c.json");
    let r = sideinfo(&[
        "encode", "-i", &pmf, "--symbols", &xs, "--side-info", &xs, "--delta", "2", "--eps-budget", "uniform:0",
        "--bits", bits.to_str().unwrap(), "--codec", codec.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(column(&r.stdout, "total_bits"), ["0"]);
    let r = sideinfo(&[
        "decode", "-i", &pmf, "--codec", codec.to_str().unwrap(), "--bits", bits.to_str().unwrap(), "--side-info", &xs,
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.lines().count(), 1);
}

#[test]
fn unknown_symbol_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "id.json", IDENTITY);
    let xs = write(dir.path(), "x.txt", "a\nz\n");
    let ys = write(dir.path(), "y.txt", "a\nb\n");
    let r = sideinfo(&[
        "encode", "-i", &pmf, "--symbols", &xs, "--side-info", &ys, "--delta", "2", "--eps-budget", "uniform:0",
        "--bits", dir.path().join("s").to_str().unwrap(), "--codec", dir.path().join("c").to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("\"input\""));
}

#[test]
fn mismatched_streams_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "id.json", IDENTITY);
    let xs = write(dir.path(), "x.txt", "a\nb\nc\n");
    let ys = write(dir.path(), "y.txt", "a\nb\n");
    let r = sideinfo(&[
        "encode", "-i", &pmf, "--symbols", &xs, "--side-info", &ys, "--delta", "2", "--eps-budget", "uniform:0",
        "--bits", dir.path().join("s").to_str().unwrap(), "--codec", dir.path().join("c").to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("3 entries"), "{}", r.stderr);
}

#[test]
fn per_symbol_budget_file() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "dsbs.json", DSBS);
    let budget = write(dir.path(), "eps.json", r#"{"0": 0.1, "1": 0.3}"#);
    let xs = write(dir.path(), "x.txt", "0\n1\n");
    let codec = dir.path().join("c.json");
    let r = sideinfo(&[
        "encode", "-i", &pmf, "--symbols", &xs, "--delta", "1", "--eps-budget", &budget, "--bits",
        dir.path().join("s").to_str().unwrap(), "--codec", codec.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let desc: serde_json::Value = serde_json::from_str(&fs::read_to_string(codec).unwrap()).unwrap();
    assert_eq!(desc["budget"], serde_json::json!([0.1, 0.3]));
}

#[test]
fn output_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "dsbs.json", DSBS);
    let args = |w: &'static str| {
        vec!["--workers", w, "sweep", "-i", &pmf, "--quantity", "spectrum", "--n-max", "3", "--eps", "0.05", "--samples", "3000"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let one = args("1");
    let four = args("4");
    let a = sideinfo(&one.iter().map(String::as_str).collect::<Vec<_>>());
    let b = sideinfo(&four.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn diagnose_reports_every_blocklength() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = write(dir.path(), "dsbs.json", DSBS);
    let r = sideinfo(&["diagnose", "-i", &pmf, "--condition1", "--n-max", "5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(column(&r.stdout, "n"), ["1", "2", "3", "4", "5"]);
    assert!(column(&r.stdout, "bracket_holds").iter().all(|v| v == "true"));
}
