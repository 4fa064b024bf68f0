use serde_json::Value;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn problem_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../problems")
        .join(name)
}

fn wfomc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wfomc"))
        .args(args)
        .output()
        .unwrap()
}

fn run_on(command: &str, file: &str, extra: &[&str]) -> Output {
    let path = problem_path(file);
    let mut args = vec![command, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    wfomc(&args)
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_problem(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".wmc").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn count_friends() {
    let out = run_on("count", "friends.wmc", &[]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1792");
    let oracle = run_on("oracle", "friends.wmc", &[]);
    assert_eq!(String::from_utf8(oracle.stdout).unwrap().trim(), "1792");
}

#[test]
fn json_report_schema() {
    let v = json(&run_on("count", "friends.wmc", &["--json", "--approx"]));
    assert_eq!(v["command"], "count");
    assert_eq!(v["n"], 3);
    assert_eq!(v["result"], "1792");
    assert_eq!(v["exact"], true);
    assert!(v["ms"].is_u64());
    assert!(v["counters"]["k_vectors"].is_u64());
    assert!(v["digest"].as_str().unwrap().starts_with("sha256:"));
    assert_eq!(v["approx"].as_f64(), Some(1792.0));
}

#[test]
fn coin_distribution() {
    let v = json(&run_on("dist", "coins.wmc", &["--json"]));
    let r = &v["result"];
    let got: Vec<&str> = (0..5).map(|k| r[k.to_string()].as_str().unwrap()).collect();
    assert_eq!(got, ["1/8", "0", "3/4", "0", "1/8"]);
    let o = json(&run_on("oracle", "coins.wmc", &["--json"]));
    assert_eq!(o["result"]["2"], "3/4");
}

#[test]
fn check_functionality() {
    let out = run_on("check", "functionality.wmc", &["--max-n", "3", "--json"]);
    let v = json(&out);
    let runs = v["result"]["runs"].as_array().unwrap();
    let values: Vec<&str> = runs
        .iter()
        .map(|r| r["closed_form"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["1", "4", "27"]);
    assert!(runs.iter().all(|r| r["agree"] == true));
}

#[test]
fn check_agrees_on_whole_corpus() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = wfomc(&["check", path.to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{}: {}{}",
            path.display(),
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn weighted_is_rational() {
    let v = json(&run_on("weighted", "smokers.wmc", &["--json"]));
    assert_eq!(v["result"], "2342277/8");
}

#[test]
fn query_splits_counts() {
    let v = json(&run_on("count", "friends.wmc", &["--query", "A", "--json"]));
    let cells = v["result"].as_object().unwrap();
    let total: u64 = cells
        .values()
        .map(|c| c.as_str().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 1792);
}

#[test]
fn domain_override() {
    let out = run_on("count", "functionality.wmc", &["-n", "5"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "3125");
}

#[test]
fn tables_and_program_dumps() {
    let v = json(&run_on("tables", "friends.wmc", &["--json"]));
    assert_eq!(v["result"]["u"], 2);
    let counts: Vec<u64> = v["result"]["n_ij"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["count"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, [4, 4, 2, 2, 4, 2, 2, 4, 4, 4]);
    let out = run_on("program", "successor.wmc", &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# sign: $P1"), "{text}");
    let out = run_on("count", "friends.wmc", &["--dump-program", "--dump-tables"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("n_ijv") && err.contains("formula:"), "{err}");
}

#[test]
fn parse_errors_exit_2() {
    let f = temp_problem("domain: 2\nformula: forall x P(x)\n");
    let out = wfomc(&["count", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("undeclared predicate"));
}

#[test]
fn limit_errors_exit_3() {
    let out = run_on("oracle", "friends.wmc", &["-n", "5"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run_on(
        "check",
        "friends.wmc",
        &["--max-n", "3", "--max-atoms", "6"],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_file_exits_1() {
    let out = wfomc(&["count", "/nonexistent/problem.wmc"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dist_requires_predicates() {
    let out = run_on("dist", "friends.wmc", &[]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&run_on("dist", "friends.wmc", &["--of", "A", "--json"]));
    let sum: f64 = v["result"]
        .as_object()
        .unwrap()
        .values()
        .map(|s| {
            let (p, q) = s
                .as_str()
                .unwrap()
                .split_once('/')
                .unwrap_or((s.as_str().unwrap(), "1"));
            p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap()
        })
        .sum();
    assert!((sum - 1.0).abs() < 1e-12);
}
