//! End-to-end runs of the installed binary: exit codes, JSON shapes, the
//! results cache, and the printed bound table against known values.

use serde_json::Value;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn workdir(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("towns-cli-{}-{test}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn towns(dir: &PathBuf, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_towns"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn construct_then_check_round_trips() {
    let dir = workdir("roundtrip");
    let out = towns(&dir, &["construct", "block", "--m", "1", "--k", "3", "--n", "10", "--out", "family.txt"]);
    assert_eq!(code(&out), 0, "{out:?}");
    let check = towns(&dir, &["check", "family.txt"]);
    assert_eq!(code(&check), 0);
    assert!(String::from_utf8_lossy(&check.stdout).starts_with("ok"));
}

#[test]
fn check_reports_violations_with_exit_one() {
    let dir = workdir("violations");
    fs::write(dir.join("bad.txt"), "3 3 1 0\n1\n1 2\n").unwrap();
    let out = towns(&dir, &["check", "bad.txt", "--json"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["passed"], Value::Bool(false));
    assert_eq!(v["violations"][0]["kind"], "member-size");
}

#[test]
fn unreadable_input_exits_two() {
    let dir = workdir("badfile");
    fs::write(dir.join("garbled.txt"), "not a header\n").unwrap();
    assert_eq!(code(&towns(&dir, &["check", "garbled.txt"])), 2);
    assert_eq!(code(&towns(&dir, &["check", "missing.txt"])), 2);
    // Residue out of range.
    assert_eq!(code(&towns(&dir, &["bound", "--a", "5", "--b", "0", "--k", "3", "--n", "4"])), 2);
}

#[test]
fn bound_json_shape_and_values() {
    let dir = workdir("bound");
    let out = towns(&dir, &["bound", "--a", "0", "--b", "1", "--k", "3", "--n", "9", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["best"]["evaluated"], 8);
    assert_eq!(v["tight"], Value::Bool(false));
    assert!(v["rules"].as_array().unwrap().len() >= 2);

    let out = towns(&dir, &["bound", "--a", "2", "--b", "1", "--k", "3", "--n", "9", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["best"]["evaluated"], 9);
    assert_eq!(v["tight"], Value::Bool(true));
}

#[test]
fn certificates_for_distinct_and_equal_residues() {
    let dir = workdir("certify");
    towns(&dir, &["construct", "star", "--a", "2", "--b", "1", "--k", "3", "--n", "8", "--out", "star.txt"]);
    let out = towns(&dir, &["certify", "star.txt", "--p", "3"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["alpha", "holds", "p", "r", "rank", "size"]);
    assert_eq!(v["holds"], Value::Bool(true));
    assert_eq!(v["rank"], v["size"]);
    assert_eq!(v["size"], 7);

    towns(&dir, &["construct", "fo", "--k", "3", "--n", "12", "--out", "fo.txt"]);
    let out = towns(&dir, &["certify", "fo.txt", "--p", "3"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["holds"], Value::Bool(true));
    assert_eq!(v["size"], 24);
    assert_eq!(v["rank"], 6);

    // p must divide the modulus.
    let out = towns(&dir, &["certify", "star.txt", "--p", "5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn certificate_detects_a_false_claim() {
    let dir = workdir("certify-false");
    // {1,2} is the sum of {1} and {2}, so the claimed independence fails
    // and the rank comes out below the family size.
    fs::write(dir.join("fake.txt"), "2 3 1 0\n1\n2\n1 2\n").unwrap();
    let out = towns(&dir, &["certify", "fake.txt", "--p", "3"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["holds"], Value::Bool(false));
    assert_eq!(v["rank"], 2);
    assert_eq!(v["size"], 3);
}

#[test]
fn search_uses_and_respects_the_cache() {
    let dir = workdir("cache");
    let args = ["search", "--a", "1", "--b", "0", "--k", "2", "--n", "4", "--json"];
    let first = towns(&dir, &args);
    assert_eq!(code(&first), 0);
    let v = stdout_json(&first);
    assert_eq!(v["size"], 4);
    assert_eq!(v["status"], "optimal");
    assert_eq!(v["cached"], Value::Bool(false));

    let second = towns(&dir, &args);
    let v = stdout_json(&second);
    assert_eq!(code(&second), 0);
    assert_eq!(v["size"], 4);
    assert_eq!(v["cached"], Value::Bool(true));

    let mut forced: Vec<&str> = args.to_vec();
    forced.push("--force");
    let third = towns(&dir, &forced);
    let v = stdout_json(&third);
    assert_eq!(v["cached"], Value::Bool(false));

    let cache_lines = fs::read_to_string(dir.join("towns-cache.jsonl")).unwrap();
    assert_eq!(cache_lines.lines().count(), 2);
}

#[test]
fn search_exhaustion_exits_three() {
    let dir = workdir("budget");
    let out = towns(
        &dir,
        &["search", "--a", "0", "--b", "0", "--k", "3", "--n", "12", "--max-nodes", "5", "--json"],
    );
    assert_eq!(code(&out), 3);
    let v = stdout_json(&out);
    assert_eq!(v["status"], "nodes-exhausted");
    // The constructive seed keeps the reported lower bound honest.
    assert!(v["size"].as_u64().unwrap() >= 24);
}

#[test]
fn search_writes_witness_files() {
    let dir = workdir("witness");
    let out = towns(
        &dir,
        &["search", "--a", "2", "--b", "1", "--k", "3", "--n", "6", "--witness-out", "w.txt", "--json"],
    );
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["witness_file"], "w.txt");
    let check = towns(&dir, &["check", "w.txt", "--json"]);
    let cv = stdout_json(&check);
    assert_eq!(cv["passed"], Value::Bool(true));
    assert_eq!(cv["size"], v["size"]);
}

/// The printed table must match the known mod-3 values: exact lower and
/// upper for the six distinct-residue rows, exact upper and a valid lower
/// for the diagonal.
#[test]
fn table_matches_known_mod3_values() {
    let dir = workdir("table");
    for n in [9usize, 10, 11] {
        let out = towns(&dir, &["table", "--k", "3", "--n", &n.to_string(), "--json", "--eval"]);
        assert_eq!(code(&out), 0);
        let v = stdout_json(&out);
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 9);
        for row in rows {
            let (a, b) = (row["a"].as_u64().unwrap(), row["b"].as_u64().unwrap());
            let lower = row["lower"].as_u64().unwrap() as usize;
            let upper = row["upper_evaluated"].as_u64().unwrap() as usize;
            let tight = row["tight"].as_bool().unwrap();
            if a == b {
                let exponent = if a == 0 { n / 2 } else { (n + 1) / 2 };
                assert_eq!(upper, 1 << exponent, "({a},{b}) n={n}");
                // Known construction value, at least the asymptotic block count.
                assert!(lower >= 24usize.pow((n / 12) as u32), "({a},{b}) n={n}");
                assert!(!tight);
                continue;
            }
            let expect_lower = match (a, b, n % 3) {
                (0, 1, 0) | (0, 1, 1) => (n - 1) / 2,
                (0, 1, 2) => n / 2,
                (1, 2, 0) => n / 2,
                (1, 2, 1) => (n - 1) / 2,
                (1, 2, 2) => (n - 2) / 2,
                (2, 0, _) => n / 2,
                (0, 2, 0) => n - 2,
                (0, 2, 1) => n,
                (0, 2, 2) => n - 1,
                (1, 0, _) => n,
                (2, 1, 0) => n,
                (2, 1, _) => n - 1,
                _ => unreachable!(),
            };
            let expect_upper = match (a, b, n % 3) {
                (0, 1, 1) => n,
                (0, 1, _) => n - 1,
                (1, 2, 2) => n - 1,
                (1, 2, _) => n,
                (2, 0, 2) => n - 1,
                (2, 0, _) => n,
                (0, 2, 0) => n - 2,
                (0, 2, 1) => n,
                (0, 2, 2) => n - 1,
                (1, 0, _) => n,
                (2, 1, 0) => n,
                (2, 1, _) => n - 1,
                _ => unreachable!(),
            };
            assert_eq!(lower, expect_lower, "lower ({a},{b}) n={n}");
            assert_eq!(upper, expect_upper, "upper ({a},{b}) n={n}");
            let expect_tight = matches!((a, b), (1, 0) | (2, 1) | (0, 2));
            assert_eq!(tight, expect_tight, "tight ({a},{b}) n={n}");
        }
    }
}

#[test]
fn table_exact_column_reads_the_cache() {
    let dir = workdir("table-cache");
    towns(&dir, &["search", "--a", "0", "--b", "0", "--k", "3", "--n", "6"]);
    let out = towns(&dir, &["table", "--k", "3", "--n", "6", "--json"]);
    let v = stdout_json(&out);
    let row = &v["rows"].as_array().unwrap()[0];
    assert_eq!(row["exact"], 4);
    // Unsearched cells stay null.
    assert_eq!(v["rows"].as_array().unwrap()[1]["exact"], Value::Null);
}

#[test]
fn symbolic_versus_evaluated_upper_bounds() {
    let dir = workdir("eval");
    let symbolic = stdout_json(&towns(&dir, &["table", "--k", "3", "--n", "9", "--json"]));
    let row = &symbolic["rows"].as_array().unwrap()[0];
    assert_eq!(row["upper"], "2^4");
    let evaluated = stdout_json(&towns(&dir, &["table", "--k", "3", "--n", "9", "--json", "--eval"]));
    let row = &evaluated["rows"].as_array().unwrap()[0];
    assert_eq!(row["upper"], "16");
}

#[test]
fn augmented_construction_is_checked_valid() {
    let dir = workdir("augment");
    let out = towns(&dir, &["construct", "augment", "--k", "3", "--n", "13", "--m", "1", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["size"], 24);
    assert_eq!(v["a"], 1);
    assert_eq!(v["b"], 1);
    towns(&dir, &["construct", "augment", "--k", "3", "--n", "13", "--m", "1", "--out", "aug.txt"]);
    assert_eq!(code(&towns(&dir, &["check", "aug.txt"])), 0);
}

#[test]
fn probe_exits_zero_with_no_findings() {
    let dir = workdir("probe");
    let out = towns(&dir, &["probe-conjectures", "--k", "3", "--n-max", "4", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["findings"].as_array().unwrap().len(), 0);
    assert_eq!(v["cells"].as_array().unwrap().len(), 36);
}

#[cfg(unix)]
#[test]
fn closing_the_output_pipe_is_not_a_crash() {
    use std::io::Read;
    use std::os::unix::process::ExitStatusExt;
    use std::process::{Command, Stdio};

    let dir = workdir("sigpipe");
    // Enough output to overfill the pipe buffer after the reader stops.
    let mut child = Command::new(env!("CARGO_BIN_EXE_towns"))
        .args(["construct", "fo", "--k", "3", "--n", "36"])
        .current_dir(&dir)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut head = [0u8; 1024];
    child.stdout.take().unwrap().read_exact(&mut head).unwrap();
    let status = child.wait().unwrap();
    assert_eq!(status.signal(), Some(libc::SIGPIPE));
    let mut err = String::new();
    child.stderr.take().unwrap().read_to_string(&mut err).unwrap();
    assert!(!err.contains("panicked"), "stderr: {err}");
}
