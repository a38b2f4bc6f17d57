use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tangle"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn solve_fig4_everything_odd() {
    for variant in ["tl", "atl", "otftl", "otfatl", "zlk"] {
        let out = run(bin().args(["solve", "--variant", variant]).arg(fixture("fig4.pg")));
        assert!(out.status.success(), "{variant}: {}", text(&out.stderr));
        let stdout = text(&out.stdout);
        let mut lines = stdout.lines();
        assert_eq!(lines.next(), Some("paritysol 7;"));
        let rows: Vec<_> = lines.collect();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|l| l.trim_end_matches(';').split_whitespace().nth(1) == Some("1")), "{rows:?}");
    }
}

#[test]
fn atl_stats_report_turns() {
    let out = run(bin().args(["solve", "--variant", "atl", "--stats"]).arg(fixture("fig4.pg")));
    assert!(out.status.success());
    let err = text(&out.stderr);
    let turns: u64 = err
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix("turns="))
        .expect("turns in stats")
        .parse()
        .unwrap();
    assert!(turns >= 2, "{err}");
}

#[test]
fn stats_json_and_trace() {
    let out = run(bin().args(["solve", "--stats-json", "--trace"]).arg(fixture("fig4.pg")));
    assert!(out.status.success());
    let err = text(&out.stderr);
    assert!(err.lines().next().unwrap().starts_with("tangle 0 p=1 V={2}"));
    let json = err.lines().find(|l| l.starts_with('{')).unwrap();
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(v["dominions_found"], 2);
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pg");
    fs::write(&bad, "parity 1;\n0 0 0;\n").unwrap();
    let out = run(bin().arg("solve").arg(&bad));
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("line 2"));
}

#[test]
fn solve_reads_stdin() {
    let mut child = bin()
        .arg("solve")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(fs::read(fixture("fig1.pg")).unwrap().as_slice())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(text(&out.stdout).contains("3 1 4;"));
}

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    for game in ["fig1.pg", "fig4.pg"] {
        for variant in ["tl", "atl", "otftl", "otfatl"] {
            let sol = dir.path().join(format!("{game}.{variant}.sol"));
            let out = run(bin()
                .args(["solve", "--variant", variant, "--out"])
                .arg(&sol)
                .arg(fixture(game)));
            assert!(out.status.success());
            let out = run(bin().arg("verify").arg(fixture(game)).arg(&sol));
            assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));
            assert_eq!(text(&out.stdout).trim(), "accepted");
        }
    }
}

#[test]
fn corrupted_solution_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("fig4.sol");
    let out = run(bin().arg("solve").arg(fixture("fig4.pg")));
    // d is Even-owned; claiming it for Even without a strategy
    let corrupted = text(&out.stdout).replace("\n3 1;", "\n3 0;");
    fs::write(&sol, corrupted).unwrap();
    let out = run(bin().arg("verify").arg(fixture("fig4.pg")).arg(&sol));
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stdout).contains("StrategyMissing"), "{}", text(&out.stdout));
}

#[test]
fn mismatched_sizes_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("fig1.sol");
    let out = run(bin().arg("solve").arg(fixture("fig1.pg")));
    fs::write(&sol, out.stdout).unwrap();
    let out = run(bin().arg("verify").arg(fixture("fig4.pg")).arg(&sol));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generate_is_deterministic_and_solvable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.pg");
    let b = dir.path().join("b.pg");
    for p in [&a, &b] {
        let out = run(bin()
            .args(["generate", "-n", "200", "--min-outdeg", "1", "--max-outdeg", "2", "--seed", "9", "--out"])
            .arg(p));
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let sol = dir.path().join("a.sol");
    assert!(run(bin().arg("solve").arg("--out").arg(&sol).arg(&a)).status.success());
    assert_eq!(run(bin().arg("verify").arg(&a).arg(&sol)).status.code(), Some(0));
}

#[test]
fn generate_rejects_infeasible() {
    let out = run(bin().args(["generate", "-n", "3", "--max-outdeg", "3"]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_over_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["fig1.pg", "fig4.pg"] {
        fs::copy(fixture(f), dir.path().join(f)).unwrap();
    }
    let csv = dir.path().join("out.csv");
    let out = run(bin()
        .args(["bench", "--workers", "2", "--timeout", "10", "--corpus"])
        .arg(dir.path())
        .arg("--out")
        .arg(&csv));
    assert!(out.status.success(), "{}", text(&out.stderr));
    let body = fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("# tangle-bench csv v1"));
    let table = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::Reader::from_reader(table.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| &r[3] == "false" && r[11].is_empty()));
}

#[test]
fn bench_generated_two_outdegree() {
    let out = run(bin().args([
        "bench", "--gen", "300,1,2,3", "--variants", "tl,zlk", "--timeout", "30",
    ]));
    assert!(out.status.success(), "{}", text(&out.stderr));
    let body = text(&out.stdout);
    assert_eq!(body.lines().count(), 2 + 6);
    assert!(body.contains("rand-300-1-2-0,zlk,"));
}
