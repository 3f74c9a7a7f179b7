//! Black-box tests of the command-line interface: exit codes, file
//! round-trips, witness re-verification, and input validation.

use std::path::Path;
use std::process::{Command, Output, Stdio};

fn run(dir: &Path, args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_atomkit"));
    cmd.args(args).current_dir(dir).stdout(Stdio::piped()).stderr(Stdio::piped());
    match stdin {
        Some(text) => {
            cmd.stdin(Stdio::piped());
            let mut child = cmd.spawn().unwrap();
            use std::io::Write;
            child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
            child.wait_with_output().unwrap()
        }
        None => {
            cmd.stdin(Stdio::null());
            cmd.output().unwrap()
        }
    }
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn maddux_build_and_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["build", "maddux", "--k", "4", "--out", "m.txt"], None)), 0);
    let check = run(d, &["check", "ra", "--file", "m.txt"], None);
    assert_eq!(code(&check), 0);
    assert!(text(&check).contains("pass"));
    // native re-export is byte-identical to the original
    assert_eq!(code(&run(d, &["export", "--file", "m.txt", "--format", "native", "--out", "m2.txt"], None)), 0);
    assert_eq!(std::fs::read(d.join("m.txt")).unwrap(), std::fs::read(d.join("m2.txt")).unwrap());
}

#[test]
fn csv_triples_row_count_matches_triple_count() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["build", "maddux", "--k", "3", "--out", "m.txt"], None);
    run(d, &["export", "--file", "m.txt", "--format", "csv", "--table", "triples", "--out", "m.csv"], None);
    let csv = std::fs::read_to_string(d.join("m.csv")).unwrap();
    // header plus one row per consistent triple: 3^3-3 diversity plus
    // the identity-involving ones (9 with identity in some slot)
    let rows = csv.lines().count() - 1;
    assert_eq!(rows, 24 + 10);
}

#[test]
fn blur_check_fails_with_reverifiable_witness() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(
        d,
        &["blur", "check", "--n", "3", "--l", "1", "--k", "3", "--exhaustive", "--witness-out", "w.txt"],
        None,
    );
    assert_eq!(code(&out), 1, "expected a violation at l=1 k=3");
    let verify = run(d, &["verify", "--file", "w.txt"], None);
    assert_eq!(code(&verify), 0);
    assert!(text(&verify).contains("reproduces"));
}

#[test]
fn blur_check_passes_in_wide_regime() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(d, &["blur", "check", "--n", "3", "--l", "3", "--k", "9", "--exhaustive"], None);
    assert_eq!(code(&out), 0, "{}", text(&out));
    assert!(text(&out).contains("pass"));
}

#[test]
fn sampled_blur_check_requires_and_prints_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let missing = run(d, &["blur", "check", "--n", "3", "--l", "2", "--k", "7", "--samples", "100"], None);
    assert_eq!(code(&missing), 2, "sampling without a seed must be a usage error");
    let ok = run(
        d,
        &["blur", "check", "--n", "3", "--l", "2", "--k", "7", "--samples", "100", "--seed", "5"],
        None,
    );
    assert!(text(&ok).contains("seed 5"));
}

#[test]
fn ef_game_exit_codes_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(
        d,
        &[
            "build", "partition", "--sizes-a", "u=5,v=2", "--sizes-b", "u=3,v=2",
            "--large", "u", "--out-a", "a.txt", "--out-b", "b.txt",
        ],
        None,
    );
    // small round budget: the existential player survives
    let short = run(d, &["game", "ef", "--a", "a.txt", "--b", "b.txt", "--mu", "3", "--out", "ef3.txt"], None);
    assert_eq!(code(&short), 0, "{}", text(&short));
    // enough rounds to exhaust the smaller block: universal win
    let long = run(d, &["game", "ef", "--a", "a.txt", "--b", "b.txt", "--mu", "4", "--out", "ef4.txt"], None);
    assert_eq!(code(&long), 1, "{}", text(&long));
    for f in ["ef3.txt", "ef4.txt"] {
        let v = run(d, &["verify", "--file", f, "--a", "a.txt", "--b", "b.txt"], None);
        assert_eq!(code(&v), 0, "{f}: {}", text(&v));
    }
}

#[test]
fn net_game_and_classify_agree_on_dead_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["basis", "enum", "--maddux", "3", "--n", "3", "--ca-out", "ca.txt"], None);
    let net = run(d, &["game", "net", "--s", "ca.txt", "--k", "3", "--rounds", "2", "--out", "net.txt"], None);
    let classify = run(d, &["classify", "--s", "ca.txt", "--extra", "0", "--rounds", "2"], None);
    assert_eq!(code(&net), code(&classify), "game and classification disagree");
    let v = run(d, &["verify", "--file", "net.txt", "--s", "ca.txt"], None);
    assert_eq!(code(&v), 0, "{}", text(&v));
}

#[test]
fn graph_dot_round_trip_and_chi() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["build", "graph", "--kind", "petersen", "--out", "g.txt"], None);
    run(d, &["export", "--file", "g.txt", "--format", "dot", "--out", "g.dot"], None);
    run(d, &["export", "--file", "g.dot", "--format", "native", "--out", "g2.txt"], None);
    assert_eq!(std::fs::read(d.join("g.txt")).unwrap(), std::fs::read(d.join("g2.txt")).unwrap());
    let chi = run(d, &["graph", "chi", "--file", "g.txt"], None);
    assert!(text(&chi).contains("chi 3"));
}

#[test]
fn vec_in_y_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["build", "vec", "--dim", "3", "--entries", "0=1,1=2", "--out", "yes.txt"], None);
    run(d, &["build", "vec", "--dim", "3", "--entries", "0=1", "--out", "no.txt"], None);
    assert_eq!(code(&run(d, &["vec", "in-y", "--file", "yes.txt"], None)), 0);
    assert_eq!(code(&run(d, &["vec", "in-y", "--file", "no.txt"], None)), 1);
}

#[test]
fn unknown_format_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.txt"), "atomkit 99\nkind graph\nvertices 1\nend\n").unwrap();
    let out = run(d, &["check", "ra", "--file", "bad.txt"], None);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));
}

#[test]
fn wrong_kind_and_missing_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["build", "graph", "--kind", "complete", "--n", "3", "--out", "g.txt"], None);
    assert_eq!(code(&run(d, &["check", "ra", "--file", "g.txt"], None)), 2);
    assert_eq!(code(&run(d, &["check", "ra", "--file", "absent.txt"], None)), 2);
    // graphs have no csv export
    assert_eq!(code(&run(d, &["export", "--file", "g.txt", "--format", "csv", "--out", "x.csv"], None)), 2);
}

#[test]
fn cap_override_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = Command::new(env!("CARGO_BIN_EXE_atomkit"))
        .args(["basis", "enum", "--maddux", "3", "--n", "3"])
        .env("ATOMKIT_CAP", "5")
        .current_dir(d)
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn interactive_play_validates_moves() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(
        d,
        &[
            "build", "partition", "--sizes-a", "u=4,v=2", "--sizes-b", "u=3,v=2",
            "--large", "u", "--out-a", "a.txt", "--out-b", "b.txt",
        ],
        None,
    );
    // an illegal token is re-prompted, then a legal game plays out
    let out = run(
        d,
        &["play", "--role", "forall", "--a", "a.txt", "--b", "b.txt", "--mu", "2"],
        Some("Z nope\nA u:0\nB v:1\n"),
    );
    let t = text(&out);
    assert!(t.contains("illegal move"), "{t}");
    assert!(t.contains("machine answers"), "{t}");
    assert_eq!(code(&out), 1, "surviving all rounds is an existential win");
}
