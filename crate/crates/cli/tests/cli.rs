//! Drives the binary end to end: exit-code taxonomy, byte-identical
//! reruns, and file round trips between subcommands.

use std::path::Path;
use std::process::{Command, Output};

fn zextract(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zextract"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn usage_errors_exit_64_and_help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = zextract(&["frobnicate"], dir.path());
    assert_eq!(unknown.status.code(), Some(64));

    let bad_flag = zextract(&["encode", "--no-such-flag"], dir.path());
    assert_eq!(bad_flag.status.code(), Some(64));

    let help = zextract(&["--help"], dir.path());
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout_of(&help).contains("zextract"));
}

#[test]
fn failure_classes_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let dependent = zextract(
        &["gen", "two-subgroups", "--alpha", "4", "--beta", "2", "--exp", "5"],
        dir.path(),
    );
    assert_eq!(dependent.status.code(), Some(2));
    assert!(stderr_of(&dependent).contains("dependence"));

    let bad_rational = zextract(
        &["gen", "two-subgroups", "--alpha", "x", "--beta", "2", "--exp", "5"],
        dir.path(),
    );
    assert_eq!(bad_rational.status.code(), Some(2));

    let plant = zextract(
        &["gen", "planted-ladder", "--depth", "2", "--output", "p"],
        dir.path(),
    );
    assert_eq!(plant.status.code(), Some(0), "{}", stderr_of(&plant));

    let verify = zextract(
        &[
            "ladder", "verify", "--set", "p/planted.set", "--fn", "p/planted.fn",
            "--ladder", "p/ladder.json",
        ],
        dir.path(),
    );
    assert_eq!(verify.status.code(), Some(0));

    // Swapping the two rungs' values breaks the nesting and must be a
    // verification failure, not a crash or a precondition error.
    let ladder_text = std::fs::read_to_string(dir.path().join("p/ladder.json")).unwrap();
    let tampered = ladder_text.replace("3/2", "31/16");
    assert_ne!(ladder_text, tampered);
    std::fs::write(dir.path().join("p/tampered.json"), tampered).unwrap();
    let invalid = zextract(
        &[
            "ladder", "verify", "--set", "p/planted.set", "--fn", "p/planted.fn",
            "--ladder", "p/tampered.json",
        ],
        dir.path(),
    );
    assert_eq!(invalid.status.code(), Some(3));
    assert!(stdout_of(&invalid).contains("ladder invalid"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "two-subgroups", "--alpha", "2", "--beta", "3", "--exp", "4"];
    let first = zextract(&args, dir.path());
    let second = zextract(&args, dir.path());
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    for run in ["a.json", "b.json"] {
        let gen = zextract(
            &["gen", "arithmetic", "--unit", "3/2", "--count", "12", "--output", "arith.set"],
            dir.path(),
        );
        assert_eq!(gen.status.code(), Some(0));
        let enc = zextract(
            &["encode", "--input", "arith.set", "--output", run],
            dir.path(),
        );
        assert_eq!(enc.status.code(), Some(0), "{}", stderr_of(&enc));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);

    let stamped = zextract(
        &["--timestamp", "gen", "two-subgroups", "--alpha", "2", "--beta", "3", "--exp", "1"],
        dir.path(),
    );
    assert!(stdout_of(&stamped).starts_with("# generated at unix second "));
}

#[test]
fn sets_flow_between_subcommands_through_files() {
    let dir = tempfile::tempdir().unwrap();

    let gen = zextract(
        &["gen", "arithmetic", "--unit", "7/5", "--count", "20", "--output", "d.set"],
        dir.path(),
    );
    assert_eq!(gen.status.code(), Some(0));

    let shift = zextract(
        &["normalize", "shift", "--input", "d.set", "--output", "pos.set"],
        dir.path(),
    );
    assert_eq!(shift.status.code(), Some(0));

    let space = zextract(
        &[
            "normalize", "space", "--input", "pos.set", "--output", "spread.set",
            "--map-output", "spread_map.json",
        ],
        dir.path(),
    );
    assert_eq!(space.status.code(), Some(0));
    assert!(dir.path().join("spread_map.json").exists());

    let enc = zextract(
        &["encode", "--input", "spread.set", "--output", "enc.json"],
        dir.path(),
    );
    assert_eq!(enc.status.code(), Some(0));

    let dec = zextract(&["decode", "--input", "enc.json"], dir.path());
    assert_eq!(dec.status.code(), Some(0));
    let decoded = stdout_of(&dec);
    let original = std::fs::read_to_string(dir.path().join("spread.set")).unwrap();
    assert_eq!(decoded, original, "decoding must recover the encoded set");

    let tuple = zextract(
        &["tuple", "--input", "spread.set", "--n", "2", "--output", "code.json"],
        dir.path(),
    );
    assert_eq!(tuple.status.code(), Some(0));

    let w = zextract(
        &[
            "extract-w", "--input", "d.set", "--span", "12", "--unit", "7/5",
            "--c", "1", "--schedule", "1/4,1/8",
        ],
        dir.path(),
    );
    assert_eq!(w.status.code(), Some(0));
    assert!(stdout_of(&w).contains("witness test holds at 1"));

    let closed = zextract(
        &["normalize", "closedize", "--input", "pos.set", "--eps", "1/4"],
        dir.path(),
    );
    assert_eq!(closed.status.code(), Some(0));
    assert!(stdout_of(&closed).starts_with("delta,profile\n"));
}

#[test]
fn window_reports_reach_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let plant = zextract(
        &["gen", "planted-ladder", "--depth", "2", "--output", "p"],
        dir.path(),
    );
    assert_eq!(plant.status.code(), Some(0));

    let level = zextract(&["level", "--ladder", "p/ladder.json"], dir.path());
    assert_eq!(level.status.code(), Some(0));
    let level = stdout_of(&level).trim().to_string();

    let windows = zextract(
        &[
            "windows", "--set", "p/planted.set", "--fn", "p/planted.fn",
            "--ladder", "p/ladder.json", "--level", &level, "--output", "win.csv",
        ],
        dir.path(),
    );
    assert_eq!(windows.status.code(), Some(0), "{}", stderr_of(&windows));
    let csv = std::fs::read_to_string(dir.path().join("win.csv")).unwrap();
    assert_eq!(csv, "m,nu,lo,hi\n2,20/9,2,5/2\n");
}

#[test]
fn formulas_evaluate_with_bindings() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("D.set"), "2\n5\n").unwrap();
    std::fs::write(dir.path().join("f.fn"), "2\t3/2\n5\t17/10\n").unwrap();
    std::fs::write(
        dir.path().join("check.formula"),
        "set D = D.set\nfn f = f.fn\nforall u in D (f(u) < c)\n",
    )
    .unwrap();

    let holds = zextract(
        &["eval", "--input", "check.formula", "--bind", "c=2"],
        dir.path(),
    );
    assert_eq!(holds.status.code(), Some(0), "{}", stderr_of(&holds));
    assert_eq!(stdout_of(&holds), "true\n");

    let fails = zextract(
        &["eval", "--input", "check.formula", "--bind", "c=8/5"],
        dir.path(),
    );
    assert_eq!(stdout_of(&fails), "false\n");

    let unbound = zextract(&["eval", "--input", "check.formula"], dir.path());
    assert_eq!(unbound.status.code(), Some(2));
    assert!(stderr_of(&unbound).contains("unbound variable c"));

    let broken = zextract(
        &["eval", "--input", "check.formula", "--bind", "c"],
        dir.path(),
    );
    assert_eq!(broken.status.code(), Some(2));
}
