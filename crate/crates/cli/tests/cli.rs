//! End-to-end tests of the heptaca binary: exit codes, output contracts,
//! and the elicit append flow.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/railway_rules.txt")
}

fn heptaca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heptaca"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn audit_reports_the_shipped_table() {
    let out = heptaca(&["audit", "--rules", fixture().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = stdout_of(&out);
    assert!(
        stdout.starts_with("RAW=1168 MINIMAL=589 CONFLICTS=0\n"),
        "unexpected summary: {}",
        stdout.lines().next().unwrap_or("")
    );
}

#[test]
fn audit_fails_on_conflicts_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let conflicting = write(
        dir.path(),
        "bad.txt",
        "W W W W W W W W W\nW W W W W W W W B\n",
    );
    let out = heptaca(&["audit", "--rules", conflicting.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).contains("CONFLICTS=1"));

    let garbage = write(dir.path(), "garbage.txt", "W W\n");
    let out = heptaca(&["audit", "--rules", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = heptaca(&["audit", "--rules", dir.path().join("absent.txt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let out = heptaca(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    let out = heptaca(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("audit"));
}

#[test]
fn simulate_keeps_the_idle_path_still() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "idle.scn", "kind=horizontal\n");
    let out = heptaca(&[
        "simulate",
        "--rules",
        fixture().to_str().unwrap(),
        "--scenario",
        scenario.to_str().unwrap(),
        "--steps",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let stdout = stdout_of(&out);
    let blocks: Vec<&str> = stdout.split("== ").filter(|b| !b.is_empty()).collect();
    assert_eq!(blocks.len(), 4);
    let body = |b: &str| b.splitn(2, '\n').nth(1).unwrap_or("").to_string();
    for b in &blocks[1..] {
        assert_eq!(body(b), body(blocks[0]), "idle path must not move");
    }
}

#[test]
fn simulate_moves_the_locomotive_one_cell_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "run.scn", "kind=horizontal\nlocomotive=10\n");
    let out = heptaca(&[
        "simulate",
        "--rules",
        fixture().to_str().unwrap(),
        "--scenario",
        scenario.to_str().unwrap(),
        "--steps",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let stdout = stdout_of(&out);
    let mut rears = Vec::new();
    let mut tick = String::new();
    for line in stdout.lines() {
        if let Some(t) = line.strip_prefix("== ") {
            tick = t.trim_end_matches(" ==").to_string();
        } else if let Some(cell) = line.strip_suffix(" R") {
            rears.push((tick.clone(), cell.to_string()));
        }
    }
    assert_eq!(
        rears,
        [
            ("t=0".to_string(), "1:22".to_string()),
            ("t=1".to_string(), "1:23".to_string()),
            ("t=2".to_string(), "1:24".to_string()),
        ]
    );
}

#[test]
fn simulate_reports_missing_rules() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "idle.scn", "kind=horizontal\n");
    let empty = write(dir.path(), "empty.txt", "# no rules\n");
    let out = heptaca(&[
        "simulate",
        "--rules",
        empty.to_str().unwrap(),
        "--scenario",
        scenario.to_str().unwrap(),
        "--steps",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("missing"));
}

#[test]
fn region_cap_stops_big_builds() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "idle.scn", "kind=horizontal\n");
    let out = Command::new(env!("CARGO_BIN_EXE_heptaca"))
        .args([
            "simulate",
            "--rules",
            fixture().to_str().unwrap(),
            "--scenario",
            scenario.to_str().unwrap(),
        ])
        .env("HEPTACA_MAX_CELLS", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr_of(&out).contains("cap"));
}

#[test]
fn render_writes_a_picture() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "run.scn", "kind=horizontal\nlocomotive=10\n");
    let svg_path = dir.path().join("picture.svg");
    let out = heptaca(&[
        "render",
        "--scenario",
        scenario.to_str().unwrap(),
        "--style",
        "plain",
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg "));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polygon").count(), 4264);

    let out = heptaca(&[
        "render",
        "--scenario",
        scenario.to_str().unwrap(),
        "--style",
        "neon",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn elicit_reports_a_complete_table() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "idle.scn", "kind=horizontal\n");
    let answers = write(dir.path(), "answers.txt", "# none needed\n");
    let out = heptaca(&[
        "elicit",
        "--rules",
        fixture().to_str().unwrap(),
        "--scenario",
        scenario.to_str().unwrap(),
        "--steps",
        "2",
        "--answers",
        answers.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("no gaps"));
}

#[test]
fn elicit_runs_dry_with_too_few_answers() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "idle.scn", "kind=horizontal\n");
    let empty_rules = write(dir.path(), "empty.txt", "");
    let answers = write(dir.path(), "answers.txt", "W\nW\n");
    let out = heptaca(&[
        "elicit",
        "--rules",
        empty_rules.to_str().unwrap(),
        "--scenario",
        scenario.to_str().unwrap(),
        "--steps",
        "1",
        "--answers",
        answers.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("out of answers"));
}

#[test]
fn elicit_refills_a_gap_and_appends_it() {
    let dir = tempfile::tempdir().unwrap();
    // drop the blank-keeps-blank rule; the idle path needs it everywhere
    let full = std::fs::read_to_string(fixture()).unwrap();
    let gapped: String = full
        .lines()
        .filter(|l| l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()
            != ["W"; 9])
        .map(|l| format!("{l}\n"))
        .collect();
    let removed = full.lines().count() - gapped.lines().count();
    assert!(removed > 0, "the shipped table spells out the blank rule");
    let rules = write(dir.path(), "gapped.txt", &gapped);
    let scenario = write(dir.path(), "idle.scn", "kind=horizontal\n");
    let answers = write(dir.path(), "answers.txt", "W\n");
    let out = heptaca(&[
        "elicit",
        "--rules",
        rules.to_str().unwrap(),
        "--scenario",
        scenario.to_str().unwrap(),
        "--steps",
        "2",
        "--answers",
        answers.to_str().unwrap(),
        "--append",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let stdout = stdout_of(&out);
    assert!(stdout.contains("accepted 1 rule(s):"), "{stdout}");
    assert!(stdout.contains("W W W W W W W W W"));
    assert!(stdout.contains("appended to"));
    // the file now audits back to the full class count
    let out = heptaca(&["audit", "--rules", rules.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let expected = format!("RAW={} MINIMAL=589 CONFLICTS=0", 1168 - removed + 1);
    assert!(
        stdout_of(&out).starts_with(&expected),
        "want {expected}, got {}",
        stdout_of(&out).lines().next().unwrap_or("")
    );
}

#[test]
fn scenario_list_names_every_kind() {
    let out = heptaca(&["scenario-list"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = stdout_of(&out);
    for name in ["horizontal", "vertical", "sliproad", "crossing", "switch-memory-right"] {
        assert!(stdout.contains(name), "missing {name}");
    }
}
