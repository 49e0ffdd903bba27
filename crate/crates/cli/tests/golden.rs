//! End-to-end runs of the `touchscope` binary against checked-in fixtures.
//! Set `UPDATE_GOLDEN=1` to rewrite the expected outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn touchscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_touchscope"))
        .args(args)
        .output()
        .expect("run touchscope")
}

fn ok(args: &[&str]) -> String {
    let out = touchscope(args);
    assert!(
        out.status.success(),
        "touchscope {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn check_golden(name: &str, actual: &str) {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| {
        panic!(
            "missing golden {}; run with UPDATE_GOLDEN=1",
            path.display()
        )
    });
    assert!(expected == actual, "{name} differs from golden:\n{actual}");
}

#[test]
fn fixtures_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["synth", "--out", dir.path().to_str().unwrap()]);
    for name in [
        "novice.log",
        "expert.log",
        "two-motif.log",
        "two-motif.labels",
        "skills.regions",
        "ui.regions",
    ] {
        let fresh = fs::read(dir.path().join(name)).unwrap();
        let checked_in = fs::read(fixtures().join(name)).unwrap();
        assert!(
            fresh == checked_in,
            "{name} no longer matches the generator"
        );
    }
}

#[test]
fn layout_reports_match_golden() {
    for name in ["novice", "expert"] {
        let out = tempfile::tempdir().unwrap();
        let outdir = out.path().to_str().unwrap();
        let log = fixture(&format!("{name}.log"));
        let regions = fixture("skills.regions");
        let stdout = ok(&["layout", &log, "--regions", &regions, "--out", outdir]);
        let summary = fs::read_to_string(out.path().join(format!("{name}-layout.txt"))).unwrap();
        assert_eq!(stdout, summary);
        check_golden(&format!("{name}-layout.txt"), &summary);

        let svg = fs::read(out.path().join(format!("{name}-layout.svg"))).unwrap();
        let again = tempfile::tempdir().unwrap();
        ok(&[
            "layout",
            &log,
            "--regions",
            &regions,
            "--out",
            again.path().to_str().unwrap(),
        ]);
        assert_eq!(
            svg,
            fs::read(again.path().join(format!("{name}-layout.svg"))).unwrap()
        );
        assert!(svg.starts_with(b"<svg"));
    }
}

#[test]
fn expert_arcs_are_followed_by_combos() {
    let session = touchscope_cli::load_log(&fixtures().join("expert.log")).unwrap();
    let regions = touchscope_cli::read_regions(&fixtures().join("skills.regions")).unwrap();
    let out = touchscope_cli::cmd_layout(&session, &regions, &Default::default()).unwrap();
    assert!(out.summary.contains("semantic_rings=5"));
    let layout =
        touchscope_core::build_layout_with_regions(&session, &regions, &Default::default())
            .unwrap();
    let mut long: Vec<_> = layout
        .arcs
        .iter()
        .filter(|a| a.duration > 10_000.0)
        .collect();
    long.sort_by(|a, b| a.start_angle.total_cmp(&b.start_angle));
    assert_eq!(long.len(), 4);
    for (i, arc) in long.iter().enumerate() {
        let until = long
            .get(i + 1)
            .map_or(std::f64::consts::TAU, |next| next.start_angle);
        let combo: Vec<u32> = layout
            .semantic_dots
            .iter()
            .filter(|d| d.angle > arc.end_angle && d.angle < until)
            .map(|d| d.ring_index)
            .collect();
        // the combo reads outward ring by ring, in clockwise order
        assert_eq!(combo, [0, 1, 2, 3, 4], "after arc {}", arc.gesture_id);
    }
}

#[test]
fn cluster_report_matches_golden() {
    let args = [
        "cluster",
        &fixture("novice.log"),
        &fixture("expert.log"),
        "--regions",
        &fixture("ui.regions"),
        "--k",
        "3",
        "--seed",
        "7",
    ];
    let first = ok(&args);
    check_golden("novice-expert-cluster.txt", &first);
    assert_eq!(first, ok(&args), "rerun with the same seed differs");
}

#[test]
fn two_motif_sizes_match_manifest() {
    let labels = fs::read_to_string(fixtures().join("two-motif.labels")).unwrap();
    let zeros = labels.lines().filter(|l| l.ends_with(",0")).count();
    let ones = labels.lines().filter(|l| l.ends_with(",1")).count();
    let report = ok(&[
        "cluster",
        &fixture("two-motif.log"),
        "--k",
        "2",
        "--seed",
        "1",
        "--min-length-px",
        "50",
    ]);
    check_golden("two-motif-cluster.txt", &report);
    let mut sizes: Vec<usize> = report
        .lines()
        .skip(3)
        .map(|l| l.split(" | ").nth(1).unwrap().parse().unwrap())
        .collect();
    sizes.sort();
    let mut expected = vec![zeros, ones];
    expected.sort();
    assert_eq!(sizes, expected);

    let one = ok(&[
        "cluster",
        &fixture("two-motif.log"),
        "--k",
        "1",
        "--min-length-px",
        "50",
    ]);
    assert!(one.contains(&format!("0 | {} |", zeros + ones)), "{one}");
}

#[test]
fn verify_ui_report_matches_golden() {
    let out = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "verify-ui",
        &fixture("novice.log"),
        &fixture("expert.log"),
        "--regions",
        &fixture("ui.regions"),
        "--confidence",
        "0.95,0.99",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    check_golden("ui-report.txt", &stdout);
    assert_eq!(
        stdout,
        fs::read_to_string(out.path().join("ui-report.txt")).unwrap()
    );
    assert!(out.path().join("ui-overlay.svg").exists());
}

#[test]
fn ingest_minimal_and_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let minimal = dir.path().join("tiny.log");
    fs::write(
        &minimal,
        "#device,1920,1080,110.7,62.3\n0,0,D,10,10\n16,0,M,12,10\n32,0,U,14,10\n",
    )
    .unwrap();
    let out = ok(&["ingest", minimal.to_str().unwrap()]);
    assert!(out.contains("1 gesture,"), "{out}");

    let corrupt = dir.path().join("bad.log");
    fs::write(
        &corrupt,
        "#device,1920,1080,110.7,62.3\n0,0,D,10,10\nnonsense\n32,0,U,x,10\n",
    )
    .unwrap();
    let out = touchscope(&["ingest", corrupt.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lines [3, 4]"), "{err}");
}

#[test]
fn ingest_corpus_directory() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["synth", "--out", dir.path().to_str().unwrap()]);
    let out = ok(&["ingest", dir.path().join("corpus").to_str().unwrap()]);
    let manifest = fs::read_to_string(dir.path().join("corpus/manifest.csv")).unwrap();
    assert_eq!(out.lines().count(), 45);
    for (line, entry) in out.lines().zip(manifest.lines()) {
        let fields: Vec<&str> = entry.split(',').collect();
        let expected = format!("{}: {} events, {} gesture", fields[0], fields[2], fields[1]);
        assert!(line.starts_with(&expected), "{line} vs {entry}");
    }
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("single.log");
    fs::write(&single, "#device,1920,1080,110.7,62.3\n0,0,D,10,10\n").unwrap();
    let out = touchscope(&["layout", single.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("period"));

    let empty = dir.path().join("empty.log");
    fs::write(&empty, "#device,1920,1080,110.7,62.3\n").unwrap();
    assert!(!touchscope(&["layout", empty.to_str().unwrap()])
        .status
        .success());

    let out = touchscope(&[
        "cluster",
        &fixture("expert.log"),
        "--k",
        "50",
        "--min-length-px",
        "100",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fewer than k = 50"));
}

#[test]
fn empty_region_is_flagged_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let regions = dir.path().join("r.regions");
    fs::write(&regions, "joystick,0,300,800,220\ncorner,1,50,50,20\n").unwrap();
    let out = ok(&[
        "verify-ui",
        &fixture("expert.log"),
        "--regions",
        regions.to_str().unwrap(),
    ]);
    let flagged: Vec<&str> = out.lines().filter(|l| l.starts_with("corner")).collect();
    assert_eq!(flagged.len(), 2);
    assert!(
        flagged
            .iter()
            .all(|l| l.ends_with("FLAGGED EmptySelection")),
        "{out}"
    );
}
