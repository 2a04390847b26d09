use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use parkwatch::frames::{read_pgm, FrameDir};
use parkwatch::motion::{parse_events_jsonl, EventKind};

fn parkwatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parkwatch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn simulate(script: &str, seed: &str, out: &Path) {
    let o = parkwatch(&["simulate", "--script", script, "--seed", seed, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn run_args(dir: &Path) -> Vec<String> {
    vec![
        "run".into(),
        "--frames".into(),
        dir.join("frames").display().to_string(),
        "--detections".into(),
        dir.join("detections.csv").display().to_string(),
        "--roi".into(),
        dir.join("roi.txt").display().to_string(),
    ]
}

fn run(dir: &Path, extra: &[&str]) -> Output {
    let mut args = run_args(dir);
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    parkwatch(&refs)
}

#[test]
fn simulate_then_run_reproduces_expected_log() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    simulate("builtin:figure5", "0", dir);
    assert_eq!(FrameDir::open(&dir.join("frames")).unwrap().len(), 900);

    let events = dir.join("events.jsonl");
    let ann = dir.join("ann");
    let o = run(
        dir,
        &["--events", events.to_str().unwrap(), "--annotate", ann.to_str().unwrap(), "--annotate-frames"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let got = fs::read(&events).unwrap();
    let want = fs::read(dir.join("expected_events.jsonl")).unwrap();
    assert_eq!(got, want);

    let records = fs::read_to_string(ann.join("annotations.jsonl")).unwrap();
    assert!(records.lines().count() > 1000);
    assert!(records.lines().any(|l| l.contains("\"Illegal\"")));
    // an outlined copy: frame 500 has A and B illegal (black), C tracked (white)
    let copy = read_pgm(&ann.join("frames").join("frame_000500.pgm"), 500).unwrap();
    let plain = read_pgm(&dir.join("frames").join("frame_000500.pgm"), 500).unwrap();
    assert_ne!(copy, plain);
    assert!(copy.pixels().contains(&0));
    assert!(copy.pixels().contains(&255));
}

#[test]
fn events_go_to_stdout_by_default() {
    let tmp = tempfile::tempdir().unwrap();
    let script = tmp.path().join("scene.txt");
    fs::write(
        &script,
        "frames = 400\nroi = 10,10 310,10 310,230 10,230\nactor A 40 20 5\nkey A 0 100 100\n",
    )
    .unwrap();
    simulate(script.to_str().unwrap(), "3", tmp.path());
    let o = run(tmp.path(), &[]);
    assert!(o.status.success());
    let events = parse_events_jsonl(&String::from_utf8(o.stdout).unwrap()).unwrap();
    let kinds: Vec<(EventKind, u64)> = events.iter().map(|e| (e.kind, e.frame)).collect();
    assert_eq!(kinds, vec![(EventKind::TrackCreated, 0), (EventKind::IllegalStart, 375)]);
}

#[test]
fn config_file_and_flag_precedence_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let script = tmp.path().join("scene.txt");
    fs::write(
        &script,
        "frames = 300\nroi = 10,10 310,10 310,230 10,230\nactor A 40 20 5\nkey A 0 100 100\n",
    )
    .unwrap();
    simulate(script.to_str().unwrap(), "0", tmp.path());
    let cfg = tmp.path().join("pw.conf");
    fs::write(&cfg, "# shorter alarm\ntau = 4\n").unwrap();

    let starts = |o: Output| -> Vec<u64> {
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        parse_events_jsonl(&String::from_utf8(o.stdout).unwrap())
            .unwrap()
            .iter()
            .filter(|e| e.kind == EventKind::IllegalStart)
            .map(|e| e.frame)
            .collect()
    };
    assert_eq!(starts(run(tmp.path(), &["--config", cfg.to_str().unwrap()])), vec![100]);
    assert_eq!(
        starts(run(tmp.path(), &["--config", cfg.to_str().unwrap(), "--tau", "2"])),
        vec![50]
    );
    assert_eq!(starts(run(tmp.path(), &[])), Vec::<u64>::new());
}

#[test]
fn missing_roi_is_usage_error() {
    let o = parkwatch(&["run", "--frames", "f", "--detections", "d"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--roi"));
}

#[test]
fn unreadable_inputs_are_data_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let roi = tmp.path().join("roi.txt");
    fs::write(&roi, "0 0\n10 0\n10 10\n").unwrap();
    let o = parkwatch(&[
        "run",
        "--frames",
        tmp.path().to_str().unwrap(),
        "--detections",
        "/nonexistent/dets.csv",
        "--roi",
        roi.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dets.csv"));

    let bad_script = tmp.path().join("bad.txt");
    fs::write(&bad_script, "frames = 10\nroi = 0,0 9,0 9,9\nactor A 20 20 1\nkey A 0 500 500\n").unwrap();
    let o = parkwatch(&["simulate", "--script", bad_script.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn frame_gap_is_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let script = tmp.path().join("scene.txt");
    fs::write(
        &script,
        "frames = 30\nroi = 10,10 310,10 310,230 10,230\nactor A 40 20 5\nkey A 0 100 100\n",
    )
    .unwrap();
    simulate(script.to_str().unwrap(), "0", tmp.path());
    fs::remove_file(tmp.path().join("frames").join("frame_000007.pgm")).unwrap();
    let o = run(tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sequence"));
}

#[test]
fn async_mode_runs() {
    let tmp = tempfile::tempdir().unwrap();
    simulate("builtin:figure5", "1", tmp.path());
    let o = run(tmp.path(), &["--mode", "async", "--max-lag", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let events = parse_events_jsonl(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(events.iter().filter(|e| e.kind == EventKind::IllegalStart).count(), 3);
}

#[test]
fn anchors_prints_centers() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("boxes.csv");
    fs::write(&csv, "0,0,0,100,50,0,1\n1,0,0,10,7,0,1\n").unwrap();
    let o = parkwatch(&["anchors", csv.to_str().unwrap(), "--k", "2"]);
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("0.5 0.7"), "{out}");
}
