use std::convert::Infallible;

use parkwatch::motion::{events_to_jsonl, EventKind};
use parkwatch::pipeline::{run_pipeline, FileDetector, Mode, PipelineConfig};
use parkwatch::sim::{scenario_figure5, scenario_figure5_low_contrast, Scenario, ScenarioScript};

fn run(scenario: &Scenario, seed: u64, cfg: &PipelineConfig) -> String {
    let dets = scenario.detections(seed);
    let frames = scenario.frames().map(Ok::<_, Infallible>);
    let out = run_pipeline(frames, &mut FileDetector::new(&dets), &scenario.script().roi, cfg).unwrap();
    events_to_jsonl(&out.events)
}

fn check(script: ScenarioScript, seed: u64) {
    let scenario = Scenario::new(script).unwrap();
    let cfg = scenario.pipeline_config();
    let expected = events_to_jsonl(&scenario.expected_events(seed, &cfg).unwrap());
    let got = run(&scenario, seed, &cfg);
    if got != expected {
        let diff: Vec<String> = got
            .lines()
            .zip(expected.lines())
            .filter(|(g, e)| g != e)
            .take(3)
            .map(|(g, e)| format!("got  {g}\nwant {e}"))
            .collect();
        panic!(
            "event logs differ ({} vs {} lines)\n{}",
            got.lines().count(),
            expected.lines().count(),
            diff.join("\n")
        );
    }
}

#[test]
fn figure5_matches_expected_log() {
    check(scenario_figure5(), 0);
}

#[test]
fn figure5_other_seeds() {
    for seed in [1, 2, 3] {
        check(scenario_figure5(), seed);
    }
}

#[test]
fn low_contrast_matches_expected_log() {
    check(scenario_figure5_low_contrast(), 0);
}

#[test]
fn parked_from_frame_zero() {
    let script = ScenarioScript::parse(
        "frames = 420\nroi = 10,10 310,10 310,230 10,230\nactor A 40 20 5\nkey A 0 100 100\n",
    )
    .unwrap();
    let scenario = Scenario::new(script.clone()).unwrap();
    let ev = scenario.expected_events(4, &scenario.pipeline_config()).unwrap();
    assert!(ev.iter().any(|e| e.kind == EventKind::IllegalStart && e.frame == 375));
    check(script, 4);
}

#[test]
fn mover_in_and_out_of_roi() {
    // enters the roi, stops for 200 frames, leaves through the bottom edge
    let script = ScenarioScript::parse(
        "frames = 400\nroi = 20,60 300,60 300,180 20,180\n\
         actor A 32 20 8 0.95\nkey A 0 40 30\nkey A 20 120 110\nkey A 220 120 110\nkey A 240 120 210\n\
         actor B 24 24 9 0.7\nkey B 0 260 100\nkey B 390 260 100\n",
    )
    .unwrap();
    let scenario = Scenario::new(script.clone()).unwrap();
    let ev = scenario.expected_events(11, &scenario.pipeline_config()).unwrap();
    assert!(ev.iter().any(|e| e.kind == EventKind::TrackDropped));
    check(script, 11);
}

#[test]
fn untracked_low_confidence_actor() {
    let script = ScenarioScript::parse(
        "frames = 120\nroi = 10,10 310,10 310,230 10,230\nactor A 40 20 5 0.3\nkey A 0 100 100\n",
    )
    .unwrap();
    let scenario = Scenario::new(script.clone()).unwrap();
    assert!(scenario.expected_events(0, &scenario.pipeline_config()).unwrap().is_empty());
    check(script, 0);
}

#[test]
fn sync_runs_are_byte_identical() {
    let scenario = Scenario::new(scenario_figure5()).unwrap();
    let cfg = scenario.pipeline_config();
    assert_eq!(run(&scenario, 5, &cfg), run(&scenario, 5, &cfg));
}

#[test]
fn async_merges_within_lag_and_all_land() {
    let scenario = Scenario::new(scenario_figure5()).unwrap();
    let cfg = PipelineConfig {
        mode: Mode::Async,
        max_detection_lag: 3,
        ..scenario.pipeline_config()
    };
    let dets = scenario.detections(0);
    let frames = scenario.frames().map(Ok::<_, Infallible>);
    let out = run_pipeline(frames, &mut FileDetector::new(&dets), &scenario.script().roi, &cfg).unwrap();
    let merges = &out.final_state.merges;
    let scheduled: Vec<u64> = (0..900).filter(|i| i % 25 == 0).collect();
    let merged: Vec<u64> = merges.iter().map(|m| m.detection_frame).collect();
    assert_eq!(merged, scheduled);
    assert!(merges.iter().all(|m| m.lag <= 3));
    // every actor that parks in the roi is still flagged
    let starts = out.events.iter().filter(|e| e.kind == EventKind::IllegalStart).count();
    assert_eq!(starts, 3);
}
