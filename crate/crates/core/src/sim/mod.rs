//! Deterministic synthetic scenarios: textured rectangles moving over a flat
//! background, a matching detection file, and the event log the pipeline is
//! expected to produce on them.
//!
//! The expected log is computed from the script alone. A tracked box is the
//! actor's true box shifted by the integer offset picked up when its template
//! was last cut from a (rounded) detection box; scripts are validated so that
//! this offset can never blur the line between standing still and moving.

mod script;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::detection::{Detection, DetectionSet, CLASS_CAR};
use crate::frames::{frame_file_name, write_pgm, FrameIoError};
use crate::geometry::{round_half_up, BBox, Frame};
use crate::motion::{events_to_jsonl, AlarmEvent, EventKind};
use crate::pipeline::PipelineConfig;

pub use script::{Actor, Keyframe, ScenarioScript};

/// Actor boxes must keep this many pixels from every frame edge.
pub const BORDER_PX: i64 = 2;
/// Minimum gap between any two actor boxes.
pub const MIN_GAP_PX: i64 = 4;
/// Minimum actor width and height.
pub const MIN_ACTOR_SIZE: u32 = 16;
/// Largest allowed per-frame displacement of an actor.
pub const MAX_STEP_PX: f64 = 8.0;
/// Minimum texture span, so templates never have zero variance.
pub const MIN_CONTRAST: u8 = 8;

pub const DETECTIONS_FILE: &str = "detections.csv";
pub const EXPECTED_EVENTS_FILE: &str = "expected_events.jsonl";
pub const ROI_FILE: &str = "roi.txt";
pub const FRAMES_DIR: &str = "frames";

#[derive(Debug, Clone, Error, PartialEq)]
pub struct ScriptError {
    pub line: Option<usize>,
    pub message: String,
}

impl ScriptError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ScriptError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "script line {l}: {}", self.message),
            None => write!(f, "script: {}", self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    Frames(#[from] FrameIoError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Canonical three-actor scene: A and B park early, C parks later, B then C
/// drive off, A stays parked to the end.
pub fn scenario_figure5() -> ScenarioScript {
    ScenarioScript::parse(FIGURE5).expect("builtin script is valid")
}

/// The same scene with textures barely distinguishable from the background.
pub fn scenario_figure5_low_contrast() -> ScenarioScript {
    ScenarioScript {
        contrast: 24,
        ..scenario_figure5()
    }
}

const FIGURE5: &str = "\
width = 320
height = 240
fps = 25
frames = 900
background = 128
contrast = 160
jitter = 0.5
roi = 20,80 300,80 310,220 10,220
actor A 48 24 11 0.9
key A 0 60 30
key A 40 70 200
actor B 48 24 22 0.85
key B 0 260 20
key B 45 250 200
key B 600 250 200
key B 606 250 226
actor C 48 24 33 0.8
key C 0 150 30
key C 250 150 30
key C 280 150 150
key C 800 150 150
key C 830 150 30
";

pub fn builtin(name: &str) -> Option<ScenarioScript> {
    match name {
        "figure5" => Some(scenario_figure5()),
        "figure5-lowcontrast" => Some(scenario_figure5_low_contrast()),
        _ => None,
    }
}

pub const BUILTIN_NAMES: &[&str] = &["figure5", "figure5-lowcontrast"];

/// A validated script with every actor's integer box precomputed per frame.
#[derive(Debug, Clone)]
pub struct Scenario {
    script: ScenarioScript,
    /// `truth[actor][frame]` top-left corner.
    truth: Vec<Vec<(i64, i64)>>,
    textures: Vec<Vec<u8>>,
}

impl Scenario {
    /// Validates the script against the default motion threshold.
    pub fn new(script: ScenarioScript) -> Result<Self, ScriptError> {
        let eps = PipelineConfig::default().epsilon_px;
        Self::with_epsilon(script, eps)
    }

    pub fn with_epsilon(script: ScenarioScript, epsilon: f64) -> Result<Self, ScriptError> {
        if script.contrast < MIN_CONTRAST {
            return Err(ScriptError::general(format!(
                "contrast must be at least {MIN_CONTRAST}"
            )));
        }
        let truth: Vec<Vec<(i64, i64)>> = script
            .actors
            .iter()
            .map(|a| {
                (0..script.frames)
                    .map(|f| {
                        let c = a.center_at(f);
                        (
                            round_half_up(c.x - a.width as f64 / 2.0),
                            round_half_up(c.y - a.height as f64 / 2.0),
                        )
                    })
                    .collect()
            })
            .collect();
        let textures = script
            .actors
            .iter()
            .map(|a| texture(a, script.background, script.contrast))
            .collect();
        let scenario = Self {
            script,
            truth,
            textures,
        };
        scenario.check_geometry()?;
        scenario.check_motion(epsilon)?;
        Ok(scenario)
    }

    fn check_geometry(&self) -> Result<(), ScriptError> {
        let (fw, fh) = (self.script.width as i64, self.script.height as i64);
        for (ai, a) in self.script.actors.iter().enumerate() {
            if a.width < MIN_ACTOR_SIZE || a.height < MIN_ACTOR_SIZE {
                return Err(ScriptError::general(format!(
                    "actor {:?} is smaller than {MIN_ACTOR_SIZE}x{MIN_ACTOR_SIZE}",
                    a.name
                )));
            }
            let (w, h) = (a.width as i64, a.height as i64);
            for (f, &(x, y)) in self.truth[ai].iter().enumerate() {
                if x < BORDER_PX || y < BORDER_PX || x + w > fw - BORDER_PX || y + h > fh - BORDER_PX {
                    return Err(ScriptError::general(format!(
                        "actor {:?} leaves the frame at frame {f}",
                        a.name
                    )));
                }
            }
        }
        for i in 0..self.script.actors.len() {
            for j in i + 1..self.script.actors.len() {
                for f in 0..self.script.frames as usize {
                    let (a, b) = (self.truth_rect(i, f), self.truth_rect(j, f));
                    let apart = a.0 + a.2 + MIN_GAP_PX <= b.0
                        || b.0 + b.2 + MIN_GAP_PX <= a.0
                        || a.1 + a.3 + MIN_GAP_PX <= b.1
                        || b.1 + b.3 + MIN_GAP_PX <= a.1;
                    if !apart {
                        return Err(ScriptError::general(format!(
                            "actors {:?} and {:?} come closer than {MIN_GAP_PX} px at frame {f}",
                            self.script.actors[i].name, self.script.actors[j].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Per-frame motion must be either zero or clearly above `epsilon`, so
    /// that sub-pixel re-anchoring at a merge cannot flip the outcome.
    fn check_motion(&self, epsilon: f64) -> Result<(), ScriptError> {
        for (ai, a) in self.script.actors.iter().enumerate() {
            for f in 1..self.truth[ai].len() {
                let (x0, y0) = self.truth[ai][f - 1];
                let (x1, y1) = self.truth[ai][f];
                let d = ((x1 - x0) as f64).hypot((y1 - y0) as f64);
                if d == 0.0 {
                    continue;
                }
                if d <= epsilon + 1.0 {
                    return Err(ScriptError::general(format!(
                        "actor {:?} moves {d:.2} px at frame {f}; moves must exceed {} px",
                        a.name,
                        epsilon + 1.0
                    )));
                }
                if d > MAX_STEP_PX {
                    return Err(ScriptError::general(format!(
                        "actor {:?} moves {d:.2} px at frame {f}; at most {MAX_STEP_PX} px allowed",
                        a.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn script(&self) -> &ScenarioScript {
        &self.script
    }

    fn truth_rect(&self, actor: usize, frame: usize) -> (i64, i64, i64, i64) {
        let (x, y) = self.truth[actor][frame];
        let a = &self.script.actors[actor];
        (x, y, a.width as i64, a.height as i64)
    }

    /// Ground-truth box of an actor at a frame.
    pub fn truth_box(&self, actor: usize, frame: u64) -> BBox {
        let (x, y, w, h) = self.truth_rect(actor, frame as usize);
        BBox::new(x as f64, y as f64, w as f64, h as f64).expect("actor has positive size")
    }

    /// Default pipeline settings at the scenario's frame rate.
    pub fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            fps: self.script.fps,
            ..PipelineConfig::default()
        }
    }

    pub fn render_frame(&self, index: u64) -> Frame {
        let s = &self.script;
        let mut frame = Frame::filled(index, s.width, s.height, s.background);
        for (ai, a) in s.actors.iter().enumerate() {
            let (x, y) = self.truth[ai][index as usize];
            let (w, h) = (a.width as usize, a.height as usize);
            let stride = s.width;
            let px = frame.pixels_mut();
            for r in 0..h {
                let row = (y as usize + r) * stride + x as usize;
                px[row..row + w].copy_from_slice(&self.textures[ai][r * w..(r + 1) * w]);
            }
        }
        frame
    }

    pub fn frames(&self) -> impl Iterator<Item = Frame> + '_ {
        (0..self.script.frames).map(|i| self.render_frame(i))
    }

    /// One detection per actor per frame, with seeded center jitter.
    /// Returns `(actor index, detection)` in actor order within each frame.
    fn jittered(&self, seed: u64) -> Vec<(usize, Detection)> {
        let s = &self.script;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = (s.jitter_sigma > 0.0).then(|| Normal::new(0.0, s.jitter_sigma).expect("sigma is valid"));
        let clip = 2.0 * s.jitter_sigma;
        let mut out = Vec::with_capacity(s.frames as usize * s.actors.len());
        for f in 0..s.frames {
            for (ai, a) in s.actors.iter().enumerate() {
                let (mut jx, mut jy) = match &normal {
                    Some(n) => (n.sample(&mut rng), n.sample(&mut rng)),
                    None => (0.0, 0.0),
                };
                let r = jx.hypot(jy);
                if r > clip {
                    jx *= clip / r;
                    jy *= clip / r;
                }
                let (x, y) = self.truth[ai][f as usize];
                let bbox = BBox::new(
                    quantize(x as f64 + jx),
                    quantize(y as f64 + jy),
                    a.width as f64,
                    a.height as f64,
                )
                .expect("actor has positive size");
                out.push((
                    ai,
                    Detection {
                        frame_index: f,
                        bbox,
                        class_id: CLASS_CAR,
                        confidence: a.confidence,
                    },
                ));
            }
        }
        out
    }

    pub fn detections(&self, seed: u64) -> DetectionSet {
        DetectionSet::from_detections(self.jittered(seed).into_iter().map(|(_, d)| d))
            .with_declared_frames(self.script.frames)
    }

    /// The log `run_pipeline` must produce on this scenario's frames and the
    /// detections drawn with `seed`, under `cfg`.
    pub fn expected_events(&self, seed: u64, cfg: &PipelineConfig) -> Result<Vec<AlarmEvent>, ScriptError> {
        self.check_motion(cfg.epsilon_px)?;
        let script = &self.script;
        let need = cfg.motion().frames_to_alarm();
        let seconds = |frames: u64| frames as f64 / cfg.fps;

        let mut per_frame: Vec<Vec<(usize, Detection)>> = vec![Vec::new(); script.frames as usize];
        for (ai, d) in self.jittered(seed) {
            per_frame[d.frame_index as usize].push((ai, d));
        }

        let mut events = Vec::new();
        let mut tracks: Vec<SimTrack> = Vec::new();
        let mut next_id = 1;
        let mut event = |kind, frame, track_id, bbox, stationary| {
            events.push(AlarmEvent {
                kind,
                frame,
                track_id,
                bbox,
                stationary_seconds: seconds(stationary),
            })
        };
        for f in 0..script.frames {
            let fu = f as usize;
            let mut kept = Vec::with_capacity(tracks.len());
            for mut t in tracks {
                let (tx, ty) = self.truth[t.actor][fu];
                let moved = self.truth[t.actor][fu - 1] != (tx, ty);
                let a = &script.actors[t.actor];
                t.bbox = BBox::new(
                    (tx + t.offset.0) as f64,
                    (ty + t.offset.1) as f64,
                    a.width as f64,
                    a.height as f64,
                )
                .expect("actor has positive size");
                if moved {
                    if t.illegal {
                        event(EventKind::IllegalEnd, f, t.id, t.bbox, t.stationary);
                    }
                    t.stationary = 0;
                    t.illegal = false;
                } else {
                    t.stationary += 1;
                    if !t.illegal && t.stationary >= need {
                        t.illegal = true;
                        event(EventKind::IllegalStart, f, t.id, t.bbox, t.stationary);
                    }
                }
                if script.roi.contains(t.bbox.center()) {
                    kept.push(t);
                } else {
                    event(EventKind::TrackDropped, f, t.id, t.bbox, t.stationary);
                }
            }
            tracks = kept;

            if !cfg.is_redetect_frame(f) {
                continue;
            }
            let mut dets: Vec<(usize, Detection)> = per_frame[fu]
                .iter()
                .copied()
                .filter(|(_, d)| {
                    d.confidence >= cfg.conf_threshold
                        && cfg.allowed_classes.contains(&d.class_id)
                        && script.roi.contains(d.bbox.center())
                })
                .collect();
            dets.sort_by(|a, b| b.1.confidence.total_cmp(&a.1.confidence));

            let mut pairs = Vec::new();
            for (ti, t) in tracks.iter().enumerate() {
                for (di, (_, d)) in dets.iter().enumerate() {
                    let v = t.bbox.iou(&d.bbox);
                    if v > cfg.iou_threshold {
                        pairs.push((v, t.id, di, ti));
                    }
                }
            }
            pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            let mut track_hit = vec![false; tracks.len()];
            let mut det_hit = vec![false; dets.len()];
            for (_, _, di, ti) in pairs {
                if track_hit[ti] || det_hit[di] {
                    continue;
                }
                track_hit[ti] = true;
                det_hit[di] = true;
                let t = &mut tracks[ti];
                let (ai, d) = &dets[di];
                // the matched detection re-anchors the track on its own actor
                debug_assert_eq!(*ai, t.actor);
                let (tx, ty) = self.truth[*ai][fu];
                t.offset = (round_half_up(d.bbox.x()) - tx, round_half_up(d.bbox.y()) - ty);
                t.bbox = d.bbox;
                t.missed = 0;
            }
            let mut kept = Vec::with_capacity(tracks.len());
            for (t, hit) in tracks.into_iter().zip(track_hit) {
                if hit {
                    kept.push(t);
                    continue;
                }
                let mut t = t;
                t.missed += 1;
                if t.missed >= crate::pipeline::MAX_MISSED_CYCLES {
                    event(EventKind::TrackDropped, f, t.id, t.bbox, t.stationary);
                } else {
                    kept.push(t);
                }
            }
            tracks = kept;
            for (di, (ai, d)) in dets.iter().enumerate() {
                if det_hit[di] {
                    continue;
                }
                let (tx, ty) = self.truth[*ai][fu];
                tracks.push(SimTrack {
                    id: next_id,
                    actor: *ai,
                    offset: (round_half_up(d.bbox.x()) - tx, round_half_up(d.bbox.y()) - ty),
                    bbox: d.bbox,
                    stationary: 0,
                    illegal: false,
                    missed: 0,
                });
                event(EventKind::TrackCreated, f, next_id, d.bbox, 0);
                next_id += 1;
            }
        }
        events.sort_by_key(|e| (e.frame, e.track_id));
        Ok(events)
    }
}

#[derive(Debug, Clone)]
struct SimTrack {
    id: u64,
    actor: usize,
    offset: (i64, i64),
    bbox: BBox,
    stationary: u64,
    illegal: bool,
    missed: u32,
}

fn quantize(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn texture(a: &Actor, background: u8, contrast: u8) -> Vec<u8> {
    let lo = background.saturating_sub(contrast / 2);
    let hi = lo.saturating_add(contrast);
    let mut rng = ChaCha8Rng::seed_from_u64(a.texture_seed);
    (0..a.width as usize * a.height as usize)
        .map(|_| rng.random_range(lo..=hi))
        .collect()
}

/// Everything a scenario produces, held in memory.
#[derive(Debug, Clone)]
pub struct RenderedScenario {
    pub scenario: Scenario,
    pub frames: Vec<Frame>,
    pub detections: DetectionSet,
    pub expected: Vec<AlarmEvent>,
}

pub fn render_scenario(script: &ScenarioScript, seed: u64) -> Result<RenderedScenario, ScriptError> {
    let scenario = Scenario::new(script.clone())?;
    let expected = scenario.expected_events(seed, &scenario.pipeline_config())?;
    Ok(RenderedScenario {
        frames: scenario.frames().collect(),
        detections: scenario.detections(seed),
        expected,
        scenario,
    })
}

/// Writes `frames/frame_NNNNNN.pgm`, `detections.csv`, `roi.txt` and
/// `expected_events.jsonl` under `dir`.
pub fn write_scenario(script: &ScenarioScript, seed: u64, dir: &Path) -> Result<Scenario, SimError> {
    let scenario = Scenario::new(script.clone())?;
    let expected = scenario.expected_events(seed, &scenario.pipeline_config())?;
    let frames_dir = dir.join(FRAMES_DIR);
    fs::create_dir_all(&frames_dir).map_err(|source| SimError::Io {
        path: frames_dir.clone(),
        source,
    })?;
    for frame in scenario.frames() {
        write_pgm(&frames_dir.join(frame_file_name(frame.index())), &frame)?;
    }
    let write = |name: &str, body: &str| -> Result<(), SimError> {
        let path = dir.join(name);
        fs::File::create(&path)
            .and_then(|mut f| f.write_all(body.as_bytes()))
            .map_err(|source| SimError::Io { path, source })
    };
    write(DETECTIONS_FILE, &scenario.detections(seed).to_csv())?;
    write(ROI_FILE, &script.roi.to_string())?;
    write(EXPECTED_EVENTS_FILE, &events_to_jsonl(&expected))?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Roi;

    fn one_actor(keys: &str, frames: u64) -> ScenarioScript {
        ScenarioScript::parse(&format!(
            "frames = {frames}\nroi = 0,0 320,0 320,240 0,240\nactor A 40 20 5 0.9\n{keys}"
        ))
        .unwrap()
    }

    fn expected(script: &ScenarioScript) -> Vec<AlarmEvent> {
        let s = Scenario::new(script.clone()).unwrap();
        s.expected_events(7, &s.pipeline_config()).unwrap()
    }

    fn kinds(events: &[AlarmEvent]) -> Vec<(EventKind, u64, u64)> {
        events.iter().map(|e| (e.kind, e.frame, e.track_id)).collect()
    }

    #[test]
    fn parked_from_start_alarms_at_375() {
        let ev = expected(&one_actor("key A 0 100 100\n", 500));
        assert_eq!(
            kinds(&ev),
            vec![(EventKind::TrackCreated, 0, 1), (EventKind::IllegalStart, 375, 1)]
        );
        assert_eq!(ev[1].stationary_seconds, 15.0);
    }

    #[test]
    fn constant_mover_only_creates() {
        // 4 px per frame to the right for 50 frames
        let ev = expected(&one_actor("key A 0 40 100\nkey A 50 240 100\n", 51));
        assert_eq!(kinds(&ev), vec![(EventKind::TrackCreated, 0, 1)]);
    }

    #[test]
    fn short_stop_never_alarms() {
        let ev = expected(&one_actor(
            "key A 0 40 100\nkey A 200 40 100\nkey A 240 200 100\n",
            300,
        ));
        assert!(ev.iter().all(|e| e.kind != EventKind::IllegalStart));
    }

    #[test]
    fn figure5_ordering() {
        let s = Scenario::new(scenario_figure5()).unwrap();
        let ev = s.expected_events(0, &s.pipeline_config()).unwrap();
        let frame_of = |kind, id| ev.iter().find(|e| e.kind == kind && e.track_id == id).map(|e| e.frame);
        // ids follow creation: A (conf 0.9) then B at frame 25, C later
        assert_eq!(frame_of(EventKind::TrackCreated, 1), Some(25));
        assert_eq!(frame_of(EventKind::TrackCreated, 2), Some(25));
        assert_eq!(frame_of(EventKind::TrackCreated, 3), Some(275));
        assert_eq!(frame_of(EventKind::IllegalStart, 1), Some(40 + 375));
        assert_eq!(frame_of(EventKind::IllegalStart, 2), Some(45 + 375));
        assert_eq!(frame_of(EventKind::IllegalStart, 3), Some(280 + 375));
        assert_eq!(frame_of(EventKind::IllegalEnd, 2), Some(601));
        assert_eq!(frame_of(EventKind::IllegalEnd, 3), Some(801));
        assert_eq!(frame_of(EventKind::IllegalEnd, 1), None);
        assert_eq!(frame_of(EventKind::TrackDropped, 1), None);
    }

    #[test]
    fn stop_frames_from_keys() {
        let s = scenario_figure5();
        assert_eq!(s.actor("A").unwrap().stop_frames(), vec![40]);
        assert_eq!(s.actor("B").unwrap().stop_frames(), vec![45, 606]);
        assert_eq!(s.actor("C").unwrap().stop_frames(), vec![280, 830]);
    }

    #[test]
    fn generation_is_deterministic() {
        let s = Scenario::new(scenario_figure5()).unwrap();
        assert_eq!(s.detections(3).to_csv(), s.detections(3).to_csv());
        assert_ne!(s.detections(3).to_csv(), s.detections(4).to_csv());
        assert_eq!(s.render_frame(123), s.render_frame(123));
    }

    #[test]
    fn zero_jitter_matches_truth() {
        let mut script = scenario_figure5();
        script.jitter_sigma = 0.0;
        let s = Scenario::new(script).unwrap();
        let set = s.detections(9);
        for f in [0u64, 100, 605, 899] {
            let got: Vec<BBox> = set.detections_at(f as i64).iter().map(|d| d.bbox).collect();
            let want: Vec<BBox> = (0..3).map(|a| s.truth_box(a, f)).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn jitter_stays_within_two_sigma() {
        let s = Scenario::new(scenario_figure5()).unwrap();
        for (ai, d) in s.jittered(1) {
            let t = s.truth_box(ai, d.frame_index);
            let r = (d.bbox.x() - t.x()).hypot(d.bbox.y() - t.y());
            assert!(r <= 1.0 + 0.01, "{r}");
        }
    }

    #[test]
    fn script_text_round_trips() {
        let s = scenario_figure5();
        assert_eq!(ScenarioScript::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn rejects_bad_scripts() {
        let leaves = one_actor("key A 0 100 100\nkey A 50 300 100\n", 60);
        assert!(Scenario::new(leaves).unwrap_err().message.contains("leaves the frame"));
        let creeping = one_actor("key A 0 100 100\nkey A 50 150 100\n", 60);
        assert!(Scenario::new(creeping).unwrap_err().message.contains("must exceed"));
        let fast = one_actor("key A 0 40 100\nkey A 10 200 100\n", 20);
        assert!(Scenario::new(fast).unwrap_err().message.contains("at most"));
        assert!(ScenarioScript::parse("frames = 3\nroi = 0,0 1,0 1,1\nkey Z 0 1 1\n").is_err());
        assert!(ScenarioScript::parse("frames = 3\n").is_err());
        let err = ScenarioScript::parse("frames = 3\nroi = 0,0 9,0 9,9\nbogus = 1\n").unwrap_err();
        assert_eq!(err.line, Some(3));
        let unordered = "frames = 3\nroi = 0,0 9,0 9,9\nactor A 20 20 1\nkey A 5 50 50\nkey A 5 60 50\n";
        assert!(ScenarioScript::parse(unordered).is_err());
    }

    #[test]
    fn overlapping_actors_rejected() {
        let text = "frames = 5\nroi = 0,0 320,0 320,240 0,240\n\
                    actor A 40 20 1\nkey A 0 100 100\nactor B 40 20 2\nkey B 0 130 100\n";
        let err = Scenario::new(ScenarioScript::parse(text).unwrap()).unwrap_err();
        assert!(err.message.contains("closer than"));
    }

    #[test]
    fn renders_actor_texture_on_background() {
        let s = Scenario::new(one_actor("key A 0 100 100\n", 2)).unwrap();
        let f = s.render_frame(1);
        assert_eq!(f.get(0, 0), 128);
        let tb = s.truth_box(0, 1);
        assert_eq!(f.get(tb.x() as usize, tb.y() as usize), s.textures[0][0]);
        let roi: &Roi = &s.script().roi;
        assert!(roi.contains(tb.center()));
    }

    #[test]
    fn writes_output_directory() {
        let dir = tempfile::tempdir().unwrap();
        let script = one_actor("key A 0 100 100\n", 3);
        write_scenario(&script, 1, dir.path()).unwrap();
        for name in [DETECTIONS_FILE, ROI_FILE, EXPECTED_EVENTS_FILE] {
            assert!(dir.path().join(name).is_file(), "{name}");
        }
        assert!(dir.path().join(FRAMES_DIR).join("frame_000002.pgm").is_file());
        let roi = Roi::parse(&fs::read_to_string(dir.path().join(ROI_FILE)).unwrap()).unwrap();
        assert_eq!(roi, script.roi);
    }
}
