//! Per-track motion state machine and the alarm event log.
//!
//! A track is stationary in a frame when its center moved at most `epsilon`
//! pixels since the previous frame. Once the current run of stationary frames
//! reaches `ceil(tau * fps)` the track turns illegal; the first frame with a
//! larger displacement ends the illegal episode.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::geometry::{BBox, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionConfig {
    pub epsilon: f64,
    pub fps: f64,
    pub tau: f64,
}

impl Default for MotionConfig {
    fn default() -> Self {
        Self {
            epsilon: 2.0,
            fps: 25.0,
            tau: 15.0,
        }
    }
}

impl MotionConfig {
    /// `ceil(tau * fps)`, with float noise like `15.000000000000002` ignored.
    pub fn frames_to_alarm(&self) -> u64 {
        frames_for(self.tau, self.fps)
    }
}

pub fn frames_for(seconds: f64, fps: f64) -> u64 {
    ((seconds * fps) - 1e-9).ceil().max(1.0) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Moving,
    Stationary,
    Illegal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionState {
    pub phase: Phase,
    /// Length of the current run of frames with displacement <= epsilon.
    pub stationary_frames: u64,
    pub illegal_start_frame: Option<u64>,
    pub last_center: Point,
}

impl MotionState {
    pub fn new(center: Point) -> Self {
        Self {
            phase: Phase::Moving,
            stationary_frames: 0,
            illegal_start_frame: None,
            last_center: center,
        }
    }

    pub fn stationary_seconds(&self, fps: f64) -> f64 {
        self.stationary_frames as f64 / fps
    }
}

/// Phase transition produced by one update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transition {
    IllegalStart { stationary_frames: u64 },
    /// Carries the length of the stationary run that just ended.
    IllegalEnd { stationary_frames: u64 },
}

pub fn displacement(prev_center: Point, cur_center: Point) -> f64 {
    prev_center.distance(&cur_center)
}

pub fn update_motion_state(
    state: &MotionState,
    cur_center: Point,
    frame_index: u64,
    cfg: &MotionConfig,
) -> (MotionState, Option<Transition>) {
    let d = displacement(state.last_center, cur_center);
    if d > cfg.epsilon {
        let transition = (state.phase == Phase::Illegal).then_some(Transition::IllegalEnd {
            stationary_frames: state.stationary_frames,
        });
        let next = MotionState {
            phase: Phase::Moving,
            stationary_frames: 0,
            illegal_start_frame: None,
            last_center: cur_center,
        };
        return (next, transition);
    }
    let stationary_frames = state.stationary_frames + 1;
    let need = cfg.frames_to_alarm();
    let mut next = MotionState {
        phase: state.phase,
        stationary_frames,
        illegal_start_frame: state.illegal_start_frame,
        last_center: cur_center,
    };
    if state.phase == Phase::Illegal {
        return (next, None);
    }
    if stationary_frames >= need {
        next.phase = Phase::Illegal;
        next.illegal_start_frame = Some(frame_index);
        (next, Some(Transition::IllegalStart { stationary_frames }))
    } else {
        next.phase = Phase::Stationary;
        (next, None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    TrackCreated,
    IllegalStart,
    IllegalEnd,
    TrackDropped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlarmEvent {
    pub kind: EventKind,
    pub frame: u64,
    pub track_id: u64,
    #[serde(rename = "box")]
    pub bbox: BBox,
    pub stationary_seconds: f64,
}

impl AlarmEvent {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("event serializes")
    }
}

/// Ordered, append-only event log kept in `(frame, track_id)` order.
/// Events with equal keys keep insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    events: Vec<AlarmEvent>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an event. Its frame must not precede the last logged frame.
    pub fn push(&mut self, event: AlarmEvent) {
        let key = (event.frame, event.track_id);
        let mut at = self.events.len();
        while at > 0 {
            let prev = &self.events[at - 1];
            assert!(prev.frame <= event.frame, "event log frames regress");
            if (prev.frame, prev.track_id) <= key {
                break;
            }
            at -= 1;
        }
        self.events.insert(at, event);
    }

    pub fn events(&self) -> &[AlarmEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn into_events(self) -> Vec<AlarmEvent> {
        self.events
    }

    /// One JSON object per line, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        events_to_jsonl(&self.events)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(self.to_jsonl().as_bytes())
    }
}

pub fn events_to_jsonl(events: &[AlarmEvent]) -> String {
    let mut s = String::new();
    for e in events {
        s.push_str(&e.to_line());
        s.push('\n');
    }
    s
}

pub fn parse_events_jsonl(text: &str) -> Result<Vec<AlarmEvent>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
