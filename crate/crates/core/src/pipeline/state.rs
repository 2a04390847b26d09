use serde::{Deserialize, Serialize};

use crate::association::{associate, inherit_timing};
use crate::detection::{filter_detections, Detection};
use crate::geometry::{BBox, Frame, Point, Roi};
use crate::motion::{
    update_motion_state, AlarmEvent, EventKind, EventLog, MotionState, Phase, Transition,
};
use crate::ncc::{advance_track_with, make_template, pixel_rect, IntegralImages, Template};

use super::{PipelineConfig, PipelineError};

/// Tracks unmatched at this many consecutive re-detections are dropped.
pub const MAX_MISSED_CYCLES: u32 = 2;

#[derive(Debug, Clone)]
pub struct Track {
    pub id: u64,
    /// Reported box: the detection box right after a merge, the matched
    /// template window after a tracking step.
    pub bbox: BBox,
    pub template: Template,
    /// Integer top-left corner where the template currently sits.
    pub position: Point,
    pub motion: MotionState,
    pub last_confirmed_frame: u64,
    pub missed_cycles: u32,
    /// Set when the last step's best score fell below the minimum.
    pub lost: bool,
}

impl Track {
    fn refresh_from(&mut self, det: &Detection, frame: &Frame, frame_index: u64) {
        self.bbox = det.bbox;
        if let Some((template, origin)) = fit_template(frame, &det.bbox) {
            self.template = template;
            self.position = origin;
        }
        self.motion = inherit_timing(&self.motion, &det.bbox);
        self.missed_cycles = 0;
        self.last_confirmed_frame = frame_index;
    }
}

/// Template from a detection box rounded to the pixel grid and clamped to
/// the frame, with the integer origin it was cut from.
pub fn fit_template(frame: &Frame, b: &BBox) -> Option<(Template, Point)> {
    let (x, y, w, h) = pixel_rect(b);
    let (fw, fh) = (frame.width() as i64, frame.height() as i64);
    let x0 = x.clamp(0, fw - 1);
    let y0 = y.clamp(0, fh - 1);
    let x1 = (x + w).min(fw);
    let y1 = (y + h).min(fh);
    if x1 <= x0 || y1 <= y0 {
        return None;
    }
    let rect = BBox::new(x0 as f64, y0 as f64, (x1 - x0) as f64, (y1 - y0) as f64).ok()?;
    let template = make_template(frame, &rect).ok()?;
    Some((template, rect.top_left()))
}

/// One re-detection merge, for instrumentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeRecord {
    /// Frame the detections were computed on.
    pub detection_frame: u64,
    /// Last frame tracked before the merge was applied.
    pub merged_after_frame: u64,
    /// `merged_after_frame - detection_frame`.
    pub lag: u64,
    pub matched: usize,
    pub created: usize,
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub frame: u64,
    pub track_id: u64,
    #[serde(rename = "box")]
    pub bbox: BBox,
    pub phase: Phase,
    pub stationary_seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct PipelineState {
    /// Ordered by id.
    pub tracks: Vec<Track>,
    pub next_track_id: u64,
    /// Last frame stepped; `None` before the first frame.
    pub frame_index: Option<u64>,
    pub events: EventLog,
    pub merges: Vec<MergeRecord>,
}

impl PipelineState {
    pub fn new() -> Self {
        Self {
            next_track_id: 1,
            ..Self::default()
        }
    }

    pub fn track(&self, id: u64) -> Option<&Track> {
        self.tracks.iter().find(|t| t.id == id)
    }

    fn emit(&mut self, kind: EventKind, frame: u64, track: &Track, stationary_frames: u64, fps: f64) {
        self.events.push(AlarmEvent {
            kind,
            frame,
            track_id: track.id,
            bbox: track.bbox,
            stationary_seconds: stationary_frames as f64 / fps,
        });
    }

    /// Tracks every live track into `frame` and updates its motion state.
    pub fn step(&mut self, frame: &Frame, roi: &Roi, cfg: &PipelineConfig) -> Result<(), PipelineError> {
        let expected = self.frame_index.map_or(0, |i| i + 1);
        if frame.index() != expected {
            return Err(PipelineError::Sequencing {
                expected,
                got: frame.index(),
            });
        }
        self.frame_index = Some(frame.index());
        if self.tracks.is_empty() {
            return Ok(());
        }

        let integral = IntegralImages::new(frame);
        let motion_cfg = cfg.motion();
        let fi = frame.index();
        let mut kept = Vec::with_capacity(self.tracks.len());
        for mut track in std::mem::take(&mut self.tracks) {
            let m = advance_track_with(&track.template, track.position, frame, &integral, cfg.search_margin)?;
            track.lost = m.score < cfg.ncc_min_score;
            if !track.lost {
                track.position = m.position;
                track.bbox = BBox::new(
                    m.position.x,
                    m.position.y,
                    track.template.width() as f64,
                    track.template.height() as f64,
                )
                .expect("template has positive size");
            }
            let center = track.bbox.center();
            let (motion, transition) = update_motion_state(&track.motion, center, fi, &motion_cfg);
            track.motion = motion;
            match transition {
                Some(Transition::IllegalStart { stationary_frames }) => {
                    self.emit(EventKind::IllegalStart, fi, &track, stationary_frames, cfg.fps)
                }
                Some(Transition::IllegalEnd { stationary_frames }) => {
                    self.emit(EventKind::IllegalEnd, fi, &track, stationary_frames, cfg.fps)
                }
                None => {}
            }
            if roi.contains(center) {
                kept.push(track);
            } else {
                self.emit(EventKind::TrackDropped, fi, &track, track.motion.stationary_frames, cfg.fps);
            }
        }
        self.tracks = kept;
        Ok(())
    }

    /// Merges detections computed on `frame` into the track set. Events are
    /// stamped with the last stepped frame.
    pub fn redetect_merge(
        &mut self,
        detections: &[Detection],
        frame: &Frame,
        roi: &Roi,
        cfg: &PipelineConfig,
    ) -> Result<(), PipelineError> {
        if !cfg.is_redetect_frame(frame.index()) {
            return Err(PipelineError::OffSchedule {
                frame: frame.index(),
                interval: cfg.redetect_interval,
            });
        }
        let now = self.frame_index.ok_or(PipelineError::NoFrameYet)?;
        if frame.index() > now {
            return Err(PipelineError::Sequencing {
                expected: now,
                got: frame.index(),
            });
        }
        let dets: Vec<Detection> = filter_detections(detections, cfg.conf_threshold, &cfg.allowed_classes)
            .into_iter()
            .filter(|d| roi.contains(d.bbox.center()))
            .collect();
        let boxes: Vec<(u64, BBox)> = self.tracks.iter().map(|t| (t.id, t.bbox)).collect();
        let assoc = associate(&boxes, &dets, cfg.iou_threshold);

        for &(track_id, di, _) in &assoc.matched {
            let track = self
                .tracks
                .iter_mut()
                .find(|t| t.id == track_id)
                .expect("matched track exists");
            track.refresh_from(&dets[di], frame, now);
        }

        let mut dropped = 0;
        for &track_id in &assoc.unmatched_tracks {
            let pos = self.tracks.iter().position(|t| t.id == track_id).expect("track exists");
            self.tracks[pos].missed_cycles += 1;
            if self.tracks[pos].missed_cycles >= MAX_MISSED_CYCLES {
                let track = self.tracks.remove(pos);
                self.emit(EventKind::TrackDropped, now, &track, track.motion.stationary_frames, cfg.fps);
                dropped += 1;
            }
        }

        let mut created = 0;
        for &di in &assoc.new_detections {
            let det = &dets[di];
            let Some((template, origin)) = fit_template(frame, &det.bbox) else {
                continue;
            };
            let track = Track {
                id: self.next_track_id,
                bbox: det.bbox,
                template,
                position: origin,
                motion: MotionState::new(det.bbox.center()),
                last_confirmed_frame: now,
                missed_cycles: 0,
                lost: false,
            };
            self.next_track_id += 1;
            self.emit(EventKind::TrackCreated, now, &track, 0, cfg.fps);
            self.tracks.push(track);
            created += 1;
        }

        self.merges.push(MergeRecord {
            detection_frame: frame.index(),
            merged_after_frame: now,
            lag: now - frame.index(),
            matched: assoc.matched.len(),
            created,
            dropped,
        });
        Ok(())
    }

    /// Sidecar records for every live track at the current frame.
    pub fn annotations(&self, fps: f64) -> Vec<AnnotationRecord> {
        let Some(frame) = self.frame_index else {
            return Vec::new();
        };
        self.tracks
            .iter()
            .map(|t| AnnotationRecord {
                frame,
                track_id: t.id,
                bbox: t.bbox,
                phase: t.motion.phase,
                stationary_seconds: t.motion.stationary_seconds(fps),
            })
            .collect()
    }
}
