//! Illegal-parking detection engine.
//!
//! Vehicles detected inside a no-parking polygon are tracked frame to frame
//! by normalized cross-correlation template matching. Every
//! `redetect_interval` frames fresh detections are matched to tracks by IOU;
//! matched tracks keep their stationary timers. A track whose center stays
//! put for `tau` seconds raises an illegal-parking alarm.
//!
//! Modules:
//! - [`geometry`]: frames, boxes, points, the ROI polygon.
//! - [`detection`]: detection CSV input and filtering.
//! - [`anchors`]: k-means design of default-box aspect ratios.
//! - [`ncc`]: template extraction, NCC scoring and search.
//! - [`association`]: greedy IOU matching and timing inheritance.
//! - [`motion`]: the per-track stationary/illegal state machine and event log.
//! - [`pipeline`]: the frame loop and its sync/async schedules.
//! - [`sim`]: deterministic synthetic scenarios with expected event logs.
//! - [`frames`]: PGM frame files.
//! - [`cli`]: the `parkwatch` command line.

pub mod anchors;
pub mod association;
pub mod cli;
pub mod detection;
pub mod frames;
pub mod geometry;
pub mod motion;
pub mod ncc;
pub mod pipeline;
pub mod sim;

pub use detection::{Detection, DetectionSet};
pub use geometry::{BBox, Frame, Point, Roi};
pub use motion::{AlarmEvent, EventKind, Phase};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineState};
