use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::detection::CLASS_CAR;
use crate::motion::MotionConfig;
use crate::ncc::Margin;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid {field}: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Detections for frame k are merged right after frame k is tracked.
    #[default]
    Sync,
    /// Detection runs on a second worker and may land a few frames late.
    Async,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sync" => Ok(Mode::Sync),
            "async" => Ok(Mode::Async),
            other => Err(format!("mode must be sync or async, got {other:?}")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sync => "sync",
            Mode::Async => "async",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub conf_threshold: f64,
    /// Association requires IOU strictly above this.
    pub iou_threshold: f64,
    pub epsilon_px: f64,
    pub tau_seconds: f64,
    pub fps: f64,
    pub redetect_interval: u64,
    pub search_margin: Margin,
    /// Matches scoring below this leave the track where it was.
    pub ncc_min_score: f64,
    pub allowed_classes: BTreeSet<u32>,
    pub mode: Mode,
    /// Async only: frames a detection may trail the tracker before the
    /// tracker blocks on it.
    pub max_detection_lag: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            conf_threshold: 0.6,
            iou_threshold: 0.5,
            epsilon_px: 2.0,
            tau_seconds: 15.0,
            fps: 25.0,
            redetect_interval: 25,
            search_margin: Margin::Pixels(16),
            ncc_min_score: 0.5,
            allowed_classes: BTreeSet::from([CLASS_CAR]),
            mode: Mode::Sync,
            max_detection_lag: 5,
        }
    }
}

fn err(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field,
        message: message.into(),
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |field, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(err(field, format!("{v} is outside [0, 1]")))
            }
        };
        unit("conf_threshold", self.conf_threshold)?;
        unit("iou_threshold", self.iou_threshold)?;
        if !(self.epsilon_px.is_finite() && self.epsilon_px >= 0.0) {
            return Err(err("epsilon_px", format!("{} must be >= 0", self.epsilon_px)));
        }
        if !(self.tau_seconds.is_finite() && self.tau_seconds > 0.0) {
            return Err(err("tau_seconds", format!("{} must be > 0", self.tau_seconds)));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(err("fps", format!("{} must be > 0", self.fps)));
        }
        if self.redetect_interval == 0 {
            return Err(err("redetect_interval", "must be at least 1"));
        }
        if !(-1.0..=1.0).contains(&self.ncc_min_score) {
            return Err(err(
                "ncc_min_score",
                format!("{} is outside [-1, 1]", self.ncc_min_score),
            ));
        }
        if self.allowed_classes.is_empty() {
            return Err(err("allowed_classes", "at least one class is required"));
        }
        Ok(())
    }

    pub fn motion(&self) -> MotionConfig {
        MotionConfig {
            epsilon: self.epsilon_px,
            fps: self.fps,
            tau: self.tau_seconds,
        }
    }

    pub fn is_redetect_frame(&self, index: u64) -> bool {
        index.is_multiple_of(self.redetect_interval)
    }
}
