//! Per-frame vehicle detections read from CSV, plus confidence/class
//! filtering.
//!
//! The CSV format has one record per line, `frame,x,y,w,h,class,confidence`.
//! Lines starting with `#` are comments. A comment of the form
//! `# frame_count=N` declares that the file covers frames `0..N`, so frames
//! without records inside that range are known to contain no vehicles.
//! Class 0 is a car.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::BufRead;

use thiserror::Error;

use crate::geometry::BBox;

pub const CLASS_CAR: u32 = 0;

#[derive(Debug, Error)]
pub enum DetectionParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> DetectionParseError {
    DetectionParseError::Malformed {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub frame_index: u64,
    pub bbox: BBox,
    pub class_id: u32,
    pub confidence: f64,
}

/// Detections grouped by frame. Each frame's list is sorted by descending
/// confidence, ties keeping file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectionSet {
    frames: BTreeMap<u64, Vec<Detection>>,
    declared_frames: Option<u64>,
}

impl DetectionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_detections(dets: impl IntoIterator<Item = Detection>) -> Self {
        let mut set = Self::new();
        for d in dets {
            set.frames.entry(d.frame_index).or_default().push(d);
        }
        set.sort_lists();
        set
    }

    fn sort_lists(&mut self) {
        for list in self.frames.values_mut() {
            list.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
        }
    }

    pub fn with_declared_frames(mut self, count: u64) -> Self {
        self.declared_frames = Some(count);
        self
    }

    pub fn declared_frames(&self) -> Option<u64> {
        self.declared_frames
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Total number of detections across all frames.
    pub fn len(&self) -> usize {
        self.frames.values().map(Vec::len).sum()
    }

    pub fn frame_indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.frames.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Detection> {
        self.frames.values().flatten()
    }

    /// Stored detections for a frame; empty for frames without records and
    /// for negative indices.
    pub fn detections_at(&self, frame_index: i64) -> &[Detection] {
        if frame_index < 0 {
            return &[];
        }
        self.frames
            .get(&(frame_index as u64))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Whether the data speaks for `frame_index`: either records exist at or
    /// after it, or a declared frame count includes it.
    pub fn covers(&self, frame_index: u64) -> bool {
        if let Some(n) = self.declared_frames {
            if frame_index < n {
                return true;
            }
        }
        self.frames
            .keys()
            .next_back()
            .is_some_and(|&last| frame_index <= last)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# frame,x,y,w,h,class,confidence\n");
        if let Some(n) = self.declared_frames {
            let _ = writeln!(out, "# frame_count={n}");
        }
        for d in self.iter() {
            let _ = writeln!(out, "{}", format_record(d));
        }
        out
    }
}

pub fn format_record(d: &Detection) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        d.frame_index,
        d.bbox.x(),
        d.bbox.y(),
        d.bbox.w(),
        d.bbox.h(),
        d.class_id,
        d.confidence
    )
}

fn parse_directive(comment: &str) -> Option<u64> {
    let body = comment.trim_start_matches('#').trim();
    let (key, value) = body.split_once('=')?;
    if key.trim() == "frame_count" {
        value.trim().parse().ok()
    } else {
        None
    }
}

fn parse_f64(line: usize, name: &str, s: &str) -> Result<f64, DetectionParseError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| malformed(line, format!("{name} is not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(malformed(line, format!("{name} is not finite")));
    }
    Ok(v)
}

fn parse_u64(line: usize, name: &str, s: &str) -> Result<u64, DetectionParseError> {
    s.trim()
        .parse()
        .map_err(|_| malformed(line, format!("{name} is not a non-negative integer: {s:?}")))
}

fn parse_box(line: usize, fields: &[&str]) -> Result<(u64, BBox), DetectionParseError> {
    let frame = parse_u64(line, "frame", fields[0])?;
    let x = parse_f64(line, "x", fields[1])?;
    let y = parse_f64(line, "y", fields[2])?;
    let w = parse_f64(line, "w", fields[3])?;
    let h = parse_f64(line, "h", fields[4])?;
    let bbox = BBox::new(x, y, w, h).map_err(|e| malformed(line, e.to_string()))?;
    Ok((frame, bbox))
}

/// Parses the detection CSV. Any malformed line aborts the parse.
pub fn parse_detection_file<R: BufRead>(reader: R) -> Result<DetectionSet, DetectionParseError> {
    let mut dets = Vec::new();
    let mut declared = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if let Some(n) = parse_directive(trimmed) {
                declared = Some(n);
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 7 {
            return Err(malformed(
                lineno,
                format!("expected 7 fields, found {}", fields.len()),
            ));
        }
        let (frame_index, bbox) = parse_box(lineno, &fields)?;
        let class_id = fields[5]
            .trim()
            .parse()
            .map_err(|_| malformed(lineno, format!("class is not an integer: {:?}", fields[5])))?;
        let confidence = parse_f64(lineno, "confidence", fields[6])?;
        if !(0.0..=1.0).contains(&confidence) {
            return Err(malformed(
                lineno,
                format!("confidence {confidence} outside [0, 1]"),
            ));
        }
        dets.push(Detection {
            frame_index,
            bbox,
            class_id,
            confidence,
        });
    }
    let mut set = DetectionSet::from_detections(dets);
    set.declared_frames = declared;
    Ok(set)
}

/// Reads boxes from a detection-format CSV for ground-truth use. Only the
/// first five columns are interpreted; class and confidence may be absent or
/// hold anything.
pub fn parse_ground_truth_boxes<R: BufRead>(reader: R) -> Result<Vec<BBox>, DetectionParseError> {
    let mut boxes = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() < 5 {
            return Err(malformed(
                i + 1,
                format!("expected at least 5 fields, found {}", fields.len()),
            ));
        }
        boxes.push(parse_box(i + 1, &fields)?.1);
    }
    Ok(boxes)
}

/// Keeps detections with `confidence >= conf_threshold` whose class is
/// allowed, in input order.
pub fn filter_detections(
    dets: &[Detection],
    conf_threshold: f64,
    allowed_classes: &BTreeSet<u32>,
) -> Vec<Detection> {
    dets.iter()
        .filter(|d| d.confidence >= conf_threshold && allowed_classes.contains(&d.class_id))
        .copied()
        .collect()
}
