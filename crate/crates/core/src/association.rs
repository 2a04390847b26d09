//! Greedy IOU association between live tracks and fresh detections.

use crate::detection::Detection;
use crate::geometry::BBox;
use crate::motion::MotionState;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Association {
    /// `(track_id, detection_index, iou)` in the order the pairs were taken.
    pub matched: Vec<(u64, usize, f64)>,
    /// Detection indices left unmatched, ascending.
    pub new_detections: Vec<usize>,
    /// Track ids left unmatched, in input order.
    pub unmatched_tracks: Vec<u64>,
}

/// Repeatedly takes the highest-IOU pair still available, as long as its IOU
/// is strictly above `iou_threshold`. Equal IOUs go to the lower track id,
/// then the lower detection index.
pub fn associate(
    track_boxes: &[(u64, BBox)],
    detections: &[Detection],
    iou_threshold: f64,
) -> Association {
    let ids: Vec<u64> = track_boxes.iter().map(|(id, _)| *id).collect();
    let iou: Vec<Vec<f64>> = track_boxes
        .iter()
        .map(|(_, tb)| detections.iter().map(|d| tb.iou(&d.bbox)).collect())
        .collect();
    associate_by_iou(&ids, &iou, detections.len(), iou_threshold)
}

/// Greedy matching over a precomputed `tracks x detections` IOU matrix.
pub fn associate_by_iou(
    track_ids: &[u64],
    iou: &[Vec<f64>],
    detection_count: usize,
    iou_threshold: f64,
) -> Association {
    let mut pairs: Vec<(f64, u64, usize, usize)> = Vec::new();
    for (ti, row) in iou.iter().enumerate() {
        for (di, &v) in row.iter().enumerate() {
            if v > iou_threshold {
                pairs.push((v, track_ids[ti], di, ti));
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut track_taken = vec![false; track_ids.len()];
    let mut det_taken = vec![false; detection_count];
    let mut matched = Vec::new();
    for (v, track_id, di, ti) in pairs {
        if track_taken[ti] || det_taken[di] {
            continue;
        }
        track_taken[ti] = true;
        det_taken[di] = true;
        matched.push((track_id, di, v));
    }
    Association {
        matched,
        new_detections: (0..detection_count).filter(|&i| !det_taken[i]).collect(),
        unmatched_tracks: track_ids
            .iter()
            .zip(&track_taken)
            .filter(|(_, &taken)| !taken)
            .map(|(id, _)| *id)
            .collect(),
    }
}

/// Motion state for a track re-anchored on `new_box`: phase, stationary
/// count and illegal start carry over unchanged; only the reference center
/// moves to the new box.
pub fn inherit_timing(old: &MotionState, new_box: &BBox) -> MotionState {
    MotionState {
        last_center: new_box.center(),
        ..*old
    }
}
