use std::collections::VecDeque;
use std::sync::mpsc;
use std::sync::Arc;

use crate::detection::{Detection, DetectionSet};
use crate::geometry::{Frame, Roi};
use crate::motion::AlarmEvent;

use super::{Mode, PipelineConfig, PipelineError, PipelineState};

/// Produces detections for a frame snapshot. Runs on the detection worker
/// in async mode.
pub trait Detector: Send {
    fn detect(&mut self, frame: &Frame) -> Result<Vec<Detection>, PipelineError>;
}

/// Replays detections from a parsed detection file.
#[derive(Debug, Clone, Copy)]
pub struct FileDetector<'a> {
    set: &'a DetectionSet,
}

impl<'a> FileDetector<'a> {
    pub fn new(set: &'a DetectionSet) -> Self {
        Self { set }
    }
}

impl Detector for FileDetector<'_> {
    fn detect(&mut self, frame: &Frame) -> Result<Vec<Detection>, PipelineError> {
        if !self.set.covers(frame.index()) {
            return Err(PipelineError::MissingDetections {
                frame: frame.index(),
            });
        }
        Ok(self.set.detections_at(frame.index() as i64).to_vec())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub events: Vec<AlarmEvent>,
    pub final_state: PipelineState,
    pub frames_processed: u64,
}

/// Called after each frame is fully processed, including any merge.
pub type FrameObserver<'o> = dyn FnMut(&Frame, &PipelineState) -> Result<(), PipelineError> + 'o;

pub fn run_pipeline<I, E>(
    frames: I,
    detector: &mut dyn Detector,
    roi: &Roi,
    cfg: &PipelineConfig,
) -> Result<RunOutput, PipelineError>
where
    I: IntoIterator<Item = Result<Frame, E>>,
    PipelineError: From<E>,
{
    run_pipeline_observed(frames, detector, roi, cfg, &mut |_, _| Ok(()))
}

pub fn run_pipeline_observed<I, E>(
    frames: I,
    detector: &mut dyn Detector,
    roi: &Roi,
    cfg: &PipelineConfig,
    observer: &mut FrameObserver<'_>,
) -> Result<RunOutput, PipelineError>
where
    I: IntoIterator<Item = Result<Frame, E>>,
    PipelineError: From<E>,
{
    cfg.validate()?;
    let mut state = PipelineState::new();
    let mut frames_processed = 0;
    match cfg.mode {
        Mode::Sync => {
            for frame in frames {
                let frame = frame?;
                state.step(&frame, roi, cfg)?;
                if cfg.is_redetect_frame(frame.index()) {
                    let dets = detector.detect(&frame)?;
                    state.redetect_merge(&dets, &frame, roi, cfg)?;
                }
                observer(&frame, &state)?;
                frames_processed += 1;
            }
        }
        Mode::Async => {
            frames_processed = run_async(frames, detector, roi, cfg, observer, &mut state)?;
        }
    }
    Ok(RunOutput {
        events: state.events.events().to_vec(),
        final_state: state,
        frames_processed,
    })
}

type DetectionReply = (Arc<Frame>, Result<Vec<Detection>, PipelineError>);

/// Tracking on the calling thread, detection on a scoped worker. The worker
/// only ever sees immutable frame snapshots; merges happen between frame
/// steps, and a detection is never applied more than `max_detection_lag`
/// frames after the frame it was computed on.
fn run_async<I, E>(
    frames: I,
    detector: &mut dyn Detector,
    roi: &Roi,
    cfg: &PipelineConfig,
    observer: &mut FrameObserver<'_>,
    state: &mut PipelineState,
) -> Result<u64, PipelineError>
where
    I: IntoIterator<Item = Result<Frame, E>>,
    PipelineError: From<E>,
{
    std::thread::scope(|scope| {
        let (job_tx, job_rx) = mpsc::channel::<Arc<Frame>>();
        let (reply_tx, reply_rx) = mpsc::channel::<DetectionReply>();
        scope.spawn(move || {
            for frame in job_rx {
                let dets = detector.detect(&frame);
                if reply_tx.send((frame, dets)).is_err() {
                    break;
                }
            }
        });

        let mut pending: VecDeque<u64> = VecDeque::new();
        let mut processed = 0;
        let merge = |state: &mut PipelineState, (frame, dets): DetectionReply| -> Result<(), PipelineError> {
            state.redetect_merge(&dets?, &frame, roi, cfg)
        };
        for frame in frames {
            let frame = Arc::new(frame?);
            state.step(&frame, roi, cfg)?;
            let now = frame.index();
            if cfg.is_redetect_frame(now) {
                job_tx
                    .send(Arc::clone(&frame))
                    .map_err(|_| PipelineError::Detector("detection worker stopped".into()))?;
                pending.push_back(now);
            }
            while let Some(&oldest) = pending.front() {
                let reply = if now - oldest >= cfg.max_detection_lag {
                    Some(reply_rx.recv().map_err(|_| {
                        PipelineError::Detector("detection worker stopped".into())
                    })?)
                } else {
                    reply_rx.try_recv().ok()
                };
                let Some(reply) = reply else { break };
                debug_assert_eq!(reply.0.index(), oldest);
                merge(state, reply)?;
                pending.pop_front();
            }
            observer(&frame, state)?;
            processed += 1;
        }
        drop(job_tx);
        while pending.pop_front().is_some() {
            let reply = reply_rx
                .recv()
                .map_err(|_| PipelineError::Detector("detection worker stopped".into()))?;
            merge(state, reply)?;
        }
        Ok(processed)
    })
}
