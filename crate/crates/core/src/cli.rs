//! The `parkwatch` command line: `run`, `anchors` and `simulate`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 `anchors --strict`
//! found centers closer than the minimum separation.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::anchors::{
    extract_aspect_ratios, kmeans_1d, validate_separation, RatioConvention, RatioSample,
    DEFAULT_K, DEFAULT_MAX_ITERATIONS, DEFAULT_MIN_SEPARATION,
};
use crate::detection::{parse_detection_file, parse_ground_truth_boxes};
use crate::frames::{draw_outline, frame_file_name, write_pgm, FrameDir};
use crate::geometry::{Frame, Roi};
use crate::motion::{events_to_jsonl, Phase};
use crate::ncc::Margin;
use crate::pipeline::{
    run_pipeline_observed, FileDetector, Mode, PipelineConfig, PipelineError, PipelineState,
};
use crate::sim::{self, ScenarioScript};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_STRICT: i32 = 3;

pub const ANNOTATIONS_FILE: &str = "annotations.jsonl";
/// Outline intensity for tracked and illegal boxes in annotated frames.
pub const OUTLINE_TRACKED: u8 = 255;
pub const OUTLINE_ILLEGAL: u8 = 0;

#[derive(Debug, Parser)]
#[command(name = "parkwatch", version, about = "Illegal-parking detection over frame sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Track vehicles through a frame directory and write the event log.
    Run(Box<RunArgs>),
    /// Cluster box aspect ratios into default-box ratios.
    Anchors(AnchorArgs),
    /// Generate a synthetic scenario with its expected event log.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Directory of frame_NNNNNN.pgm files.
    #[arg(long)]
    pub frames: PathBuf,
    /// Detection CSV: frame,x,y,w,h,class,confidence.
    #[arg(long)]
    pub detections: PathBuf,
    /// ROI polygon file, one "x y" vertex per line.
    #[arg(long)]
    pub roi: PathBuf,
    /// Settings file of "key = value" lines named like the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Event log output; standard output when omitted.
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Directory for per-frame track records (annotations.jsonl).
    #[arg(long)]
    pub annotate: Option<PathBuf>,
    /// Also write frame copies with box outlines into the annotate directory.
    #[arg(long, requires = "annotate")]
    pub annotate_frames: bool,
    #[command(flatten)]
    pub settings: SettingFlags,
}

/// Pipeline settings settable from flags or a config file.
#[derive(Debug, Args, Default, Clone, PartialEq)]
pub struct SettingFlags {
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub fps: Option<f64>,
    /// Minimum detection confidence.
    #[arg(long)]
    pub conf: Option<f64>,
    /// Association IOU threshold (strict).
    #[arg(long)]
    pub iou: Option<f64>,
    /// Stationary displacement threshold in pixels.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Seconds stationary before the alarm.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Re-detection interval in frames.
    #[arg(long)]
    pub redetect: Option<u64>,
    /// Search margin in pixels, or "full".
    #[arg(long, value_parser = parse_margin)]
    pub margin: Option<Margin>,
    /// Minimum NCC score for accepting a match.
    #[arg(long = "ncc-min")]
    pub ncc_min: Option<f64>,
    /// Comma-separated class ids to track.
    #[arg(long, value_parser = parse_classes)]
    pub classes: Option<BTreeSet<u32>>,
    /// Async mode: most frames a merge may trail its detection frame.
    #[arg(long = "max-lag")]
    pub max_lag: Option<u64>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_margin(s: &str) -> Result<Margin, String> {
    s.parse()
}

fn parse_classes(s: &str) -> Result<BTreeSet<u32>, String> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<u32>()
                .map_err(|_| format!("class id must be a non-negative integer, got {c:?}"))
        })
        .collect()
}

fn parse_value<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse {s:?}"))
}

impl SettingFlags {
    /// Parses "key = value" lines. Keys are the flag names without the leading dashes;
    /// `#` starts a comment.
    pub fn parse_config(text: &str) -> Result<Self, String> {
        let mut s = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            s.set(key.trim(), value.trim())
                .map_err(|m| format!("line {}: {}: {m}", i + 1, key.trim()))?;
        }
        Ok(s)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "mode" => self.mode = Some(parse_mode(value)?),
            "fps" => self.fps = Some(parse_value(value)?),
            "conf" => self.conf = Some(parse_value(value)?),
            "iou" => self.iou = Some(parse_value(value)?),
            "eps" => self.eps = Some(parse_value(value)?),
            "tau" => self.tau = Some(parse_value(value)?),
            "redetect" => self.redetect = Some(parse_value(value)?),
            "margin" => self.margin = Some(parse_margin(value)?),
            "ncc-min" => self.ncc_min = Some(parse_value(value)?),
            "classes" => self.classes = Some(parse_classes(value)?),
            "max-lag" => self.max_lag = Some(parse_value(value)?),
            _ => return Err("unknown setting".into()),
        }
        Ok(())
    }

    /// Overwrites every field of `cfg` that is set here.
    pub fn apply(&self, cfg: &mut PipelineConfig) {
        if let Some(v) = self.mode {
            cfg.mode = v;
        }
        if let Some(v) = self.fps {
            cfg.fps = v;
        }
        if let Some(v) = self.conf {
            cfg.conf_threshold = v;
        }
        if let Some(v) = self.iou {
            cfg.iou_threshold = v;
        }
        if let Some(v) = self.eps {
            cfg.epsilon_px = v;
        }
        if let Some(v) = self.tau {
            cfg.tau_seconds = v;
        }
        if let Some(v) = self.redetect {
            cfg.redetect_interval = v;
        }
        if let Some(v) = self.margin {
            cfg.search_margin = v;
        }
        if let Some(v) = self.ncc_min {
            cfg.ncc_min_score = v;
        }
        if let Some(v) = &self.classes {
            cfg.allowed_classes = v.clone();
        }
        if let Some(v) = self.max_lag {
            cfg.max_detection_lag = v;
        }
    }
}

/// Defaults, then the config file, then command-line flags.
pub fn resolve_config(file: Option<&SettingFlags>, flags: &SettingFlags) -> PipelineConfig {
    let mut cfg = PipelineConfig::default();
    if let Some(f) = file {
        f.apply(&mut cfg);
    }
    flags.apply(&mut cfg);
    cfg
}

#[derive(Debug, Args)]
pub struct AnchorArgs {
    /// Box CSV in detection format; only x,y,w,h are read.
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[arg(long = "min-sep", default_value_t = DEFAULT_MIN_SEPARATION)]
    pub min_sep: f64,
    #[arg(long = "ratio-convention", default_value_t = RatioConvention::HeightOverWidth, value_parser = parse_convention)]
    pub ratio_convention: RatioConvention,
    #[arg(long = "max-iter", default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iter: usize,
    /// Exit with status 3 when any two centers are too close.
    #[arg(long)]
    pub strict: bool,
}

fn parse_convention(s: &str) -> Result<RatioConvention, String> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// `builtin:NAME` or a script file.
    #[arg(long)]
    pub script: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Strict(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Strict(_) => EXIT_STRICT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Strict(m) => m,
        }
    }
}

fn data(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| data(path, e))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| data(path, e))
}

/// Process entry point.
pub fn main() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with(std::env::args_os(), &mut out, &mut err)
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Anchors(a) => cmd_anchors(a, out, err),
        Command::Simulate(a) => cmd_simulate(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Flag name for a `PipelineConfig` field.
fn flag_for(field: &str) -> &str {
    match field {
        "conf_threshold" => "conf",
        "iou_threshold" => "iou",
        "epsilon_px" => "eps",
        "tau_seconds" => "tau",
        "redetect_interval" => "redetect",
        "search_margin" => "margin",
        "ncc_min_score" => "ncc-min",
        "allowed_classes" => "classes",
        "max_detection_lag" => "max-lag",
        other => other,
    }
}

fn pipeline_error(e: PipelineError) -> CliError {
    match e {
        PipelineError::Config(c) => CliError::Usage(c.to_string()),
        other => CliError::Data(other.to_string()),
    }
}

struct Annotator {
    dir: PathBuf,
    records: BufWriter<fs::File>,
    frames: bool,
    fps: f64,
}

impl Annotator {
    fn new(dir: &Path, frames: bool, fps: f64) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| data(dir, e))?;
        if frames {
            let fdir = dir.join("frames");
            fs::create_dir_all(&fdir).map_err(|e| data(&fdir, e))?;
        }
        Ok(Self {
            records: create(&dir.join(ANNOTATIONS_FILE))?,
            dir: dir.to_path_buf(),
            frames,
            fps,
        })
    }

    fn observe(&mut self, frame: &Frame, state: &PipelineState) -> Result<(), PipelineError> {
        let path = self.dir.join(ANNOTATIONS_FILE);
        let io = |e: std::io::Error| PipelineError::Detector(format!("{}: {e}", path.display()));
        for rec in state.annotations(self.fps) {
            let line = serde_json::to_string(&rec).expect("record serializes");
            writeln!(self.records, "{line}").map_err(io)?;
        }
        if self.frames {
            let mut copy = frame.clone();
            for t in &state.tracks {
                let value = if t.motion.phase == Phase::Illegal {
                    OUTLINE_ILLEGAL
                } else {
                    OUTLINE_TRACKED
                };
                draw_outline(&mut copy, &t.bbox, value);
            }
            write_pgm(&self.dir.join("frames").join(frame_file_name(frame.index())), &copy)?;
        }
        Ok(())
    }
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let file_settings = match &a.config {
        Some(p) => Some(SettingFlags::parse_config(&read_text(p)?).map_err(|m| data(p, m))?),
        None => None,
    };
    let cfg = resolve_config(file_settings.as_ref(), &a.settings);
    cfg.validate()
        .map_err(|e| CliError::Usage(format!("--{}: {}", flag_for(e.field), e.message)))?;

    let roi = Roi::parse(&read_text(&a.roi)?).map_err(|e| data(&a.roi, e))?;
    let det_file = fs::File::open(&a.detections).map_err(|e| data(&a.detections, e))?;
    let detections = parse_detection_file(BufReader::new(det_file)).map_err(|e| data(&a.detections, e))?;
    let frames = FrameDir::open(&a.frames)?;

    let mut annotator = match &a.annotate {
        Some(dir) => Some(Annotator::new(dir, a.annotate_frames, cfg.fps)?),
        None => None,
    };
    let mut observer = |frame: &Frame, state: &PipelineState| match annotator.as_mut() {
        Some(ann) => ann.observe(frame, state),
        None => Ok(()),
    };
    let output = run_pipeline_observed(frames, &mut FileDetector::new(&detections), &roi, &cfg, &mut observer)
        .map_err(pipeline_error)?;
    if let Some(mut ann) = annotator {
        let path = ann.dir.join(ANNOTATIONS_FILE);
        ann.records.flush().map_err(|e| data(&path, e))?;
    }

    let log = events_to_jsonl(&output.events);
    match &a.events {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(log.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| data(p, e))?;
        }
        None => out
            .write_all(log.as_bytes())
            .map_err(|e| CliError::Data(format!("stdout: {e}")))?,
    }
    let _ = writeln!(
        err,
        "processed {} frames, {} events, {} merges",
        output.frames_processed,
        output.events.len(),
        output.final_state.merges.len()
    );
    Ok(())
}

fn cmd_anchors(a: &AnchorArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let file = fs::File::open(&a.input).map_err(|e| data(&a.input, e))?;
    let boxes = parse_ground_truth_boxes(BufReader::new(file)).map_err(|e| data(&a.input, e))?;
    let samples: Vec<RatioSample> = extract_aspect_ratios(&boxes, a.ratio_convention);
    let result = kmeans_1d(&samples, a.k, a.max_iter).map_err(|e| match e {
        crate::anchors::AnchorError::ZeroK | crate::anchors::AnchorError::ZeroIterations => {
            CliError::Usage(e.to_string())
        }
        other => data(&a.input, other),
    })?;
    let centers: Vec<String> = result.centers.iter().map(|c| format!("{c}")).collect();
    let counts: Vec<String> = result.counts().iter().map(usize::to_string).collect();
    let write_err = |e: std::io::Error| CliError::Data(format!("stdout: {e}"));
    writeln!(out, "centers ({}): {}", a.ratio_convention, centers.join(" ")).map_err(write_err)?;
    writeln!(out, "counts: {}", counts.join(" ")).map_err(write_err)?;
    writeln!(out, "wcss: {}", result.wcss).map_err(write_err)?;
    writeln!(out, "iterations: {}", result.iterations).map_err(write_err)?;
    let warnings = validate_separation(&result, a.min_sep);
    for w in &warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if a.strict && !warnings.is_empty() {
        return Err(CliError::Strict(format!(
            "{} center pair(s) closer than {}",
            warnings.len(),
            a.min_sep
        )));
    }
    Ok(())
}

/// `builtin:NAME` or a path to a script file.
pub fn load_script(source: &str) -> Result<ScenarioScript, CliError> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return sim::builtin(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown builtin script {name:?}; available: {}",
                sim::BUILTIN_NAMES.join(", ")
            ))
        });
    }
    let path = Path::new(source);
    ScenarioScript::parse(&read_text(path)?).map_err(|e| data(path, e))
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let script = load_script(&a.script)?;
    let scenario = sim::write_scenario(&script, a.seed, &a.out).map_err(|e| match e {
        sim::SimError::Script(s) => CliError::Data(format!("{}: {s}", a.script)),
        other => CliError::Data(other.to_string()),
    })?;
    let _ = writeln!(
        out,
        "wrote {} frames, {} and {} to {}",
        scenario.script().frames,
        sim::DETECTIONS_FILE,
        sim::EXPECTED_EVENTS_FILE,
        a.out.display()
    );
    Ok(())
}

impl From<crate::frames::FrameIoError> for CliError {
    fn from(e: crate::frames::FrameIoError) -> Self {
        CliError::Data(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(extra: &[&str]) -> RunArgs {
        let mut argv = vec!["parkwatch", "run", "--frames", "f", "--detections", "d", "--roi", "r"];
        argv.extend_from_slice(extra);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Run(a) => *a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn defaults_without_overrides() {
        let a = run_args(&[]);
        assert_eq!(resolve_config(None, &a.settings), PipelineConfig::default());
    }

    #[test]
    fn config_file_overrides_defaults_and_flags_override_file() {
        let file = SettingFlags::parse_config(
            "fps = 30\nconf = 0.7\niou = 0.4\neps = 3\ntau = 10\nredetect = 10\n\
             margin = 8\nncc-min = 0.3\nclasses = 0,2\nmode = async\nmax-lag = 2\n",
        )
        .unwrap();
        let from_file = resolve_config(Some(&file), &SettingFlags::default());
        assert_eq!(from_file.fps, 30.0);
        assert_eq!(from_file.conf_threshold, 0.7);
        assert_eq!(from_file.iou_threshold, 0.4);
        assert_eq!(from_file.epsilon_px, 3.0);
        assert_eq!(from_file.tau_seconds, 10.0);
        assert_eq!(from_file.redetect_interval, 10);
        assert_eq!(from_file.search_margin, Margin::Pixels(8));
        assert_eq!(from_file.ncc_min_score, 0.3);
        assert_eq!(from_file.allowed_classes, BTreeSet::from([0, 2]));
        assert_eq!(from_file.mode, Mode::Async);
        assert_eq!(from_file.max_detection_lag, 2);

        let a = run_args(&[
            "--fps", "20", "--conf", "0.8", "--iou", "0.6", "--eps", "1.5", "--tau", "5",
            "--redetect", "5", "--margin", "full", "--ncc-min", "0.1", "--classes", "3",
            "--mode", "sync", "--max-lag", "7",
        ]);
        let both = resolve_config(Some(&file), &a.settings);
        assert_eq!(both.fps, 20.0);
        assert_eq!(both.conf_threshold, 0.8);
        assert_eq!(both.iou_threshold, 0.6);
        assert_eq!(both.epsilon_px, 1.5);
        assert_eq!(both.tau_seconds, 5.0);
        assert_eq!(both.redetect_interval, 5);
        assert_eq!(both.search_margin, Margin::Full);
        assert_eq!(both.ncc_min_score, 0.1);
        assert_eq!(both.allowed_classes, BTreeSet::from([3]));
        assert_eq!(both.mode, Mode::Sync);
        assert_eq!(both.max_detection_lag, 7);
    }

    #[test]
    fn flags_override_file_one_at_a_time() {
        let file = SettingFlags::parse_config("fps = 30\ntau = 10\n").unwrap();
        let a = run_args(&["--tau", "12"]);
        let cfg = resolve_config(Some(&file), &a.settings);
        assert_eq!((cfg.fps, cfg.tau_seconds), (30.0, 12.0));
        assert_eq!(cfg.conf_threshold, PipelineConfig::default().conf_threshold);
    }

    #[test]
    fn config_file_errors_name_the_line() {
        let e = SettingFlags::parse_config("fps = 25\nspeed = 3\n").unwrap_err();
        assert!(e.contains("line 2") && e.contains("speed"), "{e}");
        assert!(SettingFlags::parse_config("conf 0.5\n").is_err());
        assert!(SettingFlags::parse_config("margin = wide\n").is_err());
    }

    fn exit_of(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = exit_of(&["parkwatch", "run", "--frames", "f", "--detections", "d"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--roi"), "{err}");
        assert_eq!(exit_of(&["parkwatch", "run", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(exit_of(&["parkwatch"]).0, EXIT_USAGE);
        assert_eq!(exit_of(&["parkwatch", "--help"]).0, EXIT_OK);
    }

    #[test]
    fn out_of_range_flag_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().display().to_string();
        let (code, _, err) = exit_of(&[
            "parkwatch", "run", "--frames", &p, "--detections", &p, "--roi", &p, "--conf", "1.5",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--conf"), "{err}");
    }

    #[test]
    fn missing_files_are_data_errors() {
        let (code, _, err) = exit_of(&[
            "parkwatch", "run", "--frames", "/nonexistent/f", "--detections", "/nonexistent/d",
            "--roi", "/nonexistent/roi.txt",
        ]);
        assert_eq!(code, EXIT_DATA);
        assert!(err.contains("/nonexistent/roi.txt"), "{err}");
    }

    #[test]
    fn anchors_two_exact_clusters() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("boxes.csv");
        fs::write(&csv, "0,0,0,100,50,0,1\n0,5,5,10,7,0,1\n0,9,9,100,50\n").unwrap();
        let p = csv.display().to_string();
        let (code, out, _) = exit_of(&["parkwatch", "anchors", &p, "--k", "2"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("centers (h-over-w): 0.5 0.7\n"), "{out}");
        let (code, _, err) = exit_of(&["parkwatch", "anchors", &p, "--min-sep", "0.5", "--strict"]);
        assert_eq!(code, EXIT_STRICT);
        assert!(err.contains("warning"));
        assert_eq!(exit_of(&["parkwatch", "anchors", &p, "--min-sep", "0.5"]).0, EXIT_OK);
        assert_eq!(exit_of(&["parkwatch", "anchors", &p, "--k", "0"]).0, EXIT_USAGE);
        assert_eq!(exit_of(&["parkwatch", "anchors", &p, "--k", "3"]).0, EXIT_DATA);
    }

    #[test]
    fn unknown_builtin_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().display().to_string();
        let (code, _, err) = exit_of(&["parkwatch", "simulate", "--script", "builtin:nope", "--out", &p]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("figure5"));
    }
}
