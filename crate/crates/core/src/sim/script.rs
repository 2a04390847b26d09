use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::geometry::{Point, Roi};

use super::ScriptError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keyframe {
    pub frame: u64,
    pub center: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Actor {
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub texture_seed: u64,
    pub confidence: f64,
    /// Strictly increasing in frame. The actor holds its first position
    /// before the first key and its last position after the last one.
    pub keys: Vec<Keyframe>,
}

impl Actor {
    /// Center at `frame`, linearly interpolated between keys.
    pub fn center_at(&self, frame: u64) -> Point {
        let first = self.keys[0];
        if frame <= first.frame {
            return first.center;
        }
        for pair in self.keys.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if frame <= b.frame {
                let t = (frame - a.frame) as f64 / (b.frame - a.frame) as f64;
                return Point::new(
                    a.center.x + t * (b.center.x - a.center.x),
                    a.center.y + t * (b.center.y - a.center.y),
                );
            }
        }
        self.keys[self.keys.len() - 1].center
    }

    /// Frames at which a hold begins: a key whose position the actor keeps
    /// until the next key (or forever, for the last key), reached by motion.
    pub fn stop_frames(&self) -> Vec<u64> {
        let mut stops = Vec::new();
        for (i, k) in self.keys.iter().enumerate() {
            let holds = self.keys.get(i + 1).is_none_or(|n| n.center == k.center);
            let arrived = i > 0 && self.keys[i - 1].center != k.center;
            if holds && arrived {
                stops.push(k.frame);
            }
        }
        stops
    }
}

/// A scenario description. Text form:
///
/// ```text
/// # comment
/// width = 320
/// height = 240
/// fps = 25
/// frames = 900
/// background = 128
/// contrast = 160
/// jitter = 0.5
/// roi = 20,80 300,80 310,220 10,220
/// actor A 48 24 11 0.9
/// key A 0 60 30
/// key A 40 70 200
/// ```
///
/// `actor NAME W H SEED [CONFIDENCE]` declares a textured rectangle;
/// `key NAME FRAME CX CY` places its center at a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioScript {
    pub width: usize,
    pub height: usize,
    pub fps: f64,
    pub frames: u64,
    pub background: u8,
    /// Span of texture intensities, centered on the background level.
    pub contrast: u8,
    /// Standard deviation of detection center jitter, in pixels.
    pub jitter_sigma: f64,
    pub roi: Roi,
    pub actors: Vec<Actor>,
}

impl ScenarioScript {
    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut width = 320;
        let mut height = 240;
        let mut fps = 25.0;
        let mut frames = None;
        let mut background = 128u8;
        let mut contrast = 160u8;
        let mut jitter_sigma = 0.5;
        let mut roi = None;
        let mut actors: Vec<Actor> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fail = |message: String| ScriptError::at(lineno, message);
            if let Some((key, value)) = line.split_once('=') {
                let (key, value) = (key.trim(), value.trim());
                match key {
                    "width" => width = num(value, key).map_err(fail)?,
                    "height" => height = num(value, key).map_err(fail)?,
                    "fps" => fps = num(value, key).map_err(fail)?,
                    "frames" => frames = Some(num(value, key).map_err(fail)?),
                    "background" => background = num(value, key).map_err(fail)?,
                    "contrast" => contrast = num(value, key).map_err(fail)?,
                    "jitter" => jitter_sigma = num(value, key).map_err(fail)?,
                    "roi" => roi = Some(parse_roi(value).map_err(fail)?),
                    other => return Err(fail(format!("unknown setting {other:?}"))),
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "actor" => {
                    if !(5..=6).contains(&fields.len()) {
                        return Err(fail("expected: actor NAME W H SEED [CONFIDENCE]".into()));
                    }
                    let name = fields[1].to_string();
                    if actors.iter().any(|a| a.name == name) {
                        return Err(fail(format!("actor {name:?} declared twice")));
                    }
                    let confidence = match fields.get(5) {
                        Some(c) => num(c, "confidence").map_err(fail)?,
                        None => 0.9,
                    };
                    actors.push(Actor {
                        name,
                        width: num(fields[2], "width").map_err(fail)?,
                        height: num(fields[3], "height").map_err(fail)?,
                        texture_seed: num(fields[4], "seed").map_err(fail)?,
                        confidence,
                        keys: Vec::new(),
                    });
                }
                "key" => {
                    if fields.len() != 5 {
                        return Err(fail("expected: key NAME FRAME CX CY".into()));
                    }
                    let frame = num(fields[2], "frame").map_err(fail)?;
                    let center = Point::new(
                        num(fields[3], "cx").map_err(fail)?,
                        num(fields[4], "cy").map_err(fail)?,
                    );
                    let actor = actors
                        .iter_mut()
                        .find(|a| a.name == fields[1])
                        .ok_or_else(|| fail(format!("key for undeclared actor {:?}", fields[1])))?;
                    if actor.keys.last().is_some_and(|k| k.frame >= frame) {
                        return Err(fail(format!(
                            "keyframes for {:?} must be strictly increasing",
                            actor.name
                        )));
                    }
                    actor.keys.push(Keyframe { frame, center });
                }
                other => return Err(fail(format!("unknown directive {other:?}"))),
            }
        }

        let script = Self {
            width,
            height,
            fps,
            frames: frames.ok_or_else(|| ScriptError::general("missing setting: frames"))?,
            background,
            contrast,
            jitter_sigma,
            roi: roi.ok_or_else(|| ScriptError::general("missing setting: roi"))?,
            actors,
        };
        script.check_fields()?;
        Ok(script)
    }

    fn check_fields(&self) -> Result<(), ScriptError> {
        if self.width == 0 || self.height == 0 {
            return Err(ScriptError::general("frame size must be positive"));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(ScriptError::general("fps must be positive"));
        }
        if !(self.jitter_sigma.is_finite() && self.jitter_sigma >= 0.0) {
            return Err(ScriptError::general("jitter must be >= 0"));
        }
        for a in &self.actors {
            if a.keys.is_empty() {
                return Err(ScriptError::general(format!("actor {:?} has no keyframes", a.name)));
            }
            if !(0.0..=1.0).contains(&a.confidence) {
                return Err(ScriptError::general(format!(
                    "actor {:?}: confidence outside [0, 1]",
                    a.name
                )));
            }
            if a.keys.iter().any(|k| !(k.center.x.is_finite() && k.center.y.is_finite())) {
                return Err(ScriptError::general(format!("actor {:?}: non-finite key", a.name)));
            }
        }
        Ok(())
    }

    pub fn actor(&self, name: &str) -> Option<&Actor> {
        self.actors.iter().find(|a| a.name == name)
    }
}

impl FromStr for ScenarioScript {
    type Err = ScriptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for ScenarioScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "width = {}", self.width)?;
        writeln!(f, "height = {}", self.height)?;
        writeln!(f, "fps = {}", self.fps)?;
        writeln!(f, "frames = {}", self.frames)?;
        writeln!(f, "background = {}", self.background)?;
        writeln!(f, "contrast = {}", self.contrast)?;
        writeln!(f, "jitter = {}", self.jitter_sigma)?;
        let mut roi = String::new();
        for (i, v) in self.roi.vertices().iter().enumerate() {
            if i > 0 {
                roi.push(' ');
            }
            let _ = write!(roi, "{},{}", v.x, v.y);
        }
        writeln!(f, "roi = {roi}")?;
        for a in &self.actors {
            writeln!(
                f,
                "actor {} {} {} {} {}",
                a.name, a.width, a.height, a.texture_seed, a.confidence
            )?;
            for k in &a.keys {
                writeln!(f, "key {} {} {} {}", a.name, k.frame, k.center.x, k.center.y)?;
            }
        }
        Ok(())
    }
}

fn num<T: FromStr>(s: &str, what: &str) -> Result<T, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("{what}: cannot parse {s:?}"))
}

fn parse_roi(value: &str) -> Result<Roi, String> {
    let mut vertices = Vec::new();
    for pair in value.split_whitespace() {
        let (x, y) = pair
            .split_once(',')
            .ok_or_else(|| format!("roi vertex {pair:?} is not x,y"))?;
        vertices.push(Point::new(num(x, "roi x")?, num(y, "roi y")?));
    }
    Roi::new(vertices).map_err(|e| e.to_string())
}
