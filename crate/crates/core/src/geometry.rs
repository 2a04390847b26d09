//! Value types shared by every stage: frames, boxes, points and the
//! no-parking polygon.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid box: width {w} and height {h} must be finite and positive")]
    InvalidBox { w: f64, h: f64 },
    #[error("invalid box: non-finite origin ({x}, {y})")]
    NonFiniteOrigin { x: f64, y: f64 },
    #[error("frame buffer has {got} pixels, expected {width}x{height}")]
    FrameSize {
        width: usize,
        height: usize,
        got: usize,
    },
    #[error("invalid roi: {0}")]
    InvalidRoi(String),
    #[error("roi line {line}: {message}")]
    RoiParse { line: usize, message: String },
}

/// Rounds half-up onto the integer pixel grid.
pub fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned box, top-left corner plus size, in continuous pixel
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct BBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

#[derive(Deserialize)]
struct RawBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl TryFrom<RawBox> for BBox {
    type Error = GeometryError;

    fn try_from(raw: RawBox) -> Result<Self, Self::Error> {
        BBox::new(raw.x, raw.y, raw.w, raw.h)
    }
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self, GeometryError> {
        if !(w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0) {
            return Err(GeometryError::InvalidBox { w, h });
        }
        if !(x.is_finite() && y.is_finite()) {
            return Err(GeometryError::NonFiniteOrigin { x, y });
        }
        Ok(Self { x, y, w, h })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> Point {
        Point::new(self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn top_left(&self) -> Point {
        Point::new(self.x, self.y)
    }

    /// Same size, moved so the top-left corner sits at `p`.
    pub fn with_top_left(&self, p: Point) -> Self {
        Self {
            x: p.x,
            y: p.y,
            ..*self
        }
    }

    /// Intersection over union of the geometric (real-valued) areas.
    pub fn iou(&self, other: &BBox) -> f64 {
        let ix = (self.x + self.w).min(other.x + other.w) - self.x.max(other.x);
        let iy = (self.y + self.h).min(other.y + other.h) - self.y.max(other.y);
        if ix <= 0.0 || iy <= 0.0 {
            return 0.0;
        }
        let inter = ix * iy;
        let union = self.area() + other.area() - inter;
        (inter / union).clamp(0.0, 1.0)
    }

    /// Intersection with `[0, width) x [0, height)`, if any area remains.
    pub fn clip_to(&self, width: usize, height: usize) -> Option<BBox> {
        let x0 = self.x.max(0.0);
        let y0 = self.y.max(0.0);
        let x1 = (self.x + self.w).min(width as f64);
        let y1 = (self.y + self.h).min(height as f64);
        BBox::new(x0, y0, x1 - x0, y1 - y0).ok()
    }
}

pub fn bbox_iou(a: &BBox, b: &BBox) -> f64 {
    a.iou(b)
}

pub fn bbox_center(b: &BBox) -> Point {
    b.center()
}

/// Grayscale frame, row-major 8-bit luminance.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    index: u64,
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Frame {
    pub fn new(
        index: u64,
        width: usize,
        height: usize,
        pixels: Vec<u8>,
    ) -> Result<Self, GeometryError> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(GeometryError::FrameSize {
                width,
                height,
                got: pixels.len(),
            });
        }
        Ok(Self {
            index,
            width,
            height,
            pixels,
        })
    }

    pub fn filled(index: u64, width: usize, height: usize, value: u8) -> Self {
        Self {
            index,
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn with_index(mut self, index: u64) -> Self {
        self.index = index;
        self
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[u8] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }
}

/// Simple polygon marking the monitored area.
#[derive(Debug, Clone, PartialEq)]
pub struct Roi {
    vertices: Vec<Point>,
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    let len = a.distance(&b);
    let tol = 1e-9 * len.max(1.0);
    if cross(a, b, p).abs() > tol * len.max(1.0) {
        return false;
    }
    p.x >= a.x.min(b.x) - tol
        && p.x <= a.x.max(b.x) + tol
        && p.y >= a.y.min(b.y) - tol
        && p.y <= a.y.max(b.y) + tol
}

fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

impl Roi {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::InvalidRoi(format!(
                "need at least 3 vertices, got {n}"
            )));
        }
        if vertices.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(GeometryError::InvalidRoi("non-finite vertex".into()));
        }
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(GeometryError::InvalidRoi(format!(
                    "vertex {i} repeats its successor"
                )));
            }
        }
        let roi = Self { vertices };
        if roi.signed_area().abs() <= 1e-12 {
            return Err(GeometryError::InvalidRoi("polygon has zero area".into()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                // adjacent edges share a vertex by construction
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = roi.edge(i);
                let (c, d) = roi.edge(j);
                if segments_touch(a, b, c, d) {
                    return Err(GeometryError::InvalidRoi(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(roi)
    }

    /// Axis-aligned rectangle from its top-left corner and size.
    pub fn rect(x: f64, y: f64, w: f64, h: f64) -> Result<Self, GeometryError> {
        Self::new(vec![
            Point::new(x, y),
            Point::new(x + w, y),
            Point::new(x + w, y + h),
            Point::new(x, y + h),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let twice: f64 = (0..n)
            .map(|i| {
                let (a, b) = self.edge(i);
                a.x * b.y - b.x * a.y
            })
            .sum();
        twice / 2.0
    }

    /// Even-odd containment; points on the boundary are inside.
    pub fn contains(&self, p: Point) -> bool {
        let n = self.vertices.len();
        if (0..n).any(|i| {
            let (a, b) = self.edge(i);
            on_segment(p, a, b)
        }) {
            return true;
        }
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let vi = self.vertices[i];
            let vj = self.vertices[j];
            if (vi.y > p.y) != (vj.y > p.y) {
                let x_cross = vi.x + (p.y - vi.y) * (vj.x - vi.x) / (vj.y - vi.y);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Parses the ROI text format: one `x y` vertex per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut vertices = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(GeometryError::RoiParse {
                    line: i + 1,
                    message: format!("expected 2 numbers, found {}", fields.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| GeometryError::RoiParse {
                    line: i + 1,
                    message: format!("not a number: {s:?}"),
                })
            };
            vertices.push(Point::new(parse(fields[0])?, parse(fields[1])?));
        }
        Self::new(vertices)
    }
}

impl FromStr for Roi {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Roi::parse(s)
    }
}

impl fmt::Display for Roi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            writeln!(f, "{} {}", v.x, v.y)?;
        }
        Ok(())
    }
}
