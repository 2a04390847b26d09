//! Grayscale template tracking by zero-mean normalized cross-correlation.
//!
//! Both the template and each candidate window are mean-subtracted and scaled
//! by their own L2 norm, so scores fall in `[-1, 1]`: 1 is a perfect match, -1
//! an inverted one, 0 no linear relationship. A window with no variance
//! scores 0.
//!
//! All sums are exact integers. The score of a `w x h` window with `n = w*h`
//! pixels is
//!
//! ```text
//! (n*Σ(T·I) - ΣT·ΣI) / sqrt((n*ΣT² - (ΣT)²) * (n*ΣI² - (ΣI)²))
//! ```
//!
//! Window sums and sums of squares come from a pair of integral images, so
//! only the cross term costs `w*h` multiplies per candidate.

use thiserror::Error;

use crate::geometry::{round_half_up, BBox, Frame, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackerError {
    #[error("window {w}x{h} at ({x}, {y}) is outside the {frame_w}x{frame_h} frame")]
    OutOfBounds {
        x: i64,
        y: i64,
        w: i64,
        h: i64,
        frame_w: usize,
        frame_h: usize,
    },
    #[error("template has zero variance")]
    ZeroVariance,
    #[error("search window admits no {w}x{h} placement")]
    EmptySearch { w: usize, h: usize },
}

/// Template patch with its precomputed statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
    sum: u64,
    sum_sq: u64,
    mean: f64,
    norm: f64,
}

impl Template {
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, TrackerError> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(TrackerError::OutOfBounds {
                x: 0,
                y: 0,
                w: width as i64,
                h: height as i64,
                frame_w: width,
                frame_h: height,
            });
        }
        let sum: u64 = pixels.iter().map(|&p| p as u64).sum();
        let sum_sq: u64 = pixels.iter().map(|&p| (p as u64) * (p as u64)).sum();
        let n = (width * height) as i128;
        let energy = n * sum_sq as i128 - (sum as i128) * (sum as i128);
        if energy <= 0 {
            return Err(TrackerError::ZeroVariance);
        }
        Ok(Self {
            width,
            height,
            pixels,
            sum,
            sum_sq,
            mean: sum as f64 / n as f64,
            norm: (energy as f64 / n as f64).sqrt(),
        })
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

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// L2 norm of the mean-subtracted pixels.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    fn len(&self) -> usize {
        self.width * self.height
    }
}

/// Integer pixel rectangle `(x, y, w, h)` a box occupies after rounding each
/// of its coordinates half-up.
pub fn pixel_rect(b: &BBox) -> (i64, i64, i64, i64) {
    (
        round_half_up(b.x()),
        round_half_up(b.y()),
        round_half_up(b.w()),
        round_half_up(b.h()),
    )
}

fn check_window(
    frame: &Frame,
    x: i64,
    y: i64,
    w: i64,
    h: i64,
) -> Result<(usize, usize), TrackerError> {
    if w <= 0
        || h <= 0
        || x < 0
        || y < 0
        || x + w > frame.width() as i64
        || y + h > frame.height() as i64
    {
        return Err(TrackerError::OutOfBounds {
            x,
            y,
            w,
            h,
            frame_w: frame.width(),
            frame_h: frame.height(),
        });
    }
    Ok((x as usize, y as usize))
}

pub fn make_template(frame: &Frame, b: &BBox) -> Result<Template, TrackerError> {
    let (x, y, w, h) = pixel_rect(b);
    let (x0, y0) = check_window(frame, x, y, w, h)?;
    let (w, h) = (w as usize, h as usize);
    let mut pixels = Vec::with_capacity(w * h);
    for row in y0..y0 + h {
        pixels.extend_from_slice(&frame.row(row)[x0..x0 + w]);
    }
    Template::from_pixels(w, h, pixels)
}

/// Correlation coefficient from exact window statistics.
#[inline]
fn coefficient(n: i128, t_sum: i128, t_sq: i128, i_sum: i128, i_sq: i128, cross: i128) -> f64 {
    let i_energy = n * i_sq - i_sum * i_sum;
    if i_energy <= 0 {
        return 0.0;
    }
    let t_energy = n * t_sq - t_sum * t_sum;
    let num = n * cross - t_sum * i_sum;
    let score = num as f64 / ((t_energy as f64).sqrt() * (i_energy as f64).sqrt());
    score.clamp(-1.0, 1.0)
}

#[inline]
fn cross_term(t: &Template, frame: &Frame, x: usize, y: usize) -> u64 {
    let w = t.width;
    let mut acc = 0u64;
    for (r, trow) in t.pixels.chunks_exact(w).enumerate() {
        let irow = &frame.row(y + r)[x..x + w];
        let row_sum: u32 = trow
            .iter()
            .zip(irow)
            .map(|(&a, &b)| a as u32 * b as u32)
            .sum();
        acc += row_sum as u64;
    }
    acc
}

/// Score of the template placed with its top-left corner at `at` (rounded
/// half-up to the pixel grid). Window statistics are summed directly.
pub fn ncc_score(t: &Template, frame: &Frame, at: Point) -> Result<f64, TrackerError> {
    let (x, y) = check_window(
        frame,
        round_half_up(at.x),
        round_half_up(at.y),
        t.width as i64,
        t.height as i64,
    )?;
    let mut i_sum = 0u64;
    let mut i_sq = 0u64;
    for r in 0..t.height {
        for &p in &frame.row(y + r)[x..x + t.width] {
            i_sum += p as u64;
            i_sq += (p as u64) * (p as u64);
        }
    }
    let cross = cross_term(t, frame, x, y);
    Ok(coefficient(
        t.len() as i128,
        t.sum as i128,
        t.sum_sq as i128,
        i_sum as i128,
        i_sq as i128,
        cross as i128,
    ))
}

/// Summed-area tables of pixel values and squared pixel values. Both have a
/// zero top row and left column, so entry `(x, y)` sums pixels strictly above
/// and to the left.
#[derive(Debug, Clone)]
pub struct IntegralImages {
    stride: usize,
    sum: Vec<u64>,
    sum_sq: Vec<u64>,
    frame_index: u64,
}

impl IntegralImages {
    pub fn new(frame: &Frame) -> Self {
        let (w, h) = (frame.width(), frame.height());
        let stride = w + 1;
        let mut sum = vec![0u64; stride * (h + 1)];
        let mut sum_sq = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let mut row_sum = 0u64;
            let mut row_sq = 0u64;
            let row = frame.row(y);
            for (x, &px) in row.iter().enumerate().take(w) {
                let p = px as u64;
                row_sum += p;
                row_sq += p * p;
                let at = (y + 1) * stride + x + 1;
                sum[at] = sum[at - stride] + row_sum;
                sum_sq[at] = sum_sq[at - stride] + row_sq;
            }
        }
        Self {
            stride,
            sum,
            sum_sq,
            frame_index: frame.index(),
        }
    }

    pub fn frame_index(&self) -> u64 {
        self.frame_index
    }

    #[inline]
    fn rect(table: &[u64], stride: usize, x: usize, y: usize, w: usize, h: usize) -> u64 {
        let a = table[y * stride + x];
        let b = table[y * stride + x + w];
        let c = table[(y + h) * stride + x];
        let d = table[(y + h) * stride + x + w];
        d + a - b - c
    }

    /// Sum and sum of squares of the `w x h` window at `(x, y)`.
    #[inline]
    pub fn window_stats(&self, x: usize, y: usize, w: usize, h: usize) -> (u64, u64) {
        (
            Self::rect(&self.sum, self.stride, x, y, w, h),
            Self::rect(&self.sum_sq, self.stride, x, y, w, h),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResult {
    /// Top-left corner of the best window.
    pub position: Point,
    pub score: f64,
}

/// Pixel bounds `[x0, x1) x [y0, y1)` that candidate windows must fit in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchWindow {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl SearchWindow {
    pub fn full(frame: &Frame) -> Self {
        Self {
            x0: 0,
            y0: 0,
            x1: frame.width() as i64,
            y1: frame.height() as i64,
        }
    }

    pub fn clipped(self, frame: &Frame) -> Self {
        Self {
            x0: self.x0.max(0),
            y0: self.y0.max(0),
            x1: self.x1.min(frame.width() as i64),
            y1: self.y1.min(frame.height() as i64),
        }
    }
}

/// Best placement of the template inside `search`, ties going to the
/// smaller y and then the smaller x.
pub fn match_template(
    t: &Template,
    frame: &Frame,
    search: SearchWindow,
) -> Result<MatchResult, TrackerError> {
    let integral = IntegralImages::new(frame);
    match_template_with(t, frame, &integral, search)
}

/// [`match_template`] reusing integral images already built for `frame`.
pub fn match_template_with(
    t: &Template,
    frame: &Frame,
    integral: &IntegralImages,
    search: SearchWindow,
) -> Result<MatchResult, TrackerError> {
    debug_assert_eq!(integral.frame_index(), frame.index());
    let s = search.clipped(frame);
    let (w, h) = (t.width as i64, t.height as i64);
    if s.x1 - s.x0 < w || s.y1 - s.y0 < h {
        return Err(TrackerError::EmptySearch {
            w: t.width,
            h: t.height,
        });
    }
    let n = t.len() as i128;
    let (t_sum, t_sq) = (t.sum as i128, t.sum_sq as i128);
    let mut best: Option<(f64, usize, usize)> = None;
    for y in s.y0 as usize..=(s.y1 - h) as usize {
        for x in s.x0 as usize..=(s.x1 - w) as usize {
            let (i_sum, i_sq) = integral.window_stats(x, y, t.width, t.height);
            let cross = cross_term(t, frame, x, y);
            let score = coefficient(n, t_sum, t_sq, i_sum as i128, i_sq as i128, cross as i128);
            if best.is_none_or(|(b, _, _)| score > b) {
                best = Some((score, x, y));
            }
        }
    }
    let (score, x, y) = best.expect("search admits at least one placement");
    Ok(MatchResult {
        position: Point::new(x as f64, y as f64),
        score,
    })
}

/// Search extent around the previous position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Margin {
    Pixels(u32),
    /// Search the whole frame.
    Full,
}

impl Default for Margin {
    fn default() -> Self {
        Margin::Pixels(16)
    }
}

impl std::str::FromStr for Margin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "full" | "inf" | "infinite" | "∞" => Ok(Margin::Full),
            other => other
                .parse::<u32>()
                .map(Margin::Pixels)
                .map_err(|_| format!("margin must be a non-negative integer or 'full', got {other:?}")),
        }
    }
}

impl std::fmt::Display for Margin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Margin::Pixels(m) => write!(f, "{m}"),
            Margin::Full => f.write_str("full"),
        }
    }
}

/// Window spanning the template at `prev_position`, grown by `margin` on
/// every side.
pub fn search_window_around(t: &Template, prev_position: Point, frame: &Frame, margin: Margin) -> SearchWindow {
    match margin {
        Margin::Full => SearchWindow::full(frame),
        Margin::Pixels(m) => {
            let (px, py, m) = (round_half_up(prev_position.x), round_half_up(prev_position.y), m as i64);
            SearchWindow {
                x0: px - m,
                y0: py - m,
                x1: px + t.width as i64 + m,
                y1: py + t.height as i64 + m,
            }
            .clipped(frame)
        }
    }
}

pub fn advance_track(
    t: &Template,
    prev_position: Point,
    frame: &Frame,
    margin: Margin,
) -> Result<MatchResult, TrackerError> {
    let integral = IntegralImages::new(frame);
    advance_track_with(t, prev_position, frame, &integral, margin)
}

pub fn advance_track_with(
    t: &Template,
    prev_position: Point,
    frame: &Frame,
    integral: &IntegralImages,
    margin: Margin,
) -> Result<MatchResult, TrackerError> {
    let search = search_window_around(t, prev_position, frame, margin);
    match_template_with(t, frame, integral, search)
}
