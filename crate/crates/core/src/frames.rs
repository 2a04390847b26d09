//! Frame input and output: binary PGM (P5) files, numbered frame
//! directories, and box outlines for annotated copies.

use std::fs;
use std::io::{BufReader, BufWriter, Cursor, Read, Write};
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmDecoder, PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageDecoder};
use thiserror::Error;

use crate::geometry::{round_half_up, BBox, Frame};

#[derive(Debug, Error)]
pub enum FrameIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FrameIoError + '_ {
    move |source| FrameIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, message: impl Into<String>) -> FrameIoError {
    FrameIoError::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Decodes an 8-bit binary graymap.
pub fn decode_pgm<R: Read>(reader: R, index: u64) -> Result<Frame, String> {
    let decoder = PnmDecoder::new(BufReader::new(reader)).map_err(|e| e.to_string())?;
    if decoder.subtype() != PnmSubtype::Graymap(SampleEncoding::Binary) {
        return Err(format!("expected a binary graymap (P5), found {:?}", decoder.subtype()));
    }
    if decoder.color_type() != image::ColorType::L8 {
        return Err("only 8-bit graymaps are supported".into());
    }
    let (w, h) = decoder.dimensions();
    let mut pixels = vec![0u8; decoder.total_bytes() as usize];
    decoder.read_image(&mut pixels).map_err(|e| e.to_string())?;
    Frame::new(index, w as usize, h as usize, pixels).map_err(|e| e.to_string())
}

pub fn encode_pgm<W: Write>(frame: &Frame, writer: W) -> Result<(), String> {
    PnmEncoder::new(writer)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .encode(
            frame.pixels(),
            frame.width() as u32,
            frame.height() as u32,
            ExtendedColorType::L8,
        )
        .map_err(|e| e.to_string())
}

pub fn pgm_bytes(frame: &Frame) -> Vec<u8> {
    let mut out = Vec::new();
    encode_pgm(frame, Cursor::new(&mut out)).expect("in-memory encode");
    out
}

pub fn read_pgm(path: &Path, index: u64) -> Result<Frame, FrameIoError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    decode_pgm(file, index).map_err(|m| format_err(path, m))
}

pub fn write_pgm(path: &Path, frame: &Frame) -> Result<(), FrameIoError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    encode_pgm(frame, &mut w).map_err(|m| format_err(path, m))?;
    w.flush().map_err(io_err(path))
}

pub fn frame_file_name(index: u64) -> String {
    format!("frame_{index:06}.pgm")
}

fn parse_frame_name(name: &str) -> Option<u64> {
    let digits = name.strip_prefix("frame_")?.strip_suffix(".pgm")?;
    if digits.len() < 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Frames `frame_NNNNNN.pgm` from a directory, yielded in index order and
/// read lazily. Index contiguity is checked by the consumer.
#[derive(Debug)]
pub struct FrameDir {
    files: Vec<(u64, PathBuf)>,
    next: usize,
}

impl FrameDir {
    pub fn open(dir: &Path) -> Result<Self, FrameIoError> {
        let mut files = Vec::new();
        for entry in fs::read_dir(dir).map_err(io_err(dir))? {
            let entry = entry.map_err(io_err(dir))?;
            let name = entry.file_name();
            if let Some(index) = name.to_str().and_then(parse_frame_name) {
                files.push((index, entry.path()));
            }
        }
        files.sort();
        Ok(Self { files, next: 0 })
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}

impl Iterator for FrameDir {
    type Item = Result<Frame, FrameIoError>;

    fn next(&mut self) -> Option<Self::Item> {
        let (index, path) = self.files.get(self.next)?;
        self.next += 1;
        Some(read_pgm(path, *index))
    }
}

/// Draws a 1-pixel rectangle outline, clipped to the frame.
pub fn draw_outline(frame: &mut Frame, b: &BBox, value: u8) {
    let (w, h) = (frame.width() as i64, frame.height() as i64);
    let x0 = round_half_up(b.x());
    let y0 = round_half_up(b.y());
    let x1 = x0 + round_half_up(b.w()).max(1) - 1;
    let y1 = y0 + round_half_up(b.h()).max(1) - 1;
    let stride = frame.width();
    let px = frame.pixels_mut();
    let mut put = |x: i64, y: i64| {
        if x >= 0 && y >= 0 && x < w && y < h {
            px[y as usize * stride + x as usize] = value;
        }
    };
    for x in x0..=x1 {
        put(x, y0);
        put(x, y1);
    }
    for y in y0..=y1 {
        put(x0, y);
        put(x1, y);
    }
}
