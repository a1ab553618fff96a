//! Grayscale video volumes and the sliding-window clip plan.
//!
//! Three on-disk layouts are read:
//!
//! * **image directory**: 8-bit PGM/PPM/PNG frames, one per file, taken in
//!   lexicographic file-name order. Color frames go through [`luma`].
//! * **raw planar**: an ASCII header `"H W T\n"` followed by exactly `H*W*T`
//!   bytes, frame-major, each frame row-major.
//! * **y4m**: a `YUV4MPEG2` stream with 8-bit samples. Only the Y plane is
//!   kept; chroma planes (`C420*`, `C422`, `C444`, `Cmono`) are skipped.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed luma rule: weights (0.299, 0.587, 0.114), round half up.
///
/// Evaluated in integer thousandths so that the rounding is exact.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let v = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((v + 500) / 1000) as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VideoFormat {
    ImageDirectory,
    RawPlanar,
    Y4m,
}

impl FromStr for VideoFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "image-directory" | "dir" => Ok(VideoFormat::ImageDirectory),
            "raw-planar" | "raw" => Ok(VideoFormat::RawPlanar),
            "y4m" => Ok(VideoFormat::Y4m),
            other => Err(Error::Invalid(format!("unknown video format {other:?}"))),
        }
    }
}

impl VideoFormat {
    /// Directories hold frame images, `.y4m` files are containers, anything
    /// else is read as raw planar.
    pub fn infer(path: &Path) -> Self {
        if path.is_dir() {
            VideoFormat::ImageDirectory
        } else if path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("y4m"))
        {
            VideoFormat::Y4m
        } else {
            VideoFormat::RawPlanar
        }
    }
}

/// Axis-aligned rectangle in pixel units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn intersection_area(&self, other: &Rect) -> usize {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = (self.x + self.w).min(other.x + other.w);
        let y1 = (self.y + self.h).min(other.y + other.h);
        if x1 <= x0 || y1 <= y0 {
            0
        } else {
            (x1 - x0) * (y1 - y0)
        }
    }

    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union == 0 {
            0.0
        } else {
            inter as f64 / union as f64
        }
    }
}

/// A grayscale space-time volume of `T` frames of `H x W` pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSequence {
    height: usize,
    width: usize,
    frames: usize,
    data: Vec<u8>,
    source_id: String,
}

impl FrameSequence {
    /// Builds a sequence from frame-major pixel data.
    pub fn new(
        height: usize,
        width: usize,
        frames: usize,
        data: Vec<u8>,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if frames == 0 {
            return Err(Error::EmptySequence);
        }
        if height == 0 || width == 0 {
            return Err(Error::Invalid("frame dimensions must be positive".into()));
        }
        if data.len() != height * width * frames {
            return Err(Error::Invalid(format!(
                "expected {} samples for {height}x{width}x{frames}, got {}",
                height * width * frames,
                data.len()
            )));
        }
        Ok(FrameSequence {
            height,
            width,
            frames,
            data,
            source_id: source_id.into(),
        })
    }

    /// Builds a sequence from a list of equally-sized frames.
    pub fn from_frames(
        height: usize,
        width: usize,
        frames: Vec<Vec<u8>>,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut data = Vec::with_capacity(height * width * frames.len());
        for (index, f) in frames.iter().enumerate() {
            if f.len() != height * width {
                return Err(Error::InconsistentFrameSize {
                    index,
                    got_h: f.len() / width.max(1),
                    got_w: width,
                    want_h: height,
                    want_w: width,
                });
            }
            data.extend_from_slice(f);
        }
        Self::new(height, width, frames.len(), data, source_id)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.frames
    }

    pub fn is_empty(&self) -> bool {
        self.frames == 0
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn frame(&self, t: usize) -> &[u8] {
        let n = self.height * self.width;
        &self.data[t * n..(t + 1) * n]
    }

    #[inline]
    pub fn at(&self, t: usize, y: usize, x: usize) -> u8 {
        self.data[(t * self.height + y) * self.width + x]
    }

    /// Spatial crop over all frames.
    pub fn crop(&self, rect: Rect) -> Result<FrameSequence> {
        if rect.w == 0 || rect.h == 0 || rect.x + rect.w > self.width || rect.y + rect.h > self.height {
            return Err(Error::Invalid(format!(
                "crop {rect:?} outside {}x{} frame",
                self.height, self.width
            )));
        }
        let mut data = Vec::with_capacity(rect.area() * self.frames);
        for t in 0..self.frames {
            let f = self.frame(t);
            for y in rect.y..rect.y + rect.h {
                let row = y * self.width;
                data.extend_from_slice(&f[row + rect.x..row + rect.x + rect.w]);
            }
        }
        FrameSequence::new(
            rect.h,
            rect.w,
            self.frames,
            data,
            format!("{}@{},{},{},{}", self.source_id, rect.x, rect.y, rect.w, rect.h),
        )
    }
}

pub fn load_sequence(path: &Path, format: VideoFormat) -> Result<FrameSequence> {
    match format {
        VideoFormat::ImageDirectory => load_image_directory(path),
        VideoFormat::RawPlanar => {
            let bytes = fs::read(path).map_err(|e| Error::unreadable(path, e))?;
            parse_raw_planar(&bytes, &source_name(path))
        }
        VideoFormat::Y4m => {
            let bytes = fs::read(path).map_err(|e| Error::unreadable(path, e))?;
            parse_y4m(&bytes, &source_name(path))
        }
    }
}

fn source_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load_image_directory(dir: &Path) -> Result<FrameSequence> {
    let entries = fs::read_dir(dir).map_err(|e| Error::unreadable(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::unreadable(dir, e))?;
        let p = entry.path();
        let ext = p
            .extension()
            .map(|e| e.to_string_lossy().to_ascii_lowercase())
            .unwrap_or_default();
        if p.is_file() && matches!(ext.as_str(), "pgm" | "ppm" | "pnm" | "png") {
            files.push(p);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::EmptySequence);
    }

    let mut frames = Vec::with_capacity(files.len());
    let (mut height, mut width) = (0, 0);
    for (index, f) in files.iter().enumerate() {
        let img = image::open(f).map_err(|e| Error::unreadable(f, e))?;
        let (w, h) = (img.width() as usize, img.height() as usize);
        if index == 0 {
            height = h;
            width = w;
        } else if (h, w) != (height, width) {
            return Err(Error::InconsistentFrameSize {
                index,
                got_h: h,
                got_w: w,
                want_h: height,
                want_w: width,
            });
        }
        let gray = if img.color().has_color() {
            img.to_rgb8().pixels().map(|p| luma(p[0], p[1], p[2])).collect()
        } else {
            img.to_luma8().into_raw()
        };
        frames.push(gray);
    }
    FrameSequence::from_frames(height, width, frames, source_name(dir))
}

/// Parses the raw planar layout `"H W T\n"` + `H*W*T` bytes.
pub fn parse_raw_planar(bytes: &[u8], source_id: &str) -> Result<FrameSequence> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::parse(source_id, "missing header line"))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|e| Error::parse(source_id, e))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|s| s.parse::<usize>().map_err(|e| Error::parse(source_id, e)))
        .collect::<Result<_>>()?;
    let [h, w, t] = dims[..] else {
        return Err(Error::parse(source_id, "header must be \"H W T\""));
    };
    if t == 0 {
        return Err(Error::EmptySequence);
    }
    let body = &bytes[nl + 1..];
    if body.len() != h * w * t {
        return Err(Error::parse(
            source_id,
            format!("expected {} payload bytes, found {}", h * w * t, body.len()),
        ));
    }
    FrameSequence::new(h, w, t, body.to_vec(), source_id)
}

pub fn encode_raw_planar(seq: &FrameSequence) -> Vec<u8> {
    let mut out = format!("{} {} {}\n", seq.height, seq.width, seq.frames).into_bytes();
    out.extend_from_slice(&seq.data);
    out
}

pub fn write_raw_planar(seq: &FrameSequence, path: &Path) -> Result<()> {
    fs::write(path, encode_raw_planar(seq))?;
    Ok(())
}

/// Parses an 8-bit `YUV4MPEG2` stream, keeping the luma plane.
pub fn parse_y4m(bytes: &[u8], source_id: &str) -> Result<FrameSequence> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::parse(source_id, "missing stream header"))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|e| Error::parse(source_id, e))?;
    let mut tokens = header.split_ascii_whitespace();
    if tokens.next() != Some("YUV4MPEG2") {
        return Err(Error::parse(source_id, "not a YUV4MPEG2 stream"));
    }
    let (mut w, mut h) = (0usize, 0usize);
    let mut colorspace = "420";
    for tok in tokens {
        let (key, val) = tok.split_at(1);
        match key {
            "W" => w = val.parse().map_err(|e| Error::parse(source_id, e))?,
            "H" => h = val.parse().map_err(|e| Error::parse(source_id, e))?,
            "C" => colorspace = val,
            _ => {}
        }
    }
    if w == 0 || h == 0 {
        return Err(Error::parse(source_id, "missing W/H in stream header"));
    }
    let (cw, ch) = (w.div_ceil(2), h.div_ceil(2));
    let chroma = match colorspace {
        c if c.starts_with("420") && !c.starts_with("420p1") => 2 * cw * ch,
        "422" => 2 * cw * h,
        "444" => 2 * w * h,
        "mono" => 0,
        other => return Err(Error::parse(source_id, format!("unsupported colorspace C{other}"))),
    };

    let mut pos = nl + 1;
    let mut frames = Vec::new();
    while pos < bytes.len() {
        let end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|i| pos + i)
            .ok_or_else(|| Error::parse(source_id, "truncated frame header"))?;
        if !bytes[pos..end].starts_with(b"FRAME") {
            return Err(Error::parse(source_id, "expected FRAME marker"));
        }
        let start = end + 1;
        if start + w * h + chroma > bytes.len() {
            return Err(Error::parse(source_id, "truncated frame payload"));
        }
        frames.push(bytes[start..start + w * h].to_vec());
        pos = start + w * h + chroma;
    }
    FrameSequence::from_frames(h, w, frames, source_id)
}

/// Encodes a sequence as a monochrome y4m stream.
pub fn encode_y4m(seq: &FrameSequence) -> Vec<u8> {
    let mut out = format!("YUV4MPEG2 W{} H{} F25:1 Ip A1:1 Cmono\n", seq.width, seq.height).into_bytes();
    for t in 0..seq.frames {
        out.extend_from_slice(b"FRAME\n");
        out.extend_from_slice(seq.frame(t));
    }
    out
}

/// Writes each frame as a binary PGM named `frame_00000.pgm`, ... into `dir`.
pub fn write_pgm_directory(seq: &FrameSequence, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for t in 0..seq.frames {
        let mut f = fs::File::create(dir.join(format!("frame_{t:05}.pgm")))?;
        write!(f, "P5\n{} {}\n255\n", seq.width, seq.height)?;
        f.write_all(seq.frame(t))?;
    }
    Ok(())
}

/// Sliding-window clip positions over a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClipPlan {
    pub clip_length: usize,
    pub stride: usize,
    pub starts: Vec<usize>,
}

impl ClipPlan {
    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// True when every clip of the plan fits inside `frames` frames.
    pub fn fits(&self, frames: usize) -> bool {
        self.starts.iter().all(|&s| s + self.clip_length <= frames)
    }
}

/// Stride used when none is configured: half the clip, at least one frame.
pub fn default_stride(clip_length: usize) -> usize {
    (clip_length / 2).max(1)
}

/// Start indices `0, stride, 2*stride, ...` of every clip of `clip_length`
/// frames that ends at or before frame `frames - 1`.
pub fn plan_clips(frames: usize, clip_length: usize, stride: usize) -> Result<ClipPlan> {
    if clip_length == 0 || stride == 0 {
        return Err(Error::Invalid("clip length and stride must be positive".into()));
    }
    if frames < clip_length {
        return Err(Error::SequenceTooShort { frames, clip_length });
    }
    let last = (frames - clip_length) / stride;
    Ok(ClipPlan {
        clip_length,
        stride,
        starts: (0..=last).map(|n| n * stride).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn luma_of_primaries() {
        assert_eq!(luma(255, 255, 255), 255);
        assert_eq!(luma(0, 0, 0), 0);
        // 0.299 * 255 = 76.245
        assert_eq!(luma(255, 0, 0), 76);
        // 0.587 * 255 = 149.685
        assert_eq!(luma(0, 255, 0), 150);
        // 0.114 * 255 = 29.07
        assert_eq!(luma(0, 0, 255), 29);
    }

    #[test]
    fn luma_rounds_half_up() {
        // 0.114 * 250 = 28.5 exactly
        assert_eq!(luma(0, 0, 250), 29);
        assert_eq!(luma(1, 1, 0), 1);
        for v in 0..=255u8 {
            assert_eq!(luma(v, v, v), v);
        }
    }

    #[test]
    fn plan_examples() {
        let p = plan_clips(64, 16, 8).unwrap();
        assert_eq!(p.starts, vec![0, 8, 16, 24, 32, 40, 48]);
        assert_eq!(plan_clips(16, 16, 4).unwrap().starts, vec![0]);
        assert!(matches!(
            plan_clips(10, 16, 1),
            Err(Error::SequenceTooShort {
                frames: 10,
                clip_length: 16
            })
        ));
    }

    #[test]
    fn default_stride_is_half_clip() {
        assert_eq!(default_stride(16), 8);
        assert_eq!(default_stride(1), 1);
    }

    proptest! {
        #[test]
        fn plan_matches_enumeration(l in 1usize..40, extra in 0usize..80, stride in 1usize..20) {
            let t = l + extra;
            let plan = plan_clips(t, l, stride).unwrap();
            let brute: Vec<usize> = (0..t).filter(|s| s % stride == 0 && s + l - 1 < t).collect();
            prop_assert_eq!(&plan.starts, &brute);
            prop_assert!(plan.fits(t));
            for w in plan.starts.windows(2) {
                prop_assert_eq!(w[1] - w[0], stride);
            }
        }

        #[test]
        fn raw_planar_round_trip(h in 1usize..6, w in 1usize..6, t in 1usize..5, seed in any::<u64>()) {
            let mut rng = crate::rng::rng_for(seed, &[]);
            let data: Vec<u8> = (0..h * w * t).map(|_| rand::Rng::gen(&mut rng)).collect();
            let bytes = {
                let mut b = format!("{h} {w} {t}\n").into_bytes();
                b.extend_from_slice(&data);
                b
            };
            let seq = parse_raw_planar(&bytes, "x").unwrap();
            prop_assert_eq!(encode_raw_planar(&seq), bytes);
        }
    }

    #[test]
    fn raw_planar_rejects_short_payload() {
        assert!(parse_raw_planar(b"2 2 2\n\x00\x01", "x").is_err());
        assert!(matches!(parse_raw_planar(b"2 2 0\n", "x"), Err(Error::EmptySequence)));
    }

    #[test]
    fn y4m_round_trip_and_chroma_skip() {
        let seq = FrameSequence::new(2, 3, 2, (0..12).collect(), "v").unwrap();
        let back = parse_y4m(&encode_y4m(&seq), "v").unwrap();
        assert_eq!(back.data(), seq.data());

        // 4:2:0 with a 3x2 luma plane carries 2 * (2*1) chroma bytes per frame.
        let mut bytes = b"YUV4MPEG2 W3 H2 F25:1 C420jpeg\n".to_vec();
        for t in 0..2u8 {
            bytes.extend_from_slice(b"FRAME\n");
            bytes.extend_from_slice(&[t; 6]);
            bytes.extend_from_slice(&[99; 4]);
        }
        let s = parse_y4m(&bytes, "c").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.frame(1), &[1; 6]);
    }

    #[test]
    fn crop_extracts_window() {
        let seq = FrameSequence::new(3, 3, 1, (0..9).collect(), "v").unwrap();
        let c = seq.crop(Rect { x: 1, y: 1, w: 2, h: 2 }).unwrap();
        assert_eq!(c.data(), &[4, 5, 7, 8]);
        assert!(seq.crop(Rect { x: 2, y: 0, w: 2, h: 1 }).is_err());
    }

    #[test]
    fn iou_of_rects() {
        let a = Rect { x: 0, y: 0, w: 4, h: 4 };
        let b = Rect { x: 2, y: 0, w: 4, h: 4 };
        assert!((a.iou(&b) - 8.0 / 24.0).abs() < 1e-12);
        assert_eq!(a.iou(&a), 1.0);
    }
}
