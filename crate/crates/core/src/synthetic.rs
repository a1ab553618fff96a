//! Seeded toy videos: homogeneous moving gratings, single oscillating
//! structures, moving blobs on static backgrounds, and a planted animated
//! patch for region detection.

use std::f64::consts::TAU;

use rand::Rng;

use crate::config::{Config, ExternalSource};
use crate::pipeline::{Annotation, Manifest, Mode, NULL_METHOD};
use crate::rng::{derive_seed, rng_for, tag};
use crate::video::{FrameSequence, Rect};

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Independent uniform noise around mid-gray.
pub fn noise_video(height: usize, width: usize, frames: usize, amplitude: u8, seed: u64) -> FrameSequence {
    let mut rng = rng_for(seed, &[tag("noise-video")]);
    let a = amplitude as i32;
    let data = (0..height * width * frames)
        .map(|_| (128 + rng.gen_range(-a..=a)).clamp(0, 255) as u8)
        .collect();
    FrameSequence::new(height, width, frames, data, format!("noise-{seed}")).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grating {
    /// Spatial period in pixels.
    pub period: f64,
    pub orientation: f64,
    /// Phase advance per frame in radians.
    pub speed: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl Grating {
    fn at(&self, t: f64, y: f64, x: f64) -> f64 {
        let k = TAU / self.period;
        let (s, c) = self.orientation.sin_cos();
        self.amplitude * (k * (c * x + s * y) - self.speed * t + self.phase).sin()
    }
}

fn random_grating<R: Rng>(rng: &mut R, period: (f64, f64), speed: f64, amplitude: f64) -> Grating {
    Grating {
        period: rng.gen_range(period.0..period.1),
        orientation: rng.gen_range(0.0..TAU),
        speed: speed * rng.gen_range(0.8..1.2),
        amplitude,
        phase: rng.gen_range(0.0..TAU),
    }
}

/// Sum of gratings plus per-pixel uniform noise of amplitude `noise`.
pub fn grating_video(
    height: usize,
    width: usize,
    frames: usize,
    gratings: &[Grating],
    noise: f64,
    seed: u64,
) -> FrameSequence {
    let mut rng = rng_for(seed, &[tag("grating-noise")]);
    let mut data = Vec::with_capacity(height * width * frames);
    for t in 0..frames {
        for y in 0..height {
            for x in 0..width {
                let v: f64 = gratings.iter().map(|g| g.at(t as f64, y as f64, x as f64)).sum();
                let n = if noise > 0.0 {
                    rng.gen_range(-noise..=noise)
                } else {
                    0.0
                };
                data.push(to_u8(128.0 + v + n));
            }
        }
    }
    FrameSequence::new(height, width, frames, data, format!("grating-{seed}")).unwrap()
}

/// Spatially homogeneous moving texture: two fine drifting gratings.
pub fn shdt_video(height: usize, width: usize, frames: usize, speed: f64, noise: f64, seed: u64) -> FrameSequence {
    let mut rng = rng_for(seed, &[tag("shdt")]);
    let gratings = [
        random_grating(&mut rng, (3.5, 7.0), speed, 45.0),
        random_grating(&mut rng, (3.5, 7.0), speed, 30.0),
    ];
    let mut v = grating_video(height, width, frames, &gratings, noise, seed);
    v = rename(v, format!("shdt-{seed}"));
    v
}

/// One frame-filling radial structure whose contrast oscillates in time.
pub fn tdt_video(height: usize, width: usize, frames: usize, omega: f64, noise: f64, seed: u64) -> FrameSequence {
    let mut rng = rng_for(seed, &[tag("tdt")]);
    let cy = height as f64 * rng.gen_range(0.4..0.6);
    let cx = width as f64 * rng.gen_range(0.4..0.6);
    let sigma = height.min(width) as f64 * rng.gen_range(0.25..0.35);
    let phase = rng.gen_range(0.0..TAU);
    let mut data = Vec::with_capacity(height * width * frames);
    for t in 0..frames {
        let a = 70.0 + 50.0 * (omega * t as f64 + phase).sin();
        for y in 0..height {
            for x in 0..width {
                let r2 = (y as f64 - cy).powi(2) + (x as f64 - cx).powi(2);
                let n = if noise > 0.0 {
                    rng.gen_range(-noise..=noise)
                } else {
                    0.0
                };
                data.push(to_u8(60.0 + a * (-r2 / (2.0 * sigma * sigma)).exp() + n));
            }
        }
    }
    FrameSequence::new(height, width, frames, data, format!("tdt-{seed}")).unwrap()
}

/// A small bright blob doing a random walk over a static smooth background.
pub fn blob_video(height: usize, width: usize, frames: usize, seed: u64) -> FrameSequence {
    let mut rng = rng_for(seed, &[tag("blob")]);
    let bg = random_grating(&mut rng, (24.0, 48.0), 0.0, 40.0);
    let radius = rng.gen_range(2.5..4.5);
    let (mut by, mut bx) = (rng.gen_range(0.0..height as f64), rng.gen_range(0.0..width as f64));
    let mut data = Vec::with_capacity(height * width * frames);
    for _ in 0..frames {
        for y in 0..height {
            for x in 0..width {
                let d2 = (y as f64 - by).powi(2) + (x as f64 - bx).powi(2);
                let v = if d2 <= radius * radius {
                    235.0
                } else {
                    128.0 + bg.at(0.0, y as f64, x as f64)
                };
                data.push(to_u8(v));
            }
        }
        by = (by + rng.gen_range(-2.0..2.0)).clamp(0.0, height as f64 - 1.0);
        bx = (bx + rng.gen_range(-2.0..2.0)).clamp(0.0, width as f64 - 1.0);
    }
    FrameSequence::new(height, width, frames, data, format!("blob-{seed}")).unwrap()
}

/// A static smooth frame with a `patch x patch` moving texture planted at a
/// seeded position; returns the video and the planted rectangle.
pub fn planted_patch_video(size: usize, patch: usize, frames: usize, seed: u64) -> (FrameSequence, Rect) {
    let mut rng = rng_for(seed, &[tag("planted")]);
    let rect = Rect {
        x: rng.gen_range(0..=size - patch),
        y: rng.gen_range(0..=size - patch),
        w: patch,
        h: patch,
    };
    let bg = random_grating(&mut rng, (40.0, 80.0), 0.0, 30.0);
    let tex = shdt_video(patch, patch, frames, 0.8, 0.0, seed);
    let mut data = Vec::with_capacity(size * size * frames);
    for t in 0..frames {
        for y in 0..size {
            for x in 0..size {
                let inside = (rect.y..rect.y + patch).contains(&y) && (rect.x..rect.x + patch).contains(&x);
                data.push(if inside {
                    tex.at(t, y - rect.y, x - rect.x)
                } else {
                    to_u8(128.0 + bg.at(0.0, y as f64, x as f64))
                });
            }
        }
    }
    (
        FrameSequence::new(size, size, frames, data, format!("planted-{seed}")).unwrap(),
        rect,
    )
}

/// Shape of a labelled toy corpus: `per_class` videos each of SHDT-like,
/// TDT-like and non-DT content.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSpec {
    pub per_class: usize,
    pub height: usize,
    pub width: usize,
    pub frames: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            per_class: 20,
            height: 32,
            width: 32,
            frames: 24,
        }
    }
}

/// Noise amplitudes and the synthesizability score each one is labelled with.
pub const NOISE_LEVELS: [(f64, f64); 3] = [(0.0, 1.0), (25.0, 0.5), (70.0, 0.0)];

fn method_for(mode: Mode, i: usize, score: f64) -> String {
    if score == 0.0 {
        NULL_METHOD.to_string()
    } else {
        let m = mode.methods();
        m[i % m.len()].to_string()
    }
}

/// Generates the corpus and its manifest. Scores follow the noise level,
/// methods cycle through the mode's method set.
pub fn labelled_corpus(spec: CorpusSpec, seed: u64) -> (Vec<FrameSequence>, Manifest) {
    let CorpusSpec {
        per_class: n,
        height: h,
        width: w,
        frames: t,
    } = spec;
    let mut videos = Vec::with_capacity(3 * n);
    let mut rows = Vec::with_capacity(3 * n);
    for i in 0..n {
        let (noise, score) = NOISE_LEVELS[i % NOISE_LEVELS.len()];
        let mut rng = rng_for(seed, &[tag("corpus"), i as u64]);

        let id = format!("shdt-{i:03}");
        let v = shdt_video(
            h,
            w,
            t,
            rng.gen_range(0.5..1.2),
            noise,
            derive_seed(seed, &[tag("shdt"), i as u64]),
        );
        videos.push(rename(v, id.clone()));
        let mut a = Annotation::new(id);
        a.l_dt = Some(Mode::Shdt);
        a.s_spatial = Some(score);
        a.s_temporal = Some(score);
        a.l_md_spatial = Some(method_for(Mode::Shdt, i, score));
        a.l_md_temporal = Some(method_for(Mode::Tdt, i, score));
        rows.push(a);

        let id = format!("tdt-{i:03}");
        let v = tdt_video(
            h,
            w,
            t,
            rng.gen_range(0.3..0.8),
            noise,
            derive_seed(seed, &[tag("tdt"), i as u64]),
        );
        videos.push(rename(v, id.clone()));
        let mut a = Annotation::new(id);
        a.l_dt = Some(Mode::Tdt);
        a.s_temporal = Some(score);
        a.l_md_temporal = Some(method_for(Mode::Tdt, i, score));
        rows.push(a);

        let id = format!("blob-{i:03}");
        let v = blob_video(h, w, t, derive_seed(seed, &[tag("blob"), i as u64]));
        videos.push(rename(v, id.clone()));
        let mut a = Annotation::new(id);
        a.dt = false;
        rows.push(a);
    }
    (videos, Manifest::new(rows).expect("generated rows are valid"))
}

/// Settings sized for small toy corpora: a compact dictionary and LBP-TOP
/// standing in for the external descriptor.
pub fn toy_config() -> Config {
    let mut c = Config::default();
    c.dictionary.codewords = 32;
    c.dictionary.frames_per_video = 8;
    c.dictionary.max_patterns = Some(20_000);
    c.features.external_source = ExternalSource::Lbptop;
    c
}

/// Videos for dictionary learning, drawn independently of any corpus seed.
pub fn dictionary_corpus(spec: CorpusSpec, seed: u64) -> Vec<FrameSequence> {
    let s = derive_seed(seed, &[tag("dictionary-corpus")]);
    labelled_corpus(spec, s).0
}

fn rename(seq: FrameSequence, id: String) -> FrameSequence {
    let (h, w, t) = (seq.height(), seq.width(), seq.len());
    FrameSequence::new(h, w, t, seq.data().to_vec(), id).unwrap()
}
