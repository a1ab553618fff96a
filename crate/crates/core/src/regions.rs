//! Picks the most spatially synthesizable rectangle of a video: a coarse
//! motion mask, random candidate rectangles inside it, and a scored argmax.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Config, RegionConfig};
use crate::descriptors::PatternDictionary;
use crate::error::{Error, Result};
use crate::pipeline::{extract_features, BankId, TrainedPipeline};
use crate::rng::{rng_for, tag};
use crate::video::{FrameSequence, Rect};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseMask {
    pub height: usize,
    pub width: usize,
    pub data: Vec<bool>,
}

impl CoarseMask {
    pub fn full(height: usize, width: usize) -> Self {
        CoarseMask {
            height,
            width,
            data: vec![true; height * width],
        }
    }

    pub fn get(&self, y: usize, x: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Tight bounding box of the set pixels.
    pub fn bbox(&self) -> Option<Rect> {
        let (mut y0, mut x0, mut y1, mut x1) = (usize::MAX, usize::MAX, 0, 0);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(y, x) {
                    y0 = y0.min(y);
                    x0 = x0.min(x);
                    y1 = y1.max(y);
                    x1 = x1.max(x);
                }
            }
        }
        (y0 != usize::MAX).then(|| Rect {
            x: x0,
            y: y0,
            w: x1 - x0 + 1,
            h: y1 - y0 + 1,
        })
    }

    /// Grayscale PGM; any nonzero sample is in the mask.
    pub fn load_pgm(path: &Path) -> Result<Self> {
        let img = image::open(path).map_err(|e| Error::unreadable(path, e))?.to_luma8();
        let (w, h) = img.dimensions();
        Ok(CoarseMask {
            height: h as usize,
            width: w as usize,
            data: img.into_raw().into_iter().map(|v| v != 0).collect(),
        })
    }

    pub fn save_pgm(&self, path: &Path) -> Result<()> {
        let buf: Vec<u8> = self.data.iter().map(|&b| if b { 255 } else { 0 }).collect();
        image::save_buffer_with_format(
            path,
            &buf,
            self.width as u32,
            self.height as u32,
            image::ExtendedColorType::L8,
            image::ImageFormat::Pnm,
        )
        .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
    }
}

/// Per-pixel temporal intensity variance.
pub fn temporal_variance(seq: &FrameSequence) -> Vec<f64> {
    let (n, t) = (seq.height() * seq.width(), seq.len() as f64);
    let mut sum = vec![0.0; n];
    let mut sq = vec![0.0; n];
    for f in 0..seq.len() {
        for (i, &v) in seq.frame(f).iter().enumerate() {
            let v = v as f64;
            sum[i] += v;
            sq[i] += v * v;
        }
    }
    sum.iter()
        .zip(&sq)
        .map(|(s, q)| (q / t - (s / t).powi(2)).max(0.0))
        .collect()
}

/// Otsu threshold over a 256-bin histogram;
/// returns the last bin of the low class.
fn otsu_bin(bins: &[u64; 256]) -> usize {
    let total: u64 = bins.iter().sum();
    let total_mean: f64 = bins.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0u64, 0.0);
    let (mut best, mut best_k) = (-1.0, 0);
    for (k, &c) in bins.iter().enumerate().take(255) {
        w0 += c;
        sum0 += k as f64 * c as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (total_mean - sum0) / w1 as f64;
        let between = w0 as f64 * w1 as f64 * (m0 - m1).powi(2);
        if between > best {
            best = between;
            best_k = k;
        }
    }
    best_k
}

/// Mean of `values` over the `(2r+1)`-square window clipped to the frame.
fn box_mean(values: &[f64], h: usize, w: usize, r: usize) -> Vec<f64> {
    let mut sums = vec![0.0; (h + 1) * (w + 1)];
    for y in 0..h {
        for x in 0..w {
            sums[(y + 1) * (w + 1) + x + 1] =
                values[y * w + x] + sums[y * (w + 1) + x + 1] + sums[(y + 1) * (w + 1) + x] - sums[y * (w + 1) + x];
        }
    }
    let mut out = Vec::with_capacity(h * w);
    for y in 0..h {
        for x in 0..w {
            let (y0, y1) = (y.saturating_sub(r), (y + r + 1).min(h));
            let (x0, x1) = (x.saturating_sub(r), (x + r + 1).min(w));
            let s =
                sums[y1 * (w + 1) + x1] + sums[y0 * (w + 1) + x0] - sums[y0 * (w + 1) + x1] - sums[y1 * (w + 1) + x0];
            out.push(s / ((y1 - y0) * (x1 - x0)) as f64);
        }
    }
    out
}

const SMOOTHING_RADIUS: usize = 2;

/// Pixels whose locally averaged temporal standard deviation is above the
/// Otsu threshold of that map.
pub fn coarse_mask(seq: &FrameSequence) -> Result<CoarseMask> {
    if seq.len() < 2 {
        return Err(Error::SequenceTooShort {
            frames: seq.len(),
            clip_length: 2,
        });
    }
    let std: Vec<f64> = temporal_variance(seq).into_iter().map(f64::sqrt).collect();
    let var = box_mean(&std, seq.height(), seq.width(), SMOOTHING_RADIUS);
    let max = var.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::AllStaticVideo);
    }
    let bin = |v: f64| ((v / max * 255.0) as usize).min(255);
    let mut bins = [0u64; 256];
    for &v in &var {
        bins[bin(v)] += 1;
    }
    let k = otsu_bin(&bins);
    let data: Vec<bool> = var.iter().map(|&v| v > 0.0 && bin(v) > k).collect();
    if !data.contains(&true) {
        return Err(Error::AllStaticVideo);
    }
    Ok(CoarseMask {
        height: seq.height(),
        width: seq.width(),
        data,
    })
}

/// Summed-area table over the mask for O(1) rectangle counts.
struct Integral {
    width: usize,
    sums: Vec<u32>,
}

impl Integral {
    fn new(mask: &CoarseMask) -> Self {
        let w = mask.width + 1;
        let mut sums = vec![0u32; w * (mask.height + 1)];
        for y in 0..mask.height {
            for x in 0..mask.width {
                sums[(y + 1) * w + x + 1] =
                    mask.get(y, x) as u32 + sums[y * w + x + 1] + sums[(y + 1) * w + x] - sums[y * w + x];
            }
        }
        Integral { width: w, sums }
    }

    fn count(&self, r: Rect) -> u32 {
        let w = self.width;
        let (y0, x0, y1, x1) = (r.y, r.x, r.y + r.h, r.x + r.w);
        self.sums[y1 * w + x1] + self.sums[y0 * w + x0] - self.sums[y0 * w + x1] - self.sums[y1 * w + x0]
    }
}

/// Draws `count` rectangles, each centred on a random mask pixel with
/// sides in `[min_side, min(H, W)]` (upper end shrunk to what the mask
/// extent can still contain), aspect within the configured range, and at
/// least `containment` of its area inside the mask.
pub fn sample_candidates(mask: &CoarseMask, count: usize, policy: &RegionConfig, seed: u64) -> Result<Vec<Rect>> {
    let attempts = policy.attempts_per_candidate.max(1) * count;
    let too_small = || Error::MaskTooSmall {
        wanted: count,
        attempts,
    };
    let (h, w) = (mask.height, mask.width);
    let bbox = mask.bbox().ok_or(Error::AllStaticVideo)?;
    let side_cap = h.min(w);
    if policy.min_side > side_cap {
        return Err(too_small());
    }
    let reach = |extent: usize| {
        let limit = (extent as f64 / policy.containment.max(1e-9)).ceil() as usize;
        limit.clamp(policy.min_side, side_cap)
    };
    let (max_h, max_w) = (reach(bbox.h), reach(bbox.w));
    let pixels: Vec<usize> = (0..h * w).filter(|&i| mask.data[i]).collect();
    let integral = Integral::new(mask);
    let mut rng = rng_for(seed, &[tag("region-candidates")]);
    let mut out = Vec::with_capacity(count);
    for _ in 0..attempts {
        if out.len() == count {
            break;
        }
        let rh = rng.gen_range(policy.min_side..=max_h);
        let lo_w = policy.min_side.max((rh as f64 * policy.min_aspect).ceil() as usize);
        let hi_w = max_w.min((rh as f64 * policy.max_aspect).floor() as usize);
        if lo_w > hi_w {
            continue;
        }
        let rw = rng.gen_range(lo_w..=hi_w);
        let c = pixels[rng.gen_range(0..pixels.len())];
        let (cy, cx) = (c / w, c % w);
        let r = Rect {
            y: cy.saturating_sub(rh / 2).min(h - rh),
            x: cx.saturating_sub(rw / 2).min(w - rw),
            h: rh,
            w: rw,
        };
        if integral.count(r) as f64 >= policy.containment * r.area() as f64 {
            out.push(r);
        }
    }
    if out.len() < count {
        return Err(too_small());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionCandidate {
    pub rect: Rect,
    pub score: f64,
}

fn tie_key(r: &Rect) -> (usize, usize, usize, usize) {
    (r.y, r.x, r.h, r.w)
}

/// Highest score; equal scores go to the smaller (y, x, h, w).
pub fn best_candidate(candidates: &[RegionCandidate]) -> Option<RegionCandidate> {
    candidates.iter().copied().reduce(|best, c| {
        if c.score > best.score || (c.score == best.score && tie_key(&c.rect) < tie_key(&best.rect)) {
            c
        } else {
            best
        }
    })
}

/// Scores every crop in parallel, keeping input order.
pub fn score_candidates<F>(seq: &FrameSequence, rects: &[Rect], scorer: F) -> Result<Vec<RegionCandidate>>
where
    F: Fn(&FrameSequence) -> Result<f64> + Sync,
{
    rects
        .par_iter()
        .map(|&rect| {
            let crop = seq.crop(rect)?;
            Ok(RegionCandidate {
                rect,
                score: scorer(&crop)?,
            })
        })
        .collect()
}

/// Spatial synthesizability of a crop under the SHDT spatial bank.
pub fn spatial_score(
    crop: &FrameSequence,
    pipeline: &TrainedPipeline,
    dict: Option<&PatternDictionary>,
    config: &Config,
) -> Result<f64> {
    let bank = &pipeline.banks[&BankId::ShdtSpatial];
    let set = extract_features(crop, &bank.kinds(), dict, config)?;
    Ok(bank.predict(BankId::ShdtSpatial, &set)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionResult {
    pub best: RegionCandidate,
    pub candidates: Vec<RegionCandidate>,
}

/// Mask (computed unless given), sample, score with `scorer`, argmax.
pub fn detect_region_with<F>(
    seq: &FrameSequence,
    mask: Option<CoarseMask>,
    count: usize,
    policy: &RegionConfig,
    seed: u64,
    scorer: F,
) -> Result<RegionResult>
where
    F: Fn(&FrameSequence) -> Result<f64> + Sync,
{
    let mask = match mask {
        Some(m) if m.height != seq.height() || m.width != seq.width() => {
            return Err(Error::DimensionMismatch {
                expected: seq.height() * seq.width(),
                got: m.height * m.width,
            })
        }
        Some(m) => m,
        None => coarse_mask(seq)?,
    };
    let rects = sample_candidates(&mask, count, policy, seed)?;
    let candidates = score_candidates(seq, &rects, scorer)?;
    let best = best_candidate(&candidates).expect("count >= 1");
    Ok(RegionResult { best, candidates })
}

pub fn detect_region(
    seq: &FrameSequence,
    pipeline: &TrainedPipeline,
    dict: Option<&PatternDictionary>,
    mask: Option<CoarseMask>,
    seed: u64,
) -> Result<RegionResult> {
    let config = &pipeline.config;
    if pipeline.banks[&BankId::ShdtSpatial].models.is_none() {
        return Err(Error::UntrainedBank(BankId::ShdtSpatial.as_str().into()));
    }
    detect_region_with(seq, mask, config.regions.count, &config.regions, seed, |crop| {
        spatial_score(crop, pipeline, dict, config)
    })
}
