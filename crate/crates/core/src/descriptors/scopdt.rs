use rayon::prelude::*;

use super::dictionary::PatternDictionary;
use super::patterns::for_each_pattern;
use super::{Descriptor, FeatureKind};
use crate::error::{Error, Result};
use crate::tos::{flst_with, TreeOfShapes};
use crate::video::{ClipPlan, FrameSequence};

/// Unnormalized codeword counts of one tree, order blocks concatenated.
pub fn frame_counts(tree: &TreeOfShapes, dict: &PatternDictionary) -> Vec<u64> {
    let k = dict.codewords;
    let mut counts = vec![0u64; dict.dim()];
    let mut scratch = Vec::new();
    for (b, cb) in dict.codebooks.iter().enumerate() {
        let flat = cb.flat_centroids();
        let block = &mut counts[b * k..(b + 1) * k];
        for_each_pattern(tree, cb.order, |p| {
            block[cb.assign(p, &mut scratch, &flat)] += 1;
        });
    }
    counts
}

fn normalize_blocks(counts: &[u64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; counts.len()];
    for (o, c) in out.chunks_exact_mut(k).zip(counts.chunks_exact(k)) {
        let total: u64 = c.iter().sum();
        if total > 0 {
            for (v, &n) in o.iter_mut().zip(c) {
                *v = n as f64 / total as f64;
            }
        }
    }
    out
}

/// Bag-of-codewords histogram of a clip, L1-normalized per order.
pub fn encode_clip(trees: &[TreeOfShapes], dict: &PatternDictionary) -> Result<Vec<f64>> {
    dict.validate()?;
    let mut counts = vec![0u64; dict.dim()];
    for t in trees {
        for (c, n) in counts.iter_mut().zip(frame_counts(t, dict)) {
            *c += n;
        }
    }
    Ok(normalize_blocks(&counts, dict.codewords))
}

/// Mean clip encoding over the plan.
pub fn scopdt(seq: &FrameSequence, dict: &PatternDictionary, plan: &ClipPlan) -> Result<Descriptor> {
    dict.validate()?;
    if plan.is_empty() || plan.clip_length == 0 {
        return Err(Error::Invalid("empty clip plan".into()));
    }
    if !plan.fits(seq.len()) {
        return Err(Error::SequenceTooShort {
            frames: seq.len(),
            clip_length: plan.starts.last().unwrap() + plan.clip_length,
        });
    }
    let used: Vec<usize> = {
        let mut mark = vec![false; seq.len()];
        for &s in &plan.starts {
            mark[s..s + plan.clip_length].iter_mut().for_each(|m| *m = true);
        }
        (0..seq.len()).filter(|&t| mark[t]).collect()
    };
    let per_frame: Vec<Option<Vec<u64>>> = {
        let computed: Vec<(usize, Vec<u64>)> = used
            .par_iter()
            .map(|&t| {
                let tree = flst_with(seq.frame(t), seq.height(), seq.width(), &dict.tos);
                (t, frame_counts(&tree, dict))
            })
            .collect();
        let mut slots = vec![None; seq.len()];
        for (t, c) in computed {
            slots[t] = Some(c);
        }
        slots
    };
    let mut mean = vec![0.0; dict.dim()];
    for &s in &plan.starts {
        let mut counts = vec![0u64; dict.dim()];
        for frame in per_frame[s..s + plan.clip_length].iter().flatten() {
            for (c, n) in counts.iter_mut().zip(frame) {
                *c += n;
            }
        }
        for (m, v) in mean.iter_mut().zip(normalize_blocks(&counts, dict.codewords)) {
            *m += v;
        }
    }
    let n = plan.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    Ok(Descriptor::new(FeatureKind::Scopdt, mean))
}
