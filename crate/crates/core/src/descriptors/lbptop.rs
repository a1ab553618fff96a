use std::sync::OnceLock;

use super::{Descriptor, FeatureKind};
use crate::error::{Error, Result};
use crate::video::FrameSequence;

/// 58 uniform codes plus one bin for every other code.
pub const UNIFORM_BINS: usize = 59;
pub const LBPTOP_DIM: usize = 3 * UNIFORM_BINS;

/// Ring of radius-1 neighbors in circular order, as (row, column) offsets.
const RING: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1)];

/// 8-bit code over `RING`: bit `i` is set when neighbor `i` is at least the center.
pub fn lbp_code(center: u8, neighbors: [u8; 8]) -> u8 {
    neighbors
        .iter()
        .enumerate()
        .fold(0u8, |c, (i, &n)| if n >= center { c | (1 << i) } else { c })
}

fn bin_table() -> &'static [u8; 256] {
    static TABLE: OnceLock<[u8; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [(UNIFORM_BINS - 1) as u8; 256];
        let mut next = 0u8;
        for code in 0..=255u8 {
            if (code ^ code.rotate_right(1)).count_ones() <= 2 {
                table[code as usize] = next;
                next += 1;
            }
        }
        debug_assert_eq!(next as usize, UNIFORM_BINS - 1);
        table
    })
}

/// Histogram bin of a code: uniform codes in increasing order, then the rest.
pub fn uniform_bin(code: u8) -> usize {
    bin_table()[code as usize] as usize
}

/// Uniform LBP histograms of the XY, XT and YT planes, each L1-normalized.
pub fn lbptop(seq: &FrameSequence) -> Result<Descriptor> {
    let (h, w, t) = (seq.height(), seq.width(), seq.len());
    if h < 3 || w < 3 || t < 3 {
        return Err(Error::VolumeTooSmall {
            height: h,
            width: w,
            frames: t,
        });
    }
    let data = seq.data();
    let (sx, sy, st) = (1isize, w as isize, (h * w) as isize);
    // (row stride, column stride) for XY, XT, YT.
    let planes = [(sy, sx), (st, sx), (st, sy)];
    let offsets: Vec<[isize; 8]> = planes
        .iter()
        .map(|&(r, c)| RING.map(|(dr, dc)| dr * r + dc * c))
        .collect();
    let table = bin_table();
    let mut hist = vec![0u64; LBPTOP_DIM];
    for z in 1..t - 1 {
        for y in 1..h - 1 {
            let row = (z * h + y) * w;
            for x in 1..w - 1 {
                let p = (row + x) as isize;
                let center = data[p as usize];
                for (plane, offs) in offsets.iter().enumerate() {
                    let mut code = 0u8;
                    for (i, &o) in offs.iter().enumerate() {
                        if data[(p + o) as usize] >= center {
                            code |= 1 << i;
                        }
                    }
                    hist[plane * UNIFORM_BINS + table[code as usize] as usize] += 1;
                }
            }
        }
    }
    let positions = ((t - 2) * (h - 2) * (w - 2)) as f64;
    Ok(Descriptor::new(
        FeatureKind::Lbptop,
        hist.into_iter().map(|c| c as f64 / positions).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifty_eight_uniform_codes() {
        let uniform = (0..=255u8).filter(|&c| uniform_bin(c) < UNIFORM_BINS - 1).count();
        assert_eq!(uniform, 58);
        assert_eq!(uniform_bin(0), 0);
        assert_eq!(uniform_bin(255), 57);
        assert_eq!(uniform_bin(0b0101_0101), 58);
    }

    #[test]
    fn constant_volume_fills_the_all_ones_bin() {
        let seq = FrameSequence::new(4, 5, 3, vec![77; 60], "c").unwrap();
        let d = lbptop(&seq).unwrap();
        assert_eq!(d.dim(), LBPTOP_DIM);
        for plane in 0..3 {
            for b in 0..UNIFORM_BINS {
                let want = if b == uniform_bin(255) { 1.0 } else { 0.0 };
                assert_eq!(d.values[plane * UNIFORM_BINS + b], want);
            }
        }
    }

    #[test]
    fn too_small() {
        let seq = FrameSequence::new(2, 5, 5, vec![0; 50], "s").unwrap();
        assert!(matches!(lbptop(&seq), Err(Error::VolumeTooSmall { .. })));
    }

    #[test]
    fn code_tie_rule() {
        assert_eq!(lbp_code(5, [5; 8]), 255);
        assert_eq!(lbp_code(5, [4, 6, 4, 4, 4, 4, 4, 4]), 2);
    }
}
