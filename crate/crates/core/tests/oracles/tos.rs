//! Tree of shapes by brute-force level-set enumeration.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use dtsynth::tos::{flst, Polarity, TreeOfShapes};

/// Connected components of `mask` with 4- or 8-connectivity.
pub fn components(mask: &[bool], h: usize, w: usize, conn8: bool) -> Vec<Vec<usize>> {
    let mut seen = vec![false; h * w];
    let mut out = Vec::new();
    for s in 0..h * w {
        if !mask[s] || seen[s] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(p) = queue.pop_front() {
            comp.push(p);
            let (y, x) = ((p / w) as i64, (p % w) as i64);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if (dy, dx) == (0, 0) || (!conn8 && dy != 0 && dx != 0) {
                        continue;
                    }
                    let (ny, nx) = (y + dy, x + dx);
                    if ny < 0 || nx < 0 || ny >= h as i64 || nx >= w as i64 {
                        continue;
                    }
                    let q = ny as usize * w + nx as usize;
                    if mask[q] && !seen[q] {
                        seen[q] = true;
                        queue.push_back(q);
                    }
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Adds to `comp` every component of its complement (dual connectivity)
/// that does not touch the frame border.
pub fn fill_holes(comp: &[usize], h: usize, w: usize, conn8: bool) -> BTreeSet<usize> {
    let mut inside = vec![false; h * w];
    for &p in comp {
        inside[p] = true;
    }
    let complement: Vec<bool> = inside.iter().map(|&b| !b).collect();
    let mut filled: BTreeSet<usize> = comp.iter().copied().collect();
    for hole in components(&complement, h, w, !conn8) {
        let touches = hole
            .iter()
            .any(|&p| p / w == 0 || p % w == 0 || p / w == h - 1 || p % w == w - 1);
        if !touches {
            filled.extend(hole);
        }
    }
    filled
}

/// Lower median of the border pixels.
pub fn border_value(img: &[u8], h: usize, w: usize) -> u8 {
    let mut b = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if y == 0 || x == 0 || y == h - 1 || x == w - 1 {
                b.push(img[y * w + x]);
            }
        }
    }
    b.sort();
    b[(b.len() - 1) / 2]
}

/// Every shape (as a set of original pixel indices) with its generating
/// polarities and levels, computed on the image padded by a constant ring.
pub fn brute_force_shapes(img: &[u8], h: usize, w: usize) -> BTreeMap<BTreeSet<usize>, Vec<(Polarity, u8)>> {
    let (ph, pw) = (h + 2, w + 2);
    let ring = border_value(img, h, w);
    let mut padded = vec![ring; ph * pw];
    for y in 0..h {
        for x in 0..w {
            padded[(y + 1) * pw + x + 1] = img[y * w + x];
        }
    }
    let unpad = |s: BTreeSet<usize>| -> BTreeSet<usize> {
        s.into_iter()
            .filter(|&p| (1..=h).contains(&(p / pw)) && (1..=w).contains(&(p % pw)))
            .map(|p| (p / pw - 1) * w + p % pw - 1)
            .collect()
    };
    let mut shapes: BTreeMap<BTreeSet<usize>, Vec<(Polarity, u8)>> = BTreeMap::new();
    // Level sets only change at gray values present in the image.
    let levels: BTreeSet<u8> = padded.iter().copied().collect();
    for level in levels {
        let upper: Vec<bool> = padded.iter().map(|&v| v >= level).collect();
        for c in components(&upper, ph, pw, false) {
            shapes
                .entry(unpad(fill_holes(&c, ph, pw, false)))
                .or_default()
                .push((Polarity::Upper, level));
        }
        let lower: Vec<bool> = padded.iter().map(|&v| v <= level).collect();
        for c in components(&lower, ph, pw, true) {
            shapes
                .entry(unpad(fill_holes(&c, ph, pw, true)))
                .or_default()
                .push((Polarity::Lower, level));
        }
    }
    shapes.remove(&BTreeSet::new());
    shapes
}

/// (shape, parent shape) pairs, parent = smallest strict superset.
pub fn brute_force_tree(img: &[u8], h: usize, w: usize) -> BTreeSet<(BTreeSet<usize>, Option<BTreeSet<usize>>)> {
    let shapes: Vec<BTreeSet<usize>> = brute_force_shapes(img, h, w).into_keys().collect();
    for a in &shapes {
        for b in &shapes {
            assert!(
                a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b),
                "oracle family is not nested: {img:?} {a:?} {b:?}"
            );
        }
    }
    shapes
        .iter()
        .map(|s| {
            let parent = shapes
                .iter()
                .filter(|o| o.len() > s.len() && s.is_subset(o))
                .min_by_key(|o| o.len())
                .cloned();
            (s.clone(), parent)
        })
        .collect()
}

pub fn tree_relation(t: &TreeOfShapes) -> BTreeSet<(BTreeSet<usize>, Option<BTreeSet<usize>>)> {
    let sets: Vec<BTreeSet<usize>> = (0..t.len()).map(|i| t.pixels(i).into_iter().collect()).collect();
    (0..t.len())
        .map(|i| (sets[i].clone(), t.shape(i).parent.map(|p| sets[p].clone())))
        .collect()
}

pub fn check_structure(t: &TreeOfShapes, img: &[u8]) {
    let (h, w) = t.frame_dims();
    assert_eq!(t.shape(0).area, h * w);
    assert_eq!(t.shape(0).parent, None);
    for (i, s) in t.shapes().iter().enumerate() {
        assert_eq!(t.pixels(i).len(), s.area, "area of shape {i}");
        for &c in &s.children {
            assert_eq!(t.shape(c).parent, Some(i));
            assert!(t.shape(c).area < s.area);
        }
        if i > 0 {
            // Pixels owned by a non-root shape alone all carry its level.
            for p in 0..h * w {
                if t.owner(p) == i {
                    assert_eq!(img[p], s.level, "private pixel level of shape {i}");
                }
            }
        }
        let a = s.attributes.to_array();
        assert!(a.iter().all(|v| v.is_finite()));
        assert!(s.attributes.compactness > 0.0 && s.attributes.compactness <= 1.0);
        assert!(s.attributes.elongation > 0.0 && s.attributes.elongation <= 1.0);
        assert!((0.0..=1.0).contains(&s.attributes.depth_fraction));
        assert!((0.0..=1.0).contains(&s.attributes.contrast));
    }
}

pub fn assert_matches_oracle(img: &[u8], h: usize, w: usize) {
    let t = flst(img, h, w);
    let got = tree_relation(&t);
    let want = brute_force_tree(img, h, w);
    assert_eq!(got, want, "image {img:?} ({h}x{w})\n{}", t.dump());
    check_structure(&t, img);
}
