//! Tree of shapes of a grayscale frame.
//!
//! Shapes are the hole-filled connected components of the upper level sets
//! `{I >= l}` (4-connected) and lower level sets `{I <= l}` (8-connected),
//! deduplicated and ordered by inclusion. Holes are the components of the
//! complement (dual connectivity) that do not reach outside the frame. The
//! frame is first surrounded by a one-pixel ring at the lower median of its
//! border pixels; without it, sets touching the border need not nest. Sets
//! that reach the ring saturate to the whole frame, which is the root and
//! carries the ring's level.
//!
//! Construction goes through the two component trees. The max-tree (upper
//! sets) and min-tree (lower sets) are built by union-find. A component `C`
//! of the upper set at level `l` is then saturated by adding the lower-set
//! components at level `l - 1` that it encloses, each of them saturated in
//! turn, and symmetrically for lower components. A component `D` that does
//! not reach the ring is enclosed by whichever opposite-polarity
//! component holds the pixel directly above the top-left pixel of `D`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Upper,
    Lower,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Upper => 1.0,
            Polarity::Lower => -1.0,
        }
    }
}

/// Number of components in an [`AttributeVector`].
pub const ATTRIBUTE_DIM: usize = 6;

/// Per-shape geometric and radiometric attributes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeVector {
    /// `ln(area / (H*W))`, at most 0.
    pub log_area_fraction: f64,
    /// `4*pi*area / perimeter^2`, in (0, 1].
    pub compactness: f64,
    /// Minor over major axis of the moment ellipse, in (0, 1].
    pub elongation: f64,
    /// `|level - parent level| / 255`; 0 for the root.
    pub contrast: f64,
    /// +1 for upper shapes, -1 for lower shapes.
    pub polarity_sign: f64,
    /// `depth / max depth`, in [0, 1].
    pub depth_fraction: f64,
}

impl AttributeVector {
    pub fn to_array(&self) -> [f64; ATTRIBUTE_DIM] {
        [
            self.log_area_fraction,
            self.compactness,
            self.elongation,
            self.contrast,
            self.polarity_sign,
            self.depth_fraction,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub polarity: Polarity,
    pub level: u8,
    pub area: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
    /// Smallest row-major pixel index of the shape (its top-left pixel).
    pub min_pixel: usize,
    pub attributes: AttributeVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TosConfig {
    /// Shapes with fewer pixels are dropped (the root is always kept).
    pub min_area: usize,
}

impl Default for TosConfig {
    fn default() -> Self {
        TosConfig { min_area: 1 }
    }
}

/// Inclusion tree of shapes. Shape 0 is the root (the whole frame); shapes
/// are ordered by (area desc, level asc, min pixel asc).
#[derive(Debug, Clone, PartialEq)]
pub struct TreeOfShapes {
    height: usize,
    width: usize,
    shapes: Vec<Shape>,
    max_depth: usize,
    /// Smallest shape containing each pixel.
    owner: Vec<u32>,
}

impl TreeOfShapes {
    pub fn root(&self) -> usize {
        0
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn shape(&self, index: usize) -> &Shape {
        &self.shapes[index]
    }

    pub fn frame_dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Index of the smallest shape containing pixel `p`.
    pub fn owner(&self, p: usize) -> usize {
        self.owner[p] as usize
    }

    /// Ancestors of `index`, nearest first.
    pub fn ancestors(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(self.shapes[index].parent, move |&i| self.shapes[i].parent)
    }

    /// Row-major pixel indices of a shape, rebuilt from the owner map.
    pub fn pixels(&self, index: usize) -> Vec<usize> {
        let mut inside = vec![false; self.shapes.len()];
        inside[index] = true;
        // Children always carry larger indices than their parent.
        for i in index + 1..self.shapes.len() {
            if let Some(p) = self.shapes[i].parent {
                if inside[p] {
                    inside[i] = true;
                }
            }
        }
        (0..self.owner.len())
            .filter(|&p| inside[self.owner[p] as usize])
            .collect()
    }

    /// Indented text rendering, one shape per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, indent)) = stack.pop() {
            let s = &self.shapes[i];
            let pol = match s.polarity {
                Polarity::Upper => '+',
                Polarity::Lower => '-',
            };
            let _ = writeln!(
                out,
                "{:indent$}#{i} {pol} level={} area={} min={}",
                "",
                s.level,
                s.area,
                s.min_pixel,
                indent = indent * 2
            );
            for &c in s.children.iter().rev() {
                stack.push((c, indent + 1));
            }
        }
        out
    }
}

/// Attribute vector of a shape, as stored at construction time.
pub fn shape_attributes(tree: &TreeOfShapes, index: usize) -> AttributeVector {
    tree.shapes[index].attributes
}

pub fn flst(frame: &[u8], height: usize, width: usize) -> TreeOfShapes {
    flst_with(frame, height, width, &TosConfig::default())
}

pub fn flst_with(frame: &[u8], height: usize, width: usize, config: &TosConfig) -> TreeOfShapes {
    assert_eq!(frame.len(), height * width, "frame size does not match dimensions");
    assert!(height * width >= 1, "empty frame");

    // Surround the frame with a one-pixel ring at the median border value.
    // Level sets that reach the ring saturate to the whole frame (the root);
    // every other component is enclosed and yields a proper shape.
    let border_level = border_median(frame, height, width);
    let (ph, pw) = (height + 2, width + 2);
    let mut padded = vec![border_level; ph * pw];
    for y in 0..height {
        padded[(y + 1) * pw + 1..(y + 1) * pw + 1 + width].copy_from_slice(&frame[y * width..(y + 1) * width]);
    }

    let max_tree = ComponentTree::build(&padded, ph, pw, Polarity::Upper);
    let min_tree = ComponentTree::build(&padded, ph, pw, Polarity::Lower);
    let trees = [&max_tree, &min_tree];

    // holes[t][node]: enclosed nodes of the other tree.
    let mut holes: [Vec<Vec<u32>>; 2] = [vec![Vec::new(); max_tree.len()], vec![Vec::new(); min_tree.len()]];
    link_holes(&min_tree, &max_tree, pw, &mut holes[0]);
    link_holes(&max_tree, &min_tree, pw, &mut holes[1]);

    // A hole's top-left pixel lies strictly below its encloser's, so visiting
    // nodes by decreasing top-left pixel settles every hole first.
    let mut visit: Vec<(u32, u8, u32)> = Vec::with_capacity(max_tree.len() + min_tree.len());
    for (t, tree) in trees.iter().enumerate() {
        for n in 0..tree.len() {
            if !tree.border[n] {
                visit.push((tree.min_pix[n], t as u8, n as u32));
            }
        }
    }
    visit.sort_unstable_by(|a, b| b.cmp(a));
    let mut sat_area: [Vec<u32>; 2] = [vec![0; max_tree.len()], vec![0; min_tree.len()]];
    for &(_, t, n) in &visit {
        let (t, n) = (t as usize, n as usize);
        let other = 1 - t;
        let extra: u32 = holes[t][n].iter().map(|&h| sat_area[other][h as usize]).sum();
        sat_area[t][n] = trees[t].area[n] + extra;
    }

    struct Candidate {
        polarity: Polarity,
        level: u8,
        area: usize,
        min_pixel: u32,
        tree: usize,
        node: usize,
    }
    let n_pix = height * width;
    let mut cands = vec![Candidate {
        polarity: Polarity::Upper,
        level: border_level,
        area: n_pix,
        min_pixel: (pw + 1) as u32,
        tree: usize::MAX,
        node: usize::MAX,
    }];
    // Shapes are nested or disjoint, so (area, top-left pixel) identifies a
    // pixel set.
    let mut by_key: HashMap<(u32, u32), usize> = HashMap::new();
    for &(_, t, n) in visit.iter().rev() {
        let (t, n) = (t as usize, n as usize);
        let tree = trees[t];
        let area = sat_area[t][n];
        if (area as usize) < config.min_area {
            continue;
        }
        let polarity = tree.polarity;
        let level = tree.level[n];
        let key = (area, tree.min_pix[n]);
        match by_key.get(&key) {
            Some(&i) => {
                // Keep the most extreme generating level.
                let c = &mut cands[i];
                let better = match polarity {
                    Polarity::Upper => level > c.level,
                    Polarity::Lower => level < c.level,
                };
                if better {
                    c.level = level;
                    c.node = n;
                }
            }
            None => {
                by_key.insert(key, cands.len());
                cands.push(Candidate {
                    polarity,
                    level,
                    area: area as usize,
                    min_pixel: tree.min_pix[n],
                    tree: t,
                    node: n,
                });
            }
        }
    }
    cands.sort_by(|a, b| {
        b.area
            .cmp(&a.area)
            .then(a.level.cmp(&b.level))
            .then(a.min_pixel.cmp(&b.min_pixel))
    });
    debug_assert!(cands[0].tree == usize::MAX);

    // Paint shapes from largest to smallest; the owner a shape overwrites is
    // its parent.
    let to_frame = |p: u32| -> usize {
        let p = p as usize;
        (p / pw - 1) * width + (p % pw - 1)
    };
    let interior: Vec<u32> = (0..height)
        .flat_map(|y| (0..width).map(move |x| ((y + 1) * pw + x + 1) as u32))
        .collect();
    let mut owner = vec![0u32; n_pix];
    let mut parents: Vec<Option<usize>> = Vec::with_capacity(cands.len());
    let mut stamp = vec![u32::MAX; ph * pw];
    let mut raw: Vec<(u64, [i128; 5])> = Vec::with_capacity(cands.len());
    let mut pixels = Vec::new();
    for (i, c) in cands.iter().enumerate() {
        pixels.clear();
        if i == 0 {
            pixels.extend_from_slice(&interior);
            parents.push(None);
        } else {
            collect_saturated(&trees, &holes, c.tree, c.node, &mut pixels);
            parents.push(Some(owner[to_frame(pixels[0])] as usize));
        }
        debug_assert_eq!(pixels.len(), c.area);
        for &p in &pixels {
            owner[to_frame(p)] = i as u32;
            stamp[p as usize] = i as u32;
        }
        raw.push((perimeter(&pixels, &stamp, i as u32, pw), moments(&pixels, pw)));
    }

    let mut shapes: Vec<Shape> = cands
        .iter()
        .enumerate()
        .map(|(i, c)| Shape {
            polarity: c.polarity,
            level: c.level,
            area: c.area,
            parent: parents[i],
            children: Vec::new(),
            depth: 0,
            min_pixel: to_frame(c.min_pixel),
            attributes: AttributeVector {
                log_area_fraction: 0.0,
                compactness: 1.0,
                elongation: 1.0,
                contrast: 0.0,
                polarity_sign: 1.0,
                depth_fraction: 0.0,
            },
        })
        .collect();
    let mut max_depth = 0;
    for i in 1..shapes.len() {
        let p = shapes[i].parent.expect("non-root shape without parent");
        shapes[p].children.push(i);
        shapes[i].depth = shapes[p].depth + 1;
        max_depth = max_depth.max(shapes[i].depth);
    }

    let total = n_pix as f64;
    for i in 0..shapes.len() {
        let (perim, m) = raw[i];
        let parent_level = shapes[i].parent.map(|p| shapes[p].level);
        let s = &mut shapes[i];
        s.attributes = AttributeVector {
            log_area_fraction: (s.area as f64 / total).ln(),
            compactness: compactness(s.area, perim),
            elongation: elongation(s.area, &m),
            contrast: parent_level
                .map(|pl| (s.level as f64 - pl as f64).abs() / 255.0)
                .unwrap_or(0.0),
            polarity_sign: s.polarity.sign(),
            depth_fraction: if max_depth == 0 {
                0.0
            } else {
                s.depth as f64 / max_depth as f64
            },
        };
    }

    TreeOfShapes {
        height,
        width,
        shapes,
        max_depth,
        owner,
    }
}

/// Lower median of the frame's border pixels.
fn border_median(frame: &[u8], height: usize, width: usize) -> u8 {
    let mut border: Vec<u8> = (0..height * width)
        .filter(|&p| {
            let (y, x) = (p / width, p % width);
            y == 0 || x == 0 || y + 1 == height || x + 1 == width
        })
        .map(|p| frame[p])
        .collect();
    border.sort_unstable();
    border[(border.len() - 1) / 2]
}

fn compactness(area: usize, perimeter: u64) -> f64 {
    if area <= 1 {
        return 1.0;
    }
    let c = 4.0 * std::f64::consts::PI * area as f64 / (perimeter as f64 * perimeter as f64);
    c.min(1.0)
}

/// Axis ratio of the moment ellipse, each pixel taken as a unit square.
fn elongation(area: usize, m: &[i128; 5]) -> f64 {
    let [sx, sy, sxx, syy, sxy] = *m;
    let a = area as i128;
    let a2 = (a * a) as f64;
    let var_x = (a * sxx - sx * sx) as f64 / a2 + 1.0 / 12.0;
    let var_y = (a * syy - sy * sy) as f64 / a2 + 1.0 / 12.0;
    let cov = (a * sxy - sx * sy) as f64 / a2;
    let half_tr = 0.5 * (var_x + var_y);
    let disc = (0.25 * (var_x - var_y) * (var_x - var_y) + cov * cov).sqrt();
    let major = half_tr + disc;
    let minor = (half_tr - disc).max(0.0);
    if major <= 0.0 {
        1.0
    } else {
        (minor / major).sqrt().clamp(f64::MIN_POSITIVE, 1.0)
    }
}

/// Edges between the shape and anything else; `pixels` never touch the
/// padding ring, so every neighbor index is valid.
fn perimeter(pixels: &[u32], stamp: &[u32], id: u32, width: usize) -> u64 {
    let mut edges = 0;
    for &p in pixels {
        let p = p as usize;
        edges += (stamp[p - width] != id) as u64;
        edges += (stamp[p + width] != id) as u64;
        edges += (stamp[p - 1] != id) as u64;
        edges += (stamp[p + 1] != id) as u64;
    }
    edges
}

fn moments(pixels: &[u32], width: usize) -> [i128; 5] {
    let mut m = [0i128; 5];
    for &p in pixels {
        let (y, x) = ((p as usize / width) as i128, (p as usize % width) as i128);
        m[0] += x;
        m[1] += y;
        m[2] += x * x;
        m[3] += y * y;
        m[4] += x * y;
    }
    m
}

fn collect_saturated(
    trees: &[&ComponentTree; 2],
    holes: &[Vec<Vec<u32>>; 2],
    tree: usize,
    node: usize,
    out: &mut Vec<u32>,
) {
    let mut stack = vec![(tree, node)];
    while let Some((t, n)) = stack.pop() {
        out.extend_from_slice(trees[t].subtree_pixels(n));
        for &h in &holes[t][n] {
            stack.push((1 - t, h as usize));
        }
    }
}

/// For every border-free node `D` of `inner`, records `D` as a hole of each
/// node of `outer` that directly encloses it at the level where `D` exists.
fn link_holes(inner: &ComponentTree, outer: &ComponentTree, width: usize, holes: &mut [Vec<u32>]) {
    for d in 0..inner.len() {
        if inner.border[d] {
            continue;
        }
        let top = inner.min_pix[d] as usize;
        debug_assert!(top >= width);
        let above = top - width;
        // `D` exists for thresholds between its own level and its parent's;
        // the enclosing component sits one gray level beyond on the other side.
        let lo = inner.level[d];
        let hi = inner.level[inner.parent[d] as usize];
        let mut a = outer.node_of[above] as usize;
        loop {
            let la = outer.level[a];
            let in_range = match inner.polarity {
                // D is a lower component alive at l - 1 for l = level(A).
                Polarity::Lower => la > lo && la <= hi,
                // D is an upper component alive at l + 1 for l = level(B).
                Polarity::Upper => la < lo && la >= hi,
            };
            let beyond = match inner.polarity {
                Polarity::Lower => la <= lo,
                Polarity::Upper => la >= lo,
            };
            if beyond {
                break;
            }
            if in_range {
                holes[a].push(d as u32);
            }
            let p = outer.parent[a] as usize;
            if p == a {
                break;
            }
            a = p;
        }
    }
}

/// Max-tree (upper, 4-connected) or min-tree (lower, 8-connected).
/// Nodes are numbered root first so parents precede children.
struct ComponentTree {
    polarity: Polarity,
    level: Vec<u8>,
    parent: Vec<u32>,
    /// Pixels in the node's subtree.
    area: Vec<u32>,
    border: Vec<bool>,
    min_pix: Vec<u32>,
    node_of: Vec<u32>,
    /// Pixels laid out so every subtree is contiguous.
    order: Vec<u32>,
    start: Vec<u32>,
}

impl ComponentTree {
    fn len(&self) -> usize {
        self.level.len()
    }

    fn subtree_pixels(&self, n: usize) -> &[u32] {
        let s = self.start[n] as usize;
        &self.order[s..s + self.area[n] as usize]
    }

    fn build(img: &[u8], height: usize, width: usize, polarity: Polarity) -> Self {
        let n = img.len();
        // Counting sort: upper trees flood from bright to dark.
        let mut counts = [0usize; 257];
        for &v in img {
            counts[key(polarity, v) as usize + 1] += 1;
        }
        for i in 1..257 {
            counts[i] += counts[i - 1];
        }
        let mut sorted = vec![0u32; n];
        for (p, &v) in img.iter().enumerate() {
            let k = key(polarity, v) as usize;
            sorted[counts[k]] = p as u32;
            counts[k] += 1;
        }

        const UNSET: u32 = u32::MAX;
        let mut par = vec![UNSET; n];
        let mut zpar = vec![UNSET; n];
        let conn8 = polarity == Polarity::Lower;
        let mut nbrs = [0usize; 8];
        for &p in &sorted {
            let p = p as usize;
            par[p] = p as u32;
            zpar[p] = p as u32;
            let k = neighbors(p, height, width, conn8, &mut nbrs);
            for &q in &nbrs[..k] {
                if zpar[q] == UNSET {
                    continue;
                }
                let r = find_root(&mut zpar, q);
                if r != p {
                    par[r] = p as u32;
                    zpar[r] = p as u32;
                }
            }
        }
        // Canonicalize: every parent link points to the level root.
        for &p in sorted.iter().rev() {
            let p = p as usize;
            let q = par[p] as usize;
            if img[par[q] as usize] == img[q] {
                par[p] = par[q];
            }
        }

        let root_pix = *sorted.last().unwrap() as usize;
        let mut node_of = vec![UNSET; n];
        let mut level = Vec::new();
        let mut parent = Vec::new();
        for &p in sorted.iter().rev() {
            let p = p as usize;
            let q = par[p] as usize;
            if p == root_pix || img[q] != img[p] {
                let id = level.len() as u32;
                node_of[p] = id;
                level.push(img[p]);
                parent.push(if p == root_pix { id } else { node_of[q] });
            } else {
                node_of[p] = node_of[q];
            }
        }

        let nodes = level.len();
        let mut own = vec![0u32; nodes];
        let mut border = vec![false; nodes];
        let mut min_pix = vec![u32::MAX; nodes];
        for p in 0..n {
            let id = node_of[p] as usize;
            own[id] += 1;
            let (y, x) = (p / width, p % width);
            if y == 0 || x == 0 || y + 1 == height || x + 1 == width {
                border[id] = true;
            }
            min_pix[id] = min_pix[id].min(p as u32);
        }
        let mut area = own.clone();
        for id in (1..nodes).rev() {
            let pa = parent[id] as usize;
            area[pa] += area[id];
            border[pa] |= border[id];
            min_pix[pa] = min_pix[pa].min(min_pix[id]);
        }

        let mut start = vec![0u32; nodes];
        let mut next = vec![0u32; nodes];
        next[0] = own[0];
        for id in 1..nodes {
            let pa = parent[id] as usize;
            start[id] = next[pa];
            next[pa] += area[id];
            next[id] = start[id] + own[id];
        }
        let mut cursor = start.clone();
        let mut order = vec![0u32; n];
        for p in 0..n {
            let id = node_of[p] as usize;
            order[cursor[id] as usize] = p as u32;
            cursor[id] += 1;
        }

        ComponentTree {
            polarity,
            level,
            parent,
            area,
            border,
            min_pix,
            node_of,
            order,
            start,
        }
    }
}

#[inline]
fn key(polarity: Polarity, v: u8) -> u8 {
    match polarity {
        Polarity::Upper => 255 - v,
        Polarity::Lower => v,
    }
}

fn find_root(zpar: &mut [u32], p: usize) -> usize {
    let mut r = p;
    while zpar[r] as usize != r {
        r = zpar[r] as usize;
    }
    let mut q = p;
    while zpar[q] as usize != r {
        let next = zpar[q] as usize;
        zpar[q] = r as u32;
        q = next;
    }
    r
}

#[inline]
fn neighbors(p: usize, height: usize, width: usize, conn8: bool, out: &mut [usize; 8]) -> usize {
    let (y, x) = (p / width, p % width);
    let mut k = 0;
    let up = y > 0;
    let down = y + 1 < height;
    let left = x > 0;
    let right = x + 1 < width;
    if up {
        out[k] = p - width;
        k += 1;
    }
    if down {
        out[k] = p + width;
        k += 1;
    }
    if left {
        out[k] = p - 1;
        k += 1;
    }
    if right {
        out[k] = p + 1;
        k += 1;
    }
    if conn8 {
        if up && left {
            out[k] = p - width - 1;
            k += 1;
        }
        if up && right {
            out[k] = p - width + 1;
            k += 1;
        }
        if down && left {
            out[k] = p + width - 1;
            k += 1;
        }
        if down && right {
            out[k] = p + width + 1;
            k += 1;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_has_only_root() {
        let t = flst(&[128; 16], 4, 4);
        assert_eq!(t.len(), 1);
        assert_eq!(t.shape(0).area, 16);
        assert_eq!(t.shape(0).level, 128);
        assert_eq!(t.shape(0).parent, None);
    }

    #[test]
    fn bright_center_pixel() {
        let mut img = [0u8; 25];
        img[12] = 255;
        let t = flst(&img, 5, 5);
        assert_eq!(t.len(), 2);
        assert_eq!(t.shape(0).area, 25);
        let c = t.shape(1);
        assert_eq!((c.area, c.polarity, c.parent), (1, Polarity::Upper, Some(0)));
        assert_eq!(c.attributes.contrast, 1.0);
        assert_eq!(c.attributes.compactness, 1.0);
        assert_eq!(c.attributes.elongation, 1.0);
    }

    #[test]
    fn nested_rings_form_a_chain() {
        let mut img = [0u8; 49];
        for y in 1..6 {
            for x in 1..6 {
                img[y * 7 + x] = if (2..5).contains(&y) && (2..5).contains(&x) {
                    200
                } else {
                    100
                };
            }
        }
        let t = flst(&img, 7, 7);
        let areas: Vec<usize> = t.shapes().iter().map(|s| s.area).collect();
        assert_eq!(areas, vec![49, 25, 9]);
        assert_eq!(t.shape(2).parent, Some(1));
        assert_eq!(t.shape(1).parent, Some(0));
        assert_eq!(t.shape(2).level, 200);
        assert_eq!(t.shape(1).level, 100);
        assert_eq!(t.shape(2).attributes.depth_fraction, 1.0);
        assert_eq!(t.shape(1).attributes.depth_fraction, 0.5);
    }

    #[test]
    fn dark_hole_inside_bright_ring_is_filled() {
        // Bright ring enclosing a dark center on a mid background.
        #[rustfmt::skip]
        let img = [
            50, 50, 50, 50, 50,
            50, 200, 200, 200, 50,
            50, 200, 0, 200, 50,
            50, 200, 200, 200, 50,
            50, 50, 50, 50, 50,
        ];
        let t = flst(&img, 5, 5);
        let areas: Vec<usize> = t.shapes().iter().map(|s| s.area).collect();
        assert_eq!(areas, vec![25, 9, 1]);
        assert_eq!(t.shape(1).polarity, Polarity::Upper);
        assert_eq!(t.shape(2).polarity, Polarity::Lower);
        assert_eq!(t.shape(2).parent, Some(1));
    }

    #[test]
    fn root_attributes() {
        let img: Vec<u8> = (0..64).map(|i| (i * 37 % 256) as u8).collect();
        let t = flst(&img, 8, 8);
        let a = t.shape(0).attributes;
        assert_eq!(a.contrast, 0.0);
        assert_eq!(a.depth_fraction, 0.0);
        assert_eq!(a.log_area_fraction, 0.0);
    }

    #[test]
    fn rectangle_elongation_from_moments() {
        // A 2x8 bright bar inside a dark 6x12 frame.
        let (h, w) = (6, 12);
        let mut img = vec![0u8; h * w];
        for y in 2..4 {
            for x in 2..10 {
                img[y * w + x] = 255;
            }
        }
        let t = flst(&img, h, w);
        let bar = t.shapes().iter().find(|s| s.area == 16).unwrap();
        assert!((bar.attributes.elongation - 0.25).abs() < 1e-12);
        // perimeter 2*(2+8) = 20
        let expected = 4.0 * std::f64::consts::PI * 16.0 / 400.0;
        assert!((bar.attributes.compactness - expected).abs() < 1e-12);
    }

    #[test]
    fn pixels_and_owner_agree() {
        let img: Vec<u8> = (0..100).map(|i| ((i * 7919) % 5 * 60) as u8).collect();
        let t = flst(&img, 10, 10);
        for i in 0..t.len() {
            assert_eq!(t.pixels(i).len(), t.shape(i).area);
        }
    }

    #[test]
    fn min_area_prunes_small_shapes() {
        let mut img = [0u8; 25];
        img[12] = 255;
        let t = flst_with(&img, 5, 5, &TosConfig { min_area: 3 });
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn dump_lists_every_shape() {
        let mut img = [0u8; 25];
        img[12] = 255;
        let d = flst(&img, 5, 5).dump();
        assert_eq!(d, "#0 + level=0 area=25 min=0\n  #1 + level=255 area=1 min=12\n");
    }
}
