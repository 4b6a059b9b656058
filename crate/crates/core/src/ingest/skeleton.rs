//! Distance-ordered homotopic thinning.
//!
//! The skeleton is obtained by deleting simple points in increasing order of
//! their Euclidean distance to the background. Ridge pixels of the distance
//! map (centres of locally maximal discs) are anchored and survive the first
//! phase; a second directional phase makes the result one pixel thick, and
//! short terminal spurs created by boundary discretization are pruned.
//! Topology uses 8-connectivity for the foreground and 4-connectivity for the
//! background, so every step preserves components and holes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use super::image::{Point, ShapeImage};

const MAX_PRUNE_ROUNDS: usize = 32;

const N8: [(i32, i32); 8] = [(-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0)];

/// Tuning knobs of the thinning procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkeletonParams {
    /// Slack (pixels) in the maximal-disc containment test; larger values
    /// anchor fewer ridge pixels.
    pub ridge_tolerance: f64,
    /// Terminal branches whose length does not exceed this multiple of the
    /// radius drop between junction and tip are pruned.
    pub spur_ratio: f64,
    /// Terminal branches whose length exceeds the radius drop by at most
    /// this many pixels are pruned.
    pub min_excess: f64,
    /// Terminal branches with at most this many pixels are always pruned.
    pub min_spur_pixels: usize,
}

impl Default for SkeletonParams {
    fn default() -> Self {
        Self {
            ridge_tolerance: 0.35,
            spur_ratio: 1.2,
            min_excess: 2.5,
            min_spur_pixels: 2,
        }
    }
}

/// One-pixel-thick skeleton of a shape with per-pixel radius and
/// boundary mass.
#[derive(Debug, Clone)]
pub struct Skeleton {
    width: usize,
    height: usize,
    /// Skeleton pixels in scanline order.
    pub pixels: Vec<Point>,
    /// Euclidean distance to the background at each skeleton pixel.
    pub radius: Vec<f64>,
    /// Number of boundary pixels whose nearest skeleton pixel is this one.
    pub boundary_contribution: Vec<u32>,
    /// Total number of boundary pixels of the source shape.
    pub boundary_total: usize,
    index: Vec<i32>,
}

impl Skeleton {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Index of `p` in [`Skeleton::pixels`], if it is a skeleton pixel.
    pub fn index_of(&self, p: Point) -> Option<usize> {
        if p.x < 0 || p.y < 0 || p.x >= self.width as i32 || p.y >= self.height as i32 {
            return None;
        }
        let i = self.index[p.y as usize * self.width + p.x as usize];
        (i >= 0).then_some(i as usize)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.index_of(p).is_some()
    }

    /// Skeleton indices of the 8-neighbours of pixel `i`, in a fixed order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let p = self.pixels[i];
        N8.iter()
            .filter_map(|&(dx, dy)| self.index_of(Point::new(p.x + dx, p.y + dy)))
            .collect()
    }

    /// True when some 2×2 block is entirely skeleton.
    pub fn has_square_block(&self) -> bool {
        self.pixels.iter().any(|p| {
            self.contains(Point::new(p.x + 1, p.y))
                && self.contains(Point::new(p.x, p.y + 1))
                && self.contains(Point::new(p.x + 1, p.y + 1))
        })
    }

    /// Number of 8-connected components of the skeleton.
    pub fn count_components(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for j in self.neighbors(i) {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        count
    }

    /// Number of holes (bounded 4-connected background components).
    pub fn count_holes(&self) -> usize {
        let mask: Vec<bool> = self.index.iter().map(|&i| i >= 0).collect();
        super::image::count_holes(self.width, self.height, &mask)
    }
}

/// Squared Euclidean distance from each pixel to the nearest background
/// pixel; pixels outside the image are background.
pub fn squared_distance_transform(image: &ShapeImage) -> Vec<f64> {
    // padded by one pixel so the border counts as background
    let (w, h) = (image.width() + 2, image.height() + 2);
    let inf = 1e20;
    let mut grid = vec![0.0; w * h];
    for y in 0..image.height() {
        for x in 0..image.width() {
            if image.get(x as i32, y as i32) {
                grid[(y + 1) * w + x + 1] = inf;
            }
        }
    }
    let mut buf = vec![0.0; w.max(h)];
    for x in 0..w {
        for y in 0..h {
            buf[y] = grid[y * w + x];
        }
        let col = distance_1d(&buf[..h]);
        for y in 0..h {
            grid[y * w + x] = col[y];
        }
    }
    for y in 0..h {
        let row = distance_1d(&grid[y * w..(y + 1) * w]);
        grid[y * w..(y + 1) * w].copy_from_slice(&row);
    }
    let mut out = vec![0.0; image.width() * image.height()];
    for y in 0..image.height() {
        for x in 0..image.width() {
            out[y * image.width() + x] = grid[(y + 1) * w + x + 1];
        }
    }
    out
}

/// Lower envelope of parabolas (Felzenszwalb & Huttenlocher).
fn distance_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    let mut k = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s;
        loop {
            let p = v[k];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            // z[0] is -inf, so this never underflows k
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let diff = q as f64 - p as f64;
        *out = diff * diff + f[p];
    }
    d
}

/// Lookup table over the 8-neighbourhood bit pattern (bit `k` set when
/// neighbour `N8[k]` is foreground): true when the centre is a simple point
/// for (8, 4) connectivity.
fn simple_table() -> &'static [bool; 256] {
    static TABLE: OnceLock<[bool; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [false; 256];
        for (pattern, slot) in table.iter_mut().enumerate() {
            *slot = is_simple_pattern(pattern as u8);
        }
        table
    })
}

fn is_simple_pattern(pattern: u8) -> bool {
    let fg = |k: usize| pattern & (1 << (k % 8)) != 0;
    // 8-components of the foreground neighbours; ring positions k and k+1 are
    // always 8-adjacent, and two odd (edge) positions around a corner are too.
    let mut fg_components = 0;
    let mut seen = [false; 8];
    for start in 0..8 {
        if !fg(start) || seen[start] {
            continue;
        }
        fg_components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(k) = stack.pop() {
            for (j, s) in seen.iter_mut().enumerate() {
                if fg(j) && !*s && ring_adjacent8(k, j) {
                    *s = true;
                    stack.push(j);
                }
            }
        }
    }
    // 4-components of background neighbours that touch the centre through
    // an edge neighbour (odd ring positions).
    let mut bg_components = 0;
    let mut seen = [false; 8];
    for start in [1usize, 3, 5, 7] {
        if fg(start) || seen[start] {
            continue;
        }
        bg_components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(k) = stack.pop() {
            for j in [(k + 1) % 8, (k + 7) % 8] {
                if !fg(j) && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    fg_components == 1 && bg_components == 1
}

fn ring_adjacent8(a: usize, b: usize) -> bool {
    let (pa, pb) = (N8[a], N8[b]);
    (pa.0 - pb.0).abs() <= 1 && (pa.1 - pb.1).abs() <= 1 && a != b
}

struct Grid {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl Grid {
    fn get(&self, x: i32, y: i32) -> bool {
        x >= 0
            && y >= 0
            && x < self.width as i32
            && y < self.height as i32
            && self.cells[y as usize * self.width + x as usize]
    }

    fn pattern(&self, x: i32, y: i32) -> u8 {
        let mut bits = 0u8;
        for (k, (dx, dy)) in N8.iter().enumerate() {
            if self.get(x + dx, y + dy) {
                bits |= 1 << k;
            }
        }
        bits
    }

    fn is_simple(&self, x: i32, y: i32) -> bool {
        simple_table()[self.pattern(x, y) as usize]
    }

    fn neighbor_count(&self, x: i32, y: i32) -> u32 {
        self.pattern(x, y).count_ones()
    }

    fn xy(&self, i: usize) -> (i32, i32) {
        ((i % self.width) as i32, (i / self.width) as i32)
    }
}

/// Skeletonizes a shape with the default parameters.
pub fn skeletonize(image: &ShapeImage) -> Skeleton {
    skeletonize_with(image, &SkeletonParams::default())
}

pub fn skeletonize_with(image: &ShapeImage, params: &SkeletonParams) -> Skeleton {
    let (w, h) = (image.width(), image.height());
    let dt2 = squared_distance_transform(image);
    let radius: Vec<f64> = dt2.iter().map(|d| d.sqrt()).collect();
    let mut grid = Grid {
        width: w,
        height: h,
        cells: image.mask().to_vec(),
    };

    let anchors = ridge_anchors(&grid, &radius, params.ridge_tolerance);

    // Phase 1: delete non-anchored simple points by increasing distance.
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    let mut queued = vec![false; w * h];
    let key = |i: usize| dt2[i].round() as u64;
    for i in 0..w * h {
        if grid.cells[i] && !anchors[i] {
            heap.push(Reverse((key(i), i)));
            queued[i] = true;
        }
    }
    while let Some(Reverse((_, i))) = heap.pop() {
        queued[i] = false;
        let (x, y) = grid.xy(i);
        if !grid.cells[i] || anchors[i] || !grid.is_simple(x, y) || grid.neighbor_count(x, y) < 2 {
            continue;
        }
        grid.cells[i] = false;
        for (dx, dy) in N8 {
            let (nx, ny) = (x + dx, y + dy);
            if grid.get(nx, ny) {
                let j = ny as usize * w + nx as usize;
                if !queued[j] && !anchors[j] {
                    queued[j] = true;
                    heap.push(Reverse((key(j), j)));
                }
            }
        }
    }

    thin_directional(&mut grid, &dt2);
    for _ in 0..MAX_PRUNE_ROUNDS {
        if !prune_spurs(&mut grid, &radius, params) {
            break;
        }
        thin_directional(&mut grid, &dt2);
    }

    assemble(image, grid, &radius)
}

/// Pixels whose maximal inscribed disc is not contained in the disc of any
/// 8-neighbour (up to `tolerance`).
fn ridge_anchors(grid: &Grid, radius: &[f64], tolerance: f64) -> Vec<bool> {
    let w = grid.width;
    let mut anchors = vec![false; grid.cells.len()];
    for (i, anchor) in anchors.iter_mut().enumerate() {
        if !grid.cells[i] {
            continue;
        }
        let (x, y) = grid.xy(i);
        let r = radius[i];
        *anchor = N8.iter().all(|&(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            if !grid.get(nx, ny) {
                return true;
            }
            let step = if dx != 0 && dy != 0 {
                std::f64::consts::SQRT_2
            } else {
                1.0
            };
            radius[ny as usize * w + nx as usize] < r + step - tolerance
        });
    }
    anchors
}

/// Deletes simple, non-terminal pixels one border direction at a time until
/// the skeleton is irreducible. Restricting each sub-pass to one border side
/// keeps two-pixel-thick lines from being eaten from their ends.
fn thin_directional(grid: &mut Grid, dt2: &[f64]) {
    let mut order: Vec<usize> = (0..grid.cells.len()).filter(|&i| grid.cells[i]).collect();
    order.sort_by(|&a, &b| dt2[a].total_cmp(&dt2[b]).then(a.cmp(&b)));
    loop {
        let mut changed = false;
        for (dx, dy) in [(0, -1), (0, 1), (1, 0), (-1, 0)] {
            for &i in &order {
                if !grid.cells[i] {
                    continue;
                }
                let (x, y) = grid.xy(i);
                if !grid.get(x + dx, y + dy) && grid.neighbor_count(x, y) >= 2 && grid.is_simple(x, y) {
                    grid.cells[i] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        order.retain(|&i| grid.cells[i]);
    }
}

/// Removes terminal branches that are too short to be significant. A branch
/// is traced from its end pixel to the first pixel with three or more
/// neighbours; it is pruned when it has at most `min_spur_pixels` pixels, or
/// when its length is small against the radius increase from tip to
/// junction (ratio below `spur_ratio` or excess below `min_excess`).
fn prune_spurs(grid: &mut Grid, radius: &[f64], params: &SkeletonParams) -> bool {
    let w = grid.width;
    let ends: Vec<usize> = (0..grid.cells.len())
        .filter(|&i| {
            let (x, y) = grid.xy(i);
            grid.cells[i] && grid.neighbor_count(x, y) == 1
        })
        .collect();
    let mut doomed = Vec::new();
    for &end in &ends {
        let mut branch = vec![end];
        let mut prev = usize::MAX;
        let mut cur = end;
        let mut length = 0.0;
        let junction = loop {
            let (x, y) = grid.xy(cur);
            let next: Vec<usize> = N8
                .iter()
                .filter(|&&(dx, dy)| grid.get(x + dx, y + dy))
                .map(|&(dx, dy)| (y + dy) as usize * w + (x + dx) as usize)
                .filter(|&j| j != prev && !branch.contains(&j))
                .collect();
            if next.len() != 1 {
                break None;
            }
            let nxt = next[0];
            let (nx, ny) = grid.xy(nxt);
            length += (((nx - x).pow(2) + (ny - y).pow(2)) as f64).sqrt();
            let (nx, ny) = (nx, ny);
            if grid.neighbor_count(nx, ny) >= 3 {
                break Some(nxt);
            }
            prev = cur;
            cur = nxt;
            branch.push(cur);
        };
        let Some(junction) = junction else {
            // isolated arc, nothing to prune against
            continue;
        };
        let drop = radius[junction] - radius[end];
        if branch.len() <= params.min_spur_pixels
            || length <= params.spur_ratio * drop
            || length - drop <= params.min_excess
        {
            doomed.extend(branch);
        }
    }
    let changed = !doomed.is_empty();
    for i in doomed {
        grid.cells[i] = false;
    }
    changed
}

fn assemble(image: &ShapeImage, grid: Grid, radius: &[f64]) -> Skeleton {
    let (w, h) = (grid.width, grid.height);
    let mut pixels = Vec::new();
    let mut rad = Vec::new();
    let mut index = vec![-1i32; w * h];
    for i in 0..w * h {
        if grid.cells[i] {
            index[i] = pixels.len() as i32;
            let (x, y) = grid.xy(i);
            pixels.push(Point::new(x, y));
            rad.push(radius[i]);
        }
    }
    let boundary = image.boundary();
    let mut contribution = vec![0u32; pixels.len()];
    for b in &boundary {
        let mut best = usize::MAX;
        let mut best_d = i64::MAX;
        for (k, s) in pixels.iter().enumerate() {
            let d = ((s.x - b.x) as i64).pow(2) + ((s.y - b.y) as i64).pow(2);
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        if best != usize::MAX {
            contribution[best] += 1;
        }
    }
    Skeleton {
        width: w,
        height: h,
        pixels,
        radius: rad,
        boundary_contribution: contribution,
        boundary_total: boundary.len(),
        index,
    }
}

/// Renders a skeleton over its shape: `#` skeleton, `.` shape, space
/// background. Handy when debugging.
pub fn render_ascii(image: &ShapeImage, skeleton: &Skeleton) -> String {
    let mut out = String::new();
    for y in 0..image.height() as i32 {
        for x in 0..image.width() as i32 {
            out.push(if skeleton.contains(Point::new(x, y)) {
                '#'
            } else if image.get(x, y) {
                '.'
            } else {
                ' '
            });
        }
        out.push('\n');
    }
    out
}
