//! Binary shape masks and their loaders.
//!
//! Supported inputs are portable bitmaps (P1 plain, P4 raw), where a set bit
//! is foreground, and PNG images thresholded at 128 on luma, where bright
//! pixels are foreground.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use super::IngestError;

/// Integer lattice point; `x` is the column, `y` the row (growing downwards).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }
}

/// A validated binary shape: one 4-connected foreground component.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeImage {
    pub id: String,
    pub class_label: Option<String>,
    width: usize,
    height: usize,
    mask: Vec<bool>,
}

impl ShapeImage {
    /// Builds a shape from a row-major mask and validates it.
    pub fn new(
        id: impl Into<String>,
        class_label: Option<String>,
        width: usize,
        height: usize,
        mask: Vec<bool>,
    ) -> Result<Self, IngestError> {
        if width < 3 || height < 3 {
            return Err(IngestError::TooSmall { width, height });
        }
        if mask.len() != width * height {
            return Err(IngestError::MaskSize {
                expected: width * height,
                actual: mask.len(),
            });
        }
        let image = Self {
            id: id.into(),
            class_label,
            width,
            height,
            mask,
        };
        match image.count_components() {
            0 => Err(IngestError::EmptyMask),
            1 => Ok(image),
            n => Err(IngestError::MultipleComponents(n)),
        }
    }

    /// Builds a shape from a predicate over pixel coordinates.
    pub fn from_fn(
        id: impl Into<String>,
        width: usize,
        height: usize,
        f: impl Fn(i32, i32) -> bool,
    ) -> Result<Self, IngestError> {
        let mut mask = Vec::with_capacity(width * height);
        for y in 0..height as i32 {
            for x in 0..width as i32 {
                mask.push(f(x, y));
            }
        }
        Self::new(id, None, width, height, mask)
    }

    /// Parses an ASCII picture where `#` (or `1`, `X`) marks foreground.
    pub fn from_ascii(id: impl Into<String>, art: &str) -> Result<Self, IngestError> {
        let rows: Vec<&str> = art.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let width = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
        let height = rows.len();
        let mut mask = vec![false; width * height];
        for (y, row) in rows.iter().enumerate() {
            for (x, c) in row.chars().enumerate() {
                mask[y * width + x] = matches!(c, '#' | '1' | 'X');
            }
        }
        Self::new(id, None, width, height, mask)
    }

    pub fn with_class(mut self, class_label: impl Into<String>) -> Self {
        self.class_label = Some(class_label.into());
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Foreground test; out-of-range coordinates are background.
    pub fn get(&self, x: i32, y: i32) -> bool {
        if x < 0 || y < 0 || x >= self.width as i32 || y >= self.height as i32 {
            return false;
        }
        self.mask[y as usize * self.width + x as usize]
    }

    pub fn foreground_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Foreground pixels in scanline order.
    pub fn foreground(&self) -> impl Iterator<Item = Point> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| Point::new((i % self.width) as i32, (i / self.width) as i32))
    }

    /// Foreground pixels with at least one background 4-neighbour
    /// (the image border counts as background), in scanline order.
    pub fn boundary(&self) -> Vec<Point> {
        self.foreground()
            .filter(|p| {
                !self.get(p.x - 1, p.y) || !self.get(p.x + 1, p.y) || !self.get(p.x, p.y - 1) || !self.get(p.x, p.y + 1)
            })
            .collect()
    }

    /// Centroid of the foreground.
    pub fn gravity_center(&self) -> (f64, f64) {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0.0);
        for p in self.foreground() {
            sx += p.x as f64;
            sy += p.y as f64;
            n += 1.0;
        }
        (sx / n, sy / n)
    }

    /// Orientation of the principal axis from the second central moments,
    /// in `[0, π)`.
    pub fn principal_axis(&self) -> f64 {
        let (cx, cy) = self.gravity_center();
        let (mut m20, mut m02, mut m11) = (0.0, 0.0, 0.0);
        for p in self.foreground() {
            let dx = p.x as f64 - cx;
            let dy = p.y as f64 - cy;
            m20 += dx * dx;
            m02 += dy * dy;
            m11 += dx * dy;
        }
        fold_axis_angle(0.5 * (2.0 * m11).atan2(m20 - m02))
    }

    /// Number of 4-connected foreground components.
    pub fn count_components(&self) -> usize {
        let mut seen = vec![false; self.mask.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.mask.len() {
            if !self.mask[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                let (x, y) = ((i % self.width) as i32, (i / self.width) as i32);
                for (nx, ny) in [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)] {
                    if self.get(nx, ny) {
                        let j = ny as usize * self.width + nx as usize;
                        if !seen[j] {
                            seen[j] = true;
                            queue.push_back(j);
                        }
                    }
                }
            }
        }
        count
    }

    /// Number of holes: bounded 4-connected background components.
    pub fn count_holes(&self) -> usize {
        count_holes(self.width, self.height, &self.mask)
    }

    /// Rotates the mask by 90° clockwise.
    pub fn rotate90(&self) -> ShapeImage {
        let (w, h) = (self.width, self.height);
        let mut mask = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                // (x, y) -> (h - 1 - y, x) in a h-wide, w-tall image
                mask[x * h + (h - 1 - y)] = self.mask[y * w + x];
            }
        }
        ShapeImage {
            id: self.id.clone(),
            class_label: self.class_label.clone(),
            width: h,
            height: w,
            mask,
        }
    }
}

/// Number of bounded 4-connected background components of a row-major
/// mask, with everything outside the mask counted as background.
pub fn count_holes(width: usize, height: usize, mask: &[bool]) -> usize {
    let (w, h) = (width as i32 + 2, height as i32 + 2);
    let bg = |x: i32, y: i32| {
        x >= 0
            && y >= 0
            && x < w
            && y < h
            && !(x >= 1
                && y >= 1
                && x <= width as i32
                && y <= height as i32
                && mask[(y - 1) as usize * width + (x - 1) as usize])
    };
    let mut seen = vec![false; (w * h) as usize];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if !bg(x, y) || seen[(y * w + x) as usize] {
                continue;
            }
            components += 1;
            seen[(y * w + x) as usize] = true;
            queue.push_back((x, y));
            while let Some((cx, cy)) = queue.pop_front() {
                for (nx, ny) in [(cx - 1, cy), (cx + 1, cy), (cx, cy - 1), (cx, cy + 1)] {
                    if bg(nx, ny) && !seen[(ny * w + nx) as usize] {
                        seen[(ny * w + nx) as usize] = true;
                        queue.push_back((nx, ny));
                    }
                }
            }
        }
    }
    components - 1
}

/// Folds an undirected line orientation into `[0, π)`.
pub fn fold_axis_angle(theta: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut t = theta.rem_euclid(pi);
    if t >= pi {
        t = 0.0;
    }
    t
}

/// Loads a mask from a PBM (P1/P4) or PNG file.
pub fn load_mask(path: &Path) -> Result<ShapeImage, IngestError> {
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let bytes = fs::read(path).map_err(|e| IngestError::UnreadableFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let unreadable = |reason: String| IngestError::UnreadableFile {
        path: path.display().to_string(),
        reason,
    };
    let (width, height, mask) = if bytes.starts_with(b"P1") || bytes.starts_with(b"P4") {
        parse_pbm(&bytes).map_err(unreadable)?
    } else {
        decode_png(&bytes).map_err(unreadable)?
    };
    if width < 3 || height < 3 {
        return Err(IngestError::TooSmall { width, height });
    }
    ShapeImage::new(id, None, width, height, mask)
}

fn decode_png(bytes: &[u8]) -> Result<(usize, usize, Vec<bool>), String> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| e.to_string())?
        .to_luma8();
    let (w, h) = img.dimensions();
    let mask = img.pixels().map(|p| p.0[0] >= 128).collect();
    Ok((w as usize, h as usize, mask))
}

/// Parses plain (P1) and raw (P4) portable bitmaps; `1` is foreground.
pub fn parse_pbm(bytes: &[u8]) -> Result<(usize, usize, Vec<bool>), String> {
    let raw = match bytes.get(..2) {
        Some(b"P1") => false,
        Some(b"P4") => true,
        _ => return Err("not a PBM file".into()),
    };
    let mut pos = 2;
    let mut header = [0usize; 2];
    for slot in header.iter_mut() {
        *slot = read_header_number(bytes, &mut pos)?;
    }
    let [width, height] = header;
    let mut mask = Vec::with_capacity(width * height);
    if raw {
        // exactly one whitespace byte separates the header from the data
        pos += 1;
        let row_bytes = width.div_ceil(8);
        let data = bytes.get(pos..pos + row_bytes * height).ok_or("truncated P4 data")?;
        for row in data.chunks(row_bytes) {
            for x in 0..width {
                mask.push(row[x / 8] & (0x80 >> (x % 8)) != 0);
            }
        }
    } else {
        let mut rest = bytes[pos..].iter();
        let mut in_comment = false;
        while mask.len() < width * height {
            let &c = rest.next().ok_or("truncated P1 data")?;
            match c {
                b'#' => in_comment = true,
                b'\n' | b'\r' => in_comment = false,
                _ if in_comment => {}
                b'0' => mask.push(false),
                b'1' => mask.push(true),
                c if c.is_ascii_whitespace() => {}
                c => return Err(format!("unexpected byte {c:#04x} in P1 data")),
            }
        }
    }
    Ok((width, height, mask))
}

fn read_header_number(bytes: &[u8], pos: &mut usize) -> Result<usize, String> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&c| c != b'\n') {
                    *pos += 1;
                }
            }
            Some(c) if c.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err("truncated PBM header".into()),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| "bad PBM header".to_string())
}

/// Serializes a mask as a plain P1 bitmap.
pub fn to_pbm(image: &ShapeImage) -> String {
    let mut out = format!("P1\n{} {}\n", image.width, image.height);
    for row in image.mask.chunks(image.width) {
        let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
