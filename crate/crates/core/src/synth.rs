//! Synthetic shape masks for tests, demos and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{IngestError, ShapeImage};

/// Axis-aligned filled square of side `side` with a `margin`-pixel border.
pub fn square(id: &str, side: usize, margin: usize) -> ShapeImage {
    let size = side + 2 * margin;
    let (lo, hi) = (margin as i32, (margin + side) as i32);
    ShapeImage::from_fn(id, size, size, |x, y| (lo..hi).contains(&x) && (lo..hi).contains(&y))
        .expect("square is a single component")
}

/// The same square with a rectangular bump of `bump_width` by
/// `bump_height` pixels centred on its right side.
pub fn square_with_protrusion(
    id: &str,
    side: usize,
    margin: usize,
    bump_width: usize,
    bump_height: usize,
) -> ShapeImage {
    let size = side + 2 * margin;
    let (lo, hi) = (margin as i32, (margin + side) as i32);
    let mid = (lo + hi - 1) as f64 / 2.0;
    let half = bump_width as f64 / 2.0;
    ShapeImage::from_fn(id, size + bump_height, size, |x, y| {
        let body = (lo..hi).contains(&x) && (lo..hi).contains(&y);
        let bump = (hi..hi + bump_height as i32).contains(&x) && ((y as f64) - mid).abs() < half;
        body || bump
    })
    .expect("protruded square is a single component")
}

/// Plus sign with arms of `arm` pixels beyond the centre and thickness
/// `2 * half_width + 1`.
pub fn plus(id: &str, arm: i32, half_width: i32) -> ShapeImage {
    let size = 2 * arm + 1;
    ShapeImage::from_fn(id, size as usize + 2, size as usize + 2, |x, y| {
        let (x, y) = (x - 1, y - 1);
        (0..size).contains(&x)
            && (0..size).contains(&y)
            && ((x - arm).abs() <= half_width || (y - arm).abs() <= half_width)
    })
    .expect("plus is a single component")
}

/// Filled disk of radius `r` centred in a square image.
pub fn disk(id: &str, r: f64) -> ShapeImage {
    let size = (2.0 * r).ceil() as usize + 5;
    let c = (size as f64 - 1.0) / 2.0;
    ShapeImage::from_fn(id, size, size, |x, y| {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        dx * dx + dy * dy <= r * r
    })
    .expect("disk is a single component")
}

/// Square ring: outer side `outer`, centred square hole of side `inner`.
pub fn annulus(id: &str, outer: usize, inner: usize) -> ShapeImage {
    let size = outer + 4;
    let (lo, hi) = (2, 2 + outer as i32);
    let (hlo, hhi) = (2 + ((outer - inner) / 2) as i32, 2 + ((outer + inner) / 2) as i32);
    ShapeImage::from_fn(id, size, size, |x, y| {
        (lo..hi).contains(&x) && (lo..hi).contains(&y) && !((hlo..hhi).contains(&x) && (hlo..hhi).contains(&y))
    })
    .expect("annulus is a single component")
}

/// Rasterizes a closed polygon (even-odd rule at pixel centres).
pub fn rasterize_polygon(
    id: &str,
    vertices: &[(f64, f64)],
    width: usize,
    height: usize,
) -> Result<ShapeImage, IngestError> {
    ShapeImage::from_fn(id, width, height, |x, y| {
        let (px, py) = (x as f64, y as f64);
        let mut inside = false;
        let n = vertices.len();
        for i in 0..n {
            let (xi, yi) = vertices[i];
            let (xj, yj) = vertices[(i + n - 1) % n];
            if (yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
                inside = !inside;
            }
        }
        inside
    })
}

/// Random star-shaped polygon with noisy radii, rasterized at desk scale
/// (`size` by `size` pixels). Draws again from the same stream until the
/// raster is a single component.
pub fn random_polygon(id: &str, seed: u64, size: usize) -> ShapeImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let vertices = rng.random_range(5..=9);
        let c = (size as f64 - 1.0) / 2.0;
        let base = 0.42 * size as f64;
        let stretch = rng.random_range(0.55..1.0);
        let rotation = rng.random_range(0.0..std::f64::consts::PI);
        let mut angles: Vec<f64> = (0..vertices)
            .map(|k| (k as f64 + rng.random_range(-0.3..0.3)) * std::f64::consts::TAU / vertices as f64)
            .collect();
        angles.sort_by(f64::total_cmp);
        let mut points = Vec::new();
        for a in angles {
            // each vertex is either a lobe tip or a notch
            let r = if rng.random_bool(0.5) {
                rng.random_range(0.75..1.0)
            } else {
                rng.random_range(0.25..0.5)
            };
            points.push((a, base * r));
        }
        let mut poly = Vec::new();
        for k in 0..points.len() {
            let (a0, r0) = points[k];
            let (mut a1, r1) = points[(k + 1) % points.len()];
            if a1 <= a0 {
                a1 += std::f64::consts::TAU;
            }
            // a few noisy intermediate points per side
            for s in 0..4 {
                let t = s as f64 / 4.0;
                let a = a0 + t * (a1 - a0);
                let noise = if s == 0 {
                    0.0
                } else {
                    rng.random_range(-0.04..0.04) * base
                };
                let r = r0 + t * (r1 - r0) + noise;
                let (ux, uy) = (a.cos() * r, a.sin() * r * stretch);
                let (rx, ry) = (
                    ux * rotation.cos() - uy * rotation.sin(),
                    ux * rotation.sin() + uy * rotation.cos(),
                );
                poly.push((c + rx, c + ry));
            }
        }
        if let Ok(img) = rasterize_polygon(id, &poly, size, size) {
            if img.foreground_count() >= 30 {
                return img;
            }
        }
    }
}
