//! Brute-force reference implementations, written from the definitions and
//! independent of the library's engines.
#![allow(dead_code)]

use lipmorph::{AdditiveSF, GreyImage, LipScale, RealPlane, StructuringFunction};
use rand::Rng;

/// `(dx, dy, value)` for every active cell, relative to the anchor.
pub fn taps(sf: &AdditiveSF) -> Vec<(isize, isize, f64)> {
    let (ax, ay) = sf.anchor();
    let mut out = Vec::new();
    for y in 0..sf.height() {
        for x in 0..sf.width() {
            let i = y * sf.width() + x;
            if sf.active()[i] {
                out.push((x as isize - ax as isize, y as isize - ay as isize, sf.values()[i]));
            }
        }
    }
    out
}

/// Dilation or erosion over the whole plane with replicated borders.
/// `sign = −1` samples `x − h` (dilation), `+1` samples `x + h` (erosion).
pub fn scan_replicate(
    plane: &RealPlane,
    sf: &AdditiveSF,
    sign: isize,
    combine: impl Fn(f64, f64) -> f64,
    better: impl Fn(f64, f64) -> bool,
) -> Vec<f64> {
    let (w, h) = (plane.width() as isize, plane.height() as isize);
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let mut best: Option<f64> = None;
            for &(dx, dy, b) in &taps(sf) {
                let px = (x + sign * dx).clamp(0, w - 1);
                let py = (y + sign * dy).clamp(0, h - 1);
                let v = combine(plane.get(px as usize, py as usize), b);
                if best.is_none_or(|cur| better(v, cur)) {
                    best = Some(v);
                }
            }
            out.push(best.unwrap());
        }
    }
    out
}

/// Valid-mode scan: every `x` whose samples all lie inside, in raster order.
pub fn scan_valid(
    plane: &RealPlane,
    sf: &AdditiveSF,
    sign: isize,
    combine: impl Fn(f64, f64) -> f64,
    better: impl Fn(f64, f64) -> bool,
) -> (usize, usize, Vec<f64>) {
    let t = taps(sf);
    let (w, h) = (plane.width() as isize, plane.height() as isize);
    let inside = |x: isize, y: isize| {
        t.iter().all(|&(dx, dy, _)| {
            let (px, py) = (x + sign * dx, y + sign * dy);
            px >= 0 && py >= 0 && px < w && py < h
        })
    };
    let mut out = Vec::new();
    let mut xs = std::collections::BTreeSet::new();
    let mut ys = std::collections::BTreeSet::new();
    for y in -2 * h..3 * h {
        for x in -2 * w..3 * w {
            if inside(x, y) {
                xs.insert(x);
                ys.insert(y);
                let mut best: Option<f64> = None;
                for &(dx, dy, b) in &t {
                    let v = combine(plane.get((x + sign * dx) as usize, (y + sign * dy) as usize), b);
                    if best.is_none_or(|cur| better(v, cur)) {
                        best = Some(v);
                    }
                }
                out.push(best.unwrap());
            }
        }
    }
    (xs.len(), ys.len(), out)
}

/// The map of Asplund's distances by enumerating every window and ratio.
/// Returns `(width, height, origin, values)`.
pub fn asplund_brute(image: &GreyImage, probe: &StructuringFunction) -> (usize, usize, (i32, i32), Vec<f64>) {
    let m = image.scale().m();
    let tl = |v: f64| (1.0 - v / m).ln();
    let cells: Vec<(usize, usize, f64)> = probe.cells().collect();
    let x0 = cells.iter().map(|c| c.0).min().unwrap();
    let x1 = cells.iter().map(|c| c.0).max().unwrap();
    let y0 = cells.iter().map(|c| c.1).min().unwrap();
    let y1 = cells.iter().map(|c| c.1).max().unwrap();
    let width = image.width() - (x1 - x0);
    let height = image.height() - (y1 - y0);
    let mut values = Vec::new();
    for j in 0..height {
        for i in 0..width {
            let (x, y) = (i as isize - x0 as isize, j as isize - y0 as isize);
            let ratios: Vec<f64> = cells
                .iter()
                .map(|&(cx, cy, b)| tl(image.get((x + cx as isize) as usize, (y + cy as isize) as usize)) / tl(b))
                .collect();
            let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
            let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
            values.push((hi / lo).ln());
        }
    }
    (width, height, (-(x0 as i32), -(y0 as i32)), values)
}

pub fn random_image(rng: &mut impl Rng, w: usize, h: usize, scale: LipScale, lo: f64, hi: f64) -> GreyImage {
    GreyImage::from_fn(w, h, scale, |_, _| rng.gen_range(lo..hi)).unwrap()
}

pub fn random_int_image(rng: &mut impl Rng, w: usize, h: usize, scale: LipScale, lo: u32, hi: u32) -> GreyImage {
    GreyImage::from_fn(w, h, scale, |_, _| f64::from(rng.gen_range(lo..=hi))).unwrap()
}

/// A probe with a random mask (at least one active cell) or full support.
pub fn random_probe(rng: &mut impl Rng, w: usize, h: usize, scale: LipScale, masked: bool) -> StructuringFunction {
    let img = random_int_image(rng, w, h, scale, 1, scale.m() as u32 - 1);
    if !masked {
        return StructuringFunction::from_image(&img);
    }
    let mut active: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.6)).collect();
    let k = rng.gen_range(0..w * h);
    active[k] = true;
    StructuringFunction::new(w, h, scale, img.pixels().to_vec(), active).unwrap()
}

pub fn random_plane(rng: &mut impl Rng, w: usize, h: usize) -> RealPlane {
    RealPlane::from_fn(w, h, |_, _| rng.gen_range(-10.0..10.0)).unwrap()
}

pub fn random_sf(rng: &mut impl Rng, max_w: usize, max_h: usize) -> AdditiveSF {
    let (w, h) = (rng.gen_range(1..=max_w), rng.gen_range(1..=max_h));
    let values = (0..w * h).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let mut active: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.7)).collect();
    let k = rng.gen_range(0..w * h);
    active[k] = true;
    let anchor = (rng.gen_range(0..w), rng.gen_range(0..h));
    AdditiveSF::new(w, h, values, active)
        .unwrap()
        .with_anchor(anchor)
        .unwrap()
}
