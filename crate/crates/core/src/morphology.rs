//! Grey-scale dilation and erosion over real-valued planes.
//!
//! Additive forms:
//!
//! ```text
//! dilation  (f ⊕ B)(x) = max_h { f(x − h) + B(h) }
//! erosion   (f ⊖ B)(x) = min_h { f(x + h) − B(h) }
//! ```
//!
//! and the multiplicative forms with `·` and `/` in place of `+` and `−`. `h`
//! ranges over the active cells of the structuring function, measured from its
//! anchor.
//!
//! Two engines compute these. The naive engine scans every active cell for
//! every output pixel. The flat engine handles constant-valued rectangular
//! structuring functions with the van Herk/Gil–Werman prefix/suffix scheme,
//! separably along rows then columns, at a per-pixel cost independent of the
//! window size. Both only compare and copy samples, and both order values with
//! [`f64::total_cmp`], so their outputs are bit-identical.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A real-valued raster, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPlane {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl RealPlane {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(values.len()) {
            return Err(Error::Size(format!(
                "plane of {width}x{height} cannot hold {} values",
                values.len()
            )));
        }
        Ok(RealPlane { width, height, values })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        RealPlane::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealPlane {
        RealPlane {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two planes of equal shape.
    pub fn zip_with(&self, other: &RealPlane, f: impl Fn(f64, f64) -> f64) -> Result<RealPlane> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(Error::Size(format!(
                "planes differ in shape: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(RealPlane {
            width: self.width,
            height: self.height,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Surrounds the plane with a constant border.
    pub fn pad(&self, left: usize, top: usize, right: usize, bottom: usize, fill: f64) -> RealPlane {
        let width = self.width + left + right;
        let height = self.height + top + bottom;
        let mut values = vec![fill; width * height];
        for y in 0..self.height {
            let dst = (y + top) * width + left;
            values[dst..dst + self.width].copy_from_slice(&self.values[y * self.width..(y + 1) * self.width]);
        }
        RealPlane { width, height, values }
    }

    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<RealPlane> {
        if x0 + width > self.width || y0 + height > self.height {
            return Err(Error::Size(format!(
                "window {width}x{height} at ({x0}, {y0}) exceeds plane {}x{}",
                self.width, self.height
            )));
        }
        RealPlane::from_fn(width, height, |x, y| self.get(x0 + x, y0 + y))
    }
}

/// A structuring function with unconstrained real values.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveSF {
    width: usize,
    height: usize,
    values: Vec<f64>,
    active: Vec<bool>,
    anchor: (usize, usize),
}

impl AdditiveSF {
    /// Anchored at the top-left cell.
    pub fn new(width: usize, height: usize, values: Vec<f64>, active: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(values.len()) || values.len() != active.len()
        {
            return Err(Error::Size(format!(
                "structuring function of {width}x{height} with {} values and {} mask cells",
                values.len(),
                active.len()
            )));
        }
        if !active.iter().any(|&a| a) {
            return Err(Error::validation("structuring function has no active cell", None));
        }
        if let Some(i) = (0..values.len()).find(|&i| active[i] && !values[i].is_finite()) {
            return Err(Error::validation(
                "structuring function value is not finite",
                Some((i % width, i / width)),
            ));
        }
        Ok(AdditiveSF {
            width,
            height,
            values,
            active,
            anchor: (0, 0),
        })
    }

    /// A full rectangle of constant value.
    pub fn flat(width: usize, height: usize, value: f64) -> Result<Self> {
        AdditiveSF::new(width, height, vec![value; width * height], vec![true; width * height])
    }

    pub fn full(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        AdditiveSF::new(width, height, values, vec![true; n])
    }

    pub fn with_anchor(mut self, anchor: (usize, usize)) -> Result<Self> {
        if anchor.0 >= self.width || anchor.1 >= self.height {
            return Err(Error::Size(format!(
                "anchor {anchor:?} outside {}x{} structuring function",
                self.width, self.height
            )));
        }
        self.anchor = anchor;
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    /// Active cells as `(dx, dy, value)`, offsets relative to the anchor.
    pub fn offsets(&self) -> impl Iterator<Item = (isize, isize, f64)> + '_ {
        let (ax, ay) = (self.anchor.0 as isize, self.anchor.1 as isize);
        (0..self.values.len()).filter(|&i| self.active[i]).map(move |i| {
            (
                (i % self.width) as isize - ax,
                (i / self.width) as isize - ay,
                self.values[i],
            )
        })
    }

    /// The active value, if every active cell carries the same one.
    pub fn flat_value(&self) -> Option<f64> {
        let mut it = self.offsets().map(|(_, _, v)| v);
        let first = it.next()?;
        it.all(|v| v.to_bits() == first.to_bits()).then_some(first)
    }

    pub fn is_full(&self) -> bool {
        self.active.iter().all(|&a| a)
    }

    /// Inclusive offset range `(min_dx, min_dy, max_dx, max_dy)` of the active cells.
    pub fn offset_bounds(&self) -> (isize, isize, isize, isize) {
        self.offsets().fold(
            (isize::MAX, isize::MAX, isize::MIN, isize::MIN),
            |(a, b, c, d), (dx, dy, _)| (a.min(dx), b.min(dy), c.max(dx), d.max(dy)),
        )
    }
}

/// Point reflection through the anchor, `B̄(h) = B(−h)`.
pub fn reflect(sf: &AdditiveSF) -> AdditiveSF {
    AdditiveSF {
        width: sf.width,
        height: sf.height,
        // a row-major raster rotated by 180° is the reversed sequence
        values: sf.values.iter().rev().copied().collect(),
        active: sf.active.iter().rev().copied().collect(),
        anchor: (sf.width - 1 - sf.anchor.0, sf.height - 1 - sf.anchor.1),
    }
}

/// `−B` on the active cells.
pub fn negate(sf: &AdditiveSF) -> AdditiveSF {
    AdditiveSF {
        values: sf
            .values
            .iter()
            .zip(&sf.active)
            .map(|(&v, &a)| if a { -v } else { v })
            .collect(),
        ..sf.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BorderPolicy {
    /// Output only where every sample lies inside the plane.
    #[default]
    Valid,
    /// Same-size output; samples outside the plane take the nearest edge value.
    Replicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

impl Extremum {
    #[inline]
    fn pick(self, a: f64, b: f64) -> f64 {
        let wanted = match self {
            Extremum::Max => Ordering::Greater,
            Extremum::Min => Ordering::Less,
        };
        if b.total_cmp(&a) == wanted {
            b
        } else {
            a
        }
    }
}

/// Which engine evaluates a dilation or erosion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Flat engine for flat full-rectangle structuring functions, naive otherwise.
    #[default]
    Auto,
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    /// samples at `x − h`, maximum
    Dilate,
    /// samples at `x + h`, minimum
    Erode,
}

impl Op {
    fn extremum(self) -> Extremum {
        match self {
            Op::Dilate => Extremum::Max,
            Op::Erode => Extremum::Min,
        }
    }
}

/// Output geometry: the plane coordinate of output cell `(0, 0)` and the output size.
#[derive(Debug, Clone, Copy)]
struct Frame {
    origin: (isize, isize),
    width: usize,
    height: usize,
}

fn frame(plane: &RealPlane, sf: &AdditiveSF, op: Op, border: BorderPolicy) -> Result<Frame> {
    match border {
        BorderPolicy::Replicate => Ok(Frame {
            origin: (0, 0),
            width: plane.width,
            height: plane.height,
        }),
        BorderPolicy::Valid => {
            let (x0, y0, x1, y1) = sf.offset_bounds();
            let (span_w, span_h) = ((x1 - x0 + 1) as usize, (y1 - y0 + 1) as usize);
            if span_w > plane.width || span_h > plane.height {
                return Err(Error::Size(format!(
                    "structuring function support {span_w}x{span_h} does not fit in plane {}x{}",
                    plane.width, plane.height
                )));
            }
            let origin = match op {
                Op::Dilate => (x1, y1),
                Op::Erode => (-x0, -y0),
            };
            Ok(Frame {
                origin,
                width: plane.width - span_w + 1,
                height: plane.height - span_h + 1,
            })
        }
    }
}

/// Plane coordinate of output cell `(0, 0)` for a valid-mode dilation.
pub fn dilation_valid_origin(sf: &AdditiveSF) -> (isize, isize) {
    let (_, _, x1, y1) = sf.offset_bounds();
    (x1, y1)
}

/// Plane coordinate of output cell `(0, 0)` for a valid-mode erosion.
pub fn erosion_valid_origin(sf: &AdditiveSF) -> (isize, isize) {
    let (x0, y0, _, _) = sf.offset_bounds();
    (-x0, -y0)
}

fn naive(
    plane: &RealPlane,
    sf: &AdditiveSF,
    op: Op,
    border: BorderPolicy,
    combine: impl Fn(f64, f64) -> f64,
) -> Result<RealPlane> {
    let fr = frame(plane, sf, op, border)?;
    let kind = op.extremum();
    // sample position relative to x for each active cell
    let taps: Vec<(isize, isize, f64)> = sf
        .offsets()
        .map(|(dx, dy, v)| match op {
            Op::Dilate => (-dx, -dy, v),
            Op::Erode => (dx, dy, v),
        })
        .collect();
    let (pw, ph) = (plane.width as isize, plane.height as isize);

    let mut out = Vec::with_capacity(fr.width * fr.height);
    for j in 0..fr.height {
        let y = j as isize + fr.origin.1;
        for i in 0..fr.width {
            let x = i as isize + fr.origin.0;
            let mut acc: Option<f64> = None;
            for &(sx, sy, b) in &taps {
                let (mut px, mut py) = (x + sx, y + sy);
                if border == BorderPolicy::Replicate {
                    px = px.clamp(0, pw - 1);
                    py = py.clamp(0, ph - 1);
                }
                let v = combine(plane.values[(py * pw + px) as usize], b);
                acc = Some(match acc {
                    None => v,
                    Some(a) => kind.pick(a, v),
                });
            }
            out.push(acc.expect("structuring function has an active cell"));
        }
    }
    RealPlane::new(fr.width, fr.height, out)
}

/// Sliding extremum of width `window` over `src`, where output `i` covers
/// `src[i + lead ..= i + lead + window − 1]` with indices clamped to `src`.
fn sliding_line(src: &[f64], window: usize, lead: isize, out: &mut [f64], kind: Extremum, scratch: &mut Scratch) {
    let len = out.len() + window - 1;
    let last = src.len() as isize - 1;
    scratch.ext.clear();
    scratch
        .ext
        .extend((0..len).map(|j| src[(j as isize + lead).clamp(0, last) as usize]));
    let ext = &scratch.ext;
    let prefix = &mut scratch.prefix;
    let suffix = &mut scratch.suffix;
    prefix.resize(len, 0.0);
    suffix.resize(len, 0.0);

    for start in (0..len).step_by(window) {
        let end = (start + window).min(len);
        prefix[start] = ext[start];
        for j in start + 1..end {
            prefix[j] = kind.pick(prefix[j - 1], ext[j]);
        }
        suffix[end - 1] = ext[end - 1];
        for j in (start..end - 1).rev() {
            suffix[j] = kind.pick(suffix[j + 1], ext[j]);
        }
    }
    for (i, o) in out.iter_mut().enumerate() {
        *o = kind.pick(suffix[i], prefix[i + window - 1]);
    }
}

#[derive(Default)]
struct Scratch {
    ext: Vec<f64>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
}

/// Separable rectangular sliding extremum. `lead` is the offset from an
/// output coordinate to the first sample of its window.
fn rect_extremum(
    plane: &RealPlane,
    window: (usize, usize),
    lead: (isize, isize),
    out_size: (usize, usize),
    kind: Extremum,
) -> RealPlane {
    let (ow, oh) = out_size;
    let mut scratch = Scratch::default();

    let mut rows = vec![0.0; ow * plane.height];
    for (y, row_out) in rows.chunks_exact_mut(ow).enumerate() {
        let row = &plane.values[y * plane.width..(y + 1) * plane.width];
        sliding_line(row, window.0, lead.0, row_out, kind, &mut scratch);
    }

    let mut out = vec![0.0; ow * oh];
    let mut column = vec![0.0; plane.height];
    let mut col_out = vec![0.0; oh];
    for x in 0..ow {
        for (y, c) in column.iter_mut().enumerate() {
            *c = rows[y * ow + x];
        }
        sliding_line(&column, window.1, lead.1, &mut col_out, kind, &mut scratch);
        for (y, &v) in col_out.iter().enumerate() {
            out[y * ow + x] = v;
        }
    }
    RealPlane {
        width: ow,
        height: oh,
        values: out,
    }
}

/// Flat-engine evaluation; `None` when the structuring function is not a flat full rectangle.
fn flat(
    plane: &RealPlane,
    sf: &AdditiveSF,
    op: Op,
    border: BorderPolicy,
    combine: impl Fn(f64, f64) -> f64,
) -> Option<Result<RealPlane>> {
    if !sf.is_full() {
        return None;
    }
    let c = sf.flat_value()?;
    let fr = match frame(plane, sf, op, border) {
        Ok(fr) => fr,
        Err(e) => return Some(Err(e)),
    };
    // window of output x starts at x − max_h (dilation) or x + min_h (erosion)
    let (x0, y0, x1, y1) = sf.offset_bounds();
    let first = match op {
        Op::Dilate => (-x1, -y1),
        Op::Erode => (x0, y0),
    };
    let lead = (fr.origin.0 + first.0, fr.origin.1 + first.1);
    let raw = rect_extremum(plane, (sf.width, sf.height), lead, (fr.width, fr.height), op.extremum());
    // combine(·, c) is monotone, so it commutes with the extremum
    Some(Ok(raw.map(|v| combine(v, c))))
}

fn run(
    plane: &RealPlane,
    sf: &AdditiveSF,
    op: Op,
    border: BorderPolicy,
    engine: Engine,
    combine: impl Fn(f64, f64) -> f64 + Copy,
) -> Result<RealPlane> {
    if engine == Engine::Auto {
        if let Some(result) = flat(plane, sf, op, border, combine) {
            return result;
        }
    }
    naive(plane, sf, op, border, combine)
}

fn require_positive(values: &[f64], active: Option<&[bool]>, what: &str) -> Result<()> {
    let bad = values
        .iter()
        .enumerate()
        .find(|&(i, &v)| active.is_none_or(|a| a[i]) && (v.is_nan() || v <= 0.0));
    match bad {
        Some((_, v)) => Err(Error::Domain(format!(
            "multiplicative morphology needs strictly positive {what}, found {v}"
        ))),
        None => Ok(()),
    }
}

/// `max_h { f(x − h) + B(h) }`.
pub fn dilate_add(plane: &RealPlane, sf: &AdditiveSF, border: BorderPolicy) -> Result<RealPlane> {
    dilate_add_with(plane, sf, border, Engine::Auto)
}

pub fn dilate_add_with(plane: &RealPlane, sf: &AdditiveSF, border: BorderPolicy, engine: Engine) -> Result<RealPlane> {
    run(plane, sf, Op::Dilate, border, engine, |s, b| s + b)
}

/// `min_h { f(x + h) − B(h) }`.
pub fn erode_add(plane: &RealPlane, sf: &AdditiveSF, border: BorderPolicy) -> Result<RealPlane> {
    erode_add_with(plane, sf, border, Engine::Auto)
}

pub fn erode_add_with(plane: &RealPlane, sf: &AdditiveSF, border: BorderPolicy, engine: Engine) -> Result<RealPlane> {
    run(plane, sf, Op::Erode, border, engine, |s, b| s - b)
}

/// `max_h { f(x − h) · B(h) }` for strictly positive plane and structuring function.
pub fn dilate_mult(plane: &RealPlane, sf: &AdditiveSF, border: BorderPolicy) -> Result<RealPlane> {
    require_positive(&plane.values, None, "plane values")?;
    require_positive(&sf.values, Some(&sf.active), "structuring function values")?;
    run(plane, sf, Op::Dilate, border, Engine::Auto, |s, b| s * b)
}

/// `min_h { f(x + h) / B(h) }` for strictly positive plane and structuring function.
pub fn erode_mult(plane: &RealPlane, sf: &AdditiveSF, border: BorderPolicy) -> Result<RealPlane> {
    require_positive(&plane.values, None, "plane values")?;
    require_positive(&sf.values, Some(&sf.active), "structuring function values")?;
    run(plane, sf, Op::Erode, border, Engine::Auto, |s, b| s / b)
}

/// Sliding maximum or minimum over a `window_w`×`window_h` rectangle anchored
/// at its top-left cell.
///
/// Equal bit for bit to [`dilate_add`] (for `Max`) or [`erode_add`] (for
/// `Min`) with an all-zero rectangular structuring function.
pub fn sliding_extremum_flat(
    plane: &RealPlane,
    window_w: usize,
    window_h: usize,
    kind: Extremum,
    border: BorderPolicy,
) -> Result<RealPlane> {
    if window_w == 0 || window_h == 0 {
        return Err(Error::Size(format!(
            "window must be at least 1x1, got {window_w}x{window_h}"
        )));
    }
    let sf = AdditiveSF::flat(window_w, window_h, 0.0)?;
    let (op, combine): (Op, fn(f64, f64) -> f64) = match kind {
        Extremum::Max => (Op::Dilate, |s, b| s + b),
        Extremum::Min => (Op::Erode, |s, b| s - b),
    };
    flat(plane, &sf, op, border, combine).expect("flat full window")
}
