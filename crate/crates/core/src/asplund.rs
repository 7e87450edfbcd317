//! Maps of Asplund's distances under the LIP multiplication.
//!
//! For a window of the image at `x` and a probe `B`, the tightest LIP scalings
//! of the probe that bracket the window are
//!
//! ```text
//! λ(x) = max_h f̃(x + h) / B̃(h)      μ(x) = min_h f̃(x + h) / B̃(h)
//! ```
//!
//! and the distance is `ln(λ/μ)`. Taking one more logarithm, `f̂ = ln(−f̃)`,
//! turns every ratio into a difference, so the same map is the gradient
//! `δ_{−B̂̄} f̂ − ε_{B̂} f̂` of an additive dilation and erosion. [`asplund_direct`]
//! evaluates the ratio form and [`asplund_gradient`] the gradient form; for a
//! flat probe the latter is a local range filter on `f̂` and runs in constant
//! time per pixel.
//!
//! Maps cover the positions where every active probe cell lands inside the
//! image. The probe is anchored at its top-left cell, so for rectangular
//! probes map cell `(i, j)` is the window whose top-left corner is image pixel
//! `(i, j)`.

use crate::error::{Error, Result};
use crate::image::{DistanceMap, GreyImage, MapMethod, StructuringFunction};
use crate::lip::{self, LipScale, SanitationPolicy};
use crate::morphology::{self, AdditiveSF, BorderPolicy, Engine, RealPlane};

/// Largest accepted `|direct − gradient|` when both forms are computed.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Direct,
    Gradient,
    /// Compute both, check that they agree, return the gradient map.
    #[default]
    Both,
}

#[derive(Debug, Clone)]
pub struct AsplundRequest {
    pub image: GreyImage,
    pub probe: StructuringFunction,
    pub method: Method,
    pub border: BorderPolicy,
    pub sanitation: SanitationPolicy,
}

impl AsplundRequest {
    /// Gradient-and-direct request with valid borders and clamping sanitation.
    pub fn new(image: GreyImage, probe: StructuringFunction) -> Self {
        let sanitation = SanitationPolicy::clamp(image.scale());
        AsplundRequest {
            image,
            probe,
            method: Method::Both,
            border: BorderPolicy::Valid,
            sanitation,
        }
    }

    pub fn method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn run(&self) -> Result<AsplundOutcome> {
        if self.border != BorderPolicy::Valid {
            return Err(Error::validation(
                "Asplund maps are defined only where the probe fits; use valid borders",
                None,
            ));
        }
        if self.image.scale() != self.probe.scale() {
            return Err(Error::validation(
                format!(
                    "image and probe grey scales differ (M = {} vs {})",
                    self.image.scale().m(),
                    self.probe.scale().m()
                ),
                None,
            ));
        }
        let (image, image_clamped) = lip::sanitize(&self.image, &self.sanitation)?;
        let (probe, probe_clamped) = sanitize_probe(&self.probe, &self.sanitation)?;

        let (map, discrepancy) = match self.method {
            Method::Direct => (asplund_direct(&image, &probe)?, None),
            Method::Gradient => (asplund_gradient(&image, &probe)?, None),
            Method::Both => {
                let direct = asplund_direct(&image, &probe)?;
                let gradient = asplund_gradient(&image, &probe)?;
                let d = direct
                    .max_abs_diff(&gradient)
                    .expect("both forms cover the same region");
                if d.is_nan() || d > EQUIVALENCE_TOLERANCE {
                    return Err(Error::Equivalence {
                        discrepancy: d,
                        tolerance: EQUIVALENCE_TOLERANCE,
                    });
                }
                (gradient, Some(d))
            }
        };
        Ok(AsplundOutcome {
            map,
            clamped_pixels: image_clamped + probe_clamped,
            max_equiv_discrepancy: discrepancy,
        })
    }
}

#[derive(Debug, Clone)]
pub struct AsplundOutcome {
    pub map: DistanceMap,
    /// Image pixels plus active probe cells changed by sanitation.
    pub clamped_pixels: usize,
    /// `max |direct − gradient|`, present for [`Method::Both`].
    pub max_equiv_discrepancy: Option<f64>,
}

/// Sanitizes the active probe cells; inactive cells are left untouched.
pub fn sanitize_probe(probe: &StructuringFunction, policy: &SanitationPolicy) -> Result<(StructuringFunction, usize)> {
    let mid = probe.scale().m() / 2.0;
    let filled: Vec<f64> = probe
        .values()
        .iter()
        .zip(probe.active())
        .map(|(&v, &a)| if a { v } else { mid })
        .collect();
    let as_image = GreyImage::new(probe.width(), probe.height(), probe.scale(), filled)?;
    let (clean, count) = lip::sanitize(&as_image, policy)?;
    let values = clean
        .pixels()
        .iter()
        .zip(probe.values())
        .zip(probe.active())
        .map(|((&c, &orig), &a)| if a { c } else { orig })
        .collect();
    let sf = StructuringFunction::new(
        probe.width(),
        probe.height(),
        probe.scale(),
        values,
        probe.active().to_vec(),
    )?;
    Ok((sf, count))
}

fn transform_image(image: &GreyImage, f: fn(f64, LipScale) -> Result<f64>) -> Result<RealPlane> {
    let scale = image.scale();
    let values = image
        .pixels()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            f(v, scale).map_err(|_| {
                Error::validation(
                    format!("pixel value {v} outside (0, {}); sanitize first", scale.m()),
                    Some((i % image.width(), i / image.width())),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RealPlane::new(image.width(), image.height(), values)
}

/// `f̃ = ln(1 − f/M)` pixelwise.
pub fn tilde_plane(image: &GreyImage) -> Result<RealPlane> {
    transform_image(image, lip::tilde)
}

/// `f̂ = ln(−ln(1 − f/M))` pixelwise.
pub fn hat_plane(image: &GreyImage) -> Result<RealPlane> {
    transform_image(image, lip::hat)
}

/// The probe with `f` applied to its active values, as an additive structuring function.
fn transform_probe(probe: &StructuringFunction, f: impl Fn(f64) -> Result<f64>) -> Result<AdditiveSF> {
    let values = probe
        .values()
        .iter()
        .zip(probe.active())
        .enumerate()
        .map(|(i, (&v, &a))| {
            if !a {
                return Ok(0.0);
            }
            f(v).map_err(|_| {
                Error::validation(
                    format!("probe value {v} outside (0, {})", probe.scale().m()),
                    Some((i % probe.width(), i / probe.width())),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AdditiveSF::new(probe.width(), probe.height(), values, probe.active().to_vec())
}

/// Where the map lives inside the image.
#[derive(Debug, Clone, Copy)]
struct Region {
    /// image coordinate of map cell (0, 0)
    origin: (isize, isize),
    width: usize,
    height: usize,
}

fn region(image: &GreyImage, probe: &StructuringFunction) -> Result<Region> {
    let (x0, y0, x1, y1) = probe
        .cells()
        .fold((usize::MAX, usize::MAX, 0, 0), |(a, b, c, d), (x, y, _)| {
            (a.min(x), b.min(y), c.max(x), d.max(y))
        });
    let (span_w, span_h) = (x1 - x0 + 1, y1 - y0 + 1);
    if span_w > image.width() || span_h > image.height() {
        return Err(Error::Size(format!(
            "probe support {span_w}x{span_h} larger than image {}x{}",
            image.width(),
            image.height()
        )));
    }
    Ok(Region {
        origin: (-(x0 as isize), -(y0 as isize)),
        width: image.width() - span_w + 1,
        height: image.height() - span_h + 1,
    })
}

/// Evaluates `reduce` over the ratios `f̃(x + h) / B̃(h)` of every map cell.
fn ratio_scan<T>(
    image: &GreyImage,
    probe: &StructuringFunction,
    mut reduce: impl FnMut(&mut dyn Iterator<Item = f64>) -> T,
) -> Result<(Region, Vec<T>)> {
    let reg = region(image, probe)?;
    let tf = tilde_plane(image)?;
    let tb = transform_probe(probe, |v| lip::tilde(v, probe.scale()))?;
    let w = image.width() as isize;
    // flat index offset of each active cell from the map cell's image position
    let taps: Vec<(isize, f64)> = tb.offsets().map(|(dx, dy, t)| (dy * w + dx, t)).collect();
    let tf = tf.values();

    let mut out = Vec::with_capacity(reg.width * reg.height);
    for j in 0..reg.height {
        for i in 0..reg.width {
            let base = (j as isize + reg.origin.1) * w + i as isize + reg.origin.0;
            let mut ratios = taps.iter().map(|&(off, t)| tf[(base + off) as usize] / t);
            out.push(reduce(&mut ratios));
        }
    }
    Ok((reg, out))
}

fn fold_extremum(it: &mut dyn Iterator<Item = f64>, pick: fn(f64, f64) -> f64) -> f64 {
    let first = it.next().expect("probe has an active cell");
    it.fold(first, pick)
}

/// `λ(x) = max_h f̃(x + h) / B̃(h)`.
pub fn lambda_map(image: &GreyImage, probe: &StructuringFunction) -> Result<RealPlane> {
    let (reg, values) = ratio_scan(image, probe, |it| fold_extremum(it, f64::max))?;
    RealPlane::new(reg.width, reg.height, values)
}

/// `μ(x) = min_h f̃(x + h) / B̃(h)`.
pub fn mu_map(image: &GreyImage, probe: &StructuringFunction) -> Result<RealPlane> {
    let (reg, values) = ratio_scan(image, probe, |it| fold_extremum(it, f64::min))?;
    RealPlane::new(reg.width, reg.height, values)
}

/// `λ` and `μ` from a single scan.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMuPair {
    pub lambda: RealPlane,
    pub mu: RealPlane,
}

pub fn lambda_mu(image: &GreyImage, probe: &StructuringFunction) -> Result<LambdaMuPair> {
    let (reg, pairs) = ratio_scan(image, probe, |it| {
        let first = it.next().expect("probe has an active cell");
        it.fold((first, first), |(hi, lo), r| (hi.max(r), lo.min(r)))
    })?;
    let (lambda, mu): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(LambdaMuPair {
        lambda: RealPlane::new(reg.width, reg.height, lambda)?,
        mu: RealPlane::new(reg.width, reg.height, mu)?,
    })
}

fn to_map(reg: Region, values: Vec<f64>, method: MapMethod) -> Result<DistanceMap> {
    let coord = |v: isize| i32::try_from(v).map_err(|_| Error::Size(format!("map origin {v} does not fit in i32")));
    Ok(DistanceMap {
        width: reg.width,
        height: reg.height,
        origin: (coord(reg.origin.0)?, coord(reg.origin.1)?),
        values,
        method,
    })
}

/// The map as `ln(λ/μ)`. Inputs must already lie in `(0, M)`.
pub fn asplund_direct(image: &GreyImage, probe: &StructuringFunction) -> Result<DistanceMap> {
    let (reg, values) = ratio_scan(image, probe, |it| {
        let first = it.next().expect("probe has an active cell");
        let (hi, lo) = it.fold((first, first), |(hi, lo), r| (hi.max(r), lo.min(r)));
        (hi / lo).ln()
    })?;
    to_map(reg, values, MapMethod::Direct)
}

/// The map as the gradient `δ_{−B̂̄} f̂ − ε_{B̂} f̂`. Inputs must already lie in `(0, M)`.
pub fn asplund_gradient(image: &GreyImage, probe: &StructuringFunction) -> Result<DistanceMap> {
    asplund_gradient_with(image, probe, Engine::Auto)
}

/// [`asplund_gradient`] with an explicit morphology engine.
pub fn asplund_gradient_with(image: &GreyImage, probe: &StructuringFunction, engine: Engine) -> Result<DistanceMap> {
    let reg = region(image, probe)?;
    let f_hat = hat_plane(image)?;
    let b_hat = transform_probe(probe, |v| lip::hat(v, probe.scale()))?;
    let reflected = morphology::negate(&morphology::reflect(&b_hat));
    let dilated = morphology::dilate_add_with(&f_hat, &reflected, BorderPolicy::Valid, engine)?;
    let eroded = morphology::erode_add_with(&f_hat, &b_hat, BorderPolicy::Valid, engine)?;
    debug_assert_eq!(morphology::dilation_valid_origin(&reflected), reg.origin);
    debug_assert_eq!(morphology::erosion_valid_origin(&b_hat), reg.origin);
    let gradient = dilated.zip_with(&eroded, |d, e| d - e)?;
    to_map(reg, gradient.into_values(), MapMethod::Gradient)
}

/// Two further evaluations of `λ` or `μ`, through multiplicative and through
/// additive morphology.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPaths {
    /// `(−f̃) ⊕̇ (−1/B̃̄)` for `λ`, `(−f̃) ⊖̇ (−B̃)` for `μ`.
    pub multiplicative: RealPlane,
    /// `exp(f̂ ⊕ (−B̂̄))` for `λ`, `exp(f̂ ⊖ B̂)` for `μ`.
    pub additive: RealPlane,
}

impl ChainPaths {
    /// Largest relative deviation of either path from `reference`.
    pub fn max_relative_spread(&self, reference: &RealPlane) -> Result<f64> {
        let rel = |p: &RealPlane| -> Result<f64> {
            let d = p.zip_with(reference, |a, r| ((a - r) / r).abs())?;
            Ok(d.values().iter().copied().fold(0.0, f64::max))
        };
        Ok(rel(&self.multiplicative)?.max(rel(&self.additive)?))
    }
}

/// `λ` via `(−f̃) ⊕̇ (−1/B̃̄)` and via `exp(f̂ ⊕ (−B̂̄))`.
pub fn lambda_via_mult_dilation(image: &GreyImage, probe: &StructuringFunction) -> Result<ChainPaths> {
    region(image, probe)?;
    let scale = probe.scale();
    let neg_tf = tilde_plane(image)?.map(|t| -t);
    let recip = transform_probe(probe, |v| Ok(-1.0 / lip::tilde(v, scale)?))?;
    let multiplicative = morphology::dilate_mult(&neg_tf, &morphology::reflect(&recip), BorderPolicy::Valid)?;

    let f_hat = hat_plane(image)?;
    let b_hat = transform_probe(probe, |v| lip::hat(v, scale))?;
    let reflected = morphology::negate(&morphology::reflect(&b_hat));
    let additive = morphology::dilate_add(&f_hat, &reflected, BorderPolicy::Valid)?.map(f64::exp);
    Ok(ChainPaths {
        multiplicative,
        additive,
    })
}

/// `μ` via `(−f̃) ⊖̇ (−B̃)` and via `exp(f̂ ⊖ B̂)`.
pub fn mu_via_mult_erosion(image: &GreyImage, probe: &StructuringFunction) -> Result<ChainPaths> {
    region(image, probe)?;
    let scale = probe.scale();
    let neg_tf = tilde_plane(image)?.map(|t| -t);
    let neg_tb = transform_probe(probe, |v| Ok(-lip::tilde(v, scale)?))?;
    let multiplicative = morphology::erode_mult(&neg_tf, &neg_tb, BorderPolicy::Valid)?;

    let f_hat = hat_plane(image)?;
    let b_hat = transform_probe(probe, |v| lip::hat(v, scale))?;
    let additive = morphology::erode_add(&f_hat, &b_hat, BorderPolicy::Valid)?.map(f64::exp);
    Ok(ChainPaths {
        multiplicative,
        additive,
    })
}

/// A map position, in source-image coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub x: i32,
    pub y: i32,
    pub distance: f64,
}

/// Positions whose distance is at most `threshold`, closest first, ties in raster order.
pub fn match_threshold(map: &DistanceMap, threshold: f64) -> Result<Vec<Match>> {
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(Error::Domain(format!(
            "threshold must be a non-negative real, got {threshold}"
        )));
    }
    let mut found: Vec<(usize, Match)> = map
        .values
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v <= threshold)
        .map(|(i, &v)| {
            (
                i,
                Match {
                    x: (i % map.width) as i32 + map.origin.0,
                    y: (i / map.width) as i32 + map.origin.1,
                    distance: v,
                },
            )
        })
        .collect();
    found.sort_by(|a, b| a.1.distance.total_cmp(&b.1.distance).then(a.0.cmp(&b.0)));
    Ok(found.into_iter().map(|(_, m)| m).collect())
}
