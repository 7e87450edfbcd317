//! The logarithmic image processing (LIP) grey-scale model.
//!
//! Grey levels live in the open interval `(0, M)`. The isomorphism
//! `f ↦ ln(1 − f/M)` (here [`tilde`]) maps the LIP scalar multiplication onto
//! ordinary multiplication of negative reals, and [`hat`] takes one more
//! logarithm so that LIP ratios become differences.

use crate::error::{Error, Result};
use crate::image::GreyImage;

/// Upper bound `M` of the grey scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipScale {
    m: f64,
}

impl LipScale {
    pub fn new(m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Domain(format!(
                "grey-scale bound must be a positive real, got {m}"
            )));
        }
        Ok(LipScale { m })
    }

    /// Scale for integer data with the given maximum sample value (`M = maxval + 1`).
    pub fn from_maxval(maxval: u32) -> Result<Self> {
        LipScale::new(f64::from(maxval) + 1.0)
    }

    /// 8-bit data, `M = 256`.
    pub fn eight_bit() -> Self {
        LipScale { m: 256.0 }
    }

    #[inline]
    pub fn m(&self) -> f64 {
        self.m
    }

    #[inline]
    pub fn contains(&self, value: f64) -> bool {
        value > 0.0 && value < self.m
    }

    fn check(&self, value: f64) -> Result<()> {
        if self.contains(value) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "grey level {value} outside the open interval (0, {})",
                self.m
            )))
        }
    }
}

/// `ln(1 − value/M)`, strictly negative and decreasing on `(0, M)`.
#[inline]
pub fn tilde(value: f64, scale: LipScale) -> Result<f64> {
    scale.check(value)?;
    Ok((-value / scale.m).ln_1p())
}

/// Inverse of [`tilde`]: `M·(1 − eᵗ)`.
#[inline]
pub fn tilde_inv(t: f64, scale: LipScale) -> Result<f64> {
    if t.is_nan() || t > 0.0 {
        return Err(Error::Domain(format!("tilde value must be non-positive, got {t}")));
    }
    Ok(-scale.m * t.exp_m1())
}

/// `ln(−ln(1 − value/M))`, strictly increasing on `(0, M)`.
#[inline]
pub fn hat(value: f64, scale: LipScale) -> Result<f64> {
    Ok((-tilde(value, scale)?).ln())
}

/// LIP scalar multiplication `α ⊗ f = M − M(1 − f/M)^α`.
pub fn lip_mul(alpha: f64, value: f64, scale: LipScale) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("LIP multiplier must be positive, got {alpha}")));
    }
    let t = tilde(value, scale)?;
    tilde_inv(alpha * t, scale)
}

/// LIP addition `f ⨹ g = f + g − fg/M`.
///
/// Part of the model for completeness; the Asplund computations do not use it.
pub fn lip_add(a: f64, b: f64, scale: LipScale) -> f64 {
    a + b - a * b / scale.m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SanitationMode {
    /// Pull out-of-range values into `[clamp_low, clamp_high]`.
    Clamp,
    /// Reject any value outside `(0, M)`.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SanitationPolicy {
    pub mode: SanitationMode,
    pub clamp_low: f64,
    pub clamp_high: f64,
}

impl SanitationPolicy {
    /// Clamp into `[1, M − 1]`, i.e. `[1, maxval]` for integer data.
    pub fn clamp(scale: LipScale) -> Self {
        SanitationPolicy {
            mode: SanitationMode::Clamp,
            clamp_low: 1.0,
            clamp_high: scale.m() - 1.0,
        }
    }

    pub fn strict(scale: LipScale) -> Self {
        SanitationPolicy {
            mode: SanitationMode::Strict,
            ..SanitationPolicy::clamp(scale)
        }
    }

    fn validate(&self, scale: LipScale) -> Result<()> {
        let ok = 0.0 < self.clamp_low && self.clamp_low <= self.clamp_high && self.clamp_high < scale.m();
        if ok {
            Ok(())
        } else {
            Err(Error::validation(
                format!(
                    "clamp bounds [{}, {}] must satisfy 0 < low <= high < M = {}",
                    self.clamp_low,
                    self.clamp_high,
                    scale.m()
                ),
                None,
            ))
        }
    }
}

/// Brings an image into `(0, M)` according to `policy`.
///
/// Returns the sanitized image and the number of pixels that were changed.
pub fn sanitize(image: &GreyImage, policy: &SanitationPolicy) -> Result<(GreyImage, usize)> {
    let scale = image.scale();
    let width = image.width();
    let coord = |i: usize| (i % width, i / width);

    if let Some(i) = image.pixels().iter().position(|v| !v.is_finite()) {
        return Err(Error::validation("non-finite pixel value", Some(coord(i))));
    }

    match policy.mode {
        SanitationMode::Strict => {
            if let Some(i) = image.pixels().iter().position(|&v| !scale.contains(v)) {
                return Err(Error::validation(
                    format!("pixel value {} outside (0, {})", image.pixels()[i], scale.m()),
                    Some(coord(i)),
                ));
            }
            Ok((image.clone(), 0))
        }
        SanitationMode::Clamp => {
            policy.validate(scale)?;
            let mut count = 0;
            let pixels = image
                .pixels()
                .iter()
                .map(|&v| {
                    let c = v.clamp(policy.clamp_low, policy.clamp_high);
                    if c != v {
                        count += 1;
                    }
                    c
                })
                .collect();
            Ok((GreyImage::new(image.width(), image.height(), scale, pixels)?, count))
        }
    }
}
