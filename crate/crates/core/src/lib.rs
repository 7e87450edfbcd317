//! Grey-level morphology under the logarithmic image processing (LIP) model,
//! centred on maps of Asplund's distances with the LIP multiplication.
//!
//! A map of Asplund's distances compares every window of an image with a
//! probe while ignoring LIP scalings, which model changes of illumination or
//! exposure. [`asplund::asplund_direct`] computes it from the ratio of the
//! two tightest scalings; [`asplund::asplund_gradient`] computes the same map
//! as a morphological gradient on the doubly-logarithmic plane
//! `f̂ = ln(−ln(1 − f/M))`, which for flat probes reduces to a
//! window-size-independent range filter.

pub mod asplund;
pub mod error;
pub mod image;
pub mod lip;
pub mod morphology;

pub use asplund::{
    asplund_direct, asplund_gradient, asplund_gradient_with, lambda_map, lambda_via_mult_dilation, match_threshold,
    mu_map, mu_via_mult_erosion, AsplundOutcome, AsplundRequest, Match, Method,
};
pub use error::{Error, Result};
pub use image::{
    quantize_map, read_map, read_pgm, write_map, write_pgm, DistanceMap, GreyImage, MapMethod, PgmVariant,
    StructuringFunction,
};
pub use lip::{hat, lip_add, lip_mul, sanitize, tilde, tilde_inv, LipScale, SanitationMode, SanitationPolicy};
pub use morphology::{
    dilate_add, dilate_mult, erode_add, erode_mult, negate, reflect, sliding_extremum_flat, AdditiveSF, BorderPolicy,
    Engine, Extremum, RealPlane,
};
