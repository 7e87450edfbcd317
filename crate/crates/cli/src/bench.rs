//! Timing harness comparing the ratio form with the gradient form.

use std::time::Instant;

use lipmorph::{asplund_direct, asplund_gradient_with, Engine, GreyImage, LipScale, StructuringFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchMethod {
    Direct,
    GradientNaive,
    GradientFast,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub windows: Vec<usize>,
    pub reps: usize,
    pub flat_probe: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub image_size: usize,
    pub window: usize,
    pub method: BenchMethod,
    pub median_ms: f64,
    #[serde(skip)]
    pub output_pixels: usize,
}

impl BenchRow {
    pub fn ns_per_pixel(&self) -> f64 {
        self.median_ms * 1e6 / self.output_pixels as f64
    }
}

/// Random 8-bit image (greys 1..=255) and a `window`×`window` probe, both
/// derived from `seed` alone.
pub fn bench_inputs(size: usize, window: usize, flat_probe: bool, seed: u64) -> (GreyImage, StructuringFunction) {
    let scale = LipScale::eight_bit();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let image = GreyImage::from_fn(size, size, scale, |_, _| f64::from(rng.gen_range(1u8..=255))).unwrap();
    let mut probe_rng = ChaCha8Rng::seed_from_u64(seed ^ (window as u64).rotate_left(32));
    let probe = GreyImage::from_fn(window, window, scale, |_, _| {
        if flat_probe {
            128.0
        } else {
            f64::from(probe_rng.gen_range(1u8..=255))
        }
    })
    .unwrap();
    (image, StructuringFunction::from_image(&probe))
}

/// Median wall time in milliseconds over `reps` runs, after one warm-up run.
pub fn time_median<T>(reps: usize, mut f: impl FnMut() -> T) -> f64 {
    std::hint::black_box(f());
    let mut times: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    times.sort_by(f64::total_cmp);
    let n = times.len();
    if n % 2 == 1 {
        times[n / 2]
    } else {
        (times[n / 2 - 1] + times[n / 2]) / 2.0
    }
}

pub fn run_bench(config: &BenchConfig) -> lipmorph::Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &size in &config.sizes {
        for &window in &config.windows {
            let (image, probe) = bench_inputs(size, window, config.flat_probe, config.seed);
            // surface size errors before timing
            let map = asplund_direct(&image, &probe)?;
            let output_pixels = map.width * map.height;

            let mut methods = vec![BenchMethod::Direct, BenchMethod::GradientNaive];
            if config.flat_probe {
                methods.push(BenchMethod::GradientFast);
            }
            for method in methods {
                let median_ms = match method {
                    BenchMethod::Direct => time_median(config.reps, || asplund_direct(&image, &probe)),
                    BenchMethod::GradientNaive => {
                        time_median(config.reps, || asplund_gradient_with(&image, &probe, Engine::Naive))
                    }
                    BenchMethod::GradientFast => {
                        time_median(config.reps, || asplund_gradient_with(&image, &probe, Engine::Auto))
                    }
                };
                rows.push(BenchRow {
                    image_size: size,
                    window,
                    method,
                    median_ms,
                    output_pixels,
                });
            }
        }
    }
    Ok(rows)
}
