mod common;

use common::{random_plane, random_sf, scan_replicate, scan_valid};
use lipmorph::morphology::{dilate_add_with, dilation_valid_origin, erode_add_with, erosion_valid_origin};
use lipmorph::{
    dilate_add, dilate_mult, erode_add, erode_mult, reflect, sliding_extremum_flat, AdditiveSF, BorderPolicy, Engine,
    Extremum, RealPlane,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn add(a: f64, b: f64) -> f64 {
    a + b
}
fn sub(a: f64, b: f64) -> f64 {
    a - b
}
fn gt(a: f64, b: f64) -> bool {
    a > b
}
fn lt(a: f64, b: f64) -> bool {
    a < b
}

#[test]
fn engines_agree_with_window_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..60 {
        let (w, h) = (rng.gen_range(4..12), rng.gen_range(4..12));
        let f = random_plane(&mut rng, w, h);
        let sf = random_sf(&mut rng, 4, 4);
        for engine in [Engine::Auto, Engine::Naive] {
            let d = dilate_add_with(&f, &sf, BorderPolicy::Replicate, engine).unwrap();
            assert_eq!(d.values(), scan_replicate(&f, &sf, -1, add, gt).as_slice());
            let e = erode_add_with(&f, &sf, BorderPolicy::Replicate, engine).unwrap();
            assert_eq!(e.values(), scan_replicate(&f, &sf, 1, sub, lt).as_slice());

            let d = dilate_add_with(&f, &sf, BorderPolicy::Valid, engine).unwrap();
            let (w, h, v) = scan_valid(&f, &sf, -1, add, gt);
            assert_eq!((d.width(), d.height()), (w, h));
            assert_eq!(d.values(), v.as_slice());
            let e = erode_add_with(&f, &sf, BorderPolicy::Valid, engine).unwrap();
            let (w, h, v) = scan_valid(&f, &sf, 1, sub, lt);
            assert_eq!((e.width(), e.height()), (w, h));
            assert_eq!(e.values(), v.as_slice());
        }
    }
}

#[test]
fn fast_path_is_bit_identical_to_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let (w, h) = (rng.gen_range(1..40), rng.gen_range(1..40));
        let f = random_plane(&mut rng, w, h);
        let (ww, wh) = (rng.gen_range(1..=w), rng.gen_range(1..=h));
        let zero = AdditiveSF::flat(ww, wh, 0.0).unwrap();
        for border in [BorderPolicy::Valid, BorderPolicy::Replicate] {
            let fast = sliding_extremum_flat(&f, ww, wh, Extremum::Max, border).unwrap();
            let slow = dilate_add_with(&f, &zero, border, Engine::Naive).unwrap();
            assert_eq!(bits(&fast), bits(&slow));
            let fast = sliding_extremum_flat(&f, ww, wh, Extremum::Min, border).unwrap();
            let slow = erode_add_with(&f, &zero, border, Engine::Naive).unwrap();
            assert_eq!(bits(&fast), bits(&slow));
        }
    }
}

fn bits(p: &RealPlane) -> Vec<u64> {
    p.values().iter().map(|v| v.to_bits()).collect()
}

/// Dilation on the whole domain with the lattice convention: samples outside are −∞.
fn dilate_lattice(f: &RealPlane, sf: &AdditiveSF) -> RealPlane {
    let pad = sf.width().max(sf.height());
    let padded = f.pad(pad, pad, pad, pad, f64::NEG_INFINITY);
    let out = dilate_add(&padded, sf, BorderPolicy::Valid).unwrap();
    let (ox, oy) = dilation_valid_origin(sf);
    out.crop(
        (pad as isize - ox) as usize,
        (pad as isize - oy) as usize,
        f.width(),
        f.height(),
    )
    .unwrap()
}

/// Erosion on the whole domain with samples outside at +∞.
fn erode_lattice(g: &RealPlane, sf: &AdditiveSF) -> RealPlane {
    let pad = sf.width().max(sf.height());
    let padded = g.pad(pad, pad, pad, pad, f64::INFINITY);
    let out = erode_add(&padded, sf, BorderPolicy::Valid).unwrap();
    let (ox, oy) = erosion_valid_origin(sf);
    out.crop(
        (pad as isize - ox) as usize,
        (pad as isize - oy) as usize,
        g.width(),
        g.height(),
    )
    .unwrap()
}

fn le(a: &RealPlane, b: &RealPlane) -> bool {
    a.values().iter().zip(b.values()).all(|(x, y)| x <= y)
}

fn int_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> RealPlane {
    RealPlane::from_fn(w, h, |_, _| f64::from(rng.gen_range(-20..=20))).unwrap()
}

fn int_sf(rng: &mut ChaCha8Rng) -> AdditiveSF {
    let sf = random_sf(rng, 4, 4);
    let anchor = sf.anchor();
    let values = sf.values().iter().map(|v| v.round()).collect();
    AdditiveSF::new(sf.width(), sf.height(), values, sf.active().to_vec())
        .unwrap()
        .with_anchor(anchor)
        .unwrap()
}

#[test]
fn adjunction() {
    // integer-valued data keeps every sum and difference exact
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut both_true = 0;
    for case in 0..100 {
        let f = int_plane(&mut rng, 16, 16);
        let sf = int_sf(&mut rng);
        let df = dilate_lattice(&f, &sf);
        let g = match case % 4 {
            0 => int_plane(&mut rng, 16, 16),
            1 => df.clone(),
            2 => {
                let bumps: Vec<f64> = (0..256).map(|_| f64::from(rng.gen_range(0..3))).collect();
                let vals = df
                    .values()
                    .iter()
                    .zip(&bumps)
                    .map(|(&v, b)| if v.is_finite() { v + b } else { 0.0 });
                RealPlane::new(16, 16, vals.collect()).unwrap()
            }
            _ => {
                // break the inequality at one pixel
                let mut vals = df.map(|v| if v.is_finite() { v } else { 0.0 }).into_values();
                let k = rng.gen_range(0..vals.len());
                vals[k] -= 1.0;
                RealPlane::new(16, 16, vals).unwrap()
            }
        };
        let lhs = le(&dilate_lattice(&f, &sf), &g);
        let rhs = le(&f, &erode_lattice(&g, &sf));
        assert_eq!(lhs, rhs, "case {case}");
        both_true += usize::from(lhs);
    }
    assert!(both_true >= 40, "only {both_true} instances exercised the true side");
}

#[test]
fn duality_under_reflection() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let f = random_plane(&mut rng, 16, 16);
        let sf = random_sf(&mut rng, 5, 5);
        let e = erode_add(&f, &sf, BorderPolicy::Replicate).unwrap();
        let d = dilate_add(&f.map(|v| -v), &reflect(&sf), BorderPolicy::Replicate).unwrap();
        assert_eq!(e, d.map(|v| -v));
    }
}

#[test]
fn ordering_with_active_zero_anchor() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let f = random_plane(&mut rng, 12, 9);
        let sf = random_sf(&mut rng, 5, 5);
        let (ax, ay) = sf.anchor();
        let k = ay * sf.width() + ax;
        let mut values = sf.values().to_vec();
        let mut active = sf.active().to_vec();
        values[k] = 0.0;
        active[k] = true;
        let sf = AdditiveSF::new(sf.width(), sf.height(), values, active)
            .unwrap()
            .with_anchor((ax, ay))
            .unwrap();
        let bmax = sf.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let d = dilate_add(&f, &sf, BorderPolicy::Replicate).unwrap();
        let e = erode_add(&f, &sf, BorderPolicy::Replicate).unwrap();
        for i in 0..f.values().len() {
            assert!(d.values()[i] >= f.values()[i] - bmax);
            assert!(e.values()[i] <= d.values()[i]);
        }
    }
}

#[test]
fn translation_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..30 {
        let f = random_plane(&mut rng, 10, 8);
        let (dx, dy) = (rng.gen_range(0..5), rng.gen_range(0..5));
        let shifted = RealPlane::from_fn(10 + dx, 8 + dy, |x, y| {
            if x >= dx && y >= dy {
                f.get(x - dx, y - dy)
            } else {
                rng.gen_range(-10.0..10.0)
            }
        })
        .unwrap();
        let sf = random_sf(&mut rng, 3, 3);
        for op in [dilate_add, erode_add] {
            let a = op(&f, &sf, BorderPolicy::Valid).unwrap();
            let b = op(&shifted, &sf, BorderPolicy::Valid).unwrap();
            for y in 0..a.height() {
                for x in 0..a.width() {
                    assert_eq!(a.get(x, y), b.get(x + dx, y + dy));
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn multiplicative_matches_log_domain(
        seed in any::<u64>(),
        w in 3usize..10,
        h in 3usize..10,
        replicate in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = RealPlane::from_fn(w, h, |_, _| rng.gen_range(0.01..50.0)).unwrap();
        let sf = random_sf(&mut rng, 3, 3);
        let sf_pos = AdditiveSF::new(sf.width(), sf.height(), sf.values().iter().map(|v| v.exp()).collect(), sf.active().to_vec())
            .unwrap()
            .with_anchor(sf.anchor())
            .unwrap();
        let border = if replicate { BorderPolicy::Replicate } else { BorderPolicy::Valid };
        let ln_f = f.map(f64::ln);
        let ln_sf = AdditiveSF::new(sf.width(), sf.height(), sf_pos.values().iter().map(|v| v.ln()).collect(), sf.active().to_vec())
            .unwrap()
            .with_anchor(sf.anchor())
            .unwrap();

        let dm = dilate_mult(&f, &sf_pos, border).unwrap();
        let via_log = dilate_add(&ln_f, &ln_sf, border).unwrap().map(f64::exp);
        for (a, b) in dm.values().iter().zip(via_log.values()) {
            prop_assert!(((a - b) / b).abs() <= 1e-12);
        }
        let em = erode_mult(&f, &sf_pos, border).unwrap();
        let via_log = erode_add(&ln_f, &ln_sf, border).unwrap().map(f64::exp);
        for (a, b) in em.values().iter().zip(via_log.values()) {
            prop_assert!(((a - b) / b).abs() <= 1e-12);
        }
    }

    #[test]
    fn reflect_is_an_involution(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sf = random_sf(&mut rng, 6, 6);
        prop_assert_eq!(reflect(&reflect(&sf)), sf.clone());
        let mut a: Vec<_> = reflect(&sf).offsets().map(|(x, y, v)| (-x, -y, v.to_bits())).collect();
        let mut b: Vec<_> = sf.offsets().map(|(x, y, v)| (x, y, v.to_bits())).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }
}
