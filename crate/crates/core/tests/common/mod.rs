#![allow(dead_code)]

use chermite_core::kernels::{ClassicalParams, MehlerParams, MixedParams, MultilinearParams};
use chermite_core::ComplexValue;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the closed disk of radius `r`.
pub fn in_disk(rng: &mut ChaCha8Rng, r: f64) -> ComplexValue {
    let rho = r * rng.random_range(0.0f64..=1.0).sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    ComplexValue::from_polar(rho, theta)
}

/// |x|, |y|, |z| <= 1 and |s|, |t| <= 1/2, so |s t z1 z2| <= 1/4.
pub fn mehler_point(rng: &mut ChaCha8Rng) -> MehlerParams {
    MehlerParams {
        x1: in_disk(rng, 1.0),
        y1: in_disk(rng, 1.0),
        z1: in_disk(rng, 1.0),
        x2: in_disk(rng, 1.0),
        y2: in_disk(rng, 1.0),
        z2: in_disk(rng, 1.0),
        s: in_disk(rng, 0.5),
        t: in_disk(rng, 0.5),
    }
}

/// `r` inner points with |s_j|, |t_j| <= 0.35, keeping |c z| below 1/4.
pub fn multilinear_point(rng: &mut ChaCha8Rng, r: usize) -> MultilinearParams {
    let mut many =
        |radius: f64| -> Vec<ComplexValue> { (0..r).map(|_| in_disk(rng, radius)).collect() };
    let xs = many(1.0);
    let ys = many(1.0);
    let zs = many(1.0);
    let ss = many(0.35);
    let ts = many(0.35);
    MultilinearParams {
        x: in_disk(rng, 1.0),
        y: in_disk(rng, 1.0),
        z: in_disk(rng, 1.0),
        xs,
        ys,
        zs,
        ss,
        ts,
    }
}

/// |2 s t z| <= 0.32.
pub fn mixed_point(rng: &mut ChaCha8Rng) -> MixedParams {
    MixedParams {
        x: in_disk(rng, 1.0),
        y: in_disk(rng, 1.0),
        z: in_disk(rng, 1.0),
        u: in_disk(rng, 1.0),
        v: in_disk(rng, 1.0),
        s: in_disk(rng, 0.4),
        t: in_disk(rng, 0.4),
    }
}

/// |2t| <= 1/2.
pub fn classical_point(rng: &mut ChaCha8Rng) -> ClassicalParams {
    ClassicalParams {
        u: in_disk(rng, 1.5),
        v: in_disk(rng, 1.5),
        t: in_disk(rng, 0.25),
    }
}

pub fn rel_err(a: ComplexValue, b: ComplexValue) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}
