#![allow(dead_code)]

pub mod brute;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Seeded test windows of varied length, scale and spectral shape.
pub fn random_windows(count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = r.random_range(16..=600);
            let scale = 10f64.powf(r.random_range(-4.0..1.0));
            let white: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
            let mut x: Vec<f64> = match i % 4 {
                0 => white,
                1 => {
                    let (a1, a2) = (r.random_range(-1.2..1.2), r.random_range(-0.5..0.2));
                    let mut y = vec![0.0; n];
                    for t in 0..n {
                        y[t] = white[t]
                            + if t > 0 { a1 * y[t - 1] } else { 0.0 }
                            + if t > 1 { a2 * y[t - 2] } else { 0.0 };
                    }
                    y
                }
                2 => {
                    let f = r.random_range(0.01..0.45);
                    (0..n)
                        .map(|t| (2.0 * std::f64::consts::PI * f * t as f64).sin() + 0.3 * white[t])
                        .collect()
                }
                _ => white.iter().map(|v| if v.abs() < 0.5 { 0.0 } else { v + 0.2 }).collect(),
            };
            for v in &mut x {
                *v *= scale;
            }
            x
        })
        .collect()
}
