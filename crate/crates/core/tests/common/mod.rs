#![allow(dead_code)]

use std::f64::consts::PI;

/// Dilogarithm Li₂(x) for 0 ≤ x ≤ 1 from its power series, reflected
/// through `Li₂(x) + Li₂(1−x) = π²/6 − ln x·ln(1−x)` above one half.
pub fn dilog(x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x));
    if x == 1.0 {
        return PI * PI / 6.0;
    }
    if x > 0.5 {
        return PI * PI / 6.0 - x.ln() * (1.0 - x).ln() - dilog(1.0 - x);
    }
    let mut sum = 0.0;
    let mut pow = x;
    for k in 1..200 {
        let term = pow / (k * k) as f64;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        pow *= x;
    }
    sum
}

pub const PS: f64 = 1e-12;
