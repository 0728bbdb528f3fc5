#![allow(dead_code)]

use std::f64::consts::PI;

/// `exp(1 − 1/(1 − r²))` written out independently of the library.
pub fn bump_profile(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// Composite Simpson on `[a, b]` with `n` (even) panels.
pub fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// `∫ ζ dH¹` over a line at distance `d` from the centre of a bump of radius `radius`.
pub fn bump_line_integral(radius: f64, d: f64) -> f64 {
    if d.abs() >= radius {
        return 0.0;
    }
    let half = (radius * radius - d * d).sqrt();
    simpson(-half, half, 20_000, |t| bump_profile((t * t + d * d).sqrt() / radius))
}

/// `∫ ζ dx` of a bump of radius `radius`.
pub fn bump_area_integral(radius: f64) -> f64 {
    2.0 * PI * radius * radius * simpson(0.0, 1.0, 20_000, |r| r * bump_profile(r))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Successive ratios `e[k] / e[k+1]`.
pub fn ratios(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| w[0] / w[1]).collect()
}
