//! Objective and constraint bodies at arbitrary dimension.
//!
//! `shift` is subtracted from `x` before evaluation; `rotation` is a
//! row-major `D x D` matrix applied as a row vector product `z M`.

use std::f64::consts::E;

pub const C06_OFFSET: f64 = 483.610_615_653_5;

pub fn shifted(x: &[f64], shift: &[f64]) -> Vec<f64> {
    x.iter().zip(shift).map(|(a, o)| a - o).collect()
}

pub fn rotate(z: &[f64], rotation: &[f64]) -> Vec<f64> {
    let d = z.len();
    (0..d)
        .map(|j| (0..d).map(|i| z[i] * rotation[i * d + j]).sum())
        .collect()
}

pub fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

pub fn max_component(z: &[f64]) -> f64 {
    z.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn c01_objective(z: &[f64]) -> f64 {
    let quartic: f64 = z.iter().map(|v| v.cos().powi(4)).sum();
    let product: f64 = z.iter().map(|v| v.cos().powi(2)).product();
    let weighted: f64 = z.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum();
    if weighted == 0.0 {
        return 0.0;
    }
    -((quartic - 2.0 * product) / weighted.sqrt()).abs()
}

pub fn c01_product(z: &[f64]) -> f64 {
    0.75 - z.iter().product::<f64>()
}

pub fn c01_sum(z: &[f64]) -> f64 {
    z.iter().sum::<f64>() - 7.5 * z.len() as f64
}

pub fn c03_equality(z: &[f64]) -> f64 {
    z.windows(2).map(|w| (w[0] - w[1]).powi(2)).sum()
}

pub fn c04_equalities(z: &[f64]) -> [f64; 4] {
    let d = z.len();
    let half = d / 2;
    let h1 = z.iter().map(|v| v * v.abs().sqrt().cos()).sum::<f64>() / d as f64;
    let h2 = (0..half.saturating_sub(1)).map(|i| (z[i] - z[i + 1]).powi(2)).sum();
    let h3 = (half..d.saturating_sub(1)).map(|i| (z[i] * z[i] - z[i + 1]).powi(2)).sum();
    let h4 = z.iter().sum();
    [h1, h2, h3, h4]
}

pub fn c06_transform(z: &[f64], rotation: &[f64]) -> Vec<f64> {
    let lifted: Vec<f64> = z.iter().map(|v| v + C06_OFFSET).collect();
    rotate(&lifted, rotation).into_iter().map(|v| v - C06_OFFSET).collect()
}

pub fn c06_equalities(y: &[f64]) -> [f64; 2] {
    let d = y.len() as f64;
    let h1 = y.iter().map(|v| -v * v.abs().sqrt().sin()).sum::<f64>() / d;
    let h2 = y.iter().map(|v| -v * (0.5 * v.abs().sqrt()).cos()).sum::<f64>() / d;
    [h1, h2]
}

pub fn c07_inequality(y: &[f64]) -> f64 {
    let d = y.len() as f64;
    let rms = (y.iter().map(|v| v * v).sum::<f64>() / d).sqrt();
    let cosine = y.iter().map(|v| (0.1 * v).cos()).sum::<f64>() / d;
    0.5 - (-0.1 * rms).exp() - 3.0 * cosine.exp() + E
}

pub fn c09_equality(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v.abs().sqrt().sin()).sum()
}
