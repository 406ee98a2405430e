//! Quadrature, limit extrapolation and complex differentiation.

mod derivative;
mod extrapolate;
mod quadrature;

pub use derivative::derivatives_at;
pub use extrapolate::{
    extrapolate_limit, extrapolate_limit_with, extrapolate_real, CorrectionScale,
    ExtrapolationOptions, LimitEstimate, Verdict, MIN_SAMPLES,
};
pub use quadrature::{integrate, IntegrandSpec, Quadrature, Tail};

/// `count` points `start·ratio^k`, `k = 0..count`.
pub fn geometric_grid(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}

/// Geometric grid from `start` up to and including (approximately) `top`.
pub fn geometric_grid_to(start: f64, ratio: f64, top: f64) -> Vec<f64> {
    let count = ((top / start).ln() / ratio.ln() + 1e-9).floor() as usize + 1;
    geometric_grid(start, ratio, count)
}
