//! Complex differentiation by trapezoidal integration over a circle.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Returns `f(center), f'(center), …, f^(max_order)(center)`.
///
/// Uses the Cauchy integral formula on the circle of the given radius with an
/// equispaced rule, which converges geometrically for `f` analytic on a
/// slightly larger disc.
pub fn derivatives_at(
    f: impl Fn(Complex64) -> Complex64,
    center: Complex64,
    max_order: usize,
    radius: f64,
) -> Result<Vec<Complex64>> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::BadParameters(format!("radius {radius} must be positive")));
    }
    let n = (8 * (max_order + 1)).max(64);
    let nodes: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let mut values = Vec::with_capacity(n);
    for w in &nodes {
        let z = center + w * radius;
        let v = f(z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::EvaluationFailure(format!("{z}")));
        }
        values.push(v);
    }
    let mut out = Vec::with_capacity(max_order + 1);
    let mut factorial = 1.0;
    for j in 0..=max_order {
        if j > 0 {
            factorial *= j as f64;
        }
        let sum: Complex64 = values
            .iter()
            .zip(&nodes)
            .map(|(v, w)| v * w.powi(-(j as i32)))
            .sum();
        out.push(sum * (factorial / (n as f64 * radius.powi(j as i32))));
    }
    Ok(out)
}
