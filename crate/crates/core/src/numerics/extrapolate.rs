//! Limit extrapolation from samples on a (roughly) geometric grid.
//!
//! Trailing triples of samples are fitted to `L + c·x^(-p)` with `p > 0`,
//! where `x` is either the abscissa itself or its logarithm. The second
//! choice handles the `1/log y` corrections produced by slowly varying
//! factors, which no power of `y` captures.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    DivergesToInfinity,
    Oscillates,
    Undetermined,
}

/// Which variable the correction term is a power of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionScale {
    Abscissa,
    LogAbscissa,
    /// Try both and keep the one whose window estimates agree best.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrapolationOptions {
    /// Relative agreement required between trailing window estimates.
    pub agreement_tol: f64,
    /// Oscillation amplitude must shrink by at least this factor across
    /// successive windows, otherwise the sequence is reported as oscillating.
    pub decay_factor: f64,
    pub scale: CorrectionScale,
    /// Absolute agreement accepted regardless of the size of the limit; useful
    /// when the limit may vanish.
    pub abs_tol: f64,
}

impl Default for ExtrapolationOptions {
    fn default() -> Self {
        ExtrapolationOptions {
            agreement_tol: 1e-2,
            decay_factor: 1.5,
            scale: CorrectionScale::Auto,
            abs_tol: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub value: Complex64,
    pub uncertainty: f64,
    pub verdict: Verdict,
    pub samples: Vec<(f64, Complex64)>,
    /// Scale of the correction model that produced `value`.
    pub scale: CorrectionScale,
}

impl LimitEstimate {
    pub fn is_converged(&self) -> bool {
        self.verdict == Verdict::Converged
    }

    /// Real part of the limit, for real-valued sequences.
    pub fn real(&self) -> f64 {
        self.value.re
    }
}

/// Extrapolates with the default options.
pub fn extrapolate_limit(samples: &[(f64, Complex64)]) -> Result<LimitEstimate> {
    extrapolate_limit_with(samples, &ExtrapolationOptions::default())
}

/// Convenience wrapper for real-valued samples.
pub fn extrapolate_real(samples: &[(f64, f64)], opts: &ExtrapolationOptions) -> Result<LimitEstimate> {
    let cs: Vec<_> = samples
        .iter()
        .map(|&(x, v)| (x, Complex64::new(v, 0.0)))
        .collect();
    extrapolate_limit_with(&cs, opts)
}

pub fn extrapolate_limit_with(
    samples: &[(f64, Complex64)],
    opts: &ExtrapolationOptions,
) -> Result<LimitEstimate> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::BadSamples("abscissae must be strictly increasing".into()));
        }
    }
    if let Some(bad) = samples
        .iter()
        .find(|(x, v)| !(*x > 0.0 && x.is_finite() && v.re.is_finite() && v.im.is_finite()))
    {
        return Err(Error::BadSamples(format!("invalid sample at abscissa {}", bad.0)));
    }

    let values: Vec<Complex64> = samples.iter().map(|s| s.1).collect();
    let magnitude = values.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let finish = |value: Complex64, uncertainty: f64, verdict: Verdict, scale| LimitEstimate {
        value,
        uncertainty,
        verdict,
        samples: samples.to_vec(),
        scale,
    };

    if magnitude == 0.0 {
        return Ok(finish(Complex64::new(0.0, 0.0), 0.0, Verdict::Converged, opts.scale));
    }

    let last = *values.last().unwrap();
    let wiggle = values.iter().fold(0.0_f64, |m, v| m.max((v - last).norm()));
    if wiggle <= 1e-13 * magnitude {
        return Ok(finish(last, wiggle.max(f64::EPSILON * magnitude), Verdict::Converged, opts.scale));
    }

    if is_oscillating(&values, opts.decay_factor) {
        let last = *values.last().unwrap();
        return Ok(finish(last, f64::INFINITY, Verdict::Oscillates, opts.scale));
    }

    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let candidates: Vec<CorrectionScale> = match opts.scale {
        CorrectionScale::Auto if xs[0] > 1.0 => {
            vec![CorrectionScale::Abscissa, CorrectionScale::LogAbscissa]
        }
        CorrectionScale::Auto => vec![CorrectionScale::Abscissa],
        CorrectionScale::LogAbscissa if xs[0] <= 1.0 => {
            return Err(Error::BadSamples(
                "log-scale extrapolation needs abscissae > 1".into(),
            ))
        }
        s => vec![s],
    };

    let mut best: Option<(Complex64, f64, CorrectionScale)> = None;
    for scale in candidates {
        let ts: Vec<f64> = match scale {
            CorrectionScale::LogAbscissa => xs.iter().map(|x| x.ln()).collect(),
            _ => xs.clone(),
        };
        if let Some((value, spread)) = window_estimates(&ts, &values, magnitude) {
            let better = match best {
                None => true,
                Some((_, bs, _)) => spread < bs,
            };
            if better {
                best = Some((value, spread, scale));
            }
        }
    }

    if let Some((value, spread, scale)) = best {
        let floor = 1e-10 * magnitude;
        if spread <= (opts.agreement_tol * value.norm().max(floor)).max(opts.abs_tol) {
            let uncertainty = spread.max(f64::EPSILON * value.norm());
            return Ok(finish(value, uncertainty, Verdict::Converged, scale));
        }
    }

    let last = *values.last().unwrap();
    if is_diverging(&values, opts.decay_factor) {
        return Ok(finish(last, f64::INFINITY, Verdict::DivergesToInfinity, opts.scale));
    }
    let uncertainty = best.map_or(f64::INFINITY, |b| b.1);
    Ok(finish(
        best.map_or(last, |b| b.0),
        uncertainty,
        Verdict::Undetermined,
        best.map_or(opts.scale, |b| b.2),
    ))
}

/// Limit estimates from the trailing triples; returns the last estimate and
/// the spread of the trailing three.
fn window_estimates(ts: &[f64], values: &[Complex64], magnitude: f64) -> Option<(Complex64, f64)> {
    let n = values.len();
    let windows = (n - 2).min(3);
    let mut est = Vec::with_capacity(windows);
    for start in (n - 2 - windows)..(n - 2) {
        est.push(fit_triple(
            [ts[start], ts[start + 1], ts[start + 2]],
            [values[start], values[start + 1], values[start + 2]],
            magnitude,
        )?);
    }
    let last = *est.last().unwrap();
    let spread = est
        .iter()
        .flat_map(|a| est.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    Some((last, spread))
}

fn fit_triple(x: [f64; 3], g: [Complex64; 3], magnitude: f64) -> Option<Complex64> {
    let d1 = g[1] - g[0];
    let d2 = g[2] - g[1];
    let tiny = 1e-14 * magnitude;
    if d2.norm() <= tiny {
        return Some(g[2]);
    }
    if d1.norm() <= tiny {
        return None;
    }
    let rho = (d2 * d1.conj()).re / d1.norm_sqr();
    if rho < 0.0 {
        // alternating: classical Aitken step
        let den = d2 - d1;
        if den.norm() == 0.0 {
            return None;
        }
        return Some(g[2] - d2 * d2 / den);
    }
    let (l0, l1, l2) = (x[0].ln(), x[1].ln(), x[2].ln());
    // ratio of successive differences of x^(-p), as p -> 0
    let rho0 = (l2 - l1) / (l1 - l0);
    if rho == 0.0 || rho >= rho0 {
        return None;
    }
    let ratio = |p: f64| {
        let (a, b, c) = ((-p * l0).exp(), (-p * l1).exp(), (-p * l2).exp());
        (c - b) / (b - a)
    };
    // ratio(p) decreases from rho0 toward 0; bisect on p
    let (mut lo, mut hi) = (1e-9_f64, 1.0_f64);
    while ratio(hi) > rho {
        hi *= 2.0;
        if hi > 1e3 {
            return Some(g[2]);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) > rho {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi {
            break;
        }
    }
    let p = 0.5 * (lo + hi);
    let (b, c) = ((-p * l1).exp(), (-p * l2).exp());
    let coeff = d2 / (c - b);
    Some(g[2] - coeff * c)
}

fn trailing_differences(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let start = n.saturating_sub((n / 2).max(MIN_SAMPLES));
    values[start..].windows(2).map(|w| w[1] - w[0]).collect()
}

/// Sign changes among successive differences whose amplitude does not decay.
fn is_oscillating(values: &[Complex64], decay_factor: f64) -> bool {
    let diffs = trailing_differences(values);
    if diffs.len() < 4 {
        return false;
    }
    let changes = diffs
        .windows(2)
        .filter(|w| (w[1] * w[0].conj()).re < 0.0)
        .count();
    if changes < 2 {
        return false;
    }
    let half = diffs.len() / 2;
    let amp = |d: &[Complex64]| d.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let (first, second) = (amp(&diffs[..half]), amp(&diffs[half..]));
    first < decay_factor * second
}

/// Monotone growth whose increments do not decay.
fn is_diverging(values: &[Complex64], decay_factor: f64) -> bool {
    let diffs = trailing_differences(values);
    if diffs.len() < 2 {
        return false;
    }
    let same_direction = diffs.windows(2).all(|w| (w[1] * w[0].conj()).re > 0.0);
    let first = diffs.first().unwrap().norm();
    let last = diffs.last().unwrap().norm();
    let n = values.len();
    let growing = values[n - 1].norm() > values[n - 1 - diffs.len()].norm();
    same_direction && growing && last * decay_factor >= first
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_samples(xs: &[f64], f: impl Fn(f64) -> f64) -> Vec<(f64, Complex64)> {
        xs.iter().map(|&x| (x, Complex64::new(f(x), 0.0))).collect()
    }

    fn decades(k: i32) -> Vec<f64> {
        (1..=k).map(|j| 10f64.powi(j)).collect()
    }

    #[test]
    fn power_correction() {
        let est = extrapolate_limit(&real_samples(&decades(6), |y| 2.0 + 1.0 / y)).unwrap();
        assert_eq!(est.verdict, Verdict::Converged);
        assert!((est.value.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_ratio_correction() {
        let est = extrapolate_limit(&real_samples(&decades(6), |y| (y + 1.0).ln() / y.ln())).unwrap();
        assert_eq!(est.verdict, Verdict::Converged);
        assert!((est.value.re - 1.0).abs() < 1e-6, "{}", est.value);
    }

    #[test]
    fn inverse_log_correction_uses_log_scale() {
        let est = extrapolate_limit(&real_samples(&decades(6), |y| 3.0 + 2.0 / y.ln())).unwrap();
        assert_eq!(est.verdict, Verdict::Converged);
        assert_eq!(est.scale, CorrectionScale::LogAbscissa);
        assert!((est.value.re - 3.0).abs() < 1e-9);
    }

    #[test]
    fn log_periodic_oscillation() {
        let xs: Vec<f64> = (1..=20).map(|k| (k as f64).exp()).collect();
        let est = extrapolate_limit(&real_samples(&xs, |y| y.ln().sin())).unwrap();
        assert_eq!(est.verdict, Verdict::Oscillates);
    }

    #[test]
    fn growth_diverges() {
        let est = extrapolate_limit(&real_samples(&decades(8), |y| y.ln())).unwrap();
        assert_eq!(est.verdict, Verdict::DivergesToInfinity);
        let est = extrapolate_limit(&real_samples(&decades(8), |y| y.sqrt())).unwrap();
        assert_eq!(est.verdict, Verdict::DivergesToInfinity);
    }

    #[test]
    fn decaying_alternation_converges() {
        let xs: Vec<f64> = (1..=12).map(|k| 2f64.powi(k)).collect();
        let est = extrapolate_limit(&real_samples(&xs, |y| {
            let k = y.log2().round() as i32;
            1.0 + (-0.5f64).powi(k)
        }))
        .unwrap();
        assert_eq!(est.verdict, Verdict::Converged);
        assert!((est.value.re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn too_few_samples() {
        let err = extrapolate_limit(&real_samples(&decades(4), |y| y)).unwrap_err();
        assert_eq!(err.code(), "insufficient-samples");
    }

    #[test]
    fn constant_and_zero_sequences() {
        let est = extrapolate_limit(&real_samples(&decades(5), |_| 0.0)).unwrap();
        assert_eq!(est.verdict, Verdict::Converged);
        assert_eq!(est.value, Complex64::new(0.0, 0.0));
        let est = extrapolate_limit(&real_samples(&decades(5), |_| -7.5)).unwrap();
        assert_eq!(est.value.re, -7.5);
    }

    #[test]
    fn complex_limit() {
        let xs = decades(6);
        let s: Vec<_> = xs
            .iter()
            .map(|&y| (y, Complex64::new(1.0, 2.0) + Complex64::new(3.0, -1.0) / y.sqrt()))
            .collect();
        let est = extrapolate_limit(&s).unwrap();
        assert!((est.value - Complex64::new(1.0, 2.0)).norm() < 1e-10);
    }
}
