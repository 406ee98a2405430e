//! Recovery direction: window masses by Stieltjes inversion, the polynomial
//! part from derivatives at `i`, negative squares of the Pick kernel, and the
//! classification of the model functions `Q_{α,ω}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    derivatives_at, extrapolate_limit, extrapolate_real, geometric_grid, integrate, ExtrapolationOptions,
    IntegrandSpec, LimitEstimate, Verdict,
};
use crate::transforms::{HalfPlaneFunction, RealPolynomial};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Ladders for the iterated limit `δ → 0` of `ε → 0` in the inversion formula.
///
/// The line integral at height `ε` is evaluated along a path that leaves the
/// real axis vertically, runs at height `height` and comes back down, which by
/// analyticity has the same value and avoids the peaks of `Im q` near atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionSchedule {
    pub epsilons: Vec<f64>,
    /// Margins as fractions of the window width.
    pub delta_fractions: Vec<f64>,
    pub rel_tol: f64,
    pub extrapolation: ExtrapolationOptions,
}

impl Default for InversionSchedule {
    fn default() -> Self {
        InversionSchedule {
            epsilons: geometric_grid(1e-1, 0.1, 5),
            delta_fractions: geometric_grid(0.1, 0.5, 6),
            rel_tol: 1e-9,
            extrapolation: ExtrapolationOptions::default(),
        }
    }
}

impl InversionSchedule {
    fn validate(&self) -> Result<()> {
        let decreasing = |v: &[f64]| v.len() >= 5 && v.iter().all(|x| *x > 0.0) && v.windows(2).all(|w| w[1] < w[0]);
        if !decreasing(&self.epsilons) || !decreasing(&self.delta_fractions) {
            return Err(Error::BadParameters(
                "ladders need at least 5 strictly decreasing positive entries".into(),
            ));
        }
        if self.delta_fractions[0] >= 0.5 {
            return Err(Error::BadParameters("δ must stay below half the window".into()));
        }
        Ok(())
    }
}

/// `∫_{a'}^{b'} q(x+iε) dx` through the upper detour.
fn line_integral(q: &HalfPlaneFunction, a: f64, b: f64, eps: f64, height: f64, rel_tol: f64) -> Result<Complex64> {
    let eval = |z: Complex64| q.eval(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let scale = b - a;
    let leg_breaks: Vec<f64> = (0..12).map(|j| eps + scale * 4f64.powi(-j)).filter(|y| *y < height).collect();
    let up = IntegrandSpec::new(|y| eval(Complex64::new(a, y)) * I, eps, height).breakpoints(leg_breaks.clone());
    let top = IntegrandSpec::new(|x| eval(Complex64::new(x, height)), a, b);
    let down = IntegrandSpec::new(|y| eval(Complex64::new(b, y)) * I, eps, height).breakpoints(leg_breaks);
    let up = integrate(&up, rel_tol)?.value;
    let top = integrate(&top, rel_tol)?.value;
    let down = integrate(&down, rel_tol)?.value;
    Ok(up + top - down)
}

// a vanishing window mass cannot be judged by relative agreement alone
fn floored(opts: &ExtrapolationOptions, samples: &[(f64, f64)]) -> ExtrapolationOptions {
    let scale = samples.iter().fold(0.0_f64, |m, s| m.max(s.1.abs()));
    ExtrapolationOptions {
        abs_tol: opts.abs_tol.max(1e-3 * scale),
        ..*opts
    }
}

/// `μ((a,b))` for `q = C_κ[μ,p]` by the Stieltjes inversion formula.
///
/// An unstable ladder is reported through the verdict, not as an error.
pub fn stieltjes_invert(q: &HalfPlaneFunction, a: f64, b: f64, schedule: &InversionSchedule) -> Result<LimitEstimate> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::BadParameters(format!("window ({a}, {b})")));
    }
    schedule.validate()?;
    let width = b - a;
    let height = width.max(1.0);
    let mut outer = Vec::new();
    let mut inner_ok = true;
    for &frac in &schedule.delta_fractions {
        let delta = frac * width;
        let mut samples = Vec::new();
        for &eps in &schedule.epsilons {
            let v = line_integral(q, a + delta, b - delta, eps, height, schedule.rel_tol)?;
            samples.push((1.0 / eps, v.im / std::f64::consts::PI));
        }
        let inner = extrapolate_real(&samples, &floored(&schedule.extrapolation, &samples))?;
        inner_ok &= inner.is_converged();
        outer.push((1.0 / delta, inner.real()));
    }
    let mut est = extrapolate_real(&outer, &floored(&schedule.extrapolation, &outer))?;
    if !inner_ok && est.verdict == Verdict::Converged {
        est.verdict = Verdict::Undetermined;
    }
    Ok(est)
}

/// Recovers `p` from `q^(j)(i) = p^(j)(i)`, `j = 0..κ`.
pub fn recover_polynomial(q: &HalfPlaneFunction, kappa: u32) -> Result<RealPolynomial> {
    let k = kappa as usize;
    let n = 2 * k + 2;
    let derivs = derivatives_at(|z| q.eval(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)), I, k, 0.3)?;
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for (j, d) in derivs.iter().enumerate() {
        for c in j..n {
            // d^j/dz^j z^c at i
            let falling: f64 = ((c - j + 1)..=c).map(|x| x as f64).product();
            let v = I.powi((c - j) as i32) * falling;
            m[(2 * j, c)] = v.re;
            m[(2 * j + 1, c)] = v.im;
        }
        rhs[2 * j] = d.re;
        rhs[2 * j + 1] = d.im;
    }
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::DegenerateSystem("derivative system at i is singular".into()))?;
    let scale = sol.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    // clean roundoff-level coefficients so that exact zeros stay zero
    let coeffs = sol
        .iter()
        .map(|x| if x.abs() <= 1e-13 * scale.max(1.0) { 0.0 } else { *x })
        .collect();
    Ok(RealPolynomial::new(coeffs))
}

/// The `k`-th point of a fixed low-discrepancy spread in `ℂ⁺`: radii between
/// 1/4 and 4, angles in `(0.08π, 0.92π)`. Prefixes of the sequence are reused
/// when more points are requested.
pub fn spread_point(k: usize) -> Complex64 {
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_3;
    let u = (0.5 + A1 * k as f64).fract();
    let v = (0.5 + A2 * k as f64).fract();
    let r = 2f64.powf(4.0 * u - 2.0);
    let theta = std::f64::consts::PI * (0.08 + 0.84 * v);
    Complex64::from_polar(r, theta)
}

pub fn spread_points(n: usize) -> Vec<Complex64> {
    (0..n).map(spread_point).collect()
}

/// Count of negative eigenvalues of `[K_q(w_j, w_i)]`, a lower bound for `κ_q`.
pub fn negative_squares(q: &HalfPlaneFunction, points: &[Complex64]) -> Result<usize> {
    if points.len() < 2 {
        return Err(Error::BadParameters("need at least two points".into()));
    }
    for (i, w) in points.iter().enumerate() {
        if !(w.im > 0.0) {
            return Err(Error::OutsideUpperHalfPlane(w.im));
        }
        for (j, v) in points.iter().enumerate().skip(i + 1) {
            if (w - v).norm() <= 1e-12 * w.norm().max(1.0) {
                return Err(Error::DuplicatePoints(i, j));
            }
        }
    }
    let values: Vec<Complex64> = points.iter().map(|&w| q.eval(w)).collect::<Result<_>>()?;
    let n = points.len();
    let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
        (values[i] - values[j].conj()) / (points[i] - points[j].conj())
    });
    let eig = m.symmetric_eigenvalues();
    let norm = eig.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    Ok(eig.iter().filter(|&&x| x < -1e-9 * norm).count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelClass {
    /// `κ` with `Q_{α,ω} ∈ N_κ`, if any.
    pub kappa: Option<u32>,
    pub in_ninf: bool,
}

const ANGLE_TOL: f64 = 1e-12;

fn is_odd_integer(a: f64) -> bool {
    a.fract() == 0.0 && (a.abs() as i64) % 2 == 1
}

/// Membership of `Q_{α,ω}` in `N_κ` and in `N_κ^(∞)`.
pub fn classify_model(alpha: f64, omega: Complex64) -> ModelClass {
    let none = ModelClass {
        kappa: None,
        in_ninf: false,
    };
    if omega.norm() == 0.0 || !alpha.is_finite() {
        return none;
    }
    let abs = alpha.abs();
    let candidate = if is_odd_integer(alpha) {
        let up = ((abs + 1.0) / 2.0) as u32;
        let real = omega.im.abs() <= ANGLE_TOL * omega.norm();
        if !real {
            return none;
        }
        let signed = if up % 2 == 0 { omega.re } else { -omega.re };
        if signed > 0.0 {
            up
        } else {
            up - 1
        }
    } else {
        ((abs + 1.0) / 2.0).floor() as u32
    };
    let rotated = if candidate % 2 == 0 { omega } else { -omega };
    let bound = std::f64::consts::FRAC_PI_2 * (1.0 - (abs - 2.0 * candidate as f64).abs());
    if rotated.arg().abs() > bound + ANGLE_TOL {
        return none;
    }
    let positive_real = omega.re > 0.0 && omega.im.abs() <= ANGLE_TOL * omega.norm();
    ModelClass {
        kappa: Some(candidate),
        in_ninf: alpha >= -1.0 && (alpha != -1.0 || positive_real),
    }
}

/// `μ_{α,ω}((a,b))` for an admissible model function.
pub fn model_measure_mass(alpha: f64, omega: Complex64, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::BadParameters(format!("window ({a}, {b})")));
    }
    if !classify_model(alpha, omega).in_ninf {
        return Err(Error::NotInRange(format!(
            "Q with α = {alpha}, ω = {omega} is not in N^(∞)"
        )));
    }
    if alpha == -1.0 {
        return Ok(if a < 0.0 && 0.0 < b { omega.re } else { 0.0 });
    }
    let half = alpha * std::f64::consts::FRAC_PI_2;
    let c_plus = omega.norm() / std::f64::consts::PI * (half - omega.arg()).cos();
    let c_minus = omega.norm() / std::f64::consts::PI * (half + omega.arg()).cos();
    let prim = |t: f64| t.powf(alpha + 1.0) / (alpha + 1.0);
    let pos = if b > 0.0 { c_plus * (prim(b) - prim(a.max(0.0))) } else { 0.0 };
    let neg = if a < 0.0 { c_minus * (prim(-a) - prim((-b).max(0.0))) } else { 0.0 };
    Ok(pos + neg)
}

/// Whether `|q(iy)/y^(2κ−1)| → ∞` or `q(iy)/(iy)^(2κ−1) → (−∞,0)`.
pub fn ninf_radial_check(q: &HalfPlaneFunction, kappa: u32) -> Result<bool> {
    let power = 2 * kappa as i32 - 1;
    let grid = geometric_grid(10.0, 4.0, 10);
    let mut ratios = Vec::new();
    let mut mags = Vec::new();
    for &y in &grid {
        let g = q.eval(Complex64::new(0.0, y))? / (I * y).powi(power);
        ratios.push((y, g));
        mags.push((y, Complex64::new(g.norm(), 0.0)));
    }
    let mag = extrapolate_limit(&mags)?;
    if mag.verdict == Verdict::DivergesToInfinity {
        return Ok(true);
    }
    let lim = extrapolate_limit(&ratios)?;
    Ok(lim.is_converged()
        && lim.value.re < 0.0
        && lim.value.im.abs() <= 1e-6 * lim.value.norm().max(1e-300)
        && lim.value.norm() > 1e-8 * mags.iter().fold(0.0_f64, |m, s| m.max(s.1.re)))
}
