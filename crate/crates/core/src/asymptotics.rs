//! Abelian and Tauberian checks: radial limits of `q(rz)/f(r)`, measure
//! limits from `(α, ω)`, predicted asymptotics from the symmetrised
//! distribution, the exceptional odd-index case, the real/imaginary ratio
//! bound, and convergence of sequences of transforms.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inversion::classify_model;
use crate::measures::{Measure, Side};
use crate::numerics::{
    extrapolate_limit, extrapolate_real, geometric_grid, ExtrapolationOptions, LimitEstimate, Tail, Verdict,
};
use crate::regvar::{rv_index, RegVarProfile, RvVerdict};
use crate::transforms::{cauchy_reg, model_q, CauchyPair};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default relative tolerance of the asymptotic comparisons.
pub const ASYMPTOTIC_TOL: f64 = 0.03;
/// Estimated indices within this distance of an integer are taken as that integer.
pub const INDEX_SNAP: f64 = 0.02;
/// Estimated `ζ` within this distance of 1 counts as 1.
pub const ZETA_TOL: f64 = 0.02;

const RATE_REL_TOL: f64 = 1e-10;
const COMPACT_KERNEL: Tail = Tail::power(-64.0);

fn snap(x: f64) -> f64 {
    if (x - x.round()).abs() <= INDEX_SNAP {
        x.round()
    } else {
        x
    }
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

fn is_even_integer(x: f64) -> bool {
    is_integer(x) && (x / 2.0).fract() == 0.0
}

fn sign_pow(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `∫_1^r μ((−t,t)) t^(−β−1) dt`.
pub fn sym_head_integral(mu: &Measure, beta: f64, r: f64) -> Result<f64> {
    if r <= 1.0 {
        return Ok(0.0);
    }
    let kernel = move |a: f64| {
        let a = a.abs();
        if a >= r {
            0.0
        } else if beta == 0.0 {
            (r / a.max(1.0)).ln()
        } else {
            (a.max(1.0).powf(-beta) - r.powf(-beta)) / beta
        }
    };
    mu.integrate_real(&kernel, COMPACT_KERNEL, &[-r, r], RATE_REL_TOL)
}

/// `∫_r^∞ μ((−t,t)) t^(−β−1) dt`.
pub fn sym_tail_integral(mu: &Measure, beta: f64, r: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::DivergentIntegral(format!("tail integral with β = {beta}")));
    }
    let kernel = move |a: f64| a.abs().max(r).powf(-beta) / beta;
    mu.integrate_real(&kernel, Tail::power(-beta), &[-r, r], RATE_REL_TOL)
        .map_err(|e| match e {
            Error::TransformUndefined(m) => Error::DivergentIntegral(m),
            other => other,
        })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateForm {
    /// `factor · μ((−r,r))/r`
    Ratio { factor: f64 },
    /// `β r^(β−1) ∫_1^r μ((−t,t)) t^(−β−1) dt`
    HeadIntegral,
    /// `β r^(β−1) ∫_r^∞ μ((−t,t)) t^(−β−1) dt`
    TailIntegral,
}

/// A normalising function `f` built from the symmetrised distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    pub beta: f64,
    pub form: RateForm,
}

impl Rate {
    pub fn eval(&self, mu: &Measure, r: f64) -> Result<f64> {
        let b = self.beta;
        match self.form {
            RateForm::Ratio { factor } => Ok(factor * mu.distribution(Side::Sym, r)? / r),
            RateForm::HeadIntegral => Ok(b * r.powf(b - 1.0) * sym_head_integral(mu, b, r)?),
            RateForm::TailIntegral => Ok(b * r.powf(b - 1.0) * sym_tail_integral(mu, b, r)?),
        }
    }

    pub fn describe(&self) -> String {
        let b = self.beta;
        match self.form {
            RateForm::Ratio { factor } => format!("{factor}·μ((−r,r))/r"),
            RateForm::HeadIntegral => format!("{b}·r^{}·∫_1^r μ((−t,t))/t^{} dt", b - 1.0, b + 1.0),
            RateForm::TailIntegral => format!("{b}·r^{}·∫_r^∞ μ((−t,t))/t^{} dt", b - 1.0, b + 1.0),
        }
    }
}

/// `πβ/|sin πβ|`, taken as 1 at `β = 0`.
fn generic_factor(beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else {
        PI * beta / (PI * beta).sin().abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawCase {
    /// `β` not an integer.
    Generic,
    /// `β` even.
    Even,
    /// `β` odd and `ζ ≠ 1`.
    Odd,
    /// `β` odd, `ζ = 1`, from an explicit decomposition.
    Exceptional,
    /// `β` odd and `ζ = 1`: no prediction without a decomposition.
    Excluded,
}

impl LawCase {
    pub fn tag(self) -> &'static str {
        match self {
            LawCase::Generic => "generic",
            LawCase::Even => "even",
            LawCase::Odd => "odd-zeta-ne-1",
            LawCase::Exceptional => "exceptional",
            LawCase::Excluded => "excluded",
        }
    }
}

/// Predicted behaviour `q(rz)/f(r) → Q_{β−1,ω}(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticLaw {
    pub beta: f64,
    /// `lim μ((−t,0))/μ([0,t))`, possibly infinite.
    pub zeta: f64,
    /// `None` exactly when the case is excluded.
    pub omega: Option<Complex64>,
    pub rate: Rate,
    pub case: LawCase,
    /// `κ(μ)`; the prediction is for the pair with `c_{2κ+1} = ∫(1+t²)^(−κ−1)dμ`.
    pub kappa: u32,
    /// `p(μ)`; when odd the pair must also have `c_{2κ} = ∫t(1+t²)^(−κ−1)dμ`.
    pub p: u32,
    /// `(η₊, η₋)` for exceptional laws.
    pub eta: Option<(f64, f64)>,
}

impl AsymptoticLaw {
    pub fn alpha(&self) -> f64 {
        self.beta - 1.0
    }

    /// `f(r)·Q_{β−1,ω}(z)`.
    pub fn predict(&self, mu: &Measure, r: f64, z: Complex64) -> Result<Complex64> {
        let omega = self
            .omega
            .ok_or_else(|| Error::HypothesisViolated("no law in the excluded case".into()))?;
        Ok(self.rate.eval(mu, r)? * model_q(self.alpha(), omega, z))
    }
}

/// Regular-variation profile of `t ↦ μ((−t,t))`.
pub fn sym_profile(mu: &Measure, grid: &[f64]) -> Result<RegVarProfile> {
    let f = |t: f64| mu.distribution(Side::Sym, t).unwrap_or(f64::NAN);
    rv_index(&f, &[2.0, 4.0], grid)
}

/// `ζ = lim μ((−t,0))/μ([0,t))` on the default grid `10..1.6e5`.
pub fn zeta_limit(mu: &Measure) -> Result<LimitEstimate> {
    zeta_limit_on(mu, &geometric_grid(10.0, 4.0, 8))
}

/// `ζ` on a caller-supplied grid; a vanishing positive part gives `+∞`.
pub fn zeta_limit_on(mu: &Measure, grid: &[f64]) -> Result<LimitEstimate> {
    let mut samples = Vec::new();
    let mut pos_zero = true;
    let mut neg_zero = true;
    for &t in grid {
        let pos = mu.distribution(Side::Pos, t)?;
        let neg = mu.distribution(Side::Neg, t)?;
        pos_zero &= pos == 0.0;
        neg_zero &= neg == 0.0;
        samples.push((t, pos, neg));
    }
    if pos_zero && neg_zero {
        return Err(Error::ZeroMeasure);
    }
    if samples.last().is_some_and(|s| s.1 == 0.0) {
        let pts: Vec<(f64, Complex64)> = samples.iter().map(|s| (s.0, Complex64::new(s.2, 0.0))).collect();
        return Ok(LimitEstimate {
            value: Complex64::new(f64::INFINITY, 0.0),
            uncertainty: 0.0,
            verdict: Verdict::DivergesToInfinity,
            samples: pts,
            scale: ExtrapolationOptions::default().scale,
        });
    }
    let ratios: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.1 > 0.0)
        .map(|s| (s.0, s.2 / s.1))
        .collect();
    let mut est = extrapolate_real(&ratios, &ExtrapolationOptions::default())?;
    if est.verdict == Verdict::DivergesToInfinity {
        est.value = Complex64::new(f64::INFINITY, 0.0);
    }
    // a limit of nonnegative ratios; extrapolation may overshoot below zero
    est.value.re = est.value.re.max(0.0);
    Ok(est)
}

/// Predicted law for the standard pair of `μ` from the index of its
/// symmetrised distribution and `ζ`.
pub fn abelian_predict(mu: &Measure, sym: &RegVarProfile, zeta: f64) -> Result<AsymptoticLaw> {
    let beta = match (sym.verdict, sym.index) {
        (RvVerdict::RegularlyVarying, Some(b)) => snap(b),
        _ => {
            return Err(Error::NotRegularlyVarying(
                "symmetrised distribution has no established index".into(),
            ))
        }
    };
    if beta < 0.0 {
        return Err(Error::IndexOutOfRange(beta));
    }
    if !(zeta >= 0.0) {
        return Err(Error::BadParameters(format!("ζ = {zeta}")));
    }
    let g = mu.growth_indices()?;
    let rate = if !is_integer(beta) || beta == 0.0 {
        Rate {
            beta,
            form: RateForm::Ratio {
                factor: generic_factor(beta),
            },
        }
    } else if mu.integrable_against(Tail::power(-beta))? {
        Rate {
            beta,
            form: RateForm::TailIntegral,
        }
    } else {
        Rate {
            beta,
            form: RateForm::HeadIntegral,
        }
    };
    let case = if !is_integer(beta) {
        LawCase::Generic
    } else if is_even_integer(beta) {
        LawCase::Even
    } else if (zeta - 1.0).abs() <= ZETA_TOL {
        LawCase::Excluded
    } else {
        LawCase::Odd
    };
    let omega = (case != LawCase::Excluded).then(|| {
        let w = if zeta.is_infinite() { 1.0 } else { (zeta - 1.0) / (zeta + 1.0) };
        let h = FRAC_PI_2 * beta;
        sign_pow(g.p - 1) * Complex64::new(h.cos(), w * h.sin())
    });
    Ok(AsymptoticLaw {
        beta,
        zeta,
        omega,
        rate,
        case,
        kappa: g.kappa,
        p: g.p,
        eta: None,
    })
}

/// The odd-index case `ζ = 1` from a decomposition `μ = μ₀ + μ₁ + μ₂` with
/// `μ₀` symmetric.
pub fn exceptional_predict(mu0: &Measure, mu1: &Measure, mu2: &Measure, beta: u32) -> Result<AsymptoticLaw> {
    if beta % 2 == 0 {
        return Err(Error::BadParameters(format!("β = {beta} is not odd")));
    }
    for t in [2.0, 10.0, 1e3] {
        let (p, n) = (mu0.window_mass(0.0, t)?, mu0.window_mass(-t, 0.0)?);
        if (p - n).abs() > 1e-9 * p.abs().max(n.abs()).max(1e-300) {
            return Err(Error::HypothesisViolated(format!(
                "μ₀ is not symmetric: {p} vs {n} at t = {t}"
            )));
        }
    }
    let b = beta as f64;
    let grid = geometric_grid(1e2, 4.0, 8);
    let head = !mu1.integrable_against(Tail::power(-b))?;
    let (plus, minus) = mu1.split_signed();
    let mut etas = [0.0; 2];
    for (slot, part) in etas.iter_mut().zip([&plus, &minus]) {
        if part.is_zero() {
            continue;
        }
        let mut samples = Vec::new();
        for &t in &grid {
            let den = mu0.distribution(Side::Sym, t)? / t.powf(b);
            let num = if head {
                sym_head_integral(part, b, t)?
            } else {
                -sym_tail_integral(part, b, t)?
            };
            samples.push((t, num / den));
        }
        let est = extrapolate_real(&samples, &ExtrapolationOptions::default())?;
        if !est.is_converged() {
            return Err(Error::EtaLimitMissing(format!("{:?} after {} samples", est.verdict, samples.len())));
        }
        *slot = est.real();
    }
    let kappa = (beta - 1) / 2;
    let omega = sign_pow(kappa) * Complex64::new(FRAC_PI_2, etas[0] - etas[1]);
    let mu = mu0.sum(mu1).sum(mu2);
    Ok(AsymptoticLaw {
        beta: b,
        zeta: 1.0,
        omega: Some(omega),
        rate: Rate {
            beta: b,
            form: RateForm::Ratio { factor: b },
        },
        case: LawCase::Exceptional,
        kappa,
        p: mu.growth_indices()?.p,
        eta: Some((etas[0], etas[1])),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialOptions {
    pub tolerance: f64,
    /// Second ray used to confirm the limit is `Q_{α,ω}`.
    pub cross_point: Complex64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions {
            tolerance: ASYMPTOTIC_TOL,
            cross_point: Complex64::from_polar(1.0, PI / 3.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    /// `lim q(r z₀)/f(r)`.
    pub xi: LimitEstimate,
    pub alpha: f64,
    pub omega: Complex64,
    pub cross_point: Complex64,
    pub cross_limit: LimitEstimate,
    /// `|lim q(r z₁)/f(r) − Q_{α,ω}(z₁)| / |Q_{α,ω}(z₁)|`.
    pub cross_error: f64,
    pub consistent: bool,
}

pub fn radial_limit_profile(
    q: &dyn Fn(Complex64) -> Result<Complex64>,
    z0: Complex64,
    grid: &[f64],
    f: &dyn Fn(f64) -> f64,
) -> Result<RadialProfile> {
    radial_limit_profile_with(q, z0, grid, f, &RadialOptions::default())
}

pub fn radial_limit_profile_with(
    q: &dyn Fn(Complex64) -> Result<Complex64>,
    z0: Complex64,
    grid: &[f64],
    f: &dyn Fn(f64) -> f64,
    opts: &RadialOptions,
) -> Result<RadialProfile> {
    if !(z0.im > 0.0) || !(opts.cross_point.im > 0.0) {
        return Err(Error::OutsideUpperHalfPlane(z0.im.min(opts.cross_point.im)));
    }
    let profile = rv_index(f, &[2.0, 4.0], grid)?;
    let alpha = match (profile.verdict, profile.index) {
        (RvVerdict::RegularlyVarying, Some(a)) => snap(a),
        _ => return Err(Error::NotRegularlyVarying("normalising function".into())),
    };
    let ray = |z: Complex64| -> Result<LimitEstimate> {
        let samples: Vec<(f64, Complex64)> = grid
            .iter()
            .map(|&r| Ok((r, q(z * r)? / f(r))))
            .collect::<Result<_>>()?;
        extrapolate_limit(&samples)
    };
    let xi = ray(z0)?;
    if !xi.is_converged() {
        return Err(Error::NoRadialLimit(format!("{:?}", xi.verdict)));
    }
    let scale = xi.samples.iter().fold(0.0_f64, |m, s| m.max(s.1.norm()));
    if xi.value.norm() <= 1e-9 * scale.max(1e-300) {
        return Err(Error::DegenerateLimit);
    }
    let omega = xi.value / I * crate::transforms::principal_pow(z0 / I, -alpha);
    let cross_limit = ray(opts.cross_point)?;
    let want = model_q(alpha, omega, opts.cross_point);
    let cross_error = (cross_limit.value - want).norm() / want.norm();
    Ok(RadialProfile {
        consistent: cross_limit.is_converged() && cross_error <= opts.tolerance,
        xi,
        alpha,
        omega,
        cross_point: opts.cross_point,
        cross_limit,
        cross_error,
    })
}

/// Limits of `μ((0,r))/(r f(r))` and `μ((−r,0))/(r f(r))`, or of
/// `μ((−r,r))/(r f(r))` when `α = −1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureLimits {
    HalfLines { c_plus: f64, c_minus: f64 },
    Total(f64),
}

pub fn tauberian_measure_limits(alpha: f64, omega: Complex64) -> Result<MeasureLimits> {
    if !classify_model(alpha, omega).in_ninf {
        return Err(Error::NotInRange(format!("(α, ω) = ({alpha}, {omega}) is not admissible")));
    }
    Ok(measure_limits(alpha, omega))
}

/// As [`tauberian_measure_limits`] for estimated `(α, ω)`: admissibility is
/// tested with `angle_slack` radians of slack and negative limits are
/// clipped to zero.
pub fn tauberian_measure_limits_with(alpha: f64, omega: Complex64, angle_slack: f64) -> Result<MeasureLimits> {
    let reject = || Error::NotInRange(format!("(α, ω) = ({alpha}, {omega}) is not admissible"));
    if omega.norm() == 0.0 || alpha < -1.0 - 1e-12 {
        return Err(reject());
    }
    if (alpha + 1.0).abs() <= 1e-12 {
        if omega.arg().abs() > angle_slack {
            return Err(reject());
        }
        return Ok(MeasureLimits::Total(omega.re));
    }
    let top = ((alpha.abs() + 1.0) / 2.0).ceil() as u32;
    let admissible = (0..=top).any(|k| {
        let rotated = sign_pow(k) * omega;
        rotated.arg().abs() <= FRAC_PI_2 * (1.0 - (alpha.abs() - 2.0 * k as f64).abs()) + angle_slack
    });
    if !admissible {
        return Err(reject());
    }
    Ok(measure_limits(alpha, omega))
}

fn measure_limits(alpha: f64, omega: Complex64) -> MeasureLimits {
    if alpha == -1.0 {
        return MeasureLimits::Total(omega.re);
    }
    let scale = omega.norm() / (PI * (alpha + 1.0));
    let h = FRAC_PI_2 * alpha;
    MeasureLimits::HalfLines {
        c_plus: (scale * (h - omega.arg()).cos()).max(0.0),
        c_minus: (scale * (h + omega.arg()).cos()).max(0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Asymmetry {
    PlusGreater,
    Equal,
    MinusGreater,
    BothZero,
}

impl Asymmetry {
    pub fn tag(self) -> &'static str {
        match self {
            Asymmetry::PlusGreater => "c+>c-",
            Asymmetry::Equal => "c+=c-",
            Asymmetry::MinusGreater => "c+<c-",
            Asymmetry::BothZero => "both-zero",
        }
    }
}

/// Ordering of the half-line limits read off from `ω`, for admissible
/// `(α, ω)` with `α > −1`.
pub fn asymmetry_classify(alpha: f64, omega: Complex64) -> Asymmetry {
    const TOL: f64 = 1e-9;
    let m = if is_integer(alpha) && !is_even_integer(alpha) {
        let lo = ((alpha - 1.0) / 2.0).max(0.0) as u32;
        if sign_pow(lo) * omega.re > 0.0 {
            lo
        } else {
            lo + 1
        }
    } else {
        (alpha / 2.0).round().max(0.0) as u32
    };
    let a0 = alpha - 2.0 * m as f64;
    let psi = (sign_pow(m) * omega).arg();
    if (a0.abs() - 1.0).abs() <= TOL || (a0.abs() <= TOL && (psi.abs() - FRAC_PI_2).abs() <= TOL) {
        Asymmetry::BothZero
    } else if a0.abs() <= TOL || psi.abs() <= TOL {
        Asymmetry::Equal
    } else if a0.signum() == psi.signum() {
        Asymmetry::PlusGreater
    } else {
        Asymmetry::MinusGreater
    }
}

/// Predicted leading term of `Im q(iy)` from the symmetrised distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagAsymptote {
    pub beta: f64,
    pub kappa: u32,
    pub sign: f64,
    pub rate: Rate,
}

impl ImagAsymptote {
    pub fn eval(&self, mu: &Measure, y: f64) -> Result<f64> {
        Ok(self.sign * self.rate.eval(mu, y)?)
    }
}

pub fn imag_asymptote(pair: &CauchyPair, beta: f64) -> Result<ImagAsymptote> {
    let kappa = pair.kappa();
    let lo = 2.0 * kappa as f64;
    let hi = lo + 2.0;
    let beta = snap(beta);
    if !(lo <= beta && beta <= hi) {
        return Err(Error::IndexIncompatible { beta, lo, hi });
    }
    let even_positive = beta > 0.0 && is_even_integer(beta);
    if !even_positive {
        let factor = if beta == 0.0 {
            1.0
        } else {
            FRAC_PI_2 * beta / (FRAC_PI_2 * beta).sin()
        };
        return Ok(ImagAsymptote {
            beta,
            kappa,
            sign: 1.0,
            rate: Rate {
                beta,
                form: RateForm::Ratio { factor },
            },
        });
    }
    let finite = pair.measure().integrable_against(Tail::power(-beta))?;
    let form = if beta == lo {
        if finite {
            return Err(Error::HypothesisViolated(format!(
                "β = 2κ = {beta} needs ∫(1+|t|)^(−β)dμ = ∞"
            )));
        }
        RateForm::HeadIntegral
    } else {
        if !finite {
            return Err(Error::HypothesisViolated(format!(
                "β = 2κ+2 = {beta} needs ∫(1+|t|)^(−β)dμ < ∞"
            )));
        }
        RateForm::TailIntegral
    };
    Ok(ImagAsymptote {
        beta,
        kappa,
        sign: sign_pow(kappa),
        rate: Rate { beta, form },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioBound {
    /// `|tan(πβ/2)|`
    pub bound: f64,
    /// `(y, |Re q(iy)/Im q(iy)|)`
    pub samples: Vec<(f64, f64)>,
    /// Maximum over the upper half of the grid.
    pub trailing_max: f64,
    pub limit: LimitEstimate,
    pub holds: bool,
}

pub fn ratio_bound_check(pair: &CauchyPair, beta: f64, grid: &[f64]) -> Result<RatioBound> {
    ratio_bound_check_with(pair, beta, grid, ASYMPTOTIC_TOL)
}

/// `limsup |Re q(iy)/Im q(iy)| ≤ |tan(πβ/2)|` on the grid. A converged
/// extrapolated limit is used when available, otherwise the trailing maximum.
pub fn ratio_bound_check_with(pair: &CauchyPair, beta: f64, grid: &[f64], tol: f64) -> Result<RatioBound> {
    let beta = snap(beta);
    if is_integer(beta) && !is_even_integer(beta) {
        return Err(Error::BadParameters(format!("β = {beta} is odd")));
    }
    let bound = if is_even_integer(beta) {
        0.0
    } else {
        (FRAC_PI_2 * beta).tan().abs()
    };
    let samples: Vec<(f64, f64)> = grid
        .iter()
        .map(|&y| {
            let v = cauchy_reg(pair, Complex64::new(0.0, y))?;
            Ok((y, (v.re / v.im).abs()))
        })
        .collect::<Result<_>>()?;
    let trailing_max = samples[samples.len() / 2..].iter().fold(0.0_f64, |m, s| m.max(s.1));
    let limit = extrapolate_real(&samples, &ExtrapolationOptions::default())?;
    let observed = if limit.is_converged() { limit.real().max(0.0) } else { trailing_max };
    let threshold = bound * (1.0 + tol) + if bound == 0.0 { 1e-6 } else { 0.0 };
    Ok(RatioBound {
        bound,
        holds: observed <= threshold,
        samples,
        trailing_max,
        limit,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhRecord {
    pub probe_limits: Vec<(Complex64, LimitEstimate)>,
    /// Limits of the polynomial coefficients `c_0..c_{2κ+1}`.
    pub coefficient_limits: Vec<LimitEstimate>,
    pub window_limits: Vec<((f64, f64), LimitEstimate)>,
    /// Limit of total masses, when every measure is finite.
    pub total_mass_limit: Option<LimitEstimate>,
    /// `lim μ_n(ℝ) − lim μ_n(widest window)`.
    pub escaped_mass: Option<f64>,
    pub pointwise_converges: bool,
    pub representation_converges: bool,
    pub consistent: bool,
}

/// Checks the equivalence of pointwise convergence of `q_n` with convergence
/// of the polynomials plus vague convergence of the measures. The sequence is
/// given as `(n, pair)` with increasing `n`.
pub fn gh_convergence(
    seq: &[(f64, CauchyPair)],
    probes: &[Complex64],
    windows: &[(f64, f64)],
) -> Result<GhRecord> {
    if probes.len() < 3 {
        return Err(Error::BadParameters("need at least three probe points".into()));
    }
    let Some((_, first)) = seq.first() else {
        return Err(Error::InsufficientSamples { needed: 5, got: 0 });
    };
    let kappa = first.kappa();
    if let Some((_, p)) = seq.iter().find(|(_, p)| p.kappa() != kappa) {
        return Err(Error::KappaMismatch(kappa, p.kappa()));
    }
    let series = |g: &dyn Fn(&CauchyPair) -> Result<Complex64>| -> Result<LimitEstimate> {
        let samples: Vec<(f64, Complex64)> = seq.iter().map(|(n, p)| Ok((*n, g(p)?))).collect::<Result<_>>()?;
        extrapolate_limit(&samples)
    };
    let mut probe_limits = Vec::new();
    for &z in probes {
        probe_limits.push((z, series(&|p| cauchy_reg(p, z))?));
    }
    let mut coefficient_limits = Vec::new();
    for k in 0..=2 * kappa as usize + 1 {
        coefficient_limits.push(series(&|p| Ok(Complex64::new(p.polynomial().coeff(k), 0.0)))?);
    }
    let mut window_limits = Vec::new();
    for &(a, b) in windows {
        window_limits.push(((a, b), series(&|p| Ok(Complex64::new(p.measure().window_mass(a, b)?, 0.0)))?));
    }
    let finite = seq
        .iter()
        .map(|(_, p)| p.measure().total_mass())
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|m| m.is_finite());
    let total_mass_limit = if finite {
        Some(series(&|p| Ok(Complex64::new(p.measure().total_mass()?, 0.0)))?)
    } else {
        None
    };
    let widest = window_limits
        .iter()
        .max_by(|x, y| (x.0 .1 - x.0 .0).total_cmp(&(y.0 .1 - y.0 .0)));
    let escaped_mass = match (&total_mass_limit, widest) {
        (Some(total), Some((_, w))) if total.is_converged() && w.is_converged() => Some(total.real() - w.real()),
        _ => None,
    };
    let pointwise_converges = probe_limits.iter().all(|(_, l)| l.is_converged());
    let representation_converges = coefficient_limits.iter().all(LimitEstimate::is_converged)
        && window_limits.iter().all(|(_, l)| l.is_converged());
    Ok(GhRecord {
        consistent: pointwise_converges == representation_converges,
        probe_limits,
        coefficient_limits,
        window_limits,
        total_mass_limit,
        escaped_mass,
        pointwise_converges,
        representation_converges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{Density, Interval};
    use crate::registry::{escaping_atom_pair, growing_atoms_pair, log_pair_closed_form, log_pair_decomposition};
    use crate::transforms::HalfPlaneFunction;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn power_measure(exponent: f64, coeff: f64) -> Measure {
        Measure::zero()
            .with_piece(Interval::positive(), Density::Power { coeff, exponent })
            .unwrap()
    }

    #[test]
    fn radial_profile_of_model() {
        let omega = Complex64::from_polar(1.3, 0.2);
        let q = HalfPlaneFunction::model(0.5, omega);
        let z0 = c(0.5, 1.0);
        let prof = radial_limit_profile(&|z| q.eval(z), z0, &geometric_grid(10.0, 4.0, 8), &|r| r.sqrt()).unwrap();
        assert!((prof.xi.value - model_q(0.5, omega, z0)).norm() < 1e-12);
        assert!((prof.omega - omega).norm() < 1e-12);
        assert!(prof.consistent);
    }

    #[test]
    fn radial_profile_of_log_pair() {
        let q = log_pair_closed_form(2.0, 0.0);
        let prof =
            radial_limit_profile(&|z| q.eval(z), I, &geometric_grid(10.0, 4.0, 10), &|r: f64| r.ln()).unwrap();
        let want = c(-2.0, PI);
        assert!((prof.xi.value - want).norm() < 0.02 * want.norm(), "{:?}", prof.xi.value);
        assert!(prof.consistent);
    }

    #[test]
    fn measure_limits_examples() {
        let MeasureLimits::HalfLines { c_plus, c_minus } =
            tauberian_measure_limits(0.5, Complex64::from_polar(1.0, PI / 4.0)).unwrap()
        else {
            panic!()
        };
        assert!((c_plus - 2.0 / (3.0 * PI)).abs() < 1e-12 && c_minus.abs() < 1e-12);
        assert_eq!(tauberian_measure_limits(-1.0, c(2.0, 0.0)).unwrap(), MeasureLimits::Total(2.0));
        let MeasureLimits::HalfLines { c_plus, c_minus } = tauberian_measure_limits(1.0, c(2.0, 0.0)).unwrap() else {
            panic!()
        };
        assert!(c_plus.abs() < 1e-12 && c_minus.abs() < 1e-12);
        assert_eq!(
            tauberian_measure_limits(0.5, Complex64::from_polar(1.0, 2.0)).unwrap_err().code(),
            "not-in-range"
        );
    }

    #[test]
    fn asymmetry_matches_limits() {
        assert_eq!(asymmetry_classify(0.5, c(1.0, 0.0)), Asymmetry::Equal);
        assert_eq!(asymmetry_classify(0.5, Complex64::from_polar(1.0, 0.1)), Asymmetry::PlusGreater);
        assert_eq!(asymmetry_classify(1.0, c(2.0, 0.0)), Asymmetry::BothZero);
        let mut rng_state = 7u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let alpha = -0.9 + 4.8 * next();
            let arg = PI * (2.0 * next() - 1.0);
            let omega = Complex64::from_polar(0.5 + next(), arg);
            if !classify_model(alpha, omega).in_ninf {
                continue;
            }
            let MeasureLimits::HalfLines { c_plus, c_minus } = tauberian_measure_limits(alpha, omega).unwrap() else {
                panic!()
            };
            let tag = asymmetry_classify(alpha, omega);
            let d = c_plus - c_minus;
            match tag {
                Asymmetry::PlusGreater => assert!(d > 0.0, "{alpha} {omega}"),
                Asymmetry::MinusGreater => assert!(d < 0.0, "{alpha} {omega}"),
                Asymmetry::Equal => assert!(d.abs() < 1e-9),
                Asymmetry::BothZero => assert!(c_plus < 1e-9 && c_minus < 1e-9),
            }
        }
    }

    #[test]
    fn zeta_examples() {
        let sym = Measure::lebesgue();
        assert!((zeta_limit(&sym).unwrap().real() - 1.0).abs() < 1e-12);
        assert_eq!(zeta_limit(&power_measure(0.5, 1.5)).unwrap().real(), 0.0);
        let neg = Measure::zero().with_piece(Interval::negative(), Density::Power { coeff: 1.0, exponent: 0.0 }).unwrap();
        assert!(zeta_limit(&neg).unwrap().real().is_infinite());
        assert_eq!(zeta_limit(&Measure::zero()).unwrap_err().code(), "zero-measure");
        let (mu0, mu1, _) = log_pair_decomposition(2.0, 0.0).unwrap();
        let z = zeta_limit_on(&mu0.sum(&mu1), &geometric_grid(10.0, 10.0, 12)).unwrap();
        assert!((z.real() - 1.0).abs() < 0.02, "{:?}", z.value);
    }

    #[test]
    fn abelian_generic_example() {
        let mu = power_measure(0.5, 1.5);
        let prof = sym_profile(&mu, &geometric_grid(10.0, 4.0, 8)).unwrap();
        let law = abelian_predict(&mu, &prof, 0.0).unwrap();
        assert_eq!(law.case, LawCase::Generic);
        assert_eq!(law.p, 2);
        let omega = law.omega.unwrap();
        assert!((omega - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-9);
        let f = law.rate.eval(&mu, 100.0).unwrap();
        assert!((f - 1.5 * PI * 10.0).abs() < 1e-9 * f);
        let leb = Measure::lebesgue();
        let prof = sym_profile(&leb, &geometric_grid(10.0, 4.0, 8)).unwrap();
        assert_eq!(abelian_predict(&leb, &prof, 1.0).unwrap().case, LawCase::Excluded);
    }

    #[test]
    fn exceptional_examples() {
        let (mu0, mu1, mu2) = log_pair_decomposition(2.0, 0.0).unwrap();
        let law = exceptional_predict(&mu0, &mu1, &mu2, 1).unwrap();
        let (ep, em) = law.eta.unwrap();
        assert!((ep - 1.0).abs() < 0.02 && em.abs() < 0.02);
        assert!((law.omega.unwrap() - c(FRAC_PI_2, 1.0)).norm() < 0.02);
        let law = exceptional_predict(&mu0, &Measure::zero(), &mu2, 1).unwrap();
        assert_eq!(law.omega.unwrap(), c(FRAC_PI_2, 0.0));
        let (_, same, _) = log_pair_decomposition(1.5, 1.5).unwrap();
        assert!(exceptional_predict(&mu0, &same, &mu2, 1).unwrap().omega.unwrap().im.abs() < 1e-6);
    }

    #[test]
    fn imag_asymptote_cases() {
        let pair = crate::registry::tilde_pair(crate::registry::two_slope_measure(1.0, 2.0).unwrap(), 0.0).unwrap();
        let pred = imag_asymptote(&pair, 1.0).unwrap();
        assert!((pred.eval(pair.measure(), 100.0).unwrap() - 1.5 * PI).abs() < 1e-9);
        let finite = CauchyPair::standard(Measure::from_atoms([(1.0, 2.0), (-3.0, 1.0)]).unwrap()).unwrap();
        let pred = imag_asymptote(&finite, 0.0).unwrap();
        assert!((pred.eval(finite.measure(), 50.0).unwrap() - 3.0 / 50.0).abs() < 1e-15);
        assert_eq!(imag_asymptote(&finite, 3.0).unwrap_err().code(), "index-incompatible");
    }

    #[test]
    fn ratio_bound_symmetric() {
        let pair = CauchyPair::standard(Measure::lebesgue()).unwrap();
        let rb = ratio_bound_check(&pair, 0.5, &geometric_grid(10.0, 4.0, 6)).unwrap();
        assert!(rb.holds && rb.trailing_max < 1e-9);
    }

    #[test]
    fn gh_growing_and_escaping() {
        let ns: Vec<f64> = vec![6.25, 12.5, 25.0, 50.0, 100.0, 200.0];
        let probes = [c(0.0, 1.0), c(0.5, 1.0), c(-0.5, 1.2), c(0.2, 0.8), c(0.0, 1.5)];
        let windows = [(-5.0, 5.0), (0.0, 3.0)];
        let seq: Vec<_> = ns.iter().map(|&n| (n, growing_atoms_pair(n).unwrap())).collect();
        let rec = gh_convergence(&seq, &probes, &windows).unwrap();
        for (z, l) in &rec.probe_limits {
            assert!((l.value - z).norm() < 1e-3, "{z}: {}", l.value);
        }
        assert!((rec.coefficient_limits[1].real() - 1.0).abs() < 1e-6 && rec.coefficient_limits[0].real().abs() < 1e-12);
        assert!(rec.consistent && rec.pointwise_converges);
        let seq: Vec<_> = ns.iter().map(|&n| (n, escaping_atom_pair(n).unwrap())).collect();
        let rec = gh_convergence(&seq, &probes, &windows).unwrap();
        assert!((rec.escaped_mass.unwrap() - 1.0).abs() < 1e-9);
        for (_, l) in &rec.probe_limits {
            assert!(l.value.norm() < 1e-3);
        }
        let mixed = vec![seq[0].clone(), (1.0, embed_one(&seq[1].1))];
        assert_eq!(gh_convergence(&mixed, &probes, &windows).unwrap_err().code(), "kappa-mismatch");
    }

    fn embed_one(p: &CauchyPair) -> CauchyPair {
        crate::transforms::embed(p, 1).unwrap()
    }
}
