//! Regular variation: index estimation from ratio traces, Karamata's theorems
//! for primitives and Stieltjes transforms, the asymptotics of weighted
//! Stieltjes transforms, and the atomic counterexample measures.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::measures::{Measure, Side, TailPair, WeightKind};
use crate::numerics::{
    extrapolate_real, integrate, ExtrapolationOptions, IntegrandSpec, LimitEstimate, Tail, Verdict,
};
use crate::transforms::{CauchyPair, TRANSFORM_REL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RvVerdict {
    RegularlyVarying,
    NotRegularlyVarying,
    Undetermined,
}

/// Extrapolated `F(λr)/F(r)` for one `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTrace {
    pub lambda: f64,
    pub limit: LimitEstimate,
    /// `log(limit)/log(λ)` when the trace converged to a positive value.
    pub index: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegVarProfile {
    /// Common index; `None` unless the verdict is regularly varying.
    pub index: Option<f64>,
    pub verdict: RvVerdict,
    pub diagnostics: Vec<LambdaTrace>,
}

#[derive(Debug, Clone, Copy)]
pub struct RvOptions {
    /// Agreement required between per-λ index estimates (absolute, and
    /// relative for indices above 1).
    pub index_tol: f64,
    pub extrapolation: ExtrapolationOptions,
}

impl Default for RvOptions {
    fn default() -> Self {
        RvOptions {
            index_tol: 0.02,
            extrapolation: ExtrapolationOptions::default(),
        }
    }
}

pub fn rv_index(f: &dyn Fn(f64) -> f64, lambdas: &[f64], grid: &[f64]) -> Result<RegVarProfile> {
    rv_index_with(f, lambdas, grid, &RvOptions::default())
}

pub fn rv_index_with(
    f: &dyn Fn(f64) -> f64,
    lambdas: &[f64],
    grid: &[f64],
    opts: &RvOptions,
) -> Result<RegVarProfile> {
    let mut distinct: Vec<f64> = lambdas.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 || distinct.iter().any(|l| !(*l > 1.0 && l.is_finite())) {
        return Err(Error::BadParameters(
            "need at least two distinct λ values above 1".into(),
        ));
    }
    if grid.len() < 6 {
        return Err(Error::InsufficientSamples {
            needed: 6,
            got: grid.len(),
        });
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] < 2.0 * w[0] * (1.0 - 1e-12)) {
        return Err(Error::BadParameters("grid must be positive with ratio ≥ 2".into()));
    }
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NotPositive(x))
        }
    };
    let base: Vec<f64> = grid.iter().map(|&r| eval(r)).collect::<Result<_>>()?;
    let mut diagnostics = Vec::new();
    for &lambda in &distinct {
        let samples: Vec<(f64, f64)> = grid
            .iter()
            .zip(&base)
            .map(|(&r, &fr)| Ok((r, eval(lambda * r)? / fr)))
            .collect::<Result<_>>()?;
        let limit = extrapolate_real(&samples, &opts.extrapolation)?;
        let index = (limit.is_converged() && limit.real() > 0.0).then(|| limit.real().ln() / lambda.ln());
        diagnostics.push(LambdaTrace { lambda, limit, index });
    }
    let bad = diagnostics.iter().any(|d| {
        matches!(
            d.limit.verdict,
            Verdict::Oscillates | Verdict::DivergesToInfinity
        )
    });
    let indices: Vec<f64> = diagnostics.iter().filter_map(|d| d.index).collect();
    let (index, verdict) = if bad {
        (None, RvVerdict::NotRegularlyVarying)
    } else if indices.len() == diagnostics.len() {
        let mean = indices.iter().sum::<f64>() / indices.len() as f64;
        let spread = indices.iter().fold(0.0_f64, |m, i| m.max((i - mean).abs()));
        if spread <= opts.index_tol * mean.abs().max(1.0) {
            (Some(mean), RvVerdict::RegularlyVarying)
        } else {
            (None, RvVerdict::NotRegularlyVarying)
        }
    } else {
        (None, RvVerdict::Undetermined)
    };
    Ok(RegVarProfile {
        index,
        verdict,
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimitiveDirection {
    /// `x f(x) / ∫_{x₀}^x f`
    Head,
    /// `x f(x) / ∫_x^∞ f`
    Tail,
}

/// Karamata's primitive ratio; its limit is `α+1` (head) or `−(α+1)` (tail).
///
/// `tail` declares `f(t) ≍ t^power (log t)^log_power` at infinity.
pub fn karamata_primitive_ratio(
    f: &(dyn Fn(f64) -> f64 + Sync),
    tail: Tail,
    x0: f64,
    x: f64,
    direction: PrimitiveDirection,
) -> Result<f64> {
    if !(x > x0 && x0 > 0.0) {
        return Err(Error::BadParameters(format!("need 0 < x₀ < x, got {x0}, {x}")));
    }
    let spec = match direction {
        PrimitiveDirection::Head => IntegrandSpec::real(f, x0, x),
        PrimitiveDirection::Tail => IntegrandSpec::real(f, x, f64::INFINITY).upper_tail(tail),
    };
    let denom = integrate(&spec, TRANSFORM_REL_TOL)?.value.re;
    Ok(x * f(x) / denom)
}

/// `C_α = πα(1−α)/sin(πα)` on `(0,1)`, `1` at the endpoints.
pub fn karamata_constant(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::IndexOutOfRange(alpha));
    }
    if alpha == 0.0 || alpha == 1.0 {
        return Ok(1.0);
    }
    let pa = std::f64::consts::PI * alpha;
    Ok(pa * (1.0 - alpha) / pa.sin())
}

/// `πα/sin(πα)`, read as `1` at `α = 0`.
fn ratio_constant(alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        let pa = std::f64::consts::PI * alpha;
        pa / pa.sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoteForm {
    /// `C_α ∫_x^∞ ν([0,t))/t² dt`
    TailIntegral,
    /// `πα/sin(πα) · ν([0,x))/x`, for `α < 1`.
    Ratio,
}

fn on_half_line(nu: &Measure) -> Result<()> {
    let bad = nu.atoms().iter().any(|a| a.position < 0.0) || nu.pieces().iter().any(|p| p.support.lo < 0.0);
    if bad {
        Err(Error::BadParameters("measure must live on [0,∞)".into()))
    } else {
        Ok(())
    }
}

/// `∫_x^∞ ν([0,t))/t² dt = ∫ dν(a)/max(x,a)`.
pub fn distribution_tail_integral(nu: &Measure, x: f64) -> Result<f64> {
    on_half_line(nu)?;
    nu.integrate_real(&|a| 1.0 / a.max(x), Tail::power(-1.0), &[x], TRANSFORM_REL_TOL)
        .map_err(|e| match e {
            Error::TransformUndefined(m) => Error::DivergentIntegral(m),
            other => other,
        })
}

/// Predicted leading term of `S[ν](x)` for a distribution with index `alpha`.
pub fn stieltjes_asymptote(nu: &Measure, alpha: f64, x: f64, form: AsymptoteForm) -> Result<f64> {
    let c = karamata_constant(alpha)?;
    on_half_line(nu)?;
    match form {
        AsymptoteForm::TailIntegral => Ok(c * distribution_tail_integral(nu, x)?),
        AsymptoteForm::Ratio => {
            if alpha >= 1.0 {
                return Err(Error::IndexOutOfRange(alpha));
            }
            Ok(ratio_constant(alpha) * nu.distribution(Side::Pos, x)? / x)
        }
    }
}

/// `S[ν](x₁) − S[ν](x₂)`, finite whenever `∫(1+t)^(-2) dν < ∞` even if `S[ν]` is not.
pub fn stieltjes_increment(nu: &Measure, x1: f64, x2: f64) -> Result<f64> {
    if !(0.0 < x1 && x1 < x2) {
        return Err(Error::BadParameters(format!("need 0 < x₁ < x₂, got {x1}, {x2}")));
    }
    on_half_line(nu)?;
    let d = x2 - x1;
    nu.integrate_real(
        &|t| d / ((t + x1) * (t + x2)),
        Tail::power(-2.0),
        &[x1, x2],
        TRANSFORM_REL_TOL,
    )
}

/// `C_α ∫_{x₁}^{x₂} ν([0,t))/t² dt`, the increment form of the tail-integral asymptote.
pub fn stieltjes_increment_asymptote(nu: &Measure, alpha: f64, x1: f64, x2: f64) -> Result<f64> {
    let c = karamata_constant(alpha)?;
    if !(0.0 < x1 && x1 < x2) {
        return Err(Error::BadParameters(format!("need 0 < x₁ < x₂, got {x1}, {x2}")));
    }
    on_half_line(nu)?;
    let kernel = |a: f64| {
        if a >= x2 {
            0.0
        } else {
            1.0 / a.max(x1) - 1.0 / x2
        }
    };
    Ok(c * nu.integrate_real(&kernel, COMPACT_KERNEL, &[x1, x2], TRANSFORM_REL_TOL)?)
}

/// `S[h·ν](x)` for a weight `h(t) ≍ t^gamma`.
pub fn weighted_stieltjes(
    nu: &Measure,
    h: &(dyn Fn(f64) -> f64 + Sync),
    gamma: f64,
    x: f64,
) -> Result<f64> {
    on_half_line(nu)?;
    nu.integrate_real(
        &|t| h(t) / (t + x),
        Tail::power(gamma - 1.0),
        &[x],
        TRANSFORM_REL_TOL,
    )
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Predicted leading term of `S[σ](x)` for `dσ = h dν`, `h(t) ∼ t^γ`, when
/// `ν([0,t))` varies regularly with index `α > 0`.
///
/// The three regimes `α+γ ∈ (0,1)`, `= 0`, `= 1` are told apart exactly.
pub fn weighted_rv_asymptote(nu: &Measure, alpha: Rational64, gamma: Rational64, x: f64) -> Result<f64> {
    on_half_line(nu)?;
    let zero = Rational64::from_integer(0);
    let one = Rational64::from_integer(1);
    if gamma == zero {
        return Err(Error::BadParameters("γ must be nonzero".into()));
    }
    if alpha <= zero {
        return Err(Error::HypothesisViolated(format!(
            "the asymptote needs α > 0, got {alpha}"
        )));
    }
    let (a, g) = (to_f64(alpha), to_f64(gamma));
    let h_diverges = !nu.integrable_against(Tail::power(g))?;
    let h1_converges = nu.integrable_against(Tail::power(g - 1.0))?;
    if !(h_diverges && h1_converges) {
        return Err(Error::HypothesisViolated(
            "need ∫h dν = ∞ and ∫h/(1+t) dν < ∞".into(),
        ));
    }
    let s = alpha + gamma;
    if s < zero || s > one {
        return Err(Error::HypothesisViolated(format!("α+γ = {s} outside [0,1]")));
    }
    if s == zero {
        // (α/x)∫_1^x t^(γ−1) ν([0,t)) dt = (α/x) ∫ dν(u) (x^γ − max(1,u)^γ)/γ over u < x
        let kernel = |u: f64| {
            if u >= x {
                0.0
            } else {
                (x.powf(g) - u.max(1.0).powf(g)) / g
            }
        };
        let v = nu.integrate_real(&kernel, COMPACT_KERNEL, &[1.0, x], TRANSFORM_REL_TOL)?;
        Ok(a / x * v)
    } else if s == one {
        // α∫_x^∞ t^(γ−2) ν([0,t)) dt = α ∫ dν(u) max(x,u)^(γ−1)/(1−γ)
        let kernel = |u: f64| u.max(x).powf(g - 1.0) / (1.0 - g);
        let v = nu.integrate_real(&kernel, Tail::power(g - 1.0), &[x], TRANSFORM_REL_TOL)?;
        Ok(a * v)
    } else {
        let pi = std::f64::consts::PI;
        Ok(pi * a / (pi * to_f64(s)).sin() * x.powf(g - 1.0) * nu.distribution(Side::Pos, x)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterexampleKind {
    /// Unit atoms at `e^k`: slowly varying distribution, irregular composition.
    StepAtoms,
    /// `ν` with masses `(1+e^k)^m` at `e^k`, so that `(1+s)^(-m)ν` has unit atoms.
    WeightedStep,
    /// Symmetric atoms `±e^(n/2)` with masses `(1+e^n)^κ`.
    SymmetricKappa,
    /// One-sided atoms `e^(k/2)` with masses `(1+e^k)^ℓ/e^(k/2)`.
    OneSidedEll,
}

impl CounterexampleKind {
    pub fn label(self) -> &'static str {
        match self {
            CounterexampleKind::StepAtoms => "step-atoms",
            CounterexampleKind::WeightedStep => "weighted-step",
            CounterexampleKind::SymmetricKappa => "symmetric-kappa",
            CounterexampleKind::OneSidedEll => "one-sided-ell",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "step-atoms" => Some(CounterexampleKind::StepAtoms),
            "weighted-step" => Some(CounterexampleKind::WeightedStep),
            "symmetric-kappa" => Some(CounterexampleKind::SymmetricKappa),
            "one-sided-ell" => Some(CounterexampleKind::OneSidedEll),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// `σ([1,t))`
    Distribution,
    /// `S[σ](x)`
    WeightedStieltjes,
    ReQ,
    ImQ,
}

/// `coefficient · y^power · (log y)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLogLaw {
    pub quantity: Quantity,
    pub coefficient: f64,
    pub power: f64,
    pub log_power: f64,
}

impl PowerLogLaw {
    pub fn eval(&self, y: f64) -> f64 {
        self.coefficient * y.powf(self.power) * y.ln().powf(self.log_power)
    }
}

/// Asymptotics stated for a counterexample: a leading law and, optionally,
/// an upper bound on a secondary quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceAsymptotics {
    pub leading: PowerLogLaw,
    pub bound: Option<PowerLogLaw>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub kind: CounterexampleKind,
    pub order: u32,
    pub measure: Measure,
    /// Number of atoms kept in each family.
    pub atoms_kept: usize,
    /// A priori bound on the dropped tail's contribution to probed transforms.
    pub truncation_error: f64,
    pub reference: ReferenceAsymptotics,
}

impl Counterexample {
    /// Pair with `κ = κ(μ)` and the standard polynomial normalisation.
    pub fn pair(&self) -> Result<CauchyPair> {
        CauchyPair::standard(self.measure.clone())
    }

    /// The untruncated distribution `μ((−t,t))` (or `σ([0,t))` on the half line).
    pub fn exact_sym_distribution(&self, t: f64) -> f64 {
        family_distribution(self.kind, self.order, t)
    }
}

fn family_atom(kind: CounterexampleKind, order: u32, k: u32) -> (f64, f64) {
    let kf = k as f64;
    let m = order as i32;
    match kind {
        CounterexampleKind::StepAtoms => (kf.exp(), 1.0),
        CounterexampleKind::WeightedStep => (kf.exp(), (1.0 + kf.exp()).powi(m)),
        CounterexampleKind::SymmetricKappa => ((kf / 2.0).exp(), (1.0 + kf.exp()).powi(m)),
        CounterexampleKind::OneSidedEll => ((kf / 2.0).exp(), (1.0 + kf.exp()).powi(m) / (kf / 2.0).exp()),
    }
}

fn family_distribution(kind: CounterexampleKind, order: u32, t: f64) -> f64 {
    let copies = if kind == CounterexampleKind::SymmetricKappa { 2.0 } else { 1.0 };
    let mut total = 0.0;
    let mut k = 1;
    loop {
        let (pos, mass) = family_atom(kind, order, k);
        if pos >= t {
            return total;
        }
        total += copies * mass;
        k += 1;
    }
}

/// `f(x) = Σ_{e^k < x} g(e^k)` with `g(t) = t^γ`, summed without truncation.
pub fn step_composition(gamma: f64) -> impl Fn(f64) -> f64 + Send + Sync {
    move |x: f64| {
        let mut total = 0.0;
        let mut k = 1.0;
        while k < x.ln() {
            total += (gamma * k).exp();
            k += 1.0;
        }
        total
    }
}

/// Declared tail for kernels that vanish beyond a finite point.
const COMPACT_KERNEL: Tail = Tail::power(-64.0);

const TRUNCATION_TARGET: f64 = 1e-10;

/// Builds the atomic counterexample measure, truncated so that transforms
/// probed at `|z| ≤ probe_top` (and distributions up to `probe_top`) are
/// affected by less than `1e-10`.
pub fn build_counterexample(kind: CounterexampleKind, order: u32, probe_top: f64) -> Result<Counterexample> {
    if !(probe_top >= 1.0 && probe_top.is_finite()) {
        return Err(Error::BadParameters(format!("probe top {probe_top}")));
    }
    match kind {
        CounterexampleKind::SymmetricKappa | CounterexampleKind::OneSidedEll if order < 1 => {
            return Err(Error::BadParameters(format!("{} needs order ≥ 1", kind.label())))
        }
        _ => {}
    }
    if order > 6 {
        return Err(Error::BadParameters(format!("order {order} too large")));
    }
    let y2 = 1.0 + probe_top * probe_top;
    let m = order as f64;
    // bound on the contribution of atom k when it lies beyond 2·probe_top
    let bound = |k: f64| -> f64 {
        match kind {
            CounterexampleKind::StepAtoms | CounterexampleKind::WeightedStep => (-k).exp(),
            CounterexampleKind::SymmetricKappa => 4.0 * y2.powf(m + 1.0) * (-1.5 * k).exp(),
            CounterexampleKind::OneSidedEll => 2.0 * y2.powf(m) * (-k).exp(),
        }
    };
    let position = |k: f64| match kind {
        CounterexampleKind::StepAtoms | CounterexampleKind::WeightedStep => k.exp(),
        _ => (k / 2.0).exp(),
    };
    let mut n: u32 = 1;
    let tail_sum = |n: u32| (n + 1..n + 400).map(|k| bound(k as f64)).sum::<f64>();
    while position(n as f64) < 16.0 * probe_top || tail_sum(n) >= TRUNCATION_TARGET {
        n += 1;
        if n > 2000 {
            return Err(Error::BadParameters("truncation does not settle".into()));
        }
    }
    let truncation_error = tail_sum(n);
    let mut atoms = Vec::new();
    for k in 1..=n {
        let (pos, mass) = family_atom(kind, order, k);
        atoms.push((pos, mass));
        if kind == CounterexampleKind::SymmetricKappa {
            atoms.push((-pos, mass));
        }
    }
    let envelope = match kind {
        CounterexampleKind::StepAtoms => TailPair {
            upper: Some(Tail::power(-1.0)),
            lower: None,
        },
        CounterexampleKind::WeightedStep => TailPair {
            upper: Some(Tail::power(m - 1.0)),
            lower: None,
        },
        CounterexampleKind::SymmetricKappa => TailPair {
            upper: Some(Tail::power(2.0 * m - 1.0)),
            lower: Some(Tail::power(2.0 * m - 1.0)),
        },
        CounterexampleKind::OneSidedEll => TailPair {
            upper: Some(Tail::power(2.0 * m - 2.0)),
            lower: None,
        },
    };
    let measure = Measure::from_atoms(atoms)?.with_atom_envelope(envelope);
    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
    let pe = std::f64::consts::E.sqrt();
    let reference = match kind {
        CounterexampleKind::StepAtoms => ReferenceAsymptotics {
            leading: PowerLogLaw {
                quantity: Quantity::Distribution,
                coefficient: 1.0,
                power: 0.0,
                log_power: 1.0,
            },
            bound: None,
            note: "σ([1,t)) ~ log t; t ↦ Σ_{e^k<t} g(e^k) is not regularly varying".into(),
        },
        CounterexampleKind::WeightedStep => ReferenceAsymptotics {
            leading: PowerLogLaw {
                quantity: Quantity::WeightedStieltjes,
                coefficient: 1.0,
                power: -1.0,
                log_power: 1.0,
            },
            bound: None,
            note: "S[σ](x) ~ log x / x with σ = (1+s)^-m ν, while ν([0,x)) is not regularly varying".into(),
        },
        CounterexampleKind::SymmetricKappa => ReferenceAsymptotics {
            leading: PowerLogLaw {
                quantity: Quantity::ImQ,
                // both atoms ±e^(n/2) carry the full mass, so μ_* has masses 2(1+e^n)^κ
                coefficient: 4.0 * sign,
                power: 2.0 * m - 1.0,
                log_power: 1.0,
            },
            bound: None,
            note: "Im q(iy) ~ 4(-1)^κ y^(2κ-1) log y and Re q(iy) = 0; μ((-t,t)) is not regularly varying".into(),
        },
        CounterexampleKind::OneSidedEll => ReferenceAsymptotics {
            leading: PowerLogLaw {
                quantity: Quantity::ReQ,
                coefficient: 2.0 * sign,
                power: 2.0 * m - 2.0,
                log_power: 1.0,
            },
            bound: Some(PowerLogLaw {
                quantity: Quantity::ImQ,
                coefficient: std::f64::consts::PI * pe / (pe - 1.0),
                power: 2.0 * m - 2.0,
                log_power: 0.0,
            }),
            note: "Re q(iy) ~ 2(-1)^ℓ y^(2ℓ-2) log y dominates |Im q(iy)|; μ((-t,t)) is not regularly varying".into(),
        },
    };
    Ok(Counterexample {
        kind,
        order,
        measure,
        atoms_kept: n as usize,
        truncation_error,
        reference,
    })
}

/// `σ_ℓ` of a counterexample measure, shortcut for the weighted measure used in its asymptotics.
pub fn counterexample_sigma(ce: &Counterexample) -> Result<Measure> {
    match ce.kind {
        CounterexampleKind::OneSidedEll => ce.measure.weighted_measure(WeightKind::SigmaEll, ce.order),
        _ => Err(Error::BadParameters("σ_ℓ is defined for the one-sided family".into())),
    }
}
