//! Adaptive Gauss–Kronrod quadrature over finite and unbounded intervals.
//!
//! Unbounded ends are mapped onto `(0, 1]` with `t = T·u^(-k)`, where `k` is
//! picked from the declared tail exponent so that the mapped integrand stays
//! bounded near `u = 0`. Tails of the form `t^(-1)·(log t)^m` with `m < -1`
//! go through `t = exp(S·u^(-k))` instead.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_223_048,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const MAX_PANELS: usize = 20_000;
const MAX_PV_DOUBLINGS: usize = 200;

/// Asymptotic size `|f(t)| ≍ |t|^power · (log|t|)^log_power` at an infinite end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tail {
    pub power: f64,
    pub log_power: f64,
}

impl Tail {
    pub const fn new(power: f64, log_power: f64) -> Self {
        Tail { power, log_power }
    }

    pub const fn power(power: f64) -> Self {
        Tail { power, log_power: 0.0 }
    }

    /// Whether `∫^∞ t^power (log t)^log_power dt` converges.
    pub fn is_integrable(&self) -> bool {
        self.power < -1.0 || (self.power == -1.0 && self.log_power < -1.0)
    }

    /// Tail of the pointwise product of two functions.
    pub fn times(self, other: Tail) -> Tail {
        Tail::new(self.power + other.power, self.log_power + other.log_power)
    }

    /// Tail of `t^p · f(t)`.
    pub fn shift(self, p: f64) -> Tail {
        Tail::new(self.power + p, self.log_power)
    }
}

/// An integrand together with its domain and declared tail behaviour.
pub struct IntegrandSpec<'a> {
    f: Box<dyn Fn(f64) -> Complex64 + Sync + 'a>,
    lo: f64,
    hi: f64,
    lower_tail: Option<Tail>,
    upper_tail: Option<Tail>,
    breakpoints: Vec<f64>,
    principal_value: bool,
    abs_tol: f64,
}

impl<'a> IntegrandSpec<'a> {
    /// Complex-valued integrand on `[lo, hi]`; either end may be infinite.
    pub fn new(f: impl Fn(f64) -> Complex64 + Sync + 'a, lo: f64, hi: f64) -> Self {
        IntegrandSpec {
            f: Box::new(f),
            lo,
            hi,
            lower_tail: None,
            upper_tail: None,
            breakpoints: Vec::new(),
            principal_value: false,
            abs_tol: 0.0,
        }
    }

    pub fn real(f: impl Fn(f64) -> f64 + Sync + 'a, lo: f64, hi: f64) -> Self {
        Self::new(move |t| Complex64::new(f(t), 0.0), lo, hi)
    }

    pub fn upper_tail(mut self, tail: Tail) -> Self {
        self.upper_tail = Some(tail);
        self
    }

    pub fn lower_tail(mut self, tail: Tail) -> Self {
        self.lower_tail = Some(tail);
        self
    }

    /// Declares the same tail at both infinite ends.
    pub fn tails(self, tail: Tail) -> Self {
        self.upper_tail(tail).lower_tail(tail)
    }

    /// Points where the integrand changes scale or is not smooth.
    pub fn breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points.into_iter().filter(|p| p.is_finite()));
        self
    }

    /// Absolute error target accepted in place of the relative one; useful
    /// when the integrand cancels to a value far below its pointwise size.
    pub fn abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol.max(0.0);
        self
    }

    /// Symmetric truncation `[-R, R]` with doubling `R`; only valid on the whole line.
    pub fn principal_value(mut self) -> Self {
        self.principal_value = true;
        self
    }
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub err_est: f64,
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Direct,
    // t = T·u^(-k), sign +1 for [T, ∞), -1 for (-∞, -T]
    PowerTail { t0: f64, k: f64, sign: f64 },
    // t = exp(S·u^(-k))
    LogTail { s0: f64, k: f64, sign: f64 },
}

impl Map {
    #[inline]
    fn eval(&self, f: &(dyn Fn(f64) -> Complex64 + Sync + '_), u: f64) -> Result<Complex64> {
        let (t, jac) = match *self {
            Map::Direct => (u, 1.0),
            Map::PowerTail { t0, k, sign } => {
                let t = t0 * u.powf(-k);
                (sign * t, k * t / u)
            }
            Map::LogTail { s0, k, sign } => {
                let s = s0 * u.powf(-k);
                let t = s.exp();
                (sign * t, t * k * s / u)
            }
        };
        if !t.is_finite() || !jac.is_finite() {
            // beyond the floating-point range; the tail there is below resolution
            return Ok(Complex64::new(0.0, 0.0));
        }
        let v = f(t) * jac;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::IntegrandSingularity(t));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    map: Map,
    value: Complex64,
    err: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod(
    f: &(dyn Fn(f64) -> Complex64 + Sync + '_),
    map: Map,
    a: f64,
    b: f64,
) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = map.eval(f, center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = Complex64::new(0.0, 0.0);
    let mut res_abs = fc.norm() * WGK[10];
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = map.eval(f, center - dx)?;
        let f2 = map.eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel {
        a,
        b,
        map,
        value,
        err,
        abs: res_abs,
    })
}

/// Cut points for a finite range, adding geometric refinement toward zero so
/// that features near the origin are not skipped by wide panels.
fn finite_cuts(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut cuts = vec![a, b];
    cuts.extend(breakpoints.iter().copied().filter(|p| *p > a && *p < b));
    if a < 0.0 && b > 0.0 {
        cuts.push(0.0);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut refined = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        refined.push(lo);
        if lo >= 0.0 {
            geometric_fill(lo, hi, &mut refined);
        } else if hi <= 0.0 {
            let mut mirrored = Vec::new();
            geometric_fill(-hi, -lo, &mut mirrored);
            refined.extend(mirrored.into_iter().rev().map(|p| -p));
        }
    }
    refined.push(*cuts.last().unwrap());
    refined.dedup();
    refined
}

// Inserts points hi/4, hi/16, ... strictly between lo and hi (ascending) for 0 <= lo < hi.
fn geometric_fill(lo: f64, hi: f64, out: &mut Vec<f64>) {
    if hi <= 16.0 * lo {
        return;
    }
    let floor = (4.0 * lo).max(hi * 1e-12);
    let mut pts = Vec::new();
    let mut p = hi / 4.0;
    while p > floor {
        pts.push(p);
        p /= 4.0;
    }
    out.extend(pts.into_iter().rev());
}

fn tail_map(tail: Tail, start: f64, sign: f64) -> Map {
    if tail.power == -1.0 {
        let s0 = start.ln().max(1.0);
        Map::LogTail {
            s0,
            k: -1.0 / (tail.log_power + 1.0),
            sign,
        }
    } else {
        let k = if tail.power <= -2.0 {
            1.0
        } else {
            -1.0 / (tail.power + 1.0)
        };
        Map::PowerTail { t0: start, k, sign }
    }
}

fn check_tail(tail: Option<Tail>, end: &str) -> Result<Tail> {
    let tail = tail.ok_or_else(|| {
        Error::DivergentIntegral(format!("no tail declared at the {end} infinite end"))
    })?;
    if !(tail.power.is_finite() && tail.log_power.is_finite()) || !tail.is_integrable() {
        return Err(Error::DivergentIntegral(format!(
            "{end} tail t^{} (log t)^{} is not integrable",
            tail.power, tail.log_power
        )));
    }
    Ok(tail)
}

fn run_adaptive(
    f: &(dyn Fn(f64) -> Complex64 + Sync + '_),
    initial: Vec<(f64, f64, Map)>,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature> {
    let mut heap = BinaryHeap::new();
    for (a, b, map) in initial {
        if b > a {
            heap.push(kronrod(f, map, a, b)?);
        }
    }
    loop {
        let (value, err, abs) = heap.iter().fold(
            (Complex64::new(0.0, 0.0), 0.0, 0.0),
            |(v, e, s), p| (v + p.value, e + p.err, s + p.abs),
        );
        let tol = (rel_tol * value.norm())
            .max(100.0 * f64::EPSILON * abs)
            .max(abs_tol);
        if err <= tol || heap.is_empty() {
            return Ok(Quadrature { value, err_est: err });
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::SubdivisionLimit {
                value: value.norm(),
                err_est: err,
            });
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point; keep it as is
            let mut frozen = worst;
            frozen.err = 0.0;
            heap.push(frozen);
            continue;
        }
        heap.push(kronrod(f, worst.map, worst.a, mid)?);
        heap.push(kronrod(f, worst.map, mid, worst.b)?);
    }
}

/// Integrates `spec` to relative tolerance `rel_tol`.
///
/// The returned error estimate is the sum of the per-panel Kronrod estimates;
/// an absolute floor proportional to `∫|f|` takes over when the integral
/// cancels to (near) zero.
pub fn integrate(spec: &IntegrandSpec<'_>, rel_tol: f64) -> Result<Quadrature> {
    let f: &(dyn Fn(f64) -> Complex64 + Sync) = spec.f.as_ref();
    let (lo, hi) = (spec.lo, spec.hi);
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::BadParameters("NaN integration bound".into()));
    }
    if hi <= lo {
        return Ok(Quadrature {
            value: Complex64::new(0.0, 0.0),
            err_est: 0.0,
        });
    }
    let rel_tol = rel_tol.max(10.0 * f64::EPSILON);
    let scale = spec
        .breakpoints
        .iter()
        .chain([lo, hi].iter())
        .filter(|p| p.is_finite())
        .fold(1.0_f64, |m, p| m.max(p.abs()));

    if spec.principal_value {
        if lo.is_finite() || hi.is_finite() {
            return Err(Error::BadParameters(
                "principal value needs the whole real line".into(),
            ));
        }
        return principal_value(f, &spec.breakpoints, 2.0 * scale, rel_tol, spec.abs_tol);
    }

    let t0 = 2.0 * scale;
    let mut panels = Vec::new();
    let a = if lo.is_finite() { lo } else { -t0 };
    let b = if hi.is_finite() { hi } else { t0 };
    if hi.is_infinite() {
        let tail = check_tail(spec.upper_tail, "upper")?;
        panels.push((0.0, 1.0, tail_map(tail, t0, 1.0)));
    }
    if lo.is_infinite() {
        let tail = check_tail(spec.lower_tail, "lower")?;
        panels.push((0.0, 1.0, tail_map(tail, t0, -1.0)));
    }
    let cuts = finite_cuts(a, b, &spec.breakpoints);
    for w in cuts.windows(2) {
        panels.push((w[0], w[1], Map::Direct));
    }
    run_adaptive(f, panels, rel_tol, spec.abs_tol)
}

fn principal_value(
    f: &(dyn Fn(f64) -> Complex64 + Sync + '_),
    breakpoints: &[f64],
    r0: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature> {
    let cuts = finite_cuts(-r0, r0, breakpoints);
    let panels = cuts.windows(2).map(|w| (w[0], w[1], Map::Direct)).collect();
    let mut total = run_adaptive(f, panels, rel_tol, abs_tol)?;
    let mut r = r0;
    for _ in 0..MAX_PV_DOUBLINGS {
        let shell = run_adaptive(
            f,
            vec![(-2.0 * r, -r, Map::Direct), (r, 2.0 * r, Map::Direct)],
            rel_tol,
            abs_tol,
        )?;
        total.value += shell.value;
        total.err_est += shell.err_est;
        r *= 2.0;
        if shell.value.norm() < rel_tol * total.value.norm().max(f64::MIN_POSITIVE) {
            total.err_est += shell.value.norm();
            return Ok(total);
        }
    }
    Err(Error::DivergentIntegral(
        "symmetric truncation did not settle".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn re(spec: IntegrandSpec<'_>, tol: f64) -> f64 {
        integrate(&spec, tol).unwrap().value.re
    }

    #[test]
    fn exponential_on_half_line() {
        // e^{-t} decays faster than any power; declaring -2 is valid
        let v = re(
            IntegrandSpec::real(|t| (-t).exp(), 0.0, f64::INFINITY).upper_tail(Tail::power(-2.0)),
            1e-12,
        );
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lorentzian_on_line() {
        let v = re(
            IntegrandSpec::real(|t| 1.0 / (1.0 + t * t), f64::NEG_INFINITY, f64::INFINITY)
                .tails(Tail::power(-2.0)),
            1e-12,
        );
        assert!((v - PI).abs() < 1e-10);
    }

    #[test]
    fn sqrt_singularity_with_slow_tail() {
        let v = re(
            IntegrandSpec::real(|t| t.powf(-0.5) / (t + 1.0), 0.0, f64::INFINITY)
                .upper_tail(Tail::power(-1.5)),
            1e-12,
        );
        assert!((v - PI).abs() < 1e-9, "{v}");
    }

    #[test]
    fn log_power_tail() {
        // ∫_e^∞ dt / (t log² t) = 1
        let v = re(
            IntegrandSpec::real(|t| 1.0 / (t * t.ln().powi(2)), std::f64::consts::E, f64::INFINITY)
                .upper_tail(Tail::new(-1.0, -2.0)),
            1e-10,
        );
        // mass beyond exp(709) is about 1/709 and not representable
        assert!((v - 1.0).abs() < 2e-3, "{v}");
    }

    #[test]
    fn divergent_tail_is_rejected() {
        let spec = IntegrandSpec::real(|t| 1.0 / (1.0 + t), 0.0, f64::INFINITY)
            .upper_tail(Tail::power(-1.0));
        assert_eq!(integrate(&spec, 1e-8).unwrap_err().code(), "divergent-integral");
        let undeclared = IntegrandSpec::real(|t| 1.0 / (1.0 + t * t), 0.0, f64::INFINITY);
        assert_eq!(integrate(&undeclared, 1e-8).unwrap_err().code(), "divergent-integral");
    }

    #[test]
    fn non_finite_value_is_reported() {
        let bad = IntegrandSpec::real(|_| f64::NAN, 0.0, 1.0);
        assert_eq!(integrate(&bad, 1e-8).unwrap_err().code(), "integrand-singularity");
    }

    #[test]
    fn principal_value_of_cauchy_kernel() {
        let y = 2.0;
        let spec = IntegrandSpec::new(
            move |t| Complex64::new(1.0, 0.0) / Complex64::new(t, -y),
            f64::NEG_INFINITY,
            f64::INFINITY,
        )
        .principal_value();
        let q = integrate(&spec, 1e-8).unwrap();
        assert!(q.value.re.abs() < 1e-9);
        assert!((q.value.im - PI).abs() < 1e-6, "{}", q.value);
    }

    #[test]
    fn oscillating_zero_integral_terminates() {
        let v = integrate(&IntegrandSpec::real(|t| t.sin(), -PI, PI), 1e-12).unwrap();
        assert!(v.value.norm() < 1e-12);
    }
}
