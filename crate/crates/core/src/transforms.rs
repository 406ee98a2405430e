//! The transform ladder: Stieltjes, first and κ-th regularised Cauchy
//! transforms, the real-part kernel `RC_ℓ`, the comparison transform `F_ℓ`
//! and the homogeneous model functions `Q_{α,ω}`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::{Measure, WeightKind};
use crate::numerics::Tail;

/// Relative quadrature tolerance used by the transform evaluators.
pub const TRANSFORM_REL_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Principal branch of `w^alpha`, analytic on `ℂ∖(−∞,0]` with `1^alpha = 1`.
pub fn principal_pow(w: Complex64, alpha: f64) -> Complex64 {
    if w == Complex64::new(0.0, 0.0) {
        return if alpha == 0.0 { Complex64::new(1.0, 0.0) } else { w };
    }
    if alpha.fract() == 0.0 && alpha.abs() <= 64.0 {
        return w.powi(alpha as i32);
    }
    (w.ln() * alpha).exp()
}

fn check_upper(z: Complex64) -> Result<()> {
    if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideUpperHalfPlane(z.im))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Coefficients in increasing degree; trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RealPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RealPolynomial::default()
    }

    pub fn monomial(degree: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = c;
        RealPolynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `p^(order)(z)`.
    pub fn derivative_at(&self, z: Complex64, order: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (order..self.coeffs.len()).rev() {
            let falling: f64 = ((k - order + 1)..=k).map(|m| m as f64).product();
            acc = acc * z + self.coeffs[k] * falling;
        }
        acc
    }

    pub fn add(&self, other: &RealPolynomial) -> RealPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        RealPolynomial::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &RealPolynomial) -> RealPolynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return RealPolynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPolynomial::new(out)
    }

    pub fn scale(&self, c: f64) -> RealPolynomial {
        RealPolynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `(1+z²)^j`
    pub fn one_plus_z2_pow(j: u32) -> RealPolynomial {
        let base = RealPolynomial::new(vec![1.0, 0.0, 1.0]);
        (0..j).fold(RealPolynomial::new(vec![1.0]), |acc, _| acc.mul(&base))
    }
}

impl fmt::Display for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// A pair `(μ, p)` admissible for the κ-regularised Cauchy transform.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyPair {
    measure: Measure,
    polynomial: RealPolynomial,
    kappa: u32,
    defining_integral: f64,
}

/// `∫ (1+t²)^(-(order)) dμ`.
pub fn inverse_square_moment(mu: &Measure, order: u32) -> Result<f64> {
    let k = order as i32;
    mu.integrate_real(
        &|t| (1.0 + t * t).powi(-k),
        Tail::power(-2.0 * order as f64),
        &[],
        TRANSFORM_REL_TOL,
    )
}

/// `∫ t(1+t²)^(-(order)) dμ`.
fn odd_moment(mu: &Measure, order: u32) -> Result<f64> {
    let k = order as i32;
    mu.integrate_real(
        &|t| t * (1.0 + t * t).powi(-k),
        Tail::power(1.0 - 2.0 * order as f64),
        &[],
        TRANSFORM_REL_TOL,
    )
}

impl CauchyPair {
    pub fn new(measure: Measure, polynomial: RealPolynomial, kappa: u32) -> Result<Self> {
        let top = 2 * kappa as usize + 1;
        if polynomial.degree().is_some_and(|d| d > top) {
            return Err(Error::InvalidPair(format!(
                "polynomial degree {} exceeds 2κ+1 = {top}",
                polynomial.degree().unwrap_or(0)
            )));
        }
        let integral = match inverse_square_moment(&measure, kappa + 1) {
            Ok(v) => v,
            Err(Error::TransformUndefined(msg)) => {
                return Err(Error::InvalidPair(format!(
                    "∫(1+t²)^-(κ+1) dμ diverges for κ = {kappa}: {msg}"
                )))
            }
            Err(e) => return Err(e),
        };
        let c = polynomial.coeff(top);
        if c < integral - 1e-9 * integral.max(1.0) {
            return Err(Error::InvalidPair(format!(
                "coefficient of z^{top} is {c}, below ∫(1+t²)^-(κ+1) dμ = {integral}"
            )));
        }
        Ok(CauchyPair {
            measure,
            polynomial,
            kappa,
            defining_integral: integral,
        })
    }

    /// The pair whose polynomial is `c·z^(2κ+1) + lower` with
    /// `c = ∫(1+t²)^(-(κ+1)) dμ + excess`.
    pub fn with_leading_excess(
        measure: Measure,
        kappa: u32,
        excess: f64,
        lower: &RealPolynomial,
    ) -> Result<Self> {
        if excess < 0.0 {
            return Err(Error::InvalidPair(format!("negative excess {excess}")));
        }
        let top = 2 * kappa as usize + 1;
        if lower.degree().is_some_and(|d| d >= top) {
            return Err(Error::InvalidPair(format!(
                "lower part must have degree below {top}"
            )));
        }
        let integral = inverse_square_moment(&measure, kappa + 1).map_err(|e| match e {
            Error::TransformUndefined(m) => Error::InvalidPair(m),
            other => other,
        })?;
        let p = lower.add(&RealPolynomial::monomial(top, integral + excess));
        CauchyPair::new(measure, p, kappa)
    }

    /// The pair with `κ = κ(μ)`, `c_{2κ+1} = ∫(1+t²)^(-(κ+1)) dμ`, and, when
    /// `p(μ)` is odd, `c_{2κ} = ∫ t(1+t²)^(-(κ+1)) dμ`; other coefficients vanish.
    pub fn standard(measure: Measure) -> Result<Self> {
        let g = measure.growth_indices()?;
        let kappa = g.kappa;
        let top = 2 * kappa as usize + 1;
        let lead = inverse_square_moment(&measure, kappa + 1)?;
        let mut coeffs = vec![0.0; top + 1];
        coeffs[top] = lead;
        if g.p % 2 == 1 {
            coeffs[top - 1] = odd_moment(&measure, kappa + 1)?;
        }
        CauchyPair::new(measure, RealPolynomial::new(coeffs), kappa)
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn polynomial(&self) -> &RealPolynomial {
        &self.polynomial
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// `∫ (1+t²)^(-(κ+1)) dμ`.
    pub fn defining_integral(&self) -> f64 {
        self.defining_integral
    }

    /// `c_{2κ+1} − ∫ (1+t²)^(-(κ+1)) dμ ≥ 0`.
    pub fn leading_excess(&self) -> f64 {
        self.polynomial.coeff(2 * self.kappa as usize + 1) - self.defining_integral
    }

    pub fn transform(&self) -> HalfPlaneFunction {
        let pair = self.clone();
        HalfPlaneFunction::new(Provenance::FromPair, move |z| cauchy_reg(&pair, z))
    }
}

/// Left side of the telescoping identity: the regularised kernel of order `k`.
pub fn regularised_kernel(t: f64, z: Complex64, k: u32) -> Complex64 {
    let tz = Complex64::new(t, 0.0);
    let w = 1.0 + z * z;
    let s = 1.0 + t * t;
    let sum: Complex64 = (0..=k)
        .map(|j| w.powi(j as i32) / s.powi(j as i32 + 1))
        .sum();
    1.0 / (tz - z) - (tz + z) * sum
}

/// Sum of the magnitudes of the summands in [`regularised_kernel`]; the
/// floating-point scale against which the telescoping identity is compared.
pub fn kernel_scale(t: f64, z: Complex64, k: u32) -> f64 {
    let tz = Complex64::new(t, 0.0);
    let w = (1.0 + z * z).norm();
    let s = 1.0 + t * t;
    let sum: f64 = (0..=k).map(|j| w.powi(j as i32) / s.powi(j as i32 + 1)).sum();
    1.0 / (tz - z).norm() + (tz + z).norm() * sum
}

/// Right side of the telescoping identity: `(t−z)^(-1)·((1+z²)/(1+t²))^(k+1)`.
pub fn telescoped_kernel(t: f64, z: Complex64, k: u32) -> Complex64 {
    let ratio = (1.0 + z * z) / (1.0 + t * t);
    ratio.powi(k as i32 + 1) / (Complex64::new(t, 0.0) - z)
}

fn pole_breaks(z: Complex64) -> [f64; 3] {
    [z.re - z.im, z.re, z.re + z.im]
}

/// `S[ν](x) = ∫ dν(t)/(t+x)` for `ν` on `[0,∞)`.
pub fn stieltjes(nu: &Measure, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::BadParameters(format!("Stieltjes transform at x = {x}")));
    }
    let negative_atoms = nu.atoms().iter().any(|a| a.position < 0.0);
    let negative_pieces = nu.pieces().iter().any(|p| p.support.lo < 0.0);
    if negative_atoms || negative_pieces {
        return Err(Error::TransformUndefined(
            "Stieltjes transform needs a measure on [0,∞)".into(),
        ));
    }
    nu.integrate_real(&|t| 1.0 / (t + x), Tail::power(-1.0), &[x], TRANSFORM_REL_TOL)
}

/// Which algebraically equivalent representation evaluates `C_κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairForm {
    /// `p(z) + (1+z²)^(κ+1) ∫ (t−z)^(-1)(1+t²)^(-(κ+1)) dμ`
    Canonical,
    /// Kernel with `κ+1` subtracted regularising terms.
    Expanded,
    /// First-regularised kernel weighted by `(1+t²)^(-κ)`.
    TildeSplit,
    /// Plain Cauchy kernel weighted by `(1+t²)^(-κ)`; needs `∫(1+|t|)^(-(2κ+1)) dμ < ∞`.
    CauchySplit,
}

/// Above this modulus the canonical form cancels badly and the split form is
/// preferred when `μ` allows it.
const SPLIT_MODULUS: f64 = 10.0;

/// `C_κ[μ,p](z)`.
pub fn cauchy_reg(pair: &CauchyPair, z: Complex64) -> Result<Complex64> {
    let weak = Tail::power(-(2.0 * pair.kappa as f64) - 1.0);
    let form = if z.norm() >= SPLIT_MODULUS && pair.measure.integrable_against(weak)? {
        PairForm::CauchySplit
    } else {
        PairForm::Canonical
    };
    cauchy_reg_with(pair, z, form, TRANSFORM_REL_TOL)
}

pub fn cauchy_reg_with(
    pair: &CauchyPair,
    z: Complex64,
    form: PairForm,
    rel_tol: f64,
) -> Result<Complex64> {
    check_upper(z)?;
    let mu = &pair.measure;
    let kappa = pair.kappa;
    let k = kappa as i32;
    let p = pair.polynomial.eval(z);
    if mu.is_zero() {
        return Ok(p);
    }
    let w = 1.0 + z * z;
    let kernel_tail = Tail::power(-(2.0 * kappa as f64) - 3.0);
    let breaks = pole_breaks(z);
    match form {
        PairForm::Canonical => {
            let kern = |t: f64| 1.0 / ((Complex64::new(t, 0.0) - z) * (1.0 + t * t).powi(k + 1));
            let integral = mu.integrate_kernel(&kern, kernel_tail, &breaks, rel_tol)?;
            Ok(p + w.powi(k + 1) * integral)
        }
        PairForm::Expanded => {
            // the kernel cancels pointwise; measure errors against the size of its terms
            let kern = |t: f64| regularised_kernel(t, z, kappa);
            let size = (1.0 + z.norm()).powi(2 * k + 1) * pair.defining_integral.max(1e-300);
            let abs_tol = rel_tol * size;
            Ok(p + mu.integrate_kernel_abs(&kern, kernel_tail, &breaks, rel_tol, abs_tol)?)
        }
        PairForm::TildeSplit => {
            let kern = |t: f64| tilde_kernel(t, z) / (1.0 + t * t).powi(k);
            let integral = mu.integrate_kernel(&kern, kernel_tail, &breaks, rel_tol)?;
            Ok(p - z * w.powi(k) * pair.defining_integral + w.powi(k) * integral)
        }
        PairForm::CauchySplit => {
            let weak = Tail::power(-(2.0 * kappa as f64) - 1.0);
            if !mu.integrable_against(weak)? {
                return Err(Error::TransformUndefined(
                    "split form needs ∫(1+|t|)^-(2κ+1) dμ < ∞".into(),
                ));
            }
            let odd = odd_moment(mu, kappa + 1)?;
            // cancel coefficient-wise so large |z| does not amplify roundoff
            let moments = RealPolynomial::one_plus_z2_pow(kappa).mul(&RealPolynomial::new(vec![odd, pair.defining_integral]));
            let rest = pair.polynomial.add(&moments.scale(-1.0));
            let kern = |t: f64| 1.0 / ((Complex64::new(t, 0.0) - z) * (1.0 + t * t).powi(k));
            let integral = mu.integrate_kernel(&kern, weak, &breaks, rel_tol)?;
            Ok(rest.eval(z) + w.powi(k) * integral)
        }
    }
}

/// `1/(t−z) − t/(1+t²)` written without cancellation.
fn tilde_kernel(t: f64, z: Complex64) -> Complex64 {
    (1.0 + t * z) / ((Complex64::new(t, 0.0) - z) * (1.0 + t * t))
}

/// `C̃[μ](z) = ∫ (1/(t−z) − t/(1+t²)) dμ(t)`.
pub fn cauchy_tilde(mu: &Measure, z: Complex64) -> Result<Complex64> {
    check_upper(z)?;
    mu.integrate_kernel(
        &|t| tilde_kernel(t, z),
        Tail::power(-2.0),
        &pole_breaks(z),
        TRANSFORM_REL_TOL,
    )
}

/// `Q_{α,ω}(z) = iω(z/i)^α`.
pub fn model_q(alpha: f64, omega: Complex64, z: Complex64) -> Complex64 {
    I * omega * principal_pow(z / I, alpha)
}

/// `RC_ℓ[μ](y) = (1−y²)^ℓ ∫ t(t²+y²)^(-1)(1+t²)^(-ℓ) dμ(t)`.
pub fn real_part_main(mu: &Measure, ell: u32, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::BadParameters(format!("RC at y = {y}")));
    }
    let tail = Tail::power(-1.0 - 2.0 * ell as f64);
    if !mu.integrable_against(Tail::power(-(2.0 * ell as f64) - 1.0))? {
        return Err(Error::WeightOrderTooSmall {
            order: ell,
            minimal: mu.growth_indices()?.ell,
        });
    }
    let k = ell as i32;
    let y2 = y * y;
    let integral = mu.integrate_real(
        &|t| t / ((t * t + y2) * (1.0 + t * t).powi(k)),
        tail,
        &[-y, y],
        TRANSFORM_REL_TOL,
    )?;
    Ok((1.0 - y2).powi(k) * integral)
}

/// `F_ℓ[μ](y) = (1−y²)^ℓ S[σ_ℓ](y²)`.
pub fn f_ell_transform(mu: &Measure, ell: u32, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::BadParameters(format!("F_ell at y = {y}")));
    }
    let sigma = mu.weighted_measure(WeightKind::SigmaEll, ell)?;
    Ok((1.0 - y * y).powi(ell as i32) * stieltjes(&sigma, y * y)?)
}

/// `p̃` such that `C_κ[μ,p] = C_κ'[μ,p̃]`.
pub fn embed(pair: &CauchyPair, kappa_prime: u32) -> Result<CauchyPair> {
    if kappa_prime <= pair.kappa {
        return Err(Error::NotAnEmbedding {
            current: pair.kappa,
            target: kappa_prime,
        });
    }
    let mut p = pair.polynomial.clone();
    for j in pair.kappa + 1..=kappa_prime {
        let even = inverse_square_moment(&pair.measure, j + 1)?;
        let odd = odd_moment(&pair.measure, j + 1)?;
        let bracket = RealPolynomial::new(vec![odd, even]);
        p = p.add(&RealPolynomial::one_plus_z2_pow(j).mul(&bracket));
    }
    CauchyPair::new(pair.measure.clone(), p, kappa_prime)
}

/// Where a half-plane function came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    FromPair,
    ModelQ { alpha: f64, omega: Complex64 },
    ClosedForm(String),
    SequenceElement(usize),
    Rescaled { factor: f64, inner: Box<Provenance> },
}

type Evaluator = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// A function on the upper half-plane, evaluated on demand.
#[derive(Clone)]
pub struct HalfPlaneFunction {
    eval: Arc<Evaluator>,
    provenance: Provenance,
}

impl fmt::Debug for HalfPlaneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HalfPlaneFunction")
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl HalfPlaneFunction {
    pub fn new(
        provenance: Provenance,
        eval: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Self {
        HalfPlaneFunction {
            eval: Arc::new(eval),
            provenance,
        }
    }

    pub fn closed_form(
        label: impl Into<String>,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        HalfPlaneFunction::new(Provenance::ClosedForm(label.into()), move |z| Ok(f(z)))
    }

    pub fn model(alpha: f64, omega: Complex64) -> Self {
        HalfPlaneFunction::new(Provenance::ModelQ { alpha, omega }, move |z| {
            Ok(model_q(alpha, omega, z))
        })
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Value at `z ∈ ℂ⁺`; non-finite values are reported as evaluation failures.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_upper(z)?;
        let v = (self.eval)(z)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::EvaluationFailure(format!("{z}")))
        }
    }
}

/// `z ↦ q(rz)`.
pub fn rescale(q: &HalfPlaneFunction, r: f64) -> Result<HalfPlaneFunction> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::BadParameters(format!("rescale factor {r}")));
    }
    let inner = q.clone();
    Ok(HalfPlaneFunction::new(
        Provenance::Rescaled {
            factor: r,
            inner: Box::new(q.provenance.clone()),
        },
        move |z| inner.eval(z * r),
    ))
}
