//! Named example constructions: measures, their transforms in closed form
//! where one exists, and the pairs used by the asymptotic checks.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::{CustomDensity, Density, Interval, Measure, TailPair};
use crate::numerics::Tail;
use crate::regvar::{build_counterexample, CounterexampleKind};
use crate::transforms::{CauchyPair, HalfPlaneFunction, RealPolynomial};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Every name accepted by [`NamedExample::parse`].
pub const EXAMPLE_NAMES: [&str; 8] = [
    "log-pair",
    "log-power",
    "two-slope",
    "growing-atoms",
    "step-atoms",
    "weighted-step",
    "symmetric-kappa",
    "one-sided-ell",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedExample {
    /// `μ([0,t)) ~ t log t + a₊t`, `μ((−t,0)) ~ t log t + a₋t`.
    LogPair { a_plus: f64, a_minus: f64 },
    /// Lebesgue plus a one-sided part with `ν([0,t)) = t/(log t)^γ`.
    LogPower { gamma: f64 },
    /// Density `b` on the positive and `a` on the negative half-line.
    TwoSlope { a: f64, b: f64 },
    /// `n²δ_n` with `p(z) = n²z/(1+n²)`.
    GrowingAtoms { n: f64 },
    Counterexample { kind: CounterexampleKind, order: u32 },
}

impl NamedExample {
    pub fn name(&self) -> &'static str {
        match self {
            NamedExample::LogPair { .. } => "log-pair",
            NamedExample::LogPower { .. } => "log-power",
            NamedExample::TwoSlope { .. } => "two-slope",
            NamedExample::GrowingAtoms { .. } => "growing-atoms",
            NamedExample::Counterexample { kind, .. } => kind.label(),
        }
    }

    /// Builds an example from its name and named parameters; missing
    /// parameters take the defaults `a₊ = 2, a₋ = 0, γ = 1/2, a = 1, b = 2,
    /// n = 10, order = 1`.
    pub fn parse(name: &str, param: &dyn Fn(&str) -> Option<f64>) -> Result<Self> {
        let get = |key: &str, default: f64| param(key).unwrap_or(default);
        let ex = match name {
            "log-pair" => NamedExample::LogPair {
                a_plus: get("a_plus", 2.0),
                a_minus: get("a_minus", 0.0),
            },
            "log-power" => NamedExample::LogPower { gamma: get("gamma", 0.5) },
            "two-slope" => NamedExample::TwoSlope {
                a: get("a", 1.0),
                b: get("b", 2.0),
            },
            "growing-atoms" => NamedExample::GrowingAtoms { n: get("n", 10.0) },
            other => {
                let kind = CounterexampleKind::from_label(other)
                    .ok_or_else(|| Error::BadParameters(format!("unknown example '{other}'")))?;
                let order = param("order").or_else(|| param("kappa")).or_else(|| param("ell")).unwrap_or(1.0);
                if order < 0.0 || order.fract() != 0.0 {
                    return Err(Error::BadParameters(format!("order {order}")));
                }
                NamedExample::Counterexample {
                    kind,
                    order: order as u32,
                }
            }
        };
        ex.validate()?;
        Ok(ex)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            NamedExample::LogPair { a_plus, a_minus } => a_plus >= 0.0 && a_minus >= 0.0,
            NamedExample::LogPower { gamma } => gamma > 0.0 && gamma < 1.0,
            NamedExample::TwoSlope { a, b } => a >= 0.0 && b >= 0.0 && a + b > 0.0,
            NamedExample::GrowingAtoms { n } => n > 0.0 && n.is_finite(),
            NamedExample::Counterexample { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BadParameters(format!("parameters out of range for {}", self.name())))
        }
    }

    /// `(name, value)` pairs that reproduce this example through [`NamedExample::parse`].
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            NamedExample::LogPair { a_plus, a_minus } => vec![("a_plus", a_plus), ("a_minus", a_minus)],
            NamedExample::LogPower { gamma } => vec![("gamma", gamma)],
            NamedExample::TwoSlope { a, b } => vec![("a", a), ("b", b)],
            NamedExample::GrowingAtoms { n } => vec![("n", n)],
            NamedExample::Counterexample { order, .. } => vec![("order", order as f64)],
        }
    }

    /// The example's measure; atom families are truncated for probes up to `probe_top`.
    pub fn measure(&self, probe_top: f64) -> Result<Measure> {
        match *self {
            NamedExample::LogPair { a_plus, a_minus } => log_pair_measure(a_plus, a_minus),
            NamedExample::LogPower { gamma } => log_power_measure(gamma),
            NamedExample::TwoSlope { a, b } => two_slope_measure(a, b),
            NamedExample::GrowingAtoms { n } => Measure::from_atoms([(n, n * n)]),
            NamedExample::Counterexample { kind, order } => {
                Ok(build_counterexample(kind, order, probe_top)?.measure)
            }
        }
    }

    /// The pair the example is stated for.
    pub fn pair(&self, probe_top: f64) -> Result<CauchyPair> {
        match *self {
            NamedExample::LogPair { a_plus, a_minus } => log_pair_pair(a_plus, a_minus),
            NamedExample::LogPower { gamma } => tilde_pair(log_power_measure(gamma)?, 0.0),
            NamedExample::TwoSlope { a, b } => tilde_pair(two_slope_measure(a, b)?, 0.0),
            NamedExample::GrowingAtoms { n } => growing_atoms_pair(n),
            NamedExample::Counterexample { kind, order } => build_counterexample(kind, order, probe_top)?.pair(),
        }
    }

    /// Closed-form transform, where the example has one.
    pub fn closed_form(&self) -> Option<HalfPlaneFunction> {
        match *self {
            NamedExample::LogPair { a_plus, a_minus } => Some(log_pair_closed_form(a_plus, a_minus)),
            NamedExample::TwoSlope { a, b } => Some(two_slope_closed_form(a, b)),
            NamedExample::GrowingAtoms { n } => Some(HalfPlaneFunction::closed_form("growing atom", move |z| {
                n * n * (1.0 / (n - z) - n / (1.0 + n * n))
            })),
            _ => None,
        }
    }
}

/// The pair `(μ, c₀ + z∫(1+t²)^(-1)dμ)`, whose transform is `c₀ + C̃[μ]`.
pub fn tilde_pair(mu: Measure, c0: f64) -> Result<CauchyPair> {
    CauchyPair::with_leading_excess(mu, 0, 0.0, &RealPolynomial::new(vec![c0]))
}

/// Exact measure of `(a₋−a₊+iπ)log(z+i) + π(a₊+1)i`:
/// density `½log(1+t²) + 1 + a₊ + (a₋−a₊)·arg(t+i)/π`.
pub fn log_pair_measure(a_plus: f64, a_minus: f64) -> Result<Measure> {
    let rho = move |t: f64| 0.5 * (t * t).ln_1p() + 1.0 + a_plus + (a_minus - a_plus) * 1f64.atan2(t) / PI;
    let tail = Tail::new(0.0, 1.0);
    let density = CustomDensity::new(
        "log-pair",
        rho,
        TailPair {
            upper: Some(tail),
            lower: Some(tail),
        },
    );
    Measure::zero().with_piece(Interval::whole_line(), Density::Custom(density))
}

pub fn log_pair_closed_form(a_plus: f64, a_minus: f64) -> HalfPlaneFunction {
    HalfPlaneFunction::closed_form("log-pair", move |z| {
        (a_minus - a_plus + I * PI) * (z + I).ln() + I * PI * (a_plus + 1.0)
    })
}

/// Pair for the closed form: `c₀ = Re q(i)`, no linear growth beyond the
/// regularising term.
pub fn log_pair_pair(a_plus: f64, a_minus: f64) -> Result<CauchyPair> {
    let c0 = (a_minus - a_plus) * 2f64.ln() - PI * PI / 2.0;
    tilde_pair(log_pair_measure(a_plus, a_minus)?, c0)
}

/// `(μ₀, μ₁, μ₂)`: `μ₀` symmetric with `μ₀([1,t)) = t log t`, `μ₁` with slopes
/// `a₊`, `a₋`, and `μ₂ = 0`.
pub fn log_pair_decomposition(a_plus: f64, a_minus: f64) -> Result<(Measure, Measure, Measure)> {
    let log_plus_one = |support| -> Result<Measure> {
        Measure::zero()
            .with_piece(support, Density::Power { coeff: 1.0, exponent: 0.0 })?
            .with_piece(
                support,
                Density::PowerLog {
                    coeff: 1.0,
                    exponent: 0.0,
                    log_power: 1.0,
                },
            )
    };
    let mu0 = log_plus_one(Interval::new(1.0, f64::INFINITY))?.sum(&log_plus_one(Interval::new(f64::NEG_INFINITY, -1.0))?);
    let mu1 = two_slope_measure(a_minus, a_plus)?;
    Ok((mu0, mu1, Measure::zero()))
}

/// `λ + ν` with `ν([0,t)) = t` on `(0,e]` and `t/(log t)^γ` beyond.
pub fn log_power_measure(gamma: f64) -> Result<Measure> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::BadParameters(format!("γ = {gamma}")));
    }
    let nu_density = move |t: f64| {
        let l = t.ln();
        l.powf(-gamma) - gamma * l.powf(-gamma - 1.0)
    };
    let tail = Tail::new(0.0, -gamma);
    let custom = CustomDensity::new(
        "log-power",
        nu_density,
        TailPair {
            upper: Some(tail),
            lower: None,
        },
    );
    Measure::lebesgue()
        .with_piece(Interval::new(0.0, std::f64::consts::E), Density::Power { coeff: 1.0, exponent: 0.0 })?
        .with_piece(Interval::new(std::f64::consts::E, f64::INFINITY), Density::Custom(custom))
}

/// Density `b` on `(0,∞)` and `a` on `(−∞,0)`.
pub fn two_slope_measure(a: f64, b: f64) -> Result<Measure> {
    let mut mu = Measure::zero();
    if b > 0.0 {
        mu = mu.with_piece(Interval::positive(), Density::Power { coeff: b, exponent: 0.0 })?;
    }
    if a > 0.0 {
        mu = mu.with_piece(Interval::negative(), Density::Power { coeff: a, exponent: 0.0 })?;
    }
    Ok(mu)
}

/// `a log z − b log(−z)`.
pub fn two_slope_closed_form(a: f64, b: f64) -> HalfPlaneFunction {
    HalfPlaneFunction::closed_form("two-slope", move |z| a * z.ln() - b * (-z).ln())
}

/// `(n²δ_n, n²z/(1+n²))`; the transforms tend to `z`.
pub fn growing_atoms_pair(n: f64) -> Result<CauchyPair> {
    CauchyPair::new(
        Measure::from_atoms([(n, n * n)])?,
        RealPolynomial::new(vec![0.0, n * n / (1.0 + n * n)]),
        0,
    )
}

/// `δ_n` with the polynomial making the transform the plain `C[δ_n] = 1/(n−z)`.
pub fn escaping_atom_pair(n: f64) -> Result<CauchyPair> {
    let w = 1.0 / (1.0 + n * n);
    CauchyPair::new(Measure::dirac(n), RealPolynomial::new(vec![n * w, w]), 0)
}
