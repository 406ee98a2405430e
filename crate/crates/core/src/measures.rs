//! Positive Borel measures on the real line: finitely many atoms plus density
//! pieces whose behaviour at infinity is declared rather than probed.
//!
//! A truncated infinite family of atoms (as in the counterexample measures)
//! carries an *atom envelope*: the tail of a density with the same growth of
//! its distribution function. Growth indices and integrability decisions use
//! the envelope, sums use the stored atoms.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate, IntegrandSpec, Tail};

/// Relative tolerance used for density integrals unless a caller overrides it.
pub const DEFAULT_REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub position: f64,
    pub mass: f64,
}

/// Interval of the extended real line; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn whole_line() -> Self {
        Interval::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn positive() -> Self {
        Interval::new(0.0, f64::INFINITY)
    }

    pub fn negative() -> Self {
        Interval::new(f64::NEG_INFINITY, 0.0)
    }

    fn intersect(self, lo: f64, hi: f64) -> Option<Interval> {
        let (a, b) = (self.lo.max(lo), self.hi.min(hi));
        (b > a).then_some(Interval::new(a, b))
    }
}

/// Declared tails in both directions; `lower` describes `t -> -∞` in terms of `|t|`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TailPair {
    pub upper: Option<Tail>,
    pub lower: Option<Tail>,
}

#[derive(Clone)]
pub struct CustomDensity {
    label: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    tails: TailPair,
}

impl CustomDensity {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tails: TailPair,
    ) -> Self {
        CustomDensity {
            label: label.into(),
            eval: Arc::new(eval),
            tails,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("label", &self.label)
            .field("tails", &self.tails)
            .finish()
    }
}

impl PartialEq for CustomDensity {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.tails == other.tails && Arc::ptr_eq(&self.eval, &other.eval)
    }
}

/// Non-negative density on a piece's support.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    /// `coeff·|t|^exponent`
    Power { coeff: f64, exponent: f64 },
    /// `coeff·|t|^exponent·(ln|t|)^log_power`; the support must avoid `|t| < 1`
    /// when `log_power` is not an integer.
    PowerLog {
        coeff: f64,
        exponent: f64,
        log_power: f64,
    },
    Custom(CustomDensity),
}

impl Density {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Density::Power { coeff, exponent } => coeff * t.abs().powf(*exponent),
            Density::PowerLog {
                coeff,
                exponent,
                log_power,
            } => coeff * t.abs().powf(*exponent) * t.abs().ln().powf(*log_power),
            Density::Custom(c) => (c.eval)(t),
        }
    }

    fn tails(&self) -> TailPair {
        match self {
            Density::Power { exponent, .. } => TailPair {
                upper: Some(Tail::power(*exponent)),
                lower: Some(Tail::power(*exponent)),
            },
            Density::PowerLog {
                exponent,
                log_power,
                ..
            } => TailPair {
                upper: Some(Tail::new(*exponent, *log_power)),
                lower: Some(Tail::new(*exponent, *log_power)),
            },
            Density::Custom(c) => c.tails,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityPiece {
    pub support: Interval,
    pub density: Density,
}

impl DensityPiece {
    fn upper_tail(&self) -> Option<Option<Tail>> {
        self.support.hi.is_infinite().then(|| self.density.tails().upper)
    }

    fn lower_tail(&self) -> Option<Option<Tail>> {
        self.support.lo.is_infinite().then(|| self.density.tails().lower)
    }

    /// `∫_{window ∩ support} ρ`, closed form for pure powers.
    fn mass_between(&self, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
        let Some(w) = self.support.intersect(lo, hi) else {
            return Ok(0.0);
        };
        if let Density::Power { coeff, exponent } = self.density {
            if exponent != -1.0 && w.lo.is_finite() && w.hi.is_finite() {
                let prim = |t: f64| {
                    let a = t.abs().powf(exponent + 1.0) / (exponent + 1.0);
                    if t < 0.0 {
                        -a
                    } else {
                        a
                    }
                };
                if exponent > -1.0 || (w.lo > 0.0 || w.hi < 0.0) {
                    return Ok(coeff * (prim(w.hi) - prim(w.lo)));
                }
            }
        }
        let d = &self.density;
        let mut spec = IntegrandSpec::real(move |t| d.eval(t), w.lo, w.hi);
        if let Some(t) = self.density.tails().upper {
            spec = spec.upper_tail(t);
        }
        if let Some(t) = self.density.tails().lower {
            spec = spec.lower_tail(t);
        }
        Ok(integrate(&spec, rel_tol)?.value.re)
    }
}

/// Which half-open window a distribution function measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `μ([0, t))`
    Pos,
    /// `μ((-t, 0))`
    Neg,
    /// `μ((-t, t))`
    Sym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthIndices {
    pub p: u32,
    pub kappa: u32,
    pub ell: u32,
}

impl GrowthIndices {
    pub fn from_p(p: u32) -> Self {
        GrowthIndices {
            p,
            kappa: (p - 1) / 2,
            ell: p / 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// `√s·(1+s)^(-ℓ) dμ_*(s)`
    SigmaEll,
    /// `(1+s)^(-κ) dμ_*(s)`
    TauKappa,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Measure {
    atoms: Vec<Atom>,
    pieces: Vec<DensityPiece>,
    envelope: TailPair,
}

fn canonical_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if last.position == a.position => last.mass += a.mass,
            _ => out.push(a),
        }
    }
    out
}

fn dominant(a: Option<Tail>, b: Option<Tail>) -> Option<Tail> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if (x.power, x.log_power) >= (y.power, y.log_power) {
                Some(x)
            } else {
                Some(y)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

impl Measure {
    pub fn zero() -> Self {
        Measure::default()
    }

    pub fn dirac(position: f64) -> Self {
        Measure::from_atoms([(position, 1.0)]).expect("finite position")
    }

    pub fn lebesgue() -> Self {
        Measure::zero()
            .with_piece(
                Interval::whole_line(),
                Density::Power {
                    coeff: 1.0,
                    exponent: 0.0,
                },
            )
            .expect("valid piece")
    }

    /// Atoms from `(position, mass)` pairs; coincident positions merge.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut list = Vec::new();
        for (position, mass) in atoms {
            if !position.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom position {position}")));
            }
            if !(mass > 0.0 && mass.is_finite()) {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {position} has mass {mass}"
                )));
            }
            list.push(Atom { position, mass });
        }
        Ok(Measure {
            atoms: canonical_atoms(list),
            ..Measure::default()
        })
    }

    pub fn with_piece(mut self, support: Interval, density: Density) -> Result<Self> {
        if !(support.lo < support.hi) || support.lo.is_nan() || support.hi.is_nan() {
            return Err(Error::InvalidMeasure(format!(
                "empty support [{}, {}]",
                support.lo, support.hi
            )));
        }
        match &density {
            Density::Power { coeff, exponent } | Density::PowerLog { coeff, exponent, .. } => {
                if !(coeff.is_finite() && *coeff >= 0.0 && exponent.is_finite()) {
                    return Err(Error::InvalidMeasure(format!(
                        "density coefficient {coeff} / exponent {exponent}"
                    )));
                }
            }
            Density::Custom(_) => {}
        }
        // spot check non-negativity on interior points
        let (a, b) = (
            if support.lo.is_finite() { support.lo } else { support.hi.min(0.0) - 1e6 },
            if support.hi.is_finite() { support.hi } else { support.lo.max(0.0) + 1e6 },
        );
        for k in 1..16 {
            let t = a + (b - a) * k as f64 / 16.0;
            let v = density.eval(t);
            if v.is_nan() || v < 0.0 {
                return Err(Error::InvalidMeasure(format!("density is {v} at {t}")));
            }
        }
        self.pieces.push(DensityPiece { support, density });
        Ok(self)
    }

    /// Declares the density-equivalent growth of a truncated atom family.
    pub fn with_atom_envelope(mut self, envelope: TailPair) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn atom_envelope(&self) -> TailPair {
        self.envelope
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.pieces.is_empty()
    }

    /// `c·μ` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidMeasure(format!("scale factor {c}")));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| DensityPiece {
                support: p.support,
                density: match &p.density {
                    Density::Power { coeff, exponent } => Density::Power {
                        coeff: c * coeff,
                        exponent: *exponent,
                    },
                    Density::PowerLog {
                        coeff,
                        exponent,
                        log_power,
                    } => Density::PowerLog {
                        coeff: c * coeff,
                        exponent: *exponent,
                        log_power: *log_power,
                    },
                    Density::Custom(d) => {
                        let inner = d.eval.clone();
                        Density::Custom(CustomDensity::new(
                            format!("{}*{c}", d.label),
                            move |t| c * inner(t),
                            d.tails,
                        ))
                    }
                },
            })
            .collect();
        Ok(Measure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    position: a.position,
                    mass: c * a.mass,
                })
                .collect(),
            pieces,
            envelope: self.envelope,
        })
    }

    pub fn sum(&self, other: &Measure) -> Measure {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Measure {
            atoms: canonical_atoms(atoms),
            pieces,
            envelope: TailPair {
                upper: dominant(self.envelope.upper, other.envelope.upper),
                lower: dominant(self.envelope.lower, other.envelope.lower),
            },
        }
    }

    /// Dominant declared tail at `+∞` (`upper = true`) or `-∞`.
    ///
    /// `Ok(None)` means the measure is finite on that half-line.
    pub fn tail(&self, upper: bool) -> Result<Option<Tail>> {
        let mut out = if upper { self.envelope.upper } else { self.envelope.lower };
        for piece in &self.pieces {
            let t = if upper { piece.upper_tail() } else { piece.lower_tail() };
            match t {
                None => {}
                Some(None) => {
                    return Err(Error::TailUndeclared(format!(
                        "density piece on [{}, {}] has no declared tail",
                        piece.support.lo, piece.support.hi
                    )))
                }
                Some(Some(tail)) => out = dominant(out, Some(tail)),
            }
        }
        Ok(out)
    }

    /// Whether `∫ w dμ < ∞` for a locally bounded weight with `w(t) ≍ |t|^weight.power (log|t|)^…`.
    pub fn integrable_against(&self, weight: Tail) -> Result<bool> {
        for upper in [true, false] {
            if let Some(t) = self.tail(upper)? {
                if !t.times(weight).is_integrable() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn total_mass(&self) -> Result<f64> {
        if !self.integrable_against(Tail::power(0.0))? {
            return Ok(f64::INFINITY);
        }
        let atoms: f64 = self.atoms.iter().map(|a| a.mass).sum();
        let mut total = atoms;
        for p in &self.pieces {
            total += p.mass_between(f64::NEG_INFINITY, f64::INFINITY, DEFAULT_REL_TOL)?;
        }
        Ok(total)
    }

    /// `μ([0,t))`, `μ((-t,0))` or `μ((-t,t))`.
    pub fn distribution(&self, side: Side, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::BadParameters(format!("distribution at t = {t}")));
        }
        let atom_in = |x: f64| match side {
            Side::Pos => x >= 0.0 && x < t,
            Side::Neg => x < 0.0 && x > -t,
            Side::Sym => x > -t && x < t,
        };
        let mut total: f64 = self
            .atoms
            .iter()
            .filter(|a| atom_in(a.position))
            .map(|a| a.mass)
            .sum();
        let (lo, hi) = match side {
            Side::Pos => (0.0, t),
            Side::Neg => (-t, 0.0),
            Side::Sym => (-t, t),
        };
        for p in &self.pieces {
            total += p.mass_between(lo, hi, DEFAULT_REL_TOL)?;
        }
        Ok(total)
    }

    /// Mass of the open window `(a, b)`.
    pub fn window_mass(&self, a: f64, b: f64) -> Result<f64> {
        if !(a < b) {
            return Err(Error::BadParameters(format!("window ({a}, {b})")));
        }
        let mut total: f64 = self
            .atoms
            .iter()
            .filter(|x| x.position > a && x.position < b)
            .map(|x| x.mass)
            .sum();
        for p in &self.pieces {
            total += p.mass_between(a, b, DEFAULT_REL_TOL)?;
        }
        Ok(total)
    }

    /// `∫ k dμ` for a kernel with `|k(t)| ≍ |t|^kernel_tail` at both ends.
    ///
    /// Integrability is decided from declared tails before any quadrature; a
    /// non-integrable combination yields `transform-undefined`.
    pub fn integrate_kernel(
        &self,
        kernel: &(dyn Fn(f64) -> Complex64 + Sync),
        kernel_tail: Tail,
        breakpoints: &[f64],
        rel_tol: f64,
    ) -> Result<Complex64> {
        self.integrate_kernel_abs(kernel, kernel_tail, breakpoints, rel_tol, 0.0)
    }

    /// As [`Measure::integrate_kernel`] with an absolute error target per density piece.
    pub fn integrate_kernel_abs(
        &self,
        kernel: &(dyn Fn(f64) -> Complex64 + Sync),
        kernel_tail: Tail,
        breakpoints: &[f64],
        rel_tol: f64,
        abs_tol: f64,
    ) -> Result<Complex64> {
        for upper in [true, false] {
            if let Some(t) = self.tail(upper)? {
                if !t.times(kernel_tail).is_integrable() {
                    return Err(Error::TransformUndefined(format!(
                        "measure tail t^{} (log t)^{} against kernel t^{} is not integrable",
                        t.power, t.log_power, kernel_tail.power
                    )));
                }
            }
        }
        let mut total: Complex64 = self
            .atoms
            .iter()
            .map(|a| kernel(a.position) * a.mass)
            .sum();
        for piece in &self.pieces {
            let d = &piece.density;
            let tails = d.tails();
            let mut spec = IntegrandSpec::new(
                move |t| kernel(t) * d.eval(t),
                piece.support.lo,
                piece.support.hi,
            )
            .breakpoints(breakpoints.iter().copied().chain([-1.0, 1.0]))
            .abs_tol(abs_tol);
            if let Some(t) = tails.upper {
                spec = spec.upper_tail(t.times(kernel_tail));
            }
            if let Some(t) = tails.lower {
                spec = spec.lower_tail(t.times(kernel_tail));
            }
            total += integrate(&spec, rel_tol)?.value;
        }
        Ok(total)
    }

    pub fn integrate_real(
        &self,
        kernel: &(dyn Fn(f64) -> f64 + Sync),
        kernel_tail: Tail,
        breakpoints: &[f64],
        rel_tol: f64,
    ) -> Result<f64> {
        let k = |t: f64| Complex64::new(kernel(t), 0.0);
        Ok(self.integrate_kernel(&k, kernel_tail, breakpoints, rel_tol)?.re)
    }

    /// Growth indices `p(μ)`, `κ(μ)`, `ℓ(μ)` decided from the declared tails.
    pub fn growth_indices(&self) -> Result<GrowthIndices> {
        let mut p = 1u32;
        for upper in [true, false] {
            if let Some(t) = self.tail(upper)? {
                if !t.power.is_finite() {
                    return Err(Error::NotPowerBounded(format!(
                        "tail exponent {} is not finite",
                        t.power
                    )));
                }
                // least n with t^(power - n) (log t)^lp integrable
                let mut n = (t.power + 1.0).floor().max(0.0) as u32;
                while !t.shift(-(n as f64)).is_integrable() {
                    n += 1;
                }
                p = p.max(n.max(1));
            }
        }
        Ok(GrowthIndices::from_p(p))
    }

    pub fn push_forward_square(&self) -> Measure {
        let atoms = canonical_atoms(
            self.atoms
                .iter()
                .map(|a| Atom {
                    position: a.position * a.position,
                    mass: a.mass,
                })
                .collect(),
        );
        let mut pieces = Vec::new();
        for piece in &self.pieces {
            for positive in [true, false] {
                let part = if positive {
                    piece.support.intersect(0.0, f64::INFINITY)
                } else {
                    piece.support.intersect(f64::NEG_INFINITY, 0.0)
                };
                let Some(w) = part else { continue };
                let support = if positive {
                    Interval::new(w.lo * w.lo, w.hi * w.hi)
                } else {
                    Interval::new(w.hi * w.hi, w.lo * w.lo)
                };
                let density = match &piece.density {
                    Density::Power { coeff, exponent } => Density::Power {
                        coeff: coeff / 2.0,
                        exponent: (exponent - 1.0) / 2.0,
                    },
                    Density::PowerLog {
                        coeff,
                        exponent,
                        log_power,
                    } => Density::PowerLog {
                        coeff: coeff / 2f64.powf(log_power + 1.0),
                        exponent: (exponent - 1.0) / 2.0,
                        log_power: *log_power,
                    },
                    Density::Custom(c) => {
                        let inner = c.eval.clone();
                        let sign = if positive { 1.0 } else { -1.0 };
                        let src = if positive { c.tails.upper } else { c.tails.lower };
                        let tail = src.map(|t| Tail::new((t.power - 1.0) / 2.0, t.log_power));
                        Density::Custom(CustomDensity::new(
                            format!("push({})", c.label),
                            move |s| {
                                let r = s.sqrt();
                                inner(sign * r) / (2.0 * r)
                            },
                            TailPair {
                                upper: tail,
                                lower: None,
                            },
                        ))
                    }
                };
                pieces.push(DensityPiece { support, density });
            }
        }
        let half = |t: Option<Tail>| t.map(|t| Tail::new((t.power - 1.0) / 2.0, t.log_power));
        Measure {
            atoms,
            pieces,
            envelope: TailPair {
                upper: dominant(half(self.envelope.upper), half(self.envelope.lower)),
                lower: None,
            },
        }
    }

    /// `(𝟙_[0,∞)·μ, 𝟙_(-∞,0)·μ)`; an atom at 0 goes to the first part.
    pub fn split_signed(&self) -> (Measure, Measure) {
        let mut plus = Measure {
            envelope: TailPair {
                upper: self.envelope.upper,
                lower: None,
            },
            ..Measure::default()
        };
        let mut minus = Measure {
            envelope: TailPair {
                upper: None,
                lower: self.envelope.lower,
            },
            ..Measure::default()
        };
        for a in &self.atoms {
            if a.position >= 0.0 {
                plus.atoms.push(*a);
            } else {
                minus.atoms.push(*a);
            }
        }
        for piece in &self.pieces {
            if let Some(w) = piece.support.intersect(0.0, f64::INFINITY) {
                plus.pieces.push(DensityPiece {
                    support: w,
                    density: piece.density.clone(),
                });
            }
            if let Some(w) = piece.support.intersect(f64::NEG_INFINITY, 0.0) {
                minus.pieces.push(DensityPiece {
                    support: w,
                    density: piece.density.clone(),
                });
            }
        }
        (plus, minus)
    }

    /// `σ_ℓ` or `τ_κ` built on the push-forward `μ_*`.
    pub fn weighted_measure(&self, kind: WeightKind, order: u32) -> Result<Measure> {
        if kind == WeightKind::SigmaEll {
            let minimal = self.growth_indices()?.ell;
            if order < minimal {
                return Err(Error::WeightOrderTooSmall { order, minimal });
            }
        }
        let pushed = self.push_forward_square();
        let ord = order as i32;
        let weight = move |s: f64| match kind {
            WeightKind::SigmaEll => s.sqrt() * (1.0 + s).powi(-ord),
            WeightKind::TauKappa => (1.0 + s).powi(-ord),
        };
        let shift = match kind {
            WeightKind::SigmaEll => 0.5 - order as f64,
            WeightKind::TauKappa => -(order as f64),
        };
        let atoms: Vec<Atom> = pushed
            .atoms
            .iter()
            .filter_map(|a| {
                let m = a.mass * weight(a.position);
                (m > 0.0).then_some(Atom {
                    position: a.position,
                    mass: m,
                })
            })
            .collect();
        let pieces = pushed
            .pieces
            .into_iter()
            .map(|p| {
                let tail = p.density.tails().upper.map(|t| t.shift(shift));
                let label = format!("{kind:?}{order}");
                let base = p.density;
                DensityPiece {
                    support: p.support,
                    density: Density::Custom(CustomDensity::new(
                        label,
                        move |s| base.eval(s) * weight(s),
                        TailPair {
                            upper: tail,
                            lower: None,
                        },
                    )),
                }
            })
            .collect();
        Ok(Measure {
            atoms,
            pieces,
            envelope: TailPair {
                upper: pushed.envelope.upper.map(|t| t.shift(shift)),
                lower: None,
            },
        })
    }

    /// Largest finite |position| or support endpoint; used as a scale hint.
    pub fn scale_hint(&self) -> f64 {
        let atoms = self.atoms.iter().map(|a| a.position.abs());
        let ends = self
            .pieces
            .iter()
            .flat_map(|p| [p.support.lo, p.support.hi])
            .filter(|x| x.is_finite())
            .map(f64::abs);
        atoms.chain(ends).fold(1.0, f64::max)
    }
}
