//! Data model for finite-order real entire functions in Hadamard form
//!
//! `f(z) = z^n · exp(Q(z)) · Π_k E(z/a_k, m)^{mult_k}` with real zeros `a_k`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recursive::{self, ConstructedZero};

const EQ_TOL: f64 = 1e-12;

/// A nonzero real zero with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroEntry {
    pub location: f64,
    pub multiplicity: u64,
}

impl ZeroEntry {
    pub fn new(location: f64, multiplicity: u64) -> Result<Self> {
        if location == 0.0 || !location.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "zero location must be finite and nonzero, got {location}"
            )));
        }
        if multiplicity == 0 {
            return Err(Error::InvalidSpec("zero multiplicity must be >= 1".into()));
        }
        Ok(Self {
            location,
            multiplicity,
        })
    }
}

/// Real polynomial `b_0 + b_1 z + ... + b_d z^d`, coefficients low to high.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    coefficients: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("polynomial coefficients must be finite".into()));
        }
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        Ok(Self { coefficients })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c]).expect("finite constant")
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Degree; the zero polynomial and constants both report 0.
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coefficients.last().copied().unwrap_or(0.0)
    }

    pub fn coefficient(&self, j: usize) -> f64 {
        self.coefficients.get(j).copied().unwrap_or(0.0)
    }

    pub fn is_even(&self) -> bool {
        self.coefficients
            .iter()
            .enumerate()
            .all(|(j, c)| j % 2 == 0 || *c == 0.0)
    }

    /// `Q(z)` at `z = exp(log_r + i theta)`, accumulated term by term in
    /// polar form so that large radii do not pass through `exp(log_r)`.
    pub fn eval_polar(&self, log_r: f64, theta: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, b) in self.coefficients.iter().enumerate() {
            if *b == 0.0 {
                continue;
            }
            if j == 0 {
                acc += b;
                continue;
            }
            let jf = j as f64;
            let mag = b * (jf * log_r).exp();
            acc += Complex64::new(mag * (jf * theta).cos(), mag * (jf * theta).sin());
        }
        acc
    }

    /// `Q(z^2)`.
    pub fn compose_square(&self) -> Self {
        let mut out = vec![0.0; self.coefficients.len() * 2];
        for (j, b) in self.coefficients.iter().enumerate() {
            out[2 * j] = *b;
        }
        Self::new(out).expect("finite")
    }
}

/// Power-law zero generator:
/// `|a_k| = scale · (k + shift)^exponent · ln(k + shift)^log_exponent`, `k >= start`.
///
/// With `symmetric` set each index contributes the pair `±|a_k|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub scale: f64,
    pub exponent: f64,
    pub log_exponent: f64,
    pub shift: f64,
    pub start: u64,
    pub multiplicity: u64,
    pub symmetric: bool,
}

impl PowerLaw {
    /// `a_k = scale · k^exponent` for `k >= 1`, single positive zeros.
    pub fn simple(scale: f64, exponent: f64) -> Self {
        Self {
            scale,
            exponent,
            log_exponent: 0.0,
            shift: 0.0,
            start: 1,
            multiplicity: 1,
            symmetric: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidSpec(format!("power-law scale must be positive, got {}", self.scale)));
        }
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "power-law exponent must be positive, got {}",
                self.exponent
            )));
        }
        if !(self.log_exponent >= 0.0 && self.log_exponent.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "power-law log exponent must be nonnegative, got {}",
                self.log_exponent
            )));
        }
        if !self.shift.is_finite() {
            return Err(Error::InvalidSpec("power-law shift must be finite".into()));
        }
        if self.multiplicity == 0 {
            return Err(Error::InvalidSpec("power-law multiplicity must be >= 1".into()));
        }
        let y0 = self.start as f64 + self.shift;
        let floor = if self.log_exponent > 0.0 { 1.0 } else { 0.0 };
        if y0 <= floor {
            return Err(Error::InvalidSpec(format!(
                "power-law base start + shift = {y0} must exceed {floor}"
            )));
        }
        Ok(())
    }

    /// `ln |a_k|` for the generator index `k` (not the position in the list).
    #[inline]
    pub fn log_abs(&self, k: u64) -> f64 {
        self.log_abs_at(k as f64)
    }

    #[inline]
    pub(crate) fn log_abs_at(&self, x: f64) -> f64 {
        let y = x + self.shift;
        let ly = y.ln();
        let mut v = self.scale.ln() + self.exponent * ly;
        if self.log_exponent != 0.0 {
            v += self.log_exponent * ly.ln();
        }
        v
    }

    /// `log_exponent · ln u` where `u = ln(k + shift)`.
    #[inline]
    pub(crate) fn log_exponent_term(&self, u: f64) -> f64 {
        if self.log_exponent == 0.0 {
            0.0
        } else {
            self.log_exponent * u.ln()
        }
    }

    /// Zeros contributed by one index (2 for symmetric generators).
    pub fn zeros_per_index(&self) -> u64 {
        if self.symmetric {
            2 * self.multiplicity
        } else {
            self.multiplicity
        }
    }

    /// Whether `Σ |a_k|^{-p}` converges.
    pub fn power_sum_converges(&self, p: u32) -> bool {
        let q = self.exponent * p as f64;
        let beta = self.log_exponent * p as f64;
        q > 1.0 + EQ_TOL || ((q - 1.0).abs() <= EQ_TOL && beta > 1.0 + EQ_TOL)
    }

    /// Smallest generator index `k >= start` with `ln |a_k| >= log_target`.
    pub fn first_index_at_least(&self, log_target: f64) -> u64 {
        if self.log_abs(self.start) >= log_target {
            return self.start;
        }
        let mut hi = self.start.max(1);
        while self.log_abs(hi) < log_target {
            hi = hi.saturating_mul(2);
            if hi == u64::MAX {
                return u64::MAX;
            }
        }
        let mut lo = self.start;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.log_abs(mid) >= log_target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Recursive zero rules that cannot be written in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RecursiveRule {
    /// `a_0 = 1`, `a_{k+1} = (12 a_k^rho)^{1/(1-rho)}`, `n(a_k) = [a_k^rho]`.
    Construction { rho: f64 },
    /// `a_{k+1} = (12 a_k)^{k+1}`, `n(a_k) = [a_k^{1-1/k}]`.
    ConstructionOrder1,
}

impl RecursiveRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            RecursiveRule::Construction { rho } if !(*rho >= 0.5 && *rho < 1.0) => Err(
                Error::InvalidSpec(format!("recursive rule needs rho in [1/2, 1), got {rho}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Zeros of a recursive rule, optionally replaced by `±sqrt(a_k)`.
#[derive(Clone)]
pub struct RecursiveZeros {
    pub rule: RecursiveRule,
    pub squared: bool,
    cache: Arc<OnceLock<Vec<ConstructedZero>>>,
}

impl RecursiveZeros {
    pub fn new(rule: RecursiveRule, squared: bool) -> Result<Self> {
        rule.validate()?;
        Ok(Self {
            rule,
            squared,
            cache: Arc::new(OnceLock::new()),
        })
    }

    /// Zeros materialized for evaluation, cached on first use.
    pub fn materialized(&self) -> &[ConstructedZero] {
        self.cache
            .get_or_init(|| recursive::materialize(self.rule, recursive::EVAL_LIMITS))
    }
}

impl PartialEq for RecursiveZeros {
    fn eq(&self, other: &Self) -> bool {
        self.rule == other.rule && self.squared == other.squared
    }
}

impl fmt::Debug for RecursiveZeros {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RecursiveZeros")
            .field("rule", &self.rule)
            .field("squared", &self.squared)
            .finish()
    }
}

/// The zero sequence of a spec.
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroSequence {
    /// Explicit list, sorted by increasing `|location|`.
    Finite(Vec<ZeroEntry>),
    PowerLaw(PowerLaw),
    Recursive(RecursiveZeros),
}

impl ZeroSequence {
    pub fn finite(mut entries: Vec<ZeroEntry>) -> Self {
        entries.sort_by(|a, b| a.location.abs().total_cmp(&b.location.abs()));
        ZeroSequence::Finite(entries)
    }

    pub fn none() -> Self {
        ZeroSequence::Finite(Vec::new())
    }

    fn validate(&self) -> Result<()> {
        match self {
            ZeroSequence::Finite(entries) => {
                for e in entries {
                    ZeroEntry::new(e.location, e.multiplicity)?;
                }
                if entries
                    .windows(2)
                    .any(|w| w[0].location.abs() > w[1].location.abs())
                {
                    return Err(Error::InvalidSpec(
                        "zero list must be sorted by increasing |location|".into(),
                    ));
                }
                Ok(())
            }
            ZeroSequence::PowerLaw(p) => p.validate(),
            ZeroSequence::Recursive(r) => r.rule.validate(),
        }
    }

    /// Whether every zero is positive.
    pub fn all_positive(&self) -> bool {
        match self {
            ZeroSequence::Finite(e) => e.iter().all(|z| z.location > 0.0),
            ZeroSequence::PowerLaw(p) => !p.symmetric,
            ZeroSequence::Recursive(r) => !r.squared,
        }
    }

    /// Whether zeros come in pairs `±a` of equal multiplicity.
    pub fn is_symmetric(&self) -> bool {
        match self {
            ZeroSequence::Finite(e) => {
                let mut pos: Vec<(f64, u64)> = e
                    .iter()
                    .filter(|z| z.location > 0.0)
                    .map(|z| (z.location, z.multiplicity))
                    .collect();
                let mut neg: Vec<(f64, u64)> = e
                    .iter()
                    .filter(|z| z.location < 0.0)
                    .map(|z| (-z.location, z.multiplicity))
                    .collect();
                pos.sort_by(|a, b| a.0.total_cmp(&b.0));
                neg.sort_by(|a, b| a.0.total_cmp(&b.0));
                pos == neg
            }
            ZeroSequence::PowerLaw(p) => p.symmetric,
            ZeroSequence::Recursive(r) => r.squared,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ZeroSequence::Finite(e) if e.is_empty())
    }

    /// Smallest `m >= 0` with `Σ mult · |a_k|^{-(m+1)} < ∞`.
    pub fn minimal_factor_index(&self) -> Result<u32> {
        match self {
            ZeroSequence::Finite(_) => Ok(0),
            ZeroSequence::PowerLaw(p) => (0..64)
                .find(|m| p.power_sum_converges(m + 1))
                .ok_or_else(|| {
                    Error::CannotDecideConvergence(format!("no factor index below 64 for {p:?}"))
                }),
            // super-geometric growth: Σ a_k^{ρ-1} converges, and after the
            // square-root substitution Σ a_k^{ρ-(m+1)/2} needs (m+1)/2 > ρ
            ZeroSequence::Recursive(r) => match (r.squared, r.rule) {
                (false, _) => Ok(0),
                (true, RecursiveRule::Construction { rho }) => Ok((2.0 * rho).floor() as u32),
                (true, RecursiveRule::ConstructionOrder1) => Ok(1),
            },
        }
    }
}

/// Closed-form evaluators available for oracle cross-checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedForm {
    /// `cos √z`
    CosSqrt,
    /// `2z cos √z`
    TwoZCosSqrt,
    /// `sin(π√z)/(π√z) = Π (1 - z/n²)`
    SinePiSqrt,
    /// `cos z`
    Cosine,
    /// `2z² cos z`
    TwoZSquaredCos,
    /// `sin(πz)/(πz)`
    SincPi,
}

impl ClosedForm {
    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::CosSqrt => "cos-sqrt",
            ClosedForm::TwoZCosSqrt => "two-z-cos-sqrt",
            ClosedForm::SinePiSqrt => "sine-pi-sqrt",
            ClosedForm::Cosine => "cosine",
            ClosedForm::TwoZSquaredCos => "two-z-squared-cos",
            ClosedForm::SincPi => "sinc-pi",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            ClosedForm::CosSqrt,
            ClosedForm::TwoZCosSqrt,
            ClosedForm::SinePiSqrt,
            ClosedForm::Cosine,
            ClosedForm::TwoZSquaredCos,
            ClosedForm::SincPi,
        ]
        .into_iter()
        .find(|c| c.name() == name)
    }

    fn squared(self) -> Option<Self> {
        match self {
            ClosedForm::CosSqrt => Some(ClosedForm::Cosine),
            ClosedForm::TwoZCosSqrt => Some(ClosedForm::TwoZSquaredCos),
            ClosedForm::SinePiSqrt => Some(ClosedForm::SincPi),
            _ => None,
        }
    }
}

/// A real entire function of finite order in Hadamard form.
#[derive(Clone, Debug, PartialEq)]
pub struct EntireFunctionSpec {
    pub origin_power: u32,
    pub exponent_poly: RealPolynomial,
    pub zeros: ZeroSequence,
    pub factor_index: u32,
    pub closed_form: Option<ClosedForm>,
}

impl EntireFunctionSpec {
    pub fn new(
        origin_power: u32,
        exponent_poly: RealPolynomial,
        zeros: ZeroSequence,
        factor_index: u32,
        closed_form: Option<ClosedForm>,
    ) -> Result<Self> {
        zeros.validate()?;
        let minimal = zeros.minimal_factor_index()?;
        if factor_index < minimal {
            return Err(Error::InvalidSpec(format!(
                "factor index {factor_index} too small: zero series needs m >= {minimal}"
            )));
        }
        Ok(Self {
            origin_power,
            exponent_poly,
            zeros,
            factor_index,
            closed_form,
        })
    }

    /// Spec with the given zeros, minimal factor index, `n = 0`, `Q = 0`.
    pub fn from_zeros(zeros: ZeroSequence) -> Result<Self> {
        let m = zeros.minimal_factor_index()?;
        Self::new(0, RealPolynomial::zero(), zeros, m, None)
    }

    /// `max(m, deg Q)` using the declared factor index.
    pub fn genus(&self) -> u32 {
        self.factor_index.max(self.exponent_poly.degree() as u32)
    }

    /// Genus zero, positive zeros, constant exponent: every factor
    /// `|1 - z/a|` is smallest at `z = r` and largest at `z = -r`.
    pub fn has_positive_axis_extremes(&self) -> bool {
        self.factor_index == 0 && self.exponent_poly.degree() == 0 && self.zeros.all_positive()
    }

    /// Symmetric zeros, `m <= 1`, constant exponent: `|f(z)| = |h(z²)|` with `h`
    /// of the previous kind, so extremes sit at `θ = 0` and `θ = π/2`.
    pub fn has_paired_axis_extremes(&self) -> bool {
        self.factor_index <= 1
            && self.exponent_poly.degree() == 0
            && self.zeros.is_symmetric()
            && !self.zeros.is_empty()
    }

    /// The spec of `g(z) = f(z²)`.
    pub fn square_substitute(&self) -> Result<Self> {
        let zeros = match &self.zeros {
            ZeroSequence::Finite(entries) => {
                let mut out = Vec::with_capacity(entries.len() * 2);
                for e in entries {
                    if e.location < 0.0 {
                        return Err(Error::MixedSignZeros(e.location));
                    }
                    let s = e.location.sqrt();
                    out.push(ZeroEntry::new(-s, e.multiplicity)?);
                    out.push(ZeroEntry::new(s, e.multiplicity)?);
                }
                ZeroSequence::finite(out)
            }
            ZeroSequence::PowerLaw(p) => {
                if p.symmetric {
                    return Err(Error::MixedSignZeros(-p.log_abs(p.start).exp()));
                }
                ZeroSequence::PowerLaw(PowerLaw {
                    scale: p.scale.sqrt(),
                    exponent: p.exponent / 2.0,
                    log_exponent: p.log_exponent / 2.0,
                    symmetric: true,
                    ..*p
                })
            }
            ZeroSequence::Recursive(r) => {
                if r.squared {
                    return Err(Error::MixedSignZeros(
                        -r.materialized().first().map_or(1.0, |z| (z.log_a / 2.0).exp()),
                    ));
                }
                ZeroSequence::Recursive(RecursiveZeros::new(r.rule, true)?)
            }
        };
        let m = zeros.minimal_factor_index()?;
        Self::new(
            2 * self.origin_power,
            self.exponent_poly.compose_square(),
            zeros,
            m,
            self.closed_form.and_then(ClosedForm::squared),
        )
    }

    /// Membership in the Laguerre–Pólya form: `deg Q <= 2` with nonpositive
    /// quadratic coefficient and `m <= 1` (zeros are real by construction).
    pub fn is_laguerre_polya(&self) -> bool {
        let q = &self.exponent_poly;
        q.degree() <= 2 && q.coefficient(2) <= 0.0 && self.factor_index <= 1
    }
}
