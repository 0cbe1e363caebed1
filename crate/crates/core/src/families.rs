//! Built-in example families, their asymptotic formulas, and checks of the
//! inequalities behind the recursive construction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closed_form::log_abs_sin;
use crate::error::{Error, Result};
use crate::logvalue::CompensatedSum;
use crate::modulus::{min_log_modulus, ProfileOptions};
use crate::recursive::{self, ConstructedZero, Limits};
use crate::spec::{
    ClosedForm, EntireFunctionSpec, PowerLaw, RealPolynomial, RecursiveRule, RecursiveZeros, ZeroSequence,
};

const LN_2: f64 = std::f64::consts::LN_2;
const LN_3: f64 = 1.098_612_288_668_109_8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyId {
    /// `cos √z`
    CosSqrt,
    /// `2z cos √z`
    ZCosSqrt,
    /// `Π (1 - z/n^σ)`, `σ > 1`.
    Hardy { sigma: f64 },
    /// `Π_{n>=2} (1 - z/(n (log n)^α))`, `1 < α < 2`.
    Lindelof { alpha: f64 },
    /// Recursive construction of order `ρ`.
    Constructed { rho: f64 },
    ConstructedOrder1,
    /// Zeros `k^s`, or `±k^s` when symmetric, `0 < s < 1`, with the smallest
    /// convergent factor index.
    GenusPower { s: f64, symmetric: bool },
}

fn out_of_range(msg: String) -> Error {
    Error::ParameterOutOfRange(msg)
}

fn cos_sqrt_zeros() -> ZeroSequence {
    // ((k - 1/2) π)²
    ZeroSequence::PowerLaw(PowerLaw {
        scale: PI * PI,
        exponent: 2.0,
        log_exponent: 0.0,
        shift: -0.5,
        start: 1,
        multiplicity: 1,
        symmetric: false,
    })
}

pub fn make_family(id: FamilyId) -> Result<EntireFunctionSpec> {
    match id {
        FamilyId::CosSqrt => {
            EntireFunctionSpec::new(0, RealPolynomial::zero(), cos_sqrt_zeros(), 0, Some(ClosedForm::CosSqrt))
        }
        FamilyId::ZCosSqrt => EntireFunctionSpec::new(
            1,
            RealPolynomial::constant(LN_2),
            cos_sqrt_zeros(),
            0,
            Some(ClosedForm::TwoZCosSqrt),
        ),
        FamilyId::Hardy { sigma } => {
            if !(sigma > 1.0 && sigma.is_finite()) {
                return Err(out_of_range(format!("Hardy family needs sigma > 1, got {sigma}")));
            }
            let closed = (sigma == 2.0).then_some(ClosedForm::SinePiSqrt);
            EntireFunctionSpec::new(
                0,
                RealPolynomial::zero(),
                ZeroSequence::PowerLaw(PowerLaw::simple(1.0, sigma)),
                0,
                closed,
            )
        }
        FamilyId::Lindelof { alpha } => {
            if !(alpha > 1.0 && alpha < 2.0) {
                return Err(out_of_range(format!("Lindelof family needs alpha in (1, 2), got {alpha}")));
            }
            // log 1 = 0 would put a zero at the origin, so the product starts at n = 2
            let law = PowerLaw {
                scale: 1.0,
                exponent: 1.0,
                log_exponent: alpha,
                shift: 0.0,
                start: 2,
                multiplicity: 1,
                symmetric: false,
            };
            EntireFunctionSpec::new(0, RealPolynomial::zero(), ZeroSequence::PowerLaw(law), 0, None)
        }
        FamilyId::Constructed { rho } => {
            if !(rho >= 0.5 && rho < 1.0) {
                return Err(out_of_range(format!("constructed family needs rho in [1/2, 1), got {rho}")));
            }
            let zeros = RecursiveZeros::new(RecursiveRule::Construction { rho }, false)?;
            EntireFunctionSpec::from_zeros(ZeroSequence::Recursive(zeros))
        }
        FamilyId::ConstructedOrder1 => {
            let zeros = RecursiveZeros::new(RecursiveRule::ConstructionOrder1, false)?;
            EntireFunctionSpec::from_zeros(ZeroSequence::Recursive(zeros))
        }
        FamilyId::GenusPower { s, symmetric } => {
            if !(s > 0.0 && s < 1.0) {
                return Err(out_of_range(format!("genus-power family needs s in (0, 1), got {s}")));
            }
            let law = PowerLaw {
                symmetric,
                ..PowerLaw::simple(1.0, s)
            };
            EntireFunctionSpec::from_zeros(ZeroSequence::PowerLaw(law))
        }
    }
}

/// Parameters a family builder may read; unused ones are ignored.
#[derive(Clone, Copy, Debug, Default)]
pub struct FamilyParams {
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub rho: Option<f64>,
    pub s: Option<f64>,
    pub symmetric: bool,
}

/// A named family that can be selected at run time.
pub trait FamilyBuilder: Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn id(&self, params: &FamilyParams) -> Result<FamilyId>;

    fn build(&self, params: &FamilyParams) -> Result<EntireFunctionSpec> {
        make_family(self.id(params)?)
    }
}

fn need(value: Option<f64>, what: &str, family: &str) -> Result<f64> {
    value.ok_or_else(|| out_of_range(format!("family `{family}` needs --{what}")))
}

struct Fixed(&'static str, &'static str, FamilyId);

impl FamilyBuilder for Fixed {
    fn name(&self) -> &'static str {
        self.0
    }
    fn summary(&self) -> &'static str {
        self.1
    }
    fn id(&self, _: &FamilyParams) -> Result<FamilyId> {
        Ok(self.2)
    }
}

struct Hardy;

impl FamilyBuilder for Hardy {
    fn name(&self) -> &'static str {
        "hardy"
    }
    fn summary(&self) -> &'static str {
        "prod (1 - z/n^sigma), order 1/sigma (--sigma)"
    }
    fn id(&self, p: &FamilyParams) -> Result<FamilyId> {
        Ok(FamilyId::Hardy {
            sigma: need(p.sigma, "sigma", self.name())?,
        })
    }
}

struct Lindelof;

impl FamilyBuilder for Lindelof {
    fn name(&self) -> &'static str {
        "lindelof"
    }
    fn summary(&self) -> &'static str {
        "prod (1 - z/(n (log n)^alpha)), order 1 (--alpha)"
    }
    fn id(&self, p: &FamilyParams) -> Result<FamilyId> {
        Ok(FamilyId::Lindelof {
            alpha: need(p.alpha, "alpha", self.name())?,
        })
    }
}

struct Constructed;

impl FamilyBuilder for Constructed {
    fn name(&self) -> &'static str {
        "constructed"
    }
    fn summary(&self) -> &'static str {
        "recursive zeros a_{k+1} = (12 a_k^rho)^{1/(1-rho)} (--rho)"
    }
    fn id(&self, p: &FamilyParams) -> Result<FamilyId> {
        Ok(FamilyId::Constructed {
            rho: need(p.rho, "rho", self.name())?,
        })
    }
}

struct GenusPower;

impl FamilyBuilder for GenusPower {
    fn name(&self) -> &'static str {
        "genus-power"
    }
    fn summary(&self) -> &'static str {
        "zeros k^s or +-k^s (--s, --symmetric), minimal factor index"
    }
    fn id(&self, p: &FamilyParams) -> Result<FamilyId> {
        Ok(FamilyId::GenusPower {
            s: need(p.s, "s", self.name())?,
            symmetric: p.symmetric,
        })
    }
}

static REGISTRY: [&dyn FamilyBuilder; 7] = [
    &Fixed("cos-sqrt", "cos sqrt(z)", FamilyId::CosSqrt),
    &Fixed("z-cos-sqrt", "2z cos sqrt(z)", FamilyId::ZCosSqrt),
    &Hardy,
    &Lindelof,
    &Constructed,
    &Fixed(
        "constructed-order1",
        "recursive zeros a_{k+1} = (12 a_k)^{k+1}, order 1",
        FamilyId::ConstructedOrder1,
    ),
    &GenusPower,
];

pub fn family_registry() -> &'static [&'static dyn FamilyBuilder] {
    &REGISTRY
}

pub fn find_family(name: &str) -> Option<&'static dyn FamilyBuilder> {
    REGISTRY.iter().copied().find(|b| b.name() == name)
}

/// Default parameters of the built-in families, as used by the consistency checks.
pub fn builtin_families() -> Vec<(String, FamilyId)> {
    vec![
        ("cos-sqrt".into(), FamilyId::CosSqrt),
        ("z-cos-sqrt".into(), FamilyId::ZCosSqrt),
        ("hardy(4/3)".into(), FamilyId::Hardy { sigma: 4.0 / 3.0 }),
        ("hardy(2)".into(), FamilyId::Hardy { sigma: 2.0 }),
        ("lindelof(1.5)".into(), FamilyId::Lindelof { alpha: 1.5 }),
        ("constructed(1/2)".into(), FamilyId::Constructed { rho: 0.5 }),
        ("constructed(3/4)".into(), FamilyId::Constructed { rho: 0.75 }),
        ("constructed-order1".into(), FamilyId::ConstructedOrder1),
        (
            "genus-power(0.4, symmetric)".into(),
            FamilyId::GenusPower { s: 0.4, symmetric: true },
        ),
    ]
}

/// `log |(2/√(2πz)) sin(π z^ρ) exp(π cot(πρ) z^ρ)|` with `ρ = 1/σ`, principal
/// branches. `-inf` at the zeros of the sine.
pub fn hardy_asymptotic_log(sigma: f64, z: Complex64) -> Result<f64> {
    let rho = 1.0 / sigma;
    if !(rho > 0.5 && rho < 1.0) {
        return Err(out_of_range(format!("Hardy asymptotic needs 1 < sigma < 2, got {sigma}")));
    }
    if !(z.norm() >= 10.0) {
        return Err(out_of_range(format!("Hardy asymptotic needs |z| >= 10, got {}", z.norm())));
    }
    let w = z.powf(rho);
    let prefactor = LN_2 - 0.5 * (2.0 * PI * z.norm()).ln();
    Ok(prefactor + log_abs_sin(PI * w) + PI / (PI * rho).tan() * w.re)
}

/// `Re[z (log(-z))^{1-α} / (1-α)]`, the `o(1) = 0` form of the Lindelof
/// asymptotic, for `|arg z| < π - 0.1` and `|z| >= 100`.
pub fn lindelof_asymptotic_log(alpha: f64, z: Complex64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(out_of_range(format!("Lindelof asymptotic needs alpha in (1, 2), got {alpha}")));
    }
    if !(z.arg().abs() < PI - 0.1 && z.norm() >= 100.0) {
        return Err(out_of_range(format!("Lindelof asymptotic needs |arg z| < pi - 0.1 and |z| >= 100, got {z}")));
    }
    let l = (-z).ln();
    Ok((z * l.powf(1.0 - alpha) / (1.0 - alpha)).re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum ConstructionVariant {
    Rho { rho: f64 },
    Order1,
}

impl ConstructionVariant {
    fn rule(self) -> RecursiveRule {
        match self {
            ConstructionVariant::Rho { rho } => RecursiveRule::Construction { rho },
            ConstructionVariant::Order1 => RecursiveRule::ConstructionOrder1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Construction51Data {
    pub variant: ConstructionVariant,
    /// `ρ < 1/2`: values are computed but carry no verdicts.
    pub exploratory: bool,
    pub zeros: Vec<ConstructedZero>,
    /// `log r_k = log 3 + log a_k`.
    pub log_r: Vec<f64>,
    /// `([a_k^ρ] - 1) log 2`, or with `1 - 1/k` in place of `ρ`.
    pub claimed_lower_bounds: Vec<f64>,
}

impl Construction51Data {
    pub fn k_max(&self) -> usize {
        self.zeros.len()
    }
}

fn construction_limits(k_max: u32) -> Limits {
    Limits {
        max_k: k_max,
        ..recursive::EVAL_LIMITS
    }
}

/// Materializes `a_k`, `m_k` and `r_k = 3 a_k` for `k = 1..=k_max`, or fewer
/// when `a_k` leaves the representable range.
pub fn build_construction51(variant: ConstructionVariant, k_max: u32) -> Result<Construction51Data> {
    if let ConstructionVariant::Rho { rho } = variant {
        if !(rho >= 0.5 && rho < 1.0) {
            return Err(out_of_range(format!(
                "construction needs rho in [1/2, 1), got {rho}; smaller values are exploratory only"
            )));
        }
    }
    construct(variant, k_max, false)
}

/// [`build_construction51`] for `0 < ρ < 1/2`, where the recursion need not
/// increase; no verdicts are attached.
pub fn build_construction51_exploratory(rho: f64, k_max: u32) -> Result<Construction51Data> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(out_of_range(format!("exploratory construction takes rho in (0, 1/2), got {rho}")));
    }
    construct(ConstructionVariant::Rho { rho }, k_max, true)
}

fn construct(variant: ConstructionVariant, k_max: u32, exploratory: bool) -> Result<Construction51Data> {
    if k_max < 2 {
        return Err(out_of_range(format!("k_max must be at least 2, got {k_max}")));
    }
    // one extra zero so that r_{k+1} and the tail past k_max are available
    let zeros = recursive::materialize(variant.rule(), construction_limits(k_max + 1));
    let log_r = zeros.iter().map(|z| LN_3 + z.log_a).collect();
    let claimed_lower_bounds = zeros.iter().map(|z| (z.count_f64() - 1.0) * LN_2).collect();
    Ok(Construction51Data {
        variant,
        exploratory,
        zeros,
        log_r,
        claimed_lower_bounds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Construction51Check {
    pub k: u32,
    /// `Σ_{j>k} m_j r_k / a_j`.
    pub tail_sum: f64,
    pub tail_at_most_half: bool,
    /// `Σ_j m_j log|1 - r_k/a_j|`.
    pub log_min_modulus: f64,
    pub claimed_lower_bound: f64,
    /// `log m(r_k)` minus the claimed bound, summed without cancellation.
    pub bound_margin: f64,
    /// The margin exceeds the rounding slack of `[a_k^ρ]`.
    pub bound_holds: bool,
    pub log_r_next: f64,
    pub exceeds_next_radius: bool,
}

/// Checks the tail condition and the two inequalities for each `k` in `ks`.
pub fn verify_construction51(data: &Construction51Data, ks: std::ops::RangeInclusive<u32>) -> Result<Vec<Construction51Check>> {
    if data.exploratory {
        return Err(out_of_range("exploratory constructions carry no verdicts".into()));
    }
    // the tail decays only geometrically for ρ = 1/2, so sum over every
    // zero that can be materialized
    let zs = recursive::materialize(data.variant.rule(), recursive::EVAL_LIMITS);
    let n = data.zeros.len();
    if zs.len() < n || zs[..n] != data.zeros[..] {
        return Err(out_of_range("construction data does not match its recursion".into()));
    }
    let mut out = Vec::new();
    for k in ks {
        let i = k as usize;
        if i == 0 || i >= n {
            return Err(out_of_range(format!("k = {k} outside the materialized range 1..={}", n - 1)));
        }
        let log_rk = data.log_r[i - 1];
        let log_ak = zs[i - 1].log_a;
        let mut tail = 0.0;
        let mut log_m = CompensatedSum::default();
        // log m(r_k) - (n(a_k) - 1) log 2, using Σ_{j<=k} m_j = n(a_k); the
        // j = k term vanishes since r_k/a_k - 1 = 2
        let mut margin = CompensatedSum::default();
        margin.add(LN_2);
        for (j, z) in zs.iter().enumerate() {
            let ratio_log = log_rk - z.log_a;
            let mult = if z.weight.is_finite() { z.weight } else { z.log_mult.exp() };
            if j + 1 > i {
                tail += (z.log_mult + ratio_log).exp();
                let term = mult * (-ratio_log.exp()).ln_1p();
                log_m.add(term);
                margin.add(term);
            } else {
                log_m.add(mult * ratio_log.exp_m1().ln());
                if j + 1 < i {
                    margin.add(mult * (0.5 * (3.0 * (log_ak - z.log_a).exp() - 1.0)).ln());
                }
            }
        }
        let slack = zs[i - 1].slack;
        let log_r_next = data.log_r[i];
        let log_m = log_m.value();
        let margin = margin.value();
        out.push(Construction51Check {
            k,
            tail_sum: tail,
            tail_at_most_half: tail <= 0.5,
            log_min_modulus: log_m,
            claimed_lower_bound: data.claimed_lower_bounds[i - 1],
            bound_margin: margin,
            bound_holds: margin >= slack * LN_2,
            log_r_next,
            exceeds_next_radius: log_m > log_r_next,
        });
    }
    Ok(out)
}

/// Difference between the direct sum and the library's minimum modulus at
/// `r_k`, both in log scale.
pub fn construction_consistency(spec: &EntireFunctionSpec, check: &Construction51Check, log_rk: f64) -> Result<f64> {
    let (v, _) = min_log_modulus(spec, log_rk, &ProfileOptions::default())?;
    Ok(v - check.log_min_modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique() {
        let mut names: Vec<&str> = family_registry().iter().map(|b| b.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), family_registry().len());
        assert!(find_family("z-cos-sqrt").is_some());
    }
}
