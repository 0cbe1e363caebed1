//! Threshold schedules for escape tests: `|f^{n+L}(z)| >= exp(values[n])`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulus::{max_log_modulus, min_log_modulus, tilde_min_log_detail, ProfileOptions, TildeGrid};
use crate::orbit::{iterate_min_modulus_log, OrbitOptions};
use crate::spec::EntireFunctionSpec;

/// Relative accuracy of `M^{-1}` in `log r`.
const INVERSE_TOLERANCE: f64 = 1e-12;
/// Default exponent in `M^{-1}(m^{n+N}(r)^{1/3})`.
pub const DEFAULT_CUBE_EXPONENT: f64 = 1.0 / 3.0;

/// Which sequence the thresholds follow. Radii are given as `log r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScheduleKind {
    /// `M^n(R)`.
    MaxModPower { log_r: f64 },
    /// `M^{-1}(m^{n+N}(r)^exponent)`.
    MinModIterCube { log_r: f64, n: usize, exponent: f64 },
    /// `m̃^n(R)`.
    TildeMinIter { log_r: f64 },
    /// `μ_ε^n(R)` with `μ_ε(r) = M(r)^ε`.
    QuiteFast { epsilon: f64, log_r: f64 },
    Custom { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSchedule {
    pub kind: ScheduleKind,
    /// Iterates skipped before the first comparison.
    pub offset: usize,
    /// `values[n]` is a log-modulus; `+inf` past the evaluable range.
    #[serde(with = "crate::logvalue::extended_f64::vec")]
    pub values: Vec<f64>,
    /// `|log M(M^{-1}(y)) - log y| / max(1, |log y|)` per finite inverse.
    pub inverse_residuals: Vec<f64>,
}

impl ThresholdSchedule {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of leading finite thresholds.
    pub fn finite_len(&self) -> usize {
        self.values.iter().take_while(|v| v.is_finite()).count()
    }

    /// Nondecreasing from the first finite value on.
    pub fn is_monotone(&self) -> bool {
        let start = self.values.iter().position(|v| v.is_finite()).unwrap_or(0);
        self.values[start..].windows(2).all(|w| w[1] >= w[0])
    }
}

/// Loose parameters as they arrive from the command line.
#[derive(Clone, Debug, Default)]
pub struct ScheduleParams {
    pub radius: Option<f64>,
    pub n: Option<usize>,
    pub exponent: Option<f64>,
    pub epsilon: Option<f64>,
    pub values: Option<Vec<f64>>,
}

/// A named schedule rule that can be selected at run time.
pub trait ScheduleRule: Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn matches(&self, kind: &ScheduleKind) -> bool;
    fn kind(&self, params: &ScheduleParams) -> Result<ScheduleKind>;
    /// `values[0..=steps]` and the inverse residuals.
    fn thresholds(&self, spec: &EntireFunctionSpec, kind: &ScheduleKind, steps: usize) -> Result<(Vec<f64>, Vec<f64>)>;
}

fn need<T>(value: Option<T>, what: &str, rule: &str) -> Result<T> {
    value.ok_or_else(|| Error::ParameterOutOfRange(format!("schedule `{rule}` needs --{what}")))
}

fn log_radius(params: &ScheduleParams, rule: &str) -> Result<f64> {
    let r = need(params.radius, "radius", rule)?;
    if !(r > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("radius must be positive, got {r}")));
    }
    Ok(r.ln())
}

fn below(what: &str, log_r: f64, image: f64) -> Error {
    Error::BelowFixedPoint(format!("{what} at log r = {log_r} is {image}, not above log r"))
}

/// `log M(e^u)`, `+inf` past the evaluable range.
fn log_max(spec: &EntireFunctionSpec, u: f64) -> Result<f64> {
    if u == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    match max_log_modulus(spec, u, &ProfileOptions::default()) {
        Ok((v, _)) => Ok(v),
        Err(Error::TailNotConvergent(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Applies `u ← step(u)` `steps` times from `start`, saturating at `+inf`.
fn iterate(start: f64, steps: usize, mut step: impl FnMut(f64) -> Result<f64>) -> Result<Vec<f64>> {
    let mut values = vec![start];
    for _ in 0..steps {
        let u = *values.last().unwrap();
        values.push(if u.is_finite() { step(u)? } else { f64::INFINITY });
    }
    Ok(values)
}

struct MaxModPower;

impl ScheduleRule for MaxModPower {
    fn name(&self) -> &'static str {
        "max-mod-power"
    }
    fn summary(&self) -> &'static str {
        "M^n(R) (--radius)"
    }
    fn matches(&self, kind: &ScheduleKind) -> bool {
        matches!(kind, ScheduleKind::MaxModPower { .. })
    }
    fn kind(&self, p: &ScheduleParams) -> Result<ScheduleKind> {
        Ok(ScheduleKind::MaxModPower {
            log_r: log_radius(p, self.name())?,
        })
    }
    fn thresholds(&self, spec: &EntireFunctionSpec, kind: &ScheduleKind, steps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let &ScheduleKind::MaxModPower { log_r } = kind else { unreachable!() };
        let image = log_max(spec, log_r)?;
        if !(image > log_r) {
            return Err(below("log M", log_r, image));
        }
        Ok((iterate(log_r, steps, |u| log_max(spec, u))?, Vec::new()))
    }
}

struct QuiteFast;

impl ScheduleRule for QuiteFast {
    fn name(&self) -> &'static str {
        "quite-fast"
    }
    fn summary(&self) -> &'static str {
        "mu_eps^n(R), mu_eps(r) = M(r)^eps (--epsilon, --radius)"
    }
    fn matches(&self, kind: &ScheduleKind) -> bool {
        matches!(kind, ScheduleKind::QuiteFast { .. })
    }
    fn kind(&self, p: &ScheduleParams) -> Result<ScheduleKind> {
        let epsilon = need(p.epsilon, "epsilon", self.name())?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::ParameterOutOfRange(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(ScheduleKind::QuiteFast {
            epsilon,
            log_r: log_radius(p, self.name())?,
        })
    }
    fn thresholds(&self, spec: &EntireFunctionSpec, kind: &ScheduleKind, steps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let &ScheduleKind::QuiteFast { epsilon, log_r } = kind else { unreachable!() };
        let image = epsilon * log_max(spec, log_r)?;
        if !(image > log_r) {
            return Err(below("log mu_eps", log_r, image));
        }
        Ok((iterate(log_r, steps, |u| Ok(epsilon * log_max(spec, u)?))?, Vec::new()))
    }
}

struct TildeMinIter;

impl ScheduleRule for TildeMinIter {
    fn name(&self) -> &'static str {
        "tilde-min-iter"
    }
    fn summary(&self) -> &'static str {
        "tilde-m^n(R), tilde-m(r) = max_{s<=r} m(s) (--radius)"
    }
    fn matches(&self, kind: &ScheduleKind) -> bool {
        matches!(kind, ScheduleKind::TildeMinIter { .. })
    }
    fn kind(&self, p: &ScheduleParams) -> Result<ScheduleKind> {
        Ok(ScheduleKind::TildeMinIter {
            log_r: log_radius(p, self.name())?,
        })
    }
    fn thresholds(&self, spec: &EntireFunctionSpec, kind: &ScheduleKind, steps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let &ScheduleKind::TildeMinIter { log_r } = kind else { unreachable!() };
        let tilde = |u: f64| match tilde_min_log_detail(spec, u, TildeGrid::default(), &ProfileOptions::default()) {
            Ok(t) => Ok(t.log_value),
            Err(Error::TailNotConvergent(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        };
        let image = tilde(log_r)?;
        if !(image > log_r) {
            return Err(below("log tilde-m", log_r, image));
        }
        Ok((iterate(log_r, steps, tilde)?, Vec::new()))
    }
}

struct MinModIterCube;

impl ScheduleRule for MinModIterCube {
    fn name(&self) -> &'static str {
        "min-mod-iter-cube"
    }
    fn summary(&self) -> &'static str {
        "M^{-1}(m^{n+N}(r)^{1/3}) (--radius, --n, --exponent)"
    }
    fn matches(&self, kind: &ScheduleKind) -> bool {
        matches!(kind, ScheduleKind::MinModIterCube { .. })
    }
    fn kind(&self, p: &ScheduleParams) -> Result<ScheduleKind> {
        let exponent = p.exponent.unwrap_or(DEFAULT_CUBE_EXPONENT);
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(Error::ParameterOutOfRange(format!("exponent must lie in (0, 1], got {exponent}")));
        }
        Ok(ScheduleKind::MinModIterCube {
            log_r: log_radius(p, self.name())?,
            n: p.n.unwrap_or(0),
            exponent,
        })
    }
    fn thresholds(&self, spec: &EntireFunctionSpec, kind: &ScheduleKind, steps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let &ScheduleKind::MinModIterCube { log_r, n, exponent } = kind else { unreachable!() };
        let opts = OrbitOptions {
            max_iter: n + steps,
            escape_log_threshold: f64::INFINITY,
            ..OrbitOptions::default()
        };
        let image = match min_log_modulus(spec, log_r, &opts.profile) {
            Ok((v, _)) => v,
            Err(Error::TailNotConvergent(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        if !(image > log_r) {
            return Err(below("log m", log_r, image));
        }
        let orbit = iterate_min_modulus_log(spec, log_r, &opts)?;
        let mut values = Vec::with_capacity(steps + 1);
        let mut residuals = Vec::new();
        for k in n..=n + steps {
            // orbits stop early only past the evaluable range
            let target = orbit.values.get(k).map_or(f64::INFINITY, |v| exponent * v);
            let (x, residual) = inverse_max_modulus(spec, target)?;
            if let Some(res) = residual {
                residuals.push(res);
            }
            values.push(x);
        }
        Ok((values, residuals))
    }
}

struct Custom;

impl ScheduleRule for Custom {
    fn name(&self) -> &'static str {
        "custom"
    }
    fn summary(&self) -> &'static str {
        "explicit log thresholds (--values)"
    }
    fn matches(&self, kind: &ScheduleKind) -> bool {
        matches!(kind, ScheduleKind::Custom { .. })
    }
    fn kind(&self, p: &ScheduleParams) -> Result<ScheduleKind> {
        Ok(ScheduleKind::Custom {
            values: need(p.values.clone(), "values", self.name())?,
        })
    }
    fn thresholds(&self, _: &EntireFunctionSpec, kind: &ScheduleKind, steps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let ScheduleKind::Custom { values } = kind else { unreachable!() };
        if values.len() < steps + 1 {
            return Err(Error::ParameterOutOfRange(format!(
                "{} custom values given, {} steps need {}",
                values.len(),
                steps,
                steps + 1
            )));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::ParameterOutOfRange("custom values contain NaN".into()));
        }
        Ok((values[..=steps].to_vec(), Vec::new()))
    }
}

static REGISTRY: [&dyn ScheduleRule; 5] = [&MaxModPower, &MinModIterCube, &TildeMinIter, &QuiteFast, &Custom];

pub fn schedule_registry() -> &'static [&'static dyn ScheduleRule] {
    &REGISTRY
}

pub fn find_schedule(name: &str) -> Option<&'static dyn ScheduleRule> {
    REGISTRY.iter().copied().find(|r| r.name() == name)
}

/// `log M^{-1}(e^target)` by bisection on `log r`, with the relative
/// residual. `-inf` when the target lies below `log |f(0)|`, `+inf` when it
/// lies past the evaluable range.
pub fn inverse_max_modulus(spec: &EntireFunctionSpec, target: f64) -> Result<(f64, Option<f64>)> {
    if target == f64::INFINITY {
        return Ok((f64::INFINITY, None));
    }
    if target.is_nan() {
        return Err(Error::ParameterOutOfRange("cannot invert M at NaN".into()));
    }
    let mut hi = target.max(1.0);
    let mut hi_val = log_max(spec, hi)?;
    while hi_val < target {
        hi = 2.0 * hi + 1.0;
        hi_val = log_max(spec, hi)?;
        if hi_val == f64::INFINITY {
            return Ok((f64::INFINITY, None));
        }
    }
    let mut step = 1.0;
    let mut lo = hi - step;
    while log_max(spec, lo)? > target {
        step *= 2.0;
        lo = hi - step;
        if lo < -700.0 {
            return Ok((f64::NEG_INFINITY, None));
        }
    }
    while hi - lo > INVERSE_TOLERANCE * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if log_max(spec, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let residual = (log_max(spec, hi)? - target).abs() / target.abs().max(1.0);
    Ok((hi, Some(residual)))
}

/// Thresholds `values[0..=steps]` for `kind` with the given offset.
pub fn build_schedule(spec: &EntireFunctionSpec, kind: ScheduleKind, steps: usize, offset: usize) -> Result<ThresholdSchedule> {
    if steps == 0 {
        return Err(Error::ParameterOutOfRange("a schedule needs at least one step".into()));
    }
    let rule = REGISTRY
        .iter()
        .find(|r| r.matches(&kind))
        .expect("every kind has a registered rule");
    let (values, inverse_residuals) = rule.thresholds(spec, &kind, steps)?;
    Ok(ThresholdSchedule {
        kind,
        offset,
        values,
        inverse_residuals,
    })
}
