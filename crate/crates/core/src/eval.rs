//! Log-space evaluation of Hadamard products.
//!
//! Zeros inside the working radius are summed factor by factor. Beyond a
//! cutoff where `|z/a_k| <= 0.75`, a power-law tail is replaced by its
//! power-series expansion `-Σ_p S_p z^p / p` with the power sums `S_p`
//! estimated by Euler–Maclaurin. Long smooth stretches of a power-law sum
//! are themselves handled by Euler–Maclaurin with an adaptive integral.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::logvalue::{reduce_angle, CompensatedSum, LogComplexValue};
use crate::numeric::{gauss_laguerre, integrate};
use crate::spec::{EntireFunctionSpec, PowerLaw, ZeroSequence};

/// Default absolute log-modulus tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const W_MAX: f64 = 0.75;
const SERIES_BELOW: f64 = -1.2;
const ASYMPTOTIC_ABOVE: f64 = 36.0;
const ZERO_GAP_SQ: f64 = 1e-24;
const MAX_SITES: u64 = 1 << 50;
const MAX_ARGUMENT_SITES: u64 = 1 << 26;
const MIN_DIRECT: u64 = 64;
const EXACT_HEAD: u64 = 1024;
const BAND: u64 = 512;
const MIN_SEGMENT: u64 = 2048;
const FD_STEP: f64 = 8.0;

/// `log E(z, m)` for the Weierstrass primary factor
/// `E(z, m) = (1 - z) exp(z + z²/2 + ... + z^m/m)`.
pub fn primary_factor_log(z: Complex64, m: u32) -> LogComplexValue {
    if z == Complex64::new(0.0, 0.0) {
        return LogComplexValue::ONE;
    }
    let v = factor_c(z.norm().ln(), z.arg(), m);
    if v.re == f64::NEG_INFINITY {
        LogComplexValue::ZERO
    } else {
        LogComplexValue::from_log(v)
    }
}

/// `Re log E(w, m)` for `w = e^x (c + i s)` with `c² + s² = 1`.
#[inline]
pub(crate) fn factor_re(x: f64, c: f64, s: f64, m: u32) -> f64 {
    if x < SERIES_BELOW {
        let rho = x.exp();
        let w = Complex64::new(rho * c, rho * s);
        let mut pw = w.powu(m + 1);
        let mut mag = rho.powi(m as i32 + 1);
        let mut p = (m + 1) as f64;
        let mut acc = 0.0;
        let mut scale = 0.0;
        loop {
            acc -= pw.re / p;
            scale += mag / p;
            mag *= rho;
            if mag <= 1e-17 * scale {
                break;
            }
            pw *= w;
            p += 1.0;
        }
        acc
    } else if x > ASYMPTOTIC_ABOVE {
        let inv = (-x).exp();
        let (ir, ii) = (inv * c, -inv * s);
        let d = (1.0 - ir) * (1.0 - ir) + ii * ii;
        let mut acc = x + 0.5 * d.ln();
        if m > 0 {
            let u = Complex64::new(c, s);
            let mut pu = u;
            for p in 1..=m {
                let pf = p as f64;
                acc += (pf * x).exp() * pu.re / pf;
                pu *= u;
            }
        }
        acc
    } else {
        let rho = x.exp();
        let (wr, wi) = (rho * c, rho * s);
        let d = (1.0 - wr) * (1.0 - wr) + wi * wi;
        if d < ZERO_GAP_SQ {
            return f64::NEG_INFINITY;
        }
        let mut acc = 0.5 * d.ln();
        if m > 0 {
            let w = Complex64::new(wr, wi);
            let mut pw = w;
            for p in 1..=m {
                acc += pw.re / p as f64;
                pw *= w;
            }
        }
        acc
    }
}

/// `log E(w, m)` for `w = e^{x + iφ}`; the real part is `-inf` at `w = 1`.
pub(crate) fn factor_c(x: f64, phi: f64, m: u32) -> Complex64 {
    let u = Complex64::from_polar(1.0, phi);
    if x < SERIES_BELOW {
        let rho = x.exp();
        let w = u * rho;
        let mut pw = w.powu(m + 1);
        let mut mag = rho.powi(m as i32 + 1);
        let mut p = (m + 1) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        loop {
            acc -= pw / p;
            scale += mag / p;
            mag *= rho;
            if mag <= 1e-17 * scale {
                break;
            }
            pw *= w;
            p += 1.0;
        }
        acc
    } else if x > ASYMPTOTIC_ABOVE {
        let inv = u.conj() * (-x).exp();
        let mut acc = Complex64::new(x, phi - std::f64::consts::PI) + (Complex64::new(1.0, 0.0) - inv).ln();
        let mut pu = u;
        for p in 1..=m {
            let pf = p as f64;
            acc += pu * ((pf * x).exp() / pf);
            pu *= u;
        }
        acc
    } else {
        let w = u * x.exp();
        let one_minus = Complex64::new(1.0, 0.0) - w;
        if one_minus.norm_sqr() < ZERO_GAP_SQ {
            return Complex64::new(f64::NEG_INFINITY, 0.0);
        }
        let mut acc = one_minus.ln();
        let mut pw = w;
        for p in 1..=m {
            acc += pw / p as f64;
            pw *= w;
        }
        acc
    }
}

/// `Re[W^{m+1} / (1 - W)]` for `W = e^x (c + i s)`, used for derivatives
/// of `Re log E(W, m)` with respect to `log W` (up to sign).
#[inline]
fn factor_slope(x: f64, c: f64, s: f64, m: u32) -> f64 {
    let u = Complex64::new(c, s);
    if x > 0.0 {
        let inv = u.conj() * (-x).exp();
        let num = u.powu(m) * (m as f64 * x).exp();
        (-num / (Complex64::new(1.0, 0.0) - inv)).re
    } else {
        let w = u * x.exp();
        (w.powu(m + 1) / (Complex64::new(1.0, 0.0) - w)).re
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Positive,
    Negative,
    /// The pair `±a` of equal multiplicity, through
    /// `E(w, m) E(-w, m) = E(w², ⌊m/2⌋)`.
    Pair,
}

#[derive(Clone, Copy, Debug)]
struct Site {
    log_abs: f64,
    kind: Kind,
    weight: f64,
}

#[derive(Clone, Copy, Debug)]
struct Angles {
    cos: f64,
    sin: f64,
    cos2: f64,
    sin2: f64,
}

impl Angles {
    fn new(theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        let (sin2, cos2) = (2.0 * theta).sin_cos();
        Self { cos, sin, cos2, sin2 }
    }
}

#[inline]
fn site_re(site: &Site, log_r: f64, a: &Angles, m: u32) -> f64 {
    let x = log_r - site.log_abs;
    match site.kind {
        Kind::Positive => factor_re(x, a.cos, a.sin, m),
        Kind::Negative => factor_re(x, -a.cos, -a.sin, m),
        Kind::Pair => factor_re(2.0 * x, a.cos2, a.sin2, m / 2),
    }
}

#[inline]
fn site_c(site: &Site, log_r: f64, theta: f64, m: u32) -> Complex64 {
    let x = log_r - site.log_abs;
    match site.kind {
        Kind::Positive => factor_c(x, theta, m),
        Kind::Negative => factor_c(x, theta + std::f64::consts::PI, m),
        Kind::Pair => factor_c(2.0 * x, 2.0 * theta, m / 2),
    }
}

#[derive(Clone, Debug)]
enum Body {
    List(Vec<Site>),
    Law { law: PowerLaw, end: u64 },
}

/// Series replacement for the power-law tail `k >= end`:
/// `log P(z) = -Σ_p C_p z^p / p` with `C_p = exp(ln_coeff[i])` for `p = first_power + i`.
#[derive(Clone, Debug, Default)]
struct SeriesTail {
    first_power: u32,
    ln_coeff: Vec<f64>,
}

impl SeriesTail {
    fn value(&self, log_r: f64, theta: f64) -> Complex64 {
        if self.ln_coeff.is_empty() || log_r == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        let u = Complex64::from_polar(1.0, theta);
        let mut pu = u.powu(self.first_power);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, lc) in self.ln_coeff.iter().enumerate() {
            if lc.is_finite() {
                let p = (self.first_power as usize + i) as f64;
                acc -= pu * ((p * log_r + lc).exp() / p);
            }
            pu *= u;
        }
        acc
    }
}

/// A spec prepared for repeated evaluation on `|z| <= r_max`.
#[derive(Clone, Debug)]
pub struct Evaluator<'a> {
    spec: &'a EntireFunctionSpec,
    body: Body,
    tail: SeriesTail,
    tail_error: f64,
    log_r_max: f64,
    tolerance: f64,
}

impl<'a> Evaluator<'a> {
    /// Prepares evaluation for `|z| <= exp(log_r_max)` with absolute
    /// log-modulus error at most `tolerance`.
    pub fn new(spec: &'a EntireFunctionSpec, log_r_max: f64, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidSpec(format!("tolerance must be positive, got {tolerance}")));
        }
        if log_r_max.is_nan() || log_r_max == f64::INFINITY {
            return Err(Error::TailNotConvergent(format!("unbounded radius {log_r_max}")));
        }
        let m = spec.factor_index;
        let (body, tail, tail_error) = match &spec.zeros {
            ZeroSequence::Finite(entries) => {
                let sites = entries
                    .iter()
                    .map(|e| Site {
                        log_abs: e.location.abs().ln(),
                        kind: if e.location > 0.0 { Kind::Positive } else { Kind::Negative },
                        weight: e.multiplicity as f64,
                    })
                    .collect();
                (Body::List(sites), SeriesTail::default(), 0.0)
            }
            ZeroSequence::Recursive(r) => {
                let (sites, err) = recursive_sites(r.materialized(), r.squared, m, log_r_max, tolerance)?;
                (Body::List(sites), SeriesTail::default(), err)
            }
            ZeroSequence::PowerLaw(law) => {
                let (end, tail, err) = plan_power_law(law, m, log_r_max, tolerance)?;
                (Body::Law { law: *law, end }, tail, err)
            }
        };
        Ok(Self {
            spec,
            body,
            tail,
            tail_error,
            log_r_max,
            tolerance,
        })
    }

    /// Convenience constructor for radius `r_max`.
    pub fn for_radius(spec: &'a EntireFunctionSpec, r_max: f64, tolerance: f64) -> Result<Self> {
        Self::new(spec, r_max.ln(), tolerance)
    }

    pub fn spec(&self) -> &EntireFunctionSpec {
        self.spec
    }

    pub fn log_r_max(&self) -> f64 {
        self.log_r_max
    }

    /// Estimated log-modulus error due to the replaced tail.
    pub fn tail_error(&self) -> f64 {
        self.tail_error
    }

    /// Number of zero sites summed directly or by quadrature.
    pub fn site_count(&self) -> u64 {
        match &self.body {
            Body::List(s) => s.len() as u64,
            Body::Law { law, end } => end - law.start,
        }
    }

    fn prefix(&self, log_r: f64, theta: f64) -> Complex64 {
        let q = self.spec.exponent_poly.eval_polar(log_r, theta);
        let n = self.spec.origin_power as f64;
        if n == 0.0 {
            q
        } else {
            q + Complex64::new(n * log_r, n * theta)
        }
    }

    /// `log |f(e^{log_r + iθ})|`, or `-inf` at a zero.
    pub fn log_modulus(&self, log_r: f64, theta: f64) -> f64 {
        if log_r == f64::NEG_INFINITY {
            return self.value_at_origin().log_modulus;
        }
        let m = self.spec.factor_index;
        let angles = Angles::new(theta);
        let sum = match &self.body {
            Body::List(sites) => {
                let mut acc = CompensatedSum::default();
                for site in sites {
                    let v = site_re(site, log_r, &angles, m);
                    if v == f64::NEG_INFINITY {
                        return f64::NEG_INFINITY;
                    }
                    acc.add(site.weight * v);
                }
                acc.value()
            }
            Body::Law { law, end } => {
                let v = law_modulus(law, *end, m, log_r, theta, &angles, self.tolerance);
                if v == f64::NEG_INFINITY {
                    return v;
                }
                v
            }
        };
        let pre = self.prefix(log_r, theta).re;
        pre + sum + self.tail.value(log_r, theta).re
    }

    fn value_at_origin(&self) -> LogComplexValue {
        if self.spec.origin_power > 0 {
            LogComplexValue::ZERO
        } else {
            let b0 = self.spec.exponent_poly.coefficient(0);
            LogComplexValue::new(b0, 0.0)
        }
    }

    /// `log f(e^{log_r + iθ})` with argument reduced to `(-π, π]`.
    ///
    /// Power-law products with more than 2^26 sites inside the cutoff do
    /// not track the product's argument; only `Q` and the tail contribute.
    pub fn eval_polar(&self, log_r: f64, theta: f64) -> LogComplexValue {
        if log_r == f64::NEG_INFINITY {
            return self.value_at_origin();
        }
        let m = self.spec.factor_index;
        let mut arg = 0.0;
        let modulus_sum = match &self.body {
            Body::List(sites) => {
                let mut acc = CompensatedSum::default();
                for site in sites {
                    let v = site_c(site, log_r, theta, m);
                    if v.re == f64::NEG_INFINITY {
                        return LogComplexValue::ZERO;
                    }
                    acc.add(site.weight * v.re);
                    arg += reduce_angle(site.weight * reduce_angle(v.im));
                }
                acc.value()
            }
            Body::Law { law, end } => {
                let count = end - law.start;
                let mut acc = CompensatedSum::default();
                let mu = law.multiplicity as f64;
                // the argument is only tracked while the sites can be summed one by one
                let last = if count > MAX_ARGUMENT_SITES { law.start } else { *end };
                for k in law.start..last {
                    let site = law_site(law, k);
                    let v = site_c(&site, log_r, theta, m);
                    if v.re == f64::NEG_INFINITY {
                        return LogComplexValue::ZERO;
                    }
                    acc.add(v.re);
                    arg += reduce_angle(mu * reduce_angle(v.im));
                }
                if count > direct_limit() {
                    let angles = Angles::new(theta);
                    law_modulus(law, *end, m, log_r, theta, &angles, self.tolerance)
                } else {
                    mu * acc.value()
                }
            }
        };
        let pre = self.prefix(log_r, theta);
        let tail = self.tail.value(log_r, theta);
        LogComplexValue::new(pre.re + modulus_sum + tail.re, arg + pre.im + tail.im)
    }

    /// `log f(z)`.
    pub fn eval(&self, z: Complex64) -> LogComplexValue {
        if z == Complex64::new(0.0, 0.0) {
            return self.value_at_origin();
        }
        self.eval_polar(z.norm().ln(), z.arg())
    }
}

fn direct_limit() -> u64 {
    EXACT_HEAD + 2 * MIN_SEGMENT + 2 * BAND
}

#[inline]
fn law_site(law: &PowerLaw, k: u64) -> Site {
    Site {
        log_abs: law.log_abs(k),
        kind: if law.symmetric { Kind::Pair } else { Kind::Positive },
        weight: law.multiplicity as f64,
    }
}

/// Σ over power-law sites `start <= k < end` of the weighted log-modulus
/// contributions, `-inf` at a zero.
fn law_modulus(law: &PowerLaw, end: u64, m: u32, log_r: f64, theta: f64, angles: &Angles, tol: f64) -> f64 {
    let mu = law.multiplicity as f64;
    let kind = if law.symmetric { Kind::Pair } else { Kind::Positive };
    let direct = |lo: u64, hi: u64, acc: &mut CompensatedSum| -> bool {
        for k in lo..hi {
            let site = Site {
                log_abs: law.log_abs(k),
                kind,
                weight: 1.0,
            };
            let v = site_re(&site, log_r, angles, m);
            if v == f64::NEG_INFINITY {
                return false;
            }
            acc.add(v);
        }
        true
    };
    let mut acc = CompensatedSum::default();
    let count = end - law.start;
    if count <= direct_limit() {
        if !direct(law.start, end, &mut acc) {
            return f64::NEG_INFINITY;
        }
        return mu * acc.value();
    }
    let lo = law.start + EXACT_HEAD;
    if !direct(law.start, lo, &mut acc) {
        return f64::NEG_INFINITY;
    }
    let center = law.first_index_at_least(log_r).clamp(lo, end);
    let band_lo = center.saturating_sub(BAND).max(lo);
    let band_hi = center.saturating_add(BAND).min(end);
    let smooth = SmoothSum {
        law,
        m,
        log_r,
        theta,
        tol,
    };
    for (a, b) in [(lo, band_lo), (band_hi, end)] {
        if b - a >= MIN_SEGMENT {
            acc.add(smooth.sum(a, b - 1));
        } else if !direct(a, b, &mut acc) {
            return f64::NEG_INFINITY;
        }
    }
    if !direct(band_lo, band_hi, &mut acc) {
        return f64::NEG_INFINITY;
    }
    mu * acc.value()
}

/// Euler–Maclaurin summation of unit-weight power-law site contributions
/// over an index range that stays away from the zeros near `|z|`.
struct SmoothSum<'a> {
    law: &'a PowerLaw,
    m: u32,
    log_r: f64,
    theta: f64,
    tol: f64,
}

impl SmoothSum<'_> {
    fn kappa(&self) -> (f64, u32) {
        if self.law.symmetric {
            (2.0, self.m / 2)
        } else {
            (1.0, self.m)
        }
    }

    /// Contribution of a site whose zero has log-modulus `lambda`.
    fn phi_of_lambda(&self, lambda: f64) -> f64 {
        let (kappa, me) = self.kappa();
        let (s, c) = (kappa * self.theta).sin_cos();
        factor_re(kappa * (self.log_r - lambda), c, s, me)
    }

    /// `d/dk` of the contribution at continuous index `x`.
    fn dphi(&self, x: f64) -> f64 {
        let (kappa, me) = self.kappa();
        let (s, c) = (kappa * self.theta).sin_cos();
        let lambda = self.law.log_abs_at(x);
        let slope = factor_slope(kappa * (self.log_r - lambda), c, s, me);
        kappa * log_abs_derivative(self.law, x) * slope
    }

    fn d3phi(&self, x: f64) -> f64 {
        let h = FD_STEP;
        (self.dphi(x + h) - 2.0 * self.dphi(x) + self.dphi(x - h)) / (h * h)
    }

    /// `Σ_{k=a}^{b} φ(k)`.
    fn sum(&self, a: u64, b: u64) -> f64 {
        let law = self.law;
        let (af, bf) = (a as f64, b as f64);
        let (ua, ub) = ((af + law.shift).ln(), (bf + law.shift).ln());
        let integrand = |u: f64| {
            let lambda = law.scale.ln() + law.exponent * u + law.log_exponent_term(u);
            self.phi_of_lambda(lambda) * u.exp()
        };
        let (integral, _) = integrate(integrand, ua, ub, 0.05 * self.tol, 1e-14);
        let ends = 0.5 * (self.phi_of_lambda(law.log_abs(a)) + self.phi_of_lambda(law.log_abs(b)));
        let first = (self.dphi(bf) - self.dphi(af)) / 12.0;
        let third = (self.d3phi(bf) - self.d3phi(af)) / 720.0;
        integral + ends + first - third
    }
}

/// `d/dx ln |a(x)|`.
fn log_abs_derivative(law: &PowerLaw, x: f64) -> f64 {
    let y = x + law.shift;
    let mut v = law.exponent / y;
    if law.log_exponent != 0.0 {
        v += law.log_exponent / (y * y.ln());
    }
    v
}

/// Sites of a materialized recursive sequence that matter for `|z| <= r_max`,
/// with an error estimate for the rest.
fn recursive_sites(
    zeros: &[crate::recursive::ConstructedZero],
    squared: bool,
    m: u32,
    log_r_max: f64,
    tol: f64,
) -> Result<(Vec<Site>, f64)> {
    let (kappa, me) = if squared { (2.0, m / 2) } else { (1.0, m) };
    let negligible = (tol * 1e-6).ln();
    let mut sites = Vec::new();
    let mut rest = f64::NEG_INFINITY;
    for (i, z) in zeros.iter().enumerate() {
        let log_abs = if squared { 0.5 * z.log_a } else { z.log_a };
        let ln_w = kappa * (log_r_max - log_abs);
        let log_term = z.log_mult + (me + 1) as f64 * ln_w;
        if ln_w < SERIES_BELOW && log_term < negligible {
            // super-geometric growth: later terms are smaller still
            rest = log_term + 2f64.ln();
            break;
        }
        let weight = if z.weight.is_finite() { z.weight } else { z.log_mult.exp() };
        sites.push(Site {
            log_abs,
            kind: if squared { Kind::Pair } else { Kind::Positive },
            weight,
        });
        if i + 1 == zeros.len() {
            return Err(Error::TailNotConvergent(format!(
                "recursive zeros exhausted at index {} below radius e^{log_r_max}",
                z.index
            )));
        }
    }
    Ok((sites, rest.exp()))
}

/// Chooses the direct-summation cutoff `end` for a power law and builds the
/// series for the remaining zeros.
fn plan_power_law(law: &PowerLaw, m: u32, log_r_max: f64, tol: f64) -> Result<(u64, SeriesTail, f64)> {
    let target = if log_r_max == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        log_r_max - W_MAX.ln()
    };
    let mut end = law
        .first_index_at_least(target)
        .max(law.start.saturating_add(MIN_DIRECT));
    loop {
        if end == u64::MAX || end - law.start > MAX_SITES {
            return Err(Error::TailNotConvergent(format!(
                "power-law tail needs more than {MAX_SITES} zeros at radius e^{log_r_max}"
            )));
        }
        let (tail, err) = series_tail(law, m, end, log_r_max, tol);
        if err <= 0.5 * tol {
            return Ok((end, tail, err));
        }
        end = end.saturating_add((end / 2).max(MIN_DIRECT));
    }
}

/// Series coefficients for zeros `k >= end` and the resulting error bound.
fn series_tail(law: &PowerLaw, m: u32, end: u64, log_r: f64, tol: f64) -> (SeriesTail, f64) {
    let first = m + 1;
    let ln_mu = (law.multiplicity as f64).ln();
    let mut tail = SeriesTail {
        first_power: first,
        ln_coeff: Vec::new(),
    };
    if log_r == f64::NEG_INFINITY {
        return (tail, 0.0);
    }
    let ln_w0 = log_r - law.log_abs(end);
    let w0 = ln_w0.exp();
    let mut error = 0.0;
    let mut lead = f64::NAN;
    let mut p = first;
    loop {
        let (ln_s, rel_err) = power_sum_tail(law, p, end);
        let sigma: f64 = match (law.symmetric, p % 2) {
            (true, 1) => 0.0,
            (true, _) => 2.0,
            _ => 1.0,
        };
        if p == first {
            // Σ_{p>P} C_p r^p / p <= 2μ r^{m+1} S_{m+1} w0^{P-m} / ((P+1)(1-w0))
            lead = 2f64.ln() + ln_mu + first as f64 * log_r + ln_s + rel_err.ln_1p();
        }
        let pf = p as f64;
        if sigma > 0.0 {
            tail.ln_coeff.push(sigma.ln() + ln_mu + ln_s);
            error += (sigma.ln() + ln_mu + pf * log_r + ln_s + rel_err.ln() - pf.ln()).exp();
        } else {
            tail.ln_coeff.push(f64::NEG_INFINITY);
        }
        let remainder = (lead + (pf + 1.0 - first as f64) * ln_w0 - (pf + 1.0).ln() - (-w0).ln_1p()).exp();
        if remainder <= 0.125 * tol || remainder <= 1e-300 {
            error += remainder;
            break;
        }
        if p > first + 4000 {
            error = f64::INFINITY;
            break;
        }
        p += 1;
    }
    (tail, error)
}

/// `(ln S, δ)` with `S ≈ Σ_{k>=end} |a_k|^{-p}` and relative error bound `δ`.
fn power_sum_tail(law: &PowerLaw, p: u32, end: u64) -> (f64, f64) {
    let pf = p as f64;
    let x = end as f64;
    let y = x + law.shift;
    let ly = y.ln();
    let q = law.exponent * pf;
    let beta = law.log_exponent * pf;
    let ln_g = -pf * law.log_abs_at(x);
    let ln_c = law.scale.ln();
    let ln_int = if beta == 0.0 {
        -pf * ln_c + (1.0 - q) * ly - (q - 1.0).ln()
    } else if (q - 1.0).abs() <= 1e-12 {
        -pf * ln_c + (1.0 - beta) * ly.ln() - (beta - 1.0).ln()
    } else {
        let j: f64 = gauss_laguerre()
            .iter()
            .map(|(t, w)| w * (ly + t / (q - 1.0)).powf(-beta))
            .sum();
        -pf * ln_c + (1.0 - q) * ly - (q - 1.0).ln() + j.ln()
    };
    // derivatives of h = ln g
    let s = law.exponent;
    let a = law.log_exponent;
    let (l1, l2, l3) = if a == 0.0 {
        (s / y, -s / (y * y), 2.0 * s / (y * y * y))
    } else {
        (
            s / y + a / (y * ly),
            -s / (y * y) - a * (ly + 1.0) / (y * y * ly * ly),
            2.0 * s / (y * y * y) + a * (2.0 * ly * ly + 3.0 * ly + 2.0) / (y * y * y * ly * ly * ly),
        )
    };
    let (h1, h2, h3) = (-pf * l1, -pf * l2, -pf * l3);
    let ratio = (ln_int - ln_g).exp() + 0.5 - h1 / 12.0;
    let g3 = (h3 + 3.0 * h1 * h2 + h1 * h1 * h1).abs() / 720.0;
    (ln_g + ratio.ln(), g3 / ratio)
}

/// `log f(z)` with absolute log-modulus error at most `tolerance`.
pub fn eval_log(spec: &EntireFunctionSpec, z: Complex64, tolerance: f64) -> Result<LogComplexValue> {
    let r = z.norm();
    let ev = Evaluator::new(spec, r.ln(), tolerance)?;
    Ok(ev.eval(z))
}

/// `log |f(e^{log_r + iθ})|` for radii beyond the native range.
pub fn log_modulus_polar(spec: &EntireFunctionSpec, log_r: f64, theta: f64, tolerance: f64) -> Result<f64> {
    Ok(Evaluator::new(spec, log_r, tolerance)?.log_modulus(log_r, theta))
}

/// Ordered zero sites of a spec, at most `limit` of them. For symmetric
/// power laws one index is one pair.
fn leading_sites(spec: &EntireFunctionSpec, limit: u64) -> Vec<Site> {
    match &spec.zeros {
        ZeroSequence::Finite(entries) => entries
            .iter()
            .take(limit as usize)
            .map(|e| Site {
                log_abs: e.location.abs().ln(),
                kind: if e.location > 0.0 { Kind::Positive } else { Kind::Negative },
                weight: e.multiplicity as f64,
            })
            .collect(),
        ZeroSequence::PowerLaw(law) => (law.start..law.start.saturating_add(limit))
            .map(|k| law_site(law, k))
            .collect(),
        ZeroSequence::Recursive(r) => r
            .materialized()
            .iter()
            .take(limit as usize)
            .map(|z| Site {
                log_abs: if r.squared { 0.5 * z.log_a } else { z.log_a },
                kind: if r.squared { Kind::Pair } else { Kind::Positive },
                weight: if z.weight.is_finite() { z.weight } else { z.log_mult.exp() },
            })
            .collect(),
    }
}

/// `log` of the partial product keeping only the first `cutoff` zero
/// entries (indices, for power laws), with no tail correction.
pub fn eval_log_truncated(spec: &EntireFunctionSpec, z: Complex64, cutoff: u64) -> LogComplexValue {
    if z == Complex64::new(0.0, 0.0) {
        return if spec.origin_power > 0 {
            LogComplexValue::ZERO
        } else {
            LogComplexValue::new(spec.exponent_poly.coefficient(0), 0.0)
        };
    }
    let (log_r, theta) = (z.norm().ln(), z.arg());
    let m = spec.factor_index;
    let mut modulus = CompensatedSum::default();
    let mut arg = 0.0;
    for site in leading_sites(spec, cutoff) {
        let v = site_c(&site, log_r, theta, m);
        if v.re == f64::NEG_INFINITY {
            return LogComplexValue::ZERO;
        }
        modulus.add(site.weight * v.re);
        arg += reduce_angle(site.weight * reduce_angle(v.im));
    }
    let n = spec.origin_power as f64;
    let q = spec.exponent_poly.eval_polar(log_r, theta);
    LogComplexValue::new(modulus.value() + q.re + n * log_r, arg + q.im + n * theta)
}

/// Upper bound on `Σ_{j>cutoff} mult_j |log E(z/a_j, m)|` over `|z| = r`,
/// from `|log E(w, m)| <= 2|w|^{m+1}` for `|w| <= 1/2`.
pub fn tail_bound(spec: &EntireFunctionSpec, r: f64, cutoff: u64) -> Result<f64> {
    let m1 = (spec.factor_index + 1) as f64;
    let check = |abs_zero: f64| -> Result<()> {
        if abs_zero < 2.0 * r {
            Err(Error::CutoffTooSmall {
                abs_zero,
                twice_radius: 2.0 * r,
            })
        } else {
            Ok(())
        }
    };
    match &spec.zeros {
        ZeroSequence::Finite(entries) => {
            let mut total = 0.0;
            for e in entries.iter().skip(cutoff as usize) {
                check(e.location.abs())?;
                total += 2.0 * e.multiplicity as f64 * (r / e.location.abs()).powf(m1);
            }
            Ok(total)
        }
        ZeroSequence::Recursive(rz) => {
            let zeros = rz.materialized();
            let mut total = 0.0;
            for z in zeros.iter().skip(cutoff as usize) {
                let log_abs = if rz.squared { 0.5 * z.log_a } else { z.log_a };
                check(log_abs.exp())?;
                let count: f64 = if rz.squared { 2.0 } else { 1.0 };
                let term = (count.ln() + 2f64.ln() + z.log_mult + m1 * (r.ln() - log_abs)).exp();
                total += term;
                if term < 1e-300 {
                    break;
                }
            }
            Ok(total)
        }
        ZeroSequence::PowerLaw(law) => {
            let k = law.start.saturating_add(cutoff);
            check(law.log_abs(k).exp())?;
            // Σ_{j>=k} g(j) <= g(k) + ∫_k^∞ g for decreasing g = |a|^{-(m+1)}
            let p = spec.factor_index + 1;
            if !law.power_sum_converges(p) {
                return Err(Error::CannotDecideConvergence(format!(
                    "Σ |a_k|^-{p} diverges for {law:?}"
                )));
            }
            let (ln_s, rel) = power_sum_tail(law, p, k);
            let g = (-(p as f64) * law.log_abs(k)).exp();
            let s_upper = ln_s.exp() * (1.0 + rel) + 0.5 * g;
            Ok(2.0 * law.zeros_per_index() as f64 * r.powf(m1) * s_upper)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn primary_factor_spot_values() {
        let v = primary_factor_log(Complex64::new(0.5, 0.0), 0);
        assert!((v.log_modulus - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(v.argument, 0.0);
        for m in 0..5 {
            assert_eq!(primary_factor_log(Complex64::new(0.0, 0.0), m), LogComplexValue::ONE);
        }
        let v = primary_factor_log(Complex64::new(0.0, 2.0), 2);
        assert!((v.log_modulus - (-2.0 + 0.5 * 5f64.ln())).abs() < 1e-14);
        assert!((v.argument - (2.0 - 2f64.atan())).abs() < 1e-14);
        assert!(primary_factor_log(Complex64::new(1.0, 0.0), 3).is_zero());
    }

    #[test]
    fn factor_branches_agree_at_switch_points() {
        for m in 0..6 {
            for &theta in &[0.3, 1.7, 2.9, PI] {
                let (s, c) = f64::sin_cos(theta);
                for &x in &[SERIES_BELOW, ASYMPTOTIC_ABOVE] {
                    let lo = factor_re(x - 1e-9, c, s, m);
                    let hi = factor_re(x + 1e-9, c, s, m);
                    let scale = 1.0 + lo.abs();
                    assert!((lo - hi).abs() < 1e-8 * scale, "m={m} x={x} {lo} {hi}");
                    let cl = factor_c(x - 1e-9, theta, m).re;
                    assert!((cl - lo).abs() < 1e-9 * scale);
                }
            }
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        for m in 0..4 {
            for &x in &[-3.0, -0.5, 0.7, 2.0] {
                let (s, c) = 1.1f64.sin_cos();
                let h = 1e-6;
                let fd = (factor_re(x + h, c, s, m) - factor_re(x - h, c, s, m)) / (2.0 * h);
                assert!((fd + factor_slope(x, c, s, m)).abs() < 1e-7, "m={m} x={x}");
            }
        }
    }

    fn direct_law_sum(law: &PowerLaw, end: u64, m: u32, log_r: f64, theta: f64) -> f64 {
        let angles = Angles::new(theta);
        let mut acc = CompensatedSum::default();
        for k in law.start..end {
            acc.add(site_re(&law_site(law, k), log_r, &angles, m));
        }
        law.multiplicity as f64 * acc.value()
    }

    #[test]
    fn smooth_summation_matches_direct_sum() {
        let laws = [
            (PowerLaw::simple(1.0, 4.0 / 3.0), 0, 1e5),
            (
                PowerLaw {
                    log_exponent: 1.5,
                    start: 2,
                    ..PowerLaw::simple(1.0, 1.0)
                },
                0,
                2e5,
            ),
            (
                PowerLaw {
                    symmetric: true,
                    ..PowerLaw::simple(1.0, 0.4)
                },
                2,
                40.0,
            ),
            (
                PowerLaw {
                    symmetric: true,
                    multiplicity: 3,
                    ..PowerLaw::simple(2.0, 1.0)
                },
                1,
                20001.0,
            ),
        ];
        for (law, m, r) in laws {
            let log_r = f64::ln(r);
            let (end, _, _) = plan_power_law(&law, m, log_r, 1e-10).unwrap();
            assert!(end - law.start > direct_limit(), "{law:?} {end}");
            for &theta in &[0.0, 1e-3, 0.05, 0.9, PI / 2.0, 2.5, PI] {
                let fast = law_modulus(&law, end, m, log_r, theta, &Angles::new(theta), 1e-10);
                let slow = direct_law_sum(&law, end, m, log_r, theta);
                let scale = 1.0 + 1e-13 * slow.abs();
                assert!((fast - slow).abs() < 1e-9 * scale, "{law:?} θ={theta}: {fast} vs {slow}");
            }
        }
    }
}
