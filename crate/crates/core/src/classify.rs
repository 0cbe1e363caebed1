//! Growth and value-distribution estimates: order, genus, the counting
//! function `N(r)`, the characteristic `T(r)`, the defect `δ(0, f)` and rays
//! along which `f → 0`.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{Evaluator, DEFAULT_TOLERANCE};
use crate::lemmas::theta_candidates;
use crate::logvalue::CompensatedSum;
use crate::modulus::{csv_err, fmt, max_log_modulus, ProfileOptions};
use crate::numeric::{geometric_grid, integrate, ls_slope};
use crate::spec::{EntireFunctionSpec, PowerLaw, ZeroSequence};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSlope {
    pub r_start: f64,
    pub r_end: f64,
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub radii: Vec<f64>,
    pub loglog_max: Vec<f64>,
    /// Largest one-decade window slope of `log log M(r)` against `log r`.
    pub order_estimate: f64,
    pub window_slopes: Vec<WindowSlope>,
}

/// Estimates the order as the largest least-squares slope of
/// `log log M(r)` over one-decade windows of a geometric grid. Radii with
/// `M(r) <= e` are skipped, and the grid ends before the first radius that
/// cannot be evaluated.
pub fn estimate_order(spec: &EntireFunctionSpec, r_min: f64, r_max: f64, grid_ratio: f64) -> Result<GrowthReport> {
    if !(r_min > 0.0 && r_max >= 1e3 * r_min * (1.0 - 1e-9) && grid_ratio > 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "order estimates need r_max >= 1e3 r_min and ratio > 1, got [{r_min}, {r_max}] ratio {grid_ratio}"
        )));
    }
    if matches!(spec.zeros, ZeroSequence::Finite(_)) && spec.exponent_poly.degree() == 0 {
        return Err(Error::DegenerateGrowth("polynomial: log log M(r) grows like log log r".into()));
    }
    let opts = ProfileOptions::default();
    let all = geometric_grid(r_min, r_max, grid_ratio);
    let logs: Vec<Result<f64>> = all
        .par_iter()
        .map(|&r| Ok(max_log_modulus(spec, r.ln(), &opts)?.0))
        .collect();
    // the grid is cut at the first radius past the evaluable range
    let mut usable = Vec::with_capacity(logs.len());
    for l in logs {
        match l {
            Ok(v) => usable.push(v),
            Err(Error::TailNotConvergent(_)) => break,
            Err(e) => return Err(e),
        }
    }
    let (radii, loglog_max): (Vec<f64>, Vec<f64>) =
        all.iter().zip(&usable).filter(|(_, &l)| l > 1.0).map(|(&r, &l)| (r, l.ln())).unzip();
    if radii.len() < 2 || loglog_max.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DegenerateGrowth("log log M(r) is not increasing on the grid".into()));
    }
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let mut window_slopes = Vec::new();
    for i in 0..x.len() {
        let Some(j) = (i..x.len()).find(|&j| x[j] - x[i] >= std::f64::consts::LN_10 - 1e-9) else {
            break;
        };
        window_slopes.push(WindowSlope {
            r_start: radii[i],
            r_end: radii[j],
            slope: ls_slope(&x[i..=j], &loglog_max[i..=j]),
        });
    }
    if window_slopes.is_empty() {
        return Err(Error::DegenerateGrowth("fewer than one decade with M(r) > e".into()));
    }
    let order_estimate = window_slopes.iter().map(|w| w.slope).fold(0.0, f64::max);
    Ok(GrowthReport {
        radii,
        loglog_max,
        order_estimate,
        window_slopes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenusReport {
    pub factor_index: u32,
    /// Smallest `m` with `Σ |a_k|^{-(m+1)} < ∞`.
    pub minimal_factor_index: u32,
    pub poly_degree: usize,
    pub genus: u32,
}

pub fn compute_genus(spec: &EntireFunctionSpec) -> Result<GenusReport> {
    let minimal = spec.zeros.minimal_factor_index()?;
    if spec.factor_index < minimal {
        return Err(Error::InvalidSpec(format!(
            "factor index {} is below the convergence index {minimal}",
            spec.factor_index
        )));
    }
    let poly_degree = spec.exponent_poly.degree();
    Ok(GenusReport {
        factor_index: spec.factor_index,
        minimal_factor_index: minimal,
        poly_degree,
        genus: spec.factor_index.max(poly_degree as u32),
    })
}

/// Indices handled by exact summation before switching to Euler-Maclaurin.
const COUNT_HEAD: u64 = 1 << 12;

/// `N(r) = Σ_{0 < |a_k| <= r} mult_k · ln(r / |a_k|)`; zeros at the origin
/// are not counted.
pub fn counting_n(spec: &EntireFunctionSpec, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("radius must be positive, got {r}")));
    }
    let log_r = r.ln();
    match &spec.zeros {
        ZeroSequence::Finite(entries) => {
            let mut s = CompensatedSum::default();
            for e in entries.iter().filter(|e| e.location.abs() <= r) {
                s.add(e.multiplicity as f64 * (log_r - e.location.abs().ln()));
            }
            Ok(s.value())
        }
        ZeroSequence::PowerLaw(law) => Ok(law.zeros_per_index() as f64 * power_law_counting(law, log_r)),
        ZeroSequence::Recursive(rz) => {
            let zeros = rz.materialized();
            let (factor, per) = if rz.squared { (0.5, 2.0) } else { (1.0, 1.0) };
            let mut s = CompensatedSum::default();
            for z in zeros {
                let log_abs = factor * z.log_a;
                if log_abs > log_r {
                    return Ok(s.value());
                }
                s.add(per * (z.log_mult + (log_r - log_abs).ln()).exp());
            }
            Err(Error::TailNotConvergent(format!(
                "recursive zeros exhausted below radius e^{log_r}"
            )))
        }
    }
}

/// `Σ_{k = start}^{K} (ln r - ln a_k)` over indices with `a_k <= r`.
fn power_law_counting(law: &PowerLaw, log_r: f64) -> f64 {
    let end = law.first_index_at_least(log_r);
    if end <= law.start {
        return 0.0;
    }
    let last = end - 1;
    let g = |x: f64| log_r - law.log_abs_at(x);
    let mut s = CompensatedSum::default();
    let head_end = last.min(law.start + COUNT_HEAD);
    for k in law.start..=head_end {
        s.add(g(k as f64));
    }
    if last > head_end {
        // Σ_{k=a+1}^{b} g(k) = ∫_a^b g + (g(b) - g(a))/2 + (g'(b) - g'(a))/12 - (g'''(b) - g'''(a))/720
        let (a, b) = (head_end as f64, last as f64);
        let d1 = |x: f64| {
            let y = x + law.shift;
            -(law.exponent + law.log_exponent / y.ln()) / y
        };
        let d3 = |x: f64| {
            let y = x + law.shift;
            -2.0 * (law.exponent + law.log_exponent / y.ln()) / (y * y * y)
        };
        // in u = ln(x + shift) the integrand is smooth over many decades
        let (ua, ub) = ((a + law.shift).ln(), (b + law.shift).ln());
        let (int, _) = integrate(|u| g(u.exp() - law.shift) * u.exp(), ua, ub, 0.0, 1e-14);
        s.add(int);
        s.add(0.5 * (g(b) - g(a)));
        s.add((d1(b) - d1(a)) / 12.0);
        s.add(-(d3(b) - d3(a)) / 720.0);
    }
    s.value()
}

/// `T(r)` with its parts and an error bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Characteristic {
    pub radius: f64,
    pub n: f64,
    /// `(1/2π) ∫ log⁺(1/|f(re^{iθ})|) dθ`.
    pub proximity: f64,
    pub t: f64,
    pub error_bound: f64,
    /// Angles whose neighbourhoods were bounded analytically.
    pub excluded_angles: Vec<f64>,
}

/// Zeros within this relative distance of the radius are treated as
/// lying on the circle.
const ON_CIRCLE: f64 = 1e-3;

/// `T(r) = N(r) + (1/π) ∫_0^π log⁺(1/|f(re^{iθ})|) dθ`.
///
/// `[0, π]` is split into `quadrature_points` panels, each integrated by
/// adaptive Gauss-Kronrod. When a zero lies within relative distance 10⁻³
/// of the circle, the `zero_exclusion_radius` neighbourhood of its angle is
/// cut out and bounded with `|f| >= c|θ|`:
/// `∫_0^ε log⁺(1/(cθ)) dθ <= ε (1 + log⁺(1/(cε)))`.
/// A radius equal to a zero modulus is moved out by 10⁻⁶ relative.
pub fn characteristic_t(
    spec: &EntireFunctionSpec,
    r: f64,
    quadrature_points: usize,
    zero_exclusion_radius: f64,
) -> Result<Characteristic> {
    let mut r = r;
    let mut near = near_zero_angles(spec, r)?;
    if near.iter().any(|&(_, d)| d == 0.0) {
        r *= 1.0 + 1e-6;
        near = near_zero_angles(spec, r)?;
    }
    let log_r = r.ln();
    let ev = Evaluator::new(spec, log_r, DEFAULT_TOLERANCE)?;
    let h = |t: f64| (-ev.log_modulus(log_r, t)).max(0.0);
    let eps = zero_exclusion_radius.clamp(0.0, 0.25);

    let mut lo = 0.0;
    let mut hi = PI;
    let mut excluded_angles = Vec::new();
    let mut bound = 0.0;
    for &(theta, _) in &near {
        let edge = if theta == 0.0 { eps } else { PI - eps };
        let lm = ev.log_modulus(log_r, edge);
        // c ε = |f(r e^{i edge})|
        let b = eps * (1.0 - lm).max(0.0);
        bound += b;
        excluded_angles.push(theta);
        if theta == 0.0 {
            lo = eps;
        } else {
            hi = PI - eps;
        }
    }
    let panels = quadrature_points.max(1);
    let width = (hi - lo) / panels as f64;
    let parts: Vec<(f64, f64)> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let a = lo + width * i as f64;
            let b = if i + 1 == panels { hi } else { a + width };
            integrate(h, a, b, 1e-12 / panels as f64, 1e-10)
        })
        .collect();
    let mut integral = CompensatedSum::default();
    let mut quad_err = 0.0;
    for (v, e) in parts {
        integral.add(v);
        quad_err += e;
    }
    let n = counting_n(spec, r)?;
    let proximity = (integral.value() + 0.5 * bound) / PI;
    Ok(Characteristic {
        radius: r,
        n,
        proximity,
        t: n + proximity,
        error_bound: (quad_err + 0.5 * bound) / PI,
        excluded_angles,
    })
}

/// Angles (0 or π) of zeros within [`ON_CIRCLE`] of the circle, with their
/// relative distance.
fn near_zero_angles(spec: &EntireFunctionSpec, r: f64) -> Result<Vec<(f64, f64)>> {
    let log_r = r.ln();
    let (mut pos, mut neg) = (f64::INFINITY, f64::INFINITY);
    match &spec.zeros {
        ZeroSequence::Finite(entries) => {
            for e in entries {
                let d = (e.location.abs().ln() - log_r).abs();
                if e.location > 0.0 {
                    pos = pos.min(d);
                } else {
                    neg = neg.min(d);
                }
            }
        }
        ZeroSequence::PowerLaw(law) => {
            let k = law.first_index_at_least(log_r);
            let mut d = f64::INFINITY;
            for j in [k.saturating_sub(1).max(law.start), k] {
                if j != u64::MAX {
                    d = d.min((law.log_abs(j) - log_r).abs());
                }
            }
            pos = d;
            if law.symmetric {
                neg = d;
            }
        }
        ZeroSequence::Recursive(rz) => {
            let factor = if rz.squared { 0.5 } else { 1.0 };
            let d = rz
                .materialized()
                .iter()
                .map(|z| (factor * z.log_a - log_r).abs())
                .fold(f64::INFINITY, f64::min);
            pos = d;
            if rz.squared {
                neg = d;
            }
        }
    }
    let mut out = Vec::new();
    if pos < ON_CIRCLE {
        out.push((0.0, pos));
    }
    if neg < ON_CIRCLE {
        out.push((PI, neg));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficiencyReport {
    pub radii: Vec<f64>,
    pub n_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub ratio_n_over_t: Vec<f64>,
    /// `1 - max` of the ratio over the trailing half of the grid: an
    /// estimate of a limit superior, not a bound.
    pub defect_estimate: f64,
}

pub const DEFAULT_QUADRATURE_PANELS: usize = 64;
pub const DEFAULT_ZERO_EXCLUSION: f64 = 1e-4;

/// `N/T` along `r_grid` and the resulting defect estimate.
pub fn defect_zero(spec: &EntireFunctionSpec, r_grid: &[f64]) -> Result<DeficiencyReport> {
    let (lo, hi) = match (r_grid.first(), r_grid.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::ParameterOutOfRange("empty radius grid".into())),
    };
    if !(hi >= 1e3 * lo * (1.0 - 1e-9)) {
        return Err(Error::ParameterOutOfRange(format!(
            "defect estimates need a grid of at least three decades, got [{lo}, {hi}]"
        )));
    }
    let mut n_values = Vec::with_capacity(r_grid.len());
    let mut t_values = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let c = characteristic_t(spec, r, DEFAULT_QUADRATURE_PANELS, DEFAULT_ZERO_EXCLUSION)?;
        n_values.push(c.n);
        t_values.push(c.t);
    }
    let ratio_n_over_t: Vec<f64> = n_values
        .iter()
        .zip(&t_values)
        .map(|(&n, &t)| if t > 0.0 { n / t } else { 1.0 })
        .collect();
    let half = r_grid.len() / 2;
    let trailing = ratio_n_over_t[half..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(DeficiencyReport {
        radii: r_grid.to_vec(),
        n_values,
        t_values,
        ratio_n_over_t,
        defect_estimate: (1.0 - trailing).clamp(0.0, 1.0),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayScan {
    pub theta: f64,
    pub radii: Vec<f64>,
    pub log_modulus: Vec<f64>,
    /// Least-squares slope of `ln(-log|f|)` against `ln r`.
    pub exponent: f64,
    pub decreasing: bool,
    /// Negative, strictly decreasing and with positive exponent.
    pub flagged: bool,
}

/// Candidate decay directions: the lemma angles for `m >= 2` with
/// `m >= deg Q`, and the directions where the leading term of `Re Q` is most
/// negative, shifted off the real axis when they fall on it.
pub fn decay_candidates(spec: &EntireFunctionSpec) -> Result<Vec<f64>> {
    let m = spec.factor_index;
    let d = spec.exponent_poly.degree();
    let mut out = Vec::new();
    if m >= 2 && m as usize >= d {
        out.extend(theta_candidates(m)?);
    } else if d >= m as usize + 1 && d >= 1 {
        let c = spec.exponent_poly.leading();
        let df = d as f64;
        let phase = if c > 0.0 { PI } else { 0.0 };
        for j in 0..d {
            let center = (2.0 * PI * j as f64 + phase) / df;
            for t in [center - PI / (4.0 * df), center, center + PI / (4.0 * df)] {
                let t = t.rem_euclid(2.0 * PI);
                if t.sin().abs() > 1e-9 {
                    out.push(t);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    } else {
        return Err(Error::NoCandidates(format!(
            "need genus >= 2 or deg Q >= m + 1, got m = {m}, deg Q = {d}"
        )));
    }
    Ok(out)
}

/// Samples `log |f(re^{iθ})|` along each candidate ray on a geometric grid
/// of `n_points` radii in `[r_min, r_max]`.
pub fn decay_ray_scan(spec: &EntireFunctionSpec, r_min: f64, r_max: f64, n_points: usize) -> Result<Vec<RayScan>> {
    if spec.genus() < 2 && spec.exponent_poly.degree() < spec.factor_index as usize + 1 {
        return Err(Error::NoCandidates(format!("genus {} is below 2", spec.genus())));
    }
    let candidates = decay_candidates(spec)?;
    let n = n_points.max(2);
    let radii: Vec<f64> = (0..n)
        .map(|i| r_min * (r_max / r_min).powf(i as f64 / (n - 1) as f64))
        .collect();
    let ev = Evaluator::for_radius(spec, r_max, DEFAULT_TOLERANCE)?;
    let scans = candidates
        .par_iter()
        .map(|&theta| {
            let log_modulus: Vec<f64> = radii.iter().map(|&r| ev.log_modulus(r.ln(), theta)).collect();
            let decreasing = log_modulus.windows(2).all(|w| w[1] < w[0]);
            let (xs, ys): (Vec<f64>, Vec<f64>) = radii
                .iter()
                .zip(&log_modulus)
                .filter(|(_, &v)| v < 0.0)
                .map(|(&r, &v)| (r.ln(), (-v).ln()))
                .unzip();
            let exponent = if xs.len() >= 2 { ls_slope(&xs, &ys) } else { f64::NAN };
            let negative = log_modulus.iter().all(|&v| v < 0.0);
            RayScan {
                theta,
                radii: radii.clone(),
                log_modulus,
                exponent,
                decreasing,
                flagged: negative && decreasing && exponent > 0.0,
            }
        })
        .collect();
    Ok(scans)
}

/// Rows `theta, r, log_modulus`.
pub fn write_ray_csv(scans: &[RayScan], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "r", "log_modulus"]).map_err(csv_err)?;
    for s in scans {
        for (r, v) in s.radii.iter().zip(&s.log_modulus) {
            w.write_record([fmt(s.theta), fmt(*r), fmt(*v)]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}
