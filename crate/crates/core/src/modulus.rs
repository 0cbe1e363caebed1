//! Maximum modulus `M(r)`, minimum modulus `m(r)` and the running maximum
//! `m̃(r) = max_{s <= r} m(s)` on circles.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::eval::{Evaluator, DEFAULT_TOLERANCE};
use crate::numeric::{golden_section_max, golden_section_min};
use crate::spec::EntireFunctionSpec;

pub const DEFAULT_SAMPLES: usize = 1024;
pub const DEFAULT_REFINE_TOLERANCE: f64 = 1e-6;
const REFINED_EXTREMA: usize = 4;

/// Extremes of `log |f|` on the circle `|z| = e^{log_radius}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusProfile {
    pub log_radius: f64,
    #[serde(with = "crate::logvalue::extended_f64")]
    pub min_log: f64,
    pub argmin_theta: f64,
    #[serde(with = "crate::logvalue::extended_f64")]
    pub max_log: f64,
    pub argmax_theta: f64,
    pub sample_count: usize,
    pub refined: bool,
    /// `(θ, log |f|)` at the uniform samples.
    #[serde(skip)]
    pub samples: Vec<(f64, f64)>,
}

impl ModulusProfile {
    pub fn radius(&self) -> f64 {
        self.log_radius.exp()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProfileOptions {
    pub n_samples: usize,
    pub refine_tolerance: f64,
    pub tolerance: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            n_samples: DEFAULT_SAMPLES,
            refine_tolerance: DEFAULT_REFINE_TOLERANCE,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Samples `θ ∈ [0, π]` uniformly (both ends included) and refines the
/// most extreme local minima and maxima by golden-section search.
pub fn circle_profile(
    spec: &EntireFunctionSpec,
    r: f64,
    n_samples: usize,
    refine_tolerance: f64,
) -> Result<ModulusProfile> {
    circle_profile_log(
        spec,
        r.ln(),
        &ProfileOptions {
            n_samples,
            refine_tolerance,
            ..ProfileOptions::default()
        },
    )
}

/// [`circle_profile`] for radius `e^{log_r}`.
pub fn circle_profile_log(spec: &EntireFunctionSpec, log_r: f64, opts: &ProfileOptions) -> Result<ModulusProfile> {
    let ev = Evaluator::new(spec, log_r, opts.tolerance)?;
    Ok(profile_with(&ev, log_r, opts))
}

pub(crate) fn profile_with(ev: &Evaluator<'_>, log_r: f64, opts: &ProfileOptions) -> ModulusProfile {
    let n = opts.n_samples.max(2);
    let step = PI / (n - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let theta = if i + 1 == n { PI } else { i as f64 * step };
            (theta, ev.log_modulus(log_r, theta))
        })
        .collect();
    let f = |t: f64| ev.log_modulus(log_r, t);
    let spec = ev.spec();
    if spec.has_positive_axis_extremes() || spec.has_paired_axis_extremes() {
        let (max, argmax) = max_with(ev, log_r, opts);
        return ModulusProfile {
            log_radius: log_r,
            min_log: samples[0].1,
            argmin_theta: 0.0,
            max_log: max,
            argmax_theta: argmax,
            sample_count: n,
            refined: true,
            samples,
        };
    }

    // Zeros are real, so a zero on the circle sits at θ = 0 or π, both of
    // which are samples; the sentinel then comes through unrefined.
    let (mut argmin, mut min) = samples[0];
    let (mut argmax, mut max) = samples[0];
    for &(t, v) in &samples {
        if v < min {
            (argmin, min) = (t, v);
        }
        if v > max {
            (argmax, max) = (t, v);
        }
    }

    if min > f64::NEG_INFINITY {
        for i in local_extrema(&samples, |a, b| a < b) {
            let (lo, hi) = bracket(i, n, step);
            let (t, v) = golden_section_min(f, lo, hi, opts.refine_tolerance);
            if v < min {
                (argmin, min) = (t, v);
            }
        }
    }
    for i in local_extrema(&samples, |a, b| a > b) {
        let (lo, hi) = bracket(i, n, step);
        let (t, v) = golden_section_max(f, lo, hi, opts.refine_tolerance);
        if v > max {
            (argmax, max) = (t, v);
        }
    }
    ModulusProfile {
        log_radius: log_r,
        min_log: min,
        argmin_theta: argmin,
        max_log: max,
        argmax_theta: argmax,
        sample_count: n,
        refined: true,
        samples,
    }
}

fn bracket(i: usize, n: usize, step: f64) -> (f64, f64) {
    let lo = if i == 0 { 0.0 } else { (i - 1) as f64 * step };
    let hi = if i + 1 >= n { PI } else { ((i + 1) as f64 * step).min(PI) };
    (lo, hi)
}

/// Indices of the most extreme interior or endpoint local extrema.
fn local_extrema(samples: &[(f64, f64)], better: impl Fn(f64, f64) -> bool) -> Vec<usize> {
    let n = samples.len();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = samples[i].1;
            let left = i == 0 || !better(samples[i - 1].1, v);
            let right = i + 1 == n || !better(samples[i + 1].1, v);
            left && right && v.is_finite()
        })
        .collect();
    idx.sort_by(|&a, &b| {
        let (va, vb) = (samples[a].1, samples[b].1);
        if better(va, vb) {
            std::cmp::Ordering::Less
        } else if better(vb, va) {
            std::cmp::Ordering::Greater
        } else {
            a.cmp(&b)
        }
    });
    idx.truncate(REFINED_EXTREMA);
    idx
}

/// `log m(e^{log_r})`, taken on the real axis when every factor is extremal
/// there and from a refined circle profile otherwise.
pub fn min_log_modulus(spec: &EntireFunctionSpec, log_r: f64, opts: &ProfileOptions) -> Result<(f64, f64)> {
    let ev = Evaluator::new(spec, log_r, opts.tolerance)?;
    Ok(min_with(&ev, log_r, opts))
}

pub(crate) fn min_with(ev: &Evaluator<'_>, log_r: f64, opts: &ProfileOptions) -> (f64, f64) {
    let spec = ev.spec();
    if spec.has_positive_axis_extremes() || spec.has_paired_axis_extremes() {
        (ev.log_modulus(log_r, 0.0), 0.0)
    } else {
        let p = profile_with(ev, log_r, opts);
        (p.min_log, p.argmin_theta)
    }
}

/// `log M(e^{log_r})` with the same shortcuts as [`min_log_modulus`].
pub fn max_log_modulus(spec: &EntireFunctionSpec, log_r: f64, opts: &ProfileOptions) -> Result<(f64, f64)> {
    let ev = Evaluator::new(spec, log_r, opts.tolerance)?;
    Ok(max_with(&ev, log_r, opts))
}

pub(crate) fn max_with(ev: &Evaluator<'_>, log_r: f64, opts: &ProfileOptions) -> (f64, f64) {
    let spec = ev.spec();
    if spec.has_positive_axis_extremes() {
        (ev.log_modulus(log_r, PI), PI)
    } else if spec.has_paired_axis_extremes() {
        (ev.log_modulus(log_r, PI / 2.0), PI / 2.0)
    } else {
        let p = profile_with(ev, log_r, opts);
        (p.max_log, p.argmax_theta)
    }
}

/// Geometric radius grid for `m̃`.
#[derive(Clone, Copy, Debug)]
pub struct TildeGrid {
    pub r_min: f64,
    pub ratio: f64,
}

impl Default for TildeGrid {
    fn default() -> Self {
        Self {
            r_min: 1e-3,
            ratio: 1.02,
        }
    }
}

/// `log m̃` at a radius with the radius where the maximum is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TildeValue {
    #[serde(with = "crate::logvalue::extended_f64")]
    pub log_value: f64,
    pub argmax_log_radius: f64,
}

/// `log m̃(r)`: maximum of `log m(s)` over a geometric grid of `s <= r`,
/// refined by golden-section search in `log s` around the best grid point.
pub fn tilde_min_log(spec: &EntireFunctionSpec, r: f64, grid: TildeGrid) -> Result<f64> {
    Ok(tilde_min_log_detail(spec, r.ln(), grid, &ProfileOptions::default())?.log_value)
}

pub fn tilde_min_log_detail(
    spec: &EntireFunctionSpec,
    log_r: f64,
    grid: TildeGrid,
    opts: &ProfileOptions,
) -> Result<TildeValue> {
    let radii = log_grid(grid.r_min.ln().min(log_r), log_r, grid.ratio.ln());
    let values = radii
        .iter()
        .map(|&u| Ok(min_log_modulus(spec, u, opts)?.0))
        .collect::<Result<Vec<f64>>>()?;
    refine_tilde(spec, &radii, &values, radii.len() - 1, opts)
}

fn refine_tilde(
    spec: &EntireFunctionSpec,
    radii: &[f64],
    values: &[f64],
    upto: usize,
    opts: &ProfileOptions,
) -> Result<TildeValue> {
    let mut best = 0;
    for i in 0..=upto {
        if values[i] > values[best] {
            best = i;
        }
    }
    let lo = radii[best.saturating_sub(1)];
    let hi = radii[(best + 1).min(upto)];
    let mut out = TildeValue {
        log_value: values[best],
        argmax_log_radius: radii[best],
    };
    if hi > lo {
        let ev = Evaluator::new(spec, hi, opts.tolerance)?;
        let (u, v) = golden_section_max(|u| min_with(&ev, u, opts).0, lo, hi, 1e-9 * (1.0 + hi.abs()));
        if v > out.log_value {
            out = TildeValue {
                log_value: v,
                argmax_log_radius: u,
            };
        }
    }
    Ok(out)
}

/// Log-radii from `lo` to `hi` inclusive with spacing at most `step`.
pub fn log_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![hi];
    }
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    (0..=n).map(|i| if i == n { hi } else { lo + h * i as f64 }).collect()
}

/// `log m̃` along an increasing log-radius grid: entry `i` is the running
/// maximum of `log m` over grid points `0..=i`, refined at each new maximum.
pub fn tilde_profile(spec: &EntireFunctionSpec, log_radii: &[f64], opts: &ProfileOptions) -> Result<Vec<TildeValue>> {
    let values = log_radii
        .iter()
        .map(|&u| Ok(min_log_modulus(spec, u, opts)?.0))
        .collect::<Result<Vec<f64>>>()?;
    let mut out = Vec::with_capacity(values.len());
    let mut best: Option<TildeValue> = None;
    let mut best_index = 0;
    for i in 0..values.len() {
        if best.is_none() || values[i] > values[best_index] {
            best_index = i;
            best = Some(refine_tilde(spec, log_radii, &values, i, opts)?);
        }
        out.push(best.unwrap());
    }
    Ok(out)
}

/// Writes `r, theta, log_modulus` rows for each profile's samples.
pub fn write_samples_csv(profiles: &[ModulusProfile], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["r", "theta", "log_modulus"]).map_err(csv_err)?;
    for p in profiles {
        for (t, v) in &p.samples {
            w.write_record([fmt(p.radius()), fmt(*t), fmt(*v)]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `r, min_log, argmin, max_log, argmax` summary rows.
pub fn write_summary_csv(profiles: &[ModulusProfile], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "min_log", "argmin", "max_log", "argmax"]).map_err(csv_err)?;
    for p in profiles {
        w.write_record([
            fmt(p.radius()),
            fmt(p.min_log),
            fmt(p.argmin_theta),
            fmt(p.max_log),
            fmt(p.argmax_theta),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn fmt(x: f64) -> String {
    format!("{x}")
}

pub(crate) fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Io(std::io::Error::other(e))
}
