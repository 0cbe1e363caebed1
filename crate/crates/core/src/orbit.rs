//! Iteration of the minimum modulus `r ↦ m(r)` and finite-horizon checks
//! of the property `m^n(r) → ∞`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulus::{
    csv_err, fmt, log_grid, min_log_modulus, tilde_min_log_detail, tilde_profile, ProfileOptions, TildeGrid,
};
use crate::spec::EntireFunctionSpec;

/// `ln 10^300`.
pub const DEFAULT_ESCAPE_LOG: f64 = 690.775_527_898_213_7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrbitStatus {
    /// `values[step]` exceeded the threshold; `beyond_range` marks a radius
    /// too large to evaluate.
    Escaped { step: usize, beyond_range: bool },
    /// No growth: the maximum over the second half of the orbit does not
    /// exceed the maximum over the first half.
    Bounded { max_log: f64 },
    HitZero { step: usize },
    MaxIterations,
}

/// `values[n] = log m^n(seed)`, `values[0] = log seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub log_seed: f64,
    #[serde(with = "crate::logvalue::extended_f64::vec")]
    pub values: Vec<f64>,
    pub status: OrbitStatus,
    pub strictly_increasing: bool,
}

impl OrbitRecord {
    pub fn seed(&self) -> f64 {
        self.log_seed.exp()
    }

    pub fn escaped(&self) -> bool {
        matches!(self.status, OrbitStatus::Escaped { .. })
    }

    /// Writes `step, log_radius, log_min_modulus, status` rows.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "log_radius", "log_min_modulus", "status"]).map_err(csv_err)?;
        let last = self.values.len().saturating_sub(1);
        for n in 0..last {
            let status = if n + 1 == last { status_name(&self.status) } else { "running" };
            w.write_record([n.to_string(), fmt(self.values[n]), fmt(self.values[n + 1]), status.to_string()])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn status_name(s: &OrbitStatus) -> &'static str {
    match s {
        OrbitStatus::Escaped { .. } => "escaped",
        OrbitStatus::Bounded { .. } => "bounded",
        OrbitStatus::HitZero { .. } => "hit-zero",
        OrbitStatus::MaxIterations => "max-iterations",
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OrbitOptions {
    pub max_iter: usize,
    pub escape_log_threshold: f64,
    pub profile: ProfileOptions,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            escape_log_threshold: DEFAULT_ESCAPE_LOG,
            profile: ProfileOptions::default(),
        }
    }
}

pub fn iterate_min_modulus(
    spec: &EntireFunctionSpec,
    seed: f64,
    max_iter: usize,
    escape_log_threshold: f64,
) -> Result<OrbitRecord> {
    iterate_min_modulus_log(
        spec,
        seed.ln(),
        &OrbitOptions {
            max_iter,
            escape_log_threshold,
            ..OrbitOptions::default()
        },
    )
}

/// Iterates `r ← m(r)` from `e^{log_seed}` in log space.
pub fn iterate_min_modulus_log(spec: &EntireFunctionSpec, log_seed: f64, opts: &OrbitOptions) -> Result<OrbitRecord> {
    let mut values = vec![log_seed];
    let mut status = OrbitStatus::MaxIterations;
    for step in 1..=opts.max_iter {
        let current = values[step - 1];
        let next = match min_log_modulus(spec, current, &opts.profile) {
            Ok((v, _)) => v,
            Err(Error::TailNotConvergent(_)) => {
                status = OrbitStatus::Escaped {
                    step: step - 1,
                    beyond_range: true,
                };
                break;
            }
            Err(e) => return Err(e),
        };
        values.push(next);
        if next == f64::NEG_INFINITY {
            status = OrbitStatus::HitZero { step };
            break;
        }
        if next > opts.escape_log_threshold {
            status = OrbitStatus::Escaped {
                step,
                beyond_range: false,
            };
            break;
        }
    }
    if status == OrbitStatus::MaxIterations && values.len() > 2 {
        let tail = &values[1..];
        let half = tail.len() / 2;
        let lead = tail[..half.max(1)].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let trail = tail[half..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if trail <= lead {
            status = OrbitStatus::Bounded {
                max_log: tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            };
        }
    }
    let strictly_increasing = values.windows(2).all(|w| w[1] > w[0]);
    Ok(OrbitRecord {
        log_seed,
        values,
        status,
        strictly_increasing,
    })
}

/// `log m̃` applied repeatedly: `T_{n+1} = m̃(T_n)` with the radius `s_n <= T_n`
/// where `m(s_n) = T_{n+1}`.
fn tilde_chain(
    spec: &EntireFunctionSpec,
    log_t: f64,
    log_t_max: f64,
    grid: TildeGrid,
    opts: &ProfileOptions,
    max_steps: usize,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let mut big_t = vec![log_t];
    let mut s = Vec::new();
    while *big_t.last().unwrap() < log_t_max {
        if s.len() >= max_steps {
            return Ok(None);
        }
        let cur = *big_t.last().unwrap();
        let tv = tilde_min_log_detail(spec, cur, grid, opts)?;
        if !(tv.log_value > cur) {
            return Ok(None);
        }
        s.push(tv.argmax_log_radius);
        big_t.push(tv.log_value);
    }
    Ok(Some((big_t, s)))
}

/// Finds `t ∈ [lo, hi]` (log radii) with `log m(t) = target` by bisection,
/// given `log m(lo) <= target <= log m(hi)`.
fn solve_min_modulus(spec: &EntireFunctionSpec, lo: f64, hi: f64, target: f64, opts: &ProfileOptions) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if min_log_modulus(spec, mid, opts)?.0 <= target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(b)
}

/// `(u, log m̃(e^u) - u)` for grid log-radii `u ∈ [lo, hi]`; the grid starts
/// at `grid.r_min` and passes through `lo`.
pub fn tilde_gaps(
    spec: &EntireFunctionSpec,
    lo: f64,
    hi: f64,
    grid: TildeGrid,
    opts: &ProfileOptions,
) -> Result<Vec<(f64, f64)>> {
    let step = grid.ratio.ln();
    let mut radii = log_grid(grid.r_min.ln().min(lo), lo, step);
    radii.extend(log_grid(lo, hi, step).into_iter().skip(1));
    let tilde = tilde_profile(spec, &radii, opts)?;
    Ok(radii
        .iter()
        .zip(&tilde)
        .filter(|(u, _)| **u >= lo)
        .map(|(u, tv)| (*u, tv.log_value - u))
        .collect())
}

/// Smallest `u` from which every gap to the end of the grid is positive.
pub fn dominance_start(gaps: &[(f64, f64)]) -> Option<f64> {
    let mut from = None;
    for &(u, gap) in gaps.iter().rev() {
        if !(gap > 0.0) {
            break;
        }
        from = Some(u);
    }
    from
}

/// A strictly increasing orbit seed built backwards from the `m̃` chain
/// starting at `T`: with `T_{n+1} = m̃(T_n) = m(s_n)` the seeds satisfy
/// `t_{N-1} = s_{N-1}` and `t_n ∈ [T_{n-1}, s_n]` with `m(t_n) = t_{n+1}`.
///
/// Returns the log seed whose forward orbit is verified strictly increasing
/// up to escape past `T_max`, preferring the earliest such seed.
pub fn find_strict_seed(
    spec: &EntireFunctionSpec,
    t: f64,
    t_max: f64,
    grid: TildeGrid,
    opts: &ProfileOptions,
) -> Result<Option<OrbitRecord>> {
    let (log_t, log_t_max) = (t.ln(), t_max.ln());
    if dominance_start(&tilde_gaps(spec, log_t, log_t_max, grid, opts)?) != Some(log_t) {
        return Ok(None);
    }
    let lower = grid.r_min.ln().min(log_t);
    let Some((big_t, s)) = tilde_chain(spec, log_t, log_t_max, grid, opts, 64)? else {
        return Ok(None);
    };
    let n = s.len();
    let mut seeds = vec![0.0; n];
    seeds[n - 1] = s[n - 1];
    let mut first = n - 1;
    for k in (0..n - 1).rev() {
        let target = seeds[k + 1];
        let lo = if k == 0 {
            // a radius below s_0 whose minimum modulus does not exceed the target
            let mut u = s[0];
            let mut found = None;
            for _ in 0..400 {
                u -= grid.ratio.ln();
                if u < lower {
                    break;
                }
                if min_log_modulus(spec, u, opts)?.0 <= target {
                    found = Some(u);
                    break;
                }
            }
            match found {
                Some(u) => u,
                None => break,
            }
        } else {
            big_t[k - 1]
        };
        seeds[k] = solve_min_modulus(spec, lo, s[k], target, opts)?;
        first = k;
    }
    let orbit_opts = OrbitOptions {
        max_iter: n + 2,
        escape_log_threshold: log_t_max,
        profile: *opts,
    };
    for &seed in &seeds[first..] {
        let rec = iterate_min_modulus_log(spec, seed, &orbit_opts)?;
        if rec.escaped() && rec.strictly_increasing {
            return Ok(Some(rec));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub log_t: f64,
    pub log_t_max: f64,
    /// (a) some sampled orbit increases strictly past `T_max`.
    pub escaping_orbit: bool,
    /// (b) some orbit exceeds `T_max`.
    pub unbounded_orbit: bool,
    /// (c) `m̃(t) > t` on the grid from some point of `[T, T_max / 10]` on.
    pub tilde_dominates: bool,
    /// Log-radius from which `m̃(t) > t` holds up to `T_max`.
    pub dominance_from: Option<f64>,
    /// (e) an increasing chain `t_{n+1} <= m(t_n)` reaches `T_max`.
    pub chain_exists: bool,
    pub strict_seed: Option<f64>,
    pub inconsistent: bool,
    pub all_agree: bool,
}

/// Evaluates finite proxies of the equivalent conditions on `[T, T_max]`.
pub fn check_equivalences(
    spec: &EntireFunctionSpec,
    t: f64,
    t_max: f64,
    opts: &ProfileOptions,
) -> Result<EquivalenceReport> {
    if !(t_max >= 10.0 * t) {
        return Err(Error::ParameterOutOfRange(format!("need T_max >= 10 T, got T = {t}, T_max = {t_max}")));
    }
    let grid = TildeGrid::default();
    let (log_t, log_t_max) = (t.ln(), t_max.ln());
    let from = dominance_start(&tilde_gaps(spec, log_t, log_t_max, grid, opts)?);
    let tilde_dominates = from.is_some_and(|u| u <= log_t_max - std::f64::consts::LN_10);

    let strict = match from {
        Some(u) if tilde_dominates => find_strict_seed(spec, u.exp(), t_max, grid, opts)?,
        _ => None,
    };
    let orbit_opts = OrbitOptions {
        max_iter: 40,
        escape_log_threshold: log_t_max,
        profile: *opts,
    };
    let mut seeds: Vec<f64> = log_grid(log_t, log_t_max, (log_t_max - log_t) / 8.0);
    if let Some(rec) = &strict {
        seeds.insert(0, rec.log_seed);
    }
    let mut escaping_orbit = false;
    let mut unbounded_orbit = false;
    for &u in &seeds {
        let rec = iterate_min_modulus_log(spec, u, &orbit_opts)?;
        if rec.escaped() && rec.strictly_increasing {
            escaping_orbit = true;
        }
        if rec.values[1..].iter().any(|&v| v > log_t_max) {
            unbounded_orbit = true;
        }
    }
    let mut chain_exists = false;
    let starts = seeds[strict.is_some() as usize..].iter().cloned().filter(|&u| u < log_t_max);
    for u in from.into_iter().chain(starts) {
        if tilde_chain(spec, u, log_t_max, grid, opts, 64)?.is_some() {
            chain_exists = true;
            break;
        }
    }
    let inconsistent = tilde_dominates != escaping_orbit;
    let all_agree = [escaping_orbit, unbounded_orbit, chain_exists]
        .iter()
        .all(|&x| x == tilde_dominates);
    Ok(EquivalenceReport {
        log_t,
        log_t_max,
        escaping_orbit,
        unbounded_orbit,
        tilde_dominates,
        dominance_from: from,
        chain_exists,
        strict_seed: strict.map(|r| r.log_seed),
        inconsistent,
        all_agree,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PropertyVerdict {
    Holds { witness: OrbitRecord },
    FailsEvidence { max_ratio_log: f64 },
    Inconclusive,
}

/// Range and grid for [`classify_property`].
#[derive(Clone, Copy, Debug)]
pub struct PropertyOptions {
    pub r_min: f64,
    pub r_max: f64,
    pub grid: TildeGrid,
    pub profile: ProfileOptions,
}

impl Default for PropertyOptions {
    fn default() -> Self {
        Self {
            r_min: 10.0,
            r_max: 1e6,
            grid: TildeGrid::default(),
            profile: ProfileOptions::default(),
        }
    }
}

/// Finite-horizon verdict on `m^n(r) → ∞` for some `r`.
///
/// `Holds` needs an escaping strictly increasing orbit seeded beyond the
/// point from which `m̃(t) > t` persists on the tested range.
/// `FailsEvidence` needs `m̃(t)/t` below one on the whole range and not
/// growing from the first half of the range to the second.
pub fn classify_property(spec: &EntireFunctionSpec, opts: &PropertyOptions) -> Result<PropertyVerdict> {
    let (lo, hi) = (opts.r_min.ln(), opts.r_max.ln());
    let tested = tilde_gaps(spec, lo, hi, opts.grid, &opts.profile)?;
    if let Some(from) = dominance_start(&tested) {
        let t = from.max(1e4f64.ln()).min(hi).exp();
        if let Some(rec) = find_strict_seed(spec, t, 100.0 * t, opts.grid, &opts.profile)? {
            return Ok(PropertyVerdict::Holds { witness: rec });
        }
    }
    let max_ratio = tested.iter().map(|(_, g)| *g).fold(f64::NEG_INFINITY, f64::max);
    let half = tested.len() / 2;
    let lead = tested[..half.max(1)].iter().map(|(_, g)| *g).fold(f64::NEG_INFINITY, f64::max);
    let trail = tested[half..].iter().map(|(_, g)| *g).fold(f64::NEG_INFINITY, f64::max);
    if max_ratio < 0.0 && trail < lead {
        Ok(PropertyVerdict::FailsEvidence {
            max_ratio_log: max_ratio,
        })
    } else {
        Ok(PropertyVerdict::Inconclusive)
    }
}
