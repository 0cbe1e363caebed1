//! Numerical checks of two self-contained lemmas: the `L_n ≥ 2` product
//! bound and the decay of primary factors along special rays.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::primary_factor_log;
use crate::modulus::{csv_err, fmt};

/// Smallest allowed `log r_0`.
pub const MIN_LOG_R0: f64 = 1600.0;
/// Required growth `log r_{n_{k+1}} >= 16 log r_{n_k}`.
pub const SUBSEQUENCE_POWER: f64 = 16.0;

/// `L_0 = 3`, `L_{n_k+1} = L_{n_k}(1 - δ_{n_k})`, `L_n = 3` otherwise, with
/// `δ_{n_k} = 10 / sqrt(log r_{n_k})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProdLInstance {
    pub log_r: Vec<f64>,
    /// `n_1 < n_2 < ...`, indices into `log_r`.
    pub subsequence: Vec<usize>,
    /// `L_0 ..= L_{len(log_r)}`.
    pub l_sequence: Vec<f64>,
    pub delta_values: Vec<f64>,
    pub min_l: f64,
    /// `3 (1 - Σ_{k<=K} 4^{-k})`.
    pub lower_bound: f64,
    pub holds: bool,
}

/// Checks the instance conditions and computes `L_n`.
pub fn prodl_sequence(log_r: Vec<f64>, subsequence: Vec<usize>) -> Result<ProdLInstance> {
    let bad = |m: String| Err(Error::InvalidInstance(m));
    match log_r.first() {
        None => return bad("empty radius sequence".into()),
        Some(&l0) if !(l0 >= MIN_LOG_R0) => return bad(format!("log r_0 = {l0} is below {MIN_LOG_R0}")),
        _ => {}
    }
    if let Some(i) = log_r.windows(2).position(|w| !(w[1] >= w[0])) {
        return bad(format!("radii decrease at n = {}", i + 1));
    }
    for (k, &n) in subsequence.iter().enumerate() {
        if n >= log_r.len() {
            return bad(format!("subsequence index {n} is out of range"));
        }
        if k > 0 {
            let prev = subsequence[k - 1];
            if n <= prev {
                return bad(format!("subsequence indices must increase, got {prev} then {n}"));
            }
            if !(log_r[n] >= SUBSEQUENCE_POWER * log_r[prev]) {
                return bad(format!(
                    "log r_{n} = {} is below {SUBSEQUENCE_POWER} log r_{prev} = {}",
                    log_r[n],
                    SUBSEQUENCE_POWER * log_r[prev]
                ));
            }
        }
    }
    let delta_values: Vec<f64> = subsequence.iter().map(|&n| 10.0 / log_r[n].sqrt()).collect();
    let mut l = vec![3.0; log_r.len() + 1];
    for n in 1..l.len() {
        if let Some(k) = subsequence.iter().position(|&nk| nk + 1 == n) {
            l[n] = l[n - 1] * (1.0 - delta_values[k]);
        }
    }
    let min_l = l.iter().cloned().fold(f64::INFINITY, f64::min);
    let lower_bound = 3.0 * (1.0 - (1..=subsequence.len()).map(|k| 0.25f64.powi(k as i32)).sum::<f64>());
    Ok(ProdLInstance {
        log_r,
        subsequence,
        l_sequence: l,
        delta_values,
        min_l,
        lower_bound,
        holds: min_l >= 2.0,
    })
}

/// The instance where every inequality is an equality: `log r_0 = 1600`,
/// `log r_k = 1600 · 16^{k-1}` and `n_k = k` for `k = 1..=k_max`.
pub fn prodl_tight(k_max: usize) -> Result<ProdLInstance> {
    let mut log_r = vec![MIN_LOG_R0];
    for k in 1..=k_max {
        log_r.push(MIN_LOG_R0 * SUBSEQUENCE_POWER.powi(k as i32 - 1));
    }
    prodl_sequence(log_r, (1..=k_max).collect())
}

fn cos_checks(m: u32, theta: f64) -> (f64, f64, f64) {
    let mf = m as f64;
    (((mf - 1.0) * theta).cos(), (mf * theta).cos(), ((mf + 1.0) * theta).cos())
}

/// Sign conditions on the ray angle: for even `m`, `cos mθ < 0` and
/// `cos (m+1)θ = 0`; for odd `m`, `cos (m-1)θ < 0`, `cos mθ = 0` and
/// `cos (m+1)θ > 0`. Equalities are checked to `tol`.
pub fn satisfies_sign_conditions(m: u32, theta: f64, tol: f64) -> bool {
    let (c_prev, c_m, c_next) = cos_checks(m, theta);
    if m % 2 == 0 {
        c_m < 0.0 && c_next.abs() <= tol
    } else {
        c_prev < 0.0 && c_m.abs() <= tol && c_next > 0.0
    }
}

/// The angles on which `log |E(T e^{iθ}, m)|` decays like `-C|T|^p`:
/// `(4k-1)π / (2(m+1))` for even `m` and `(4k-1)π / (2m)` for odd `m`,
/// together with their shifts by `π`, sorted.
pub fn theta_candidates(m: u32) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::ParameterOutOfRange(format!("theta candidates need m >= 2, got {m}")));
    }
    let (count, denom) = if m % 2 == 0 { (m / 2, 2 * (m + 1)) } else { ((m - 1) / 2, 2 * m) };
    let mut out = Vec::new();
    for k in 1..=count {
        let theta = (4 * k - 1) as f64 * PI / denom as f64;
        out.push(theta);
        out.push(theta + PI);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// `p = m` for even `m`, `m - 1` for odd `m`.
pub fn decay_power(m: u32) -> u32 {
    if m % 2 == 0 {
        m
    } else {
        m - 1
    }
}

/// `d/dT log |E(T e^{iθ}, m)| = (T^{m+1} cos mθ - T^m cos (m+1)θ) / |1 - T e^{iθ}|²`.
pub fn log_e_derivative(m: u32, theta: f64, t: f64) -> f64 {
    let mf = m as f64;
    let num = t.powi(m as i32 + 1) * (mf * theta).cos() - t.powi(m as i32) * ((mf + 1.0) * theta).cos();
    let den = (1.0 - t * theta.cos()).powi(2) + (t * theta.sin()).powi(2);
    num / den
}

pub fn log_e_on_ray(m: u32, theta: f64, t: f64) -> f64 {
    primary_factor_log(Complex64::from_polar(t, theta), m).log_modulus
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayProfile {
    pub m: u32,
    pub theta: f64,
    pub power: u32,
    pub t_grid: Vec<f64>,
    pub log_e_values: Vec<f64>,
    pub derivative_values: Vec<f64>,
    /// `min -log|E| / |T|^p` over `|T| >= T_0`.
    pub fitted_c: f64,
    pub fitted_t0: f64,
    pub bounded_by_one: bool,
    pub sign_pattern_ok: bool,
}

/// Relative spread allowed for `-log|E| / |T|^p` beyond `T_0`.
const FIT_STABILITY: f64 = 0.05;

/// Evaluates `log |E(T e^{iθ}, m)|` and its derivative along the ray.
///
/// `T_0` is the smallest `|T|` on the grid beyond which every ratio
/// `-log|E| / |T|^p` is within 5% of the ratio at the largest `|T|`.
pub fn ray_profile(m: u32, theta: f64, t_grid: &[f64]) -> Result<RayProfile> {
    if m < 2 {
        return Err(Error::ParameterOutOfRange(format!("ray profiles need m >= 2, got {m}")));
    }
    if !satisfies_sign_conditions(m, theta, 1e-12) {
        return Err(Error::BadAngle { m, theta });
    }
    let log_e_values: Vec<f64> = t_grid.iter().map(|&t| log_e_on_ray(m, theta, t)).collect();
    let derivative_values: Vec<f64> = t_grid.iter().map(|&t| log_e_derivative(m, theta, t)).collect();
    let bounded_by_one = log_e_values.iter().all(|&v| v <= 1e-12);
    let sign_pattern_ok = t_grid.iter().zip(&derivative_values).all(|(&t, &d)| {
        if t < 0.0 {
            d > 0.0
        } else if t > 0.0 {
            d < 0.0
        } else {
            d == 0.0
        }
    });

    let power = decay_power(m);
    let mut fits: Vec<(f64, f64)> = t_grid
        .iter()
        .zip(&log_e_values)
        .filter(|(t, _)| t.abs() > 0.0)
        .map(|(t, v)| (t.abs(), -v / t.abs().powi(power as i32)))
        .collect();
    fits.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut fitted_t0, mut fitted_c) = (f64::NAN, f64::NAN);
    if let Some(&(_, last)) = fits.last() {
        let mut start = fits.len() - 1;
        while start > 0 && (fits[start - 1].1 - last).abs() <= FIT_STABILITY * last.abs() {
            start -= 1;
        }
        fitted_t0 = fits[start].0;
        fitted_c = fits[start..].iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
    }
    Ok(RayProfile {
        m,
        theta,
        power,
        t_grid: t_grid.to_vec(),
        log_e_values,
        derivative_values,
        fitted_c,
        fitted_t0,
        bounded_by_one,
        sign_pattern_ok,
    })
}

impl RayProfile {
    /// Rows `m, theta, T, log_E, derivative`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "theta", "T", "log_E", "derivative"]).map_err(csv_err)?;
        for ((t, v), d) in self.t_grid.iter().zip(&self.log_e_values).zip(&self.derivative_values) {
            w.write_record([self.m.to_string(), fmt(self.theta), fmt(*t), fmt(*v), fmt(*d)])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `n` points spaced evenly on `[-t_max, t_max]`, including zero when `n` is odd.
pub fn symmetric_grid(t_max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| -t_max + 2.0 * t_max * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_delta_is_a_quarter() {
        let inst = prodl_sequence(vec![1600.0, 1600.0], vec![1]).unwrap();
        assert_eq!(inst.delta_values, vec![0.25]);
        assert_eq!(inst.l_sequence, vec![3.0, 3.0, 2.25]);
    }

    #[test]
    fn odd_and_even_candidates() {
        assert_eq!(theta_candidates(2).unwrap(), vec![PI / 2.0, 1.5 * PI]);
        assert_eq!(theta_candidates(3).unwrap(), vec![PI / 2.0, 1.5 * PI]);
        assert_eq!(theta_candidates(5).unwrap().len(), 4);
    }
}
