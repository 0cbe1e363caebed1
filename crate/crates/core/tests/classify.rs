use std::f64::consts::{E, PI};

use minmodlab_core::classify::*;
use minmodlab_core::families::{builtin_families, make_family, FamilyId};
use minmodlab_core::modulus::{min_log_modulus, ProfileOptions};
use minmodlab_core::numeric::geometric_grid;
use minmodlab_core::*;

fn fam(id: FamilyId) -> EntireFunctionSpec {
    make_family(id).unwrap()
}

fn single_zero(a: f64) -> EntireFunctionSpec {
    EntireFunctionSpec::from_zeros(ZeroSequence::finite(vec![ZeroEntry::new(a, 1).unwrap()])).unwrap()
}

fn genus_power() -> EntireFunctionSpec {
    fam(FamilyId::GenusPower { s: 0.4, symmetric: true })
}

/// `exp(-z²) Π (1 - z/k²)`.
fn gaussian_weighted() -> EntireFunctionSpec {
    EntireFunctionSpec::new(
        0,
        RealPolynomial::new(vec![0.0, 0.0, -1.0]).unwrap(),
        ZeroSequence::PowerLaw(PowerLaw::simple(1.0, 2.0)),
        0,
        None,
    )
    .unwrap()
}

fn order(f: &EntireFunctionSpec, r_min: f64, r_max: f64) -> f64 {
    estimate_order(f, r_min, r_max, 10f64.powf(0.1)).unwrap().order_estimate
}

#[test]
fn order_estimates() {
    let o = order(&fam(FamilyId::CosSqrt), 1e2, 1e8);
    assert!((0.45..=0.55).contains(&o), "{o}");
    let o = order(&fam(FamilyId::Hardy { sigma: 4.0 / 3.0 }), 1e2, 1e8);
    assert!((0.70..=0.80).contains(&o), "{o}");
    let g = fam(FamilyId::Hardy { sigma: 2.0 }).square_substitute().unwrap();
    let o = order(&g, 1e2, 1e8);
    assert!((0.9..=1.1).contains(&o), "{o}");
}

#[test]
fn order_report_is_the_largest_window_slope() {
    let rep = estimate_order(&fam(FamilyId::Hardy { sigma: 4.0 / 3.0 }), 1e2, 1e6, 10f64.powf(0.1)).unwrap();
    assert!(rep.order_estimate >= 0.0);
    assert!(rep.window_slopes.iter().all(|w| rep.order_estimate >= w.slope - 1e-12));
    assert!(rep.loglog_max.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn order_needs_three_decades_and_growth() {
    assert!(matches!(
        estimate_order(&fam(FamilyId::CosSqrt), 1e2, 1e4, 1.1),
        Err(Error::ParameterOutOfRange(_))
    ));
    assert!(matches!(
        estimate_order(&single_zero(1.0), 1e2, 1e6, 1.1),
        Err(Error::DegenerateGrowth(_))
    ));
}

#[test]
fn genus_examples() {
    let g = compute_genus(&fam(FamilyId::CosSqrt)).unwrap();
    assert_eq!((g.factor_index, g.poly_degree, g.genus), (0, 0, 0));
    let g = compute_genus(&genus_power()).unwrap();
    assert_eq!((g.factor_index, g.minimal_factor_index, g.genus), (2, 2, 2));
    let g = compute_genus(&gaussian_weighted()).unwrap();
    assert_eq!((g.factor_index, g.poly_degree, g.genus), (0, 2, 2));
}

#[test]
fn counting_function_examples() {
    assert!((counting_n(&single_zero(1.0), E).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(counting_n(&single_zero(5.0), 4.0).unwrap(), 0.0);

    // zeros 2.4674, 22.2066, 61.6850 below 100
    let hand: f64 = [0.5, 1.5, 2.5].iter().map(|k: &f64| (100.0 / (k * PI).powi(2)).ln()).sum();
    let n = counting_n(&fam(FamilyId::CosSqrt), 100.0).unwrap();
    assert!((n - hand).abs() < 1e-12);
    assert!((n - 5.6901).abs() < 1e-3, "{n}");
}

#[test]
fn counting_function_matches_brute_force() {
    let sigma = 4.0 / 3.0;
    let f = fam(FamilyId::Hardy { sigma });
    for r in [50.0, 1e4, 1e6, 3.3e7] {
        let mut brute = 0.0;
        let mut n = 1u64;
        while (n as f64).powf(sigma) <= r {
            brute += (r / (n as f64).powf(sigma)).ln();
            n += 1;
        }
        let got = counting_n(&f, r).unwrap();
        assert!((got - brute).abs() <= 1e-12 * brute, "r {r}: {got} vs {brute}");
    }
    let g = genus_power();
    let r = 40.0;
    let mut brute = 0.0;
    let mut k = 1u64;
    while (k as f64).powf(0.4) <= r {
        brute += 2.0 * (r / (k as f64).powf(0.4)).ln();
        k += 1;
    }
    let got = counting_n(&g, r).unwrap();
    assert!((got - brute).abs() <= 1e-12 * brute, "{got} vs {brute}");
}

#[test]
fn characteristic_examples() {
    let c = characteristic_t(&single_zero(1.0), 2.0, DEFAULT_QUADRATURE_PANELS, DEFAULT_ZERO_EXCLUSION).unwrap();
    assert!((c.t - 2f64.ln()).abs() < 1e-12);
    assert_eq!(c.proximity, 0.0);

    // m(r) = 2r at r = (10π)², so log⁺(1/|f|) vanishes on the circle
    let f = fam(FamilyId::ZCosSqrt);
    let r = (10.0 * PI).powi(2);
    assert!(min_log_modulus(&f, r.ln(), &ProfileOptions::default()).unwrap().0 > 0.0);
    let c = characteristic_t(&f, r, DEFAULT_QUADRATURE_PANELS, DEFAULT_ZERO_EXCLUSION).unwrap();
    assert_eq!(c.t, c.n);

    let c = characteristic_t(&fam(FamilyId::CosSqrt), 100.0, DEFAULT_QUADRATURE_PANELS, DEFAULT_ZERO_EXCLUSION).unwrap();
    assert!(c.t >= c.n && (c.n - 5.6901).abs() < 1e-3);
}

#[test]
fn characteristic_dominates_counting() {
    for (f, radii) in [
        (fam(FamilyId::CosSqrt), vec![3.0, 61.685, 500.0]),
        (genus_power(), vec![5.0, 30.0]),
        (gaussian_weighted(), vec![4.0, 9.0, 25.0]),
        (fam(FamilyId::Lindelof { alpha: 1.5 }), vec![20.0, 400.0]),
    ] {
        for r in radii {
            let c = characteristic_t(&f, r, DEFAULT_QUADRATURE_PANELS, DEFAULT_ZERO_EXCLUSION).unwrap();
            assert!(c.proximity >= 0.0 && c.t >= c.n, "r {r}: {c:?}");
        }
    }
}

#[test]
fn proximity_matches_brute_force_quadrature() {
    // midpoint rule on a fine grid as an independent check
    let f = gaussian_weighted();
    let r = 6.0;
    let n = 200_000;
    let h = PI / n as f64;
    let brute: f64 = (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            (-eval_log(&f, Complex64::from_polar(r, t), 1e-12).unwrap().log_modulus).max(0.0)
        })
        .sum::<f64>()
        * h
        / PI;
    let c = characteristic_t(&f, r, DEFAULT_QUADRATURE_PANELS, DEFAULT_ZERO_EXCLUSION).unwrap();
    assert!((c.proximity - brute).abs() < 1e-6 * brute.max(1.0), "{} vs {brute}", c.proximity);
}

#[test]
fn defect_of_genus_two_power_law() {
    let rep = defect_zero(&genus_power(), &geometric_grid(1.0, 1e3, 10f64.powf(0.25))).unwrap();
    assert!(rep.defect_estimate > 0.05, "{rep:?}");
    let half = rep.radii.len() / 2;
    assert!(rep.ratio_n_over_t[half..].iter().all(|&q| q < 0.95));
    for (n, t) in rep.n_values.iter().zip(&rep.t_values) {
        assert!(*n >= 0.0 && n <= t);
    }
}

#[test]
fn defect_of_gaussian_weighted_product() {
    let rep = defect_zero(&gaussian_weighted(), &geometric_grid(1.0, 1e3, 10f64.powf(0.25))).unwrap();
    let trailing: Vec<f64> = rep
        .radii
        .iter()
        .zip(&rep.ratio_n_over_t)
        .filter(|(r, _)| **r >= 100.0)
        .map(|(_, q)| *q)
        .collect();
    assert!(!trailing.is_empty() && trailing.iter().all(|&q| q <= 0.2), "{trailing:?}");
    assert!(rep.defect_estimate > 0.8);
}

#[test]
fn no_defect_when_the_minimum_modulus_stays_above_one() {
    // 1 + z has m(r) = r - 1 >= 1 for r >= 2
    let f = single_zero(-1.0);
    let rep = defect_zero(&f, &geometric_grid(2.0, 2e3, 10f64.powf(0.5))).unwrap();
    assert_eq!(rep.defect_estimate, 0.0);
    assert!(rep.ratio_n_over_t.iter().all(|&q| q == 1.0));
}

#[test]
fn deficient_zero_comes_with_a_decaying_minimum_modulus() {
    let opts = ProfileOptions::default();
    for (f, hi) in [(genus_power(), 3.0), (gaussian_weighted(), 3.0)] {
        let rep = defect_zero(&f, &geometric_grid(1.0, 10f64.powf(hi), 10f64.powf(0.25))).unwrap();
        assert!(rep.defect_estimate > 0.05);
        // decade points nudged off the zeros k² of the second spec
        let mins: Vec<f64> = [hi - 1.9, hi - 0.9, hi + 0.1]
            .iter()
            .map(|d| min_log_modulus(&f, d * 10f64.ln(), &opts).unwrap().0)
            .collect();
        assert!(mins.iter().all(|&v| v < 0.0), "{mins:?}");
        assert!(mins.windows(2).all(|w| w[1] < w[0]), "{mins:?}");
    }
}

#[test]
fn decay_rays_of_genus_two_power_law() {
    let scans = decay_ray_scan(&genus_power(), 10.0, 100.0, 41).unwrap();
    let up = scans.iter().find(|s| (s.theta - PI / 2.0).abs() < 1e-12).expect("θ = π/2 scanned");
    assert!(up.flagged && up.decreasing && up.exponent >= 2.0, "{up:?}");
    assert!(up.log_modulus.iter().all(|&v| v < 0.0));
    // independent direct sum on the imaginary axis at r = 10; past N the
    // terms are -r⁴/(2k^1.6) to leading order and are integrated
    let r: f64 = 10.0;
    let n = 2_000_000u64;
    let head: f64 = (1..=n)
        .map(|k| {
            let a2 = (k as f64).powf(0.8);
            2.0 * (-r * r / (2.0 * a2) + 0.5 * (r * r / a2).ln_1p())
        })
        .sum();
    let direct = head - r.powi(4) / 2.0 * (n as f64 + 0.5).powf(-0.6) / 0.6;
    assert!((up.log_modulus[0] - direct).abs() < 1e-3, "{} vs {direct}", up.log_modulus[0]);
}

#[test]
fn decay_rays_of_gaussian_weighted_product() {
    let scans = decay_ray_scan(&gaussian_weighted(), 10.0, 100.0, 41).unwrap();
    let ray = scans.iter().find(|s| (s.theta - PI / 8.0).abs() < 1e-12).expect("θ = π/8 scanned");
    assert!(ray.flagged && (ray.exponent - 2.0).abs() < 0.1, "{ray:?}");
    assert!(matches!(
        decay_ray_scan(&fam(FamilyId::CosSqrt), 10.0, 100.0, 11),
        Err(Error::NoCandidates(_))
    ));
}

#[test]
fn genus_and_order_are_consistent_on_builtin_families() {
    for (name, id) in builtin_families() {
        let f = fam(id);
        let r_max = if matches!(id, FamilyId::GenusPower { .. }) { 1e5 } else { 1e8 };
        let o = order(&f, 1e2, r_max);
        let g = compute_genus(&f).unwrap().genus as f64;
        assert!(g <= o + 1.1 && g >= o - 1.1, "{name}: genus {g}, order {o}");
    }
}
