use std::f64::consts::PI;

use minmodlab_core::families::{make_family, FamilyId};
use minmodlab_core::modulus::{
    circle_profile, circle_profile_log, max_log_modulus, tilde_min_log, write_summary_csv, ProfileOptions, TildeGrid,
};
use minmodlab_core::*;

const TOL: f64 = 1e-10;

fn one_minus_z() -> EntireFunctionSpec {
    EntireFunctionSpec::from_zeros(ZeroSequence::finite(vec![ZeroEntry::new(1.0, 1).unwrap()])).unwrap()
}

fn fam(id: FamilyId) -> EntireFunctionSpec {
    make_family(id).unwrap()
}

/// `exp(-z²) Π (1 - z/k²)`: no axis shortcut applies.
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

fn genus_power() -> EntireFunctionSpec {
    fam(FamilyId::GenusPower { s: 0.4, symmetric: true })
}

#[test]
fn linear_factor_extremes() {
    let p = circle_profile(&one_minus_z(), 2.0, 256, 1e-6).unwrap();
    assert!((p.max_log - 3f64.ln()).abs() < 1e-9);
    assert!((p.argmax_theta - PI).abs() < 1e-5);
    assert!(p.min_log.abs() < 1e-9);
    assert!(p.argmin_theta.abs() < 1e-5);
}

#[test]
fn cos_sqrt_unit_circle() {
    let p = circle_profile(&fam(FamilyId::CosSqrt), 1.0, 256, 1e-6).unwrap();
    assert!((p.min_log - 1f64.cos().ln()).abs() < 1e-9);
    assert_eq!(p.argmin_theta, 0.0);
    assert!((p.max_log - 1f64.cosh().ln()).abs() < 1e-9);
    assert!((p.argmax_theta - PI).abs() < 1e-9);
}

#[test]
fn zero_on_the_circle_gives_the_sentinel() {
    let p = circle_profile(&fam(FamilyId::Hardy { sigma: 2.0 }), 1.0, 256, 1e-6).unwrap();
    assert_eq!(p.min_log, f64::NEG_INFINITY);
    assert_eq!(p.argmin_theta, 0.0);
    // a negative zero shows up at θ = π
    let f = EntireFunctionSpec::from_zeros(ZeroSequence::finite(vec![ZeroEntry::new(-3.0, 1).unwrap()])).unwrap();
    let p = circle_profile(&f, 3.0, 128, 1e-6).unwrap();
    assert_eq!(p.min_log, f64::NEG_INFINITY);
    assert_eq!(p.argmin_theta, PI);
}

#[test]
fn tilde_examples() {
    let grid = TildeGrid::default();
    assert!(tilde_min_log(&fam(FamilyId::CosSqrt), 100.0, grid).unwrap() <= 1e-12);
    assert!(tilde_min_log(&fam(FamilyId::ZCosSqrt), 1e4, grid).unwrap() > 1e4f64.ln());
    let v = tilde_min_log(&one_minus_z(), 10.0, grid).unwrap();
    assert!((v - 9f64.ln()).abs() < 1e-9, "{v}");
}

#[test]
fn profiles_envelope_every_sample() {
    let extra: Vec<f64> = (0..97).map(|i| 2.0 * PI * i as f64 / 97.0 - PI).collect();
    for (f, r) in [
        (gaussian_weighted(), 7.3),
        (genus_power(), 40.0),
        (fam(FamilyId::CosSqrt), 55.0),
        (fam(FamilyId::Lindelof { alpha: 1.5 }), 300.0),
    ] {
        let p = circle_profile(&f, r, 256, 1e-6).unwrap();
        assert!(p.min_log <= p.max_log);
        let tol = 1e-8 * p.max_log.abs().max(1.0);
        for &(_, v) in &p.samples {
            assert!(v >= p.min_log - tol && v <= p.max_log + tol);
        }
        for &t in &extra {
            let v = eval_log(&f, Complex64::from_polar(r, t), TOL).unwrap().log_modulus;
            assert!(v >= p.min_log - tol && v <= p.max_log + tol, "r {r} θ {t}: {v} vs {p:?}");
        }
    }
}

#[test]
fn tilde_is_nondecreasing() {
    let grid = TildeGrid::default();
    for f in [fam(FamilyId::ZCosSqrt), gaussian_weighted(), fam(FamilyId::Hardy { sigma: 4.0 / 3.0 })] {
        let mut prev = f64::NEG_INFINITY;
        for r in [2.0, 5.0, 20.0, 80.0, 300.0] {
            let v = tilde_min_log(&f, r, grid).unwrap();
            assert!(v >= prev - 1e-9, "r {r}: {v} < {prev}");
            prev = v;
        }
    }
}

#[test]
fn max_modulus_is_log_convex_in_powers() {
    let opts = ProfileOptions::default();
    let specs = [
        fam(FamilyId::CosSqrt),
        fam(FamilyId::Hardy { sigma: 2.0 }),
        fam(FamilyId::Constructed { rho: 0.5 }),
    ];
    for f in &specs {
        for log_r in [2.0, 3.0, 4.0, 5.0, 6.0].map(|d: f64| d * 10f64.ln()) {
            let (base, _) = max_log_modulus(f, log_r, &opts).unwrap();
            for c in [1.5, 2.0, 3.0] {
                let (big, _) = max_log_modulus(f, c * log_r, &opts).unwrap();
                assert!(big >= c * base - 1e-9 * big.abs(), "log r {log_r} c {c}: {big} < {c}·{base}");
            }
        }
    }
}

#[test]
fn positive_zero_extremes_match_brute_force_search() {
    let opts = ProfileOptions {
        n_samples: 64,
        ..ProfileOptions::default()
    };
    for f in [fam(FamilyId::Hardy { sigma: 4.0 / 3.0 }), fam(FamilyId::CosSqrt)] {
        for r in [3.7, 42.0, 1234.5] {
            let p = circle_profile_log(&f, f64::ln(r), &opts).unwrap();
            let on_axis = |z: f64| eval_log(&f, Complex64::new(z, 0.0), TOL).unwrap().log_modulus;
            assert!((p.max_log - on_axis(-r)).abs() < 1e-9);
            assert!((p.min_log - on_axis(r)).abs() < 1e-9);
            for i in 0..=2000 {
                let t = PI * i as f64 / 2000.0;
                let v = eval_log(&f, Complex64::from_polar(r, t), TOL).unwrap().log_modulus;
                let tol = 1e-9 * v.abs().max(1.0);
                assert!(v <= p.max_log + tol && v >= p.min_log - tol);
            }
        }
    }
}

#[test]
fn summary_csv_columns() {
    let profiles: Vec<_> = [1.0, 4.0]
        .iter()
        .map(|&r| circle_profile(&fam(FamilyId::CosSqrt), r, 64, 1e-6).unwrap())
        .collect();
    let mut out = Vec::new();
    write_summary_csv(&profiles, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,min_log,argmin,max_log,argmax"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - 1f64.cos().ln()).abs() < 1e-9);
    assert_eq!(text.lines().count(), 3);
}
