use std::f64::consts::{LN_2, PI};

use minmodlab_core::families::*;
use minmodlab_core::*;

fn exact(v: &Option<impl ToString>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

#[test]
fn registry_names_resolve() {
    let names: Vec<&str> = family_registry().iter().map(|b| b.name()).collect();
    let mut unique = names.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), names.len());
    for n in &names {
        assert_eq!(find_family(n).unwrap().name(), *n);
    }
    let p = FamilyParams {
        sigma: Some(2.0),
        ..FamilyParams::default()
    };
    assert_eq!(find_family("hardy").unwrap().id(&p).unwrap(), FamilyId::Hardy { sigma: 2.0 });
    assert!(find_family("hardy").unwrap().id(&FamilyParams::default()).is_err());
    assert!(find_family("no-such-family").is_none());
}

#[test]
fn parameters_out_of_range() {
    for id in [
        FamilyId::Hardy { sigma: 0.5 },
        FamilyId::Lindelof { alpha: 2.0 },
        FamilyId::Constructed { rho: 1.0 },
        FamilyId::GenusPower { s: 1.5, symmetric: false },
    ] {
        assert!(matches!(make_family(id), Err(Error::ParameterOutOfRange(_))), "{id:?}");
    }
}

#[test]
fn closed_form_tags() {
    assert_eq!(make_family(FamilyId::CosSqrt).unwrap().closed_form, Some(ClosedForm::CosSqrt));
    assert_eq!(make_family(FamilyId::ZCosSqrt).unwrap().closed_form, Some(ClosedForm::TwoZCosSqrt));
    assert_eq!(
        make_family(FamilyId::Hardy { sigma: 2.0 }).unwrap().closed_form,
        Some(ClosedForm::SinePiSqrt)
    );
    assert_eq!(make_family(FamilyId::Hardy { sigma: 1.5 }).unwrap().closed_form, None);
    assert_eq!(make_family(FamilyId::CosSqrt).unwrap().genus(), 0);
}

#[test]
fn lindelof_product_starts_at_two() {
    let f = make_family(FamilyId::Lindelof { alpha: 1.5 }).unwrap();
    // first factor 1 - z/(2 (ln 2)^1.5)
    let a2 = 2.0 * LN_2.powf(1.5);
    assert!(eval_log(&f, Complex64::new(a2, 0.0), 1e-10).unwrap().is_zero());
}

#[test]
fn construction_half_is_geometric() {
    let data = build_construction51(ConstructionVariant::Rho { rho: 0.5 }, 6).unwrap();
    let a: Vec<String> = data.zeros.iter().map(|z| exact(&z.exact_a)).collect();
    let m: Vec<String> = data.zeros.iter().map(|z| exact(&z.mult_exact)).collect();
    assert_eq!(&a[..3], ["144", "20736", "2985984"]);
    assert_eq!(&m[..3], ["12", "132", "1584"]);
    for w in data.zeros.windows(2) {
        assert!((w[1].log_a - w[0].log_a - 144f64.ln()).abs() < 1e-9);
    }
    let mut power = 144u128;
    for z in &data.zeros {
        assert_eq!(exact(&z.exact_a), power.to_string());
        power *= 144;
    }
}

#[test]
fn construction_first_terms() {
    let d = build_construction51(ConstructionVariant::Order1, 3).unwrap();
    assert_eq!((exact(&d.zeros[0].exact_a), exact(&d.zeros[0].mult_exact)), ("12".into(), "1".into()));
    assert_eq!((exact(&d.zeros[1].exact_a), exact(&d.zeros[1].mult_exact)), ("20736".into(), "143".into()));

    let d = build_construction51(ConstructionVariant::Rho { rho: 0.75 }, 3).unwrap();
    assert_eq!((exact(&d.zeros[0].exact_a), exact(&d.zeros[0].mult_exact)), ("20736".into(), "1728".into()));

    assert!(build_construction51(ConstructionVariant::Rho { rho: 0.4 }, 3).is_err());
    assert!(build_construction51(ConstructionVariant::Rho { rho: 0.5 }, 1).is_err());
    assert!(build_construction51_exploratory(0.4, 3).is_ok());
}

/// `Σ_j m_j ln|1 - r/a_j|` and `Σ_{j>k} m_j r/a_j` for `a_j = 144^j`,
/// `m_1 = 12`, `m_j = 12^j - 12^{j-1}`, summed until the terms vanish.
fn half_direct(k: i32) -> (f64, f64) {
    let r = 3.0 * 144f64.powi(k);
    let (mut log_m, mut tail) = (0.0, 0.0);
    for j in 1..60 {
        let a = 144f64.powi(j);
        let m = if j == 1 { 12.0 } else { 12f64.powi(j) - 12f64.powi(j - 1) };
        if j > k {
            log_m += m * (-r / a).ln_1p();
            tail += m * r / a;
        } else {
            log_m += m * (r / a - 1.0).ln();
        }
    }
    (log_m, tail)
}

#[test]
fn construction_half_checks() {
    let data = build_construction51(ConstructionVariant::Rho { rho: 0.5 }, 5).unwrap();
    let checks = verify_construction51(&data, 1..=4).unwrap();

    // k = 1: the tail is the geometric series 396 Σ_{j>=2} 12^{-j} = 3;
    // stopping at j = 3 gives 2.98
    let c1 = &checks[0];
    let (log_m1, tail1) = half_direct(1);
    assert!((c1.tail_sum - 3.0).abs() < 1e-9 && (tail1 - 3.0).abs() < 1e-9);
    assert!(!c1.tail_at_most_half);
    assert!((c1.log_min_modulus - log_m1).abs() < 1e-9, "{} vs {log_m1}", c1.log_min_modulus);
    assert!((c1.log_min_modulus - 5.29).abs() < 0.01);
    assert!((c1.claimed_lower_bound - 11.0 * LN_2).abs() < 1e-12);
    assert!(!c1.bound_holds);

    // k = 2: 12 ln 431 + 132 ln 2 + tail
    let c2 = &checks[1];
    let (log_m2, _) = half_direct(2);
    assert!((c2.log_min_modulus - log_m2).abs() < 1e-9);
    assert!((c2.log_min_modulus - 127.93).abs() < 0.05, "{}", c2.log_min_modulus);
    assert!((c2.claimed_lower_bound - 143.0 * LN_2).abs() < 1e-12);
    assert!(c2.bound_holds && c2.exceeds_next_radius);
    assert!((c2.log_r_next - 16.01).abs() < 0.01);

    for c in &checks[1..] {
        assert!(c.bound_holds && c.exceeds_next_radius, "k = {}", c.k);
        assert!(c.bound_margin > 0.0);
        // the tail sum is 3 · 12^{k-1}, never below 1/2
        assert!((c.tail_sum / (3.0 * 12f64.powi(c.k as i32 - 1)) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn construction_order1_first_radius() {
    let data = build_construction51(ConstructionVariant::Order1, 4).unwrap();
    let c = &verify_construction51(&data, 1..=1).unwrap()[0];
    // m_2 r_1/a_2 = 143·36/20736 ≈ 0.248 dominates the tail
    assert!((c.tail_sum - 0.25).abs() < 0.01 && c.tail_at_most_half);
    assert!((c.log_min_modulus.exp() - 1.56).abs() < 0.01);
    assert!(c.log_min_modulus >= c.claimed_lower_bound && c.bound_holds);
}

#[test]
fn construction_three_quarters_holds_from_two() {
    let data = build_construction51(ConstructionVariant::Rho { rho: 0.75 }, 4).unwrap();
    let checks = verify_construction51(&data, 1..=3).unwrap();
    assert!(!checks[0].bound_holds && checks[0].exceeds_next_radius);
    for c in &checks[1..] {
        assert!(c.bound_holds && c.exceeds_next_radius, "k = {}: {c:?}", c.k);
    }
}

#[test]
fn library_minimum_modulus_matches_the_direct_sum() {
    let data = build_construction51(ConstructionVariant::Rho { rho: 0.5 }, 5).unwrap();
    let spec = make_family(FamilyId::Constructed { rho: 0.5 }).unwrap();
    for c in verify_construction51(&data, 1..=4).unwrap() {
        let log_rk = data.log_r[c.k as usize - 1];
        let diff = construction_consistency(&spec, &c, log_rk).unwrap();
        assert!(diff.abs() < 1e-8 * c.log_min_modulus.abs().max(1.0), "k = {}: {diff}", c.k);
    }
}

#[test]
fn exploratory_constructions_carry_no_verdicts() {
    let data = build_construction51_exploratory(0.3, 3).unwrap();
    assert!(data.exploratory);
    assert!(verify_construction51(&data, 1..=1).is_err());
}

#[test]
fn hardy_asymptotic_improves_with_radius() {
    let sigma = 4.0 / 3.0;
    let f = make_family(FamilyId::Hardy { sigma }).unwrap();
    // r^{3/4} halfway between integers keeps sin(π r^ρ) away from zero
    let gap = |n: f64| {
        let r = n.powf(sigma);
        let z = Complex64::new(r, 0.0);
        let exact = eval_log(&f, z, 1e-10).unwrap().log_modulus;
        ((hardy_asymptotic_log(sigma, z).unwrap() - exact) / exact).abs()
    };
    let (near, far) = (gap(31.5), gap(1000.5));
    assert!(far < near, "{near} vs {far}");
}

#[test]
fn hardy_asymptotic_decays_along_midpoints() {
    let sigma = 4.0 / 3.0;
    assert!(((PI * 0.75).cos() / (PI * 0.75).sin() + 1.0).abs() < 1e-12);
    let vals: Vec<f64> = [10.5, 100.5, 1000.5, 10000.5]
        .iter()
        .map(|n: &f64| hardy_asymptotic_log(sigma, Complex64::new(n.powf(sigma), 0.0)).unwrap())
        .collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    assert!(*vals.last().unwrap() < -1e4);
    // r^ρ an integer: the sine vanishes
    let at_zero = hardy_asymptotic_log(sigma, Complex64::new(8f64.powf(sigma), 0.0)).unwrap();
    assert!(at_zero == f64::NEG_INFINITY || at_zero < -30.0, "{at_zero}");
}

#[test]
fn lindelof_is_small_on_the_diagonal() {
    let alpha = 1.5;
    let f = make_family(FamilyId::Lindelof { alpha }).unwrap();
    let z = Complex64::from_polar(1e4, PI / 4.0);
    assert!(lindelof_asymptotic_log(alpha, z).unwrap() < 0.0);
    for r in [1e3, 3e3, 1e4, 3e4, 1e5] {
        let v = eval_log(&f, Complex64::from_polar(r, PI / 4.0), 1e-10).unwrap().log_modulus;
        assert!(v < 0.0, "r {r}: {v}");
    }
}
