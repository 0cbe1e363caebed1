use std::f64::consts::{LN_2, PI};

use minmodlab_core::families::{make_family, FamilyId};
use minmodlab_core::format::{from_text, to_text};
use minmodlab_core::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

const TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single_zero(a: f64) -> EntireFunctionSpec {
    EntireFunctionSpec::from_zeros(ZeroSequence::finite(vec![ZeroEntry::new(a, 1).unwrap()])).unwrap()
}

fn hardy(sigma: f64) -> EntireFunctionSpec {
    make_family(FamilyId::Hardy { sigma }).unwrap()
}

fn cos_sqrt() -> EntireFunctionSpec {
    make_family(FamilyId::CosSqrt).unwrap()
}

#[test]
fn primary_factor_examples() {
    let v = primary_factor_log(c(0.5, 0.0), 0);
    assert!((v.log_modulus - 0.5f64.ln()).abs() < 1e-15);
    assert_eq!(v.argument, 0.0);

    for m in 0..6 {
        let v = primary_factor_log(c(0.0, 0.0), m);
        assert_eq!((v.log_modulus, v.argument), (0.0, 0.0));
    }

    let v = primary_factor_log(c(0.0, 2.0), 2);
    assert!((v.log_modulus - (-2.0 + 0.5 * 5f64.ln())).abs() < 1e-12);
    assert!((v.argument - (2.0 + (-2f64).atan())).abs() < 1e-12);

    assert!(primary_factor_log(c(1.0, 0.0), 3).is_zero());
}

#[test]
fn eval_log_examples() {
    let v = eval_log(&single_zero(1.0), c(3.0, 0.0), TOL).unwrap();
    assert!((v.log_modulus - LN_2).abs() < 1e-12);
    assert!((v.argument - PI).abs() < 1e-12);

    let v = eval_log(&cos_sqrt(), c(-4.0, 0.0), TOL).unwrap();
    assert!((v.log_modulus - 2f64.cosh().ln()).abs() < TOL + 1e-12);

    let v = eval_log(&hardy(2.0), c(0.25, 0.0), TOL).unwrap();
    assert!((v.log_modulus - (2.0 / PI).ln()).abs() < TOL + 1e-12);
}

#[test]
fn eval_at_a_zero_is_the_sentinel() {
    assert!(eval_log(&hardy(2.0), c(4.0, 0.0), TOL).unwrap().is_zero());
    let a2 = (1.5 * PI).powi(2);
    assert!(eval_log(&cos_sqrt(), c(a2, 0.0), TOL).unwrap().is_zero());
}

#[test]
fn finite_list_has_no_tail() {
    let f = EntireFunctionSpec::from_zeros(ZeroSequence::finite(vec![
        ZeroEntry::new(1.0, 1).unwrap(),
        ZeroEntry::new(-3.0, 2).unwrap(),
    ]))
    .unwrap();
    assert_eq!(tail_bound(&f, 100.0, 2).unwrap(), 0.0);
    assert!(matches!(tail_bound(&f, 100.0, 0), Err(Error::CutoffTooSmall { .. })));
}

#[test]
fn cos_sqrt_tail_bound_dominates_brute_force() {
    let f = cos_sqrt();
    let r = 10.0;
    let bound = tail_bound(&f, r, 2).unwrap();
    // first omitted zero is a_3 = (2.5π)² ≈ 61.685
    let brute: f64 = (3..10_000 + 3)
        .map(|k| (-r / ((k as f64 - 0.5) * PI).powi(2)).ln_1p())
        .sum::<f64>()
        .abs();
    assert!(brute > 0.2 && bound >= brute, "bound {bound} brute {brute}");
}

#[test]
fn construction_tail_bound_at_first_radius() {
    let f = make_family(FamilyId::Constructed { rho: 0.5 }).unwrap();
    let r1 = 432.0;
    let bound = tail_bound(&f, r1, 2).unwrap();
    // a_k = 144^k, m_k = 12^k - 12^{k-1}
    let direct: f64 = (3..=7)
        .map(|k| {
            let a = 144f64.powi(k);
            let m = 12f64.powi(k) - 12f64.powi(k - 1);
            m * (-r1 / a).ln_1p().abs()
        })
        .sum();
    assert!((direct - 0.250).abs() < 5e-3, "direct {direct}");
    assert!(bound >= direct);
}

#[test]
fn square_substitution_examples() {
    let g = hardy(2.0).square_substitute().unwrap();
    assert_eq!(g.genus(), 1);
    assert!(g.zeros.is_symmetric());
    // sin(πz)/(πz)
    let z = c(0.3, 0.4);
    let want = ((PI * z).sin() / (PI * z)).norm().ln();
    assert!((eval_log(&g, z, TOL).unwrap().log_modulus - want).abs() < 1e-9);

    match single_zero(4.0).square_substitute().unwrap().zeros {
        ZeroSequence::Finite(e) => assert_eq!(e.iter().map(|z| z.location).collect::<Vec<_>>(), [-2.0, 2.0]),
        other => panic!("unexpected zeros {other:?}"),
    }

    let g = cos_sqrt().square_substitute().unwrap();
    let v = eval_log(&g, c(1.0, 0.0), TOL).unwrap();
    assert!((v.log_modulus - 1f64.cos().ln()).abs() < 1e-9);

    assert!(matches!(single_zero(-2.0).square_substitute(), Err(Error::MixedSignZeros(_))));
}

#[test]
fn laguerre_polya_examples() {
    assert!(cos_sqrt().is_laguerre_polya());
    let mut f = cos_sqrt();
    f.factor_index = 2;
    assert!(!f.is_laguerre_polya());
    let mut f = cos_sqrt();
    f.exponent_poly = RealPolynomial::new(vec![0.0, 0.0, 1.0]).unwrap();
    assert!(!f.is_laguerre_polya());
}

#[test]
fn closed_forms_agree_at_random_points() {
    let mut rng = StdRng::seed_from_u64(7);
    let specs = [cos_sqrt(), hardy(2.0), make_family(FamilyId::ZCosSqrt).unwrap()];
    let mut checked = [0; 3];
    while checked.iter().any(|&n| n < 100) {
        let r = 1e3 * rng.random::<f64>().sqrt();
        let z = Complex64::from_polar(r, rng.random_range(-PI..PI));
        let w = z.sqrt();
        let forms = [
            w.cos().norm().ln(),
            ((PI * w).sin() / (PI * w)).norm().ln(),
            LN_2 + z.norm().ln() + w.cos().norm().ln(),
        ];
        // stay away from zeros, where the log modulus is ill-conditioned
        if (w.cos().norm() < 1e-3) || (PI * w).sin().norm() < 1e-3 {
            continue;
        }
        for (i, f) in specs.iter().enumerate() {
            let got = eval_log(f, z, TOL).unwrap().log_modulus;
            let allowed = TOL + 1e-8 * forms[i].abs().max(1.0);
            assert!((got - forms[i]).abs() <= allowed, "spec {i} at {z}: {got} vs {}", forms[i]);
            checked[i] += 1;
        }
    }
}

#[test]
fn truncation_error_within_tail_bound() {
    let f = cos_sqrt();
    for (r, k) in [(5.0, 2u64), (20.0, 4), (200.0, 8), (1000.0, 16)] {
        let bound = tail_bound(&f, r, k).unwrap();
        for i in 0..16 {
            let z = Complex64::from_polar(r, PI * i as f64 / 15.0);
            let a = eval_log_truncated(&f, z, k).log_modulus;
            let b = eval_log_truncated(&f, z, 2 * k).log_modulus;
            assert!((a - b).abs() < bound, "r {r} k {k}: {} vs bound {bound}", (a - b).abs());
        }
    }
}

#[test]
fn square_substitution_genus_for_power_laws() {
    // zeros k^s become ±k^{s/2}; Σ k^{-(m+1)s/2} < ∞ iff m + 1 > 2/s
    for s in [0.6, 0.8, 1.5, 2.0, 2.5, 3.0, 4.5] {
        let f = EntireFunctionSpec::from_zeros(ZeroSequence::PowerLaw(PowerLaw::simple(1.0, s))).unwrap();
        let g = f.square_substitute().unwrap();
        let predicted = (2.0 / s).floor() as u32;
        assert_eq!(g.genus(), predicted, "s = {s}");
        assert_eq!(g.zeros.minimal_factor_index().unwrap(), predicted);
    }
}

fn arb_spec() -> impl Strategy<Value = EntireFunctionSpec> {
    let finite = prop::collection::vec(((-500i32..500).prop_filter("nonzero", |v| *v != 0), 1u64..4), 0..6)
        .prop_map(|zs| {
            ZeroSequence::finite(
                zs.into_iter()
                    .map(|(v, m)| ZeroEntry::new(v as f64 / 8.0, m).unwrap())
                    .collect(),
            )
        });
    let power = (1u32..40, 11u32..40, any::<bool>()).prop_map(|(scale, exp, symmetric)| {
        ZeroSequence::PowerLaw(PowerLaw {
            symmetric,
            ..PowerLaw::simple(scale as f64 / 4.0, exp as f64 / 10.0)
        })
    });
    (
        prop_oneof![finite, power],
        0u32..3,
        prop::collection::vec(-40i32..40, 0..3),
    )
        .prop_map(|(zeros, n, q)| {
            let poly = RealPolynomial::new(q.into_iter().map(|b| b as f64 / 16.0).collect()).unwrap();
            let m = zeros.minimal_factor_index().unwrap();
            EntireFunctionSpec::new(n, poly, zeros, m, None).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(spec in arb_spec()) {
        let text = to_text(&spec);
        prop_assert_eq!(from_text(&text).unwrap(), spec);
    }

    #[test]
    fn conjugate_symmetry(spec in arb_spec(), r in 0.1f64..200.0, theta in 0.01f64..3.13) {
        let up = eval_log(&spec, Complex64::from_polar(r, theta), TOL).unwrap();
        let down = eval_log(&spec, Complex64::from_polar(r, -theta), TOL).unwrap();
        if up.is_zero() || down.is_zero() {
            prop_assert!(up.is_zero() && down.is_zero());
        } else {
            prop_assert!((up.log_modulus - down.log_modulus).abs() <= 2.0 * TOL + 1e-10);
        }
    }
}
