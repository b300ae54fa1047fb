use std::f64::consts::PI;

use proptest::prelude::*;
use roughflow::osgood::*;

fn power(theta: f64) -> ModulusSpec {
    ModulusSpec::Power { theta }
}

#[test]
fn power_moduli_diverge_exactly_from_theta_one() {
    for (theta, divergent) in [(0.5, false), (0.9, false), (1.0, true), (1.1, true)] {
        let r = osgood_classify(&power(theta), &default_delta_list()).unwrap();
        let expected = if divergent { OsgoodVerdict::Divergent } else { OsgoodVerdict::Convergent };
        assert_eq!(r.verdict, expected, "theta = {theta}");
    }
}

#[test]
fn integrals_match_closed_forms() {
    let deltas = default_delta_list();
    let sqrt = osgood_classify(&power(0.5), &deltas).unwrap();
    for (d, i) in deltas.iter().zip(&sqrt.integrals) {
        assert!((i - 2.0 * (1.0 - d.sqrt())).abs() < 1e-10, "{d} {i}");
    }
    let lip = osgood_classify(&power(1.0), &deltas).unwrap();
    for (d, i) in deltas.iter().zip(&lip.integrals) {
        assert!((i + d.ln()).abs() < 1e-9 * (1.0 - d.ln()), "{d} {i}");
    }
    let fit = lip.fit.unwrap();
    assert_eq!(fit.law, GrowthLaw::Log);
    assert!((fit.c - 1.0).abs() < 1e-6);
}

#[test]
fn log_lipschitz_modulus_diverges_like_log_log() {
    let deltas = default_delta_list();
    let r = osgood_classify(&ModulusSpec::LogLipschitz, &deltas).unwrap();
    assert_eq!(r.verdict, OsgoodVerdict::Divergent);
    assert_eq!(r.fit.unwrap().law, GrowthLaw::LogLog);
    // ∫ dt / (t (1 + log 1/t)) = log(1 + log 1/δ)
    for (d, i) in deltas.iter().zip(&r.integrals) {
        assert!((i - (1.0 - d.ln()).ln()).abs() < 1e-9, "{d} {i}");
    }
}

#[test]
fn steep_power_moduli_fit_the_power_law() {
    for theta in [1.3, 2.0] {
        let r = osgood_classify(&power(theta), &default_delta_list()).unwrap();
        assert_eq!(r.verdict, OsgoodVerdict::Divergent);
        let fit = r.fit.unwrap();
        assert_eq!(fit.law, GrowthLaw::Power);
        assert!((fit.kappa - (theta - 1.0)).abs() < 1e-6, "{fit:?}");
    }
}

#[test]
fn table_modulus_reproduces_its_power_law() {
    let t: Vec<f64> = vec![1e-3, 1e-2, 1e-1, 1.0];
    let omega: Vec<f64> = t.iter().map(|x: &f64| x.sqrt()).collect();
    let r = osgood_classify(&ModulusSpec::Table { t, omega }, &default_delta_list()).unwrap();
    assert_eq!(r.verdict, OsgoodVerdict::Convergent);
    assert!((r.integrals.last().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(osgood_classify(&power(-1.0), &default_delta_list()).is_err());
    assert!(osgood_classify(&power(1.0), &[0.1, 0.01, 1e-3, 1e-4]).is_err());
    assert!(osgood_classify(&power(1.0), &[0.1, 0.2, 1e-9, 1e-10]).is_err());
    let bad = ModulusSpec::Table { t: vec![0.1, 1.0], omega: vec![0.0, 1.0] };
    assert!(osgood_classify(&bad, &default_delta_list()).is_err());
    assert!(weierstrass_modulus(20, &[0.3]).is_err());
    assert!(weierstrass_modulus(10, &[2f64.powi(-12)]).is_err());
    assert!(lacunary_l1_growth(&[1, 21], 0).is_err());
    assert!(dilation_identity_defect(20, 3).is_err());
}

#[test]
fn dilation_identity_is_exact() {
    assert_eq!(dilation_identity_defect(8, 0).unwrap(), 0.0);
    assert!(dilation_identity_defect(8, 1).unwrap() < 1e-12);
    assert!(dilation_identity_defect(4, 3).unwrap() < 1e-12);
    // sums long enough that the two sample counts differ
    assert!(dilation_identity_defect(16, 1).unwrap() < 1e-12);
    assert!(dilation_identity_defect(15, 4).unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn dilation_identity_holds_for_admissible_sizes(k in 1u32..12, m in 0u32..6) {
        prop_assert!(dilation_identity_defect(k, m).unwrap() < 1e-12);
    }
}

#[test]
fn lacunary_norms_match_exact_values_and_grow_logarithmically() {
    let r = lacunary_l1_growth(&[1, 2, 4, 8, 16, 20], 2).unwrap();
    assert!((r.rows[0].l1_norm - 1.0).abs() < 1e-12);
    assert!((r.rows[1].l1_norm - 4.0 / PI).abs() < 1e-6);
    assert!(r.rows.windows(2).all(|w| w[1].l1_norm > w[0].l1_norm));
    assert!(r.bounds_hold);
    assert!(r.c > 0.0 && r.relative_residual < 0.1, "{r:?}");
    assert!(r.dilation_l1_gap < 1e-6);
}

#[test]
fn single_mode_norm_is_independent_of_sampling() {
    let one = LacunarySum::new(1).unwrap();
    assert_eq!(one.samples.len(), 1 << MIN_SAMPLES_LOG2);
    assert!((one.l1_norm() - 1.0).abs() < 1e-14);
}

#[test]
fn weierstrass_modulus_is_h_log_h() {
    let r = weierstrass_modulus(20, &dyadic_range(6, 18)).unwrap();
    assert_eq!(r.rows.len(), 13);
    assert!(r.relative_rms_residual < 0.15, "{r:?}");
    assert!(r.ratio_spread < 2.0, "{r:?}");
    for w in r.rows.windows(2) {
        // rows run from coarse to fine: S(2h) <= 2 S(h)
        assert!(w[0].sup_difference <= 2.0 * w[1].sup_difference + 1e-9);
    }
}

#[test]
fn weierstrass_constant_is_stable_in_truncation() {
    let cs: Vec<f64> = [16, 18, 20].iter().map(|&k| weierstrass_modulus(k, &dyadic_range(6, 14)).unwrap().c).collect();
    let (lo, hi) = cs.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &c| (lo.min(c), hi.max(c)));
    assert!(hi / lo < 1.1, "{cs:?}");
}

#[test]
fn weierstrass_edge_cases() {
    assert!(weierstrass_sup_difference(12, 2.0 * PI).unwrap() < 1e-12);
    for h in [1e-3, 1e-2] {
        assert!((weierstrass_sup_difference(1, h).unwrap() - h.sin()).abs() < 1e-12);
    }
}
