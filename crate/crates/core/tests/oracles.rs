//! Monte-Carlo estimators checked against deterministic quadrature.

use std::f64::consts::PI;

use tabkit_core::classifiers::PlugInRule;
use tabkit_core::evaluate::accuracy;
use tabkit_core::knn::KnnRegressor;
use tabkit_core::model::{bayes_rule, ConstantRule, DecisionRule, FnRule, Origin, ProblemParams, Scenario};
use tabkit_core::quantities::*;
use tabkit_core::scalar::sigmoid;
use tabkit_core::scenarios::{sample, scenario_signal, ScenarioSpec};

/// Midpoint rule over the unit square.
fn square_quadrature(m: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let h = 1.0 / m as f64;
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            acc += f(&[(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]);
        }
    }
    acc * h * h
}

/// Midpoint rule for `E[g(Z)]`, `Z` standard normal, on `[-12, 12]`.
fn normal_expectation(m: usize, g: impl Fn(f64) -> f64) -> f64 {
    let (a, b) = (-12.0, 12.0);
    let h = (b - a) / m as f64;
    (0..m)
        .map(|i| {
            let z = a + (i as f64 + 0.5) * h;
            g(z) * (-0.5 * z * z).exp()
        })
        .sum::<f64>()
        * h
        / (2.0 * PI).sqrt()
}

#[test]
fn constant_rule_excess_risk_matches_quadrature() {
    let sc = ScenarioSpec::band_like(1.0, 0.0).unwrap();
    let quad = square_quadrature(1500, |x| {
        let e = sc.eta_q(x);
        if e < 0.5 {
            2.0 * (0.5 - e)
        } else {
            0.0
        }
    });
    assert!((quad - 0.2 / PI).abs() < 1e-5, "quadrature {quad}");
    assert!((quad - 0.0637).abs() < 1e-4);
    let mc = excess_risk_mc(&ConstantRule(1), &sc, 200_000, 3).unwrap();
    assert!(mc.covers(quad, 3.0), "{mc:?} vs {quad}");
}

#[test]
fn band_ambiguity_matches_quadrature_and_bound() {
    let sc = ScenarioSpec::band_like(1.0, 0.3).unwrap();
    let (z, c_gamma) = (0.1, 0.5);
    let quad = square_quadrature(1500, |x| {
        let m = (sc.eta_q(x) - 0.5).abs();
        if m <= z && scenario_signal(&sc, x) <= c_gamma * m {
            m
        } else {
            0.0
        }
    });
    let mc = ambiguity_level_mc(&sc, z, 1.0, c_gamma, 200_000, 5).unwrap();
    assert!(mc.covers(quad, 3.0) || (mc.estimate - quad).abs() < 1e-4, "{mc:?} vs {quad}");
    let params = ProblemParams::new(1.0, 10.0, 1.0, 1.0, 1.0, 2).unwrap();
    let bound = ambiguity_bound_bandlike(z, 0.3, &params).unwrap();
    assert!(quad <= bound, "{quad} > {bound}");
}

#[test]
fn ambiguity_is_monotone_in_z_and_zero_at_zero() {
    let sc = ScenarioSpec::band_like(1.0, 0.2).unwrap();
    let mut prev = 0.0;
    for (i, z) in [0.0, 0.02, 0.05, 0.1, 0.2, 0.5].into_iter().enumerate() {
        // common random numbers make the sequence exactly monotone
        let e = ambiguity_level_mc(&sc, z, 1.0, 0.5, 20_000, 9).unwrap();
        if i == 0 {
            assert_eq!(e.estimate, 0.0);
        }
        assert!(e.estimate >= prev);
        prev = e.estimate;
    }
    assert!(ambiguity_level_mc(&sc, 0.6, 1.0, 0.5, 10, 9).is_err());
}

#[test]
fn perfect_source_has_zero_ambiguity() {
    let sc = ScenarioSpec::band_like(1.0, 0.0).unwrap();
    for z in [0.05, 0.2, 0.5] {
        let e = ambiguity_level_mc(&sc, z, 1.0, 1.0, 20_000, 2).unwrap();
        assert!(e.covers(0.0, 3.0));
    }
}

#[test]
fn source_excess_risk_of_constant_rule() {
    let sc = ScenarioSpec::band_like(1.0, 0.0).unwrap();
    let quad = square_quadrature(1500, |x| {
        let e = sc.eta_p(x);
        if e < 0.5 {
            0.5 - e
        } else {
            0.0
        }
    });
    assert!((quad - 0.2 / PI).abs() < 1e-5);
    let mc = source_excess_risk_mc(&ConstantRule(1), &sc, 200_000, 4).unwrap();
    assert!(mc.covers(quad, 3.0), "{mc:?} vs {quad}");
}

#[test]
fn signal_transfer_risk_is_half_excess_risk_for_perfect_source() {
    let sc = ScenarioSpec::band_like(1.0, 0.0).unwrap();
    let rule = ConstantRule(1);
    let xi = signal_transfer_risk_mc(&rule, &sc, 1.0, 1.0, 100_000, 6).unwrap();
    let er = excess_risk_mc(&rule, &sc, 100_000, 6).unwrap();
    // same draws: every misclassified point lies in the strong-signal set
    assert!((xi.estimate - 0.5 * er.estimate).abs() < 1e-12);
    let sc = ScenarioSpec::band_like(1.0, 0.3).unwrap();
    let xi = signal_transfer_risk_mc(&rule, &sc, 1.0, 1.0, 100_000, 6).unwrap();
    let er = excess_risk_mc(&rule, &sc, 100_000, 6).unwrap();
    assert!(xi.estimate <= 0.5 * er.estimate + 3.0 * er.std_error);
}

#[test]
fn risk_difference_agrees_with_dual_form() {
    let sc = ScenarioSpec::flipped_sine(1.0, 0.3).unwrap();
    let dp = sample(&sc, Origin::Source, 800, 12).unwrap();
    let rule = PlugInRule(KnnRegressor::fit(&dp, 21).unwrap());
    let a = excess_risk_mc(&rule, &sc, 60_000, 1).unwrap();
    let b = risk_difference_mc(&rule, &sc, 60_000, 2).unwrap();
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.estimate - b.estimate).abs() <= 3.0 * se, "{a:?} {b:?}");
    let bayes = bayes_rule(&sc);
    assert_eq!(excess_risk_mc(&bayes, &sc, 10_000, 1).unwrap().estimate, 0.0);
}

#[test]
fn flipped_disagreement_fraction_equals_ratio() {
    for r in [0.0, 0.15, 0.4] {
        let sc = ScenarioSpec::flipped_sine(1.0, r).unwrap();
        let e = bayes_disagreement_mc(&sc, 100_000, 8).unwrap();
        assert!(e.covers(r, 3.0) || (e.estimate - r).abs() < 1e-3, "r={r}: {e:?}");
    }
}

#[test]
fn sampled_labels_average_one_half() {
    let sc = ScenarioSpec::band_like(0.5, 0.2).unwrap();
    let n = 1_000_000;
    let s = sample(&sc, Origin::Target, n, 77).unwrap();
    let mean = s.labels().iter().map(|&y| f64::from(y)).sum::<f64>() / n as f64;
    assert!((mean - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt(), "{mean}");
}

#[test]
fn constant_rule_agrees_with_bayes_half_the_time() {
    let sc = ScenarioSpec::band_like(1.0, 0.0).unwrap();
    let e = bayes_agreement_mc(&ConstantRule(1), &sc, 100_000, 10).unwrap();
    assert!(e.covers(0.5, 3.0));
    let anti = FnRule(|x: &[f64]| u8::from(sc.eta_q(x) < 0.5));
    assert_eq!(bayes_agreement_mc(&anti, &sc, 1000, 1).unwrap().estimate, 0.0);
    assert_eq!(bayes_agreement_mc(&bayes_rule(&sc), &sc, 1000, 1).unwrap().estimate, 1.0);
}

#[test]
fn logistic_bayes_accuracy_matches_one_dimensional_quadrature() {
    let sc = ScenarioSpec::logistic_rotation(200, 10, 0.0).unwrap();
    let norm = (10.0f64).sqrt() * 0.5;
    let golden = normal_expectation(20_000, |z| sigmoid(norm * z.abs()));
    assert!((golden - 0.7421).abs() < 5e-4, "{golden}");
    let test = sample(&sc, Origin::Target, 50_000, 21).unwrap();
    let acc = accuracy(&bayes_rule(&sc), &test).unwrap();
    let se = (golden * (1.0 - golden) / 50_000.0).sqrt();
    assert!((acc - golden).abs() <= 3.0 * se, "{acc} vs {golden}");
}

#[test]
fn accuracy_plus_error_rate_is_one() {
    let sc = ScenarioSpec::band_like(1.0, 0.0).unwrap();
    let test = sample(&sc, Origin::Target, 997, 3).unwrap();
    let rule = FnRule(|x: &[f64]| u8::from(x[0] > 0.37));
    let acc = accuracy(&rule, &test).unwrap();
    let errors = test.points().zip(test.labels()).filter(|(x, &y)| rule.predict(x) != y).count();
    assert_eq!(acc + errors as f64 / 997.0, 1.0);
}

#[test]
fn surfaces_stay_in_unit_interval() {
    use rand::Rng as _;
    let specs = [
        ScenarioSpec::band_like(0.5, 0.0).unwrap(),
        ScenarioSpec::band_like(1.0, 0.5).unwrap(),
        ScenarioSpec::flipped_sine(0.5, 0.35).unwrap(),
        ScenarioSpec::flipped_sine(1.0, 0.0).unwrap(),
    ];
    let mut rng = tabkit_core::rng::rng_from_seed(1);
    for sc in &specs {
        for _ in 0..100_000 {
            let x = [rng.random::<f64>(), rng.random::<f64>()];
            let (q, p) = (sc.eta_q(&x), sc.eta_p(&x));
            assert!((0.0..=1.0).contains(&q) && (0.0..=1.0).contains(&p));
        }
    }
}

#[test]
fn flipped_surface_is_continuous_across_seams() {
    use tabkit_core::scenarios::eta_p_flipped;
    let eps = 1e-9;
    for r in [0.1, 0.4] {
        for seam in [0.0, r, 1.0] {
            for half in [0.0, 0.5] {
                let t = half + seam / 2.0;
                let a = eta_p_flipped(&[t - eps, 0.0], 1.0, r, 0.2);
                let b = eta_p_flipped(&[t + eps, 0.0], 1.0, r, 0.2);
                assert!((a - b).abs() < 1e-6, "r={r} t={t}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn perfect_band_source_shares_the_bayes_rule() {
    let sc = ScenarioSpec::band_like(1.0, 0.0).unwrap();
    assert_eq!(bayes_disagreement_mc(&sc, 50_000, 4).unwrap().estimate, 0.0);
}
