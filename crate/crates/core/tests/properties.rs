use std::sync::Arc;

use hazard_means::characterization::{recover_hazard_from_proportionality, test_proportionality, MeanKind, DEFAULT_THRESHOLD};
use hazard_means::cli::{mixture_series_gaps, random_mixture};
use hazard_means::quantile::{
    classify_quantile, qa_with, qg_with, qh_with, quantile_means, recover_quantile_from_proportionality, u_grid, ProportionalMean,
};
use hazard_means::special::{gamma, lower_incomplete_gamma, upper_incomplete_gamma};
use hazard_means::{Hazard, HazardModel, MeanValue, QuantileModel, QuantileOptions, WeightFunction, WeightedModel};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spread(values: &[f64]) -> f64 {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn incomplete_gamma_halves_sum_to_gamma(a in 0.2f64..8.0, x in 0.01f64..20.0) {
        let total = lower_incomplete_gamma(a, x).unwrap() + upper_incomplete_gamma(a, x).unwrap();
        prop_assert!((total - gamma(a)).abs() <= 1e-10 * gamma(a));
    }

    #[test]
    fn weighted_means_are_ordered(
        alpha in 0.3f64..3.0,
        beta in 0.4f64..3.0,
        c in 0.0f64..2.5,
        x in 0.05f64..5.0,
    ) {
        let m = WeightedModel::new(HazardModel::weibull(alpha, beta).unwrap(), WeightFunction::power(c).unwrap());
        let t = m.mean_triple(x).unwrap();
        prop_assert!(t.chain_violation() <= 1e-9, "{t:?}");
    }

    #[test]
    fn exponential_means_coincide(lambda in 0.05f64..5.0, n in -2.0f64..2.0, x in 0.05f64..5.0) {
        let m = WeightedModel::new(HazardModel::exponential(lambda).unwrap(), WeightFunction::exponential(n).unwrap());
        let t = m.mean_triple(x).unwrap();
        for v in [t.afr, t.gfr, t.hfr] {
            prop_assert!((v.value().unwrap() - lambda).abs() <= 1e-9 * lambda.max(1.0));
        }
    }

    #[test]
    fn exponential_quantile_means_are_flat(lambda in 0.05f64..5.0) {
        let q = QuantileModel::exponential(lambda).unwrap();
        let opts = QuantileOptions::default();
        for u in [0.05, 0.3, 0.6, 0.95] {
            let t = quantile_means(&q, u, &opts).unwrap();
            for v in [t.qa, t.qg.value().unwrap(), t.qh.value().unwrap()] {
                prop_assert!((v - lambda).abs() <= 1e-9 * lambda.max(1.0));
            }
        }
    }

    #[test]
    fn non_exponential_weibull_moves_a_quantile_mean(beta in prop_oneof![0.3f64..0.8, 1.25f64..4.0]) {
        let q = QuantileModel::weibull(1.0, beta).unwrap();
        let opts = QuantileOptions::default();
        let qa: Vec<f64> = u_grid().iter().map(|&u| qa_with(&q, u, &opts).unwrap()).collect();
        prop_assert!(spread(&qa) > 1e-3);
    }

    #[test]
    fn quantile_means_follow_monotone_hazard_quantile(beta in prop_oneof![0.3f64..0.9, 1.1f64..4.0]) {
        let q = QuantileModel::weibull(1.0, beta).unwrap();
        let r = classify_quantile(&q, (0.01, 0.99), 99, &QuantileOptions::default()).unwrap();
        prop_assert_eq!(r.transmission, Some(true));
    }

    #[test]
    fn harmonic_quantile_integral_is_finite_below_shape_two(beta in 1.0f64..1.8) {
        let q = QuantileModel::weibull(1.0, beta).unwrap();
        let h = qh_with(&q, 0.5, &QuantileOptions::default()).unwrap();
        prop_assert!(h.value().is_some_and(|h| h > 0.0), "{h:?}");
    }

    #[test]
    fn harmonic_quantile_integral_near_threshold_never_misreports(beta in 1.8f64..2.0) {
        let q = QuantileModel::weibull(1.0, beta).unwrap();
        match qh_with(&q, 0.5, &QuantileOptions::default()) {
            Ok(MeanValue::Finite(h)) => prop_assert!(h > 0.0),
            Ok(MeanValue::Divergent) | Err(hazard_means::Error::Accuracy { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn mixture_matches_series_form(seed in any::<u64>()) {
        let spec = random_mixture(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let grid: Vec<f64> = (0..=60).map(|i| 0.1 * i as f64).collect();
        let (gap, sum_gap) = mixture_series_gaps(&spec, &grid).unwrap();
        prop_assert!(gap <= 1e-12);
        prop_assert_eq!(sum_gap, 0.0);
    }

    #[test]
    fn geometric_proportionality_round_trips(b in 0.2f64..2.5, k in 0.2f64..4.0) {
        let q = recover_quantile_from_proportionality(ProportionalMean::G, b, k, 1.0, false).unwrap();
        let opts = QuantileOptions::default();
        for u in [0.1, 0.5, 0.9] {
            let g = qg_with(&q, u, &opts).unwrap().value().unwrap();
            let h = q.hazard_quantile(u);
            prop_assert!((g / h - b).abs() <= 1e-6 * b.max(1.0), "u={u} ratio {}", g / h);
        }
    }
}

#[test]
fn arithmetic_proportionality_recovers_hazard() {
    let grid: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
    for a in [0.4, 0.5, 1.0, 1.6] {
        for n in [0.0, 1.0, 2.0] {
            let w = WeightFunction::power(n).unwrap();
            let h = recover_hazard_from_proportionality(&w, MeanKind::A, a, 1.5).unwrap();
            let shape = h.weibull_shape().unwrap();
            assert!((shape - (n - a * n + 1.0) / a).abs() <= 1e-12);
            let r = test_proportionality(&WeightedModel::new(h, w), MeanKind::A, &grid, DEFAULT_THRESHOLD).unwrap();
            assert!((r.ratio - a).abs() <= 1e-6, "a={a} n={n} ratio={}", r.ratio);
        }
    }
}

#[test]
fn duplicate_harmonic_form_needs_opt_in() {
    assert!(recover_quantile_from_proportionality(ProportionalMean::H, 0.5, 1.0, 1.0, false).is_err());
    assert!(recover_quantile_from_proportionality(ProportionalMean::H, 0.5, 1.0, 1.0, true).is_ok());
}

#[test]
fn generic_quantile_route_matches_weibull_closed_form() {
    let generic = hazard_means::quantile::quantile_from_hazard(Arc::new(HazardModel::weibull(1.0, 2.0).unwrap())).unwrap();
    let closed = QuantileModel::weibull(1.0, 2.0).unwrap();
    for u in u_grid() {
        let (a, b) = (generic.quantile(u), closed.quantile(u));
        assert!((a - b).abs() <= 1e-10 * b.max(1.0), "u={u}: {a} vs {b}");
    }
    let base = HazardModel::weibull(1.0, 2.0).unwrap();
    assert!((base.cumulative_hazard(closed.quantile(0.5)).unwrap() - 2f64.ln()).abs() < 1e-12);
}
