use std::f64::consts::PI;

use ae_spectra::linalg::Spectrum;
use ae_spectra::rng;
use ae_spectra::spectra::{ks_statistic, summarize, EsdSample};
use num_complex::Complex64;
use proptest::prelude::*;

fn arb_spectrum() -> impl Strategy<Value = Spectrum> {
    proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..40)
        .prop_map(|pairs| Spectrum::from_pairs(&pairs))
}

#[test]
fn uniform_disc_median_radius() {
    let radius = 1.0 / 3f64.sqrt();
    let mut r = rng::stream(1, 0);
    let values: Vec<Complex64> = (0..1000)
        .map(|_| {
            let s = rng::uniform(&mut r, 0.0, 1.0).sqrt() * radius;
            let t = rng::uniform(&mut r, -PI, PI);
            Complex64::from_polar(s, t)
        })
        .collect();
    let summary = summarize(&[Spectrum::new(values)], 0, 2).unwrap();
    let median = summary.modulus_quantiles().median;
    let expected = radius * 0.5f64.sqrt();
    assert!((median - expected).abs() < 0.05 * expected, "{median}");
}

#[test]
fn ks_of_uniform_draws_is_small_with_high_probability() {
    let mut passes = 0;
    for seed in 0..100 {
        let mut r = rng::stream(seed, 5);
        let draws: Vec<f64> = (0..10_000).map(|_| rng::uniform(&mut r, 0.0, 1.0)).collect();
        if ks_statistic(&draws, |x| x.clamp(0.0, 1.0)).unwrap() < 0.025 {
            passes += 1;
        }
    }
    assert!(passes >= 99, "{passes}/100");
}

#[test]
fn ks_at_exact_quantiles() {
    let n = 50;
    let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    assert!(ks_statistic(&samples, |x| x).unwrap() <= 0.5 / n as f64 + 1e-15);
    assert_eq!(ks_statistic(&[0.5], |x| x).unwrap(), 0.5);
}

#[test]
fn esd_cdf_hand_count() {
    let s = Spectrum::from_pairs(&[(1.0, 0.0), (0.0, 1.0)]);
    let esd = EsdSample::new(&s);
    assert_eq!(esd.cdf(1.0, 0.5), 0.5);
    assert_eq!(esd.cdf(f64::INFINITY, f64::INFINITY), 1.0);
    assert_eq!(esd.cdf(-1.0, -1.0), 0.0);
}

proptest! {
    #[test]
    fn summaries_are_monotone(s in arb_spectrum()) {
        let summary = summarize(&[s], 0, 2).unwrap();
        prop_assert!(summary.modulus_quantiles().is_monotone());
        if let Some(a) = summary.argument_quantiles() {
            prop_assert!(a.is_monotone());
            prop_assert!(a.min >= 0.0 && a.max <= PI);
        }
    }

    #[test]
    fn summaries_ignore_conjugation(s in arb_spectrum()) {
        let a = summarize(std::slice::from_ref(&s), 1, 3).unwrap();
        let b = summarize(&[s.conjugated()], 1, 3).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pooling_is_order_independent(a in arb_spectrum(), b in arb_spectrum()) {
        let split = summarize(&[a.clone(), b.clone()], 4, 5).unwrap();
        let mut joined = a.values().to_vec();
        joined.extend_from_slice(b.values());
        joined.reverse();
        let pooled = summarize(&[Spectrum::new(joined)], 4, 5).unwrap();
        prop_assert_eq!(&split.modulus, &pooled.modulus);
        prop_assert_eq!(&split.argument, &pooled.argument);
        prop_assert_eq!(split.zero_count, pooled.zero_count);
    }

    #[test]
    fn ks_is_invariant_under_monotone_maps(xs in proptest::collection::vec(0.001f64..0.999, 1..60)) {
        let direct = ks_statistic(&xs, |x| x).unwrap();
        let mapped: Vec<f64> = xs.iter().map(|x| x.powi(3)).collect();
        let via = ks_statistic(&mapped, |y| y.cbrt()).unwrap();
        prop_assert!((direct - via).abs() < 1e-12);
        let logged: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let via = ks_statistic(&logged, |y| y.exp()).unwrap();
        prop_assert!((direct - via).abs() < 1e-12);
    }
}
