use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};

use thinlpp::stats::{
    center_scale_first_passage, center_scale_last_passage, center_scale_theorem_form, center_scale_theorem_form_inf,
    ks_critical_coefficient, ks_one_sample, ks_two_sample, EcdfSummary,
};
use thinlpp::{Error, RngStream};

/// `sup_x |F_a(x) - F_b(x)|` by counting at every pooled point, `O(n^2)`.
fn ks_two_sample_quadratic(a: &[f64], b: &[f64]) -> f64 {
    let frac = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    a.iter().chain(b).map(|&x| (frac(a, x) - frac(b, x)).abs()).fold(0.0, f64::max)
}

fn sample(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(-50.0f64..50.0, len.clone()),
        prop::collection::vec((-4i32..=4).prop_map(f64::from), len),
    ]
}

#[test]
fn critical_coefficients() {
    assert!((ks_critical_coefficient(0.05) - 1.3581).abs() < 1e-4);
    assert!((ks_critical_coefficient(0.01) - 1.6276).abs() < 1e-4);
    let r = ks_two_sample(&[0.0; 10_000], &[0.0; 10_000], 0.05).unwrap();
    assert!((r.threshold - 0.0192).abs() < 1e-4);
}

#[test]
fn one_sample_closed_forms() {
    let id = |x: f64| x.clamp(0.0, 1.0);
    assert_eq!(ks_one_sample(&[0.5], id, 0.05).unwrap().statistic, 0.5);
    let n = 40;
    let mid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    assert!((ks_one_sample(&mid, id, 0.05).unwrap().statistic - 0.5 / n as f64).abs() < 1e-15);
    let shifted: Vec<f64> = mid.iter().map(|x| x * 0.5).collect();
    assert!((ks_one_sample(&shifted, id, 0.05).unwrap().statistic - (1.0 - 0.5 * (1.0 - 0.5 / n as f64))).abs() < 1e-12);
}

#[test]
fn rejects_empty_nan_and_bad_alpha() {
    assert!(matches!(ks_two_sample(&[], &[1.0], 0.05), Err(Error::EmptySample)));
    assert!(ks_two_sample(&[f64::NAN], &[1.0], 0.05).is_err());
    assert!(ks_one_sample(&[1.0], |x| x, 1.5).is_err());
    assert!(ks_one_sample(&[1.0], |x| x, 0.0).is_err());
}

#[test]
fn null_rejection_rate_is_near_alpha() {
    let root = RngStream::new(600, 0);
    let reps = 400;
    let rejected = (0..reps)
        .filter(|&r| {
            let mut s = root.fork(r);
            let a: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut s)).collect();
            let b: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut s)).collect();
            ks_two_sample(&a, &b, 0.05).unwrap().reject
        })
        .count();
    let rate = rejected as f64 / reps as f64;
    assert!((0.01..=0.09).contains(&rate), "rejection rate {rate}");
}

#[test]
fn ecdf_and_quantile() {
    let e = EcdfSummary::new(&[3.0, 1.0, 2.0, 2.0]).unwrap();
    assert_eq!(e.ecdf(0.5), 0.0);
    assert_eq!(e.ecdf(2.0), 0.75);
    assert_eq!(e.ecdf(3.0), 1.0);
    assert_eq!(e.quantile(0.5), 2.0);
    assert_eq!(e.quantile(0.0), 1.0);
    assert_eq!(e.quantile(1.0), 3.0);
    assert_eq!(e.mean(), 2.0);
    assert!((e.variance() - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn centring_transforms() {
    let (n, k, mu, sigma) = (5000, 6, 1.0, 1.0);
    let centre = mu * (n + k - 1) as f64 + 2.0 * sigma * ((n * k) as f64).sqrt();
    assert!(center_scale_last_passage(centre, n, k, mu, sigma).unwrap().abs() < 1e-12);
    let scale = sigma * (k as f64).powf(-1.0 / 6.0) * (n as f64).sqrt();
    assert!((center_scale_last_passage(centre + scale, n, k, mu, sigma).unwrap() - 1.0).abs() < 1e-12);
    // the first-passage transform is the last-passage one reflected about μ(N+k-1)
    for v in [4000.0, 5004.5, 6100.0] {
        let reflected = 2.0 * mu * (n + k - 1) as f64 - v;
        let f = center_scale_first_passage(v, n, k, mu, sigma).unwrap();
        let l = center_scale_last_passage(reflected, n, k, mu, sigma).unwrap();
        assert!((f + l).abs() < 1e-12);
    }
    let v = 2.0 * (10f64).sqrt() * (20000f64).sqrt();
    assert!(center_scale_theorem_form(v, 20000, 10).unwrap().abs() < 1e-12);
    assert!(center_scale_theorem_form_inf(-v, 20000, 10).unwrap().abs() < 1e-12);
    assert!(center_scale_last_passage(1.0, 0, 1, 0.0, 1.0).is_err());
    assert!(center_scale_last_passage(1.0, 1, 1, 0.0, 0.0).is_err());
}

proptest! {
    #[test]
    fn merge_scan_matches_quadratic_count(a in sample(1..60), b in sample(1..60)) {
        let fast = ks_two_sample(&a, &b, 0.05).unwrap().statistic;
        prop_assert!((fast - ks_two_sample_quadratic(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn two_sample_is_symmetric_and_order_free(a in sample(1..60), b in sample(1..60)) {
        let ab = ks_two_sample(&a, &b, 0.05).unwrap();
        let ba = ks_two_sample(&b, &a, 0.05).unwrap();
        prop_assert_eq!(ab.statistic, ba.statistic);
        prop_assert_eq!(ab.threshold, ba.threshold);
        let mut rev = a.clone();
        rev.reverse();
        prop_assert_eq!(ks_two_sample(&rev, &b, 0.05).unwrap().statistic, ab.statistic);
        prop_assert!((0.0..=1.0).contains(&ab.statistic));
    }

    #[test]
    fn two_sample_is_invariant_under_increasing_maps(a in sample(1..60), b in sample(1..60)) {
        let f = |x: &f64| (x / 10.0).exp() * 3.0 + 1.0;
        let fa: Vec<f64> = a.iter().map(f).collect();
        let fb: Vec<f64> = b.iter().map(f).collect();
        prop_assert_eq!(
            ks_two_sample(&a, &b, 0.05).unwrap().statistic,
            ks_two_sample(&fa, &fb, 0.05).unwrap().statistic
        );
    }

    #[test]
    fn one_sample_matches_two_sample_against_a_dense_grid(a in prop::collection::vec(0.0f64..1.0, 1..40)) {
        // the ECDF of a fine uniform grid is within 1/m of the identity cdf
        let m = 20_000;
        let grid: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
        let one = ks_one_sample(&a, |x| x.clamp(0.0, 1.0), 0.05).unwrap().statistic;
        let two = ks_two_sample(&a, &grid, 0.05).unwrap().statistic;
        prop_assert!((one - two).abs() <= 1.0 / m as f64 + 1e-12);
    }
}
