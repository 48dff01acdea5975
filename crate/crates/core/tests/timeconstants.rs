use proptest::prelude::*;

use thinlpp::timeconstants::{
    extrapolate, predicted_constant, predicted_constant_exponential, predicted_constant_geometric, shape_curve,
    shape_point, shape_points_to_csv, thin_rectangle_constant, ShapePoint,
};
use thinlpp::{Error, RngStream, WeightDistribution};

#[test]
fn geometric_constant_tends_to_the_exponential_one() {
    // (1-q) Geometric(q) converges to Exp(1) as q -> 1
    for (x, y) in [(1.0, 1.0), (2.0, 0.5), (0.3, 3.0)] {
        let exp = predicted_constant_exponential(x, y).unwrap();
        let q = 1.0 - 1e-7;
        let geo = (1.0 - q) * predicted_constant_geometric(x, y, q).unwrap();
        assert!((geo - exp).abs() < 1e-6, "({x}, {y}): {geo} vs {exp}");
    }
    assert_eq!(predicted_constant_geometric(1.0, 1.0, 0.25).unwrap(), 2.0);
    assert_eq!(predicted_constant_exponential(1.0, 1.0).unwrap(), 4.0);
}

#[test]
fn predictions_follow_the_law() {
    let rate2 = WeightDistribution::exponential(2.0).unwrap();
    assert_eq!(predicted_constant(&rate2, 1.0, 1.0).unwrap(), Some(2.0));
    let gauss = WeightDistribution::gaussian(0.0, 1.0).unwrap();
    assert_eq!(predicted_constant(&gauss, 1.0, 1.0).unwrap(), None);
    assert!(predicted_constant_geometric(1.0, 1.0, 1.0).is_err());
    assert!(predicted_constant_exponential(0.0, 1.0).is_err());
}

#[test]
fn monte_carlo_shape_point_approaches_prediction_from_below() {
    let d = WeightDistribution::exponential(1.0).unwrap();
    let p = shape_point(&d, 2.0, 0.5, 200, 40, &RngStream::new(70, 0)).unwrap();
    let predicted = p.predicted.unwrap();
    assert!((predicted - 4.5).abs() < 1e-12);
    assert!(p.mean_ratio < predicted && p.mean_ratio > 0.9 * predicted, "{p:?}");
}

#[test]
fn shape_curve_is_reproducible_and_extrapolates_upward() {
    let d = WeightDistribution::geometric(0.25).unwrap();
    let stream = RngStream::new(71, 0);
    let a = shape_curve(&d, 1.0, 1.0, &[100, 400], 40, &stream).unwrap();
    let b = shape_curve(&d, 1.0, 1.0, &[100, 400], 40, &stream).unwrap();
    assert_eq!(shape_points_to_csv(&a), shape_points_to_csv(&b));
    let fit = extrapolate(&a).unwrap();
    assert!(fit.limit > a[1].mean_ratio && fit.amplitude < 0.0, "{fit:?}");
    assert!(shape_points_to_csv(&a).starts_with("x,y,n,mean_ratio,stderr,predicted\n1,1,100,"));
}

#[test]
fn thin_rectangle_constant_below_two_sigma() {
    let d = WeightDistribution::exponential(2.0).unwrap();
    let p = thin_rectangle_constant(&d, 1000, 5, 40, &RngStream::new(72, 0)).unwrap();
    assert_eq!(p.predicted, Some(1.0));
    assert_eq!((p.x, p.y, p.n), (1.0, 0.005, 1000));
    assert!(p.mean_ratio > 0.6 && p.mean_ratio < 1.0, "{p:?}");
    assert!(matches!(
        thin_rectangle_constant(&d, 1000, 11, 40, &RngStream::new(72, 0)),
        Err(Error::Precondition(_))
    ));
    assert!(thin_rectangle_constant(&d, 1000, 10, 10, &RngStream::new(72, 0)).is_err());
}

proptest! {
    #[test]
    fn predictions_are_symmetric_and_homogeneous(x in 0.01f64..10.0, y in 0.01f64..10.0, c in 0.1f64..10.0, q in 0.01f64..0.99) {
        let e = predicted_constant_exponential(x, y).unwrap();
        prop_assert!((e - predicted_constant_exponential(y, x).unwrap()).abs() <= 1e-12 * e);
        prop_assert!((c * e - predicted_constant_exponential(c * x, c * y).unwrap()).abs() <= 1e-12 * c * e);
        let g = predicted_constant_geometric(x, y, q).unwrap();
        prop_assert!((g - predicted_constant_geometric(y, x, q).unwrap()).abs() <= 1e-12 * g);
        prop_assert!((c * g - predicted_constant_geometric(c * x, c * y, q).unwrap()).abs() <= 1e-12 * c * g);
        // mean q/(1-q) per step along at least max(x, y) steps is a lower bound
        prop_assert!(g >= x.max(y) * q / (1.0 - q) - 1e-12);
    }

    #[test]
    fn extrapolation_is_exact_on_the_model(limit in -5.0f64..5.0, amp in -5.0f64..5.0) {
        let pts: Vec<ShapePoint> = [100usize, 800, 6400]
            .iter()
            .map(|&n| ShapePoint {
                x: 1.0,
                y: 1.0,
                n,
                replicates: 30,
                mean_ratio: limit + amp * (n as f64).powf(-1.0 / 3.0),
                stderr: 0.0,
                predicted: None,
            })
            .collect();
        let fit = extrapolate(&pts).unwrap();
        prop_assert!((fit.limit - limit).abs() < 1e-9 && (fit.amplitude - amp).abs() < 1e-9);
    }
}
