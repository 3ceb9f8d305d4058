use std::sync::Arc;

use super::*;
use crate::error::Error;
use crate::function_space::{derivative, second_derivative, translate, NormScale};

fn h_metric() -> Metric<f64> {
    NormScale::hermite_sobolev(0.0).h_metric()
}

fn translation_manifold(order: usize) -> Manifold<f64> {
    let chart = TranslationChart::new(SpectralState::hermite_function_1d(order, 0), ChartDomain::symmetric(1, 2.0)).unwrap();
    Manifold::new(Arc::new(chart), h_metric())
}

fn span_manifold() -> Manifold<f64> {
    let v = vec![
        &SpectralState::hermite_function_1d(6, 0) + &SpectralState::hermite_function_1d(6, 3),
        SpectralState::hermite_function_1d(6, 1).scaled(2.0),
    ];
    Manifold::new(Arc::new(LinearSpanChart::new(v, ChartDomain::symmetric(2, 1.0)).unwrap()), h_metric())
}

#[test]
fn linear_span_columns_are_the_vectors() {
    let m = span_manifold();
    let frame = m.jacobian(&[0.3, -0.2]).unwrap();
    let chart = m.chart().eval(&[1.0, 0.0]).unwrap();
    assert_eq!(frame.columns()[0], chart);
    assert!(m.bracket(&[0.1, 0.1], &[1.0, 2.0], &[-3.0, 0.5]).unwrap().is_zero());
}

#[test]
fn translation_column_is_minus_derivative() {
    let m = translation_manifold(40);
    let x = [0.4];
    let frame = m.jacobian(&x).unwrap();
    let y = translate(&SpectralState::hermite_function_1d(40, 0), &x).unwrap();
    let expected = derivative(&y, 0).unwrap().scaled(-1.0).with_order(40);
    assert!((&frame.columns()[0] - &expected).coeff_norm() < 1e-14);
    let fd = m.fd_jacobian(&x, 1e-4).unwrap();
    assert!(h_metric().norm(&(&fd[0] - &frame.columns()[0])) < 1e-6);
}

#[test]
fn degenerate_chart_rejected() {
    let v = SpectralState::<f64>::hermite_function_1d(3, 1);
    let chart = CustomChart::new(ChartDomain::symmetric(1, 1.0), move |x: &[f64]| Ok(v.scaled(x[0] * x[0])));
    let m = Manifold::new(Arc::new(chart), h_metric());
    assert!(matches!(m.jacobian(&[0.0]), Err(Error::DegenerateChart { .. })));
    assert!(m.jacobian(&[0.5]).is_ok());
}

#[test]
fn tangent_coordinates_exact_cases() {
    let m = span_manifold();
    let frame = m.jacobian(&[0.0, 0.0]).unwrap();
    let p = frame.tangent_coordinates(&frame.columns()[0]).unwrap();
    assert!((p.coords[0] - 1.0).abs() < 1e-14 && p.coords[1].abs() < 1e-14);
    assert!(p.residual < 1e-14);

    let orth = SpectralState::hermite_function_1d(6, 5);
    let p = frame.tangent_coordinates(&orth).unwrap();
    assert!(p.coords.iter().all(|c| c.abs() < 1e-15));
    assert!((p.residual - h_metric().norm(&orth)).abs() < 1e-13);
}

#[test]
fn bracket_on_translation_manifold() {
    let m = translation_manifold(48);
    let x = [-0.6];
    let (a, b) = ([0.7], [-1.3]);
    let br = m.bracket(&x, &a, &b).unwrap();
    let y = translate(&SpectralState::hermite_function_1d(48, 0), &x).unwrap();
    let expected = second_derivative(&y, (0, 0)).unwrap().scaled(a[0] * b[0]).with_order(48);
    assert!(h_metric().norm(&(&br - &expected)) < 1e-10);
    let fd = m.fd_hessian(&x, 1e-3).unwrap().contract(&a, &b);
    assert!(h_metric().norm(&(&fd - &br)) < 1e-5);
    assert_eq!(m.bracket(&x, &b, &a).unwrap(), br);
}

#[test]
fn distance_of_point_on_manifold_is_zero() {
    let m = translation_manifold(32);
    let y = m.eval(&[0.25]).unwrap();
    let d = m.distance(&y, &[0.25], &DistanceOptions::default()).unwrap();
    assert!(d.converged);
    assert_eq!(d.distance, 0.0);
    assert_eq!(d.point, vec![0.25]);
}

#[test]
fn distance_iteration_cap_reports_non_convergence() {
    let m = translation_manifold(40);
    let y = m.eval(&[5.0]).unwrap();
    let opts = DistanceOptions {
        max_iterations: 3,
        ..DistanceOptions::default()
    };
    let d = m.distance(&y, &[0.0], &opts).unwrap();
    assert!(!d.converged);
    assert_eq!(d.iterations, 3);
}
