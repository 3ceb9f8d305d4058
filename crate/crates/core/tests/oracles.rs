use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use spde_manifold::function_space::{
    check_embedding, hermite_functions, norm_at, project_function, DualField, GaussHermite, NormScale, SpectralState,
};
use spde_manifold::manifold::{ChartDomain, DistanceOptions, Manifold, TranslationChart};
use spde_manifold::models::{ItoTypeModel, SpdeModel};
use spde_manifold::simulate::{coupled_compare, SimConfig};

/// Golub–Welsch through a dense symmetric eigensolver: nodes are eigenvalues
/// of the Jacobi matrix, weights `√π v₀²`.
fn dense_gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let jacobi = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { (i.max(j) as f64 / 2.0).sqrt() } else { 0.0 });
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

#[test]
fn quadrature_matches_dense_eigensolver() {
    for n in [5, 20, 41] {
        let rule = GaussHermite::new(n);
        let mut ours: Vec<(f64, f64)> = rule.nodes().iter().copied().zip(rule.modified_weights().iter().copied()).collect();
        ours.sort_by(|a, b| a.0.total_cmp(&b.0));
        for ((x, mw), (xr, wr)) in ours.iter().zip(dense_gauss_hermite(n)) {
            assert!((x - xr).abs() <= 1e-11 * (1.0 + xr.abs()), "n={n}: node {x} vs {xr}");
            // Eigenvector entries carry absolute, not relative, accuracy.
            if wr < 1e-8 {
                continue;
            }
            let mw_ref = wr * (xr * xr).exp();
            assert!((mw - mw_ref).abs() <= 1e-8 * mw_ref, "n={n}: weight {mw} vs {mw_ref}");
        }
    }
}

#[test]
fn quadrature_integrates_gaussian_moments() {
    // ∫ x^{2k} e^{-x²} dx = Γ(k + ½)
    let rule = GaussHermite::new(30);
    let mut gamma = std::f64::consts::PI.sqrt();
    for k in 0..30 {
        let got = rule.integrate(|x| x.powi(2 * k) * (-x * x).exp());
        assert!((got - gamma).abs() <= 1e-12 * gamma, "k={k}: {got} vs {gamma}");
        gamma *= k as f64 + 0.5;
    }
}

#[test]
fn projection_recovers_polynomial_times_gaussian() {
    // x² e^{-x²/2} = π^{1/4} (h_0 + √2 h_2) / 2
    let s: SpectralState<f64> = project_function(12, |x| x * x * (-x * x / 2.0).exp());
    let c = std::f64::consts::PI.powf(0.25) / 2.0;
    for (n, v) in s.coeffs().iter().enumerate() {
        let expected = match n {
            0 => c,
            2 => c * 2f64.sqrt(),
            _ => 0.0,
        };
        assert!((v - expected).abs() < 1e-13, "coefficient {n}: {v} vs {expected}");
    }
    let at = hermite_functions(12, 0.8);
    let value: f64 = at.iter().zip(s.coeffs()).map(|(h, c)| h * c).sum();
    assert!((value - 0.64 * (-0.32f64).exp()).abs() < 1e-13);
}

fn arb_state() -> impl Strategy<Value = SpectralState<f64>> {
    (1usize..=3, 0usize..=10, 0.0f64..2.0).prop_flat_map(|(d, order, decay)| {
        let len = SpectralState::<f64>::zeros_hermite(d, order).len();
        prop::collection::vec(-1.0f64..1.0, len).prop_map(move |c| {
            let mut s = SpectralState::zeros_hermite(d, order);
            let orders: Vec<usize> = s.entries().iter().map(|(n, _)| n.order()).collect();
            for ((dst, v), k) in s.coeffs_mut().iter_mut().zip(c).zip(orders) {
                *dst = v * (1.0 + k as f64).powf(-decay);
            }
            s
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn embedding_constants_at_most_one(s in arb_state(), p in -1.0f64..3.0) {
        let report = check_embedding(&NormScale::hermite_sobolev(p), std::slice::from_ref(&s)).unwrap();
        prop_assert!(report.passed);
        prop_assert!(report.max_ratio_k_over_h <= 1.0 && report.max_ratio_h_over_g <= 1.0);
        let lo = norm_at(&s, p).unwrap();
        let hi = norm_at(&s, p + 0.25).unwrap();
        prop_assert!(lo <= hi);
    }
}

/// Coupled error of Euler–Maruyama against the exact reduced dynamics
/// shrinks when dt is halved; order ½ predicts a factor 2^{-1/2} ≈ 0.71.
#[test]
fn coupled_error_shrinks_with_dt() {
    let order = 64;
    let dirac = DualField::dirac(order, &[0.0]);
    let model = ItoTypeModel::new(order, vec![dirac.clone()], vec![vec![dirac]], NormScale::hermite_sobolev(0.0)).unwrap();
    let chart = TranslationChart::new(
        SpectralState::hermite_function_1d(order, 0),
        ChartDomain::new(vec![-2.0], vec![2.0]).unwrap(),
    )
    .unwrap();
    let manifold = Manifold::new(Arc::new(chart), model.metric());
    let cfg = SimConfig {
        horizon: 0.5,
        dt: 1e-3,
        paths: 64,
        seed: 1,
        record_every: 10,
        ..SimConfig::default()
    };
    let fine = cfg.halved();
    let opts = DistanceOptions::default();
    let coarse_run = coupled_compare(&model, &manifold, &[0.0], &cfg, &cfg.noise(), &opts).unwrap();
    let fine_run = coupled_compare(&model, &manifold, &[0.0], &fine, &fine.noise(), &opts).unwrap();
    let ratio = fine_run.summary.mean_max_coupled_error / coarse_run.summary.mean_max_coupled_error;
    assert!(ratio <= 0.8, "ratio {ratio}");
    assert!(coarse_run.summary.max_distance < 0.1);
}
