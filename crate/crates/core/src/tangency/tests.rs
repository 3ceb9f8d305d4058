use super::*;
use crate::function_space::{hermite_function_at, DualField, MultiIndex, NormScale};
use crate::manifold::{ChartDomain, LinearSpanChart, TranslationChart};
use crate::models::{dirichlet_eigenvalue, grid_sine, DiffusionField, ItoTypeModel, LinearEigenModel, LinearOperator, PLaplaceModel};
use proptest::prelude::*;
use std::sync::Arc;

fn ito_translation(order: usize, sigma_scale: f64) -> (ItoTypeModel<f64>, Manifold<f64>) {
    let dirac = DualField::dirac(order, &[0.0]);
    let scale = NormScale::hermite_sobolev(0.0);
    let model = ItoTypeModel::new(order, vec![dirac.clone()], vec![vec![dirac.scaled(sigma_scale)]], scale).unwrap();
    let chart = TranslationChart::new(SpectralState::hermite_function_1d(order, 0), ChartDomain::symmetric(1, 1.0)).unwrap();
    (model, Manifold::new(Arc::new(chart), scale.h_metric()))
}

fn h0(x: f64) -> f64 {
    hermite_function_at(&MultiIndex::new(vec![0]), &[x])
}

#[test]
fn translation_manifold_is_invariant_and_refines() {
    let opts = SweepOptions::default();
    let (model, manifold) = ito_translation(64, 1.0);
    let fine = sweep(&model, &manifold, &opts).unwrap();
    assert_eq!(fine.verdict, Verdict::Tangent);
    assert_eq!(fine.points.len(), 11);
    for p in &fine.points {
        assert!(p.max_residual <= 1e-6f64.max(10.0 * p.spill));
    }
    let (model, manifold) = ito_translation(16, 1.0);
    let coarse = sweep(&model, &manifold, &opts).unwrap();
    assert!(fine.max_residual <= coarse.max_residual);
}

#[test]
fn reduced_coefficients_match_hand_derivation() {
    // Dirac pairings at 0 on τ_x h_0 give a = β = h_0(x).
    let (model, manifold) = ito_translation(48, 1.0);
    for x in [-0.9, -0.3, 0.0, 0.45, 1.0] {
        let (a, beta) = reduced_coefficients(&model, &manifold, &[x]).unwrap();
        assert!((a[0][0] - h0(x)).abs() < 1e-10, "a at {x}");
        assert!((beta[0] - h0(x)).abs() < 1e-8, "beta at {x}");
    }
}

#[test]
fn drift_forms_agree() {
    let (model, manifold) = ito_translation(32, 0.7);
    for x in [-0.8, 0.1, 0.6] {
        let d = check_diffusion_tangency(&model, &manifold, &[x]).unwrap();
        let (b, s) = check_drift_forms(&model, &manifold, &[x], &d.a, DaMode::Analytic, 1e-4).unwrap();
        assert!((b.residual - s.residual).abs() <= 1e-4);
        assert!((b.beta[0] - s.beta[0]).abs() <= 1e-6);
    }
}

fn negative_control() -> (LinearEigenModel<f64>, Manifold<f64>) {
    let n = 32;
    let metric = NormScale::hermite_sobolev(0.0).h_metric();
    let v0 = SpectralState::hermite_function_1d(n, 0);
    let v1 = SpectralState::hermite_function_1d(n, 1);
    let model = LinearEigenModel::new(
        LinearOperator::HermiteOscillator,
        vec![(v0.clone(), -0.5), (v1.clone(), -1.5)],
        vec![DiffusionField::Constant(SpectralState::hermite_function_1d(n, n / 2))],
        metric,
        1e-12,
    )
    .unwrap();
    let chart = LinearSpanChart::new(vec![v0, v1], ChartDomain::symmetric(2, 1.0)).unwrap();
    (model, Manifold::new(Arc::new(chart), metric))
}

#[test]
fn off_tangent_diffusion_is_detected() {
    let (model, manifold) = negative_control();
    let report = sweep(&model, &manifold, &SweepOptions::default()).unwrap();
    assert_eq!(report.verdict, Verdict::NotTangent);
    assert!(report.max_rho_j >= 0.9);
    assert_eq!(report.verdict.exit_code(), 2);
}

fn grid_span(vectors: Vec<SpectralState<f64>>) -> (PLaplaceModel<f64>, Manifold<f64>) {
    let m = 256;
    let fields = vec![DiffusionField::Scaled(0.5), DiffusionField::Constant(grid_sine(m, 2).scaled(0.3))];
    let model = PLaplaceModel::new(2.0, m, fields).unwrap();
    let chart = LinearSpanChart::new(vectors, ChartDomain::symmetric(2, 2.0)).unwrap();
    (model, Manifold::new(Arc::new(chart), Metric::GridL2))
}

#[test]
fn linear_span_reduces_to_diffusion_condition() {
    let (model, manifold) = grid_span(vec![grid_sine(256, 1), grid_sine(256, 2)]);
    let report = sweep(&model, &manifold, &SweepOptions::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Tangent);
    let lambda = [dirichlet_eigenvalue::<f64>(256, 1), dirichlet_eigenvalue(256, 2)];
    for p in &report.points {
        assert!(p.rho_l <= 1e-10, "rho_l = {:e}", p.rho_l);
        // Stratonovich correction of A = 0.5 y is 0.25 y; the bracket vanishes.
        for k in 0..2 {
            let expected = lambda[k] * p.x[k];
            assert!((p.beta[k] - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
        }
    }
}

#[test]
fn chart_choice_does_not_change_residuals() {
    let (v1, v2) = (grid_sine::<f64>(256, 1), grid_sine::<f64>(256, 2));
    let (model, plain) = grid_span(vec![v1.clone(), v2.clone()]);
    let (_, mixed) = grid_span(vec![&v1 + &v2, &v1 - &v2]);
    for x in [[0.3, -0.7], [1.1, 0.2], [-0.5, -0.5]] {
        let y = [(x[0] + x[1]) / 2.0, (x[0] - x[1]) / 2.0];
        let da = check_diffusion_tangency(&model, &plain, &x).unwrap();
        let db = check_diffusion_tangency(&model, &mixed, &y).unwrap();
        for (ra, rb) in da.residuals.iter().zip(&db.residuals) {
            assert!((ra - rb).abs() <= 1e-8);
        }
        let la = check_drift_tangency(&model, &plain, &x, &da.a, DriftForm::Bracket, DaMode::Analytic).unwrap();
        let lb = check_drift_tangency(&model, &mixed, &y, &db.a, DriftForm::Bracket, DaMode::Analytic).unwrap();
        assert!((la.residual - lb.residual).abs() <= 1e-8);
    }
}

#[test]
fn zero_diffusion_has_zero_residual() {
    let n = 12;
    let metric = NormScale::hermite_sobolev(0.0).h_metric();
    let v0 = SpectralState::hermite_function_1d(n, 0);
    let model: LinearEigenModel<f64> = LinearEigenModel::new(LinearOperator::HermiteOscillator, vec![(v0.clone(), -0.5)], vec![DiffusionField::Zero], metric, 1e-12).unwrap();
    let manifold = Manifold::new(Arc::new(LinearSpanChart::new(vec![v0], ChartDomain::symmetric(1, 1.0)).unwrap()), metric);
    let d = check_diffusion_tangency(&model, &manifold, &[0.4]).unwrap();
    assert_eq!(d.residuals, vec![0.0]);
    assert_eq!(d.a, vec![vec![0.0]]);
    let l = check_drift_tangency(&model, &manifold, &[0.4], &d.a, DriftForm::Bracket, DaMode::Analytic).unwrap();
    assert!(l.residual <= 1e-15);
    assert!((l.beta[0] + 0.2).abs() <= 1e-15);
}

#[test]
fn empty_sampling_is_rejected() {
    let (model, manifold) = negative_control();
    let opts = SweepOptions {
        sampling: SamplingSpec::Lattice { per_axis: 0 },
        ..SweepOptions::default()
    };
    assert!(matches!(sweep(&model, &manifold, &opts), Err(Error::InvalidSampling(_))));
    let opts = SweepOptions {
        sampling: SamplingSpec::Points { points: vec![] },
        ..SweepOptions::default()
    };
    assert!(matches!(sweep(&model, &manifold, &opts), Err(Error::InvalidSampling(_))));
}

#[test]
fn sampling_stays_inside_the_domain() {
    let domain = ChartDomain::new(vec![-1.0, 0.0, 2.0], vec![1.0, 0.5, 3.0]).unwrap();
    for spec in [SamplingSpec::Default, SamplingSpec::Lattice { per_axis: 3 }] {
        let pts = spec.points::<f64>(&domain).unwrap();
        assert!(pts.iter().all(|p| domain.contains(p)));
    }
    assert_eq!(SamplingSpec::Default.points::<f64>(&domain).unwrap().len(), 121);
    let square = ChartDomain::symmetric(2, 1.0);
    let lattice = SamplingSpec::Default.points::<f64>(&square).unwrap();
    assert_eq!(lattice.len(), 121);
    assert!(lattice.iter().any(|p| p[0].abs() < 1e-15 && p[1].abs() < 1e-15));
}

#[test]
fn csv_has_one_row_per_point_and_noise_coordinate() {
    let (model, manifold) = grid_span(vec![grid_sine(256, 1), grid_sine(256, 2)]);
    let opts = SweepOptions {
        sampling: SamplingSpec::Lattice { per_axis: 2 },
        ..SweepOptions::default()
    };
    let csv = sweep(&model, &manifold, &opts).unwrap().to_csv();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 4 * 2);
    let cols = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == cols));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diffusion_scale_equivariance(c in 0.1f64..3.0, x in -1.0f64..1.0) {
        let (m1, manifold) = ito_translation(24, 1.0);
        let (mc, _) = ito_translation(24, c);
        let d1 = check_diffusion_tangency(&m1, &manifold, &[x]).unwrap();
        let dc = check_diffusion_tangency(&mc, &manifold, &[x]).unwrap();
        prop_assert!((dc.a[0][0] - c * d1.a[0][0]).abs() <= 1e-12 * (1.0 + c));
        prop_assert!((dc.residuals[0] - d1.residuals[0]).abs() <= 1e-12);
        let b1 = manifold.bracket(&[x], &d1.a[0], &d1.a[0]).unwrap();
        let bc = manifold.bracket(&[x], &dc.a[0], &dc.a[0]).unwrap();
        let metric = manifold.metric();
        prop_assert!(metric.norm(&(&bc - &b1.scaled(c * c))) <= 1e-12 * metric.norm(&bc).max(1e-300));
    }
}

#[test]
fn single_precision_translation_check() {
    let order = 24;
    let dirac = DualField::<f32>::dirac(order, &[0.0]);
    let scale = NormScale::<f32>::hermite_sobolev(0.0);
    let model = ItoTypeModel::new(order, vec![dirac.clone()], vec![vec![dirac]], scale).unwrap();
    let chart = TranslationChart::new(SpectralState::hermite_function_1d(order, 0), ChartDomain::symmetric(1, 1.0f32)).unwrap();
    let manifold = Manifold::new(Arc::new(chart), scale.h_metric());
    let opts = SweepOptions {
        thresholds: Thresholds { base: 1e-4, ..Thresholds::default() },
        ..SweepOptions::default()
    };
    let report = sweep(&model, &manifold, &opts).unwrap();
    assert_eq!(report.verdict, Verdict::Tangent, "max residual {:e}", report.max_residual);
    let (a, beta) = reduced_coefficients(&model, &manifold, &[0.5f32]).unwrap();
    let expected = h0(0.5) as f32;
    assert!((a[0][0] - expected).abs() < 1e-5 && (beta[0] - expected).abs() < 1e-4);
}
