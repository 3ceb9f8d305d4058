use super::norms::{norm_at, NormScale};
use super::state::SpectralState;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Left Riemann sum of a sampled path, with the difference to the sum on the
/// grid of spacing `2 dt` measured in both the H and K norms.
#[derive(Clone, Debug)]
pub struct PathIntegral<S> {
    pub value: SpectralState<S>,
    /// `‖I_dt - I_2dt‖_H`, when the number of intervals is even and at least two.
    pub refinement_residual_h: Option<S>,
    pub refinement_residual_k: Option<S>,
}

/// `samples[k]` is the path at `t_k = k dt`; the sum covers `[0, samples.len() * dt]`.
pub fn integrate_path<S: Real>(samples: &[SpectralState<S>], dt: S, scale: &NormScale<S>) -> Result<PathIntegral<S>> {
    let first = samples
        .first()
        .ok_or_else(|| Error::BasisMismatch("empty path".into()))?;
    let mut value = SpectralState::zeros_like(first);
    for s in samples {
        value.axpy(dt, s)?;
    }
    let (res_h, res_k) = if samples.len() >= 2 && samples.len() % 2 == 0 {
        let mut coarse = SpectralState::zeros_like(first);
        for s in samples.iter().step_by(2) {
            coarse.axpy(dt + dt, s)?;
        }
        let diff = &value - &coarse;
        (Some(norm_at(&diff, scale.q_h)?), Some(norm_at(&diff, scale.q_k)?))
    } else {
        (None, None)
    };
    Ok(PathIntegral {
        value,
        refinement_residual_h: res_h,
        refinement_residual_k: res_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_path() {
        let s = SpectralState::<f64>::hermite_function_1d(3, 1);
        let samples = vec![s.clone(); 8];
        let out = integrate_path(&samples, 0.25, &NormScale::hermite_sobolev(0.0)).unwrap();
        assert!((&out.value - &s.scaled(2.0)).coeff_norm() < 1e-15);
        assert_eq!(out.refinement_residual_h, Some(0.0));
    }

    #[test]
    fn linear_path_left_sum() {
        let m = 10;
        let dt = 1.0 / m as f64;
        let h0 = SpectralState::<f64>::hermite_function_1d(2, 0);
        let samples: Vec<_> = (0..m).map(|k| h0.scaled(k as f64 * dt)).collect();
        let out = integrate_path(&samples, dt, &NormScale::hermite_sobolev(0.0)).unwrap();
        let want = 0.5 - 0.5 / m as f64;
        assert!((out.value.coeffs()[0] - want).abs() < 1e-15);
        let (h, k) = (out.refinement_residual_h.unwrap(), out.refinement_residual_k.unwrap());
        assert!(k <= h);
    }
}
