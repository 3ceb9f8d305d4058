//! Differential operators and translations on Hermite coefficient vectors.

use super::basis::hermite_basis;
use super::state::{Basis, SpectralState};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn require_hermite<S: Real>(state: &SpectralState<S>, op: &'static str) -> Result<()> {
    match state.basis() {
        Basis::Hermite(_) => Ok(()),
        Basis::Grid { .. } => Err(Error::UnsupportedBasis { op, basis: "sine_grid" }),
    }
}

/// `∂_axis` via the ladder relation `h_n' = sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1}`.
///
/// The result is truncated at order `N + 1`.
pub fn derivative<S: Real>(state: &SpectralState<S>, axis: usize) -> Result<SpectralState<S>> {
    require_hermite(state, "derivative")?;
    let basis = state.hermite_basis().expect("hermite").clone();
    if axis >= basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: axis + 1,
        });
    }
    let mut out = SpectralState::zeros_hermite(basis.dim(), basis.order() + 1);
    let raise = basis.raise_table(axis);
    let lower = basis.lower_table(axis);
    let half = S::lit(0.5);
    let dst = out.coeffs_mut();
    for (k, (&c, n)) in state.coeffs().iter().zip(basis.indices()).enumerate() {
        if c == S::zero() {
            continue;
        }
        let nk = S::from_usize_lossy(n.entries()[axis]);
        if let Some(lo) = lower[k] {
            dst[lo] += (nk * half).sqrt() * c;
        }
        dst[raise[k]] -= ((nk + S::one()) * half).sqrt() * c;
    }
    Ok(out)
}

/// `∂²_{ij}`, order `N + 2`. The axes are applied in ascending order so that
/// `(i, j)` and `(j, i)` give bit-identical results.
pub fn second_derivative<S: Real>(state: &SpectralState<S>, axes: (usize, usize)) -> Result<SpectralState<S>> {
    let (a, b) = if axes.0 <= axes.1 { axes } else { (axes.1, axes.0) };
    derivative(&derivative(state, a)?, b)
}

/// The truncated operator `P_N ∂_axis P_N`: same as [`derivative`] with the
/// top band dropped, so the output stays at the input's order.
pub fn truncated_derivative<S: Real>(state: &SpectralState<S>, axis: usize) -> Result<SpectralState<S>> {
    Ok(derivative(state, axis)?.with_order(state.order()))
}

/// Relative mass of the top order band, `‖band N‖ / ‖s‖` in coefficient norm.
pub fn tail_ratio<S: Real>(state: &SpectralState<S>) -> S {
    let Some(basis) = state.hermite_basis() else {
        return S::zero();
    };
    let total = state.coeff_norm();
    if total == S::zero() {
        return S::zero();
    }
    let top = state.coeffs()[basis.band(basis.order())]
        .iter()
        .map(|&c| c * c)
        .sum::<S>()
        .sqrt();
    top / total
}

/// Translation `τ_x s = s(· - x)` computed as `exp(-Σ x_i D_i) s` with the
/// truncated (skew-symmetric) derivative matrices `D_i`.
///
/// The exponential is applied by a scaled Taylor series: the shift is split
/// into substeps whose operator norm is at most one, and each substep sums
/// terms until they drop below machine precision relative to the iterate.
pub fn translate<S: Real>(state: &SpectralState<S>, x: &[S]) -> Result<SpectralState<S>> {
    require_hermite(state, "translate")?;
    if x.len() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: x.len(),
        });
    }
    if x.iter().all(|&xi| xi == S::zero()) {
        return Ok(state.clone());
    }
    let order = state.order();
    // Row sums of |D_i| are bounded by sqrt(2(N+1)).
    let d_norm = S::from_usize_lossy(2 * (order + 1)).sqrt();
    let theta: S = x.iter().map(|xi| xi.abs()).sum::<S>() * d_norm;
    let substeps = theta.ceil().to_usize().unwrap_or(1).max(1);
    let inv = S::one() / S::from_usize_lossy(substeps);
    let shift: Vec<S> = x.iter().map(|&xi| -xi * inv).collect();

    let basis = hermite_basis(state.dim(), order);
    let apply = |v: &SpectralState<S>| -> SpectralState<S> {
        // (Σ_i shift_i D_i) v, truncated to `order`.
        let mut out = SpectralState::zeros_hermite(basis.dim(), order);
        for (axis, &a) in shift.iter().enumerate() {
            if a == S::zero() {
                continue;
            }
            let raise = basis.raise_table(axis);
            let lower = basis.lower_table(axis);
            let dst = out.coeffs_mut();
            for (k, (&c, n)) in v.coeffs().iter().zip(basis.indices()).enumerate() {
                if c == S::zero() {
                    continue;
                }
                let nk = S::from_usize_lossy(n.entries()[axis]);
                if let Some(lo) = lower[k] {
                    dst[lo] += a * (nk * S::lit(0.5)).sqrt() * c;
                }
                let hi = raise[k];
                if hi < dst.len() {
                    dst[hi] -= a * ((nk + S::one()) * S::lit(0.5)).sqrt() * c;
                }
            }
        }
        out
    };

    let mut v = state.clone();
    for _ in 0..substeps {
        let mut sum = v.clone();
        let mut term = v.clone();
        let scale = v.coeff_norm();
        for k in 1..=80 {
            term = apply(&term).scaled(S::one() / S::from_usize_lossy(k));
            sum.axpy(S::one(), &term).expect("same basis");
            if term.coeff_norm() <= S::epsilon() * scale * S::lit(1e-2) {
                break;
            }
        }
        v = sum;
    }
    Ok(v)
}

/// [`translate`] plus the truncation diagnostic: `warning` is set when the
/// tail ratio of the result exceeds `tail_threshold`.
#[derive(Clone, Debug)]
pub struct Translation<S> {
    pub state: SpectralState<S>,
    pub tail_ratio: S,
    pub warning: bool,
}

pub fn translate_checked<S: Real>(state: &SpectralState<S>, x: &[S], tail_threshold: S) -> Result<Translation<S>> {
    let out = translate(state, x)?;
    let tail = tail_ratio(&out);
    Ok(Translation {
        warning: tail > tail_threshold,
        tail_ratio: tail,
        state: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::basis::MultiIndex;

    #[test]
    fn derivative_of_h0_and_h1() {
        let d0 = derivative(&SpectralState::<f64>::hermite_function_1d(4, 0), 0).unwrap();
        assert_eq!(d0.order(), 5);
        assert!((d0.coeffs()[1] + 0.5f64.sqrt()).abs() < 1e-15);
        let d1 = derivative(&SpectralState::<f64>::hermite_function_1d(4, 1), 0).unwrap();
        assert!((d1.coeffs()[0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((d1.coeffs()[2] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_maps_to_zero() {
        let z = SpectralState::<f64>::zeros_hermite(2, 3);
        assert!(derivative(&z, 1).unwrap().is_zero());
        assert!(second_derivative(&z, (0, 1)).unwrap().is_zero());
    }

    #[test]
    fn mixed_partials_identical() {
        let mut s = SpectralState::<f64>::zeros_hermite(2, 6);
        for (k, c) in s.coeffs_mut().iter_mut().enumerate() {
            *c = ((k * 7 % 11) as f64 - 5.0) / 3.0;
        }
        assert_eq!(second_derivative(&s, (0, 1)).unwrap(), second_derivative(&s, (1, 0)).unwrap());
    }

    #[test]
    fn second_derivative_of_h0() {
        // h0'' = (x² - 1) h0 = -h0/2 + h2/sqrt(2)
        let s = second_derivative(&SpectralState::<f64>::hermite_function_1d(3, 0), (0, 0)).unwrap();
        assert!((s.coeffs()[0] + 0.5).abs() < 1e-15);
        assert!((s.coeffs()[2] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn translate_zero_is_identity() {
        let mut s = SpectralState::<f64>::zeros_hermite(2, 5);
        s.set(&MultiIndex::new(vec![2, 1]), 1.5).unwrap();
        assert_eq!(translate(&s, &[0.0, 0.0]).unwrap(), s);
    }

    #[test]
    fn translate_h0_is_coherent_state() {
        // Exact coefficients of h0(· - a): e^{-a²/4} (a/√2)^n / sqrt(n!).
        let a = 0.3f64;
        let n_max = 40;
        let out = translate(&SpectralState::hermite_function_1d(n_max, 0), &[a]).unwrap();
        let mut fact = 1.0f64;
        for n in 0..=n_max {
            if n > 0 {
                fact *= n as f64;
            }
            let exact = (-a * a / 4.0).exp() * (a / 2f64.sqrt()).powi(n as i32) / fact.sqrt();
            assert!((out.coeffs()[n] - exact).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn translate_is_isometric_in_coefficients() {
        let s = &SpectralState::<f64>::hermite_function_1d(30, 2) + &SpectralState::hermite_function_1d(30, 5);
        let t = translate(&s, &[1.7]).unwrap();
        assert!((t.coeff_norm() - s.coeff_norm()).abs() < 1e-12);
    }

    #[test]
    fn tail_warning_on_large_shift() {
        let s = SpectralState::<f64>::hermite_function_1d(8, 0);
        assert!(!translate_checked(&s, &[0.1], 1e-6).unwrap().warning);
        assert!(translate_checked(&s, &[4.0], 1e-6).unwrap().warning);
    }

    #[test]
    fn grid_states_rejected() {
        let g = SpectralState::<f64>::zeros_grid(3);
        assert!(derivative(&g, 0).is_err());
        assert!(translate(&g, &[0.1]).is_err());
    }
}
