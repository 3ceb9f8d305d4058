//! Local parametrizations `φ : V ⊂ R^m → state space`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{translate, truncated_derivative, SpectralState};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    TranslationGroup,
    LinearSpan,
    Custom,
}

/// Axis-aligned box `V = Π [lower_i, upper_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartDomain<S> {
    lower: Vec<S>,
    upper: Vec<S>,
}

impl<S: Real> ChartDomain<S> {
    pub fn new(lower: Vec<S>, upper: Vec<S>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidChart(format!(
                "domain bounds of lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::InvalidChart("domain needs lower < upper on every axis".into()));
        }
        Ok(Self { lower, upper })
    }

    /// `[-r, r]^m`.
    pub fn symmetric(m: usize, radius: S) -> Self {
        Self::new(vec![-radius; m], vec![radius; m]).expect("radius must be positive")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[S] {
        &self.lower
    }

    pub fn upper(&self) -> &[S] {
        &self.upper
    }

    pub fn contains(&self, x: &[S]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&xi, (&l, &u))| xi >= l && xi <= u)
    }
}

/// Symmetric `m × m` array of second partial derivatives `∂²φ/∂x_k∂x_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hessian<S> {
    m: usize,
    // Upper triangle, row-major: (k, l) with k <= l.
    entries: Vec<SpectralState<S>>,
}

impl<S: Real> Hessian<S> {
    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> Result<SpectralState<S>>) -> Result<Self> {
        let mut entries = Vec::with_capacity(m * (m + 1) / 2);
        for k in 0..m {
            for l in k..m {
                entries.push(f(k, l)?);
            }
        }
        Ok(Self { m, entries })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, k: usize, l: usize) -> &SpectralState<S> {
        let (k, l) = if k <= l { (k, l) } else { (l, k) };
        &self.entries[k * self.m - k * (k + 1) / 2 + l]
    }

    /// `Σ_{k,l} a_k b_l ∂²φ/∂x_k∂x_l`. Symmetric in `(a, b)` bit for bit: each
    /// unordered pair is weighted by `a_k b_l + a_l b_k`.
    pub fn contract(&self, a: &[S], b: &[S]) -> SpectralState<S> {
        let mut out = SpectralState::zeros_like(&self.entries[0]);
        for k in 0..self.m {
            for l in k..self.m {
                let w = if k == l { a[k] * b[k] } else { a[k] * b[l] + a[l] * b[k] };
                if w != S::zero() {
                    out.axpy(w, self.get(k, l)).expect("hessian entries share a basis");
                }
            }
        }
        out
    }
}

/// A chart with optional analytic derivatives; missing derivatives are
/// replaced by central finite differences.
pub trait Parametrization<S: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn domain(&self) -> &ChartDomain<S>;

    fn kind(&self) -> ChartKind;

    fn eval(&self, x: &[S]) -> Result<SpectralState<S>>;

    /// `Dφ(x)` as `m` tangent states, if available in closed form.
    fn analytic_jacobian(&self, _x: &[S]) -> Result<Option<Vec<SpectralState<S>>>> {
        Ok(None)
    }

    fn analytic_hessian(&self, _x: &[S]) -> Result<Option<Hessian<S>>> {
        Ok(None)
    }
}

fn check_point<S: Real>(m: usize, x: &[S]) -> Result<()> {
    if x.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: x.len() });
    }
    Ok(())
}

/// `x ↦ τ_x Φ`, the orbit of a profile under the translation group.
#[derive(Clone, Debug)]
pub struct TranslationChart<S> {
    profile: SpectralState<S>,
    domain: ChartDomain<S>,
}

impl<S: Real> TranslationChart<S> {
    pub fn new(profile: SpectralState<S>, domain: ChartDomain<S>) -> Result<Self> {
        if profile.hermite_basis().is_none() {
            return Err(Error::InvalidChart("translation charts need a hermite profile".into()));
        }
        if domain.dim() != profile.dim() {
            return Err(Error::DimensionMismatch {
                expected: profile.dim(),
                found: domain.dim(),
            });
        }
        Ok(Self { profile, domain })
    }

    pub fn profile(&self) -> &SpectralState<S> {
        &self.profile
    }
}

impl<S: Real> Parametrization<S> for TranslationChart<S> {
    fn dim(&self) -> usize {
        self.profile.dim()
    }

    fn domain(&self) -> &ChartDomain<S> {
        &self.domain
    }

    fn kind(&self) -> ChartKind {
        ChartKind::TranslationGroup
    }

    fn eval(&self, x: &[S]) -> Result<SpectralState<S>> {
        check_point(self.dim(), x)?;
        translate(&self.profile, x)
    }

    /// `∂/∂x_i τ_x Φ = -∂_i (τ_x Φ)` with the truncated derivative, which is the
    /// exact derivative of the truncated chart.
    fn analytic_jacobian(&self, x: &[S]) -> Result<Option<Vec<SpectralState<S>>>> {
        let y = self.eval(x)?;
        (0..self.dim())
            .map(|i| Ok(truncated_derivative(&y, i)?.scaled(-S::one())))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn analytic_hessian(&self, x: &[S]) -> Result<Option<Hessian<S>>> {
        let y = self.eval(x)?;
        let first: Vec<_> = (0..self.dim())
            .map(|i| truncated_derivative(&y, i))
            .collect::<Result<_>>()?;
        Hessian::from_fn(self.dim(), |k, l| truncated_derivative(&first[k], l)).map(Some)
    }
}

/// `x ↦ Σ x_i v_i`.
#[derive(Clone, Debug)]
pub struct LinearSpanChart<S> {
    vectors: Vec<SpectralState<S>>,
    domain: ChartDomain<S>,
}

impl<S: Real> LinearSpanChart<S> {
    pub fn new(vectors: Vec<SpectralState<S>>, domain: ChartDomain<S>) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidChart("linear span needs at least one vector".into()))?;
        for v in &vectors[1..] {
            first.check_compatible(v)?;
            if v.len() != first.len() {
                return Err(Error::InvalidChart("span vectors must share a truncation".into()));
            }
        }
        if domain.dim() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                found: domain.dim(),
            });
        }
        Ok(Self { vectors, domain })
    }

    pub fn vectors(&self) -> &[SpectralState<S>] {
        &self.vectors
    }
}

impl<S: Real> Parametrization<S> for LinearSpanChart<S> {
    fn dim(&self) -> usize {
        self.vectors.len()
    }

    fn domain(&self) -> &ChartDomain<S> {
        &self.domain
    }

    fn kind(&self) -> ChartKind {
        ChartKind::LinearSpan
    }

    fn eval(&self, x: &[S]) -> Result<SpectralState<S>> {
        check_point(self.dim(), x)?;
        SpectralState::linear_combination(x, &self.vectors)
    }

    fn analytic_jacobian(&self, x: &[S]) -> Result<Option<Vec<SpectralState<S>>>> {
        check_point(self.dim(), x)?;
        Ok(Some(self.vectors.clone()))
    }

    fn analytic_hessian(&self, x: &[S]) -> Result<Option<Hessian<S>>> {
        check_point(self.dim(), x)?;
        let zero = SpectralState::zeros_like(&self.vectors[0]);
        Hessian::from_fn(self.dim(), |_, _| Ok(zero.clone())).map(Some)
    }
}

type EvalFn<S> = Box<dyn Fn(&[S]) -> Result<SpectralState<S>> + Send + Sync>;
type JacobianFn<S> = Box<dyn Fn(&[S]) -> Result<Vec<SpectralState<S>>> + Send + Sync>;
type HessianFn<S> = Box<dyn Fn(&[S]) -> Result<Hessian<S>> + Send + Sync>;

/// Programmatically supplied chart.
pub struct CustomChart<S> {
    m: usize,
    domain: ChartDomain<S>,
    eval: EvalFn<S>,
    jacobian: Option<JacobianFn<S>>,
    hessian: Option<HessianFn<S>>,
}

impl<S: Real> CustomChart<S> {
    pub fn new(domain: ChartDomain<S>, eval: impl Fn(&[S]) -> Result<SpectralState<S>> + Send + Sync + 'static) -> Self {
        Self {
            m: domain.dim(),
            domain,
            eval: Box::new(eval),
            jacobian: None,
            hessian: None,
        }
    }

    pub fn with_jacobian(mut self, f: impl Fn(&[S]) -> Result<Vec<SpectralState<S>>> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Box::new(f));
        self
    }

    pub fn with_hessian(mut self, f: impl Fn(&[S]) -> Result<Hessian<S>> + Send + Sync + 'static) -> Self {
        self.hessian = Some(Box::new(f));
        self
    }
}

impl<S: Real> Parametrization<S> for CustomChart<S> {
    fn dim(&self) -> usize {
        self.m
    }

    fn domain(&self) -> &ChartDomain<S> {
        &self.domain
    }

    fn kind(&self) -> ChartKind {
        ChartKind::Custom
    }

    fn eval(&self, x: &[S]) -> Result<SpectralState<S>> {
        check_point(self.m, x)?;
        (self.eval)(x)
    }

    fn analytic_jacobian(&self, x: &[S]) -> Result<Option<Vec<SpectralState<S>>>> {
        self.jacobian.as_ref().map(|f| f(x)).transpose()
    }

    fn analytic_hessian(&self, x: &[S]) -> Result<Option<Hessian<S>>> {
        self.hessian.as_ref().map(|f| f(x)).transpose()
    }
}
