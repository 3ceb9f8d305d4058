use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::basis::{hermite_basis, HermiteBasis, MultiIndex};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    Hermite,
    SineGrid,
}

impl BasisTag {
    pub fn name(self) -> &'static str {
        match self {
            BasisTag::Hermite => "hermite",
            BasisTag::SineGrid => "sine_grid",
        }
    }
}

/// Layout of a coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub enum Basis {
    /// Hermite functions `h_n`, `|n| <= order`.
    Hermite(Arc<HermiteBasis>),
    /// Nodal values at `points` interior points of a uniform grid on (0, 1)
    /// with homogeneous Dirichlet boundary.
    Grid { points: usize },
}

impl Basis {
    pub fn tag(&self) -> BasisTag {
        match self {
            Basis::Hermite(_) => BasisTag::Hermite,
            Basis::Grid { .. } => BasisTag::SineGrid,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Basis::Hermite(b) => b.len(),
            Basis::Grid { points } => *points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Truncated coefficient vector over a declared basis.
///
/// Coefficients outside the declared truncation read as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState<S> {
    basis: Basis,
    coeffs: Vec<S>,
}

impl<S: Real> SpectralState<S> {
    pub fn zeros_hermite(d: usize, order: usize) -> Self {
        let basis = hermite_basis(d, order);
        let coeffs = vec![S::zero(); basis.len()];
        Self {
            basis: Basis::Hermite(basis),
            coeffs,
        }
    }

    pub fn zeros_grid(points: usize) -> Self {
        Self {
            basis: Basis::Grid { points },
            coeffs: vec![S::zero(); points],
        }
    }

    pub fn zeros_like(other: &Self) -> Self {
        Self {
            basis: other.basis.clone(),
            coeffs: vec![S::zero(); other.coeffs.len()],
        }
    }

    pub fn from_hermite_coeffs(d: usize, order: usize, coeffs: Vec<S>) -> Result<Self> {
        let basis = hermite_basis(d, order);
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            basis: Basis::Hermite(basis),
            coeffs,
        })
    }

    pub fn from_grid_values(values: Vec<S>) -> Self {
        Self {
            basis: Basis::Grid { points: values.len() },
            coeffs: values,
        }
    }

    /// The basis element `h_n` truncated at `order`.
    pub fn hermite_function(d: usize, order: usize, n: &MultiIndex) -> Result<Self> {
        let mut s = Self::zeros_hermite(d, order);
        s.set(n, S::one())?;
        Ok(s)
    }

    /// Single-index shorthand for `d = 1`.
    pub fn hermite_function_1d(order: usize, n: usize) -> Self {
        Self::hermite_function(1, order, &MultiIndex::new(vec![n])).expect("index within truncation")
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn tag(&self) -> BasisTag {
        self.basis.tag()
    }

    pub fn hermite_basis(&self) -> Option<&Arc<HermiteBasis>> {
        match &self.basis {
            Basis::Hermite(b) => Some(b),
            Basis::Grid { .. } => None,
        }
    }

    /// Spatial dimension (1 for grid states).
    pub fn dim(&self) -> usize {
        match &self.basis {
            Basis::Hermite(b) => b.dim(),
            Basis::Grid { .. } => 1,
        }
    }

    /// Truncation order `N` (number of grid points for grid states).
    pub fn order(&self) -> usize {
        match &self.basis {
            Basis::Hermite(b) => b.order(),
            Basis::Grid { points } => *points,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [S] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient at `n`; indices outside the truncation read as zero.
    pub fn get(&self, n: &MultiIndex) -> S {
        match &self.basis {
            Basis::Hermite(b) => b.position(n).map_or(S::zero(), |k| self.coeffs[k]),
            Basis::Grid { points } => match n.entries() {
                [i] if i < points => self.coeffs[*i],
                _ => S::zero(),
            },
        }
    }

    pub fn set(&mut self, n: &MultiIndex, value: S) -> Result<()> {
        let k = match &self.basis {
            Basis::Hermite(b) => {
                if n.dim() != b.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: b.dim(),
                        found: n.dim(),
                    });
                }
                b.position(n)
            }
            Basis::Grid { points } => match n.entries() {
                [i] if i < points => Some(*i),
                _ => None,
            },
        };
        let k = k.ok_or_else(|| Error::BasisMismatch(format!("index {n} outside truncation")))?;
        self.coeffs[k] = value;
        Ok(())
    }

    /// Iterates `(multi-index, coefficient)` over the declared truncation.
    pub fn entries(&self) -> Vec<(MultiIndex, S)> {
        match &self.basis {
            Basis::Hermite(b) => b.indices().iter().cloned().zip(self.coeffs.iter().copied()).collect(),
            Basis::Grid { .. } => self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (MultiIndex::new(vec![i]), c))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == S::zero())
    }

    /// Plain Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> S {
        self.coeffs.iter().map(|&c| c * c).sum::<S>().sqrt()
    }

    /// Checks that `other` lives in a compatible basis (same tag and dimension;
    /// Hermite orders may differ).
    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        match (&self.basis, &other.basis) {
            (Basis::Hermite(a), Basis::Hermite(b)) if a.dim() == b.dim() => Ok(()),
            (Basis::Hermite(a), Basis::Hermite(b)) => Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            }),
            (Basis::Grid { points: a }, Basis::Grid { points: b }) if a == b => Ok(()),
            (Basis::Grid { points: a }, Basis::Grid { points: b }) => Err(Error::DimensionMismatch {
                expected: *a,
                found: *b,
            }),
            _ => Err(Error::BasisMismatch(format!(
                "{} vs {}",
                self.tag().name(),
                other.tag().name()
            ))),
        }
    }

    /// Re-truncates a Hermite state to `order` (zero-padding when raising).
    /// Grid states are returned unchanged.
    pub fn with_order(&self, order: usize) -> Self {
        match &self.basis {
            Basis::Hermite(b) => {
                let basis = hermite_basis(b.dim(), order);
                let mut coeffs = self.coeffs.clone();
                coeffs.resize(basis.len(), S::zero());
                Self {
                    basis: Basis::Hermite(basis),
                    coeffs,
                }
            }
            Basis::Grid { .. } => self.clone(),
        }
    }

    /// Splits into the part of order `<= order` and the remainder above it
    /// (the remainder keeps the original truncation).
    pub fn split_at_order(&self, order: usize) -> (Self, Self) {
        match &self.basis {
            Basis::Hermite(_) if order < self.order() => {
                let low = self.with_order(order);
                let mut high = self.clone();
                for c in high.coeffs[..low.len()].iter_mut() {
                    *c = S::zero();
                }
                (low, high)
            }
            _ => (self.clone(), Self::zeros_like(self)),
        }
    }

    /// `self += alpha * other`, raising the truncation of `self` if needed.
    pub fn axpy(&mut self, alpha: S, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        if other.len() > self.len() {
            *self = self.with_order(other.order());
        }
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: S) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|&c| alpha * c).collect(),
        }
    }

    /// `sum_k weights[k] * states[k]`; all states must be compatible.
    pub fn linear_combination(weights: &[S], states: &[Self]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::BasisMismatch("empty linear combination".into()))?;
        let mut out = Self::zeros_like(first);
        for (&w, s) in weights.iter().zip(states) {
            out.axpy(w, s)?;
        }
        Ok(out)
    }
}

impl<S: Real> Add for &SpectralState<S> {
    type Output = SpectralState<S>;
    fn add(self, rhs: Self) -> SpectralState<S> {
        let mut out = self.clone();
        out.axpy(S::one(), rhs).expect("incompatible states in addition");
        out
    }
}

impl<S: Real> Sub for &SpectralState<S> {
    type Output = SpectralState<S>;
    fn sub(self, rhs: Self) -> SpectralState<S> {
        let mut out = self.clone();
        out.axpy(-S::one(), rhs).expect("incompatible states in subtraction");
        out
    }
}

impl<S: Real> Mul<S> for &SpectralState<S> {
    type Output = SpectralState<S>;
    fn mul(self, rhs: S) -> SpectralState<S> {
        self.scaled(rhs)
    }
}

impl<S: Real> Neg for &SpectralState<S> {
    type Output = SpectralState<S>;
    fn neg(self) -> SpectralState<S> {
        self.scaled(-S::one())
    }
}

/// JSON form of a state or dual: entries sorted lexicographically by multi-index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub d: usize,
    #[serde(rename = "N")]
    pub order: usize,
    pub basis_tag: BasisTag,
    pub entries: Vec<(MultiIndex, f64)>,
}

impl<S: Real> SpectralState<S> {
    pub fn to_doc(&self) -> StateDoc {
        let mut entries: Vec<(MultiIndex, f64)> = self
            .entries()
            .into_iter()
            .map(|(n, c)| (n, c.as_f64()))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        StateDoc {
            d: self.dim(),
            order: self.order(),
            basis_tag: self.tag(),
            entries,
        }
    }

    /// Builds a state from its JSON form. Entries may be sparse; omitted
    /// indices are zero.
    pub fn from_doc(doc: &StateDoc) -> Result<Self> {
        let mut s = match doc.basis_tag {
            BasisTag::Hermite => Self::zeros_hermite(doc.d, doc.order),
            BasisTag::SineGrid => {
                if doc.d != 1 {
                    return Err(Error::DimensionMismatch { expected: 1, found: doc.d });
                }
                Self::zeros_grid(doc.order)
            }
        };
        for (n, v) in &doc.entries {
            s.set(n, S::lit(*v))?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undeclared_indices_read_zero() {
        let s = SpectralState::<f64>::hermite_function_1d(4, 2);
        assert_eq!(s.get(&MultiIndex::new(vec![2])), 1.0);
        assert_eq!(s.get(&MultiIndex::new(vec![9])), 0.0);
        assert_eq!(s.get(&MultiIndex::new(vec![1, 1])), 0.0);
    }

    #[test]
    fn addition_pads_orders() {
        let a = SpectralState::<f64>::hermite_function_1d(2, 1);
        let b = SpectralState::<f64>::hermite_function_1d(5, 5);
        let c = &a + &b;
        assert_eq!(c.order(), 5);
        assert_eq!(c.coeffs(), &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn split_separates_spill() {
        let mut s = SpectralState::<f64>::zeros_hermite(1, 4);
        s.coeffs_mut().copy_from_slice(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let (low, high) = s.split_at_order(2);
        assert_eq!(low.coeffs(), &[1.0, 2.0, 3.0]);
        assert_eq!(high.coeffs(), &[0.0, 0.0, 0.0, 4.0, 5.0]);
    }

    #[test]
    fn grid_and_hermite_do_not_mix() {
        let mut a = SpectralState::<f64>::zeros_grid(3);
        let b = SpectralState::<f64>::zeros_hermite(1, 2);
        assert!(a.axpy(1.0, &b).is_err());
    }

    #[test]
    fn doc_round_trip_sorted() {
        let mut s = SpectralState::<f64>::zeros_hermite(2, 2);
        s.set(&MultiIndex::new(vec![1, 1]), 0.5).unwrap();
        s.set(&MultiIndex::new(vec![0, 2]), -1.0).unwrap();
        let doc = s.to_doc();
        let keys: Vec<_> = doc.entries.iter().map(|e| e.0.clone()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let json = serde_json::to_string(&doc).unwrap();
        let back: SpectralState<f64> = SpectralState::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
