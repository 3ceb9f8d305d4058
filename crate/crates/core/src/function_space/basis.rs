//! Hermite multi-index bases in graded order.
//!
//! Multi-indices are enumerated by total order first and lexicographically
//! within each order. With that layout the basis of order `N` is a prefix of
//! the basis of any order `N' > N`, so raising or truncating the order of a
//! coefficient vector is a resize.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Tuple of non-negative integers indexing a tensor-product Hermite function.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        Self(entries)
    }

    pub fn zero(d: usize) -> Self {
        Self(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|n|`, the sum of the entries.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn raised(&self, axis: usize) -> Self {
        let mut e = self.0.clone();
        e[axis] += 1;
        Self(e)
    }

    pub fn lowered(&self, axis: usize) -> Option<Self> {
        let mut e = self.0.clone();
        e[axis] = e[axis].checked_sub(1)?;
        Some(Self(e))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// Number of multi-indices in `d` dimensions with `|n| <= order`, i.e. `C(order + d, d)`.
pub fn basis_size(d: usize, order: usize) -> usize {
    let mut c: usize = 1;
    for k in 1..=d {
        c = c * (order + k) / k;
    }
    c
}

/// The set `{ n : |n| <= order }` in graded order, with neighbour tables for
/// the ladder operators.
#[derive(Debug)]
pub struct HermiteBasis {
    d: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    /// `raise[axis][k]`: position of `indices[k] + e_axis` (valid in every basis of order > `order`).
    raise: Vec<Vec<usize>>,
    /// `lower[axis][k]`: position of `indices[k] - e_axis`, if that exists.
    lower: Vec<Vec<Option<usize>>>,
}

impl PartialEq for HermiteBasis {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.order == other.order
    }
}

fn graded_indices(d: usize, max_order: usize) -> Vec<MultiIndex> {
    fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if parts == 1 {
            prefix.push(total);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            compositions(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(basis_size(d, max_order));
    for t in 0..=max_order {
        compositions(t, d, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

impl HermiteBasis {
    fn build(d: usize, order: usize) -> Self {
        assert!(d >= 1, "spatial dimension must be at least 1");
        let all = graded_indices(d, order + 1);
        let lookup_all: HashMap<MultiIndex, usize> =
            all.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let size = basis_size(d, order);
        let indices: Vec<MultiIndex> = all[..size].to_vec();
        let raise = (0..d)
            .map(|axis| indices.iter().map(|n| lookup_all[&n.raised(axis)]).collect())
            .collect();
        let lower = (0..d)
            .map(|axis| {
                indices
                    .iter()
                    .map(|n| n.lowered(axis).map(|m| lookup_all[&m]))
                    .collect()
            })
            .collect();
        let lookup = indices.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        Self {
            d,
            order,
            indices,
            lookup,
            raise,
            lower,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, n: &MultiIndex) -> Option<usize> {
        self.lookup.get(n).copied()
    }

    pub(crate) fn raise_table(&self, axis: usize) -> &[usize] {
        &self.raise[axis]
    }

    pub(crate) fn lower_table(&self, axis: usize) -> &[Option<usize>] {
        &self.lower[axis]
    }

    /// Positions `[start, end)` of the multi-indices with `|n| == band`.
    pub fn band(&self, band: usize) -> std::ops::Range<usize> {
        let start = if band == 0 { 0 } else { basis_size(self.d, band - 1) };
        start..basis_size(self.d, band)
    }
}

/// Shared, cached basis for `(d, order)`.
pub fn hermite_basis(d: usize, order: usize) -> Arc<HermiteBasis> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<HermiteBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().expect("basis cache poisoned").get(&(d, order)) {
        return Arc::clone(b);
    }
    let built = Arc::new(HermiteBasis::build(d, order));
    let mut guard = cache.lock().expect("basis cache poisoned");
    Arc::clone(guard.entry((d, order)).or_insert(built))
}

/// Values `h_0(x), ..., h_{n_max}(x)` of the L²-normalized Hermite functions.
pub fn hermite_functions<S: Real>(n_max: usize, x: S) -> Vec<S> {
    let mut h = Vec::with_capacity(n_max + 1);
    let h0 = S::lit(std::f64::consts::PI).powf(S::lit(-0.25)) * (-(x * x) / S::lit(2.0)).exp();
    h.push(h0);
    if n_max >= 1 {
        h.push(S::lit(2f64.sqrt()) * x * h0);
    }
    for n in 1..n_max {
        let nf = S::from_usize_lossy(n);
        let next = (S::lit(2.0) / (nf + S::one())).sqrt() * x * h[n] - (nf / (nf + S::one())).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

/// Value of the tensor-product Hermite function `h_n(z)`.
pub fn hermite_function_at<S: Real>(n: &MultiIndex, z: &[S]) -> S {
    n.entries()
        .iter()
        .zip(z)
        .map(|(&k, &zi)| hermite_functions(k, zi)[k])
        .fold(S::one(), |acc, v| acc * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes() {
        assert_eq!(basis_size(1, 10), 11);
        assert_eq!(basis_size(2, 3), 10);
        assert_eq!(basis_size(3, 2), 10);
        assert_eq!(hermite_basis(2, 5).len(), 21);
    }

    #[test]
    fn graded_layout_is_prefix_closed() {
        let small = hermite_basis(2, 4);
        let big = hermite_basis(2, 9);
        for (k, n) in small.indices().iter().enumerate() {
            assert_eq!(big.position(n), Some(k));
        }
        for k in small.band(4) {
            assert_eq!(small.indices()[k].order(), 4);
        }
    }

    #[test]
    fn ladder_tables() {
        let b = hermite_basis(2, 3);
        let bigger = hermite_basis(2, 4);
        for (k, n) in b.indices().iter().enumerate() {
            for axis in 0..2 {
                assert_eq!(bigger.indices()[b.raise_table(axis)[k]], n.raised(axis));
                match n.lowered(axis) {
                    Some(m) => assert_eq!(b.indices()[b.lower_table(axis)[k].unwrap()], m),
                    None => assert!(b.lower_table(axis)[k].is_none()),
                }
            }
        }
    }

    #[test]
    fn h0_at_zero() {
        let h = hermite_functions(4, 0.0f64);
        assert!((h[0] - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
        assert_eq!(h[1], 0.0);
        assert_eq!(h[3], 0.0);
        // h_2(0) = -pi^{-1/4} / sqrt(2)
        assert!((h[2] + std::f64::consts::PI.powf(-0.25) / 2f64.sqrt()).abs() < 1e-15);
    }
}
