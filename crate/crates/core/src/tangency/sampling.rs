use crate::error::{Error, Result};
use crate::manifold::ChartDomain;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Where in the chart domain the conditions are evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum SamplingSpec {
    /// 11 points per axis for `m ≤ 2`, otherwise 121 Halton points.
    Default,
    /// Cell-centred tensor lattice.
    Lattice { per_axis: usize },
    /// Leading points of the Halton sequence (prime bases).
    Halton { count: usize },
    Points { points: Vec<Vec<f64>> },
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec::Default
    }
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

impl SamplingSpec {
    pub fn points<S: Real>(&self, domain: &ChartDomain<S>) -> Result<Vec<Vec<S>>> {
        let m = domain.dim();
        let map = |unit: Vec<f64>| -> Vec<S> {
            unit.iter()
                .enumerate()
                .map(|(k, &u)| domain.lower()[k] + S::lit(u) * (domain.upper()[k] - domain.lower()[k]))
                .collect()
        };
        let pts: Vec<Vec<S>> = match self {
            SamplingSpec::Default if m <= 2 => return SamplingSpec::Lattice { per_axis: 11 }.points(domain),
            SamplingSpec::Default => return SamplingSpec::Halton { count: 121 }.points(domain),
            SamplingSpec::Lattice { per_axis } => {
                let n = *per_axis;
                let total = n.checked_pow(m as u32).filter(|&t| t <= 1 << 24).ok_or_else(|| {
                    Error::InvalidSampling(format!("lattice of {n}^{m} points is too large"))
                })?;
                (0..if n == 0 { 0 } else { total })
                    .map(|mut idx| {
                        let unit = (0..m)
                            .map(|_| {
                                let i = idx % n;
                                idx /= n;
                                (i as f64 + 0.5) / n as f64
                            })
                            .collect();
                        map(unit)
                    })
                    .collect()
            }
            SamplingSpec::Halton { count } => {
                if m > PRIMES.len() {
                    return Err(Error::InvalidSampling(format!("Halton sampling supports m <= {}", PRIMES.len())));
                }
                (1..=*count as u64)
                    .map(|i| map(PRIMES[..m].iter().map(|&b| radical_inverse(i, b)).collect()))
                    .collect()
            }
            SamplingSpec::Points { points } => {
                let mut out = Vec::with_capacity(points.len());
                for p in points {
                    if p.len() != m {
                        return Err(Error::InvalidSampling(format!("sample point {p:?} is not {m}-dimensional")));
                    }
                    let x: Vec<S> = p.iter().map(|&v| S::lit(v)).collect();
                    if !domain.contains(&x) {
                        return Err(Error::InvalidSampling(format!("sample point {p:?} lies outside the chart domain")));
                    }
                    out.push(x);
                }
                out
            }
        };
        if pts.is_empty() {
            return Err(Error::InvalidSampling("sampling spec produces no points".into()));
        }
        Ok(pts)
    }
}
