//! Small dense kernels: the chart dimension `m` is tiny, so row-major `Vec`
//! storage and textbook algorithms are all that is needed here.

use crate::scalar::Real;

/// Row-major square matrix of side `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Real> SquareMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Solves `self * x = rhs` for symmetric positive definite `self`.
    /// Returns `None` when the factorization hits a non-positive pivot.
    pub fn cholesky_solve(&self, rhs: &[S]) -> Option<Vec<S>> {
        let n = self.n;
        let mut l = vec![S::zero(); n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > S::zero()) {
                return None;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        let mut y = rhs.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = l[i * n + k] * y[k];
                y[i] -= t;
            }
            y[i] /= l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = l[k * n + i] * y[k];
                y[i] -= t;
            }
            y[i] /= l[i * n + i];
        }
        Some(y)
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<S> {
        let n = self.n;
        let mut a = self.data.clone();
        let eps = S::epsilon();
        for _sweep in 0..64 {
            let mut off = S::zero();
            let mut diag = S::zero();
            for i in 0..n {
                for j in 0..n {
                    let v = a[i * n + j] * a[i * n + j];
                    if i == j {
                        diag += v;
                    } else {
                        off += v;
                    }
                }
            }
            if off <= eps * eps * diag || off == S::zero() {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq == S::zero() {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = (aqq - app) / (S::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                    let c = S::one() / (t * t + S::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<S> = (0..n).map(|i| a[i * n + i]).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off.len() == diag.len() - 1`), by implicit QL with
/// Wilkinson shifts. Returned ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 200, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_matches_hand_solution() {
        let a = SquareMatrix::from_fn(2, |i, j| [[4.0, 2.0], [2.0, 3.0]][i][j]);
        let x: Vec<f64> = a.cholesky_solve(&[2.0, 1.0]).unwrap();
        // 4x + 2y = 2, 2x + 3y = 1 -> x = 0.5, y = 0
        assert!((x[0] - 0.5).abs() < 1e-15 && x[1].abs() < 1e-15);
    }

    #[test]
    fn cholesky_rejects_singular() {
        let a = SquareMatrix::from_fn(2, |_, _| 1.0f64);
        assert!(a.cholesky_solve(&[1.0, 1.0]).is_none());
    }

    #[test]
    fn jacobi_eigenvalues() {
        let a = SquareMatrix::from_fn(3, |i, j| [[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]][i][j]);
        let ev = a.symmetric_eigenvalues();
        let s2 = 2f64.sqrt();
        for (got, want) in ev.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiagonal_matches_closed_form() {
        // Toeplitz tridiagonal (2, -1): eigenvalues 2 - 2cos(k pi/(n+1)).
        let n = 12;
        let ev = tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]);
        for (k, got) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }
}
