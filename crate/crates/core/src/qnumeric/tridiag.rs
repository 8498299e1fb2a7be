//! Symmetric tridiagonal eigensolver: Sturm-count bisection for the
//! eigenvalues, inverse iteration for the vectors.
//!
//! Bisection runs to the last representable digit instead of stopping at
//! `eps * ||T||`, so small eigenvalues of strongly graded matrices (diagonal
//! entries growing by many orders of magnitude towards the ends) keep full
//! relative accuracy.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Eigen(format!(
                "inconsistent tridiagonal sizes {} and {}",
                diag.len(),
                off.len()
            )));
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::Eigen("non-finite matrix entry".into()));
        }
        Ok(SymTridiag { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn pivmin(&self) -> f64 {
        let emax = self.off.iter().map(|e| e * e).fold(1.0, f64::max);
        f64::MIN_POSITIVE * emax
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            d = (self.diag[i] - x) - self.off[i - 1] * self.off[i - 1] / d;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        let pad = f64::EPSILON * lo.abs().max(hi.abs()) * n as f64 + self.pivmin();
        (lo - pad, hi + pad)
    }

    /// `k`-th smallest eigenvalue (zero based), bisected to adjacent floats.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::Index(format!("eigenvalue {k} of a {}-point matrix", self.len())));
        }
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..2200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(hi);
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Eigen(format!("bisection for eigenvalue {k} did not converge")))
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Rayleigh quotient `x^T T x / x^T x`.
    pub fn rayleigh(&self, x: &[f64]) -> f64 {
        let tx = self.apply(x);
        dot(x, &tx) / dot(x, x)
    }

    /// Unit eigenvector for an eigenvalue approximation `lambda`.
    pub fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
        let n = self.len();
        let lu = ShiftedLu::new(self, lambda);
        let mut x: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64;
                (0.7 * t + 0.3).sin() + 0.5 * (1.3 * t).cos()
            })
            .collect();
        normalize(&mut x)?;
        for _ in 0..4 {
            x = lu.solve(&x);
            orthogonalize(&mut x, previous);
            normalize(&mut x)?;
        }
        orthogonalize(&mut x, previous);
        normalize(&mut x)?;
        // fixed sign: largest component positive
        let imax = (0..n).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).unwrap_or(0);
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(x)
    }

    /// The `count` lowest eigenpairs.
    pub fn lowest(&self, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let count = count.min(self.len());
        let mut values = Vec::with_capacity(count);
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
        for k in 0..count {
            let lambda = self.eigenvalue(k)?;
            let v = self.eigenvector(lambda, &vectors)?;
            values.push(lambda);
            vectors.push(v);
        }
        Ok((values, vectors))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> Result<()> {
    let nrm = dot(x, x).sqrt();
    if !(nrm > 0.0) || !nrm.is_finite() {
        return Err(Error::Eigen("inverse iteration produced a degenerate vector".into()));
    }
    x.iter_mut().for_each(|v| *v /= nrm);
    Ok(())
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(x, q);
            x.iter_mut().zip(q).for_each(|(v, qv)| *v -= c * qv);
        }
    }
}

/// LU factorization with partial pivoting of `T - lambda I`.
struct ShiftedLu {
    mult: Vec<f64>,
    pivot: Vec<bool>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl ShiftedLu {
    fn new(t: &SymTridiag, lambda: f64) -> Self {
        let n = t.len();
        let tiny = f64::EPSILON
            * t.diag.iter().chain(&t.off).map(|v| v.abs()).fold(lambda.abs(), f64::max);
        let mut b: Vec<f64> = t.diag.iter().map(|d| d - lambda).collect();
        let mut c = t.off.clone();
        let mut a = t.off.clone();
        let mut d2 = vec![0.0; n.saturating_sub(2)];
        let mut pivot = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if b[i].abs() >= a[i].abs() {
                if b[i] == 0.0 {
                    b[i] = tiny;
                }
                let f = a[i] / b[i];
                a[i] = f;
                b[i + 1] -= f * c[i];
            } else {
                let f = b[i] / a[i];
                b[i] = a[i];
                a[i] = f;
                let tmp = c[i];
                c[i] = b[i + 1];
                b[i + 1] = tmp - f * b[i + 1];
                if i + 2 < n {
                    d2[i] = c[i + 1];
                    c[i + 1] = -f * d2[i];
                }
                pivot[i] = true;
            }
        }
        if b[n - 1] == 0.0 {
            b[n - 1] = tiny;
        }
        ShiftedLu { mult: a, pivot, u0: b, u1: c, u2: d2 }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.u0.len();
        let mut x = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.pivot[i] {
                let xi = x[i];
                x[i] = x[i + 1];
                x[i + 1] = xi - self.mult[i] * x[i + 1];
            } else {
                x[i + 1] -= self.mult[i] * x[i];
            }
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= self.u2[i] * x[i + 2];
            }
            x[i] = v / self.u0[i];
        }
        x
    }
}
