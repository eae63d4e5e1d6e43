//! Symmetric positive definite mass operators.
//!
//! Two storage variants are supported: a diagonal (lumped) mass and a dense
//! symmetric matrix. The dense variant is factored once, on first use, with a
//! banded Cholesky factorization whose bandwidth is detected from the
//! sparsity pattern, so tridiagonal finite element masses cost O(n) per solve.

use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Storage {
    Diagonal(Vec<f64>),
    Dense { n: usize, data: Vec<f64> },
}

/// Lower-triangular banded Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
struct BandedCholesky {
    n: usize,
    band: usize,
    // row i holds L[i][i-band..=i], padded with zeros on the left
    rows: Vec<f64>,
}

impl BandedCholesky {
    fn factor(n: usize, data: &[f64]) -> Result<Self> {
        let mut band = 0;
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != 0.0 {
                    band = band.max(i - j);
                }
            }
        }
        let w = band + 1;
        let mut rows = vec![0.0; n * w];
        let at = |i: usize, j: usize| i * w + (band - (i - j));
        for j in 0..n {
            let lo = j.saturating_sub(band);
            let mut d = data[j * n + j];
            for k in lo..j {
                let l = rows[at(j, k)];
                d -= l * l;
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::InvalidArgument(
                    "mass matrix is not positive definite".into(),
                ));
            }
            let djj = d.sqrt();
            rows[at(j, j)] = djj;
            for i in (j + 1)..n.min(j + band + 1) {
                let lo_i = i.saturating_sub(band).max(lo);
                let mut s = data[i * n + j];
                for k in lo_i..j {
                    s -= rows[at(i, k)] * rows[at(j, k)];
                }
                rows[at(i, j)] = s / djj;
            }
        }
        Ok(Self { n, band, rows })
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i * (self.band + 1) + (self.band - (i - j))]
    }

    /// Solves `L y = v` in place.
    fn forward(&self, y: &mut [f64]) {
        for i in 0..self.n {
            let lo = i.saturating_sub(self.band);
            let mut s = y[i];
            for k in lo..i {
                s -= self.entry(i, k) * y[k];
            }
            y[i] = s / self.entry(i, i);
        }
    }

    /// Solves `Lᵀ x = y` in place.
    fn backward(&self, x: &mut [f64]) {
        for i in (0..self.n).rev() {
            let hi = (i + self.band + 1).min(self.n);
            let mut s = x[i];
            for k in (i + 1)..hi {
                s -= self.entry(k, i) * x[k];
            }
            x[i] = s / self.entry(i, i);
        }
    }
}

/// Mass matrix `M` of a split Hamiltonian `½ pᵀM⁻¹p + V(q)`.
#[derive(Debug, Clone)]
pub struct MassMatrix {
    storage: Storage,
    factor: OnceLock<std::result::Result<BandedCholesky, Error>>,
    smallest: OnceLock<f64>,
}

impl MassMatrix {
    pub fn diagonal(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty mass matrix".into()));
        }
        if entries.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidArgument(
                "diagonal mass entries must be positive and finite".into(),
            ));
        }
        Ok(Self {
            storage: Storage::Diagonal(entries),
            factor: OnceLock::new(),
            smallest: OnceLock::new(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(vec![1.0; n]).expect("n > 0")
    }

    /// Dense symmetric matrix given in row-major order.
    pub fn dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("mass matrix"));
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > 1e-14 * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
                    return Err(Error::InvalidArgument(format!(
                        "mass matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            storage: Storage::Dense { n, data },
            factor: OnceLock::new(),
            smallest: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Diagonal(d) => d.len(),
            Storage::Dense { n, .. } => *n,
        }
    }

    /// Diagonal entries when the mass is stored diagonally.
    pub fn as_diagonal(&self) -> Option<&[f64]> {
        match &self.storage {
            Storage::Diagonal(d) => Some(d),
            Storage::Dense { .. } => None,
        }
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    fn cholesky(&self) -> Result<&BandedCholesky> {
        let Storage::Dense { n, data } = &self.storage else {
            unreachable!("diagonal masses are never factored")
        };
        self.factor
            .get_or_init(|| BandedCholesky::factor(*n, data))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `M v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v.len())?;
        Ok(match &self.storage {
            Storage::Diagonal(d) => d.iter().zip(v).map(|(m, x)| m * x).collect(),
            Storage::Dense { n, data } => (0..*n)
                .map(|i| data[i * n..(i + 1) * n].iter().zip(v).map(|(a, x)| a * x).sum())
                .collect(),
        })
    }

    /// `M⁻¹ v`.
    pub fn apply_inverse(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = v.to_vec();
        self.apply_inverse_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_inverse_in_place(&self, v: &mut [f64]) -> Result<()> {
        self.check(v.len())?;
        match &self.storage {
            Storage::Diagonal(d) => v.iter_mut().zip(d).for_each(|(x, m)| *x /= m),
            Storage::Dense { .. } => {
                let f = self.cholesky()?;
                f.forward(v);
                f.backward(v);
            }
        }
        Ok(())
    }

    /// `vᵀ M⁻¹ v = |M^{-1/2} v|²`, evaluated without a matrix square root.
    pub fn inv_sqrt_norm_sq(&self, v: &[f64]) -> Result<f64> {
        self.check(v.len())?;
        match &self.storage {
            Storage::Diagonal(d) => Ok(v.iter().zip(d).map(|(x, m)| x * x / m).sum()),
            Storage::Dense { .. } => {
                let mut y = v.to_vec();
                self.cholesky()?.forward(&mut y);
                Ok(y.iter().map(|x| x * x).sum())
            }
        }
    }

    /// `aᵀ M⁻¹ b`.
    pub fn inverse_inner(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check(a.len())?;
        self.check(b.len())?;
        match &self.storage {
            Storage::Diagonal(d) => Ok(a.iter().zip(b).zip(d).map(|((x, y), m)| x * y / m).sum()),
            Storage::Dense { .. } => {
                let f = self.cholesky()?;
                let mut ya = a.to_vec();
                let mut yb = b.to_vec();
                f.forward(&mut ya);
                f.forward(&mut yb);
                Ok(ya.iter().zip(&yb).map(|(x, y)| x * y).sum())
            }
        }
    }

    /// Smallest eigenvalue `μ`, computed once.
    pub fn smallest_eigenvalue(&self) -> f64 {
        *self.smallest.get_or_init(|| match &self.storage {
            Storage::Diagonal(d) => d.iter().copied().fold(f64::INFINITY, f64::min),
            Storage::Dense { n, data } => jacobi_eigenvalues(*n, data.clone())
                .into_iter()
                .fold(f64::INFINITY, f64::min),
        })
    }
}

/// Cyclic Jacobi eigenvalue iteration for a dense symmetric matrix.
fn jacobi_eigenvalues(n: usize, mut a: Vec<f64>) -> Vec<f64> {
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum();
        if off <= 1e-30 * diag {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
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
    (0..n).map(|i| a[i * n + i]).collect()
}

/// P1 finite element mass `Δx·tridiag(1/6, 2/3, 1/6)` of size `n`, row-major.
pub fn p1_mass_block(n: usize, dx: f64) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = dx * 2.0 / 3.0;
        if i + 1 < n {
            m[i * n + i + 1] = dx / 6.0;
            m[(i + 1) * n + i] = dx / 6.0;
        }
    }
    m
}
