//! Dense Chebyshev discretization of 𝓛 with homogeneous Dirichlet conditions,
//! used to count zero modes.
//!
//! A defective zero eigenvalue splits into a pair ±ε under discretization,
//! so the eigenvalue count near zero measures the algebraic multiplicity,
//! while the number of vanishing singular values measures the number of
//! independent zero-mode eigenvectors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct DenseSpec {
    /// Domain half-width L; nodes are L·cos(jπ/N).
    pub half_width: f64,
    /// Chebyshev degree N; the matrix has size 2(N−1).
    pub degree: usize,
    /// Eigenvalue radius counted as zero.
    pub eigen_tol: f64,
    /// Singular values below `singular_tol·σ_max` count as zero.
    pub singular_tol: f64,
}

impl Default for DenseSpec {
    fn default() -> Self {
        Self { half_width: 16.0, degree: 200, eigen_tol: 1e-4, singular_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeCount {
    pub gamma: f64,
    /// Eigenvalues with |λ| < eigen_tol (algebraic multiplicity).
    pub algebraic: usize,
    /// Vanishing singular values (geometric multiplicity).
    pub geometric: usize,
    pub near_zero_eigenvalues: Vec<Complex64>,
    pub smallest_singular_values: Vec<f64>,
    pub largest_singular_value: f64,
}

/// Chebyshev points x_j = cos(jπ/N) and the differentiation matrix.
pub fn chebyshev(n: usize) -> (Vec<f64>, DMatrix<f64>) {
    let x: Vec<f64> = (0..=n).map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
    let cw = |j: usize| {
        let base = if j == 0 || j == n { 2.0 } else { 1.0 };
        if j % 2 == 0 {
            base
        } else {
            -base
        }
    };
    let mut d = DMatrix::<f64>::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = cw(i) / cw(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    (x, d)
}

/// The 2(N−1)×2(N−1) complex matrix of 𝓛.
pub fn dense_operator(gamma: f64, spec: &DenseSpec) -> DMatrix<Complex64> {
    let n = spec.degree;
    let (xc, d) = chebyshev(n);
    let l = spec.half_width;
    let d1 = &d / l;
    let d2 = &d1 * &d1;
    let m = n - 1;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let mut a = DMatrix::<Complex64>::zeros(2 * m, 2 * m);
    for i in 0..m {
        let x = l * xc[i + 1];
        let t = x.tanh();
        let pot = 4.0 * t * t - 2.0 + 2.0 * gamma * gamma;
        let nn = c(t, gamma).powu(2);
        for j in 0..m {
            let kin = -d2[(i + 1, j + 1)];
            let drift = c(0.0, 2.0 * gamma * d1[(i + 1, j + 1)]);
            a[(i, j)] = c(kin, 0.0) + drift;
            a[(m + i, m + j)] = c(-kin, 0.0) + drift;
        }
        a[(i, i)] += pot;
        a[(m + i, m + i)] -= pot;
        a[(i, m + i)] = 2.0 * nn;
        a[(m + i, i)] = -2.0 * nn.conj();
    }
    a
}

pub fn count_zero_modes(gamma: f64, spec: &DenseSpec) -> Result<ZeroModeCount> {
    if spec.degree < 8 || !(spec.half_width > 0.0) {
        return Err(Error::Grid(format!("invalid dense spec {spec:?}")));
    }
    let a = dense_operator(gamma, spec);
    let eig = a
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Grid("Schur form did not converge".into()))?;
    let mut near: Vec<Complex64> = eig.iter().copied().filter(|z| z.norm() < spec.eigen_tol).collect();
    near.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    let smax = *sv.last().unwrap_or(&0.0);
    let geometric = sv.iter().filter(|&&s| s < spec.singular_tol * smax).count();
    Ok(ZeroModeCount {
        gamma,
        algebraic: near.len(),
        geometric,
        near_zero_eigenvalues: near,
        smallest_singular_values: sv.iter().take(4).copied().collect(),
        largest_singular_value: smax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_differentiates_cubic() {
        let (x, d) = chebyshev(12);
        let f = nalgebra::DVector::from_iterator(x.len(), x.iter().map(|v| v.powi(3)));
        let df = &d * f;
        for (i, xi) in x.iter().enumerate() {
            assert!((df[i] - 3.0 * xi * xi).abs() < 1e-10);
        }
    }
}
