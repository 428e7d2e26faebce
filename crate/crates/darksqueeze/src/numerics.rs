//! Grids, spectral derivatives, quadrature rules and a 1-D minimizer shared by
//! the physics modules.

use std::f64::consts::PI;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[min, max)` (right endpoint excluded).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl UniformGrid {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    /// Symmetric grid `[-half, half)`.
    pub fn symmetric(half: f64, count: usize) -> Self {
        Self::new(-half, half, count)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max > self.min) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Grid(format!("empty or non-finite range [{}, {})", self.min, self.max)));
        }
        if self.count < 8 {
            return Err(Error::Grid(format!("too few points: {}", self.count)));
        }
        Ok(())
    }

    /// Extra requirements of the spectral grids: symmetric about 0, power-of-two size.
    pub fn validate_spectral(&self) -> Result<()> {
        self.validate()?;
        if (self.min + self.max).abs() > 1e-12 * self.max.abs() {
            return Err(Error::Grid("grid must be symmetric about 0".into()));
        }
        if !self.count.is_power_of_two() {
            return Err(Error::Grid(format!("count {} is not a power of two", self.count)));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.max - self.min) / self.count as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.count).map(|j| self.min + j as f64 * dx).collect()
    }

    pub fn length(&self) -> f64 {
        self.max - self.min
    }
}

/// Closed linspace including both endpoints.
pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![min],
        _ => {
            let m = (n - 1) as f64;
            (0..n).map(|i| (min * (m - i as f64) + max * i as f64) / m).collect()
        }
    }
}

/// FFT-based differentiation on a periodic grid.
pub struct Spectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl Spectral {
    pub fn new(grid: &UniformGrid) -> Self {
        let n = grid.count;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let base = 2.0 * PI / grid.length();
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                m * base
            })
            .collect();
        Self { n, forward, inverse, wavenumbers }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse transform including the 1/n normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / self.n as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    /// `order`-th derivative of periodic samples.
    pub fn derivative(&self, f: &[Complex64], order: u32) -> Vec<Complex64> {
        let mut buf = f.to_vec();
        self.forward(&mut buf);
        for (j, z) in buf.iter_mut().enumerate() {
            let k = self.wavenumbers[j];
            // the Nyquist mode carries no odd derivative
            if order % 2 == 1 && self.n % 2 == 0 && j == self.n / 2 {
                *z = Complex64::new(0.0, 0.0);
                continue;
            }
            *z *= Complex64::new(0.0, k).powu(order);
        }
        self.inverse(&mut buf);
        buf
    }

    /// Fraction of the spectral norm carried by the top quarter of wavenumbers.
    pub fn tail_fraction(&self, f: &[Complex64]) -> f64 {
        let mut buf = f.to_vec();
        self.forward(&mut buf);
        let kmax = self.wavenumbers.iter().fold(0.0f64, |a, &k| a.max(k.abs()));
        let (mut tail, mut total) = (0.0, 0.0);
        for (z, &k) in buf.iter().zip(&self.wavenumbers) {
            let e = z.norm_sqr();
            total += e;
            if k.abs() > 0.75 * kmax {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            (tail / total).sqrt()
        }
    }
}

/// Edge taper: 1 in the interior, smooth roll-off to 0 over `fraction` of the
/// domain at each end. The roll-off is the C^∞ step
/// `e^{-1/t}/(e^{-1/t} + e^{-1/(1-t)})`, so spectral derivatives of tapered
/// functions carry no Gibbs ringing from the taper.
pub fn edge_window(grid: &UniformGrid, fraction: f64) -> Vec<f64> {
    let width = fraction * grid.length();
    grid.points()
        .into_iter()
        .map(|x| {
            let d = (x - grid.min).min(grid.max - x);
            smooth_step(d / width)
        })
        .collect()
}

/// C^∞ step: 0 for t <= 0, 1 for t >= 1.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Mask of points inside the central `fraction` of the domain.
pub fn interior_mask(grid: &UniformGrid, fraction: f64) -> Vec<bool> {
    let centre = 0.5 * (grid.min + grid.max);
    let half = 0.5 * fraction * grid.length();
    grid.points().into_iter().map(|x| (x - centre).abs() <= half).collect()
}

/// Rectangle/trapezoid rule on a periodic grid.
pub fn periodic_sum<T>(values: impl Iterator<Item = T>, dx: f64) -> T
where
    T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
{
    values.sum::<T>() * dx
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(order.max(2))
        .expect("order >= 2")
        .as_node_weight_pairs()
        .to_vec()
}

/// Composite Gauss-Legendre nodes over consecutive panels given by `edges`.
pub fn composite_rule(edges: &[f64], order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let mut out = Vec::with_capacity(edges.len().saturating_sub(1) * order);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
        out.extend(rule.iter().map(|&(x, wt)| (mid + half * x, wt * half)));
    }
    out
}

/// Integrate a real function over `[a, b]` with `panels` equal Gauss-Legendre panels.
pub fn integrate(a: f64, b: f64, panels: usize, order: usize, f: impl Fn(f64) -> f64) -> f64 {
    let edges = linspace(a, b, panels + 1);
    composite_rule(&edges, order).into_iter().map(|(x, w)| w * f(x)).sum()
}

/// Complex counterpart of [`integrate`].
pub fn integrate_c(
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
    f: impl Fn(f64) -> Complex64,
) -> Complex64 {
    let edges = linspace(a, b, panels + 1);
    composite_rule(&edges, order).into_iter().map(|(x, w)| f(x) * w).sum()
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

pub fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

pub fn csch(x: f64) -> f64 {
    1.0 / x.sinh()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_derivative_of_gaussian() {
        let grid = UniformGrid::symmetric(20.0, 512);
        let sp = Spectral::new(&grid);
        let x = grid.points();
        let f: Vec<Complex64> = x.iter().map(|&x| Complex64::new((-x * x).exp(), 0.0)).collect();
        let d2 = sp.derivative(&f, 2);
        for (xi, d) in x.iter().zip(&d2) {
            let exact = (4.0 * xi * xi - 2.0) * (-xi * xi).exp();
            assert!((d.re - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let x = golden_section(|x| (x - 0.3).powi(2), -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn composite_rule_integrates_exponential() {
        let v = integrate(0.0, 3.0, 4, 16, |x| x.exp());
        assert!((v - (3f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let v = linspace(-2.0, 5.0, 8);
        assert_eq!(v[0], -2.0);
        assert_eq!(v[7], 5.0);
    }
}
