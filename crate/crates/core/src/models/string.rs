//! Geometrically nonlinear string on `(0, 1)` discretized with P1 finite
//! elements.
//!
//! Each of the `N` interior nodes carries a planar displacement
//! `(u₁, u₂)`; the state vector is direction-blocked: all `u₁` values, then
//! all `u₂` values. Both ends are clamped.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mass::{p1_mass_block, MassMatrix};
use crate::potential::Potential;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringConfig {
    pub alpha: f64,
    pub n: usize,
    pub amplitude: f64,
}

impl StringConfig {
    pub fn new(alpha: f64, n: usize, amplitude: f64) -> Self {
        Self { alpha, n, amplitude }
    }

    pub fn dx(&self) -> f64 {
        1.0 / (self.n as f64 + 1.0)
    }
}

/// Direction `(u₁, u₂)` of the initial arch.
pub const INITIAL_DIRECTION: [f64; 2] = [0.5, 1.0];

/// Pointwise energy density
/// `V_pt(u₁, u₂) = (u₁² + u₂²)/2 - α(√((1+u₁)² + u₂²) - (1+u₁))`.
pub fn point_energy(alpha: f64, u1: f64, u2: f64) -> f64 {
    let a = 1.0 + u1;
    0.5 * (u1 * u1 + u2 * u2) - alpha * (a.hypot(u2) - a)
}

/// `∇V_pt(u₁, u₂)`.
pub fn point_gradient(alpha: f64, u1: f64, u2: f64) -> [f64; 2] {
    let a = 1.0 + u1;
    let r = a.hypot(u2);
    [u1 - alpha * (a / r - 1.0), u2 - alpha * u2 / r]
}

fn point_hessian(alpha: f64, u1: f64, u2: f64) -> [[f64; 2]; 2] {
    let a = 1.0 + u1;
    let r = a.hypot(u2);
    let r3 = r * r * r;
    let off = alpha * a * u2 / r3;
    [[1.0 - alpha * u2 * u2 / r3, off], [off, 1.0 - alpha * a * a / r3]]
}

/// The discrete potential `Σ_e Δx V_pt(g_e)` where `g_e` is the slope of the
/// interpolant on element `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct StringPotential {
    alpha: f64,
    n: usize,
    dx: f64,
}

impl StringPotential {
    fn node(&self, u: &[f64], j: usize) -> [f64; 2] {
        // nodes 0 and n + 1 are clamped
        if j == 0 || j > self.n {
            [0.0, 0.0]
        } else {
            [u[j - 1], u[self.n + j - 1]]
        }
    }

    fn slope(&self, u: &[f64], e: usize) -> [f64; 2] {
        let a = self.node(u, e);
        let b = self.node(u, e + 1);
        [(b[0] - a[0]) / self.dx, (b[1] - a[1]) / self.dx]
    }

    /// Assembles `out_j = F_{j-1} - F_j` from per-element vectors `F_e`.
    fn assemble(&self, out: &mut [f64], mut element: impl FnMut(usize) -> [f64; 2]) {
        let n = self.n;
        let mut prev = element(0);
        for j in 1..=n {
            let next = element(j);
            out[j - 1] = prev[0] - next[0];
            out[n + j - 1] = prev[1] - next[1];
            prev = next;
        }
    }
}

impl Potential for StringPotential {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn value(&self, q: &[f64]) -> f64 {
        (0..=self.n)
            .map(|e| {
                let g = self.slope(q, e);
                self.dx * point_energy(self.alpha, g[0], g[1])
            })
            .sum()
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        self.assemble(out, |e| {
            let g = self.slope(q, e);
            point_gradient(self.alpha, g[0], g[1])
        });
    }

    fn hessian_action(&self, q: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        self.assemble(out, |e| {
            let g = self.slope(q, e);
            let d = self.slope(v, e);
            let h = point_hessian(self.alpha, g[0], g[1]);
            [h[0][0] * d[0] + h[0][1] * d[1], h[1][0] * d[0] + h[1][1] * d[1]]
        });
        true
    }

    fn is_quadratic(&self) -> bool {
        self.alpha == 0.0
    }

    fn check_domain(&self, q: &[f64]) -> std::result::Result<(), String> {
        for e in 0..=self.n {
            let g = self.slope(q, e);
            if !((1.0 + g[0]).hypot(g[1]) > 0.0) {
                return Err(format!("string element {e} is fully compressed"));
            }
        }
        Ok(())
    }

    fn interaction_count(&self) -> usize {
        self.n + 1
    }
}

/// Potential, mass matrix and initial data of the string.
#[derive(Debug, Clone)]
pub struct StringModel {
    pub config: StringConfig,
    pub potential: StringPotential,
    pub mass: MassMatrix,
}

/// Builds the FEM string described by `config`.
pub fn string_model(config: StringConfig) -> Result<StringModel> {
    if !(0.0..1.0).contains(&config.alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {} outside [0, 1)", config.alpha)));
    }
    if config.n == 0 {
        return Err(Error::InvalidArgument("the string needs at least one interior node".into()));
    }
    let n = config.n;
    let dx = config.dx();
    let block = p1_mass_block(n, dx);
    let mut dense = vec![0.0; 4 * n * n];
    for c in 0..2 {
        for i in 0..n {
            for j in 0..n {
                dense[(c * n + i) * 2 * n + c * n + j] = block[i * n + j];
            }
        }
    }
    Ok(StringModel {
        config,
        potential: StringPotential {
            alpha: config.alpha,
            n,
            dx,
        },
        mass: MassMatrix::dense(2 * n, dense)?,
    })
}

impl StringModel {
    pub fn node_positions(&self) -> Vec<f64> {
        let dx = self.config.dx();
        (1..=self.config.n).map(|j| j as f64 * dx).collect()
    }

    /// Sine arch `u⁰(x) = amplitude · sin(πx) · (½, 1)` at rest.
    ///
    /// A purely longitudinal arch (`u₂ = 0`) keeps the string linear, so the
    /// arch is tilted out of the axis.
    pub fn initial_state(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.config.n;
        let mut q = vec![0.0; 2 * n];
        for (j, x) in self.node_positions().into_iter().enumerate() {
            let s = self.config.amplitude * (PI * x).sin();
            q[j] = INITIAL_DIRECTION[0] * s;
            q[n + j] = INITIAL_DIRECTION[1] * s;
        }
        (q, vec![0.0; 2 * n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::gradient_check;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*seed >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn point_gradient_matches_finite_differences() {
        let alpha = 0.99;
        let mut seed = 7;
        for _ in 0..100 {
            let u1 = lcg(&mut seed) - 0.5;
            let u2 = 2.0 * lcg(&mut seed) - 1.0;
            let g = point_gradient(alpha, u1, u2);
            let h = 1e-6;
            let fd1 = (point_energy(alpha, u1 + h, u2) - point_energy(alpha, u1 - h, u2)) / (2.0 * h);
            let fd2 = (point_energy(alpha, u1, u2 + h) - point_energy(alpha, u1, u2 - h)) / (2.0 * h);
            let scale = g[0].abs().max(g[1].abs()).max(1.0);
            assert!((g[0] - fd1).abs() / scale < 1e-6);
            assert!((g[1] - fd2).abs() / scale < 1e-6);
        }
    }

    #[test]
    fn point_gradient_on_the_axis() {
        let alpha = 0.7;
        let (u1, u2) = (0.4, 1e-9);
        let g = point_gradient(alpha, u1, u2);
        assert!((g[0] - u1).abs() < 1e-12);
        assert!((g[1] - u2 * (1.0 - alpha / (1.0 + u1))).abs() < 1e-20);
    }

    #[test]
    fn linear_case_is_stiffness_action() {
        let model = string_model(StringConfig::new(0.0, 5, 0.1)).unwrap();
        assert!(model.potential.is_quadratic());
        let q: Vec<f64> = (0..10).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut g = vec![0.0; 10];
        model.potential.gradient(&q, &mut g);
        let dx = model.config.dx();
        for c in 0..2 {
            for j in 0..5 {
                let at = |k: isize| if (0..5).contains(&k) { q[c * 5 + k as usize] } else { 0.0 };
                let k = j as isize;
                let expected = (2.0 * at(k) - at(k - 1) - at(k + 1)) / dx;
                assert!((g[c * 5 + j] - expected).abs() < 1e-12);
            }
        }
        let mut hv = vec![0.0; 10];
        assert!(model.potential.hessian_action(&vec![0.3; 10], &q, &mut hv));
        for (a, b) in hv.iter().zip(&g) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn nonlinear_gradient_and_hessian() {
        let model = string_model(StringConfig::new(0.99, 9, 0.3)).unwrap();
        let q: Vec<f64> = (0..18).map(|i| 0.05 * (i as f64 * 0.71).cos()).collect();
        assert!(gradient_check(&model.potential, &q) < 1e-6);
        let v: Vec<f64> = (0..18).map(|i| (i as f64 * 1.3).sin()).collect();
        let mut hv = vec![0.0; 18];
        model.potential.hessian_action(&q, &v, &mut hv);
        let eps = 1e-6;
        let shift = |s: f64| -> Vec<f64> {
            let x: Vec<f64> = q.iter().zip(&v).map(|(a, b)| a + s * b).collect();
            let mut g = vec![0.0; 18];
            model.potential.gradient(&x, &mut g);
            g
        };
        let (gp, gm) = (shift(eps), shift(-eps));
        for i in 0..18 {
            assert!((hv[i] - (gp[i] - gm[i]) / (2.0 * eps)).abs() < 1e-4 * hv[i].abs().max(1.0));
        }
    }

    #[test]
    fn initial_data_and_mass() {
        let model = string_model(StringConfig::new(0.99, 99, 0.3)).unwrap();
        let (q, p) = model.initial_state();
        assert!((q[49] - 0.15).abs() < 1e-15);
        assert!((q[99 + 49] - 0.3).abs() < 1e-15);
        assert!(p.iter().all(|&x| x == 0.0));
        assert_eq!(model.mass.dim(), 198);
    }

    #[test]
    fn rejects_invalid_alpha() {
        assert!(string_model(StringConfig::new(1.0, 9, 0.1)).is_err());
        assert!(string_model(StringConfig::new(-0.1, 9, 0.1)).is_err());
    }
}
