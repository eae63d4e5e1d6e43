//! Small analytic potentials used by examples and tests.

use crate::potential::Potential;

/// `V(q) = ½ Σ λ_i q_i²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Harmonic {
    stiffness: Vec<f64>,
}

impl Harmonic {
    /// One-dimensional oscillator with stiffness `lambda`.
    pub fn new(lambda: f64) -> Self {
        Self {
            stiffness: vec![lambda],
        }
    }

    pub fn with_stiffness(stiffness: Vec<f64>) -> Self {
        Self { stiffness }
    }
}

impl Potential for Harmonic {
    fn dim(&self) -> usize {
        self.stiffness.len()
    }

    fn value(&self, q: &[f64]) -> f64 {
        0.5 * self.stiffness.iter().zip(q).map(|(k, x)| k * x * x).sum::<f64>()
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        for ((g, k), x) in out.iter_mut().zip(&self.stiffness).zip(q) {
            *g = k * x;
        }
    }

    fn hessian_action(&self, _q: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        self.gradient(v, out);
        true
    }

    fn is_quadratic(&self) -> bool {
        true
    }
}

/// A constant potential: no forces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantPotential {
    dim: usize,
    value: f64,
}

impl ConstantPotential {
    pub fn new(dim: usize, value: f64) -> Self {
        Self { dim, value }
    }
}

impl Potential for ConstantPotential {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _q: &[f64]) -> f64 {
        self.value
    }

    fn gradient(&self, _q: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
    }

    fn hessian_action(&self, _q: &[f64], _v: &[f64], out: &mut [f64]) -> bool {
        out.iter_mut().for_each(|g| *g = 0.0);
        true
    }

    fn is_quadratic(&self) -> bool {
        true
    }
}

/// `V(q) = Σ q_i⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticWell {
    dim: usize,
}

impl QuarticWell {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl Potential for QuarticWell {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, q: &[f64]) -> f64 {
        q.iter().map(|x| x.powi(4)).sum()
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        for (g, x) in out.iter_mut().zip(q) {
            *g = 4.0 * x.powi(3);
        }
    }

    fn hessian_action(&self, q: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        for ((g, x), v) in out.iter_mut().zip(q).zip(v) {
            *g = 12.0 * x * x * v;
        }
        true
    }
}
