//! One particle in the potential `V(q) = 8((q-1)² - (q-1)^{3/2})`, `q ≥ 1`.
//!
//! With unit mass, `q(t) = sin⁴t + 1` solves `q̈ = -V'(q)`.

use crate::potential::Potential;

/// Positions below `1 - DOMAIN_SLACK` are rejected; between that and 1 the
/// offset `q - 1` is clamped to zero.
pub const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SingleParticle;

impl SingleParticle {
    pub fn new() -> Self {
        Self
    }

    /// `(q(t), p(t)) = (sin⁴t + 1, 4 sin³t cos t)`.
    pub fn reference(t: f64) -> (f64, f64) {
        let (s, c) = t.sin_cos();
        (s.powi(4) + 1.0, 4.0 * s.powi(3) * c)
    }

    fn offset(q: f64) -> f64 {
        (q - 1.0).max(0.0)
    }
}

impl Potential for SingleParticle {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, q: &[f64]) -> f64 {
        let u = Self::offset(q[0]);
        8.0 * (u * u - u * u.sqrt())
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        let u = Self::offset(q[0]);
        out[0] = 16.0 * u - 12.0 * u.sqrt();
    }

    fn check_domain(&self, q: &[f64]) -> Result<(), String> {
        if q[0] < 1.0 - DOMAIN_SLACK || q[0].is_nan() {
            Err(format!("single-particle position {} is below 1", q[0]))
        } else {
            Ok(())
        }
    }
}
