//! Fermi–Pasta–Ulam chains of stiff harmonic and soft quartic springs.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::asynchronous::SlowFastSystem;
use crate::error::{Error, Result};
use crate::models::springs::{Spring, SpringLaw, SpringNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FpuLayout {
    /// Stiff and soft springs alternate along the chain.
    #[default]
    Alternating,
    /// `m` stiff springs on the left, `m + 1` soft springs on the right.
    SlowFast,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpuConfig {
    pub m: usize,
    pub omega: f64,
    pub layout: FpuLayout,
}

impl FpuConfig {
    pub fn alternating(m: usize, omega: f64) -> Self {
        Self {
            m,
            omega,
            layout: FpuLayout::Alternating,
        }
    }

    pub fn slow_fast(m: usize, omega: f64) -> Self {
        Self {
            m,
            omega,
            layout: FpuLayout::SlowFast,
        }
    }
}

/// A chain of `2m` unit-mass particles between two walls.
#[derive(Debug, Clone, PartialEq)]
pub struct Fpu {
    config: FpuConfig,
    potential: SpringNetwork,
}

/// Builds the FPU chain described by `config`.
pub fn fpu_model(config: FpuConfig) -> Result<Fpu> {
    if config.m == 0 || !(config.omega > 0.0) {
        return Err(Error::InvalidArgument(format!("invalid FPU configuration {config:?}")));
    }
    let m = config.m;
    let stiff = SpringLaw::Harmonic(0.5 * config.omega * config.omega);
    let soft = SpringLaw::Quartic(1.0);
    let wall = |i: usize, lo: usize, hi: usize| (i >= lo && i <= hi).then(|| i - 1);
    let mut springs = Vec::with_capacity(2 * m + 1);
    match config.layout {
        FpuLayout::Alternating => {
            // particles are numbered 1..=2m, index = number - 1
            for i in 1..=m {
                springs.push(Spring::new(Some(2 * i - 2), Some(2 * i - 1), stiff));
            }
            for i in 0..=m {
                springs.push(Spring::new(wall(2 * i, 1, 2 * m), wall(2 * i + 1, 1, 2 * m), soft));
            }
        }
        FpuLayout::SlowFast => {
            for i in 1..=m {
                springs.push(Spring::new(wall(i - 1, 1, 2 * m), Some(i - 1), stiff));
            }
            for i in m..=2 * m {
                springs.push(Spring::new(Some(i - 1), wall(i + 1, 1, 2 * m), soft));
            }
        }
    }
    Ok(Fpu {
        config,
        potential: SpringNetwork::new(2 * m, springs),
    })
}

impl Fpu {
    pub fn config(&self) -> FpuConfig {
        self.config
    }

    pub fn dim(&self) -> usize {
        2 * self.config.m
    }

    pub fn potential(&self) -> &SpringNetwork {
        &self.potential
    }

    /// Standard initial data.
    ///
    /// Alternating layout: `x_1 = 1, y_1 = 1, x_{m+1} = 1/ω, y_{m+1} = 1`,
    /// everything else zero, mapped back to `(q, p)`. Slow-fast layout: all
    /// particles at rest position with unit momentum.
    pub fn initial_state(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        match self.config.layout {
            FpuLayout::Alternating => {
                let m = self.config.m;
                let mut x = vec![0.0; n];
                let mut y = vec![0.0; n];
                x[0] = 1.0;
                y[0] = 1.0;
                x[m] = 1.0 / self.config.omega;
                y[m] = 1.0;
                (from_normal(&x), from_normal(&y))
            }
            FpuLayout::SlowFast => (vec![0.0; n], vec![1.0; n]),
        }
    }

    /// Energies `I_j = ½(y_{m+j}² + ω² x_{m+j}²)` of the stiff springs
    /// (alternating layout).
    pub fn oscillatory_energies(&self, q: &[f64], p: &[f64]) -> Vec<f64> {
        let m = self.config.m;
        let w2 = self.config.omega * self.config.omega;
        let x = to_normal(q);
        let y = to_normal(p);
        (0..m).map(|j| 0.5 * (y[m + j].powi(2) + w2 * x[m + j].powi(2))).collect()
    }

    /// `I = Σ_j I_j`.
    pub fn total_oscillatory_energy(&self, q: &[f64], p: &[f64]) -> f64 {
        self.oscillatory_energies(q, p).iter().sum()
    }

    /// Partition for the slow-fast layout: fast particles `1..m-1`, mixed
    /// particle `m`, slow particles `m+1..2m` (1-based).
    pub fn slow_fast_system(&self, k: usize, h_s: f64) -> Result<SlowFastSystem> {
        if self.config.layout != FpuLayout::SlowFast {
            return Err(Error::Partition("the alternating FPU layout has no slow-fast partition".into()));
        }
        let m = self.config.m;
        let fast: Vec<usize> = (0..m - 1).collect();
        let mixed = vec![m - 1];
        let slow: Vec<usize> = (m..2 * m).collect();
        let v_f = self.potential.filter(|s| matches!(s.law, SpringLaw::Harmonic(_)));
        let v_m = self
            .potential
            .filter(|s| matches!(s.law, SpringLaw::Quartic(_)) && s.left == Some(m - 1));
        let v_s = self
            .potential
            .filter(|s| matches!(s.law, SpringLaw::Quartic(_)) && s.left != Some(m - 1));
        SlowFastSystem::new(
            slow,
            mixed,
            fast,
            Box::new(v_s),
            Box::new(v_m),
            Box::new(v_f),
            vec![1.0; 2 * m],
            k,
            h_s,
        )
    }
}

/// `x_i = (q_{2i} + q_{2i-1})/√2`, `x_{m+i} = (q_{2i} - q_{2i-1})/√2`.
pub fn to_normal(q: &[f64]) -> Vec<f64> {
    let m = q.len() / 2;
    let mut x = vec![0.0; q.len()];
    for i in 0..m {
        let (a, b) = (q[2 * i], q[2 * i + 1]);
        x[i] = (b + a) * FRAC_1_SQRT_2;
        x[m + i] = (b - a) * FRAC_1_SQRT_2;
    }
    x
}

/// Inverse of [`to_normal`].
pub fn from_normal(x: &[f64]) -> Vec<f64> {
    let m = x.len() / 2;
    let mut q = vec![0.0; x.len()];
    for i in 0..m {
        q[2 * i] = (x[i] - x[m + i]) * FRAC_1_SQRT_2;
        q[2 * i + 1] = (x[i] + x[m + i]) * FRAC_1_SQRT_2;
    }
    q
}
