//! Linear wave equation on `(0, 1)` with wave speed 10 on the left half and
//! 1 on the right half, discretized by centred finite differences.
//!
//! Interior nodes `x_i = i Δx`, `i = 1..N-1`, carry unit masses; node `i` is
//! stored at index `i - 1`. Spring `i` joins nodes `i - 1` and `i` with
//! stiffness `ω²_{i-1/2} = (c(x_{i-1/2}) / Δx)²`.

use crate::asynchronous::SlowFastSystem;
use crate::error::{Error, Result};
use crate::models::springs::{SpringLaw, SpringNetwork};

pub const C_LEFT: f64 = 10.0;
pub const C_RIGHT: f64 = 1.0;
pub const INTERFACE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InhomWaveConfig {
    /// Number of grid cells.
    pub n: usize,
}

impl InhomWaveConfig {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n as f64
    }
}

pub fn wave_speed(x: f64) -> f64 {
    if x < INTERFACE {
        C_LEFT
    } else {
        C_RIGHT
    }
}

/// Initial displacement `10⁻² exp(-(20(x - 0.2))²)` on `(0, 0.5)`.
pub fn initial_displacement(x: f64) -> f64 {
    if x > 0.0 && x < INTERFACE {
        1e-2 * (-(20.0 * (x - 0.2)).powi(2)).exp()
    } else {
        0.0
    }
}

/// Initial velocity `-c₁ u⁰'(x)` of a pulse travelling right.
pub fn initial_velocity(x: f64) -> f64 {
    if x > 0.0 && x < INTERFACE {
        C_LEFT * 8.0 * (x - 0.2) * (-(20.0 * (x - 0.2)).powi(2)).exp()
    } else {
        0.0
    }
}

/// Reflection coefficient `(c₂ - c₁)/(c₁ + c₂)` seen from the left.
pub fn reflection_coefficient() -> f64 {
    (C_RIGHT - C_LEFT) / (C_LEFT + C_RIGHT)
}

/// Transmission coefficient `2c₁/(c₁ + c₂)`.
pub fn transmission_coefficient() -> f64 {
    2.0 * C_LEFT / (C_LEFT + C_RIGHT)
}

/// Closed-form displacement as a sum over successive reflections, valid
/// until the transmitted pulse reaches `x = 1`.
pub fn exact_displacement(x: f64, t: f64) -> f64 {
    let r = reflection_coefficient();
    let k_max = (C_LEFT * t).ceil() as i32 + 1;
    let u0 = initial_displacement;
    let mut sum = 0.0;
    let mut rk = 1.0;
    for k in 0..=k_max {
        let k_f = k as f64;
        sum += rk
            * if x < INTERFACE {
                u0(x + k_f - C_LEFT * t) - u0(k_f - x - C_LEFT * t)
            } else {
                u0(C_LEFT / C_RIGHT * (x - INTERFACE) + k_f + INTERFACE - C_LEFT * t)
            };
        rk *= r;
    }
    if x < INTERFACE {
        sum
    } else {
        transmission_coefficient() * sum
    }
}

#[derive(Debug, Clone)]
pub struct InhomWave {
    config: InhomWaveConfig,
    potential: SpringNetwork,
}

/// Builds the spring chain of the discretized wave equation.
pub fn inhom_wave_model(config: InhomWaveConfig) -> Result<InhomWave> {
    if config.n < 4 || config.n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "the wave grid needs an even number of cells ≥ 4, got {}",
            config.n
        )));
    }
    let dx = config.dx();
    let laws: Vec<SpringLaw> = (1..=config.n)
        .map(|i| {
            let omega = wave_speed((i as f64 - 0.5) * dx) / dx;
            SpringLaw::Harmonic(omega * omega)
        })
        .collect();
    Ok(InhomWave {
        config,
        potential: SpringNetwork::fixed_chain(&laws),
    })
}

impl InhomWave {
    pub fn config(&self) -> InhomWaveConfig {
        self.config
    }

    pub fn dim(&self) -> usize {
        self.config.n - 1
    }

    pub fn potential(&self) -> &SpringNetwork {
        &self.potential
    }

    pub fn node_positions(&self) -> Vec<f64> {
        let dx = self.config.dx();
        (1..self.config.n).map(|i| i as f64 * dx).collect()
    }

    pub fn initial_state(&self) -> (Vec<f64>, Vec<f64>) {
        let x = self.node_positions();
        (
            x.iter().map(|&x| initial_displacement(x)).collect(),
            x.iter().map(|&x| initial_velocity(x)).collect(),
        )
    }

    /// Exact displacement at every interior node.
    pub fn exact(&self, t: f64) -> Vec<f64> {
        self.node_positions().into_iter().map(|x| exact_displacement(x, t)).collect()
    }

    /// Step bound `2/√λ_max` with `λ_max → 4 (c₁/Δx)²`, i.e. `Δx / c₁`.
    pub fn cfl_bound(&self) -> f64 {
        self.config.dx() / C_LEFT
    }

    /// Fast nodes `x < 0.5`, the interface node as mixed, slow nodes `x > 0.5`.
    pub fn slow_fast_system(&self, k: usize, h_s: f64) -> Result<SlowFastSystem> {
        let half = self.config.n / 2;
        let dim = self.dim();
        // node i ↦ index i - 1; the interface node is `half`
        let mixed_idx = half - 1;
        let fast: Vec<usize> = (0..mixed_idx).collect();
        let slow: Vec<usize> = (half..dim).collect();
        let v_f = self.potential.filter(|s| s.right.is_some_and(|r| r <= mixed_idx));
        let v_m = self.potential.filter(|s| s.left == Some(mixed_idx));
        let v_s = self.potential.filter(|s| s.left.is_some_and(|l| l > mixed_idx));
        SlowFastSystem::new(
            slow,
            vec![mixed_idx],
            fast,
            Box::new(v_s),
            Box::new(v_m),
            Box::new(v_f),
            vec![1.0; dim],
            k,
            h_s,
        )
    }
}
