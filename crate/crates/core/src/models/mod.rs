//! Benchmark systems.

pub mod fpu;
pub mod simple;
pub mod single_particle;
pub mod springs;
pub mod string;
pub mod wave;

pub use fpu::{fpu_model, Fpu, FpuConfig, FpuLayout};
pub use simple::{ConstantPotential, Harmonic, QuarticWell};
pub use single_particle::SingleParticle;
pub use springs::{Spring, SpringLaw, SpringNetwork};
pub use string::{string_model, StringConfig, StringModel};
pub use wave::{inhom_wave_model, InhomWave, InhomWaveConfig};
