//! Run configuration files.
//!
//! A configuration is a flat TOML table. Unknown keys are rejected.
//!
//! ```toml
//! model = "fpu"
//! rule = "gauss_legendre_3"
//! h = 1e-3
//! t_end = 250.0
//! fpu_m = 3
//! fpu_omega = 50.0
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quadrature::{builtin_rule, QuadratureRule};
use crate::sync::ForceMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `V = ½λq²` in one dimension, starting from `(1, 0)`.
    Harmonic,
    SingleParticle,
    /// Alternating stiff/soft FPU chain.
    Fpu,
    FpuSlowFast,
    String,
    InhomWave,
}

impl ModelKind {
    pub fn is_slow_fast(self) -> bool {
        matches!(self, ModelKind::FpuSlowFast | ModelKind::InhomWave)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// ℓ₁ error against the closed-form single-particle solution.
    L1VsReference,
    /// L∞ error of the asynchronous scheme against a synchronous run at `h_F`.
    LinfVsSync,
    /// Largest pseudo-energy deviation.
    EnergyDrift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorReference {
    Sync,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ForceModeKey {
    Quadrature,
    ExactQuadratic,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelKind,
    #[serde(default = "default_rule")]
    pub rule: String,
    #[serde(default)]
    force_mode: Option<ForceModeKey>,
    pub h: Option<f64>,
    pub t_end: f64,
    pub t0: Option<f64>,
    pub eps_fly: Option<f64>,
    pub h_min: Option<f64>,
    pub max_steps: Option<usize>,
    #[serde(default = "default_stride")]
    pub record_stride: usize,

    pub harmonic_lambda: Option<f64>,
    pub fpu_m: Option<usize>,
    pub fpu_omega: Option<f64>,
    pub string_alpha: Option<f64>,
    pub string_n: Option<usize>,
    pub string_amplitude: Option<f64>,
    pub wave_n: Option<usize>,

    pub ladder: Option<Vec<f64>>,
    pub wave_n_ladder: Option<Vec<usize>>,
    pub metric: Option<Metric>,
    pub error_reference: Option<ErrorReference>,
    pub h_s: Option<f64>,
    pub h_f: Option<f64>,
    pub k: Option<usize>,
    pub hs_over_dx: Option<f64>,

    #[serde(default = "default_trajectory")]
    pub trajectory_csv: String,
    #[serde(default = "default_energy")]
    pub energy_csv: String,
    #[serde(default = "default_converge")]
    pub converge_csv: String,
    #[serde(default = "default_compare")]
    pub compare_csv: String,
}

fn default_rule() -> String {
    "midpoint".into()
}

fn default_stride() -> usize {
    1
}

fn default_trajectory() -> String {
    "trajectory.csv".into()
}

fn default_energy() -> String {
    "energy.csv".into()
}

fn default_converge() -> String {
    "converge.csv".into()
}

fn default_compare() -> String {
    "async_compare.csv".into()
}

fn positive(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(Error::Config(format!("`{name}` must be positive, got {x}"))),
        _ => Ok(()),
    }
}

fn require<T: Copy>(name: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing key `{name}`")))
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn force_mode(&self) -> ForceMode {
        match self.force_mode {
            Some(ForceModeKey::ExactQuadratic) => ForceMode::ExactQuadratic,
            _ => ForceMode::Quadrature,
        }
    }

    pub fn quadrature(&self) -> Result<QuadratureRule> {
        builtin_rule(&self.rule).map_err(|_| Error::Config(format!("unknown quadrature rule `{}`", self.rule)))
    }

    pub fn step(&self) -> Result<f64> {
        require("h", self.h)
    }

    fn validate(&self) -> Result<()> {
        self.quadrature()?;
        if !self.t_end.is_finite() {
            return Err(Error::Config("`t_end` must be finite".into()));
        }
        for (name, v) in [
            ("h", self.h),
            ("eps_fly", self.eps_fly),
            ("h_min", self.h_min),
            ("h_s", self.h_s),
            ("h_f", self.h_f),
            ("hs_over_dx", self.hs_over_dx),
            ("harmonic_lambda", self.harmonic_lambda),
            ("fpu_omega", self.fpu_omega),
            ("string_amplitude", self.string_amplitude),
        ] {
            positive(name, v)?;
        }
        if let Some(ladder) = &self.ladder {
            for &h in ladder {
                positive("ladder", Some(h))?;
            }
        }
        if self.k == Some(0) {
            return Err(Error::Config("`k` must be at least 1".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::Config("`record_stride` must be at least 1".into()));
        }
        match self.model {
            ModelKind::Fpu | ModelKind::FpuSlowFast => {
                require("fpu_m", self.fpu_m)?;
                require("fpu_omega", self.fpu_omega)?;
            }
            ModelKind::String => {
                require("string_alpha", self.string_alpha)?;
                require("string_n", self.string_n)?;
                require("string_amplitude", self.string_amplitude)?;
            }
            ModelKind::InhomWave => {
                if self.wave_n.is_none() && self.wave_n_ladder.is_none() {
                    return Err(Error::Config("missing key `wave_n`".into()));
                }
            }
            ModelKind::Harmonic | ModelKind::SingleParticle => {}
        }
        if self.force_mode() == ForceMode::ExactQuadratic
            && !(matches!(self.model, ModelKind::Harmonic | ModelKind::InhomWave)
                || (self.model == ModelKind::String && self.string_alpha == Some(0.0)))
        {
            return Err(Error::Config(
                "`force_mode = \"exact_quadratic\"` needs a quadratic potential".into(),
            ));
        }
        Ok(())
    }
}
