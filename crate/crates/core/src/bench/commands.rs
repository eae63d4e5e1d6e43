//! The `run`, `converge` and `async-compare` commands.

use std::path::Path;

use rayon::prelude::*;

use super::config::{Config, ErrorReference, Metric, ModelKind};
use super::csv::{energy_table, fmt_f64, trajectory_table, Table};
use crate::analysis::{energy_drift, fit_order, l1_error, linf_error, EnergyKind};
use crate::asynchronous::{run_async, AsyncState, SlowFastSystem};
use crate::error::{Error, Result};
use crate::mass::MassMatrix;
use crate::models::{
    fpu_model, inhom_wave_model, string_model, FpuConfig, Harmonic, InhomWaveConfig, SingleParticle, StringConfig,
};
use crate::potential::Potential;
use crate::quadrature::QuadratureRule;
use crate::state::{PhaseState, TrajectoryRecord};
use crate::sync::{Scheme, StepControl};

/// Environment variable bounding the worker pool.
pub const THREADS_ENV: &str = "HAMJUMP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Converge,
    AsyncCompare,
}

/// `2` for configuration errors, `3` for failures during integration.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::UnknownRule(_)
        | Error::AsymmetricRule(_)
        | Error::Partition(_)
        | Error::DimensionMismatch { .. } => 2,
        _ => 3,
    }
}

/// Loads `config`, runs `command` and writes its CSV files into `out_dir`.
///
/// Nothing is written unless the computation succeeds.
pub fn execute(command: Command, config: &Path, out_dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let cfg = Config::load(config)?;
    let pool = thread_pool()?;
    let outputs: Vec<(String, Table)> = pool.install(|| -> Result<_> {
        Ok(match command {
            Command::Run => {
                let rec = run(&cfg)?;
                vec![
                    (cfg.trajectory_csv.clone(), trajectory_table(&rec)),
                    (cfg.energy_csv.clone(), energy_table(&rec)),
                ]
            }
            Command::Converge => vec![(cfg.converge_csv.clone(), converge(&cfg)?.table())],
            Command::AsyncCompare => vec![(cfg.compare_csv.clone(), compare_table(&async_compare(&cfg)?))],
        })
    })?;
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (name, table) in outputs {
        let path = out_dir.join(name);
        table.write(&path)?;
        written.push(path);
    }
    Ok(written)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// A synchronous problem assembled from a configuration.
pub struct Problem {
    pub potential: Box<dyn Potential>,
    pub mass: MassMatrix,
    pub state0: PhaseState,
}

impl Problem {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let t0 = default_t0(cfg);
        let (potential, mass, q0, p0): (Box<dyn Potential>, MassMatrix, Vec<f64>, Vec<f64>) = match cfg.model {
            ModelKind::Harmonic => (
                Box::new(Harmonic::new(cfg.harmonic_lambda.unwrap_or(1.0))),
                MassMatrix::identity(1),
                vec![1.0],
                vec![0.0],
            ),
            ModelKind::SingleParticle => {
                let (q, p) = SingleParticle::reference(t0);
                (Box::new(SingleParticle::new()), MassMatrix::identity(1), vec![q], vec![p])
            }
            ModelKind::Fpu | ModelKind::FpuSlowFast => {
                let fpu = fpu_model(fpu_config(cfg)?)?;
                let (q, p) = fpu.initial_state();
                (Box::new(fpu.potential().clone()), MassMatrix::identity(fpu.dim()), q, p)
            }
            ModelKind::String => {
                let model = string_model(string_config(cfg)?)?;
                let (q, p) = model.initial_state();
                (Box::new(model.potential.clone()), model.mass.clone(), q, p)
            }
            ModelKind::InhomWave => {
                let wave = inhom_wave_model(InhomWaveConfig::new(require(cfg.wave_n, "wave_n")?))?;
                let (q, p) = wave.initial_state();
                (Box::new(wave.potential().clone()), MassMatrix::identity(wave.dim()), q, p)
            }
        };
        Ok(Self {
            potential,
            mass,
            state0: PhaseState::new(&q0, &p0, t0)?,
        })
    }

    fn run(&self, cfg: &Config, rule: &QuadratureRule, control: StepControl, stride: usize) -> Result<TrajectoryRecord> {
        Scheme::new(&self.potential, &self.mass, rule, cfg.force_mode())?.run(&self.state0, control, cfg.t_end, stride)
    }
}

fn require<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing key `{name}`")))
}

fn default_t0(cfg: &Config) -> f64 {
    cfg.t0.unwrap_or(match cfg.model {
        // the closed-form solution starts at a non-Lipschitz rest point
        ModelKind::SingleParticle => 0.5,
        _ => 0.0,
    })
}

fn fpu_config(cfg: &Config) -> Result<FpuConfig> {
    let m = require(cfg.fpu_m, "fpu_m")?;
    let omega = require(cfg.fpu_omega, "fpu_omega")?;
    Ok(match cfg.model {
        ModelKind::FpuSlowFast => FpuConfig::slow_fast(m, omega),
        _ => FpuConfig::alternating(m, omega),
    })
}

fn string_config(cfg: &Config) -> Result<StringConfig> {
    Ok(StringConfig::new(
        require(cfg.string_alpha, "string_alpha")?,
        require(cfg.string_n, "string_n")?,
        require(cfg.string_amplitude, "string_amplitude")?,
    ))
}

fn control(cfg: &Config, h: f64) -> StepControl {
    let mut c = match cfg.eps_fly {
        Some(eps) => StepControl::adaptive(h, eps),
        None => StepControl::fixed(h),
    };
    if let Some(h_min) = cfg.h_min {
        c = c.with_h_min(h_min);
    }
    if let Some(max) = cfg.max_steps {
        c = c.with_max_steps(max);
    }
    c
}

/// A slow-fast system with its initial data.
pub struct SlowFastProblem {
    pub system: SlowFastSystem,
    pub state0: AsyncState,
}

/// Builds the slow-fast system of `cfg` with ratio `k` and coarse step `h_s`.
pub fn slow_fast_problem(cfg: &Config, wave_n: Option<usize>, k: usize, h_s: f64) -> Result<SlowFastProblem> {
    let t0 = default_t0(cfg);
    let (system, q0, p0) = match cfg.model {
        ModelKind::FpuSlowFast => {
            let fpu = fpu_model(fpu_config(cfg)?)?;
            let (q, p) = fpu.initial_state();
            (fpu.slow_fast_system(k, h_s)?, q, p)
        }
        ModelKind::InhomWave => {
            let n = require(wave_n.or(cfg.wave_n), "wave_n")?;
            let wave = inhom_wave_model(InhomWaveConfig::new(n))?;
            let (q, p) = wave.initial_state();
            (wave.slow_fast_system(k, h_s)?, q, p)
        }
        other => return Err(Error::Config(format!("model `{other:?}` has no slow-fast partition"))),
    };
    Ok(SlowFastProblem {
        system,
        state0: AsyncState::new(&q0, &p0, t0)?,
    })
}

/// Runs one integration as configured.
///
/// Slow-fast models with `k` set run asynchronously with coarse step
/// `h_s` (or `h`); everything else runs the synchronous scheme with step
/// `h`, adaptive when `eps_fly` is set.
pub fn run(cfg: &Config) -> Result<TrajectoryRecord> {
    let rule = cfg.quadrature()?;
    match cfg.k {
        Some(k) if cfg.model.is_slow_fast() => {
            let h_s = coarse_step(cfg, cfg.wave_n)?;
            let sf = slow_fast_problem(cfg, None, k, h_s)?;
            run_async(&sf.state0, &sf.system, &rule, cfg.t_end, cfg.record_stride)
        }
        _ => {
            let problem = Problem::from_config(cfg)?;
            problem.run(cfg, &rule, control(cfg, cfg.step()?), cfg.record_stride)
        }
    }
}

/// Coarse step from `h_s`, `h` or `hs_over_dx`, rounded so that the run
/// spans a whole number of coarse steps.
fn coarse_step(cfg: &Config, wave_n: Option<usize>) -> Result<f64> {
    let raw = match (cfg.h_s.or(cfg.h), cfg.hs_over_dx, wave_n) {
        (Some(h), _, _) => h,
        (None, Some(ratio), Some(n)) => ratio / n as f64,
        _ => return Err(Error::Config("missing key `h_s`".into())),
    };
    Ok(whole_steps(cfg.t_end - default_t0(cfg), raw))
}

fn whole_steps(span: f64, h: f64) -> f64 {
    let steps = (span / h).round().max(1.0);
    span / steps
}

/// Errors of a step ladder and the fitted order.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub hs: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

impl Convergence {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["h", "error"]);
        for (h, e) in self.hs.iter().zip(&self.errors) {
            t.push_floats(&[*h, *e]);
        }
        t.push_labelled(&["slope"], &[self.slope]);
        t
    }
}

/// Runs every step of `ladder` (in parallel) and fits `log error` against
/// `log h`.
///
/// `l1_vs_reference` needs the single-particle model; `energy_drift`
/// reports the largest absolute pseudo-energy deviation of a synchronous
/// run; `linf_vs_sync` treats the ladder as coarse steps `h_S` and compares
/// the asynchronous scheme with a synchronous run at `h_F`, where `h_F` is
/// either the fixed `h_f` or `h_S / k`.
pub fn converge(cfg: &Config) -> Result<Convergence> {
    let ladder = require(cfg.ladder.clone(), "ladder")?;
    if ladder.len() < 3 {
        return Err(Error::Config(format!("a ladder needs at least 3 steps to fit an order, got {}", ladder.len())));
    }
    let metric = require(cfg.metric, "metric")?;
    let rule = cfg.quadrature()?;
    if metric == Metric::L1VsReference && cfg.model != ModelKind::SingleParticle {
        return Err(Error::Config("`l1_vs_reference` needs `model = \"single_particle\"`".into()));
    }
    if metric == Metric::LinfVsSync {
        if !cfg.model.is_slow_fast() {
            return Err(Error::Config("`linf_vs_sync` needs a slow-fast model".into()));
        }
        if cfg.h_f.is_none() && cfg.k.is_none() {
            return Err(Error::Config("`linf_vs_sync` needs `h_f` or `k`".into()));
        }
    }

    let fixed_reference = match (metric, cfg.h_f) {
        (Metric::LinfVsSync, Some(h_f)) => Some(sync_on_full(cfg, h_f, 1, &rule)?),
        _ => None,
    };

    let errors = ladder
        .par_iter()
        .map(|&h| -> Result<f64> {
            match metric {
                Metric::L1VsReference => {
                    let rec = Problem::from_config(cfg)?.run(cfg, &rule, control(cfg, h), 1)?;
                    l1_error(&rec, |t| vec![SingleParticle::reference(t).0])
                }
                Metric::EnergyDrift => {
                    let rec = Problem::from_config(cfg)?.run(cfg, &rule, control(cfg, h), 1)?;
                    Ok(energy_drift(&rec, EnergyKind::Pseudo)?.max_abs)
                }
                Metric::LinfVsSync => {
                    let (k, h_f) = match cfg.h_f {
                        Some(h_f) => (step_ratio(h, h_f)?, h_f),
                        None => {
                            let k = cfg.k.unwrap_or(1);
                            (k, h / k as f64)
                        }
                    };
                    let sf = slow_fast_problem(cfg, None, k, h)?;
                    let rec = run_async(&sf.state0, &sf.system, &rule, cfg.t_end, 1)?;
                    match &fixed_reference {
                        Some(reference) => linf_error(&rec, reference),
                        None => linf_error(&rec, &sync_on_full(cfg, h_f, k, &rule)?),
                    }
                }
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let slope = fit_order(&ladder, &errors)?;
    Ok(Convergence {
        hs: ladder,
        errors,
        slope,
    })
}

fn step_ratio(h_s: f64, h_f: f64) -> Result<usize> {
    let k = (h_s / h_f).round();
    if k < 1.0 || (k * h_f - h_s).abs() > 1e-9 * h_s {
        return Err(Error::Config(format!("h_S = {h_s} is not a multiple of h_F = {h_f}")));
    }
    Ok(k as usize)
}

/// Synchronous run of the full slow-fast potential at `h_f`, recording
/// every `stride`-th node.
fn sync_on_full(cfg: &Config, h_f: f64, stride: usize, rule: &QuadratureRule) -> Result<TrajectoryRecord> {
    sync_on_full_n(cfg, None, h_f, stride, rule)
}

fn sync_on_full_n(
    cfg: &Config,
    wave_n: Option<usize>,
    h_f: f64,
    stride: usize,
    rule: &QuadratureRule,
) -> Result<TrajectoryRecord> {
    let sf = slow_fast_problem(cfg, wave_n, 1, h_f)?;
    let full = sf.system.full_potential();
    let mass = sf.system.mass_matrix();
    let scheme = Scheme::new(&full, &mass, rule, cfg.force_mode())?;
    scheme.run(&sf.state0.to_phase_state(), StepControl::fixed(h_f), cfg.t_end, stride)
}

/// One row of the synchronous/asynchronous comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub scheme: &'static str,
    pub h_s: f64,
    pub h_f: f64,
    pub force_evals: u64,
    pub linf_error: f64,
    /// Relative pseudo-energy drift over the coarse nodes.
    pub coarse_pseudo_drift: f64,
    /// Predicted async/sync force-evaluation ratio (1 for the synchronous row).
    pub eta_predicted: f64,
}

pub fn compare_table(rows: &[CompareRow]) -> Table {
    let mut t = Table::new(&[
        "scheme",
        "h_S",
        "h_F",
        "force_evals",
        "linf_error",
        "coarse_pseudo_drift",
        "eta_predicted",
    ]);
    for r in rows {
        t.push_labelled(
            &[r.scheme, &fmt_f64(r.h_s), &fmt_f64(r.h_f), &r.force_evals.to_string()],
            &[r.linf_error, r.coarse_pseudo_drift, r.eta_predicted],
        );
    }
    t
}

/// `(K(|V_F| + |V_M|) + |V_S|) / (K(|V_F| + |V_M| + |V_S|))` in interaction
/// counts.
pub fn predicted_eta(sys: &SlowFastSystem) -> f64 {
    let k = sys.k() as f64;
    let fine = (sys.v_f().interaction_count() + sys.v_m().interaction_count()) as f64;
    let slow = sys.v_s().interaction_count() as f64;
    (k * fine + slow) / (k * (fine + slow))
}

/// Synchronous (at `h_F`) and asynchronous runs for each ladder entry.
///
/// The ladder is `wave_n_ladder` for the wave (with `h_S = hs_over_dx·Δx`)
/// or `ladder` (coarse steps) otherwise; `k` defaults to 10. Errors are
/// measured at `t_end` against the exact solution (`error_reference =
/// "exact"`, wave only) or as the L∞ distance of the asynchronous run from
/// the synchronous one over the coarse nodes (`"sync"`, whose own row
/// then reports zero).
pub fn async_compare(cfg: &Config) -> Result<Vec<CompareRow>> {
    if !cfg.model.is_slow_fast() {
        return Err(Error::Config("async-compare needs a slow-fast model".into()));
    }
    let rule = cfg.quadrature()?;
    let k = cfg.k.unwrap_or(10);
    let reference = cfg.error_reference.unwrap_or(match cfg.model {
        ModelKind::InhomWave => ErrorReference::Exact,
        _ => ErrorReference::Sync,
    });
    if reference == ErrorReference::Exact && cfg.model != ModelKind::InhomWave {
        return Err(Error::Config("`error_reference = \"exact\"` needs `model = \"inhom_wave\"`".into()));
    }
    let entries: Vec<(Option<usize>, f64)> = match cfg.model {
        ModelKind::InhomWave => {
            let ns = match (&cfg.wave_n_ladder, cfg.wave_n) {
                (Some(ns), _) => ns.clone(),
                (None, Some(n)) => vec![n],
                (None, None) => return Err(Error::Config("missing key `wave_n_ladder`".into())),
            };
            let ratio = cfg.hs_over_dx.unwrap_or(0.5);
            ns.into_iter()
                .map(|n| (Some(n), whole_steps(cfg.t_end - default_t0(cfg), ratio / n as f64)))
                .collect()
        }
        _ => match (&cfg.ladder, cfg.h_s) {
            (Some(l), _) => l.iter().map(|&h| (None, h)).collect(),
            (None, Some(h)) => vec![(None, h)],
            (None, None) => return Err(Error::Config("missing key `ladder` or `h_s`".into())),
        },
    };

    let rows = entries
        .par_iter()
        .map(|&(n, h_s)| -> Result<[CompareRow; 2]> {
            let h_f = h_s / k as f64;
            let sf = slow_fast_problem(cfg, n, k, h_s)?;
            let arec = run_async(&sf.state0, &sf.system, &rule, cfg.t_end, 1)?;
            let srec = sync_on_full_n(cfg, n, h_f, k, &rule)?;
            let (sync_err, async_err) = match reference {
                ErrorReference::Sync => (0.0, linf_error(&arec, &srec)?),
                ErrorReference::Exact => {
                    let wave = inhom_wave_model(InhomWaveConfig::new(require(n, "wave_n")?))?;
                    let exact = wave.exact(cfg.t_end);
                    let err = |rec: &TrajectoryRecord| {
                        rec.final_positions()
                            .unwrap_or(&[])
                            .iter()
                            .zip(&exact)
                            .map(|(a, b)| (a - b).abs())
                            .fold(0.0, f64::max)
                    };
                    (err(&srec), err(&arec))
                }
            };
            Ok([
                CompareRow {
                    scheme: "sync",
                    h_s: h_f,
                    h_f,
                    force_evals: srec.total_force_evals(),
                    linf_error: sync_err,
                    coarse_pseudo_drift: energy_drift(&srec, EnergyKind::Pseudo)?.max_rel,
                    eta_predicted: 1.0,
                },
                CompareRow {
                    scheme: "async",
                    h_s,
                    h_f,
                    force_evals: arec.total_force_evals(),
                    linf_error: async_err,
                    coarse_pseudo_drift: energy_drift(&arec, EnergyKind::Pseudo)?.max_rel,
                    eta_predicted: predicted_eta(&sf.system),
                },
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}
