//! Linear stability: the step-size bound `h < 2√(μ/λ)` for quadratic
//! potentials, Hessian spectral estimates and empirical probing.

use crate::error::{Error, Result};
use crate::mass::MassMatrix;
use crate::potential::Potential;
use crate::quadrature::BuiltinRule;
use crate::state::PhaseState;
use crate::sync::{ForceMode, Scheme, StepWorkspace};

/// Relative change of the Rayleigh quotient at which power iteration stops.
pub const POWER_ITERATION_TOL: f64 = 1e-9;

/// Amplification factor beyond which a probed run counts as diverged.
pub const PROBE_GROWTH_LIMIT: f64 = 1e3;

/// Strict upper bound `2√(μ_min / λ_max)` on stable constant steps, where
/// `λ_max` is the largest Hessian eigenvalue and `μ_min` the smallest mass
/// eigenvalue.
pub fn cfl_max_step(lambda_max: f64, mu_min: f64) -> Result<f64> {
    if !(lambda_max > 0.0) || !(mu_min > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "CFL bound needs positive λ and μ, got λ = {lambda_max}, μ = {mu_min}"
        )));
    }
    Ok(2.0 * (mu_min / lambda_max).sqrt())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest eigenvalue of `D²V(q_ref)` by power iteration.
///
/// Uses the analytic Hessian action when available and central gradient
/// differences otherwise. The start vector is fixed, so results are
/// reproducible.
pub fn estimate_hessian_extremes<P: Potential + ?Sized>(potential: &P, q_ref: &[f64], iters: usize) -> Result<f64> {
    let n = potential.dim();
    if q_ref.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: q_ref.len() });
    }
    let mut seed: u64 = 0x5eed;
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let scale = norm(&v);
    v.iter_mut().for_each(|x| *x /= scale);

    let q_scale = q_ref.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let mut hv = vec![0.0; n];
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    let mut apply = |v: &[f64], hv: &mut [f64]| {
        if !potential.hessian_action(q_ref, v, hv) {
            let eps = 1e-6 * q_scale;
            let shifted = |s: f64| q_ref.iter().zip(v).map(|(q, d)| q + s * eps * d).collect::<Vec<_>>();
            potential.gradient(&shifted(1.0), &mut plus);
            potential.gradient(&shifted(-1.0), &mut minus);
            for ((h, a), b) in hv.iter_mut().zip(&plus).zip(&minus) {
                *h = (a - b) / (2.0 * eps);
            }
        }
    };

    let mut rho = f64::NAN;
    for _ in 0..iters {
        apply(&v, &mut hv);
        let next: f64 = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
        let len = norm(&hv);
        if len == 0.0 {
            return Ok(0.0);
        }
        if (next - rho).abs() <= POWER_ITERATION_TOL * next.abs() {
            return Ok(next);
        }
        rho = next;
        v.iter_mut().zip(&hv).for_each(|(x, h)| *x = h / len);
    }
    Err(Error::NoConvergence { iters, last: rho })
}

/// Result of [`probe_stability`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityOutcome {
    Bounded,
    /// Growth limit exceeded (or blow-up) at this step.
    Diverged(usize),
}

/// Runs `steps` constant steps of size `h` with exact force integration and
/// reports whether `|Z^n| ≤ 10³ |Z⁰|` held throughout, with
/// `Z = (q, p^{n-1/2}, p^{n+1/2})`.
pub fn probe_stability<P: Potential + ?Sized>(
    potential: &P,
    mass: &MassMatrix,
    state0: &PhaseState,
    h: f64,
    steps: usize,
) -> Result<StabilityOutcome> {
    let rule = BuiltinRule::Midpoint.rule();
    let scheme = Scheme::new(potential, mass, &rule, ForceMode::ExactQuadratic)?;
    let size = |s: &PhaseState| (s.q.iter().chain(&s.p_prev_half).chain(&s.p_next_half).map(|x| x * x).sum::<f64>()).sqrt();
    let limit = PROBE_GROWTH_LIMIT * size(state0);
    let mut ws = StepWorkspace::new(state0.dim());
    let mut current = state0.clone();
    let mut next = state0.clone();
    for n in 1..=steps {
        match scheme.step_into(&current, h, &mut next, &mut ws) {
            Ok(()) => {}
            Err(Error::BlowUp { .. }) => return Ok(StabilityOutcome::Diverged(n)),
            Err(e) => return Err(e),
        }
        if !(size(&next) <= limit) {
            return Ok(StabilityOutcome::Diverged(n));
        }
        std::mem::swap(&mut current, &mut next);
    }
    Ok(StabilityOutcome::Bounded)
}

/// Bisects `[lo, hi]` for the largest step that [`probe_stability`] reports
/// as bounded. `lo` must be stable and `hi` unstable.
pub fn stability_threshold<P: Potential + ?Sized>(
    potential: &P,
    mass: &MassMatrix,
    state0: &PhaseState,
    mut lo: f64,
    mut hi: f64,
    steps: usize,
    bisections: usize,
) -> Result<f64> {
    let bounded = |h| probe_stability(potential, mass, state0, h, steps).map(|o| o == StabilityOutcome::Bounded);
    if !bounded(lo)? || bounded(hi)? {
        return Err(Error::InvalidArgument(format!("[{lo}, {hi}] does not bracket the stability threshold")));
    }
    for _ in 0..bisections {
        let mid = 0.5 * (lo + hi);
        if bounded(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
