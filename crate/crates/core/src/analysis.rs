//! Error norms, convergence slopes and energy drift.

use crate::error::{Error, Result};
use crate::state::TrajectoryRecord;

/// Mean over recorded nodes `n ≥ 1` of the Euclidean position error
/// `|q^n - q_ref(t^n)|`. A record holding only the initial node reports
/// the error at that node.
pub fn l1_error<F>(traj: &TrajectoryRecord, reference: F) -> Result<f64>
where
    F: Fn(f64) -> Vec<f64>,
{
    if traj.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let skip = usize::from(traj.len() > 1);
    let mut sum = 0.0;
    for (t, s) in traj.times.iter().zip(&traj.states).skip(skip) {
        let r = reference(*t);
        if r.len() != s.q.len() {
            return Err(Error::DimensionMismatch { expected: s.q.len(), got: r.len() });
        }
        sum += s.q.iter().zip(&r).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    }
    Ok(sum / (traj.len() - skip) as f64)
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn max_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest max-norm position difference over the nodes the two records
/// share (times matched to a relative 1e-9).
pub fn linf_error(a: &TrajectoryRecord, b: &TrajectoryRecord) -> Result<f64> {
    let mut j = 0;
    let mut worst: Option<f64> = None;
    for (ta, sa) in a.times.iter().zip(&a.states) {
        while j < b.len() && b.times[j] < *ta && !same_time(b.times[j], *ta) {
            j += 1;
        }
        if j < b.len() && same_time(b.times[j], *ta) {
            let d = max_norm_diff(&sa.q, &b.states[j].q);
            worst = Some(worst.map_or(d, |w: f64| w.max(d)));
        }
    }
    worst.ok_or_else(|| Error::InvalidArgument("trajectories share no node".into()))
}

/// Largest max-norm position error against a reference over all recorded
/// nodes.
pub fn linf_error_vs<F>(traj: &TrajectoryRecord, reference: F) -> Result<f64>
where
    F: Fn(f64) -> Vec<f64>,
{
    if traj.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| max_norm_diff(&s.q, &reference(*t)))
        .fold(0.0, f64::max))
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn fit_order(hs: &[f64], errs: &[f64]) -> Result<f64> {
    if hs.len() != errs.len() {
        return Err(Error::DimensionMismatch { expected: hs.len(), got: errs.len() });
    }
    if hs.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 points to fit an order, got {}", hs.len())));
    }
    if hs.iter().chain(errs).any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidArgument("fit_order needs positive finite data".into()));
    }
    let x: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= 1e-24 * n {
        return Err(Error::InvalidArgument("step sizes have no spread".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    Pseudo,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    pub max_abs: f64,
    /// `max_abs / |E⁰|`, or `max_abs` itself when `|E⁰| < 1e-14`.
    pub max_rel: f64,
}

/// `max_n |E^n - E⁰|` over the recorded nodes.
pub fn energy_drift(traj: &TrajectoryRecord, which: EnergyKind) -> Result<Drift> {
    let pick = |e: &crate::state::NodeEnergies| match which {
        EnergyKind::Pseudo => e.pseudo,
        EnergyKind::Discrete => e.discrete,
    };
    let e0 = traj
        .energies
        .first()
        .map(pick)
        .ok_or_else(|| Error::InvalidArgument("no energies recorded".into()))?;
    let max_abs = traj.energies.iter().map(|e| (pick(e) - e0).abs()).fold(0.0, f64::max);
    let max_rel = if e0.abs() < 1e-14 { max_abs } else { max_abs / e0.abs() };
    Ok(Drift { max_abs, max_rel })
}
