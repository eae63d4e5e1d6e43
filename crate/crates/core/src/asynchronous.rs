//! Asynchronous slow-fast variant of the scheme.
//!
//! Particles are split into slow (`S`), mixed (`M`) and fast (`F`) sets with
//! `V = V_S(q_S) + V_M(q_M, q_S) + V_F(q_F, q_M)`. Fast and mixed particles
//! take `K` fine steps `h_F = h_S / K` per coarse step `h_S` of the slow
//! particles. Mixed particles feel the slow ones along the slow free flight
//! of the current coarse interval; the slow particles receive the
//! accumulated `V_M` impulses at the end of the coarse step.

use crate::error::{Error, Result};
use crate::mass::MassMatrix;
use crate::potential::Potential;
use crate::quadrature::QuadratureRule;
use crate::state::{NodeEnergies, PhaseState, TrajectoryRecord};
use crate::sync::BLOW_UP_LIMIT;

/// Partitioned system with sub-potentials defined on the full configuration.
pub struct SlowFastSystem {
    slow: Vec<usize>,
    mixed: Vec<usize>,
    fast: Vec<usize>,
    fast_mixed: Vec<usize>,
    v_s: Box<dyn Potential>,
    v_m: Box<dyn Potential>,
    v_f: Box<dyn Potential>,
    masses: Vec<f64>,
    k: usize,
    h_s: f64,
}

impl std::fmt::Debug for SlowFastSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SlowFastSystem")
            .field("slow", &self.slow)
            .field("mixed", &self.mixed)
            .field("fast", &self.fast)
            .field("k", &self.k)
            .field("h_s", &self.h_s)
            .finish_non_exhaustive()
    }
}

impl SlowFastSystem {
    /// Validates the partition and the locality of the sub-potentials.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        slow: Vec<usize>,
        mixed: Vec<usize>,
        fast: Vec<usize>,
        v_s: Box<dyn Potential>,
        v_m: Box<dyn Potential>,
        v_f: Box<dyn Potential>,
        masses: Vec<f64>,
        k: usize,
        h_s: f64,
    ) -> Result<Self> {
        let n = masses.len();
        let mut owner = vec![None; n];
        for (set, label) in [(&slow, 'S'), (&mixed, 'M'), (&fast, 'F')] {
            for &i in set {
                match owner.get_mut(i) {
                    None => return Err(Error::Partition(format!("index {i} out of range 0..{n}"))),
                    Some(Some(_)) => return Err(Error::Partition(format!("index {i} appears twice"))),
                    Some(slot) => *slot = Some(label),
                }
            }
        }
        if let Some(i) = owner.iter().position(Option::is_none) {
            return Err(Error::Partition(format!("index {i} belongs to no set")));
        }
        for v in [&v_s, &v_m, &v_f] {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
            }
        }
        if masses.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::InvalidArgument("masses must be positive".into()));
        }
        if k == 0 || !(h_s > 0.0) || !h_s.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid step ratio K = {k} or h_S = {h_s}")));
        }

        // Locality probe at a generic configuration.
        let probe: Vec<f64> = (0..n).map(|i| 0.1 * ((i as f64 + 1.0) * 1.618).sin()).collect();
        let mut g = vec![0.0; n];
        for (v, forbidden, name) in [(&v_s, "MF", "V_S"), (&v_m, "F", "V_M"), (&v_f, "S", "V_F")] {
            if v.check_domain(&probe).is_err() {
                continue;
            }
            v.gradient(&probe, &mut g);
            if let Some(i) = (0..n).find(|&i| g[i] != 0.0 && forbidden.contains(owner[i].unwrap())) {
                return Err(Error::Partition(format!("{name} depends on particle {i} of set {}", owner[i].unwrap())));
            }
        }

        let mut fast_mixed: Vec<usize> = fast.iter().chain(&mixed).copied().collect();
        fast_mixed.sort_unstable();
        Ok(Self {
            slow,
            mixed,
            fast,
            fast_mixed,
            v_s,
            v_m,
            v_f,
            masses,
            k,
            h_s,
        })
    }

    pub fn dim(&self) -> usize {
        self.masses.len()
    }

    pub fn slow(&self) -> &[usize] {
        &self.slow
    }

    pub fn mixed(&self) -> &[usize] {
        &self.mixed
    }

    pub fn fast(&self) -> &[usize] {
        &self.fast
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h_s(&self) -> f64 {
        self.h_s
    }

    pub fn h_f(&self) -> f64 {
        self.h_s / self.k as f64
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass_matrix(&self) -> MassMatrix {
        MassMatrix::diagonal(self.masses.clone()).expect("masses validated at construction")
    }

    pub fn v_s(&self) -> &dyn Potential {
        self.v_s.as_ref()
    }

    pub fn v_m(&self) -> &dyn Potential {
        self.v_m.as_ref()
    }

    pub fn v_f(&self) -> &dyn Potential {
        self.v_f.as_ref()
    }

    /// Same partition and potentials with a different step ratio and coarse step.
    pub fn with_steps(mut self, k: usize, h_s: f64) -> Result<Self> {
        if k == 0 || !(h_s > 0.0) || !h_s.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid step ratio K = {k} or h_S = {h_s}")));
        }
        self.k = k;
        self.h_s = h_s;
        Ok(self)
    }

    /// `V_S + V_M + V_F` as a single potential, for synchronous runs.
    pub fn full_potential(&self) -> FullPotential<'_> {
        FullPotential { system: self }
    }
}

/// Sum of the three sub-potentials of a [`SlowFastSystem`].
#[derive(Debug, Clone, Copy)]
pub struct FullPotential<'a> {
    system: &'a SlowFastSystem,
}

impl FullPotential<'_> {
    fn parts(&self) -> [&dyn Potential; 3] {
        [self.system.v_s(), self.system.v_m(), self.system.v_f()]
    }
}

impl Potential for FullPotential<'_> {
    fn dim(&self) -> usize {
        self.system.dim()
    }

    fn value(&self, q: &[f64]) -> f64 {
        self.parts().iter().map(|v| v.value(q)).sum()
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        let [a, b, c] = self.parts();
        a.gradient(q, out);
        let mut tmp = vec![0.0; q.len()];
        for v in [b, c] {
            v.gradient(q, &mut tmp);
            out.iter_mut().zip(&tmp).for_each(|(o, g)| *o += g);
        }
    }

    fn hessian_action(&self, q: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        let [a, b, c] = self.parts();
        if !a.hessian_action(q, v, out) {
            return false;
        }
        let mut tmp = vec![0.0; q.len()];
        for p in [b, c] {
            if !p.hessian_action(q, v, &mut tmp) {
                return false;
            }
            out.iter_mut().zip(&tmp).for_each(|(o, g)| *o += g);
        }
        true
    }

    fn is_quadratic(&self) -> bool {
        self.parts().iter().all(|v| v.is_quadratic())
    }

    fn check_domain(&self, q: &[f64]) -> std::result::Result<(), String> {
        self.parts().iter().try_for_each(|v| v.check_domain(q))
    }

    fn interaction_count(&self) -> usize {
        self.parts().iter().map(|v| v.interaction_count()).sum()
    }
}

/// Unknowns of the asynchronous scheme at a coarse node.
///
/// Vectors span all particles. Slow entries hold `(p^{n-1/2}, q^n, p^{n+1/2})`
/// and fast/mixed entries `(p^{n,-1/2}, q^{n,0}, p^{n,1/2})`; between coarse
/// steps the fine index `m` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AsyncState {
    pub q: Vec<f64>,
    pub p_prev_half: Vec<f64>,
    pub p_next_half: Vec<f64>,
    pub t: f64,
    pub n: usize,
    pub m: usize,
}

impl AsyncState {
    /// Initial state with zero jumps.
    pub fn new(q0: &[f64], p0: &[f64], t0: f64) -> Result<Self> {
        let s = PhaseState::new(q0, p0, t0)?;
        Ok(Self {
            q: s.q,
            p_prev_half: s.p_prev_half,
            p_next_half: s.p_next_half,
            t: t0,
            n: 0,
            m: 0,
        })
    }

    pub fn to_phase_state(&self) -> PhaseState {
        let jump = self
            .p_next_half
            .iter()
            .zip(&self.p_prev_half)
            .map(|(b, a)| b - a)
            .collect();
        PhaseState {
            q: self.q.clone(),
            p_prev_half: self.p_prev_half.clone(),
            p_next_half: self.p_next_half.clone(),
            jump,
            t: self.t,
            step_index: self.n,
        }
    }
}

/// `V(q) + Σ_i (1/2m_i) p_i^{-} p_i^{+}` at a coarse node.
pub fn coarse_pseudo_energy(state: &AsyncState, sys: &SlowFastSystem) -> Result<f64> {
    check_state(state, sys)?;
    let full = sys.full_potential();
    full.check_domain(&state.q).map_err(|m| Error::domain(state.n, m))?;
    let kinetic: f64 = (0..sys.dim())
        .map(|i| state.p_prev_half[i] * state.p_next_half[i] / (2.0 * sys.masses[i]))
        .sum();
    Ok(full.value(&state.q) + kinetic)
}

/// Companion of [`coarse_pseudo_energy`] built from momentum averages.
pub fn coarse_discrete_energy(state: &AsyncState, sys: &SlowFastSystem) -> Result<f64> {
    check_state(state, sys)?;
    let full = sys.full_potential();
    full.check_domain(&state.q).map_err(|m| Error::domain(state.n, m))?;
    let kinetic: f64 = (0..sys.dim())
        .map(|i| (state.p_prev_half[i] + state.p_next_half[i]).powi(2) / (8.0 * sys.masses[i]))
        .sum();
    Ok(full.value(&state.q) + kinetic)
}

fn check_state(state: &AsyncState, sys: &SlowFastSystem) -> Result<()> {
    if state.m != 0 {
        return Err(Error::NotCoarseNode(state.m));
    }
    let n = sys.dim();
    for len in [state.q.len(), state.p_prev_half.len(), state.p_next_half.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    Ok(())
}

/// Scratch buffers and force-evaluation counter for coarse steps.
#[derive(Debug, Clone)]
pub struct AsyncWorkspace {
    point: Vec<f64>,
    grad: Vec<f64>,
    q_next: Vec<f64>,
    impulse: Vec<f64>,
    slow_acc: Vec<f64>,
    slow_velocity: Vec<f64>,
    /// Cumulative force evaluations, in interaction-count units.
    pub force_evals: u64,
    /// Momentum updates applied to each particle so far.
    pub updates: Vec<u64>,
}

impl AsyncWorkspace {
    pub fn new(dim: usize) -> Self {
        Self {
            point: vec![0.0; dim],
            grad: vec![0.0; dim],
            q_next: vec![0.0; dim],
            impulse: vec![0.0; dim],
            slow_acc: vec![0.0; dim],
            slow_velocity: vec![0.0; dim],
            force_evals: 0,
            updates: vec![0; dim],
        }
    }
}

fn blown_up(values: &[f64], idx: &[usize]) -> bool {
    idx.iter().any(|&i| !values[i].is_finite() || values[i].abs() > BLOW_UP_LIMIT)
}

/// One coarse step: `K` fine steps of the fast and mixed particles, then
/// one step of the slow particles.
pub fn coarse_step_into(
    state: &mut AsyncState,
    sys: &SlowFastSystem,
    rule: &QuadratureRule,
    ws: &mut AsyncWorkspace,
) -> Result<()> {
    check_state(state, sys)?;
    let h_s = sys.h_s;
    let h_f = sys.h_f();
    let step = state.n + 1;
    let t_next = state.t + h_s;
    let domain = |m: String| Error::domain(step, m);

    for &i in &sys.slow {
        ws.slow_velocity[i] = state.p_next_half[i] / sys.masses[i];
        ws.slow_acc[i] = 0.0;
    }
    ws.point.copy_from_slice(&state.q);
    ws.q_next.copy_from_slice(&state.q);

    for m in 0..sys.k {
        for &i in &sys.fast_mixed {
            ws.q_next[i] = state.q[i] + h_f * state.p_next_half[i] / sys.masses[i];
            ws.impulse[i] = 0.0;
        }
        if blown_up(&ws.q_next, &sys.fast_mixed) {
            return Err(Error::BlowUp { step, t: state.t });
        }
        for (&w, &l) in rule.weights().iter().zip(rule.nodes()) {
            for &i in &sys.fast_mixed {
                ws.point[i] = l * state.q[i] + (1.0 - l) * ws.q_next[i];
            }
            let tau = (m as f64 + 1.0 - l) * h_f;
            for &i in &sys.slow {
                ws.point[i] = state.q[i] + tau * ws.slow_velocity[i];
            }
            let hw = h_f * w;

            sys.v_f.check_domain(&ws.point).map_err(domain)?;
            sys.v_f.gradient(&ws.point, &mut ws.grad);
            for &i in &sys.fast_mixed {
                ws.impulse[i] += hw * ws.grad[i];
            }
            sys.v_m.check_domain(&ws.point).map_err(domain)?;
            sys.v_m.gradient(&ws.point, &mut ws.grad);
            for &i in &sys.fast_mixed {
                ws.impulse[i] += hw * ws.grad[i];
            }
            for &i in &sys.slow {
                ws.slow_acc[i] += hw * ws.grad[i];
            }
            ws.force_evals += (sys.v_f.interaction_count() + sys.v_m.interaction_count()) as u64;
        }
        for &i in &sys.fast_mixed {
            let p_new = state.p_prev_half[i] - 2.0 * ws.impulse[i];
            state.p_prev_half[i] = state.p_next_half[i];
            state.p_next_half[i] = p_new;
            state.q[i] = ws.q_next[i];
            ws.updates[i] += 1;
        }
    }

    // Slow particles: one coarse free flight and the accumulated impulses.
    for &i in &sys.slow {
        ws.q_next[i] = state.q[i] + h_s * ws.slow_velocity[i];
        ws.impulse[i] = 0.0;
    }
    if blown_up(&ws.q_next, &sys.slow) {
        return Err(Error::BlowUp { step, t: state.t });
    }
    ws.point.copy_from_slice(&state.q);
    for (&w, &l) in rule.weights().iter().zip(rule.nodes()) {
        for &i in &sys.slow {
            ws.point[i] = l * state.q[i] + (1.0 - l) * ws.q_next[i];
        }
        sys.v_s.check_domain(&ws.point).map_err(domain)?;
        sys.v_s.gradient(&ws.point, &mut ws.grad);
        for &i in &sys.slow {
            ws.impulse[i] += h_s * w * ws.grad[i];
        }
        ws.force_evals += sys.v_s.interaction_count() as u64;
    }
    for &i in &sys.slow {
        let p_new = state.p_prev_half[i] - 2.0 * (ws.slow_acc[i] + ws.impulse[i]);
        state.p_prev_half[i] = state.p_next_half[i];
        state.p_next_half[i] = p_new;
        state.q[i] = ws.q_next[i];
        ws.updates[i] += 1;
    }
    if state.p_next_half.iter().any(|p| !p.is_finite()) {
        return Err(Error::BlowUp { step, t: t_next });
    }
    state.n = step;
    state.t = t_next;
    Ok(())
}

/// Allocating form of [`coarse_step_into`].
pub fn coarse_step(state: &AsyncState, sys: &SlowFastSystem, rule: &QuadratureRule) -> Result<AsyncState> {
    let mut next = state.clone();
    coarse_step_into(&mut next, sys, rule, &mut AsyncWorkspace::new(sys.dim()))?;
    Ok(next)
}

/// Integrates over a whole number of coarse steps, recording coarse nodes.
///
/// Recorded energies are the coarse pseudo-energy and its discrete
/// companion.
pub fn run_async(
    state0: &AsyncState,
    sys: &SlowFastSystem,
    rule: &QuadratureRule,
    t_end: f64,
    record_stride: usize,
) -> Result<TrajectoryRecord> {
    check_state(state0, sys)?;
    let span = t_end - state0.t;
    let steps = (span / sys.h_s).round();
    if span < 0.0 || (steps * sys.h_s - span).abs() > 1e-9 * sys.h_s.max(span) {
        return Err(Error::InvalidArgument(format!(
            "t_end - t0 = {span} is not a whole number of coarse steps h_S = {}",
            sys.h_s
        )));
    }
    let steps = steps as usize;
    let stride = record_stride.max(1);
    let energies = |s: &AsyncState| -> Result<NodeEnergies> {
        Ok(NodeEnergies {
            pseudo: coarse_pseudo_energy(s, sys)?,
            discrete: coarse_discrete_energy(s, sys)?,
        })
    };
    let mut record = TrajectoryRecord::default();
    record.push(&state0.to_phase_state(), energies(state0)?, 0);
    let mut ws = AsyncWorkspace::new(sys.dim());
    let mut state = state0.clone();
    for n in 1..=steps {
        coarse_step_into(&mut state, sys, rule, &mut ws)?;
        state.t = state0.t + n as f64 * sys.h_s;
        record.steps += 1;
        if n == steps || n % stride == 0 {
            record.push(&state.to_phase_state(), energies(&state)?, ws.force_evals);
        }
    }
    Ok(record)
}

/// Predicted force-evaluation counts of the synchronous and asynchronous
/// schemes on the slow-fast FPU chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEstimate {
    pub n_sync: f64,
    pub n_async: f64,
    pub eta: f64,
}

/// `N_sync = (n-1) T (2m+1)/h_F`, `N_async = (n-1) T ((m+1)/h_F + m/h_S)`
/// with `h_S = K h_F`.
pub fn cost_model(m: usize, k: usize, n_points: usize, t: f64, h_f: f64) -> Result<CostEstimate> {
    if m == 0 || k == 0 || n_points < 2 || !(t > 0.0) || !(h_f > 0.0) {
        return Err(Error::InvalidArgument("cost model arguments must be positive (n_points ≥ 2)".into()));
    }
    let (m, kf) = (m as f64, k as f64);
    let h_s = kf * h_f;
    let scale = (n_points as f64 - 1.0) * t;
    let n_sync = scale * (2.0 * m + 1.0) / h_f;
    let n_async = scale * ((m + 1.0) / h_f + m / h_s);
    Ok(CostEstimate {
        n_sync,
        n_async,
        eta: (1.0 + m / ((m + 1.0) * kf)) / (1.0 + m / (m + 1.0)),
    })
}
