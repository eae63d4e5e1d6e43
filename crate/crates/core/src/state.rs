use crate::error::{Error, Result};

/// Unknowns of the two-step scheme at node `t^n`.
///
/// `q` is the position `q^n`, `p_prev_half` and `p_next_half` the momenta on
/// the neighbouring intervals and `jump` the momentum jump `[p]^n` between
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub q: Vec<f64>,
    pub p_prev_half: Vec<f64>,
    pub p_next_half: Vec<f64>,
    pub jump: Vec<f64>,
    pub t: f64,
    pub step_index: usize,
}

impl PhaseState {
    /// Initial state with `p^{-1/2} = p^{1/2} = p(t⁰)` and a zero jump.
    pub fn new(q0: &[f64], p0: &[f64], t0: f64) -> Result<Self> {
        if q0.len() != p0.len() {
            return Err(Error::DimensionMismatch {
                expected: q0.len(),
                got: p0.len(),
            });
        }
        if q0.iter().chain(p0).any(|x| !x.is_finite()) || !t0.is_finite() {
            return Err(Error::NonFinite("initial state"));
        }
        Ok(Self {
            q: q0.to_vec(),
            p_prev_half: p0.to_vec(),
            p_next_half: p0.to_vec(),
            jump: vec![0.0; q0.len()],
            t: t0,
            step_index: 0,
        })
    }

    /// Builds a state from both half-step momenta; the jump is derived.
    pub fn from_momenta(q: Vec<f64>, p_prev_half: Vec<f64>, p_next_half: Vec<f64>, t: f64) -> Result<Self> {
        if p_prev_half.len() != q.len() || p_next_half.len() != q.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                got: p_prev_half.len().max(p_next_half.len()),
            });
        }
        let jump = p_next_half.iter().zip(&p_prev_half).map(|(b, a)| b - a).collect();
        Ok(Self {
            q,
            p_prev_half,
            p_next_half,
            jump,
            t,
            step_index: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Averaged momentum `(p^{n-1/2} + p^{n+1/2}) / 2`.
    pub fn mean_momentum(&self) -> Vec<f64> {
        self.p_prev_half
            .iter()
            .zip(&self.p_next_half)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }
}

/// Convenience alias for [`PhaseState::new`].
pub fn make_state(q0: &[f64], p0: &[f64], t0: f64) -> Result<PhaseState> {
    PhaseState::new(q0, p0, t0)
}

/// One recorded node of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub q: Vec<f64>,
    pub p_prev_half: Vec<f64>,
    pub p_next_half: Vec<f64>,
}

/// Energies recorded at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeEnergies {
    pub pseudo: f64,
    pub discrete: f64,
}

impl NodeEnergies {
    /// `H^n - H̃^n = ⅛|M^{-1/2}[p]^n|²`.
    pub fn defect(&self) -> f64 {
        self.discrete - self.pseudo
    }
}

/// Sampled output of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<Snapshot>,
    pub energies: Vec<NodeEnergies>,
    /// Cumulative force evaluations at each recorded node.
    pub force_evals: Vec<u64>,
    /// Steps rejected by the adaptive controller.
    pub rejected_steps: usize,
    /// Number of accepted steps.
    pub steps: usize,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub(crate) fn push(&mut self, state: &PhaseState, energies: NodeEnergies, force_evals: u64) {
        self.times.push(state.t);
        self.states.push(Snapshot {
            q: state.q.clone(),
            p_prev_half: state.p_prev_half.clone(),
            p_next_half: state.p_next_half.clone(),
        });
        self.energies.push(energies);
        self.force_evals.push(force_evals);
    }

    pub fn total_force_evals(&self) -> u64 {
        self.force_evals.last().copied().unwrap_or(0)
    }

    pub fn final_positions(&self) -> Option<&[f64]> {
        self.states.last().map(|s| s.q.as_slice())
    }
}
