//! The synchronous two-step scheme.
//!
//! One step from node `t^n` to `t^{n+1} = t^n + h`:
//!
//! ```text
//! q^{n+1}   = q^n + h M⁻¹ p^{n+1/2}
//! p^{n+3/2} = p^{n-1/2} - 2 ∫_{t^n}^{t^{n+1}} ∇V(q^n + (t - t^n) M⁻¹ p^{n+1/2}) dt
//! ```
//!
//! The jump `[p]^{n+1} = p^{n+3/2} - p^{n+1/2}` is derived bookkeeping. With
//! the force integral computed exactly, `V(q^n) + ½ (p^{n-1/2})ᵀ M⁻¹ p^{n+1/2}`
//! is conserved for any sequence of step sizes.

use crate::error::{Error, Result};
use crate::mass::MassMatrix;
use crate::potential::Potential;
use crate::quadrature::{ForceWorkspace, QuadratureRule};
use crate::state::{NodeEnergies, PhaseState, TrajectoryRecord};

/// Any position component beyond this magnitude is treated as a blow-up.
pub const BLOW_UP_LIMIT: f64 = 1e12;

/// How the force integral over a free flight is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForceMode {
    /// Apply the quadrature rule.
    #[default]
    Quadrature,
    /// Exact trapezoidal formula, valid for potentials with affine gradient.
    ExactQuadratic,
}

/// Time-step selection for [`Scheme::run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    Fixed(f64),
    /// Halve `h` whenever `⅛|M^{-1/2}[p]|² > eps_fly · H̃`; `h` never grows back.
    Adaptive { h_init: f64, eps_fly: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub mode: StepMode,
    pub h_min: f64,
    pub max_steps: usize,
}

impl StepControl {
    pub fn fixed(h: f64) -> Self {
        Self {
            mode: StepMode::Fixed(h),
            h_min: f64::MIN_POSITIVE,
            max_steps: usize::MAX,
        }
    }

    pub fn adaptive(h_init: f64, eps_fly: f64) -> Self {
        Self {
            mode: StepMode::Adaptive { h_init, eps_fly },
            h_min: h_init * 1e-6,
            max_steps: usize::MAX,
        }
    }

    pub fn with_h_min(mut self, h_min: f64) -> Self {
        self.h_min = h_min;
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.mode {
            StepMode::Fixed(h) => h > 0.0 && h.is_finite(),
            StepMode::Adaptive { h_init, eps_fly } => h_init > 0.0 && h_init.is_finite() && eps_fly > 0.0,
        };
        if !ok || !(self.h_min > 0.0) {
            return Err(Error::InvalidArgument(format!("invalid step control {self:?}")));
        }
        Ok(())
    }

    fn initial_h(&self) -> f64 {
        match self.mode {
            StepMode::Fixed(h) => h,
            StepMode::Adaptive { h_init, .. } => h_init,
        }
    }
}

/// `q + dt M⁻¹ p_half`.
pub fn free_flight(q: &[f64], p_half: &[f64], mass: &MassMatrix, dt: f64) -> Result<Vec<f64>> {
    if q.len() != p_half.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            got: p_half.len(),
        });
    }
    let v = mass.apply_inverse(p_half)?;
    Ok(q.iter().zip(&v).map(|(x, v)| x + dt * v).collect())
}

/// `H̃^n = V(q^n) + ½ (p^{n-1/2})ᵀ M⁻¹ p^{n+1/2}`.
pub fn pseudo_energy<P: Potential + ?Sized>(state: &PhaseState, potential: &P, mass: &MassMatrix) -> Result<f64> {
    potential
        .check_domain(&state.q)
        .map_err(|m| Error::domain(state.step_index, m))?;
    Ok(potential.value(&state.q) + 0.5 * mass.inverse_inner(&state.p_prev_half, &state.p_next_half)?)
}

/// `H^n = V(q^n) + ⅛ (p^{n-1/2} + p^{n+1/2})ᵀ M⁻¹ (p^{n-1/2} + p^{n+1/2})`.
pub fn discrete_energy<P: Potential + ?Sized>(state: &PhaseState, potential: &P, mass: &MassMatrix) -> Result<f64> {
    potential
        .check_domain(&state.q)
        .map_err(|m| Error::domain(state.step_index, m))?;
    let sum: Vec<f64> = state
        .p_prev_half
        .iter()
        .zip(&state.p_next_half)
        .map(|(a, b)| a + b)
        .collect();
    Ok(potential.value(&state.q) + 0.125 * mass.inv_sqrt_norm_sq(&sum)?)
}

/// Per-component sum of `p^{n+1/2}` over particles in dimension `d`.
pub fn total_momentum(state: &PhaseState, d: usize) -> Result<Vec<f64>> {
    if d == 0 || state.dim() % d != 0 {
        return Err(Error::InvalidArgument(format!(
            "state length {} is not a multiple of d = {d}",
            state.dim()
        )));
    }
    let mut total = vec![0.0; d];
    for chunk in state.p_next_half.chunks(d) {
        total.iter_mut().zip(chunk).for_each(|(t, p)| *t += p);
    }
    Ok(total)
}

/// Coordinates `Y = (q^n, (p^{n-1/2} + p^{n+1/2})/2, p^{n+1/2} - p^{n-1/2})`
/// in which the one-step map is time-reversible.
#[derive(Debug, Clone, PartialEq)]
pub struct ReversibleCoords {
    pub q: Vec<f64>,
    pub mean: Vec<f64>,
    pub jump: Vec<f64>,
}

impl ReversibleCoords {
    pub fn from_state(state: &PhaseState) -> Self {
        Self {
            q: state.q.clone(),
            mean: state.mean_momentum(),
            jump: state
                .p_next_half
                .iter()
                .zip(&state.p_prev_half)
                .map(|(b, a)| b - a)
                .collect(),
        }
    }

    /// Recovers `(q, p^{n-1/2}, p^{n+1/2})`.
    pub fn to_state(&self, t: f64) -> PhaseState {
        let prev = self.mean.iter().zip(&self.jump).map(|(m, j)| m - 0.5 * j).collect();
        let next = self.mean.iter().zip(&self.jump).map(|(m, j)| m + 0.5 * j).collect();
        PhaseState {
            q: self.q.clone(),
            p_prev_half: prev,
            p_next_half: next,
            jump: self.jump.clone(),
            t,
            step_index: 0,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [(&self.q, &other.q), (&self.mean, &other.mean), (&self.jump, &other.jump)]
            .into_iter()
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// The synchronous scheme bound to a potential, a mass and a force rule.
#[derive(Debug, Clone)]
pub struct Scheme<'a, P: ?Sized> {
    pub potential: &'a P,
    pub mass: &'a MassMatrix,
    pub rule: &'a QuadratureRule,
    pub force_mode: ForceMode,
}

/// Reusable buffers for repeated steps.
#[derive(Debug, Clone)]
pub struct StepWorkspace {
    forces: ForceWorkspace,
    velocity: Vec<f64>,
    integral: Vec<f64>,
    /// Cumulative force evaluations.
    pub force_evals: u64,
}

impl StepWorkspace {
    pub fn new(dim: usize) -> Self {
        Self {
            forces: ForceWorkspace::new(dim),
            velocity: vec![0.0; dim],
            integral: vec![0.0; dim],
            force_evals: 0,
        }
    }
}

impl<'a, P: Potential + ?Sized> Scheme<'a, P> {
    pub fn new(potential: &'a P, mass: &'a MassMatrix, rule: &'a QuadratureRule, force_mode: ForceMode) -> Result<Self> {
        if potential.dim() != mass.dim() {
            return Err(Error::DimensionMismatch {
                expected: potential.dim(),
                got: mass.dim(),
            });
        }
        if force_mode == ForceMode::ExactQuadratic && !potential.is_quadratic() {
            return Err(Error::InvalidArgument(
                "exact quadratic force mode needs a quadratic potential".into(),
            ));
        }
        Ok(Self {
            potential,
            mass,
            rule,
            force_mode,
        })
    }

    fn check_state(&self, state: &PhaseState) -> Result<()> {
        let n = self.potential.dim();
        for len in [state.q.len(), state.p_prev_half.len(), state.p_next_half.len(), state.jump.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        Ok(())
    }

    /// `∫ ∇V` along the free flight from `q_start` to `q_end` over a step `h`.
    fn force_integral(&self, ws: &mut StepWorkspace, q_start: &[f64], q_end: &[f64], h: f64, step: usize) -> Result<()> {
        let res = match self.force_mode {
            ForceMode::Quadrature => ws.forces.integrate(
                self.rule,
                self.potential,
                q_start,
                q_end,
                h,
                &mut ws.integral,
                &mut ws.force_evals,
            ),
            ForceMode::ExactQuadratic => {
                ws.forces
                    .integrate_affine(self.potential, q_start, q_end, h, &mut ws.integral, &mut ws.force_evals)
            }
        };
        res.map_err(|m| Error::domain(step, m))
    }

    /// Advances `from` by `h`, writing the new node into `to`.
    pub fn step_into(&self, from: &PhaseState, h: f64, to: &mut PhaseState, ws: &mut StepWorkspace) -> Result<()> {
        let n = from.dim();
        let step = from.step_index + 1;
        ws.velocity.copy_from_slice(&from.p_next_half);
        self.mass.apply_inverse_in_place(&mut ws.velocity)?;

        to.q.resize(n, 0.0);
        for ((x, q), v) in to.q.iter_mut().zip(&from.q).zip(&ws.velocity) {
            *x = q + h * v;
        }
        if to.q.iter().any(|x| !x.is_finite() || x.abs() > BLOW_UP_LIMIT) {
            return Err(Error::BlowUp { step, t: from.t + h });
        }
        self.force_integral(ws, &from.q, &to.q, h, step)?;

        to.p_prev_half.clear();
        to.p_prev_half.extend_from_slice(&from.p_next_half);
        to.p_next_half.resize(n, 0.0);
        to.jump.resize(n, 0.0);
        for i in 0..n {
            let p_new = from.p_prev_half[i] - 2.0 * ws.integral[i];
            to.p_next_half[i] = p_new;
            to.jump[i] = p_new - from.p_next_half[i];
        }
        if to.p_next_half.iter().any(|x| !x.is_finite()) {
            return Err(Error::BlowUp { step, t: from.t + h });
        }
        to.t = from.t + h;
        to.step_index = step;
        Ok(())
    }

    /// One step of the scheme.
    pub fn step(&self, state: &PhaseState, h: f64) -> Result<PhaseState> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {h}")));
        }
        self.check_state(state)?;
        let mut ws = StepWorkspace::new(state.dim());
        let mut next = state.clone();
        self.step_into(state, h, &mut next, &mut ws)?;
        Ok(next)
    }

    pub fn energies(&self, state: &PhaseState) -> Result<NodeEnergies> {
        Ok(NodeEnergies {
            pseudo: pseudo_energy(state, self.potential, self.mass)?,
            discrete: discrete_energy(state, self.potential, self.mass)?,
        })
    }

    /// Integrates from `state0.t` to `t_end`, recording every
    /// `record_stride`-th accepted node plus the first and the last.
    pub fn run(&self, state0: &PhaseState, control: StepControl, t_end: f64, record_stride: usize) -> Result<TrajectoryRecord> {
        control.validate()?;
        self.check_state(state0)?;
        if t_end < state0.t || !t_end.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "t_end = {t_end} precedes the initial time {}",
                state0.t
            )));
        }
        let stride = record_stride.max(1);
        let mut record = TrajectoryRecord::default();
        record.push(state0, self.energies(state0)?, 0);

        let mut ws = StepWorkspace::new(state0.dim());
        let mut current = state0.clone();
        let mut next = state0.clone();
        let mut h = control.initial_h();
        let t0 = state0.t;
        let mut uniform = true;

        while current.t < t_end {
            let remaining = t_end - current.t;
            let last = remaining <= h * (1.0 + 1e-9);
            let h_step = if last { remaining } else { h };
            self.step_into(&current, h_step, &mut next, &mut ws)?;

            if let StepMode::Adaptive { eps_fly, .. } = control.mode {
                let defect = 0.125 * self.mass.inv_sqrt_norm_sq(&next.jump)?;
                let pseudo = pseudo_energy(&next, self.potential, self.mass)?;
                if defect > eps_fly * pseudo {
                    h *= 0.5;
                    uniform = false;
                    record.rejected_steps += 1;
                    if h < control.h_min {
                        return Err(Error::StepTooSmall {
                            step: next.step_index,
                            h_min: control.h_min,
                        });
                    }
                    continue;
                }
            }

            if last {
                next.t = t_end;
            } else if uniform {
                next.t = t0 + next.step_index as f64 * h;
            }
            std::mem::swap(&mut current, &mut next);
            record.steps += 1;
            if record.steps > control.max_steps {
                return Err(Error::MaxStepsExceeded(control.max_steps));
            }
            if last || record.steps % stride == 0 {
                record.push(&current, self.energies(&current)?, ws.force_evals);
            }
            if last {
                break;
            }
        }
        Ok(record)
    }

    /// The one-step map `Φ_h` in the coordinates of [`ReversibleCoords`].
    ///
    /// Negative `h` integrates backwards; `h = 0` is the identity. Requires a
    /// symmetric rule or exact force integration.
    pub fn reversibility_map(&self, y: &ReversibleCoords, h: f64) -> Result<ReversibleCoords> {
        if self.force_mode == ForceMode::Quadrature && !self.rule.is_symmetric() {
            return Err(Error::AsymmetricRule(self.rule.name().to_string()));
        }
        let n = self.potential.dim();
        for len in [y.q.len(), y.mean.len(), y.jump.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        if h == 0.0 {
            return Ok(y.clone());
        }
        let s = h.signum();
        let momentum: Vec<f64> = y.mean.iter().zip(&y.jump).map(|(m, j)| m + 0.5 * s * j).collect();
        let q_end = free_flight(&y.q, &momentum, self.mass, h)?;
        let mut ws = StepWorkspace::new(n);
        self.force_integral(&mut ws, &y.q, &q_end, h, 0)?;
        let integral = &ws.integral;
        Ok(ReversibleCoords {
            mean: y.mean.iter().zip(integral).map(|(m, f)| m - f).collect(),
            jump: y.jump.iter().zip(integral).map(|(j, f)| -j - 2.0 * s * f).collect(),
            q: q_end,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::simple::{ConstantPotential, Harmonic};
    use crate::quadrature::BuiltinRule;

    fn harmonic_setup() -> (Harmonic, MassMatrix, QuadratureRule) {
        (Harmonic::new(1.0), MassMatrix::identity(1), BuiltinRule::Midpoint.rule())
    }

    #[test]
    fn free_flight_examples() {
        let id = MassMatrix::identity(1);
        assert_eq!(free_flight(&[1.0], &[0.0], &id, 0.5).unwrap(), vec![1.0]);
        let m2 = MassMatrix::diagonal(vec![2.0]).unwrap();
        assert_eq!(free_flight(&[0.0], &[2.0], &m2, 1.0).unwrap(), vec![1.0]);
        assert_eq!(free_flight(&[0.3], &[5.0], &id, 0.0).unwrap(), vec![0.3]);
        assert!(free_flight(&[0.3, 1.0], &[5.0], &id, 0.0).is_err());
    }

    #[test]
    fn harmonic_symbolic_steps() {
        let (v, m, rule) = harmonic_setup();
        let scheme = Scheme::new(&v, &m, &rule, ForceMode::ExactQuadratic).unwrap();
        let s0 = PhaseState::new(&[1.0], &[0.0], 0.0).unwrap();
        let s1 = scheme.step(&s0, 0.1).unwrap();
        assert_eq!(s1.q, vec![1.0]);
        assert!((s1.jump[0] + 0.2).abs() < 1e-15);
        assert!((s1.p_next_half[0] + 0.2).abs() < 1e-15);
        let s2 = scheme.step(&s1, 0.1).unwrap();
        assert!((s2.q[0] - 0.98).abs() < 1e-15);

        assert!((pseudo_energy(&s1, &v, &m).unwrap() - 0.5).abs() < 1e-15);
        assert!((discrete_energy(&s1, &v, &m).unwrap() - 0.505).abs() < 1e-15);
        assert_eq!(pseudo_energy(&s0, &v, &m).unwrap(), 0.5);
    }

    #[test]
    fn zero_state_energy() {
        let (v, m, _) = harmonic_setup();
        let s = PhaseState::new(&[0.0], &[0.0], 0.0).unwrap();
        assert_eq!(pseudo_energy(&s, &v, &m).unwrap(), 0.0);
    }

    #[test]
    fn force_free_is_pure_drift() {
        let v = ConstantPotential::new(2, 3.0);
        let m = MassMatrix::identity(2);
        let rule = BuiltinRule::GaussLegendre3.rule();
        let scheme = Scheme::new(&v, &m, &rule, ForceMode::Quadrature).unwrap();
        let mut s = PhaseState::new(&[0.0, 1.0], &[1.0, -2.0], 0.0).unwrap();
        let e0 = pseudo_energy(&s, &v, &m).unwrap();
        for _ in 0..10 {
            s = scheme.step(&s, 0.25).unwrap();
            assert_eq!(s.jump, vec![0.0, 0.0]);
            assert_eq!(pseudo_energy(&s, &v, &m).unwrap(), e0);
        }
        assert!((s.q[0] - 2.5).abs() < 1e-14 && (s.q[1] + 4.0).abs() < 1e-14);
    }

    #[test]
    fn zero_jump_discrete_energy_is_hamiltonian() {
        let (v, m, _) = harmonic_setup();
        let s = PhaseState::new(&[0.5], &[2.0], 0.0).unwrap();
        let h = 0.5 * 0.25 + 0.5 * 4.0;
        assert!((discrete_energy(&s, &v, &m).unwrap() - h).abs() < 1e-15);
    }

    #[test]
    fn total_momentum_bookkeeping() {
        let s = PhaseState::new(&[0.0, 0.0], &[1.0, -1.0], 0.0).unwrap();
        assert_eq!(total_momentum(&s, 1).unwrap(), vec![0.0]);
        let s = PhaseState::new(&[0.0; 4], &[1.0, 2.0, 3.0, 4.0], 0.0).unwrap();
        assert_eq!(total_momentum(&s, 2).unwrap(), vec![4.0, 6.0]);
        assert!(total_momentum(&s, 3).is_err());
    }

    #[test]
    fn degenerate_interval_records_only_initial_node() {
        let (v, m, rule) = harmonic_setup();
        let scheme = Scheme::new(&v, &m, &rule, ForceMode::Quadrature).unwrap();
        let s = PhaseState::new(&[1.0], &[0.0], 2.0).unwrap();
        let rec = scheme.run(&s, StepControl::fixed(0.1), 2.0, 1).unwrap();
        assert_eq!(rec.len(), 1);
        assert_eq!(rec.steps, 0);
        assert!(scheme.run(&s, StepControl::fixed(0.1), 1.0, 1).is_err());
    }

    #[test]
    fn last_step_lands_on_t_end() {
        let (v, m, rule) = harmonic_setup();
        let scheme = Scheme::new(&v, &m, &rule, ForceMode::Quadrature).unwrap();
        let s = PhaseState::new(&[1.0], &[0.0], 0.0).unwrap();
        let rec = scheme.run(&s, StepControl::fixed(0.3), 1.0, 1).unwrap();
        assert_eq!(rec.steps, 4);
        assert_eq!(*rec.times.last().unwrap(), 1.0);
        let rec = scheme.run(&s, StepControl::fixed(0.1), 1.0, 3).unwrap();
        assert_eq!(rec.steps, 10);
        assert_eq!(rec.times, vec![0.0, 0.30000000000000004, 0.6000000000000001, 0.9, 1.0]);
    }

    #[test]
    fn exact_mode_requires_quadratic() {
        let v = crate::models::simple::QuarticWell::new(1);
        let m = MassMatrix::identity(1);
        let rule = BuiltinRule::Midpoint.rule();
        assert!(Scheme::new(&v, &m, &rule, ForceMode::ExactQuadratic).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let v = Harmonic::new(1.0);
        let m = MassMatrix::identity(1);
        let rule = BuiltinRule::Midpoint.rule();
        let scheme = Scheme::new(&v, &m, &rule, ForceMode::ExactQuadratic).unwrap();
        let s = PhaseState::new(&[1.0], &[0.0], 0.0).unwrap();
        let err = scheme.run(&s, StepControl::fixed(3.0), 1e6, 1000).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }), "{err:?}");
    }

    #[test]
    fn reversibility_rejects_asymmetric_rule() {
        let v = Harmonic::new(1.0);
        let m = MassMatrix::identity(1);
        let skew = QuadratureRule::new("skew", vec![2.0 / 3.0, 1.0 / 3.0], vec![0.25, 1.0], 1).unwrap();
        let scheme = Scheme::new(&v, &m, &skew, ForceMode::Quadrature).unwrap();
        let y = ReversibleCoords::from_state(&PhaseState::new(&[1.0], &[0.0], 0.0).unwrap());
        assert!(matches!(scheme.reversibility_map(&y, 0.1), Err(Error::AsymmetricRule(_))));
        assert_eq!(
            Scheme::new(&v, &m, &skew, ForceMode::ExactQuadratic)
                .unwrap()
                .reversibility_map(&y, 0.0)
                .unwrap(),
            y
        );
    }
}
