//! The potential-energy interface shared by every integrator.

/// A configuration-only potential `V(q)` over `R^{dim}`.
///
/// Implementations must be pure: the integrators may evaluate them from
/// several threads at once.
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, q: &[f64]) -> f64;

    /// Writes `∇V(q)` into `out`, overwriting every entry.
    fn gradient(&self, q: &[f64], out: &mut [f64]);

    /// Writes `D²V(q)·v` into `out` and returns `true`, or returns `false`
    /// when no analytic Hessian action is available.
    fn hessian_action(&self, _q: &[f64], _v: &[f64], _out: &mut [f64]) -> bool {
        false
    }

    /// `true` when `V` is a quadratic form plus an affine term.
    fn is_quadratic(&self) -> bool {
        false
    }

    /// Reports configurations where `V` is undefined.
    fn check_domain(&self, _q: &[f64]) -> Result<(), String> {
        Ok(())
    }

    /// Number of interaction terms touched by one gradient evaluation.
    ///
    /// This is the cost unit used by the force-evaluation counters: a
    /// gradient of a chain with `k` springs counts as `k` evaluations.
    fn interaction_count(&self) -> usize {
        1
    }
}

impl<P: Potential + ?Sized> Potential for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, q: &[f64]) -> f64 {
        (**self).value(q)
    }
    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        (**self).gradient(q, out)
    }
    fn hessian_action(&self, q: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        (**self).hessian_action(q, v, out)
    }
    fn is_quadratic(&self) -> bool {
        (**self).is_quadratic()
    }
    fn check_domain(&self, q: &[f64]) -> Result<(), String> {
        (**self).check_domain(q)
    }
    fn interaction_count(&self) -> usize {
        (**self).interaction_count()
    }
}

impl<P: Potential + ?Sized> Potential for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, q: &[f64]) -> f64 {
        (**self).value(q)
    }
    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        (**self).gradient(q, out)
    }
    fn hessian_action(&self, q: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        (**self).hessian_action(q, v, out)
    }
    fn is_quadratic(&self) -> bool {
        (**self).is_quadratic()
    }
    fn check_domain(&self, q: &[f64]) -> Result<(), String> {
        (**self).check_domain(q)
    }
    fn interaction_count(&self) -> usize {
        (**self).interaction_count()
    }
}

/// Convenience wrapper returning a freshly allocated gradient.
pub fn gradient_vec<P: Potential + ?Sized>(potential: &P, q: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; q.len()];
    potential.gradient(q, &mut g);
    g
}

/// Central finite-difference gradient with step `max(1e-6, 1e-6·|q_i|)`.
pub fn finite_difference_gradient<P: Potential + ?Sized>(potential: &P, q: &[f64]) -> Vec<f64> {
    let mut x = q.to_vec();
    (0..q.len())
        .map(|i| {
            let step = 1e-6_f64.max(1e-6 * q[i].abs());
            x[i] = q[i] + step;
            let plus = potential.value(&x);
            x[i] = q[i] - step;
            let minus = potential.value(&x);
            x[i] = q[i];
            (plus - minus) / (2.0 * step)
        })
        .collect()
}

/// Largest deviation between the analytic and finite-difference gradients,
/// relative to the largest gradient component (absolute when the gradient
/// vanishes).
pub fn gradient_check<P: Potential + ?Sized>(potential: &P, q: &[f64]) -> f64 {
    let analytic = gradient_vec(potential, q);
    let fd = finite_difference_gradient(potential, q);
    let scale = analytic.iter().fold(0.0_f64, |m, g| m.max(g.abs())).max(1.0);
    analytic
        .iter()
        .zip(&fd)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale
}
