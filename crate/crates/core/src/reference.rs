//! Baseline integrators: Störmer–Verlet and classical Runge–Kutta.

use crate::error::{Error, Result};
use crate::mass::MassMatrix;
use crate::potential::Potential;

/// `q' = q + h M⁻¹ p_half`, `p_half' = p_half - h_next ∇V(q')`.
pub fn stormer_verlet_step<P: Potential + ?Sized>(
    q: &[f64],
    p_half: &[f64],
    h: f64,
    h_next: f64,
    potential: &P,
    mass: &MassMatrix,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(h > 0.0) || !(h_next > 0.0) {
        return Err(Error::InvalidArgument("Störmer–Verlet steps must be positive".into()));
    }
    let v = mass.apply_inverse(p_half)?;
    let q_new: Vec<f64> = q.iter().zip(&v).map(|(x, v)| x + h * v).collect();
    potential.check_domain(&q_new).map_err(|m| Error::domain(0, m))?;
    let mut g = vec![0.0; q.len()];
    potential.gradient(&q_new, &mut g);
    let p_new = p_half.iter().zip(&g).map(|(p, g)| p - h_next * g).collect();
    Ok((q_new, p_new))
}

/// Classical four-stage Runge–Kutta step for `y' = f(y)`.
pub fn rk4_step<F>(y: &[f64], h: f64, mut f: F) -> Vec<f64>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let shifted = |k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    f(y, &mut k1);
    f(&shifted(&k1, 0.5 * h), &mut k2);
    f(&shifted(&k2, 0.5 * h), &mut k3);
    f(&shifted(&k3, h), &mut k4);
    (0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Right-hand side of `q̇ = M⁻¹p`, `ṗ = -∇V(q)` on `y = (q, p)`.
pub fn hamiltonian_rhs<'a, P: Potential + ?Sized>(
    potential: &'a P,
    mass: &'a MassMatrix,
) -> impl FnMut(&[f64], &mut [f64]) + 'a {
    let n = potential.dim();
    let mut grad = vec![0.0; n];
    move |y: &[f64], dy: &mut [f64]| {
        let (q, p) = y.split_at(n);
        dy[..n].copy_from_slice(p);
        mass.apply_inverse_in_place(&mut dy[..n]).expect("state length matches the mass matrix");
        potential.gradient(q, &mut grad);
        for (d, g) in dy[n..].iter_mut().zip(&grad) {
            *d = -g;
        }
    }
}

/// RK4 from `(q0, p0)` over `steps` steps of size `h`, calling `observe`
/// with `(step, t, y)` after every step.
pub fn rk4_integrate<P, O>(
    potential: &P,
    mass: &MassMatrix,
    q0: &[f64],
    p0: &[f64],
    h: f64,
    steps: usize,
    mut observe: O,
) -> Vec<f64>
where
    P: Potential + ?Sized,
    O: FnMut(usize, f64, &[f64]),
{
    let mut y: Vec<f64> = q0.iter().chain(p0).copied().collect();
    let mut rhs = hamiltonian_rhs(potential, mass);
    for n in 1..=steps {
        y = rk4_step(&y, h, &mut rhs);
        observe(n, n as f64 * h, &y);
    }
    y
}
