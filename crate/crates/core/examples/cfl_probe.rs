//! Empirical stability limit against the bound 2√(μ/λ).

use hamjump::models::{string_model, Harmonic, StringConfig};
use hamjump::stability::{cfl_max_step, estimate_hessian_extremes, stability_threshold};
use hamjump::*;

fn main() -> Result<()> {
    let lambda = 4.0;
    let v = Harmonic::new(lambda);
    let mass = MassMatrix::identity(1);
    let state0 = make_state(&[1.0], &[0.0], 0.0)?;
    let bound = cfl_max_step(lambda, 1.0)?;
    let found = stability_threshold(&v, &mass, &state0, 0.5 * bound, 1.5 * bound, 100_000, 20)?;
    println!("harmonic: bound {bound:.6}, bisected {found:.6}");

    // linear string: power iteration on the stiffness against the lumped bound
    let model = string_model(StringConfig::new(0.0, 99, 0.3))?;
    let (q0, p0) = model.initial_state();
    let lambda_max = estimate_hessian_extremes(&model.potential, &q0, 10_000)?;
    let mu_min = model.mass.smallest_eigenvalue();
    let bound = cfl_max_step(lambda_max, mu_min)?;
    let state0 = make_state(&q0, &p0, 0.0)?;
    let found = stability_threshold(&model.potential, &model.mass, &state0, 0.5 * bound, 4.0 * bound, 20_000, 12)?;
    println!("string α = 0: λ_max {lambda_max:.1}, μ_min {mu_min:.3e}, bound {bound:.3e}, bisected {found:.3e}");
    Ok(())
}
