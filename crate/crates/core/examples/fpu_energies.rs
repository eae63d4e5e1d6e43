//! Stiff/soft FPU chain: exchange of oscillatory energy between the stiff
//! springs, the near-constant total, and a check against RK4.

use hamjump::analysis::{energy_drift, EnergyKind};
use hamjump::models::{fpu_model, FpuConfig};
use hamjump::reference::rk4_integrate;
use hamjump::*;

fn main() -> Result<()> {
    let fpu = fpu_model(FpuConfig::alternating(3, 50.0))?;
    let (q0, p0) = fpu.initial_state();
    let mass = MassMatrix::identity(fpu.dim());
    let rule = BuiltinRule::GaussLegendre3.rule();
    let scheme = Scheme::new(fpu.potential(), &mass, &rule, ForceMode::Quadrature)?;

    let h = 1e-3;
    let t_end = 250.0;
    let rec = scheme.run(&make_state(&q0, &p0, 0.0)?, StepControl::fixed(h), t_end, 1000)?;
    let drift = energy_drift(&rec, EnergyKind::Pseudo)?;
    println!("relative pseudo-energy drift {:.2e}", drift.max_rel);

    println!("{:>7} {:>9} {:>9} {:>9} {:>9}", "t", "I1", "I2", "I3", "I");
    for (t, s) in rec.times.iter().zip(&rec.states).step_by(25) {
        let p: Vec<f64> = s.p_prev_half.iter().zip(&s.p_next_half).map(|(a, b)| 0.5 * (a + b)).collect();
        let i = fpu.oscillatory_energies(&s.q, &p);
        println!("{t:7.1} {:9.5} {:9.5} {:9.5} {:9.5}", i[0], i[1], i[2], i.iter().sum::<f64>());
    }

    // short-time agreement with a fine RK4 solution
    let t_cmp = 1.0;
    let q_rk = rk4_integrate(fpu.potential(), &mass, &q0, &p0, 1e-5, 100_000, |_, _, _| {});
    let rec = scheme.run(&make_state(&q0, &p0, 0.0)?, StepControl::fixed(1e-4), t_cmp, usize::MAX)?;
    let q = rec.final_positions().unwrap();
    let diff = q.iter().zip(&q_rk).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max |q - q_rk4| at t = {t_cmp}: {diff:.2e}");
    Ok(())
}
