//! Asynchronous integration of a chain whose left half is stiff: coarse
//! pseudo-energy and cost against the synchronous scheme.

use hamjump::analysis::{energy_drift, EnergyKind};
use hamjump::asynchronous::{cost_model, run_async, AsyncState};
use hamjump::models::{fpu_model, FpuConfig};
use hamjump::*;

fn main() -> Result<()> {
    let fpu = fpu_model(FpuConfig::slow_fast(3, 10f64.sqrt()))?;
    let (q0, p0) = fpu.initial_state();
    let rule = BuiltinRule::GaussLobatto5.rule();
    let (h_s, k, t_end) = (0.01, 50, 100.0);
    let sys = fpu.slow_fast_system(k, h_s)?;

    let arec = run_async(&AsyncState::new(&q0, &p0, 0.0)?, &sys, &rule, t_end, 10)?;
    println!(
        "async: relative coarse pseudo-energy drift {:.2e}, {} force evaluations",
        energy_drift(&arec, EnergyKind::Pseudo)?.max_rel,
        arec.total_force_evals()
    );

    let full = sys.full_potential();
    let mass = sys.mass_matrix();
    let scheme = Scheme::new(&full, &mass, &rule, ForceMode::Quadrature)?;
    let srec = scheme.run(&make_state(&q0, &p0, 0.0)?, StepControl::fixed(sys.h_f()), t_end, 10 * k)?;
    println!("sync at h_F: {} force evaluations", srec.total_force_evals());
    println!("measured ratio {:.4}", arec.total_force_evals() as f64 / srec.total_force_evals() as f64);
    println!("predicted eta  {:.4}", cost_model(3, k, rule.points(), t_end, sys.h_f())?.eta);
    Ok(())
}
