//! Nonlinear string: largest pseudo-energy deviation for each quadrature rule.

use hamjump::analysis::{energy_drift, EnergyKind};
use hamjump::models::{string_model, StringConfig};
use hamjump::*;

fn main() -> Result<()> {
    let h = 0.0033;
    println!("{:>5} {:>5}  {:>10} {:>10} {:>10}", "alpha", "u0", "midpoint", "GL3", "GL5");
    for (alpha, amplitude) in [(0.99, 0.3), (0.99, 0.1), (0.8, 0.3), (0.0, 0.3)] {
        let model = string_model(StringConfig::new(alpha, 99, amplitude))?;
        let (q0, p0) = model.initial_state();
        let state0 = make_state(&q0, &p0, 0.0)?;
        let mut cells = Vec::new();
        for rule in [BuiltinRule::Midpoint, BuiltinRule::GaussLegendre3, BuiltinRule::GaussLegendre5] {
            let r = rule.rule();
            let scheme = Scheme::new(&model.potential, &model.mass, &r, ForceMode::Quadrature)?;
            let rec = scheme.run(&state0, StepControl::fixed(h), 1.0, 1)?;
            cells.push(format!("{:10.2e}", energy_drift(&rec, EnergyKind::Pseudo)?.max_abs));
        }
        println!("{alpha:5.2} {amplitude:5.2}  {}", cells.join(" "));
    }
    Ok(())
}
