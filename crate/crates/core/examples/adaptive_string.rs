//! Step halving driven by the jump defect on the nonlinear string.

use hamjump::models::{string_model, StringConfig};
use hamjump::*;

fn main() -> Result<()> {
    let model = string_model(StringConfig::new(0.99, 99, 0.3))?;
    let (q0, p0) = model.initial_state();
    let rule = BuiltinRule::Midpoint.rule();
    let scheme = Scheme::new(&model.potential, &model.mass, &rule, ForceMode::Quadrature)?;
    let eps_fly = 3e-4;
    let rec = scheme.run(&make_state(&q0, &p0, 0.0)?, StepControl::adaptive(0.005, eps_fly), 1.0, 1)?;

    let mut steps: Vec<f64> = rec.times.windows(2).map(|w| w[1] - w[0]).collect();
    steps.pop(); // the last step only lands on t_end
    let worst = rec
        .energies
        .iter()
        .map(|e| e.defect() / (eps_fly * e.pseudo))
        .fold(0.0, f64::max);
    println!("accepted steps {}, rejected {}", rec.steps, rec.rejected_steps);
    println!(
        "step range [{:.3e}, {:.3e}]",
        steps.iter().copied().fold(f64::INFINITY, f64::min),
        steps.iter().copied().fold(0.0, f64::max)
    );
    println!("max defect / (eps_fly·H̃) = {worst:.3}");
    Ok(())
}
