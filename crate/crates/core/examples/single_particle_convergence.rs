//! Second-order convergence towards q(t) = sin⁴t + 1 for several rules.

use hamjump::analysis::{fit_order, l1_error};
use hamjump::models::SingleParticle;
use hamjump::*;

fn main() -> Result<()> {
    let v = SingleParticle::new();
    let mass = MassMatrix::identity(1);
    let (t0, t1) = (0.5, 2.5);
    let (q0, p0) = SingleParticle::reference(t0);
    let state0 = make_state(&[q0], &[p0], t0)?;
    let hs: Vec<f64> = (0..5).map(|k| 0.1 / 2f64.powi(k)).collect();

    for rule in [BuiltinRule::Midpoint, BuiltinRule::GaussLobatto3, BuiltinRule::GaussLobatto5] {
        let r = rule.rule();
        let scheme = Scheme::new(&v, &mass, &r, ForceMode::Quadrature)?;
        let mut errors = Vec::new();
        for &h in &hs {
            let rec = scheme.run(&state0, StepControl::fixed(h), t1, 1)?;
            errors.push(l1_error(&rec, |t| vec![SingleParticle::reference(t).0])?);
        }
        let cells: Vec<String> = errors.iter().map(|e| format!("{e:.3e}")).collect();
        println!("{:<16} {}  order {:.3}", rule.name(), cells.join("  "), fit_order(&hs, &errors)?);
    }
    Ok(())
}
