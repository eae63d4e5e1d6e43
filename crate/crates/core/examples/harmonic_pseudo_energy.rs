//! Harmonic oscillator with irregular steps: the pseudo-energy stays fixed
//! while the discrete energy wobbles by the jump defect.

use hamjump::models::Harmonic;
use hamjump::sync::StepWorkspace;
use hamjump::*;

fn main() -> Result<()> {
    let v = Harmonic::new(1.0);
    let mass = MassMatrix::identity(1);
    let rule = BuiltinRule::Midpoint.rule();
    let scheme = Scheme::new(&v, &mass, &rule, ForceMode::ExactQuadratic)?;

    let mut state = make_state(&[1.0], &[0.0], 0.0)?;
    let mut next = state.clone();
    let mut ws = StepWorkspace::new(1);
    let e0 = scheme.energies(&state)?;
    let (mut worst_pseudo, mut worst_discrete) = (0.0f64, 0.0f64);
    // a fixed, non-repeating step pattern in [0.05, 0.1]
    for n in 0..20_000 {
        let h = 0.05 * (1.0 + (n as f64 * 0.618_033_988_7).fract());
        scheme.step_into(&state, h, &mut next, &mut ws)?;
        std::mem::swap(&mut state, &mut next);
        let e = scheme.energies(&state)?;
        worst_pseudo = worst_pseudo.max((e.pseudo - e0.pseudo).abs());
        worst_discrete = worst_discrete.max((e.discrete - e0.discrete).abs());
    }
    println!("t = {:.3}, q = {:+.6}", state.t, state.q[0]);
    println!("pseudo-energy drift   {worst_pseudo:.3e}");
    println!("discrete-energy drift {worst_discrete:.3e}");
    Ok(())
}
