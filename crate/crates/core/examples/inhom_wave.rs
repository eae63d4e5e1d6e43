//! A pulse crossing a tenfold drop in wave speed, integrated synchronously
//! at the fine step and asynchronously with K = 10, against the exact
//! reflected/transmitted solution.

use hamjump::asynchronous::{run_async, AsyncState};
use hamjump::models::{inhom_wave_model, InhomWaveConfig};
use hamjump::*;

fn main() -> Result<()> {
    let rule = BuiltinRule::Midpoint.rule();
    let (k, t_end) = (10, 0.5);
    println!("{:>5} {:>12} {:>10} {:>12} {:>10}", "N", "sync evals", "error", "async evals", "error");
    for n in [256, 512, 1024, 2048] {
        let wave = inhom_wave_model(InhomWaveConfig::new(n))?;
        let (q0, p0) = wave.initial_state();
        let exact = wave.exact(t_end);
        let err = |q: &[f64]| q.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

        // half of the stability limit Δx/c on each side
        let h_s = 0.5 * wave.config().dx();
        let sys = wave.slow_fast_system(k, h_s)?;
        let arec = run_async(&AsyncState::new(&q0, &p0, 0.0)?, &sys, &rule, t_end, usize::MAX)?;

        let mass = MassMatrix::identity(wave.dim());
        let scheme = Scheme::new(wave.potential(), &mass, &rule, ForceMode::Quadrature)?;
        let srec = scheme.run(&make_state(&q0, &p0, 0.0)?, StepControl::fixed(sys.h_f()), t_end, usize::MAX)?;

        println!(
            "{n:5} {:12} {:10.3e} {:12} {:10.3e}",
            srec.total_force_evals(),
            err(srec.final_positions().unwrap()),
            arec.total_force_evals(),
            err(arec.final_positions().unwrap())
        );
    }
    Ok(())
}
