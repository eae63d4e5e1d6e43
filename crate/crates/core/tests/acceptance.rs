//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any
//! criterion fails. Runs without the libtest harness so the report is always
//! printed.

use std::time::{Duration, Instant};

use hamjump::analysis::{energy_drift, fit_order, l1_error, EnergyKind};
use hamjump::asynchronous::{run_async, AsyncState};
use hamjump::bench::commands::{async_compare, converge};
use hamjump::bench::Config;
use hamjump::models::springs::quartic_pair;
use hamjump::models::*;
use hamjump::stability::{cfl_max_step, probe_stability, stability_threshold, StabilityOutcome};
use hamjump::sync::{total_momentum, ReversibleCoords, StepWorkspace};
use hamjump::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

/// Steps drawn uniformly from `[h/2, h]` with a fixed seed.
fn irregular_steps(h: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0.5 * h..=h)).collect()
}

fn drift_over_steps<P: Potential + ?Sized>(
    potential: &P,
    mass: &MassMatrix,
    state0: &PhaseState,
    steps: &[f64],
) -> Result<f64> {
    let rule = BuiltinRule::Midpoint.rule();
    let scheme = Scheme::new(potential, mass, &rule, ForceMode::ExactQuadratic)?;
    let e0 = pseudo_energy(state0, potential, mass)?;
    let mut s = state0.clone();
    let mut next = s.clone();
    let mut ws = StepWorkspace::new(s.dim());
    let mut worst = 0.0f64;
    for &h in steps {
        scheme.step_into(&s, h, &mut next, &mut ws)?;
        std::mem::swap(&mut s, &mut next);
        worst = worst.max((pseudo_energy(&s, potential, mass)? - e0).abs());
    }
    Ok(worst / e0.abs())
}

fn c1_exact_conservation() -> Result<Outcome> {
    let v = Harmonic::new(1.0);
    let mass = MassMatrix::identity(1);
    let s0 = make_state(&[1.0], &[0.3], 0.0)?;
    let harmonic = drift_over_steps(&v, &mass, &s0, &irregular_steps(0.1, 100_000, 1))?;

    let model = string_model(StringConfig::new(0.0, 99, 0.3))?;
    let (q0, p0) = model.initial_state();
    let s0 = make_state(&q0, &p0, 0.0)?;
    // i.i.d. steps pump the alternating jump mode; at h = 5e-4 it stays bounded over 1e5 steps
    let string = drift_over_steps(&model.potential, &model.mass, &s0, &irregular_steps(5e-4, 100_000, 2))?;
    Ok(outcome(
        harmonic <= 1e-11 && string <= 1e-11,
        format!("relative drift harmonic {harmonic:.2e}, string {string:.2e} (≤ 1e-11)"),
    ))
}

fn c2_fpu_quartic_exact() -> Result<Outcome> {
    let fpu = fpu_model(FpuConfig::alternating(3, 50.0))?;
    let (q0, p0) = fpu.initial_state();
    let mass = MassMatrix::identity(fpu.dim());
    let rule = BuiltinRule::GaussLegendre3.rule();
    let scheme = Scheme::new(fpu.potential(), &mass, &rule, ForceMode::Quadrature)?;
    let rec = scheme.run(&make_state(&q0, &p0, 0.0)?, StepControl::fixed(1e-3), 250.0, 10)?;
    let drift = energy_drift(&rec, EnergyKind::Pseudo)?.max_rel;
    let i0 = fpu.total_oscillatory_energy(&q0, &p0);
    let i_dev = rec
        .states
        .iter()
        .map(|s| {
            let p: Vec<f64> = s.p_prev_half.iter().zip(&s.p_next_half).map(|(a, b)| 0.5 * (a + b)).collect();
            (fpu.total_oscillatory_energy(&s.q, &p) - i0).abs() / i0
        })
        .fold(0.0, f64::max);
    Ok(outcome(
        drift <= 1e-10 && i_dev <= 0.1,
        format!("relative pseudo drift {drift:.2e} (≤ 1e-10), max |I - I(0)|/I(0) {i_dev:.3} (≤ 0.1)"),
    ))
}

fn string_drift(rule: BuiltinRule, h: f64) -> Result<f64> {
    let model = string_model(StringConfig::new(0.99, 99, 0.3))?;
    let (q0, p0) = model.initial_state();
    let r = rule.rule();
    let scheme = Scheme::new(&model.potential, &model.mass, &r, ForceMode::Quadrature)?;
    let rec = scheme.run(&make_state(&q0, &p0, 0.0)?, StepControl::fixed(h), 1.0, 1)?;
    Ok(energy_drift(&rec, EnergyKind::Pseudo)?.max_abs)
}

fn c3_table() -> Result<Outcome> {
    let mid = string_drift(BuiltinRule::Midpoint, 0.0033)?;
    let gl5 = string_drift(BuiltinRule::GaussLegendre5, 0.0033)?;
    let ratio = mid / 1.1e-4;
    Ok(outcome(
        (0.1..=10.0).contains(&ratio) && gl5 <= 1e-10,
        format!("midpoint {mid:.2e} ({ratio:.2}× 1.1e-4, within 10×), gauss_legendre_5 {gl5:.2e} (≤ 1e-10)"),
    ))
}

fn c4_single_particle_order() -> Result<Outcome> {
    let v = SingleParticle::new();
    let mass = MassMatrix::identity(1);
    let (t0, t1) = (0.5, 2.5);
    let (q0, p0) = SingleParticle::reference(t0);
    let s0 = make_state(&[q0], &[p0], t0)?;
    let hs: Vec<f64> = (0..5).map(|k| 0.1 / 2f64.powi(k)).collect();
    let mut pass = true;
    let mut cells = Vec::new();
    for rule in [BuiltinRule::Midpoint, BuiltinRule::GaussLobatto3, BuiltinRule::GaussLobatto5] {
        let r = rule.rule();
        let scheme = Scheme::new(&v, &mass, &r, ForceMode::Quadrature)?;
        let errs = hs
            .iter()
            .map(|&h| l1_error(&scheme.run(&s0, StepControl::fixed(h), t1, 1)?, |t| vec![SingleParticle::reference(t).0]))
            .collect::<Result<Vec<_>>>()?;
        let order = fit_order(&hs, &errs)?;
        pass &= within(order, 2.0, 0.2);
        cells.push(format!("{} {order:.3}", rule.name()));
    }
    Ok(outcome(pass, format!("ℓ₁ slopes {} (2.0 ± 0.2)", cells.join(", "))))
}

fn c5_energy_order() -> Result<Outcome> {
    let cfg = Config::from_toml(
        r#"
        model = "string"
        rule = "midpoint"
        string_alpha = 0.99
        string_n = 99
        string_amplitude = 0.3
        t_end = 1.0
        metric = "energy_drift"
        ladder = [0.0033, 0.00165, 0.000825, 0.0004125, 0.00020625]
        "#,
    )?;
    let conv = converge(&cfg)?;
    Ok(outcome(
        within(conv.slope, 2.0, 0.3),
        format!("max pseudo drift slope {:.3} (2.0 ± 0.3)", conv.slope),
    ))
}

fn c6_reversibility() -> Result<Outcome> {
    let fpu = fpu_model(FpuConfig::alternating(3, 50.0))?;
    let mass = MassMatrix::identity(fpu.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for rule in BuiltinRule::ALL {
        let r = rule.rule();
        let scheme = Scheme::new(fpu.potential(), &mass, &r, ForceMode::Quadrature)?;
        for _ in 0..100 {
            let mut draw = |scale: f64| -> Vec<f64> { (0..6).map(|_| scale * rng.gen_range(-1.0..1.0)).collect() };
            let y = ReversibleCoords {
                q: draw(1.0),
                mean: draw(1.0),
                jump: draw(0.1),
            };
            let h = rng.gen_range(1e-4..1e-2);
            let back = scheme.reversibility_map(&scheme.reversibility_map(&y, h)?, -h)?;
            worst = worst.max(back.max_abs_diff(&y));
        }
    }
    Ok(outcome(worst <= 1e-11, format!("max |Φ_-h∘Φ_h(y) - y| {worst:.2e} over 6 rules × 100 states (≤ 1e-11)")))
}

fn c7_cfl() -> Result<Outcome> {
    let lambda = 4.0;
    let v = Harmonic::new(lambda);
    let mass = MassMatrix::identity(1);
    let s0 = make_state(&[1.0], &[0.0], 0.0)?;
    let bound = cfl_max_step(lambda, 1.0)?;
    let found = stability_threshold(&v, &mass, &s0, 0.5 * bound, 1.5 * bound, 100_000, 30)?;
    let above = probe_stability(&v, &mass, &s0, 1.05 * bound, 100_000)?;
    let below = probe_stability(&v, &mass, &s0, 0.95 * bound, 100_000)?;
    let rel = (found - bound).abs() / bound;
    Ok(outcome(
        rel <= 0.02 && matches!(above, StabilityOutcome::Diverged(_)) && below == StabilityOutcome::Bounded,
        format!("bisected {found:.5} vs 2√(μ/λ) = {bound} ({:.2}%), 1.05×: {above:?}, 0.95×: {below:?}", 100.0 * rel),
    ))
}

fn c8_adaptive() -> Result<Outcome> {
    let model = string_model(StringConfig::new(0.99, 99, 0.3))?;
    let (q0, p0) = model.initial_state();
    let rule = BuiltinRule::Midpoint.rule();
    let scheme = Scheme::new(&model.potential, &model.mass, &rule, ForceMode::Quadrature)?;
    let eps = 3e-4;
    let rec = scheme.run(&make_state(&q0, &p0, 0.0)?, StepControl::adaptive(0.005, eps), 1.0, 1)?;
    let mut worst = 0.0f64;
    for s in &rec.states {
        let st = PhaseState::from_momenta(s.q.clone(), s.p_prev_half.clone(), s.p_next_half.clone(), 0.0)?;
        let defect = 0.125 * model.mass.inv_sqrt_norm_sq(&st.jump)?;
        worst = worst.max(defect / (eps * pseudo_energy(&st, &model.potential, &model.mass)?));
    }
    Ok(outcome(
        worst <= 1.0 && rec.rejected_steps >= 1 && rec.len() == rec.steps + 1,
        format!(
            "max ⅛|[p]|²_M⁻¹ / (ε·H̃) {worst:.3} (≤ 1) over {} accepted steps, {} halvings (≥ 1)",
            rec.steps, rec.rejected_steps
        ),
    ))
}

fn c9_async_conservation() -> Result<Outcome> {
    let fpu = fpu_model(FpuConfig::slow_fast(3, 10f64.sqrt()))?;
    let (q0, p0) = fpu.initial_state();
    let sys = fpu.slow_fast_system(50, 0.01)?;
    let rule = BuiltinRule::GaussLobatto5.rule();
    let rec = run_async(&AsyncState::new(&q0, &p0, 0.0)?, &sys, &rule, 100.0, 1)?;
    let drift = energy_drift(&rec, EnergyKind::Pseudo)?.max_rel;
    Ok(outcome(
        drift <= 1e-11,
        format!("relative coarse pseudo drift {drift:.2e} (≤ 1e-11), h_F = {:.1e}", sys.h_f()),
    ))
}

fn c10_async_order() -> Result<Outcome> {
    let base = r#"
        model = "fpu_slow_fast"
        rule = "gauss_lobatto_5"
        fpu_m = 3
        fpu_omega = 3.1622776601683795
        t_end = 10.0
        metric = "linf_vs_sync"
    "#;
    let fixed = converge(&Config::from_toml(&format!("{base}h_f = 1e-4\nladder = [0.04, 0.02, 0.01, 0.005, 0.0025]\n"))?)?;
    let ratio = converge(&Config::from_toml(&format!("{base}k = 25\nladder = [0.04, 0.02, 0.01, 0.005, 0.0025]\n"))?)?;
    let k1 = async_compare(&Config::from_toml(&format!("{base}k = 1\nh_s = 1e-3\n"))?)?;
    let k1_err = k1.iter().find(|r| r.scheme == "async").map_or(f64::NAN, |r| r.linf_error);
    Ok(outcome(
        within(fixed.slope, 2.0, 0.3) && within(ratio.slope, 2.0, 0.3) && k1_err <= 1e-12,
        format!(
            "slope vs h_S at h_F = 1e-4 {:.3}, at h_S/h_F = 25 {:.3} (2.0 ± 0.3), K = 1 vs sync {k1_err:.1e} (≤ 1e-12)",
            fixed.slope, ratio.slope
        ),
    ))
}

fn c11_inhomogeneous_wave() -> Result<Outcome> {
    let rows = async_compare(&Config::from_toml(
        r#"
        model = "inhom_wave"
        rule = "midpoint"
        t_end = 0.5
        wave_n_ladder = [1024, 2048, 4096, 8192]
        hs_over_dx = 0.5
        k = 10
        error_reference = "exact"
        "#,
    )?)?;
    let pick = |scheme: &str| -> (Vec<f64>, Vec<f64>) {
        rows.iter()
            .filter(|r| r.scheme == scheme)
            .map(|r| (r.force_evals as f64, r.linf_error))
            .unzip()
    };
    let (fs, es) = pick("sync");
    let (fa, ea) = pick("async");
    let slope_s = fit_order(&fs, &es)?;
    let slope_a = fit_order(&fa, &ea)?;
    let err_ratio = ea.iter().zip(&es).map(|(a, s)| a / s).fold(0.0, f64::max);
    let cost_ratio = fa.iter().zip(&fs).map(|(a, s)| a / s).fold(0.0, f64::max);
    Ok(outcome(
        within(slope_s, -1.0, 0.3) && within(slope_a, -1.0, 0.3) && err_ratio <= 2.0 && cost_ratio <= 0.65,
        format!(
            "error vs force evals slope sync {slope_s:.3}, async {slope_a:.3} (-1.0 ± 0.3); async/sync error ≤ {err_ratio:.2} (≤ 2), evals ≤ {cost_ratio:.3} (≤ 0.65)"
        ),
    ))
}

fn c12_momentum() -> Result<Outcome> {
    let v = quartic_pair(1.0);
    let mass = MassMatrix::diagonal(vec![1.0, 2.0])?;
    let rule = BuiltinRule::Midpoint.rule();
    let scheme = Scheme::new(&v, &mass, &rule, ForceMode::Quadrature)?;
    let s0 = make_state(&[0.0, 1.3], &[0.7, -0.2], 0.0)?;
    let p0 = total_momentum(&s0, 1)?[0];
    let mut s = s0.clone();
    let mut next = s.clone();
    let mut ws = StepWorkspace::new(2);
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        scheme.step_into(&s, 0.01, &mut next, &mut ws)?;
        std::mem::swap(&mut s, &mut next);
        worst = worst.max((total_momentum(&s, 1)?[0] - p0).abs());
    }
    Ok(outcome(worst <= 1e-12, format!("max |P - P(0)| {worst:.2e} over 1e5 steps (≤ 1e-12)")))
}

type Check = fn() -> Result<Outcome>;

fn main() {
    let criteria: [(&str, Check, u64); 12] = [
        ("pseudo-energy, exact force integrals", c1_exact_conservation, 10),
        ("quartic-exact FPU conservation", c2_fpu_quartic_exact, 60),
        ("string energy error table", c3_table, 120),
        ("second-order trajectories", c4_single_particle_order, 60),
        ("second-order energy error", c5_energy_order, 180),
        ("time reversibility", c6_reversibility, 5),
        ("step bound", c7_cfl, 30),
        ("adaptive step control", c8_adaptive, 120),
        ("asynchronous coarse conservation", c9_async_conservation, 120),
        ("asynchronous order", c10_async_order, 300),
        ("inhomogeneous wave", c11_inhomogeneous_wave, 300),
        ("momentum", c12_momentum, 5),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*budget);
        let (pass, detail) = match result {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<36} {}  {detail}; {:.2} s (< {budget} s)",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
