use hamjump::analysis::{fit_order, linf_error};
use hamjump::asynchronous::{coarse_pseudo_energy, coarse_step, run_async, AsyncState, SlowFastSystem};
use hamjump::mass::p1_mass_block;
use hamjump::models::springs::{harmonic_chain, quartic_pair};
use hamjump::models::*;
use hamjump::potential::gradient_check;
use hamjump::stability::estimate_hessian_extremes;
use hamjump::sync::{total_momentum, ReversibleCoords, StepWorkspace};
use hamjump::*;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig::with_cases(cases)
}

fn vec_in(n: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, n)
}

fn fpu() -> Fpu {
    fpu_model(FpuConfig::alternating(3, 50.0)).unwrap()
}

fn fpu_slow_fast() -> Fpu {
    fpu_model(FpuConfig::slow_fast(3, 10f64.sqrt())).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn make_state_has_zero_jump(q in vec_in(5, 10.0), p in vec_in(5, 10.0), t in -5.0..5.0f64) {
        let s = make_state(&q, &p, t).unwrap();
        prop_assert!(s.jump.iter().all(|&j| j == 0.0));
        prop_assert_eq!(&s.p_prev_half, &s.p_next_half);
    }

    #[test]
    fn mass_norm_is_positive_definite(v in vec_in(12, 3.0), d in prop::collection::vec(0.1..5.0f64, 12)) {
        let diag = MassMatrix::diagonal(d).unwrap();
        let fem = MassMatrix::dense(12, p1_mass_block(12, 1.0 / 13.0)).unwrap();
        let zero = vec![0.0; 12];
        let nonzero = v.iter().any(|&x| x != 0.0);
        for m in [&diag, &fem] {
            let n = m.inv_sqrt_norm_sq(&v).unwrap();
            prop_assert!(n >= 0.0);
            prop_assert_eq!(n > 0.0, nonzero);
            prop_assert_eq!(m.inv_sqrt_norm_sq(&zero).unwrap(), 0.0);
        }
    }

    #[test]
    fn model_gradients_match_finite_differences(seed in vec_in(16, 1.0), s in 1.05..3.0f64) {
        let tol = 1e-5;
        prop_assert!(gradient_check(&Harmonic::new(2.5), &seed[..1]) < tol);
        prop_assert!(gradient_check(&SingleParticle::new(), &[s]) < tol);
        prop_assert!(gradient_check(&QuarticWell::new(4), &seed[..4]) < tol);
        prop_assert!(gradient_check(fpu().potential(), &seed[..6]) < tol);
        prop_assert!(gradient_check(fpu_slow_fast().potential(), &seed[..6]) < tol);
        prop_assert!(gradient_check(&quartic_pair(1.5), &seed[..2]) < tol);
        for alpha in [0.0, 0.8, 0.99] {
            let model = string_model(StringConfig::new(alpha, 8, 0.3)).unwrap();
            let q: Vec<f64> = seed.iter().map(|x| 0.3 * x).collect();
            prop_assert!(gradient_check(&model.potential, &q) < tol);
        }
        let wave = inhom_wave_model(InhomWaveConfig::new(8)).unwrap();
        let q: Vec<f64> = seed[..7].iter().map(|x| 1e-3 * x).collect();
        prop_assert!(gradient_check(wave.potential(), &q) < tol);
    }

    #[test]
    fn energy_defect_identity(q in vec_in(6, 0.5), p in vec_in(6, 1.0), h in 0.001..0.02f64) {
        let model = fpu();
        let mass = MassMatrix::identity(6);
        let rule = BuiltinRule::Midpoint.rule();
        let scheme = Scheme::new(model.potential(), &mass, &rule, ForceMode::Quadrature).unwrap();
        let mut s = make_state(&q, &p, 0.0).unwrap();
        for _ in 0..20 {
            s = scheme.step(&s, h).unwrap();
            let e = scheme.energies(&s).unwrap();
            let gap = e.discrete - e.pseudo - 0.125 * mass.inv_sqrt_norm_sq(&s.jump).unwrap();
            prop_assert!(gap.abs() <= 1e-13 * e.discrete.abs().max(1.0), "gap {gap:e}");
        }
    }

    #[test]
    fn pseudo_energy_conserved_for_any_step_sequence(
        q in vec_in(6, 0.5),
        p in vec_in(6, 1.0),
        steps in prop::collection::vec(1e-4..5e-3f64, 200),
    ) {
        let model = fpu();
        let mass = MassMatrix::identity(6);
        let rule = BuiltinRule::GaussLegendre3.rule();
        let scheme = Scheme::new(model.potential(), &mass, &rule, ForceMode::Quadrature).unwrap();
        let mut s = make_state(&q, &p, 0.0).unwrap();
        let e0 = pseudo_energy(&s, model.potential(), &mass).unwrap();
        let mut next = s.clone();
        let mut ws = StepWorkspace::new(6);
        for &h in &steps {
            scheme.step_into(&s, h, &mut next, &mut ws).unwrap();
            std::mem::swap(&mut s, &mut next);
            let e = pseudo_energy(&s, model.potential(), &mass).unwrap();
            prop_assert!(rel(e, e0) <= 1e-12, "relative drift {:e}", rel(e, e0));
        }
    }

    #[test]
    fn string_pseudo_energy_conserved_with_dense_mass(
        seed in vec_in(20, 1.0),
        steps in prop::collection::vec(5e-4..3e-3f64, 100),
    ) {
        let model = string_model(StringConfig::new(0.0, 10, 0.3)).unwrap();
        let q: Vec<f64> = seed.iter().map(|x| 0.3 * x).collect();
        let p: Vec<f64> = seed.iter().rev().map(|x| 0.1 * x).collect();
        let rule = BuiltinRule::Midpoint.rule();
        let scheme = Scheme::new(&model.potential, &model.mass, &rule, ForceMode::ExactQuadratic).unwrap();
        let mut s = make_state(&q, &p, 0.0).unwrap();
        let e0 = pseudo_energy(&s, &model.potential, &model.mass).unwrap();
        for &h in &steps {
            s = scheme.step(&s, h).unwrap();
        }
        let e = pseudo_energy(&s, &model.potential, &model.mass).unwrap();
        prop_assert!(rel(e, e0) <= 1e-12, "relative drift {:e}", rel(e, e0));
    }

    #[test]
    fn string_steps_are_reversible(seed in vec_in(40, 1.0), h in 1e-4..3e-3f64) {
        let model = string_model(StringConfig::new(0.99, 10, 0.3)).unwrap();
        let y = ReversibleCoords {
            q: seed[..20].iter().map(|x| 0.3 * x).collect(),
            mean: seed[20..].iter().map(|x| 0.05 * x).collect(),
            jump: seed[..20].iter().rev().map(|x| 1e-3 * x).collect(),
        };
        for rule in BuiltinRule::ALL {
            let r = rule.rule();
            let scheme = Scheme::new(&model.potential, &model.mass, &r, ForceMode::Quadrature).unwrap();
            let back = scheme.reversibility_map(&scheme.reversibility_map(&y, h).unwrap(), -h).unwrap();
            prop_assert!(back.max_abs_diff(&y) <= 1e-11, "{} {:e}", rule.name(), back.max_abs_diff(&y));
        }
    }

    #[test]
    fn translation_invariant_potentials_keep_total_momentum(
        q in vec_in(2, 1.0),
        p in vec_in(2, 1.0),
        steps in prop::collection::vec(1e-3..2e-2f64, 500),
    ) {
        let v = quartic_pair(2.0);
        let mass = MassMatrix::diagonal(vec![1.0, 3.0]).unwrap();
        let rule = BuiltinRule::GaussLobatto3.rule();
        let scheme = Scheme::new(&v, &mass, &rule, ForceMode::Quadrature).unwrap();
        let mut s = make_state(&q, &p, 0.0).unwrap();
        let p0 = total_momentum(&s, 1).unwrap();
        for &h in &steps {
            s = scheme.step(&s, h).unwrap();
        }
        let p1 = total_momentum(&s, 1).unwrap();
        prop_assert!((p1[0] - p0[0]).abs() <= 1e-12);
    }

    #[test]
    fn quadrature_translation_and_reversal(
        c in prop::collection::vec(-2.0..2.0f64, 4),
        a in -3.0..3.0f64,
        len in 0.1..2.0f64,
        shift in -5.0..5.0f64,
    ) {
        let b = a + len;
        let f = |t: f64| c[0] + c[1] * t.sin() + c[2] * (c[3] * t).exp();
        for rule in BuiltinRule::ALL {
            let r = rule.rule();
            let i = r.integrate_scalar(f, a, b);
            let j = r.integrate_scalar(|t| f(t + shift), a - shift, b - shift);
            let back = r.integrate_scalar(f, b, a);
            let scale = i.abs().max(1.0);
            prop_assert!((i - j).abs() <= 1e-13 * scale);
            prop_assert!((i + back).abs() <= 1e-13 * scale);
        }
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn single_coarse_substep_is_the_synchronous_scheme(seed in vec_in(12, 1.0), h in 1e-3..1e-2f64) {
        let model = fpu_slow_fast();
        let sys = model.slow_fast_system(1, h).unwrap();
        let rule = BuiltinRule::GaussLobatto5.rule();
        let (q0, p0) = (&seed[..6], &seed[6..]);
        let t_end = 50.0 * h;
        let arec = run_async(&AsyncState::new(q0, p0, 0.0).unwrap(), &sys, &rule, t_end, 1).unwrap();
        let full = sys.full_potential();
        let mass = sys.mass_matrix();
        let scheme = Scheme::new(&full, &mass, &rule, ForceMode::Quadrature).unwrap();
        let srec = scheme.run(&make_state(q0, p0, 0.0).unwrap(), StepControl::fixed(h), t_end, 1).unwrap();
        prop_assert_eq!(arec.len(), srec.len());
        for (a, s) in arec.states.iter().zip(&srec.states) {
            for (x, y) in a.q.iter().zip(&s.q).chain(a.p_next_half.iter().zip(&s.p_next_half)) {
                prop_assert!((x - y).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn coarse_pseudo_energy_conserved_for_any_ratio(seed in vec_in(12, 1.0), k in 1usize..40, h_f in 1e-4..1e-3f64) {
        let model = fpu_slow_fast();
        let sys = model.slow_fast_system(k, k as f64 * h_f).unwrap();
        for rule in [BuiltinRule::GaussLegendre2, BuiltinRule::GaussLobatto5] {
            let r = rule.rule();
            let mut s = AsyncState::new(&seed[..6], &seed[6..], 0.0).unwrap();
            let e0 = coarse_pseudo_energy(&s, &sys).unwrap();
            for _ in 0..20 {
                s = coarse_step(&s, &sys, &r).unwrap();
                let e = coarse_pseudo_energy(&s, &sys).unwrap();
                prop_assert!(rel(e, e0) <= 1e-12, "{} relative drift {:e}", rule.name(), rel(e, e0));
            }
        }
    }

    #[test]
    fn slow_fast_decompositions_sum_to_the_full_potential(seed in vec_in(15, 1.0)) {
        let check = |sys: &SlowFastSystem, full: &dyn Potential, q: &[f64]| {
            let parts = sys.v_s().value(q) + sys.v_m().value(q) + sys.v_f().value(q);
            let v = full.value(q);
            (parts - v).abs() <= 1e-12 * v.abs().max(1e-300)
        };
        let model = fpu_slow_fast();
        let sys = model.slow_fast_system(10, 0.01).unwrap();
        prop_assert!(check(&sys, model.potential(), &seed[..6]));
        let wave = inhom_wave_model(InhomWaveConfig::new(16)).unwrap();
        let sys = wave.slow_fast_system(10, 0.01).unwrap();
        prop_assert!(check(&sys, wave.potential(), &seed[..15]));
    }

    #[test]
    fn subsampling_never_increases_linf(stride in 1usize..20, h in 0.01..0.05f64) {
        let v = harmonic_chain(4, 3.0);
        let mass = MassMatrix::identity(4);
        let rule = BuiltinRule::Midpoint.rule();
        let s0 = make_state(&[0.1, -0.2, 0.3, 0.0], &[0.0; 4], 0.0).unwrap();
        let scheme = Scheme::new(&v, &mass, &rule, ForceMode::Quadrature).unwrap();
        let fine = scheme.run(&s0, StepControl::fixed(h), 2.0, 1).unwrap();
        let other = scheme.run(&s0, StepControl::fixed(h / 2.0), 2.0, 1).unwrap();
        let coarse = scheme.run(&s0, StepControl::fixed(h), 2.0, stride).unwrap();
        prop_assert!(linf_error(&coarse, &other).unwrap() <= linf_error(&fine, &other).unwrap());
    }

    #[test]
    fn fit_order_recovers_power_laws(order in -3.0..5.0f64, c in 0.01..100.0f64) {
        let hs = [0.1, 0.05, 0.025, 0.0125];
        let errs: Vec<f64> = hs.iter().map(|h: &f64| c * h.powf(order)).collect();
        prop_assert!((fit_order(&hs, &errs).unwrap() - order).abs() <= 1e-10);
    }

    #[test]
    fn hessian_estimate_ignores_affine_terms(shift in vec_in(6, 10.0), q in vec_in(6, 0.5)) {
        struct Affine<'a, P: ?Sized> {
            inner: &'a P,
            c: Vec<f64>,
        }
        impl<P: Potential + ?Sized> Potential for Affine<'_, P> {
            fn dim(&self) -> usize {
                self.inner.dim()
            }
            fn value(&self, q: &[f64]) -> f64 {
                self.inner.value(q) + q.iter().zip(&self.c).map(|(a, b)| a * b).sum::<f64>()
            }
            fn gradient(&self, q: &[f64], out: &mut [f64]) {
                self.inner.gradient(q, out);
                for (o, c) in out.iter_mut().zip(&self.c) {
                    *o += c;
                }
            }
        }
        // stiff chain with a soft quartic well: simple top eigenvalue, q-dependent
        let laws: Vec<SpringLaw> = (0..7)
            .map(|i| if i % 2 == 0 { SpringLaw::Harmonic(50.0 + i as f64) } else { SpringLaw::Quartic(1.0) })
            .collect();
        let chain = SpringNetwork::fixed_chain(&laws);
        let plain = estimate_hessian_extremes(&chain, &q, 5000).unwrap();
        let shifted = estimate_hessian_extremes(&Affine { inner: &chain, c: shift }, &q, 5000).unwrap();
        prop_assert!(rel(shifted, plain) <= 1e-4, "{plain} vs {shifted}");
    }
}
