use blowup_lab::exponents::{classify, gamma, strauss_exponent, Criticality, ProblemIndex, CRITICAL_TOL};
use blowup_lab::harness::output::num;
use blowup_lab::harness::{fit_subcritical, ols, ConfigMap, SweepConfig};
use blowup_lab::iteration::{crit_sequences, subcrit_seed, subcrit_sequences, volterra_envelope_subcrit};
use blowup_lab::ode::CoefficientProfile;
use blowup_lab::wave::{crossing_time, run, InitialBump, Mode, SolverConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cheap() -> ProptestConfig {
    ProptestConfig::with_cases(32)
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn strauss_exponent_is_a_root(n in 2u32..60) {
        let ps = strauss_exponent(n).unwrap();
        prop_assert!(gamma(ProblemIndex::new(n, ps).unwrap()).abs() < 1e-10 * (n as f64));
    }

    #[test]
    fn class_follows_gamma_sign(n in 2u32..12, p in 1.01f64..6.0) {
        let idx = ProblemIndex::new(n, p).unwrap();
        let ps = strauss_exponent(n).unwrap();
        prop_assume!((p - ps).abs() > 1e-6);
        let class = classify(idx, CRITICAL_TOL).unwrap().class;
        let expect = if gamma(idx) > 0.0 { Criticality::SubCritical } else { Criticality::SuperCritical };
        prop_assert_eq!(class, expect);
    }

    #[test]
    fn exact_power_laws_are_recovered(c in 0.1f64..100.0, k in 0usize..4) {
        let (n, p) = [(3, 2.0), (2, 2.5), (4, 1.8), (3, 1.5)][k];
        let idx = ProblemIndex::new(n, p).unwrap();
        let rate = 2.0 * p * (p - 1.0) / gamma(idx);
        let eps: Vec<f64> = (0..5).map(|j| 0.4 / 2f64.powi(j)).collect();
        let t: Vec<f64> = eps.iter().map(|e| c * e.powf(-rate)).collect();
        let f = fit_subcritical(&eps, &t, idx, 0.2).unwrap();
        prop_assert!(f.rel_err < 1e-9 && f.pass);
        prop_assert!((f.rel_err - (f.slope - f.theory_slope).abs() / f.theory_slope).abs() < 1e-15);
    }

    #[test]
    fn dropping_one_row_keeps_slope(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps: Vec<f64> = (0..6).map(|j| 0.4 / 2f64.powi(j)).collect();
        let t: Vec<f64> = eps.iter().map(|e| 7.0 * e.powi(-2) * (1.0 + rng.gen_range(-0.05..0.05))).collect();
        let idx = ProblemIndex::new(3, 2.0).unwrap();
        let full = fit_subcritical(&eps, &t, idx, 0.2).unwrap().slope;
        for drop in 0..eps.len() {
            let e: Vec<f64> = eps.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, v)| *v).collect();
            let tt: Vec<f64> = t.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, v)| *v).collect();
            let s = fit_subcritical(&e, &tt, idx, 0.2).unwrap().slope;
            prop_assert!(((s - full) / full).abs() < 0.1);
        }
    }

    #[test]
    fn ols_is_affine_equivariant(a in -5.0f64..5.0, b in -5.0f64..5.0, scale in 0.1f64..10.0) {
        let x: Vec<f64> = (0..8).map(|i| i as f64 * 0.7).collect();
        let y: Vec<f64> = x.iter().map(|v| a + b * v + (v * 3.1).sin()).collect();
        let f = ols(&x, &y).unwrap();
        let ys: Vec<f64> = y.iter().map(|v| scale * v + 1.0).collect();
        let g = ols(&x, &ys).unwrap();
        prop_assert!((g.slope - scale * f.slope).abs() < 1e-9 * (1.0 + f.slope.abs()) * scale);
        prop_assert!((g.r_squared - f.r_squared).abs() < 1e-9);
    }

    #[test]
    fn formatted_numbers_round_trip(x in -1e30f64..1e30) {
        let back: f64 = num(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-10 * x.abs());
    }

    #[test]
    fn ladders_strictly_decrease(max in 0.01f64..2.0, ratio in 1.01f64..4.0, count in 1usize..10) {
        let c = SweepConfig { eps_max: max, eps_ratio: ratio, eps_count: count, ..Default::default() };
        let l = c.ladder();
        prop_assert_eq!(l.len(), count);
        prop_assert!(l.windows(2).all(|w| w[1] < w[0]));
        for e in l {
            let h = c.row_horizon(e).unwrap();
            prop_assert!(h >= c.horizon && h <= c.horizon_cap);
        }
    }

    #[test]
    fn config_round_trips(vals in proptest::collection::btree_map("[a-z][a-z_]{0,8}", -1e6f64..1e6, 0..8)) {
        let text: String = vals.iter().map(|(k, v)| format!("{k} = {v} # c\n")).collect();
        let mut c = ConfigMap::parse(&text).unwrap();
        for (k, v) in &vals {
            prop_assert_eq!(c.f64(k, f64::NAN).unwrap(), *v);
        }
        prop_assert!(c.finish().is_ok());
    }

    #[test]
    fn critical_closed_form_matches_recursion(p in 1.2f64..4.0, c1 in 0.01f64..100.0) {
        let s = crit_sequences(p, 2.0, c1, 30).unwrap();
        prop_assert!(s.closed_form_gap() < 1e-10);
    }

    #[test]
    fn subcritical_closed_forms_match(k in 0usize..4, eps in 0.01f64..1.0) {
        let (n, p) = [(3, 2.0), (2, 2.5), (4, 1.8), (3, 1.5)][k];
        let s = subcrit_sequences(p, n, 0.5, 1.0, eps, 25).unwrap();
        prop_assert!(s.closed_form_gap() < 1e-10);
    }

    #[test]
    fn crossing_time_lies_in_bracket(v in proptest::collection::vec(0.0f64..10.0, 2..30), level in 0.5f64..9.5) {
        let t: Vec<f64> = (0..v.len()).map(|i| i as f64).collect();
        let mut sup = v.clone();
        for i in 1..sup.len() {
            sup[i] = sup[i].max(sup[i - 1]);
        }
        if let Some(tc) = crossing_time(&t, &sup, level) {
            let k = sup.iter().position(|&s| s >= level).unwrap();
            prop_assert!(tc <= t[k] + 1e-12);
            prop_assert!(k == 0 || tc >= t[k - 1] - 1e-12);
        } else {
            prop_assert!(sup.iter().all(|&s| s < level));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn envelope_is_monotone_in_sweeps_and_time(eps in 0.2f64..0.6) {
        let t_max = 100.0 / (0.5 * eps * eps);
        let t: Vec<f64> = (0..801).map(|i| t_max * i as f64 / 800.0).collect();
        let seed = subcrit_seed(&t, 1.0, eps, 3, 2.0);
        let env = volterra_envelope_subcrit(&t, &seed, 0.5, 2.0, 3, 1.0, 60).unwrap();
        prop_assert!(env.is_monotone());
        prop_assert!(env.last().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn support_stays_inside_the_light_cone(r0 in 0.5f64..2.0, amp in 0.1f64..2.0, n in 2u32..6) {
        let data = InitialBump::new(r0, 4, amp, amp, 0.5).unwrap();
        let mut c = SolverConfig::new(n, 2.0, CoefficientProfile::scattering(1.0, 2.0, -0.5, 1.5).unwrap(), data);
        c.mode = Mode::Free;
        c.h = 0.05;
        c.horizon = 3.0;
        c.nonlinear = false;
        let r = run(&c).unwrap();
        for (t, s) in r.trace.t.iter().zip(&r.trace.support_r) {
            prop_assert!(*s <= t + r0 + 2.0 * c.h + 1e-9, "support {s} at t = {t}");
        }
    }

    #[test]
    fn linear_response_scales_with_eps(eps in 0.05f64..2.0) {
        let run_eps = |e: f64| {
            let data = InitialBump::new(1.0, 4, 1.0, 1.0, e).unwrap();
            let mut c = SolverConfig::new(3, 2.0, CoefficientProfile::scattering(2.0, 2.0, 1.0, 1.5).unwrap(), data);
            c.mode = Mode::Free;
            c.nonlinear = false;
            c.h = 0.1;
            c.horizon = 5.0;
            run(&c).unwrap().trace
        };
        let a = run_eps(1.0);
        let b = run_eps(eps);
        for (x, y) in a.g.iter().zip(&b.g) {
            prop_assert!((y - eps * x).abs() <= 1e-10 * (1.0 + x.abs()));
        }
    }
}
