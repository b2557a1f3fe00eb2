//! Acceptance suite: prints one PASS/FAIL line per criterion, then asserts the expected outcome.
//! Runs without the libtest harness so the lines show up in `cargo test` output.
//!
//! Criterion 4 cannot hold on [0, 100]: for the default profile the bounded branch of the
//! Riccati linearization vanishes near t = 0.076, so no multiplier pair exists from t = 0.
//! It is run as stated, reported as FAIL with the obstruction, and the same check is also
//! reported on [1, 100] for information.

use std::sync::Arc;
use std::time::Instant;

use blowup_lab::exponents::{gamma, strauss_exponent, ProblemIndex};
use blowup_lab::harness::{fit_envelope_rows, run_envelope_sweep, run_sweep, EnvelopeSweepConfig, SweepConfig};
use blowup_lab::iteration::{crit_sequences, slicing_n, subcrit_seed, volterra_envelope_subcrit};
use blowup_lab::ode::{compute_multipliers, compute_multipliers_from, solve_chi, solve_rho, CoefficientProfile};
use blowup_lab::testfuncs::{lemma41_refinement, AuditGrids, KernelConfig, PhiEvaluator};
use blowup_lab::wave::checks::{energy_drift, frame_constant, lower_bound_constant};
use blowup_lab::wave::{run, InitialBump, Mode, RadialGrid, SchemeParams, Simulation, SolverConfig, WeightedConfig};
use blowup_lab::Error;

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

fn default_profile() -> CoefficientProfile {
    CoefficientProfile::scattering(2.0, 2.0, 1.0, 1.5).unwrap()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        let ps = strauss_exponent(n).unwrap();
        worst = worst.max(gamma(ProblemIndex::new(n, ps).unwrap()).abs());
    }
    let e3 = (strauss_exponent(3).unwrap() - (1.0 + 2f64.sqrt())).abs();
    let e2 = (strauss_exponent(2).unwrap() - (3.0 + 17f64.sqrt()) / 2.0).abs();
    outcome(
        worst < 1e-12 && e3 < 1e-12 && e2 < 1e-12,
        format!("max |gamma(n, p_S)| = {worst:.1e}, |p_S(3) err| = {e3:.1e}, |p_S(2) err| = {e2:.1e}"),
    )
}

/// Residual, trailing-quarter sign and horizon doubling of r2.
fn riccati_checks(profile: &CoefficientProfile) -> Result<(bool, String), Error> {
    let m = compute_multipliers(profile, 200.0, 1e-3)?;
    let m2 = compute_multipliers(profile, 400.0, 1e-3)?;
    let shift = (m.l1_r2 - m2.l1_r2).abs();
    let sign = m.r2_negative_on_trailing_quarter();
    let ok = m.residual_max < 1e-8 && sign && shift < 1e-6;
    Ok((
        ok,
        format!(
            "residual {:.1e}, r2 < 0 on trailing quarter: {sign}, doubling shift {:.1e}",
            m.residual_max, shift
        ),
    ))
}

fn criterion_2() -> Outcome {
    let profile = CoefficientProfile::scattering(2.0, 2.0, 1.0, 2.5).unwrap();
    match riccati_checks(&profile) {
        Ok((ok, d)) => outcome(ok, d),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_3() -> Outcome {
    let r = solve_rho(&CoefficientProfile::zero(), 0.5, 50.0, 1e-3).unwrap();
    let err = (0..r.grid.len)
        .map(|i| (r.rho[i] - (-0.5 * r.grid.t(i)).exp()).abs())
        .fold(0.0, f64::max);
    let g = solve_rho(&default_profile(), 0.5, 50.0, 1e-3).unwrap();
    let (lo, hi) = g.decay_ratio_stats;
    outcome(
        err < 1e-8 && lo > 0.0 && hi <= 10.0 * lo,
        format!("free-case error {err:.1e}; trailing-half rho e^(t/2) in [{lo:.4}, {hi:.4}]"),
    )
}

fn chi_checks(profile: &CoefficientProfile, t0: f64) -> Result<(bool, bool), Error> {
    let m = compute_multipliers_from(profile, t0, 100.0, 1e-3)?;
    Ok(solve_chi(&m, 0.5, t0, 100.0)?.sandwich_ok)
}

fn criterion_4() -> (Outcome, Option<Error>) {
    let profile = default_profile();
    let info = match chi_checks(&profile, 1.0) {
        Ok(s) => format!("on [1, 100] sandwich bounds hold: {s:?}"),
        Err(e) => format!("on [1, 100]: {e}"),
    };
    match compute_multipliers(&profile, 100.0, 1e-3).and_then(|_| chi_checks(&profile, 0.0)) {
        Ok(s) => (outcome(s == (true, true), format!("sandwich {s:?}; {info}")), None),
        Err(e) => (outcome(false, format!("no multiplier pair on [0, 100]: {e}; {info}")), Some(e)),
    }
}

fn criterion_5() -> Outcome {
    let mut ev = PhiEvaluator::with_default_order(3).unwrap();
    ev.prepare(50.0);
    let mut worst: f64 = 0.0;
    for i in 1..=500 {
        let z = 0.1 * i as f64;
        let exact = 4.0 * std::f64::consts::PI * z.sinh() / z;
        worst = worst.max((ev.phi(1.0, z).unwrap() - exact).abs() / exact);
    }
    let q = 1.0 - 1.0 / strauss_exponent(3).unwrap();
    let rep = lemma41_refinement(
        KernelConfig::new(3, q, 0.5, 1.0),
        AuditGrids {
            t_max: 20.0,
            intervals: 20,
        },
    )
    .unwrap();
    let drift = rep
        .drift
        .iter()
        .map(|(p, d)| format!("{} {:.1e}", p.name(), d.unwrap_or(f64::NAN)))
        .collect::<Vec<_>>()
        .join(", ");
    let all = rep.drift.iter().all(|(_, d)| d.is_some());
    outcome(
        worst < 1e-10 && all && rep.failing.is_empty(),
        format!("phi rel error {worst:.1e}; constant drift {drift}"),
    )
}

fn free(n: u32, p: f64, profile: CoefficientProfile, data: InitialBump) -> SolverConfig {
    let mut c = SolverConfig::new(n, p, profile, data);
    c.mode = Mode::Free;
    c
}

fn mms_error(n: u32, h: f64) -> f64 {
    let profile = default_profile();
    let p = 2.0;
    let pr = profile.clone();
    let nf = n as f64;
    let exact = |t: f64, r: f64| {
        if r >= 2.0 {
            0.0
        } else {
            (-t).exp() * (1.0 - r * r / 4.0).powi(3)
        }
    };
    let src = move |t: f64, r: f64| {
        if r >= 2.0 {
            return 0.0;
        }
        let q = 1.0 - r * r / 4.0;
        let g = q * q * q;
        let lap = -1.5 * nf * q * q + 1.5 * r * r * q;
        let e = (-t).exp();
        e * (g - lap - pr.a(t) * g + pr.b(t) * g) - (e * g).powf(p)
    };
    let grid = RadialGrid::for_cone(n, h, 2.0, 1.0).unwrap();
    let params = SchemeParams {
        p,
        dt: h,
        nonlinear: true,
        laplacian: true,
        source: Some((Arc::new(src), 2.0)),
    };
    let u0 = grid.radii().iter().map(|&r| exact(0.0, r)).collect();
    let v0 = grid.radii().iter().map(|&r| -exact(0.0, r)).collect();
    let mut sim = Simulation::from_fields(grid.clone(), profile, params, u0, v0, 2.0).unwrap();
    while sim.t() < 1.0 - 1e-9 {
        sim.step();
    }
    (0..grid.len())
        .map(|i| grid.weights[i] * (sim.u()[i] - exact(sim.t(), grid.r(i))).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn criterion_6() -> Outcome {
    let data = InitialBump::new(1.0, 4, 1.0, 0.5, 1.0).unwrap();
    let mut c = free(3, 2.0, CoefficientProfile::zero(), data);
    c.nonlinear = false;
    c.h = 1.0 / 200.0;
    c.horizon = 10.0;
    c.track_energy = true;
    let drift = energy_drift(&run(&c).unwrap().trace.energy).unwrap();

    let mut orders = Vec::new();
    for n in [2, 3, 5] {
        let e: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|&h| mms_error(n, h)).collect();
        orders.push((e[0] / e[1]).log2());
        orders.push((e[1] / e[2]).log2());
    }
    let orders_ok = orders.iter().all(|o| (1.8..=2.2).contains(o));

    // Every successful run has passed the support audit; a violation is an error.
    let data = InitialBump::new(1.0, 4, 1.0, 1.0, 0.5).unwrap();
    let mut res = Vec::new();
    let mut audits = true;
    for h in [0.04, 0.02, 0.01] {
        let mut c = free(3, 2.0, default_profile(), data);
        c.h = h;
        c.horizon = 10.0;
        match run(&c) {
            Ok(r) => res.push(r.residual_g),
            Err(_) => audits = false,
        }
    }
    let ratios: Vec<f64> = res.windows(2).map(|w| w[0] / w[1]).collect();
    let ratio_ok = ratios.len() == 2 && ratios.iter().all(|&r| r >= 3.5);
    outcome(
        drift < 1e-4 && orders_ok && audits && ratio_ok,
        format!(
            "energy drift {drift:.1e}; MMS orders {}; support audits passed: {audits}; G residual ratios {}",
            fmt_list(&orders, 2),
            fmt_list(&ratios, 2)
        ),
    )
}

fn fmt_list(xs: &[f64], digits: usize) -> String {
    let v: Vec<String> = xs.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("[{}]", v.join(", "))
}

fn criterion_7() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for mu2 in [1.0, -1.0] {
        let cfg = SweepConfig {
            profile: (2.0, 2.0, mu2, 1.5),
            ..SweepConfig::default()
        };
        let start = Instant::now();
        let res = run_sweep(&cfg).and_then(|t| {
            t.verify()?;
            t.fit(cfg.fit_tol).map(|f| (t, f))
        });
        match res {
            Ok((t, f)) => {
                pass &= f.pass;
                let ts: Vec<f64> = t.rows.iter().map(|r| r.t_est.unwrap_or(f64::NAN)).collect();
                parts.push(format!(
                    "mu2 = {mu2:+}: slope {:.3} (rel err {:.3}), T {} in {:.0} s",
                    f.slope,
                    f.rel_err,
                    fmt_list(&ts, 1),
                    start.elapsed().as_secs_f64()
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("mu2 = {mu2:+}: {e}"));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let mut cs = Vec::new();
    for eps in [0.25, 0.5, 1.0] {
        let data = InitialBump::new(1.0, 4, 1.0, 1.0, eps).unwrap();
        let mut c = free(3, 2.0, default_profile(), data);
        c.h = 0.05;
        c.horizon = 50.0;
        let r = run(&c).unwrap();
        let t_max = r.t_est.map_or(c.horizon, |t| 0.5 * t);
        match lower_bound_constant(&r.trace, eps, 3, 2.0, t_max) {
            Some((v, _)) => cs.push(v),
            None => return outcome(false, format!("no positive lower bound at eps = {eps}")),
        }
    }
    let lo = cs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = cs.iter().cloned().fold(0.0, f64::max);
    let drift = (hi - lo) / lo;
    outcome(
        lo > 0.0 && drift < 0.2,
        format!("c = {} drift {:.1}%", fmt_list(&cs, 5), 100.0 * drift),
    )
}

fn criterion_9() -> Outcome {
    let p = strauss_exponent(3).unwrap();
    let c_frame = 2.0;
    let seq = crit_sequences(p, c_frame, slicing_n(c_frame, 30.0, p), 30).unwrap();
    let gap = seq.closed_form_gap();
    let printed = seq.printed_form_gap();
    let a = gap < 1e-10;

    let rows = run_envelope_sweep(&EnvelopeSweepConfig::new(p)).unwrap();
    let fit = fit_envelope_rows(&rows, p);
    let (b, r2) = match &fit {
        Ok(f) => (f.pass, f.r_squared),
        Err(_) => (false, f64::NAN),
    };

    let q = 1.0 - 1.0 / p;
    let data = InitialBump::new(1.0, 4, 1.0, 1.0, 0.5).unwrap();
    let mut c = free(3, p, default_profile(), data);
    c.h = 0.05;
    c.horizon = 20.0;
    c.weighted = Some(WeightedConfig {
        lambda0: 0.5,
        frame: Some(KernelConfig::new(3, q, 0.5, 1.0)),
        frame_until: 20.0,
        every: 1,
    });
    let r = run(&c).unwrap();
    let fc = frame_constant(&r.trace.t, &r.trace.ftilde, p, 1.5, 20.0);
    let cc = fc.map_or(false, |v| v > 0.0 && v.is_finite());
    outcome(
        a && b && cc,
        format!(
            "(a) closed-form gap {gap:.1e} (printed grouping gap {printed:.1e}, informational); \
             (b) R^2 = {r2:.5}; (c) frame constant {}",
            fc.map_or("none".into(), |v| format!("{v:.3}"))
        ),
    )
}

fn criterion_10() -> Outcome {
    let (n, p, c_r1r2, c2) = (3, 2.0, 0.5, 1.0);
    let mut ts = Vec::new();
    for k in 0..5 {
        let eps = 0.4 / 2f64.powi(k);
        let t_max = 100.0 / (c_r1r2 * eps * eps);
        let t: Vec<f64> = (0..4001).map(|i| t_max * i as f64 / 4000.0).collect();
        let seed = subcrit_seed(&t, c2, eps, n, p);
        let env = volterra_envelope_subcrit(&t, &seed, c_r1r2, p, n, 1.0, 200).unwrap();
        match env.divergence_time {
            Some(d) => ts.push(d),
            None => return outcome(false, format!("no divergence at eps = {eps}")),
        }
    }
    let target = 2f64.powf(2.0 * p * (p - 1.0) / gamma(ProblemIndex::new(n, p).unwrap()));
    let ratios: Vec<f64> = ts.windows(2).map(|w| w[1] / w[0]).collect();
    let ok = ratios.iter().all(|r| ((r - target) / target).abs() <= 0.2);
    outcome(ok, format!("T {} ratios {} vs {target}", fmt_list(&ts, 1), fmt_list(&ratios, 3)))
}

fn main() {
    let (c4, e4) = criterion_4();
    let results = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, c4),
        (5, criterion_5()),
        (6, criterion_6()),
        (7, criterion_7()),
        (8, criterion_8()),
        (9, criterion_9()),
        (10, criterion_10()),
    ];
    for (id, o) in &results {
        println!("criterion {id:>2}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    for (id, o) in &results {
        if *id == 4 {
            continue;
        }
        assert!(o.pass, "criterion {id} failed: {}", o.detail);
    }
    // Known obstruction: no multiplier pair from t = 0 for the default profile.
    assert!(
        matches!(e4, Some(Error::NonOscillationFailure { .. })),
        "criterion 4: expected the multiplier obstruction, got {e4:?}"
    );
}
