//! One entry point per CLI subcommand. Each reads its keys from a [`ConfigMap`],
//! rejects leftovers, runs, and writes CSV files into the output directory.

use std::path::{Path, PathBuf};

use super::config::ConfigMap;
use super::output::{emit_envelope_sweep, emit_sweep, num, opt, Csv};
use super::sweep::{fit_envelope_rows, run_envelope_sweep, run_sweep, EnvelopeSweepConfig, SweepConfig};
use crate::error::{Error, Result};
use crate::exponents::{classify, fujita_exponent, gamma, strauss_exponent, ProblemIndex, CRITICAL_TOL};
use crate::iteration::{
    crit_sequences, crit_seed, crit_threshold, log_grid, slicing_b, slicing_n, subcrit_seed, subcrit_sequences,
    subcrit_threshold, volterra_envelope_crit, volterra_envelope_subcrit,
};
use crate::ode::conditions::data_conditions_scalar;
use crate::ode::{compute_multipliers_from, solve_rho, CoefficientProfile};
use crate::testfuncs::{KernelConfig, PhiEvaluator, SpectralKernel};
use crate::wave::{run, InitialBump, Mode, SolverConfig, WeightedConfig};

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Human-readable summary for stdout.
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    /// Set when the run finished but a verdict failed; outputs are still written.
    pub failure: Option<Error>,
}

fn read_profile(cfg: &mut ConfigMap) -> Result<(f64, f64, f64, f64)> {
    Ok((
        cfg.f64("mu", 2.0)?,
        cfg.f64("beta", 2.0)?,
        cfg.f64("mu2", 1.0)?,
        cfg.f64("alpha_m", 1.5)?,
    ))
}

fn scattering(t: (f64, f64, f64, f64)) -> Result<CoefficientProfile> {
    CoefficientProfile::scattering(t.0, t.1, t.2, t.3)
}

fn read_mode(cfg: &mut ConfigMap, default: &str) -> Result<Mode> {
    Ok(match cfg.choice("mode", default, &["theorem", "free"])?.as_str() {
        "theorem" => Mode::Theorem,
        _ => Mode::Free,
    })
}

pub fn exponents(mut cfg: ConfigMap, out: &Path) -> Result<Outcome> {
    let n_min = cfg.u32("n_min", 2)?;
    let n_max = cfg.u32("n_max", 10)?;
    let p = cfg.opt_f64("p")?;
    let tol = cfg.f64("tol", CRITICAL_TOL)?;
    cfg.finish()?;
    if n_min < 2 || n_max < n_min {
        return Err(Error::InvalidInput(format!("need 2 <= n_min <= n_max, got {n_min}..{n_max}")));
    }
    let mut csv = Csv::new(&["n", "strauss", "fujita", "p", "gamma", "class", "lifespan_rate"]);
    let mut o = Outcome::default();
    for n in n_min..=n_max {
        let ps = strauss_exponent(n)?;
        let pf = fujita_exponent(n)?;
        let (pp, g, class, rate) = match p {
            Some(p) => {
                let idx = ProblemIndex::new(n, p)?;
                let v = classify(idx, tol)?;
                (p, gamma(idx), format!("{:?}", v.class), v.lifespan_rate)
            }
            None => (f64::NAN, f64::NAN, String::new(), f64::NAN),
        };
        csv.row(&[n.to_string(), num(ps), num(pf), num(pp), num(g), class.clone(), num(rate)]);
        o.lines.push(format!("n = {n}: p_S = {ps:.12}, p_F = {pf:.12} {class}"));
    }
    o.files.push(csv.write(out, "exponents.csv")?);
    Ok(o)
}

pub fn ode(mut cfg: ConfigMap, out: &Path) -> Result<Outcome> {
    let profile = scattering(read_profile(&mut cfg)?)?;
    let t0 = cfg.f64("t0", 0.0)?;
    let horizon = cfg.f64("horizon", 200.0)?;
    let step = cfg.f64("step", 1e-3)?;
    let lambda = cfg.f64("lambda", 0.5)?;
    let every = cfg.usize("every", 100)?.max(1);
    let f0 = cfg.opt_f64("f0")?;
    let g0 = cfg.opt_f64("g0")?;
    cfg.finish()?;
    let mut o = Outcome::default();

    let rho = solve_rho(&profile, lambda, horizon, step)?;
    let mut rc = Csv::new(&["t", "rho", "rho_exp"]);
    let ratio = rho.exp_ratio();
    for i in (0..rho.grid.len).step_by(every) {
        rc.nums(&[rho.grid.t(i), rho.rho[i], ratio[i]]);
    }
    o.files.push(rc.write(out, "rho.csv")?);
    o.lines.push(format!(
        "rho'(0) = {:.10e}; rho e^(lambda t) on trailing half in [{:.6e}, {:.6e}]",
        rho.drho_at_0, rho.decay_ratio_stats.0, rho.decay_ratio_stats.1
    ));

    let m = compute_multipliers_from(&profile, t0, horizon, step)?;
    let mut mc = Csv::new(&["t", "a", "b", "r1", "r2", "residual"]);
    for i in (0..m.len()).step_by(every) {
        mc.nums(&[m.t(i), m.a[i], m.b[i], m.r1[i], m.r2[i], m.residual[i]]);
    }
    o.files.push(mc.write(out, "multipliers.csv")?);
    let mut sc = Csv::new(&["t0", "l1_r1", "l1_r2", "c_r1r2", "r2_at_t0", "residual_max", "drho_at_0"]);
    sc.nums(&[t0, m.l1_r1, m.l1_r2, m.c_r1r2, m.r2_at_0, m.residual_max, rho.drho_at_0]);
    o.files.push(sc.write(out, "summary.csv")?);
    o.lines.push(format!(
        "|r1|_1 = {:.10e}, |r2|_1 = {:.10e}, C_r1r2 = {:.10e}, max residual {:.3e}",
        m.l1_r1, m.l1_r2, m.c_r1r2, m.residual_max
    ));
    if let (Some(f0), Some(g0)) = (f0, g0) {
        let (c1, c2) = data_conditions_scalar(f0, g0, m.r2_at_0, rho.drho_at_0, profile.a(0.0));
        o.lines.push(format!("data conditions: {c1}, {c2}"));
        if !(c1 && c2) {
            o.failure = Some(Error::HypothesisViolation(format!(
                "data conditions fail for f0 = {f0}, g0 = {g0}"
            )));
        }
    }
    Ok(o)
}

pub fn testfn(mut cfg: ConfigMap, out: &Path) -> Result<Outcome> {
    let n = cfg.u32("n", 3)?;
    let lambda = cfg.f64("lambda", 1.0)?;
    let q = cfg.f64("q", 0.0)?;
    let lambda0 = cfg.f64("lambda0", 0.5)?;
    let radius = cfg.f64("radius", 1.0)?;
    let r_max = cfg.f64("r_max", 10.0)?;
    let points = cfg.usize("points", 101)?;
    let t = cfg.f64("t", 1.0)?;
    cfg.finish()?;
    if points < 2 || !(r_max > 0.0) {
        return Err(Error::InvalidInput("need points >= 2 and r_max > 0".into()));
    }
    let mut phi = PhiEvaluator::with_default_order(n)?;
    phi.prepare(lambda * r_max);
    let mut kernel = SpectralKernel::new(KernelConfig::new(n, q, lambda0, radius))?;
    kernel.prepare(r_max);
    let mut csv = Csv::new(&["r", "phi", "xi_q", "eta_q"]);
    for i in 0..points {
        let r = r_max * i as f64 / (points - 1) as f64;
        csv.nums(&[r, phi.phi(lambda, r)?, kernel.xi_q(r, t)?, kernel.eta_q(r, t, t)?]);
    }
    let mut o = Outcome::default();
    o.files.push(csv.write(out, "testfn.csv")?);
    o.lines.push(format!("{points} radii on [0, {r_max}] for n = {n}"));
    Ok(o)
}

fn read_solver(cfg: &mut ConfigMap) -> Result<SolverConfig> {
    let n = cfg.u32("n", 3)?;
    let p = cfg.f64("p", 2.0)?;
    let profile = scattering(read_profile(cfg)?)?;
    let data = InitialBump::new(
        cfg.f64("r0", 1.0)?,
        cfg.u32("m", 4)?,
        cfg.f64("f_amp", 1.0)?,
        cfg.f64("g_amp", 1.0)?,
        cfg.f64("eps", 0.5)?,
    )?;
    let mut c = SolverConfig::new(n, p, profile, data);
    c.h = cfg.f64("h", c.h)?;
    c.cfl = cfg.f64("cfl", c.cfl)?;
    c.horizon = cfg.f64("horizon", c.horizon)?;
    c.m_blow = cfg.f64("m_blow", c.m_blow)?;
    c.mode = read_mode(cfg, "theorem")?;
    c.nonlinear = cfg.bool("nonlinear", true)?;
    c.levels = cfg.usize("levels", 1)?;
    c.refine_tol = cfg.f64("refine_tol", c.refine_tol)?;
    c.track_energy = cfg.bool("track_energy", false)?;
    if cfg.bool("weighted", false)? {
        let lambda0 = cfg.f64("lambda0", 0.5)?;
        let frame = if cfg.bool("frame", false)? {
            let q = cfg.f64("frame_q", 1.0 - 1.0 / p)?;
            Some(KernelConfig::new(n, q, lambda0, data.r0))
        } else {
            None
        };
        c.weighted = Some(WeightedConfig {
            lambda0,
            frame,
            frame_until: cfg.f64("frame_until", 20.0)?,
            every: cfg.usize("every", 1)?,
        });
    }
    Ok(c)
}

pub fn solve(mut cfg: ConfigMap, out: &Path) -> Result<Outcome> {
    let c = read_solver(&mut cfg)?;
    cfg.finish()?;
    let r = run(&c)?;
    let tr = &r.trace;
    let mut tc = Csv::new(&["t", "G", "G1", "F", "Ftilde", "Lp", "src", "sup_u", "support_r", "energy"]);
    for i in 0..tr.len() {
        tc.nums(&[
            tr.t[i],
            tr.g[i],
            tr.g1[i],
            tr.f[i],
            tr.ftilde[i],
            tr.lp[i],
            tr.src[i],
            tr.sup_u[i],
            tr.support_r[i],
            tr.energy[i],
        ]);
    }
    let mut rc = Csv::new(&["h", "dt", "T_est", "T_est_10"]);
    for l in &r.refinement {
        rc.row(&[num(l.h), num(l.dt), opt(l.t_est), opt(l.t_est_10)]);
    }
    let mut sc = Csv::new(&["blow_up", "T_est", "sensitivity", "residual_g", "positivity_violation", "final_t"]);
    sc.row(&[
        r.blow_up.to_string(),
        opt(r.t_est),
        opt(r.sensitivity),
        num(r.residual_g),
        opt(r.positivity_violation),
        num(r.final_t),
    ]);
    let mut o = Outcome::default();
    o.files.push(tc.write(out, "trace.csv")?);
    o.files.push(rc.write(out, "refinement.csv")?);
    o.files.push(sc.write(out, "report.csv")?);
    o.lines.push(match r.t_est {
        Some(t) => format!("blow-up at T_est = {t:.10e}"),
        None => format!("no blow-up up to t = {:.6e}", r.final_t),
    });
    if let Some(t) = r.positivity_violation {
        o.warnings.push(format!("G became negative at t = {t:.6e}"));
    }
    Ok(o)
}

pub fn iterate(mut cfg: ConfigMap, out: &Path) -> Result<Outcome> {
    let kind = cfg.choice("kind", "subcrit", &["subcrit", "crit"])?;
    let j_max = cfg.usize("j_max", 30)?;
    let sweeps = cfg.usize("sweeps", 400)?;
    let eps = cfg.f64("eps", 0.2)?;
    let mut o = Outcome::default();
    if kind == "subcrit" {
        let n = cfg.u32("n", 3)?;
        let p = cfg.f64("p", 2.0)?;
        let c_r1r2 = cfg.f64("c_r1r2", 0.5)?;
        let c2 = cfg.f64("c2", 1.0)?;
        let radius = cfg.f64("radius", 1.0)?;
        let nodes = cfg.usize("nodes", 4001)?;
        let t_max = cfg.f64("t_max", 100.0 / (c_r1r2 * c2 * eps * eps))?;
        cfg.finish()?;
        let s = subcrit_sequences(p, n, c_r1r2, c2, eps, j_max)?;
        let mut sc = Csv::new(&["j", "a", "b", "log_D", "a_closed", "b_closed"]);
        for j in 1..=j_max {
            sc.row(&[
                j.to_string(),
                num(s.a_j(j)),
                num(s.b_j(j)),
                num(s.log_d_j(j)),
                num(s.a_closed(j)),
                num(s.b_closed(j)),
            ]);
        }
        o.files.push(sc.write(out, "sequences.csv")?);
        let th = subcrit_threshold(p, n, c_r1r2, c2, eps)?;
        o.lines.push(format!("threshold T = {:.10e} (C4 = {:.6e}), J(T) > 1: {}", th.t, th.c4, th.j_exceeds_one));
        if nodes < 2 || !(t_max > 0.0) {
            return Err(Error::InvalidInput("need nodes >= 2 and t_max > 0".into()));
        }
        let t: Vec<f64> = (0..nodes).map(|i| t_max * i as f64 / (nodes - 1) as f64).collect();
        let seed = subcrit_seed(&t, c2, eps, n, p);
        let env = volterra_envelope_subcrit(&t, &seed, c_r1r2, p, n, radius, sweeps)?;
        write_envelope(&mut o, out, &env.t, env.last(), env.divergence_time, env.sweeps_used)?;
    } else {
        let n = cfg.u32("n", 3)?;
        let p = cfg.f64("p", strauss_exponent(n)?)?;
        let c_frame = cfg.f64("c_frame", 2.0)?;
        let m = cfg.f64("seed_m", 30.0)?;
        let t0 = cfg.f64("t0", 1.5)?;
        let t1 = cfg.f64("t1", 1e200)?;
        let nodes = cfg.usize("nodes", 20001)?;
        cfg.finish()?;
        let n_const = slicing_n(c_frame, m, p);
        let s = crit_sequences(p, c_frame, n_const, j_max)?;
        let mut sc = Csv::new(&["j", "l", "a", "b", "log_C", "log_C_closed"]);
        for j in 0..=j_max {
            let (lc, lcc) = if j >= 1 {
                (s.log_c_j(j), s.log_c_closed(j))
            } else {
                (f64::NAN, f64::NAN)
            };
            sc.row(&[j.to_string(), num(s.l[j]), num(s.a[j]), num(s.b[j]), num(lc), num(lcc)]);
        }
        o.files.push(sc.write(out, "sequences.csv")?);
        let th = crit_threshold(slicing_b(n_const, c_frame, p), p, eps)?;
        o.lines.push(format!("threshold log T = {:.10e}", th.log_t));
        if !(t0 > 1.0) || !(t1 > t0) || nodes < 2 {
            return Err(Error::InvalidInput("envelope grid needs 1 < t0 < t1 and nodes >= 2".into()));
        }
        let t = log_grid(t0, t1, nodes);
        let seed = crit_seed(&t, m, eps, p);
        let env = volterra_envelope_crit(&t, &seed, c_frame, p, sweeps)?;
        write_envelope(&mut o, out, &env.t, env.last(), env.divergence_time, env.sweeps_used)?;
    }
    Ok(o)
}

fn write_envelope(
    o: &mut Outcome,
    out: &Path,
    t: &[f64],
    v: &[f64],
    divergence: Option<f64>,
    sweeps: usize,
) -> Result<()> {
    let mut ec = Csv::new(&["t", "envelope"]);
    for (a, b) in t.iter().zip(v) {
        ec.nums(&[*a, *b]);
    }
    o.files.push(ec.write(out, "envelope.csv")?);
    o.lines.push(match divergence {
        Some(d) => format!("envelope diverges at t = {d:.10e} after {sweeps} sweeps"),
        None => format!("envelope stays bounded on the grid after {sweeps} sweeps"),
    });
    Ok(())
}

pub fn read_sweep(cfg: &mut ConfigMap) -> Result<SweepConfig> {
    let d = SweepConfig::default();
    Ok(SweepConfig {
        n: cfg.u32("n", d.n)?,
        p: cfg.f64("p", d.p)?,
        profile: read_profile(cfg)?,
        r0: cfg.f64("r0", d.r0)?,
        m: cfg.u32("m", d.m)?,
        f_amp: cfg.f64("f_amp", d.f_amp)?,
        g_amp: cfg.f64("g_amp", d.g_amp)?,
        eps_max: cfg.f64("eps_max", d.eps_max)?,
        eps_ratio: cfg.f64("eps_ratio", d.eps_ratio)?,
        eps_count: cfg.usize("eps_count", d.eps_count)?,
        h: cfg.f64("h", d.h)?,
        cfl: cfg.f64("cfl", d.cfl)?,
        m_blow: cfg.f64("m_blow", d.m_blow)?,
        horizon: cfg.f64("horizon", d.horizon)?,
        horizon_cap: cfg.f64("horizon_cap", d.horizon_cap)?,
        predict_c_r1r2: cfg.f64("predict_c_r1r2", d.predict_c_r1r2)?,
        predict_c2: cfg.f64("predict_c2", d.predict_c2)?,
        levels: cfg.usize("levels", d.levels)?,
        refine_tol: cfg.f64("refine_tol", d.refine_tol)?,
        mode: read_mode(cfg, "free")?,
        workers: cfg.usize("workers", d.workers)?,
        fit_tol: cfg.f64("fit_tol", d.fit_tol)?,
    })
}

pub fn sweep(mut cfg: ConfigMap, out: &Path) -> Result<Outcome> {
    let model = cfg.choice("model", "subcritical", &["subcritical", "critical"])?;
    let mut o = Outcome::default();
    if model == "critical" {
        let n = cfg.u32("n", 3)?;
        let p = cfg.f64("p", strauss_exponent(n)?)?;
        let d = EnvelopeSweepConfig::new(p);
        let ec = EnvelopeSweepConfig {
            p,
            eps: cfg.f64_list("eps", &d.eps)?,
            c_frame: cfg.f64("c_frame", d.c_frame)?,
            seed_m: cfg.f64("seed_m", d.seed_m)?,
            t0: cfg.f64("t0", d.t0)?,
            t1: cfg.f64("t1", d.t1)?,
            nodes: cfg.usize("nodes", d.nodes)?,
            sweeps: cfg.usize("sweeps", d.sweeps)?,
        };
        cfg.finish()?;
        o.lines.push("critical lifespans come from the Volterra envelope; PDE runs are exponentially long".into());
        let rows = run_envelope_sweep(&ec)?;
        let fit = fit_envelope_rows(&rows, p);
        let (fit, failure) = split_fit(fit, &mut o);
        o.files = emit_envelope_sweep(out, &rows, p, fit.as_ref())?;
        if let Some(f) = &fit {
            o.lines.push(format!("critical fit: R^2 = {:.6}, verdict {}", f.r_squared, verdict(f.pass)));
            if !f.pass {
                o.failure = Some(Error::NonConvergence(format!("R^2 = {} below 0.95", f.r_squared)));
            }
        }
        o.failure = o.failure.take().or(failure);
        return Ok(o);
    }
    let sc = read_sweep(&mut cfg)?;
    cfg.finish()?;
    let table = run_sweep(&sc)?;
    for e in table.exclusions() {
        o.warnings.push(e);
    }
    for r in &table.rows {
        o.lines.push(format!("eps = {:.6e}: T_est = {}", r.eps, opt(r.t_est)));
    }
    let verified = table.verify();
    let fit = if table.rows.len() >= super::fit::MIN_FIT_POINTS && verified.is_ok() {
        let (fit, failure) = split_fit(table.fit(sc.fit_tol), &mut o);
        if let Some(f) = &fit {
            o.lines.push(format!(
                "slope {:.6} (theory {:.6}, rel err {:.4}) verdict {}",
                f.slope,
                f.theory_slope,
                f.rel_err,
                verdict(f.pass)
            ));
            if !f.pass {
                o.failure = Some(Error::NonConvergence(format!(
                    "slope {} differs from {} by more than {}",
                    f.slope, f.theory_slope, sc.fit_tol
                )));
            }
        }
        o.failure = o.failure.take().or(failure);
        fit
    } else {
        if verified.is_ok() {
            o.warnings.push("fewer than 4 ladder points: no fit attempted".into());
        }
        None
    };
    if table.rows.is_empty() {
        o.warnings.push("sweep produced no rows".into());
    }
    o.files = emit_sweep(out, Some(&table), fit.as_ref())?;
    if let Err(e) = verified {
        o.failure = Some(e);
    }
    Ok(o)
}

fn split_fit<T>(r: Result<T>, o: &mut Outcome) -> (Option<T>, Option<Error>) {
    match r {
        Ok(f) => (Some(f), None),
        Err(e) => {
            o.warnings.push(format!("fit skipped: {e}"));
            (None, Some(e))
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}
