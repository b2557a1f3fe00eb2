use super::blowup::{combine_levels, detect_blowup, REFINE_TOL};
use super::data::InitialBump;
use super::functionals::{functional_weighted, residual_g_identity, FrameWeight, PhiWeight, Weight};
use super::grid::RadialGrid;
use super::scheme::{SchemeParams, Simulation, SourceFn};
use crate::error::{Error, Result};
use crate::exponents::{classify, Criticality, ProblemIndex, CRITICAL_TOL};
use crate::ode::{check_data_conditions, compute_multipliers, solve_rho, CoefficientProfile, RhoData};
use crate::testfuncs::{KernelConfig, SpectralKernel};

/// Horizon of the multiplier solve behind theorem-mode data checks.
pub const CONDITION_HORIZON: f64 = 200.0;
const ODE_STEP: f64 = 1e-3;
const RHO_HORIZON_MAX: f64 = 400.0;
const POSITIVITY_NOISE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Enforces the data and coefficient hypotheses before running.
    Theorem,
    /// Runs anything.
    Free,
}

/// Forcing term added to the right-hand side, nonzero only for r <= radius.
#[derive(Clone)]
pub struct Source {
    pub f: SourceFn,
    pub radius: f64,
}

/// Optional tracking of F, G1 and F~.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedConfig {
    pub lambda0: f64,
    /// Kernel for F~; its lambda0 and radius are used as given.
    pub frame: Option<KernelConfig>,
    /// F~ is evaluated only for t <= frame_until.
    pub frame_until: f64,
    /// Sampling stride in steps.
    pub every: usize,
}

#[derive(Clone)]
pub struct SolverConfig {
    pub n: u32,
    pub p: f64,
    pub profile: CoefficientProfile,
    pub data: InitialBump,
    pub h: f64,
    pub cfl: f64,
    pub horizon: f64,
    pub m_blow: f64,
    pub mode: Mode,
    pub nonlinear: bool,
    pub laplacian: bool,
    /// Number of spacings h, h/2, ... to run.
    pub levels: usize,
    pub refine_tol: f64,
    pub weighted: Option<WeightedConfig>,
    pub track_energy: bool,
    pub source: Option<Source>,
}

impl SolverConfig {
    pub fn new(n: u32, p: f64, profile: CoefficientProfile, data: InitialBump) -> Self {
        Self {
            n,
            p,
            profile,
            data,
            h: 0.05,
            cfl: 1.0,
            horizon: 50.0,
            m_blow: 1e6,
            mode: Mode::Theorem,
            nonlinear: true,
            laplacian: true,
            levels: 1,
            refine_tol: REFINE_TOL,
            weighted: None,
            track_energy: false,
            source: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ProblemIndex::new(self.n, self.p)?;
        self.profile.validate()?;
        self.data.validate()?;
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidInput(format!("cfl = {} must lie in (0, 1]", self.cfl)));
        }
        if !(self.h > 0.0) || !(self.horizon > 0.0) || !(self.m_blow > 0.0) {
            return Err(Error::InvalidInput("h, horizon and M_blow must be > 0".into()));
        }
        if self.levels == 0 {
            return Err(Error::InvalidInput("at least one refinement level is required".into()));
        }
        if let Some(w) = &self.weighted {
            if !(w.lambda0 > 0.0) || w.every == 0 {
                return Err(Error::InvalidInput("weighted tracking needs lambda0 > 0, every >= 1".into()));
            }
        }
        Ok(())
    }
}

/// Sampled time series. Weighted functionals and energy are NaN between samples.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub t: Vec<f64>,
    pub g: Vec<f64>,
    pub g1: Vec<f64>,
    pub f: Vec<f64>,
    pub ftilde: Vec<f64>,
    pub lp: Vec<f64>,
    pub src: Vec<f64>,
    pub sup_u: Vec<f64>,
    pub support_r: Vec<f64>,
    pub energy: Vec<f64>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementLevel {
    pub h: f64,
    pub dt: f64,
    pub t_est: Option<f64>,
    pub t_est_10: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Trace of the finest level.
    pub trace: Trace,
    pub blow_up: bool,
    pub t_est: Option<f64>,
    /// |T(M_blow) - T(10 M_blow)| on the finest level.
    pub sensitivity: Option<f64>,
    pub refinement: Vec<RefinementLevel>,
    /// Max G-identity residual before sup|u| reaches M_blow, finest level.
    pub residual_g: f64,
    /// First time G dropped below zero beyond quadrature noise.
    pub positivity_violation: Option<f64>,
    pub final_t: f64,
}

/// Rejects configurations outside the hypotheses of the blow-up theorems.
pub fn check_theorem_hypotheses(config: &SolverConfig) -> Result<()> {
    let idx = ProblemIndex::new(config.n, config.p)?;
    let verdict = classify(idx, CRITICAL_TOL)?;
    if verdict.class == Criticality::SuperCritical {
        return Err(Error::HypothesisViolation(format!(
            "p = {} is above the Strauss exponent for n = {}",
            config.p, config.n
        )));
    }
    let prof = &config.profile;
    if verdict.class == Criticality::Critical {
        let bad = (0..=10_000).map(|i| i as f64 * config.horizon / 10_000.0).find(|&t| prof.a(t) < 0.0 || prof.b(t) < 0.0);
        if let Some(t) = bad {
            return Err(Error::HypothesisViolation(format!(
                "critical case needs a, b >= 0, violated at t = {t}"
            )));
        }
    }
    let m = compute_multipliers(prof, CONDITION_HORIZON, ODE_STEP)
        .map_err(|e| Error::HypothesisViolation(format!("multiplier pair unavailable: {e}")))?;
    let lambda0 = config.weighted.as_ref().map_or(0.5, |w| w.lambda0);
    let rho = solve_rho(prof, lambda0, CONDITION_HORIZON, ODE_STEP)
        .map_err(|e| Error::HypothesisViolation(format!("rho unavailable: {e}")))?;
    let (ini, ini2) = check_data_conditions(config.data.f_amp, config.data.g_amp, &m, &rho, prof.a(0.0));
    if !ini || !ini2 {
        return Err(Error::HypothesisViolation(format!(
            "data conditions fail: g + r2(0) f >= 0 is {ini}, g + (a(0) - rho'(0)) f >= 0 is {ini2}"
        )));
    }
    Ok(())
}

struct LevelRun {
    trace: Trace,
    level: RefinementLevel,
    residual_g: f64,
    positivity_violation: Option<f64>,
    final_t: f64,
}

fn source_radius(config: &SolverConfig) -> f64 {
    config.source.as_ref().map_or(config.data.r0, |s| s.radius.max(config.data.r0))
}

fn run_level(config: &SolverConfig, h: f64) -> Result<LevelRun> {
    let support = source_radius(config);
    let grid = RadialGrid::for_cone(config.n, h, support, config.horizon)?;
    let dt = config.cfl * h;
    let params = SchemeParams {
        p: config.p,
        dt,
        nonlinear: config.nonlinear,
        laplacian: config.laplacian,
        source: config.source.as_ref().map(|s| (s.f.clone(), s.radius)),
    };
    let mut sim = Simulation::new(grid.clone(), config.profile.clone(), params, &config.data)?;

    let phi = match &config.weighted {
        Some(w) => Some(PhiWeight::new(&grid, w.lambda0)?),
        None => None,
    };
    let rho: Option<RhoData> = config.weighted.as_ref().and_then(|w| {
        let horizon = config.horizon.clamp(10.0, RHO_HORIZON_MAX);
        solve_rho(&config.profile, w.lambda0, horizon, ODE_STEP).ok()
    });
    let frame = match config.weighted.as_ref().and_then(|w| w.frame.map(|k| (k, w.frame_until))) {
        Some((k, until)) => {
            let last = ((support + until.min(config.horizon)) / h).ceil() as usize + 2;
            Some((FrameWeight::new(&grid, SpectralKernel::new(k)?, last), until))
        }
        None => None,
    };
    let every = config.weighted.as_ref().map_or(usize::MAX, |w| w.every);

    let mut tr = Trace::default();
    let mut positivity = None;
    let slack = 2.0 * h + 1e-9;
    loop {
        let steps = sim.steps();
        let t = sim.t();
        let done = t >= config.horizon - 1e-9 * dt;
        let (mut f, mut g1, mut ft, mut e) = (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
        if steps % every == 0 {
            let upto = sim.active() + 1;
            if let Some(phi) = &phi {
                f = functional_weighted(&grid, sim.u(), upto, t, &Weight::Phi(phi));
                if let Some(rho) = &rho {
                    g1 = rho.rho_at(t) * f;
                }
            }
            if let Some((fw, until)) = &frame {
                if t <= *until + 1e-9 * dt {
                    ft = functional_weighted(&grid, sim.u(), upto, t, &Weight::EtaDiag(fw));
                }
            }
        }
        if config.track_energy && steps > 0 {
            e = sim.staggered_energy();
        }
        let st = if done { sim.stats() } else { sim.step() };
        tr.t.push(st.t);
        tr.g.push(st.g);
        tr.g1.push(g1);
        tr.f.push(f);
        tr.ftilde.push(ft);
        tr.lp.push(st.lp);
        tr.src.push(st.src);
        tr.sup_u.push(st.sup);
        tr.support_r.push(st.support_r);
        tr.energy.push(e);
        if config.laplacian && st.support_r > st.t + support + slack {
            return Err(Error::SupportViolation {
                t: st.t,
                radius: st.support_r,
                limit: st.t + support + slack,
            });
        }
        if positivity.is_none() && st.g < -POSITIVITY_NOISE * st.g.abs().max(1.0) {
            positivity = Some(st.t);
        }
        if done || !st.sup.is_finite() || !st.g.is_finite() || st.sup >= 10.0 * config.m_blow {
            break;
        }
    }
    let est = detect_blowup(&tr.t, &tr.sup_u, config.m_blow);
    let limit = tr
        .sup_u
        .iter()
        .position(|s| !(*s < config.m_blow))
        .unwrap_or(tr.len());
    let forcing: Vec<f64> = (0..tr.len())
        .map(|k| if config.nonlinear { tr.lp[k] } else { 0.0 } + tr.src[k])
        .collect();
    let residual_g = residual_g_identity(&tr.t, &tr.g, &forcing, &config.profile, limit);
    let final_t = *tr.t.last().unwrap_or(&0.0);
    Ok(LevelRun {
        level: RefinementLevel {
            h,
            dt,
            t_est: est.map(|e| e.t_m),
            t_est_10: est.map(|e| e.t_10m),
        },
        trace: tr,
        residual_g,
        positivity_violation: positivity,
        final_t,
    })
}

/// Integrates at spacings h, h/2, ... and combines the blow-up times.
pub fn run(config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    if config.mode == Mode::Theorem {
        check_theorem_hypotheses(config)?;
    }
    let mut refinement = Vec::with_capacity(config.levels);
    let mut last = None;
    for k in 0..config.levels {
        let h = config.h / (1u64 << k) as f64;
        let lr = run_level(config, h)?;
        refinement.push(lr.level);
        last = Some(lr);
    }
    let last = last.expect("levels >= 1");
    let blown: Vec<f64> = refinement.iter().filter_map(|l| l.t_est).collect();
    let (blow_up, t_est) = if blown.is_empty() {
        (false, None)
    } else if blown.len() < refinement.len() {
        return Err(Error::NonConvergence(format!(
            "only {} of {} refinement levels reached M_blow before the horizon",
            blown.len(),
            refinement.len()
        )));
    } else {
        (true, Some(combine_levels(&blown, config.refine_tol)?))
    };
    let sensitivity = last
        .level
        .t_est
        .zip(last.level.t_est_10)
        .map(|(a, b)| (b - a).abs());
    Ok(SolveReport {
        trace: last.trace,
        blow_up,
        t_est,
        sensitivity,
        refinement,
        residual_g: last.residual_g,
        positivity_violation: last.positivity_violation,
        final_t: last.final_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::checks::energy_drift;
    use std::sync::Arc;

    fn default_profile() -> CoefficientProfile {
        CoefficientProfile::scattering(2.0, 2.0, 1.0, 1.5).unwrap()
    }

    fn free(n: u32, p: f64, profile: CoefficientProfile, data: InitialBump) -> SolverConfig {
        let mut c = SolverConfig::new(n, p, profile, data);
        c.mode = Mode::Free;
        c
    }

    #[test]
    fn linear_energy_is_conserved() {
        let data = InitialBump::new(1.0, 4, 1.0, 0.5, 1.0).unwrap();
        let mut c = free(3, 2.0, CoefficientProfile::zero(), data);
        c.nonlinear = false;
        c.h = 1.0 / 200.0;
        c.horizon = 10.0;
        c.track_energy = true;
        let r = run(&c).unwrap();
        assert!(!r.blow_up);
        assert!(energy_drift(&r.trace.energy).unwrap() < 1e-4);
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
        let t_end = 1.0;
        let grid = RadialGrid::for_cone(n, h, 2.0, t_end).unwrap();
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
        while sim.t() < t_end - 1e-9 {
            sim.step();
        }
        // L2 over R^n; near the origin the max norm picks up a log factor for n >= 4.
        (0..grid.len())
            .map(|i| grid.weights[i] * (sim.u()[i] - exact(sim.t(), grid.r(i))).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn manufactured_solution_converges_at_second_order() {
        for n in [2, 3, 5] {
            let e: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|&h| mms_error(n, h)).collect();
            for w in e.windows(2) {
                let order = (w[0] / w[1]).log2();
                assert!((1.8..=2.2).contains(&order), "n = {n}, order {order}, errors {e:?}");
            }
        }
    }

    #[test]
    fn ode_mode_matches_reference_blowup_time() {
        // u'' = u^2, u(0) = 1, u'(0) = 0: T = int_1^inf du / sqrt(2(u^3 - 1)/3).
        // With u = 1/sin^2(theta) this becomes sqrt(6) int_0^{pi/2} dtheta / sqrt(1 + v + v^2),
        // v = sin^2(theta).
        let gl = crate::quadrature::GaussLegendre::new(64);
        let t_ref = 6f64.sqrt()
            * gl.integrate(0.0, std::f64::consts::FRAC_PI_2, |th| {
                let v = th.sin().powi(2);
                1.0 / (1.0 + v + v * v).sqrt()
            });
        assert!((t_ref - 2.974477425404352).abs() < 1e-8);
        let data = InitialBump::new(1.0, 3, 1.0, 0.0, 1.0).unwrap();
        let mut c = free(3, 2.0, CoefficientProfile::zero(), data);
        c.laplacian = false;
        c.h = 1e-3;
        c.horizon = 10.0;
        c.levels = 2;
        let r = run(&c).unwrap();
        assert!(r.blow_up);
        let t = r.t_est.unwrap();
        assert!((t - t_ref).abs() < 0.01 * t_ref, "{t} vs {t_ref}");
    }

    #[test]
    fn g_identity_residual_is_second_order() {
        let data = InitialBump::new(1.0, 4, 1.0, 1.0, 0.5).unwrap();
        let mut res = Vec::new();
        for h in [0.04, 0.02, 0.01] {
            let mut c = free(3, 2.0, default_profile(), data);
            c.h = h;
            c.horizon = 10.0;
            let r = run(&c).unwrap();
            assert!(!r.blow_up);
            res.push(r.residual_g);
        }
        assert!(res[0] / res[1] >= 3.5 && res[1] / res[2] >= 3.5, "{res:?}");
    }

    #[test]
    fn subcritical_bump_blows_up_in_flat_space() {
        let data = InitialBump::new(1.0, 4, 1.0, 1.0, 0.5).unwrap();
        let mut c = free(3, 2.0, CoefficientProfile::zero(), data);
        c.h = 0.05;
        c.horizon = 2000.0;
        c.levels = 2;
        let r = run(&c).unwrap();
        assert!(r.blow_up);
        let t = r.t_est.unwrap();
        let last = r.refinement[1];
        assert!(t > 0.0 && last.t_est.unwrap() <= r.final_t);
        assert!(r.sensitivity.unwrap() < 0.01 * t);
    }

    #[test]
    fn linear_runs_stay_bounded() {
        let data = InitialBump::new(1.0, 4, 1.0, 1.0, 5.0).unwrap();
        let mut c = free(3, 2.0, default_profile(), data);
        c.nonlinear = false;
        c.horizon = 50.0;
        let r = run(&c).unwrap();
        assert!(!r.blow_up && r.t_est.is_none());
        assert!((r.final_t - 50.0).abs() < 1e-9);
    }

    #[test]
    fn theorem_mode_rejects_missing_multipliers() {
        let data = InitialBump::new(1.0, 4, 1.0, 1.0, 0.5).unwrap();
        let c = SolverConfig::new(3, 2.0, default_profile(), data);
        assert!(matches!(run(&c), Err(Error::HypothesisViolation(_))));
        let mut sup = SolverConfig::new(3, 3.0, CoefficientProfile::zero(), data);
        sup.horizon = 1.0;
        assert!(matches!(run(&sup), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn theorem_mode_accepts_mild_profile() {
        let prof = CoefficientProfile::scattering(1.0, 2.0, 0.5, 2.0).unwrap();
        let data = InitialBump::new(1.0, 4, 1.0, 2.0, 0.5).unwrap();
        let mut c = SolverConfig::new(3, 2.0, prof, data);
        c.horizon = 5.0;
        c.weighted = Some(WeightedConfig {
            lambda0: 0.5,
            frame: None,
            frame_until: 0.0,
            every: 1,
        });
        let r = run(&c).unwrap();
        let tr = &r.trace;
        assert_eq!(tr.g1[0], tr.f[0]);
        assert!(r.positivity_violation.is_none());
    }
}
