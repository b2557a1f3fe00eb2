use rayon::prelude::*;

use super::fit::{fit_critical, fit_subcritical, ScalingFit, MIN_FIT_POINTS};
use crate::error::{Error, Result};
use crate::exponents::{classify, critical_rate, subcritical_rate, Criticality, ProblemIndex, CRITICAL_TOL};
use crate::iteration::{crit_seed, log_grid, subcrit_threshold, volterra_envelope_crit};
use crate::ode::CoefficientProfile;
use crate::wave::{check_theorem_hypotheses, run, InitialBump, Mode, SolverConfig};

/// Row horizons never exceed this unless the configured horizon does.
pub const DEFAULT_HORIZON_CAP: f64 = 2e4;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n: u32,
    pub p: f64,
    /// (mu, beta, mu2, alpha_m).
    pub profile: (f64, f64, f64, f64),
    pub r0: f64,
    pub m: u32,
    pub f_amp: f64,
    pub g_amp: f64,
    pub eps_max: f64,
    pub eps_ratio: f64,
    pub eps_count: usize,
    pub h: f64,
    pub cfl: f64,
    pub m_blow: f64,
    /// Lower bound for every row horizon.
    pub horizon: f64,
    pub horizon_cap: f64,
    /// Constants fed to the threshold prediction.
    pub predict_c_r1r2: f64,
    pub predict_c2: f64,
    pub levels: usize,
    pub refine_tol: f64,
    pub mode: Mode,
    pub workers: usize,
    pub fit_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: 3,
            p: 2.0,
            profile: (2.0, 2.0, 1.0, 1.5),
            r0: 1.0,
            m: 4,
            f_amp: 20.0,
            g_amp: 20.0,
            eps_max: 0.4,
            eps_ratio: 2.0,
            eps_count: 5,
            h: 0.2,
            cfl: 1.0,
            m_blow: 1e6,
            horizon: 50.0,
            horizon_cap: DEFAULT_HORIZON_CAP,
            predict_c_r1r2: 0.5,
            predict_c2: 1.0,
            levels: 2,
            refine_tol: crate::wave::REFINE_TOL,
            mode: Mode::Free,
            workers: 1,
            fit_tol: super::fit::DEFAULT_FIT_TOL,
        }
    }
}

impl SweepConfig {
    pub fn ladder(&self) -> Vec<f64> {
        (0..self.eps_count)
            .map(|k| self.eps_max / self.eps_ratio.powi(k as i32))
            .collect()
    }

    pub fn index(&self) -> Result<ProblemIndex> {
        ProblemIndex::new(self.n, self.p)
    }

    pub fn coefficient_profile(&self) -> Result<CoefficientProfile> {
        let (mu, beta, mu2, alpha_m) = self.profile;
        CoefficientProfile::scattering(mu, beta, mu2, alpha_m)
    }

    /// Threshold estimate at eps, clamped to [horizon, horizon_cap].
    pub fn predicted_threshold(&self, eps: f64) -> Result<f64> {
        let t = subcrit_threshold(self.p, self.n, self.predict_c_r1r2, self.predict_c2, eps)?.t;
        Ok(t.max(self.horizon).min(self.horizon_cap.max(self.horizon)))
    }

    /// Twice the prediction, within the same clamp.
    pub fn row_horizon(&self, eps: f64) -> Result<f64> {
        Ok((2.0 * self.predicted_threshold(eps)?).min(self.horizon_cap.max(self.horizon)))
    }

    pub fn solver_config(&self, eps: f64) -> Result<SolverConfig> {
        let data = InitialBump::new(self.r0, self.m, self.f_amp, self.g_amp, eps)?;
        let mut c = SolverConfig::new(self.n, self.p, self.coefficient_profile()?, data);
        c.h = self.h;
        c.cfl = self.cfl;
        c.m_blow = self.m_blow;
        c.horizon = self.row_horizon(eps)?;
        c.levels = self.levels;
        c.refine_tol = self.refine_tol;
        c.mode = self.mode;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let idx = self.index()?;
        if classify(idx, CRITICAL_TOL)?.class != Criticality::SubCritical {
            return Err(Error::InvalidInput(format!(
                "PDE sweeps need a sub-critical power, got p = {} for n = {}",
                self.p, self.n
            )));
        }
        if self.eps_count == 0 || !(self.eps_max > 0.0) {
            return Err(Error::InvalidInput("eps ladder needs eps_max > 0 and at least one point".into()));
        }
        if self.eps_count > 1 && !(self.eps_ratio > 1.0) {
            return Err(Error::InvalidInput(format!(
                "eps_ratio = {} must exceed 1 for a decreasing ladder",
                self.eps_ratio
            )));
        }
        if self.workers == 0 {
            return Err(Error::InvalidInput("workers must be >= 1".into()));
        }
        if !(self.horizon_cap > 0.0) || !(self.fit_tol > 0.0) {
            return Err(Error::InvalidInput("horizon_cap and fit_tol must be > 0".into()));
        }
        self.solver_config(self.eps_max)?.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub t_est: Option<f64>,
    pub converged: bool,
    pub sensitivity: Option<f64>,
    pub h_finest: f64,
    pub horizon: f64,
    /// Set when the row breaks the increasing-lifespan order.
    pub flagged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub n: u32,
    pub p: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn usable(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.converged && !r.flagged)
    }

    pub fn converged_count(&self) -> usize {
        self.rows.iter().filter(|r| r.converged).count()
    }

    pub fn flagged_count(&self) -> usize {
        self.rows.iter().filter(|r| r.flagged).count()
    }

    /// Sweep-level verdict: order violations fail, and a fit-sized ladder needs four converged rows.
    pub fn verify(&self) -> Result<()> {
        if self.flagged_count() > 0 {
            let eps: Vec<String> = self
                .rows
                .iter()
                .filter(|r| r.flagged)
                .map(|r| format!("{:e}", r.eps))
                .collect();
            return Err(Error::NonConvergence(format!(
                "T_est does not increase as eps decreases at eps = {}",
                eps.join(", ")
            )));
        }
        let got = self.converged_count();
        if self.rows.len() >= MIN_FIT_POINTS && got < MIN_FIT_POINTS {
            return Err(Error::InsufficientData {
                got,
                need: MIN_FIT_POINTS,
            });
        }
        Ok(())
    }

    /// Rows left out of a fit, with the reason.
    pub fn exclusions(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| !r.converged || r.flagged)
            .map(|r| {
                let why = if r.flagged {
                    "breaks monotone order".to_string()
                } else {
                    r.error.clone().unwrap_or_else(|| "no blow-up before the horizon".into())
                };
                format!("eps = {:e} excluded: {why}", r.eps)
            })
            .collect()
    }

    pub fn fit(&self, tol: f64) -> Result<ScalingFit> {
        let (eps, t): (Vec<f64>, Vec<f64>) = self.usable().map(|r| (r.eps, r.t_est.unwrap())).unzip();
        fit_subcritical(&eps, &t, ProblemIndex::new(self.n, self.p)?, tol)
    }
}

fn run_row(config: &SweepConfig, eps: f64) -> SweepRow {
    let h_finest = config.h / (1u64 << (config.levels - 1)) as f64;
    let mut row = SweepRow {
        eps,
        t_est: None,
        converged: false,
        sensitivity: None,
        h_finest,
        horizon: f64::NAN,
        flagged: false,
        error: None,
    };
    let result = config.solver_config(eps).and_then(|mut c| {
        row.horizon = c.horizon;
        // Hypotheses were verified once for the whole ladder.
        c.mode = Mode::Free;
        run(&c)
    });
    match result {
        Ok(report) => {
            row.t_est = report.t_est;
            row.sensitivity = report.sensitivity;
            row.converged = report.blow_up && report.t_est.is_some();
            if !report.blow_up {
                row.error = Some(format!("no blow-up before t = {}", report.final_t));
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Flags every converged row whose T_est is not above that of the previous converged row.
fn flag_order(rows: &mut [SweepRow]) {
    let mut prev: Option<usize> = None;
    for i in 0..rows.len() {
        if !rows[i].converged {
            continue;
        }
        if let Some(j) = prev {
            if rows[i].t_est.unwrap() <= rows[j].t_est.unwrap() {
                rows[i].flagged = true;
                rows[j].flagged = true;
            }
        }
        prev = Some(i);
    }
}

/// One solver run per eps; the table order follows the ladder whatever the worker count.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    if config.mode == Mode::Theorem {
        check_theorem_hypotheses(&config.solver_config(config.eps_max)?)?;
    }
    let ladder = config.ladder();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let mut rows: Vec<SweepRow> = pool.install(|| ladder.par_iter().map(|&eps| run_row(config, eps)).collect());
    flag_order(&mut rows);
    Ok(SweepTable {
        n: config.n,
        p: config.p,
        rows,
    })
}

/// Theoretical slope of log T against log(1/eps).
pub fn theory_slope(n: u32, p: f64) -> Result<f64> {
    Ok(subcritical_rate(ProblemIndex::new(n, p)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSweepConfig {
    pub p: f64,
    pub eps: Vec<f64>,
    pub c_frame: f64,
    pub seed_m: f64,
    pub t0: f64,
    pub t1: f64,
    pub nodes: usize,
    pub sweeps: usize,
}

impl EnvelopeSweepConfig {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            eps: vec![0.3, 0.2, 0.15, 0.1],
            c_frame: 2.0,
            seed_m: 30.0,
            t0: 1.5,
            t1: 1e200,
            nodes: 20001,
            sweeps: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeRow {
    pub eps: f64,
    pub log_t: Option<f64>,
    pub sweeps_used: usize,
}

/// Critical-case lifespans come from the Volterra envelope, not the PDE.
pub fn run_envelope_sweep(config: &EnvelopeSweepConfig) -> Result<Vec<EnvelopeRow>> {
    if !(config.t0 > 1.0) || !(config.t1 > config.t0) || config.nodes < 2 {
        return Err(Error::InvalidInput("envelope grid needs 1 < t0 < t1 and >= 2 nodes".into()));
    }
    let t = log_grid(config.t0, config.t1, config.nodes);
    config
        .eps
        .iter()
        .map(|&eps| {
            let seed = crit_seed(&t, config.seed_m, eps, config.p);
            let env = volterra_envelope_crit(&t, &seed, config.c_frame, config.p, config.sweeps)?;
            Ok(EnvelopeRow {
                eps,
                log_t: env.divergence_time.map(f64::ln),
                sweeps_used: env.sweeps_used,
            })
        })
        .collect()
}

pub fn fit_envelope_rows(rows: &[EnvelopeRow], p: f64) -> Result<ScalingFit> {
    let (eps, log_t): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.log_t.map(|l| (r.eps, l)))
        .unzip();
    fit_critical(&eps, &log_t, p)
}

/// Abscissa of the critical plot data.
pub fn critical_abscissa(eps: f64, p: f64) -> f64 {
    eps.powf(-critical_rate(p))
}
