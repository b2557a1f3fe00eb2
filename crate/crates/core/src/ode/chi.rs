use super::multipliers::MultiplierData;
use super::rho::hermite;
use super::rk4::rk4_step;
use crate::error::{Error, Result};

pub const SANDWICH_SLACK: f64 = 1e-6;

/// Fundamental pair of chi'' + (r1 - r2) chi' - lambda^2 chi = 0 started at s.
#[derive(Debug, Clone)]
pub struct ChiData {
    pub lambda: f64,
    pub s: f64,
    pub step: f64,
    pub t: Vec<f64>,
    pub chi1: Vec<f64>,
    pub chi2: Vec<f64>,
    /// L1 norm of r1 - r2 used by the envelopes.
    pub l1_diff: f64,
    pub sandwich_ok: (bool, bool),
    first_violation: Option<Error>,
}

impl ChiData {
    /// (lower1, upper1, lower2, upper2) at node i.
    pub fn envelopes(&self, i: usize) -> (f64, f64, f64, f64) {
        envelopes(self.lambda, self.t[i] - self.s, self.l1_diff)
    }

    pub fn ensure_sandwich(&self) -> Result<()> {
        match &self.first_violation {
            Some(e) => Err(e.clone()),
            None => Ok(()),
        }
    }
}

fn envelopes(lambda: f64, dt: f64, l: f64) -> (f64, f64, f64, f64) {
    let c = (lambda * dt).cosh();
    let sh = (lambda * dt).sinh() / lambda;
    ((-l).exp() * c, c, (-2.0 * l).exp() * sh, l.exp() * sh)
}

/// Integrates forward from the grid node nearest to s up to `horizon`.
pub fn solve_chi(m: &MultiplierData, lambda: f64, s: f64, horizon: f64) -> Result<ChiData> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must be > 0")));
    }
    let h = m.grid.step;
    let t0 = m.grid.t0;
    let last = (m.grid.position(horizon).round().max(0.0) as usize).min(m.len() - 1);
    let i0 = m.grid.position(s).round().max(0.0) as usize;
    if !(s >= t0) || i0 >= last {
        return Err(Error::InvalidInput(format!(
            "source time {s} must lie in [{t0}, {horizon})"
        )));
    }
    let profile = &m.profile;
    // c = a - 2 r2, with r2 between nodes from cubic Hermite data.
    let c_at = |t: f64| -> f64 {
        let x = m.grid.position(t);
        let i = (x.floor() as usize).min(m.len() - 2);
        let frac = x - i as f64;
        let r2 = if frac.abs() < 1e-12 {
            m.r2[i]
        } else if (frac - 1.0).abs() < 1e-12 {
            m.r2[i + 1]
        } else {
            hermite(m.r2[i], m.r2_slope(i), m.r2[i + 1], m.r2_slope(i + 1), h, frac)
        };
        profile.a(t) - 2.0 * r2
    };
    let l2 = lambda * lambda;
    let rhs = |t: f64, y: &[f64; 4]| {
        let c = c_at(t);
        [y[1], l2 * y[0] - c * y[1], y[3], l2 * y[2] - c * y[3]]
    };
    let count = last - i0 + 1;
    let mut t = Vec::with_capacity(count);
    let mut chi1 = Vec::with_capacity(count);
    let mut chi2 = Vec::with_capacity(count);
    let mut y = [1.0, 0.0, 0.0, 1.0];
    t.push(m.t(i0));
    chi1.push(1.0);
    chi2.push(0.0);
    for i in i0..last {
        y = rk4_step(&rhs, m.t(i), y, h);
        t.push(m.t(i + 1));
        chi1.push(y[0]);
        chi2.push(y[2]);
    }

    let s0 = m.t(i0);
    let l = m.l1_r1_minus_r2;
    let up = 1.0 + SANDWICH_SLACK;
    let mut ok = (true, true);
    let mut first_violation = None;
    for i in 0..count {
        let (lo1, hi1, lo2, hi2) = envelopes(lambda, t[i] - s0, l);
        let checks = [
            ("chi1 lower", chi1[i] * up >= lo1, chi1[i], lo1, 0),
            ("chi1 upper", chi1[i] <= hi1 * up, chi1[i], hi1, 0),
            ("chi2 lower", chi2[i] * up >= lo2, chi2[i], lo2, 1),
            ("chi2 upper", chi2[i] <= hi2 * up, chi2[i], hi2, 1),
        ];
        for (which, pass, value, bound, slot) in checks {
            if !pass {
                if slot == 0 {
                    ok.0 = false;
                } else {
                    ok.1 = false;
                }
                if first_violation.is_none() {
                    first_violation = Some(Error::SandwichViolation {
                        which,
                        t: t[i],
                        value,
                        bound,
                    });
                }
            }
        }
    }

    Ok(ChiData {
        lambda,
        s: s0,
        step: h,
        t,
        chi1,
        chi2,
        l1_diff: l,
        sandwich_ok: ok,
        first_violation,
    })
}
