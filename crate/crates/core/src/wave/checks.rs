use super::solver::Trace;
use crate::quadrature::cumulative_trapezoid;
use crate::testfuncs::audit::bracket;

/// Largest c with lp(t) >= c eps^p (1+t)^{n-1-(n-1)p/2} on samples with t <= t_max, and the
/// time where it binds.
pub fn lower_bound_constant(trace: &Trace, eps: f64, n: u32, p: f64, t_max: f64) -> Option<(f64, f64)> {
    let e = (n as f64 - 1.0) * (1.0 - 0.5 * p);
    let scale = eps.powf(p);
    trace
        .t
        .iter()
        .zip(&trace.lp)
        .filter(|(t, lp)| **t <= t_max && lp.is_finite())
        .map(|(&t, &lp)| (lp / (scale * (1.0 + t).powf(e)), t))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleIntegralCheck {
    /// min over t of G(t) - c I(t), I the iterated integral of the forcing trace.
    pub worst_margin: f64,
    pub t_worst: f64,
    /// Largest |G| on the window, the scale for the O(dt^2) slack.
    pub g_scale: f64,
}

impl DoubleIntegralCheck {
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.worst_margin >= -rel_slack * self.g_scale
    }
}

/// Compares G(t) with c * int_0^t int_0^s int |u|^p on samples with t <= t_max.
pub fn double_integral_bound(trace: &Trace, c: f64, t_max: f64) -> DoubleIntegralCheck {
    let k = trace.t.iter().take_while(|&&t| t <= t_max).count();
    let t = &trace.t[..k];
    let inner = cumulative_trapezoid(t, &trace.lp[..k]);
    let outer = cumulative_trapezoid(t, &inner);
    let mut out = DoubleIntegralCheck {
        worst_margin: f64::INFINITY,
        t_worst: 0.0,
        g_scale: 0.0,
    };
    for i in 0..k {
        let m = trace.g[i] - c * outer[i];
        out.g_scale = out.g_scale.max(trace.g[i].abs());
        if m < out.worst_margin {
            out.worst_margin = m;
            out.t_worst = t[i];
        }
    }
    out
}

/// Largest c with F(t) >= c/<t> int_0^t (t-s)/<s> F(s)^p / log(<s>)^{p-1} ds at every sample
/// t in [t_lo, t_hi]; samples where F is NaN are skipped. None if F is not positive there.
pub fn frame_constant(t: &[f64], f: &[f64], p: f64, t_lo: f64, t_hi: f64) -> Option<f64> {
    let (ts, fs): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(f)
        .filter(|(s, v)| v.is_finite() && **s <= t_hi)
        .map(|(&s, &v)| (s, v))
        .unzip();
    let mut best = f64::INFINITY;
    for j in 0..ts.len() {
        let tj = ts[j];
        if tj < t_lo {
            continue;
        }
        if !(fs[j] > 0.0) {
            return None;
        }
        let integrand: Vec<f64> = ts[..=j]
            .iter()
            .zip(&fs[..=j])
            .map(|(&s, &v)| {
                let b = bracket(s);
                (tj - s) / b * v.max(0.0).powf(p) / b.ln().powf(p - 1.0)
            })
            .collect();
        let integral = *cumulative_trapezoid(&ts[..=j], &integrand).last()?;
        if integral > 0.0 {
            best = best.min(fs[j] * bracket(tj) / integral);
        }
    }
    (best.is_finite() && best > 0.0).then_some(best)
}

/// Max relative deviation of the finite energy samples from the first one.
pub fn energy_drift(energy: &[f64]) -> Option<f64> {
    let mut it = energy.iter().copied().filter(|e| e.is_finite());
    let e0 = it.next()?;
    Some(it.fold(0.0, |m, e| m.max((e - e0).abs() / e0.abs())))
}
