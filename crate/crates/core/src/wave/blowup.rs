use crate::error::{Error, Result};

/// Relative gap between successive refinement levels above which a blow-up time is rejected.
pub const REFINE_TOL: f64 = 0.05;

/// First time sup|u| reaches `level`, interpolated in log sup|u| between samples.
pub fn crossing_time(t: &[f64], sup: &[f64], level: f64) -> Option<f64> {
    for k in 0..sup.len() {
        let s = sup[k];
        if s >= level || !s.is_finite() {
            if k == 0 {
                return Some(t[0]);
            }
            let s0 = sup[k - 1];
            if !s.is_finite() || !(s0 > 0.0) {
                return Some(t[k]);
            }
            let theta = (level.ln() - s0.ln()) / (s.ln() - s0.ln());
            return Some(t[k - 1] + theta.clamp(0.0, 1.0) * (t[k] - t[k - 1]));
        }
    }
    None
}

/// Blow-up estimate from one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowUpEstimate {
    pub t_m: f64,
    pub t_10m: f64,
}

impl BlowUpEstimate {
    pub fn sensitivity(&self) -> f64 {
        (self.t_10m - self.t_m).abs()
    }
}

/// Detects the first passage of sup|u| over `m_blow` and `10 m_blow`.
pub fn detect_blowup(t: &[f64], sup: &[f64], m_blow: f64) -> Option<BlowUpEstimate> {
    let t_m = crossing_time(t, sup, m_blow)?;
    let t_10m = crossing_time(t, sup, 10.0 * m_blow).unwrap_or(*t.last()?);
    Some(BlowUpEstimate { t_m, t_10m })
}

/// Second-order Richardson extrapolation from spacings h and h/2.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}

/// Combines blow-up times from successively halved spacings into one estimate.
pub fn combine_levels(times: &[f64], tol: f64) -> Result<f64> {
    match times.len() {
        0 => Err(Error::NonConvergence("no refinement levels".into())),
        1 => Ok(times[0]),
        k => {
            let (c, f) = (times[k - 2], times[k - 1]);
            let gap = (f - c).abs() / f.abs().max(f64::MIN_POSITIVE);
            if gap > tol {
                return Err(Error::NonConvergence(format!(
                    "blow-up times {c:.6} and {f:.6} differ by {:.2}% under refinement",
                    100.0 * gap
                )));
            }
            Ok(richardson(c, f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_crossing_is_exact() {
        let t: Vec<f64> = (0..100).map(|k| k as f64 * 0.1).collect();
        let sup: Vec<f64> = t.iter().map(|&s| (2.0 * s).exp()).collect();
        let tc = crossing_time(&t, &sup, 1e3).unwrap();
        assert!((tc - 1e3f64.ln() / 2.0).abs() < 1e-12);
        assert!(crossing_time(&t, &sup, 1e300).is_none());
    }

    #[test]
    fn nonfinite_counts_as_crossing() {
        let t = [0.0, 1.0, 2.0];
        let sup = [1.0, 2.0, f64::INFINITY];
        assert_eq!(crossing_time(&t, &sup, 1e6), Some(2.0));
    }

    #[test]
    fn richardson_removes_quadratic_error() {
        let exact = 3.0;
        let c = exact + 0.4;
        let f = exact + 0.1;
        assert!((richardson(c, f) - exact).abs() < 1e-14);
        assert!(combine_levels(&[10.0, 11.0], 0.05).is_err());
        assert!((combine_levels(&[10.0, 10.1], 0.05).unwrap() - 10.1333333333).abs() < 1e-9);
    }
}
