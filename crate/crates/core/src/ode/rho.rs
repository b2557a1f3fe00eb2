use super::multipliers::TimeGrid;
use super::profile::CoefficientProfile;
use super::rk4::rk4_step;
use crate::error::{Error, Result};

/// Decaying solution of rho'' - a rho' + (b - lambda^2 - a') rho = 0 with rho(0) = 1.
#[derive(Debug, Clone)]
pub struct RhoData {
    pub lambda: f64,
    pub grid: TimeGrid,
    pub rho: Vec<f64>,
    pub drho: Vec<f64>,
    pub drho_at_0: f64,
    /// Min and max of rho e^{lambda t} on the trailing half.
    pub decay_ratio_stats: (f64, f64),
}

impl RhoData {
    /// Cubic Hermite interpolation; beyond the horizon rho continues as e^{-lambda t}.
    pub fn rho_at(&self, t: f64) -> f64 {
        let h = self.grid.step;
        let last = self.grid.len - 1;
        if t <= 0.0 {
            return self.rho[0];
        }
        let x = t / h;
        if x >= last as f64 {
            return self.rho[last] * (-self.lambda * (t - self.grid.t(last))).exp();
        }
        let i = (x.floor() as usize).min(last - 1);
        let s = x - i as f64;
        hermite(self.rho[i], self.drho[i], self.rho[i + 1], self.drho[i + 1], h, s)
    }

    /// rho e^{lambda t} at each node.
    pub fn exp_ratio(&self) -> Vec<f64> {
        (0..self.grid.len)
            .map(|i| self.rho[i] * (self.lambda * self.grid.t(i)).exp())
            .collect()
    }
}

#[inline]
pub(crate) fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Works with eta = rho e^{lambda t}, whose growing branch decays in backward time.
pub fn solve_rho(
    profile: &CoefficientProfile,
    lambda: f64,
    horizon: f64,
    step: f64,
) -> Result<RhoData> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must be > 0")));
    }
    profile.validate()?;
    let grid = TimeGrid::new(horizon, step)?;
    let n = grid.len;
    let rhs = |t: f64, y: &[f64; 2]| {
        let a = profile.a(t);
        [
            y[1],
            (2.0 * lambda + a) * y[1] - (lambda * a + profile.b(t) - profile.da(t)) * y[0],
        ]
    };
    let mut eta = vec![0.0; n];
    let mut deta = vec![0.0; n];
    eta[n - 1] = 1.0;
    let mut y = [1.0, 0.0];
    for i in (0..n - 1).rev() {
        y = rk4_step(&rhs, grid.t(i + 1), y, -step);
        if !(y[0] > 0.0) || !y[0].is_finite() {
            return Err(Error::NonOscillationFailure { t: grid.t(i) });
        }
        eta[i] = y[0];
        deta[i] = y[1];
    }
    let eta0 = eta[0];
    let mut rho = vec![0.0; n];
    let mut drho = vec![0.0; n];
    for i in 0..n {
        let e = (-lambda * grid.t(i)).exp() / eta0;
        rho[i] = eta[i] * e;
        drho[i] = (deta[i] - lambda * eta[i]) * e;
    }
    rho[0] = 1.0;
    let (lo, hi) = eta[(n - 1) / 2..]
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| {
            let v = e / eta0;
            (lo.min(v), hi.max(v))
        });
    Ok(RhoData {
        lambda,
        grid,
        drho_at_0: deta[0] / eta0 - lambda,
        rho,
        drho,
        decay_ratio_stats: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_case_is_pure_exponential() {
        let r = solve_rho(&CoefficientProfile::zero(), 0.5, 50.0, 1e-3).unwrap();
        assert_eq!(r.rho[0], 1.0);
        assert!((r.drho_at_0 + 0.5).abs() < 1e-12);
        let err = (0..r.grid.len)
            .map(|i| (r.rho[i] - (-0.5 * r.grid.t(i)).exp()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8);
        assert!((r.rho_at(3.3337) - (-0.5f64 * 3.3337).exp()).abs() < 1e-10);
        assert!((r.rho_at(60.0) - (-30f64).exp()).abs() < 1e-20);
    }

    #[test]
    fn scattering_profile_ratio_bounded() {
        let p = CoefficientProfile::scattering(2.0, 2.0, 1.0, 1.5).unwrap();
        let r = solve_rho(&p, 0.5, 200.0, 1e-3).unwrap();
        let (lo, hi) = r.decay_ratio_stats;
        assert!(lo > 0.0 && hi / lo < 10.0);
        assert_eq!(r.rho[0], 1.0);
    }

    #[test]
    fn rejects_nonpositive_lambda() {
        assert!(solve_rho(&CoefficientProfile::zero(), 0.0, 10.0, 1e-2).is_err());
    }
}
