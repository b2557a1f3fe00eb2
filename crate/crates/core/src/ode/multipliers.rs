use super::profile::CoefficientProfile;
use super::rk4::rk4_step;
use crate::error::{Error, Result};
use crate::quadrature::trapezoid;

/// Far horizon for the log-time Riccati tail.
pub const FAR_HORIZON: f64 = 1e12;
const TAIL_DTAU: f64 = 1e-3;

/// Uniform grid t_i = t0 + i * step on [t0, horizon].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub step: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, step: f64) -> Result<Self> {
        Self::span(0.0, horizon, step)
    }

    pub fn span(t0: f64, horizon: f64, step: f64) -> Result<Self> {
        let width = horizon - t0;
        if !(step > 0.0) || !(t0 >= 0.0) || !(width > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidInput(format!(
                "need 0 <= t0 < horizon and step > 0, got t0 = {t0}, horizon = {horizon}, step = {step}"
            )));
        }
        let n = (width / step).round();
        if (n * step - width).abs() > 1e-9 * horizon || n < 8.0 {
            return Err(Error::InvalidInput(format!(
                "interval [{t0}, {horizon}] is not a multiple of step {step} (or too few steps)"
            )));
        }
        Ok(Self {
            t0,
            step,
            len: n as usize + 1,
        })
    }

    #[inline]
    pub fn t(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.step
    }

    /// Continuous index of time t.
    #[inline]
    pub fn position(&self, t: f64) -> f64 {
        (t - self.t0) / self.step
    }

    pub fn horizon(&self) -> f64 {
        self.t(self.len - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.t(i)).collect()
    }
}

/// Bounded solution of k'' + a k' + b k = 0 and its derivative on the grid.
#[derive(Debug, Clone)]
pub struct KSolution {
    pub grid: TimeGrid,
    pub k: Vec<f64>,
    pub dk: Vec<f64>,
}

/// Riccati tail on [H, inf): terminal r2 and L1 masses of |r2|, |a - r2|, |a - 2 r2|.
#[derive(Debug, Clone, Copy)]
struct RiccatiTail {
    r2_at_h: f64,
    l1_r2: f64,
    l1_r1: f64,
    l1_diff: f64,
}

fn riccati_tail(profile: &CoefficientProfile, horizon: f64) -> RiccatiTail {
    let tau_h = horizon.ln_1p();
    let tau_e = FAR_HORIZON.ln_1p();
    let m = ((tau_e - tau_h) / TAIL_DTAU).ceil().max(1.0) as usize;
    let dtau = (tau_e - tau_h) / m as f64;
    let rhs = |tau: f64, y: &[f64; 1]| {
        let t = tau.exp_m1();
        let r = y[0];
        [tau.exp() * (profile.b(t) - profile.a(t) * r + r * r)]
    };
    let mut r = profile.b_tail_integral(FAR_HORIZON).map_or(0.0, |v| -v);

    let dens = |tau: f64, r: f64| {
        let t = tau.exp_m1();
        let w = tau.exp();
        let a = profile.a(t);
        (r.abs() * w, (a - r).abs() * w, (a - 2.0 * r).abs() * w)
    };

    // Mass beyond the far horizon.
    let (mut l1_r2, mut l1_r1, mut l1_diff) = match *profile {
        CoefficientProfile::ScatteringPower {
            mu,
            beta,
            mu2,
            alpha_m,
        } => {
            let x = 1.0 + FAR_HORIZON;
            let r2 = mu2.abs() / (alpha_m * (alpha_m - 1.0)) * x.powf(1.0 - alpha_m);
            let a = mu / ((beta - 1.0) * x.powf(beta - 1.0));
            (r2, a + r2, a + 2.0 * r2)
        }
        CoefficientProfile::Custom(_) => (0.0, 0.0, 0.0),
    };

    let mut tau = tau_e;
    let mut prev = dens(tau, r);
    for _ in 0..m {
        r = rk4_step(&rhs, tau, [r], -dtau)[0];
        tau -= dtau;
        let cur = dens(tau, r);
        l1_r2 += 0.5 * dtau * (prev.0 + cur.0);
        l1_r1 += 0.5 * dtau * (prev.1 + cur.1);
        l1_diff += 0.5 * dtau * (prev.2 + cur.2);
        prev = cur;
    }
    RiccatiTail {
        r2_at_h: r,
        l1_r2,
        l1_r1,
        l1_diff,
    }
}

fn integrate_k(
    profile: &CoefficientProfile,
    grid: TimeGrid,
    k_end: f64,
    dk_end: f64,
) -> Result<KSolution> {
    let n = grid.len;
    let h = grid.step;
    let mut k = vec![0.0; n];
    let mut dk = vec![0.0; n];
    k[n - 1] = k_end;
    dk[n - 1] = dk_end;
    let rhs = |t: f64, y: &[f64; 2]| [y[1], -profile.a(t) * y[1] - profile.b(t) * y[0]];
    let mut y = [k_end, dk_end];
    for i in (0..n - 1).rev() {
        y = rk4_step(&rhs, grid.t(i + 1), y, -h);
        if !(y[0] > 0.0) || !y[0].is_finite() {
            return Err(Error::NonOscillationFailure { t: grid.t(i) });
        }
        k[i] = y[0];
        dk[i] = y[1];
    }
    Ok(KSolution { grid, k, dk })
}

/// Integrates the k-equation backward from the horizon, starting on the bounded branch.
///
/// The terminal slope k'(H) = -r2(H) comes from a log-time Riccati integration from a
/// far horizon, which removes the spurious linearly growing component a zero slope
/// would inject.
pub fn solve_k(profile: &CoefficientProfile, horizon: f64, step: f64) -> Result<KSolution> {
    profile.validate()?;
    let grid = TimeGrid::new(horizon, step)?;
    let tail = riccati_tail(profile, grid.horizon());
    integrate_k(profile, grid, 1.0, -tail.r2_at_h)
}

/// Variant with the plain truncation k(H) = 1, k'(H) = 0.
pub fn solve_k_truncated(
    profile: &CoefficientProfile,
    horizon: f64,
    step: f64,
) -> Result<KSolution> {
    profile.validate()?;
    let grid = TimeGrid::new(horizon, step)?;
    integrate_k(profile, grid, 1.0, 0.0)
}

#[derive(Debug, Clone)]
pub struct MultiplierData {
    pub profile: CoefficientProfile,
    pub grid: TimeGrid,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub k: Vec<f64>,
    pub r2: Vec<f64>,
    pub r1: Vec<f64>,
    /// Pointwise Riccati residual with r2' from fourth-order differences.
    pub residual: Vec<f64>,
    pub l1_r1: f64,
    pub l1_r2: f64,
    /// L1 norm of r1 - r2 = a - 2 r2.
    pub l1_r1_minus_r2: f64,
    /// Portion of l1_r2 contributed by [H, inf).
    pub tail_r2: f64,
    pub c_r1r2: f64,
    pub r2_at_0: f64,
    pub residual_max: f64,
}

impl MultiplierData {
    pub fn t(&self, i: usize) -> f64 {
        self.grid.t(i)
    }

    pub fn len(&self) -> usize {
        self.grid.len
    }

    pub fn is_empty(&self) -> bool {
        self.grid.len == 0
    }

    pub fn residual_ok(&self, tol: f64) -> bool {
        self.residual_max < tol
    }

    /// r2 < 0 at every node of the trailing quarter.
    pub fn r2_negative_on_trailing_quarter(&self) -> bool {
        let start = 3 * (self.len() - 1) / 4;
        self.r2[start..].iter().all(|&r| r < 0.0)
    }

    /// r2' from the Riccati equation itself.
    #[inline]
    pub(crate) fn r2_slope(&self, i: usize) -> f64 {
        let r = self.r2[i];
        self.b[i] - self.a[i] * r + r * r
    }
}

fn fourth_order_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5);
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    }
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    let m = n - 1;
    d[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4])
        / (12.0 * h);
    d[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4])
        / (12.0 * h);
    d
}

/// r1, r2 = -k'/k, their L1 norms and C_{r1,r2}.
pub fn compute_multipliers(
    profile: &CoefficientProfile,
    horizon: f64,
    step: f64,
) -> Result<MultiplierData> {
    compute_multipliers_from(profile, 0.0, horizon, step)
}

/// Same pair restricted to [t0, horizon]; norms cover [t0, inf).
///
/// Strong damping together with a large positive mass can give the bounded branch of k
/// a zero near t = 0, in which case no pair exists on all of [0, inf) and a positive t0
/// past the last zero is required.
pub fn compute_multipliers_from(
    profile: &CoefficientProfile,
    t0: f64,
    horizon: f64,
    step: f64,
) -> Result<MultiplierData> {
    profile.validate()?;
    let grid = TimeGrid::span(t0, horizon, step)?;
    let tail = riccati_tail(profile, grid.horizon());
    let ks = integrate_k(profile, grid, 1.0, -tail.r2_at_h)?;
    let n = grid.len;
    let h = grid.step;

    let a: Vec<f64> = (0..n).map(|i| profile.a(grid.t(i))).collect();
    let b: Vec<f64> = (0..n).map(|i| profile.b(grid.t(i))).collect();
    let r2: Vec<f64> = ks.k.iter().zip(&ks.dk).map(|(k, dk)| -dk / k).collect();
    let r1: Vec<f64> = a.iter().zip(&r2).map(|(a, r)| a - r).collect();

    let d = fourth_order_derivative(&r2, h);
    let residual: Vec<f64> = (0..n)
        .map(|i| (d[i] + a[i] * r2[i] - r2[i] * r2[i] - b[i]).abs())
        .collect();
    let residual_max = residual.iter().cloned().fold(0.0, f64::max);

    // Trailing eighths of |r2| must not grow.
    let eighth = (n - 1) / 8;
    let abs_r2: Vec<f64> = r2.iter().map(|r| r.abs()).collect();
    let last = trapezoid(&abs_r2[n - 1 - eighth..], h);
    let prev = trapezoid(&abs_r2[n - 1 - 2 * eighth..=n - 1 - eighth], h);
    if last > 1e-14 && last > prev * (1.0 + 1e-12) {
        return Err(Error::DivergentL1 { ratio: last / prev });
    }

    let abs_r1: Vec<f64> = r1.iter().map(|r| r.abs()).collect();
    let abs_diff: Vec<f64> = (0..n).map(|i| (a[i] - 2.0 * r2[i]).abs()).collect();
    let l1_r2 = trapezoid(&abs_r2, h) + tail.l1_r2;
    let l1_r1 = trapezoid(&abs_r1, h) + tail.l1_r1;
    let l1_r1_minus_r2 = trapezoid(&abs_diff, h) + tail.l1_diff;
    if !l1_r1.is_finite() || !l1_r2.is_finite() {
        return Err(Error::DivergentL1 { ratio: f64::INFINITY });
    }

    Ok(MultiplierData {
        profile: profile.clone(),
        grid,
        r2_at_0: r2[0],
        a,
        b,
        k: ks.k,
        r2,
        r1,
        residual,
        l1_r1,
        l1_r2,
        l1_r1_minus_r2,
        tail_r2: tail.l1_r2,
        c_r1r2: (-l1_r1 - l1_r2).exp(),
        residual_max,
    })
}
