use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Formula-backed coefficients; the caller supplies a, a' and b.
#[derive(Clone)]
pub struct CustomProfile {
    pub a: ScalarFn,
    pub da: ScalarFn,
    pub b: ScalarFn,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomProfile { .. }")
    }
}

/// Damping a(t) and mass b(t) of u_tt - Δu + a u_t + b u = |u|^p.
#[derive(Debug, Clone)]
pub enum CoefficientProfile {
    /// a = mu/(1+t)^beta, b = mu2/(1+t)^(alpha_m+1).
    ScatteringPower {
        mu: f64,
        beta: f64,
        mu2: f64,
        alpha_m: f64,
    },
    Custom(CustomProfile),
}

/// Tails of the integrability audit beyond a horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrabilityTails {
    /// Integral of |a| over [H, inf).
    pub a_tail: f64,
    /// Integral of t|b| over [H, inf).
    pub tb_tail: f64,
    /// True when the tails are analytic bounds rather than estimates.
    pub bounded: bool,
}

impl CoefficientProfile {
    pub fn scattering(mu: f64, beta: f64, mu2: f64, alpha_m: f64) -> Result<Self> {
        let p = CoefficientProfile::ScatteringPower {
            mu,
            beta,
            mu2,
            alpha_m,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn zero() -> Self {
        CoefficientProfile::ScatteringPower {
            mu: 0.0,
            beta: 2.0,
            mu2: 0.0,
            alpha_m: 2.0,
        }
    }

    pub fn custom<A, DA, B>(a: A, da: DA, b: B) -> Self
    where
        A: Fn(f64) -> f64 + Send + Sync + 'static,
        DA: Fn(f64) -> f64 + Send + Sync + 'static,
        B: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CoefficientProfile::Custom(CustomProfile {
            a: Arc::new(a),
            da: Arc::new(da),
            b: Arc::new(b),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let CoefficientProfile::ScatteringPower {
            mu,
            beta,
            mu2,
            alpha_m,
        } = *self
        {
            if !(mu >= 0.0) || !mu.is_finite() {
                return Err(Error::InvalidInput(format!("mu = {mu} must be >= 0")));
            }
            if !(beta > 1.0) {
                return Err(Error::InvalidInput(format!("beta = {beta} must be > 1")));
            }
            if !mu2.is_finite() {
                return Err(Error::InvalidInput("mu2 must be finite".into()));
            }
            if !(alpha_m > 1.0) {
                return Err(Error::InvalidInput(format!("alpha_m = {alpha_m} must be > 1")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn a(&self, t: f64) -> f64 {
        match self {
            CoefficientProfile::ScatteringPower { mu, beta, .. } => {
                if *mu == 0.0 {
                    0.0
                } else {
                    mu * (1.0 + t).powf(-beta)
                }
            }
            CoefficientProfile::Custom(c) => (c.a)(t),
        }
    }

    #[inline]
    pub fn da(&self, t: f64) -> f64 {
        match self {
            CoefficientProfile::ScatteringPower { mu, beta, .. } => {
                if *mu == 0.0 {
                    0.0
                } else {
                    -mu * beta * (1.0 + t).powf(-beta - 1.0)
                }
            }
            CoefficientProfile::Custom(c) => (c.da)(t),
        }
    }

    #[inline]
    pub fn b(&self, t: f64) -> f64 {
        match self {
            CoefficientProfile::ScatteringPower { mu2, alpha_m, .. } => {
                if *mu2 == 0.0 {
                    0.0
                } else {
                    mu2 * (1.0 + t).powf(-alpha_m - 1.0)
                }
            }
            CoefficientProfile::Custom(c) => (c.b)(t),
        }
    }

    pub fn is_custom(&self) -> bool {
        matches!(self, CoefficientProfile::Custom(_))
    }

    /// Integral of b over [t, inf) for power profiles.
    pub(crate) fn b_tail_integral(&self, t: f64) -> Option<f64> {
        match *self {
            CoefficientProfile::ScatteringPower { mu2, alpha_m, .. } => {
                Some(mu2 / (alpha_m * (1.0 + t).powf(alpha_m)))
            }
            CoefficientProfile::Custom(_) => None,
        }
    }

    pub fn integrability_tails(&self, horizon: f64) -> IntegrabilityTails {
        match *self {
            CoefficientProfile::ScatteringPower {
                mu,
                beta,
                mu2,
                alpha_m,
            } => {
                let x = 1.0 + horizon;
                IntegrabilityTails {
                    a_tail: mu / ((beta - 1.0) * x.powf(beta - 1.0)),
                    tb_tail: mu2.abs() / ((alpha_m - 1.0) * x.powf(alpha_m - 1.0)),
                    bounded: true,
                }
            }
            CoefficientProfile::Custom(_) => {
                // Estimate from [H, 10H] with a Gauss rule in log(1+t).
                let gl = crate::quadrature::GaussLegendre::new(64);
                let lo = (1.0 + horizon).ln();
                let hi = (1.0 + 10.0 * horizon).ln();
                let a_tail = gl.integrate(lo, hi, |s| {
                    let t = s.exp() - 1.0;
                    self.a(t).abs() * s.exp()
                });
                let tb_tail = gl.integrate(lo, hi, |s| {
                    let t = s.exp() - 1.0;
                    t * self.b(t).abs() * s.exp()
                });
                IntegrabilityTails {
                    a_tail,
                    tb_tail,
                    bounded: false,
                }
            }
        }
    }

    /// Whether the tails beyond `horizon` shrink when the horizon doubles and sit below `tol`.
    pub fn integrability_ok(&self, horizon: f64, tol: f64) -> bool {
        let t1 = self.integrability_tails(horizon);
        let t2 = self.integrability_tails(2.0 * horizon);
        t2.a_tail <= t1.a_tail && t2.tb_tail <= t1.tb_tail && t1.a_tail < tol && t1.tb_tail < tol
    }
}
