use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Above this argument the doubling check is skipped.
pub const CHECK_LIMIT: f64 = 50.0;
const CHECK_RTOL: f64 = 1e-10;

/// Surface area of the unit sphere S^k in R^{k+1}.
pub fn sphere_area(k: u32) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

/// Flat-space eigenfunction phi(x) = integral over S^{n-1} of e^{x.w}, so that
/// phi_lambda(r) = phi(lambda r) and Δ phi_lambda = lambda^2 phi_lambda.
///
/// Internally works with S(z) = e^{-z} phi(z), which stays O(z^{-(n-1)/2}).
#[derive(Debug, Clone)]
pub struct PhiEvaluator {
    n: u32,
    quad_order: usize,
    /// Gauss rules for odd n, indexed by node count.
    rules: Vec<(usize, GaussLegendre)>,
}

impl PhiEvaluator {
    pub fn new(n: u32, quad_order: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("dimension n = {n} must be >= 2")));
        }
        if quad_order < 8 {
            return Err(Error::InvalidInput("quad_order must be >= 8".into()));
        }
        Ok(Self {
            n,
            quad_order,
            rules: Vec::new(),
        })
    }

    pub fn with_default_order(n: u32) -> Result<Self> {
        Self::new(n, 64)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    /// Node count used at argument z; grows linearly so the exponential stays resolved.
    pub fn nodes_for(&self, z: f64) -> usize {
        self.quad_order + (1.2 * z).ceil() as usize
    }

    /// Precomputes Gauss rules for arguments up to z_max (odd n only).
    pub fn prepare(&mut self, z_max: f64) {
        if self.n % 2 == 0 {
            return;
        }
        let top = self.nodes_for(z_max);
        let mut count = self.quad_order;
        while count < 2 * top {
            if !self.rules.iter().any(|(c, _)| *c == count) {
                self.rules.push((count, GaussLegendre::new(count)));
            }
            count *= 2;
        }
    }

    fn rule_count(&self, z: f64) -> usize {
        // Round up to a power-of-two multiple of the base order so rules can be reused.
        let need = self.nodes_for(z);
        let mut count = self.quad_order;
        while count < need {
            count *= 2;
        }
        count
    }

    fn scaled_with(&self, z: f64, count: usize) -> f64 {
        let n = self.n;
        if z == 0.0 {
            return sphere_area(n - 1);
        }
        let pref = sphere_area(n - 2);
        if n % 2 == 1 {
            let owned;
            let gl = match self.rules.iter().find(|(c, _)| *c == count) {
                Some((_, g)) => g,
                None => {
                    owned = GaussLegendre::new(count);
                    &owned
                }
            };
            let e = (n as i32 - 3) / 2;
            let sum: f64 = gl
                .nodes
                .iter()
                .zip(&gl.weights)
                .map(|(&u, &w)| w * (z * (u - 1.0)).exp() * (1.0 - u * u).powi(e))
                .sum();
            pref * sum
        } else {
            // Periodic trapezoid on [0, 2pi); sin^{n-2} is smooth for even n.
            let m = count;
            let dt = 2.0 * PI / m as f64;
            let e = n as i32 - 2;
            let sum: f64 = (0..m)
                .map(|k| {
                    let th = k as f64 * dt;
                    (z * (th.cos() - 1.0)).exp() * th.sin().powi(e)
                })
                .sum();
            pref * 0.5 * sum * dt
        }
    }

    /// S(z) = e^{-z} phi(z) without the convergence check.
    pub fn scaled(&self, z: f64) -> f64 {
        self.scaled_with(z, self.rule_count(z))
    }

    /// S(z) with the node-doubling convergence check for z <= 50.
    pub fn scaled_checked(&self, z: f64) -> Result<f64> {
        let count = self.rule_count(z);
        let v = self.scaled_with(z, count);
        if z > 0.0 && z <= CHECK_LIMIT {
            let v2 = self.scaled_with(z, 2 * count);
            let rel = ((v2 - v) / v2).abs();
            if !(rel <= CHECK_RTOL) {
                return Err(Error::QuadratureNonConvergence { z, rel_change: rel });
            }
        }
        Ok(v)
    }

    /// phi_lambda(r); overflows to infinity for lambda r beyond about 700.
    pub fn phi(&self, lambda: f64, r: f64) -> Result<f64> {
        if !(lambda > 0.0) || !(r >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "need lambda > 0 and r >= 0, got {lambda} and {r}"
            )));
        }
        let z = lambda * r;
        Ok(self.scaled_checked(z)? * z.exp())
    }
}

/// Infimum and supremum of phi_lambda(r) / (<lambda r>^{-(n-1)/2} e^{lambda r}), <z> = sqrt(1+z^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiBoundFit {
    pub d0: f64,
    pub d1: f64,
    pub worst_low: (f64, f64),
    pub worst_high: (f64, f64),
}

pub fn envelope_ratio(ev: &PhiEvaluator, z: f64) -> f64 {
    ev.scaled(z) * (1.0 + z * z).powf(0.25 * (ev.n() as f64 - 1.0))
}

/// Samples lambda at 16 equispaced levels in (0, lambda0].
pub fn phi_bound_fit(ev: &PhiEvaluator, lambda0: f64, r_grid: &[f64]) -> Result<PhiBoundFit> {
    if !(lambda0 > 0.0) || r_grid.is_empty() {
        return Err(Error::InvalidInput("need lambda0 > 0 and a nonempty r grid".into()));
    }
    let mut fit = PhiBoundFit {
        d0: f64::INFINITY,
        d1: 0.0,
        worst_low: (0.0, 0.0),
        worst_high: (0.0, 0.0),
    };
    for k in 1..=16 {
        let lambda = lambda0 * k as f64 / 16.0;
        for &r in r_grid {
            let ratio = envelope_ratio(ev, lambda * r);
            if ratio < fit.d0 {
                fit.d0 = ratio;
                fit.worst_low = (lambda, r);
            }
            if ratio > fit.d1 {
                fit.d1 = ratio;
                fit.worst_high = (lambda, r);
            }
        }
    }
    Ok(fit)
}
