use super::phi::PhiEvaluator;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

const PANELS: usize = 16;
const BASE_PER_PANEL: usize = 8;

/// Nodes and weights (weights include lambda^q) on [0, lambda0], graded toward 0.
#[derive(Debug, Clone)]
pub struct LambdaQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LambdaQuadrature {
    /// `per_panel` Gauss points on each of 16 panels: 15 dyadic panels [lambda0 2^{-k-1},
    /// lambda0 2^{-k}] and an innermost [0, delta] mapped by lambda = delta u^{1/(q+1)}.
    pub fn graded(lambda0: f64, q: f64, per_panel: usize) -> Self {
        let gl = GaussLegendre::new(per_panel);
        let mut nodes = Vec::with_capacity(PANELS * per_panel);
        let mut weights = Vec::with_capacity(PANELS * per_panel);
        let delta = lambda0 * 0.5f64.powi(PANELS as i32 - 1);
        let scale = delta.powf(q + 1.0) / (q + 1.0);
        for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
            let u = 0.5 * (x + 1.0);
            nodes.push(delta * u.powf(1.0 / (q + 1.0)));
            weights.push(0.5 * w * scale);
        }
        for k in (0..PANELS - 1).rev() {
            let hi = lambda0 * 0.5f64.powi(k as i32);
            let lo = 0.5 * hi;
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
                let l = mid + half * x;
                nodes.push(l);
                weights.push(half * w * l.powf(q));
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub n: u32,
    pub q: f64,
    pub lambda0: f64,
    pub radius: f64,
    pub per_panel: usize,
    pub phi_order: usize,
}

impl KernelConfig {
    pub fn new(n: u32, q: f64, lambda0: f64, radius: f64) -> Self {
        Self {
            n,
            q,
            lambda0,
            radius,
            per_panel: BASE_PER_PANEL,
            phi_order: 64,
        }
    }

    /// Twice the lambda nodes per panel.
    pub fn doubled(self) -> Self {
        Self {
            per_panel: 2 * self.per_panel,
            ..self
        }
    }
}

/// Evaluators for xi_q and eta_q.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    pub config: KernelConfig,
    pub lam: LambdaQuadrature,
    pub phi: PhiEvaluator,
}

/// S(lambda_k r) at every lambda node for one radius.
#[derive(Debug, Clone)]
pub struct KernelColumn<'a> {
    kernel: &'a SpectralKernel,
    pub r: f64,
    scaled: Vec<f64>,
}

/// sinh(x)/x * e^{e}, without overflow for large x and without cancellation near 0.
#[inline]
fn sinhc_times_exp(x: f64, e: f64) -> f64 {
    if x < 1e-4 {
        (1.0 + x * x / 6.0) * e.exp()
    } else {
        -(-2.0 * x).exp_m1() / (2.0 * x) * (e + x).exp()
    }
}

impl<'a> KernelColumn<'a> {
    /// xi_q(r, t).
    pub fn xi(&self, t: f64) -> f64 {
        let big_r = self.kernel.config.radius;
        let r = self.r;
        let lam = &self.kernel.lam;
        let mut acc = 0.0;
        for k in 0..lam.len() {
            let l = lam.nodes[k];
            // e^{-l(t+R)} cosh(l t) e^{l r} = (e^{l(r-R)} + e^{l(r-R-2t)}) / 2.
            let f = 0.5 * ((l * (r - big_r)).exp() + (l * (r - big_r - 2.0 * t)).exp());
            acc += lam.weights[k] * f * self.scaled[k];
        }
        acc
    }

    /// eta_q(r, t, s).
    pub fn eta(&self, t: f64, s: f64) -> f64 {
        let big_r = self.kernel.config.radius;
        let r = self.r;
        let lam = &self.kernel.lam;
        let d = t - s;
        let mut acc = 0.0;
        for k in 0..lam.len() {
            let l = lam.nodes[k];
            let x = (l * d).abs();
            let f = sinhc_times_exp(x, l * (r - t - big_r));
            acc += lam.weights[k] * f * self.scaled[k];
        }
        acc
    }
}

impl SpectralKernel {
    pub fn new(config: KernelConfig) -> Result<Self> {
        if !(config.q > -1.0) {
            return Err(Error::InvalidInput(format!("q = {} must be > -1", config.q)));
        }
        if !(config.lambda0 > 0.0) || !(config.radius >= 0.0) {
            return Err(Error::InvalidInput("need lambda0 > 0 and R >= 0".into()));
        }
        let phi = PhiEvaluator::new(config.n, config.phi_order)?;
        let lam = LambdaQuadrature::graded(config.lambda0, config.q, config.per_panel);
        Ok(Self { config, lam, phi })
    }

    /// Prepares angular rules for radii up to r_max.
    pub fn prepare(&mut self, r_max: f64) {
        self.phi.prepare(self.config.lambda0 * r_max);
    }

    pub fn column(&self, r: f64) -> KernelColumn<'_> {
        let scaled = self.lam.nodes.iter().map(|&l| self.phi.scaled(l * r)).collect();
        KernelColumn {
            kernel: self,
            r,
            scaled,
        }
    }

    /// Column with the doubling check on every node whose argument is at most 50.
    pub fn column_checked(&self, r: f64) -> Result<KernelColumn<'_>> {
        let scaled = self
            .lam
            .nodes
            .iter()
            .map(|&l| self.phi.scaled_checked(l * r))
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelColumn {
            kernel: self,
            r,
            scaled,
        })
    }

    pub fn xi_q(&self, r: f64, t: f64) -> Result<f64> {
        check_args(r, t, 0.0)?;
        Ok(self.column_checked(r)?.xi(t))
    }

    pub fn eta_q(&self, r: f64, t: f64, s: f64) -> Result<f64> {
        check_args(r, t, s)?;
        if s > t {
            return Err(Error::InvalidInput(format!("need s <= t, got s = {s}, t = {t}")));
        }
        Ok(self.column_checked(r)?.eta(t, s))
    }
}

fn check_args(r: f64, t: f64, s: f64) -> Result<()> {
    if !(r >= 0.0) || !(t >= 0.0) || !(s >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "need r, t, s >= 0, got {r}, {t}, {s}"
        )));
    }
    Ok(())
}
