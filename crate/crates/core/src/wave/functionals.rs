use super::grid::RadialGrid;
use crate::error::Result;
use crate::ode::CoefficientProfile;
use crate::testfuncs::{PhiEvaluator, SpectralKernel};

/// G(t) = integral of u over R^n.
pub fn functional_g(grid: &RadialGrid, u: &[f64]) -> f64 {
    grid.integrate(u)
}

/// phi_lambda sampled at the grid nodes (infinite where it overflows).
#[derive(Debug, Clone)]
pub struct PhiWeight {
    pub lambda: f64,
    pub values: Vec<f64>,
}

impl PhiWeight {
    pub fn new(grid: &RadialGrid, lambda: f64) -> Result<Self> {
        let mut ev = PhiEvaluator::with_default_order(grid.n)?;
        ev.prepare(lambda * grid.r_max);
        let values = grid
            .radii()
            .iter()
            .map(|&r| ev.phi(lambda, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lambda, values })
    }
}

/// eta_q(r_i, t, t) evaluated from stored S(lambda_k r_i) columns.
#[derive(Debug, Clone)]
pub struct FrameWeight {
    kernel: SpectralKernel,
    /// scaled[i][k] = S(lambda_k r_i).
    scaled: Vec<Vec<f64>>,
}

impl FrameWeight {
    /// Columns for nodes 0..=last_node.
    pub fn new(grid: &RadialGrid, mut kernel: SpectralKernel, last_node: usize) -> Self {
        let last_node = last_node.min(grid.last);
        kernel.prepare(grid.r(last_node));
        let scaled = (0..=last_node)
            .map(|i| {
                let r = grid.r(i);
                kernel.lam.nodes.iter().map(|&l| kernel.phi.scaled(l * r)).collect()
            })
            .collect();
        Self { kernel, scaled }
    }

    pub fn nodes(&self) -> usize {
        self.scaled.len()
    }

    pub fn at(&self, r: f64, i: usize, t: f64) -> f64 {
        let big_r = self.kernel.config.radius;
        let lam = &self.kernel.lam;
        lam.nodes
            .iter()
            .zip(&lam.weights)
            .zip(&self.scaled[i])
            .map(|((&l, &w), &s)| w * (l * (r - t - big_r)).exp() * s)
            .sum()
    }
}

/// Test functions for weighted integrals of u.
pub enum Weight<'a> {
    /// psi(x, t) = rho(t) phi_lambda0(x); `rho` is the value at the current time.
    Psi { rho: f64, phi: &'a PhiWeight },
    Phi(&'a PhiWeight),
    /// eta_q(x, t, t).
    EtaDiag(&'a FrameWeight),
}

/// Weighted trapezoid integral of u over nodes 0..=upto at time t.
pub fn functional_weighted(grid: &RadialGrid, u: &[f64], upto: usize, t: f64, weight: &Weight) -> f64 {
    let w = &grid.weights;
    let upto = upto.min(grid.last);
    match weight {
        Weight::Phi(phi) | Weight::Psi { phi, .. } => {
            let mut acc = 0.0;
            for i in 0..=upto {
                if u[i] != 0.0 {
                    acc += w[i] * u[i] * phi.values[i];
                }
            }
            match weight {
                Weight::Psi { rho, .. } => rho * acc,
                _ => acc,
            }
        }
        Weight::EtaDiag(frame) => {
            let top = upto.min(frame.nodes() - 1);
            let mut acc = 0.0;
            for i in 0..=top {
                if u[i] != 0.0 {
                    acc += w[i] * u[i] * frame.at(grid.r(i), i, t);
                }
            }
            acc
        }
    }
}

/// Max over interior samples k < `limit` of |D2 G + a D G + b G - forcing| with centered
/// differences; `forcing` is the integral of |u|^p plus any source.
pub fn residual_g_identity(
    t: &[f64],
    g: &[f64],
    forcing: &[f64],
    profile: &CoefficientProfile,
    limit: usize,
) -> f64 {
    let limit = limit.min(g.len());
    if limit < 3 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for k in 1..limit - 1 {
        let dt = 0.5 * (t[k + 1] - t[k - 1]);
        let d2 = (g[k + 1] - 2.0 * g[k] + g[k - 1]) / (dt * dt);
        let d1 = (g[k + 1] - g[k - 1]) / (2.0 * dt);
        let r = d2 + profile.a(t[k]) * d1 + profile.b(t[k]) * g[k] - forcing[k];
        worst = worst.max(r.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfuncs::KernelConfig;
    use crate::wave::data::InitialBump;

    #[test]
    fn g_of_bump_matches_closed_form() {
        for n in 2..=5 {
            let grid = RadialGrid::new(n, 1e-3, 3.0).unwrap();
            let data = InitialBump::new(1.5, 4, 2.0, 0.0, 0.5).unwrap();
            let u: Vec<f64> = grid.radii().iter().map(|&r| data.f(r)).collect();
            let exact = 0.5 * 2.0 * data.shape_integral(n);
            assert!((functional_g(&grid, &u) - exact).abs() < 1e-6 * exact);
        }
    }

    #[test]
    fn phi_weighted_matches_three_dimensional_closed_form() {
        let grid = RadialGrid::new(3, 2e-3, 4.0).unwrap();
        let data = InitialBump::new(1.0, 3, 1.0, 0.0, 1.0).unwrap();
        let u: Vec<f64> = grid.radii().iter().map(|&r| data.f(r)).collect();
        let phi = PhiWeight::new(&grid, 0.5).unwrap();
        let quad = functional_weighted(&grid, &u, grid.last, 0.0, &Weight::Phi(&phi));
        // phi = 4 pi sinh(lambda r)/(lambda r) for n = 3.
        let closed: Vec<f64> = grid
            .radii()
            .iter()
            .map(|&r| if r == 0.0 { 4.0 * std::f64::consts::PI } else {
                4.0 * std::f64::consts::PI * (0.5 * r).sinh() / (0.5 * r)
            })
            .collect();
        let exact: f64 = (0..=grid.last).map(|i| grid.weights[i] * u[i] * closed[i]).sum();
        assert!((quad - exact).abs() < 1e-8 * exact.abs());
        let psi = functional_weighted(&grid, &u, grid.last, 0.0, &Weight::Psi { rho: 1.0, phi: &phi });
        assert_eq!(psi, quad);
    }

    #[test]
    fn zero_field_gives_zero_for_every_weight() {
        let grid = RadialGrid::new(3, 0.05, 10.0).unwrap();
        let u = vec![0.0; grid.len()];
        let phi = PhiWeight::new(&grid, 0.5).unwrap();
        let kernel = SpectralKernel::new(KernelConfig::new(3, 0.0, 0.5, 1.0)).unwrap();
        let frame = FrameWeight::new(&grid, kernel, grid.last);
        assert_eq!(functional_g(&grid, &u), 0.0);
        for w in [Weight::Phi(&phi), Weight::Psi { rho: 0.3, phi: &phi }, Weight::EtaDiag(&frame)] {
            assert_eq!(functional_weighted(&grid, &u, grid.last, 1.0, &w), 0.0);
        }
    }

    #[test]
    fn frame_weight_matches_kernel_diagonal() {
        let grid = RadialGrid::new(3, 0.1, 10.0).unwrap();
        let kernel = SpectralKernel::new(KernelConfig::new(3, -0.5, 0.5, 1.0)).unwrap();
        let frame = FrameWeight::new(&grid, kernel.clone(), grid.last);
        for &(i, t) in &[(0usize, 0.0), (15, 2.0), (60, 5.0)] {
            let direct = kernel.eta_q(grid.r(i), t, t).unwrap();
            assert!((frame.at(grid.r(i), i, t) - direct).abs() < 1e-12 * direct.abs());
        }
    }
}
