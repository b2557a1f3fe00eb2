use std::sync::Arc;

use super::data::InitialBump;
use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::ode::CoefficientProfile;

/// Nodes with |u| above this count toward the support radius.
pub const SUPPORT_FLOOR: f64 = 1e-12;

pub type SourceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Static parameters of the discrete equation.
#[derive(Clone)]
pub struct SchemeParams {
    pub p: f64,
    pub dt: f64,
    pub nonlinear: bool,
    pub laplacian: bool,
    pub source: Option<(SourceFn, f64)>,
}

/// Quantities gathered during one sweep over the active nodes at the current level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelStats {
    pub t: f64,
    /// Integral of u over R^n.
    pub g: f64,
    /// Integral of |u|^p over R^n.
    pub lp: f64,
    /// Integral of the manufactured source.
    pub src: f64,
    pub sup: f64,
    pub support_r: f64,
}

/// Leapfrog state for u_tt - Δu + a u_t + b u = |u|^p (+ source) on a radial grid.
///
/// Flux form: (Lu)_i = [A_{i+1/2}(u_{i+1}-u_i) - A_{i-1/2}(u_i-u_{i-1})] / (h V_i). Damping
/// is averaged between levels; a positive mass is averaged too, a nonpositive one is
/// explicit.
pub struct Simulation {
    pub grid: RadialGrid,
    pub profile: CoefficientProfile,
    pub params: SchemeParams,
    cp: Vec<f64>,
    /// 2/h^2; the left coefficient is inv_h2x2 - cp[i].
    inv_h2x2: f64,
    prev: Vec<f64>,
    cur: Vec<f64>,
    next: Vec<f64>,
    src_buf: Vec<f64>,
    steps: usize,
    /// Last node that may be nonzero.
    active: usize,
    /// Initial velocity, consumed by the first step.
    v0: Option<Vec<f64>>,
}

#[inline]
fn abs_pow(u: f64, p: f64) -> f64 {
    if p == 2.0 {
        u * u
    } else if p == 3.0 {
        (u * u * u).abs()
    } else {
        u.abs().powf(p)
    }
}

impl Simulation {
    pub fn new(
        grid: RadialGrid,
        profile: CoefficientProfile,
        params: SchemeParams,
        data: &InitialBump,
    ) -> Result<Self> {
        data.validate()?;
        let u0: Vec<f64> = grid.radii().iter().map(|&r| data.f(r)).collect();
        let v0: Vec<f64> = grid.radii().iter().map(|&r| data.g(r)).collect();
        Self::from_fields(grid, profile, params, u0, v0, data.r0)
    }

    /// Starts from arbitrary radial fields vanishing for r > extent.
    pub fn from_fields(
        grid: RadialGrid,
        profile: CoefficientProfile,
        params: SchemeParams,
        mut u0: Vec<f64>,
        v0: Vec<f64>,
        extent: f64,
    ) -> Result<Self> {
        let len = grid.len();
        if u0.len() != len || v0.len() != len {
            return Err(Error::InvalidInput(format!(
                "initial fields need {len} nodes, got {} and {}",
                u0.len(),
                v0.len()
            )));
        }
        if !(params.dt > 0.0) || params.dt > grid.h * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "dt = {} must satisfy 0 < dt <= h = {}",
                params.dt, grid.h
            )));
        }
        if !(params.p > 1.0) {
            return Err(Error::InvalidInput(format!("p = {} must be > 1", params.p)));
        }
        let h = grid.h;
        let mut cp = vec![0.0; len];
        for i in 1..grid.last {
            cp[i] = grid.faces[i] / (h * grid.volumes[i]);
        }
        let mut extent = extent;
        if let Some((_, radius)) = &params.source {
            extent = extent.max(*radius);
        }
        let active = (((extent / h).ceil() as usize) + 2).min(grid.last - 1);
        u0[grid.last] = 0.0;
        if params.laplacian {
            u0[0] = (4.0 * u0[1] - u0[2]) / 3.0;
        }
        Ok(Self {
            grid,
            profile,
            params,
            cp,
            inv_h2x2: 2.0 / (h * h),
            prev: vec![0.0; len],
            cur: u0,
            next: vec![0.0; len],
            src_buf: vec![0.0; len],
            steps: 0,
            active,
            v0: Some(v0),
        })
    }

    pub fn t(&self) -> f64 {
        self.steps as f64 * self.params.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Current level u(t).
    pub fn u(&self) -> &[f64] {
        &self.cur
    }

    /// Previous level u(t - dt).
    pub fn u_prev(&self) -> &[f64] {
        &self.prev
    }

    pub fn active(&self) -> usize {
        self.active
    }

    fn lo(&self) -> usize {
        if self.params.laplacian {
            1
        } else {
            0
        }
    }

    fn fill_source(&mut self, t: f64) {
        if let Some((f, _)) = &self.params.source {
            for i in 0..=self.active {
                self.src_buf[i] = f(t, self.grid.r(i));
            }
        }
    }

    #[inline]
    fn lap(&self, u: &[f64], i: usize) -> f64 {
        if self.params.laplacian {
            self.cp[i] * (u[i + 1] - u[i - 1]) - self.inv_h2x2 * (u[i] - u[i - 1])
        } else {
            0.0
        }
    }

    fn fix_origin(&mut self) {
        if self.params.laplacian {
            self.next[0] = (4.0 * self.next[1] - self.next[2]) / 3.0;
        }
    }

    /// Taylor start: u^1 = u^0 + dt v^0 + dt^2/2 (L u^0 - a v^0 - b u^0 + |u^0|^p + S).
    fn first_step(&mut self, v0: &[f64]) -> LevelStats {
        let stats = self.stats();
        let dt = self.params.dt;
        let a = self.profile.a(0.0);
        let b = self.profile.b(0.0);
        self.fill_source(0.0);
        for i in self.lo()..=self.active {
            let u = self.cur[i];
            let mut acc = self.lap(&self.cur, i) - a * v0[i] - b * u;
            if self.params.nonlinear {
                acc += abs_pow(u, self.params.p);
            }
            if self.params.source.is_some() {
                acc += self.src_buf[i];
            }
            self.next[i] = u + dt * v0[i] + 0.5 * dt * dt * acc;
        }
        self.fix_origin();
        self.rotate();
        stats
    }

    fn rotate(&mut self) {
        std::mem::swap(&mut self.prev, &mut self.cur);
        std::mem::swap(&mut self.cur, &mut self.next);
        self.steps += 1;
        if self.params.laplacian {
            self.active = (self.active + 1).min(self.grid.last - 1);
        }
    }

    /// Advances one step and returns the statistics of the level that was current on entry.
    pub fn step(&mut self) -> LevelStats {
        if let Some(v0) = self.v0.take() {
            return self.first_step(&v0);
        }
        let t = self.t();
        let dt = self.params.dt;
        let dt2 = dt * dt;
        let a = self.profile.a(t);
        let b = self.profile.b(t);
        let (denom, c_prev, b_explicit) = if b > 0.0 {
            (
                1.0 + 0.5 * a * dt + 0.5 * dt2 * b,
                1.0 - 0.5 * a * dt + 0.5 * dt2 * b,
                0.0,
            )
        } else {
            (1.0 + 0.5 * a * dt, 1.0 - 0.5 * a * dt, b)
        };
        let inv = 1.0 / denom;
        let has_src = self.params.source.is_some();
        if has_src {
            self.fill_source(t);
        }
        let p = self.params.p;
        let nonlinear = self.params.nonlinear;
        let laplacian = self.params.laplacian;
        let w = &self.grid.weights;
        let c2 = self.inv_h2x2;

        let mut g = 0.0;
        let mut lp = 0.0;
        let mut src = 0.0;
        let mut sup = 0.0f64;
        let lo = self.lo();
        let hi = self.active;
        if laplacian {
            // Origin carries zero weight in the r^{n-1} measure.
            sup = self.cur[0].abs();
        }
        for i in lo..=hi {
            let u = self.cur[i];
            let up = abs_pow(u, p);
            let mut rhs = -b_explicit * u;
            if laplacian {
                rhs += self.cp[i] * (self.cur[i + 1] - self.cur[i - 1]) - c2 * (u - self.cur[i - 1]);
            }
            if nonlinear {
                rhs += up;
            }
            if has_src {
                rhs += self.src_buf[i];
                src += w[i] * self.src_buf[i];
            }
            self.next[i] = (2.0 * u - c_prev * self.prev[i] + dt2 * rhs) * inv;
            g += w[i] * u;
            lp += w[i] * up;
            sup = sup.max(u.abs());
        }
        if g.is_nan() {
            sup = f64::NAN;
        }
        let support = (0..=hi).rev().find(|&i| self.cur[i].abs() > SUPPORT_FLOOR).unwrap_or(0);
        self.fix_origin();
        self.rotate();
        LevelStats {
            t,
            g,
            lp,
            src,
            sup,
            support_r: self.grid.r(support),
        }
    }

    /// Statistics of the current level without stepping.
    pub fn stats(&self) -> LevelStats {
        let w = &self.grid.weights;
        let mut g = 0.0;
        let mut lp = 0.0;
        let mut src = 0.0;
        let mut sup = 0.0f64;
        let mut support = 0;
        for i in 0..=self.active {
            let u = self.cur[i];
            g += w[i] * u;
            lp += w[i] * abs_pow(u, self.params.p);
            if let Some((f, _)) = &self.params.source {
                src += w[i] * f(self.t(), self.grid.r(i));
            }
            sup = sup.max(u.abs());
            if u.is_nan() {
                sup = f64::NAN;
            }
            if u.abs() > SUPPORT_FLOOR {
                support = i;
            }
        }
        LevelStats {
            t: self.t(),
            g,
            lp,
            src,
            sup,
            support_r: self.grid.r(support),
        }
    }

    /// Discrete energy conserved by the free scheme, evaluated between the previous and
    /// current level: 1/2 sum V ((u - u_prev)/dt)^2 + 1/2 sum A (Δu)(Δu_prev)/h.
    pub fn staggered_energy(&self) -> f64 {
        let dt = self.params.dt;
        let h = self.grid.h;
        let mut kin = 0.0;
        let mut pot = 0.0;
        let top = (self.active + 1).min(self.grid.last);
        for i in 1..=top {
            let v = (self.cur[i] - self.prev[i]) / dt;
            kin += self.grid.volumes[i] * v * v;
        }
        for i in 0..top {
            pot += self.grid.faces[i]
                * (self.cur[i + 1] - self.cur[i])
                * (self.prev[i + 1] - self.prev[i])
                / h;
        }
        0.5 * (kin + pot)
    }
}
