use crate::error::{Error, Result};
use crate::testfuncs::sphere_area;

/// Radial nodes r_i = i h, i = 0..=N, with a homogeneous Dirichlet node at r_N = r_max.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub n: u32,
    pub h: f64,
    pub r_max: f64,
    /// Index of the last node (r_N = r_max).
    pub last: usize,
    /// Face areas A_{i+1/2} without the sphere factor: r_{i+1/2} for n = 2, otherwise
    /// (r_i r_{i+1})^{(n-1)/2}.
    pub faces: Vec<f64>,
    /// Lumped volumes V_i = h (A_{i-1/2} + A_{i+1/2}) / 2.
    pub volumes: Vec<f64>,
    /// Trapezoid weights |S^{n-1}| h r_i^{n-1} for integrals over R^n.
    pub weights: Vec<f64>,
}

impl RadialGrid {
    pub fn new(n: u32, h: f64, r_max: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("dimension n = {n} must be >= 2")));
        }
        if !(h > 0.0) || !(r_max > 4.0 * h) {
            return Err(Error::InvalidInput(format!(
                "need h > 0 and r_max > 4h, got h = {h}, r_max = {r_max}"
            )));
        }
        let last = (r_max / h).ceil() as usize;
        let r_max = last as f64 * h;
        let e = 0.5 * (n as f64 - 1.0);
        // Exact on r^2 at every interior node for n = 2 and n = 3.
        let faces: Vec<f64> = (0..last)
            .map(|i| {
                if n == 2 {
                    (i as f64 + 0.5) * h
                } else {
                    ((i as f64 * h) * ((i + 1) as f64 * h)).powf(e)
                }
            })
            .collect();
        let mut volumes = vec![0.0; last + 1];
        for i in 1..last {
            volumes[i] = 0.5 * h * (faces[i - 1] + faces[i]);
        }
        let area = sphere_area(n - 1);
        let weights = (0..=last)
            .map(|i| {
                let r = i as f64 * h;
                let w = area * h * r.powi(n as i32 - 1);
                if i == last {
                    0.5 * w
                } else {
                    w
                }
            })
            .collect();
        Ok(Self {
            n,
            h,
            r_max,
            last,
            faces,
            volumes,
            weights,
        })
    }

    /// Grid large enough to hold the light cone r <= t + support for t <= horizon.
    pub fn for_cone(n: u32, h: f64, support: f64, horizon: f64) -> Result<Self> {
        Self::new(n, h, support + horizon + 4.0 * h)
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn len(&self) -> usize {
        self.last + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..=self.last).map(|i| self.r(i)).collect()
    }

    /// Trapezoid integral over R^n of a radial function sampled on the grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}
