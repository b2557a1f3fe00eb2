use crate::error::{Error, Result};
use crate::testfuncs::sphere_area;

/// Polynomial bump data f = eps f_amp B, g = eps g_amp B with B = (1 - (r/R0)^2)^m on r < R0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialBump {
    pub r0: f64,
    pub m: u32,
    pub f_amp: f64,
    pub g_amp: f64,
    pub eps: f64,
}

impl InitialBump {
    pub fn new(r0: f64, m: u32, f_amp: f64, g_amp: f64, eps: f64) -> Result<Self> {
        let b = Self {
            r0,
            m,
            f_amp,
            g_amp,
            eps,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0) {
            return Err(Error::InvalidInput(format!("R0 = {} must be > 0", self.r0)));
        }
        if self.m < 3 {
            return Err(Error::InvalidInput(format!("bump power m = {} must be >= 3", self.m)));
        }
        if !(self.f_amp >= 0.0) || !(self.g_amp >= 0.0) || !(self.eps >= 0.0) {
            return Err(Error::InvalidInput("amplitudes and eps must be >= 0".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn shape(&self, r: f64) -> f64 {
        if r >= self.r0 {
            0.0
        } else {
            let s = r / self.r0;
            (1.0 - s * s).powi(self.m as i32)
        }
    }

    pub fn f(&self, r: f64) -> f64 {
        self.eps * self.f_amp * self.shape(r)
    }

    pub fn g(&self, r: f64) -> f64 {
        self.eps * self.g_amp * self.shape(r)
    }

    /// Exact integral of the shape over R^n: |S^{n-1}| R0^n B(n/2, m+1) / 2.
    pub fn shape_integral(&self, n: u32) -> f64 {
        let half_n = 0.5 * n as f64;
        // B(n/2, m+1) = m! / prod_{j=0}^{m} (n/2 + j)
        let mut beta = 1.0;
        for j in 0..=self.m {
            if j > 0 {
                beta *= j as f64;
            }
            beta /= half_n + j as f64;
        }
        sphere_area(n - 1) * self.r0.powi(n as i32) * 0.5 * beta
    }
}
