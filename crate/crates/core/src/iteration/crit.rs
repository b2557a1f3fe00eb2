use crate::error::{Error, Result};

/// Slicing sequences for the critical power.
#[derive(Debug, Clone, PartialEq)]
pub struct CritSequences {
    pub p: f64,
    pub j_max: usize,
    /// l_j for j = 0..=j_max.
    pub l: Vec<f64>,
    /// a_j, b_j for j = 0..=j_max.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// log C_j for j = 1..=j_max, entry k holding j = k + 1.
    pub log_c: Vec<f64>,
    pub e: f64,
    pub c1: f64,
}

impl CritSequences {
    pub fn log_c_j(&self, j: usize) -> f64 {
        self.log_c[j - 1]
    }

    /// Closed form obtained by summing the recursion:
    /// log C_j = p^{j-1} log C_1 + (p^{j-1}-1)/(p-1) log E - (p^j - jp + j - 1)/(p-1)^2 log(2p).
    pub fn log_c_closed(&self, j: usize) -> f64 {
        let p = self.p;
        let k = j as f64 - 1.0;
        let pk = p.powf(k);
        pk * self.c1.ln() + (pk - 1.0) / (p - 1.0) * self.e.ln()
            - (p * pk - (k + 1.0) * p + k) / (p - 1.0).powi(2) * (2.0 * p).ln()
    }

    /// The grouping printed alongside the slicing proposition:
    /// p^{j-1} log(C_1 (2p)^{-p/(p-1)} E^{1/(p-1)}) - log E/(p-1) + (p/(p-1) + j - 1) log(2p).
    /// It coincides with [`Self::log_c_closed`] only when p = 2.
    pub fn log_c_printed(&self, j: usize) -> f64 {
        let p = self.p;
        let q = p / (p - 1.0);
        let inner = self.c1.ln() - q * (2.0 * p).ln() + self.e.ln() / (p - 1.0);
        p.powi(j as i32 - 1) * inner - self.e.ln() / (p - 1.0) + (q + j as f64 - 1.0) * (2.0 * p).ln()
    }

    /// Largest |recursion - closed form| over j = 1..=j_max, relative to max(1, |log C_j|).
    pub fn closed_form_gap(&self) -> f64 {
        (1..=self.j_max)
            .map(|j| {
                let r = self.log_c_j(j);
                (r - self.log_c_closed(j)).abs() / r.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn printed_form_gap(&self) -> f64 {
        (1..=self.j_max)
            .map(|j| {
                let r = self.log_c_j(j);
                (r - self.log_c_printed(j)).abs() / r.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

/// E = C (p-1)/(8p^2).
pub fn slicing_e(c_frame: f64, p: f64) -> f64 {
    c_frame * (p - 1.0) / (8.0 * p * p)
}

/// N = C M^p / (3^p 7).
pub fn slicing_n(c_frame: f64, m: f64, p: f64) -> f64 {
    c_frame * m.powf(p) / (3f64.powf(p) * 7.0)
}

/// B = N 2^{-2p^2/(p-1)} p^{-p/(p-1)} E^{1/(p-1)}.
pub fn slicing_b(n_const: f64, c_frame: f64, p: f64) -> f64 {
    let q = p / (p - 1.0);
    n_const * 2f64.powf(-2.0 * p * q) * p.powf(-q) * slicing_e(c_frame, p).powf(1.0 / (p - 1.0))
}

pub fn crit_sequences(p: f64, c_frame: f64, c1: f64, j_max: usize) -> Result<CritSequences> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("p = {p} must be > 1")));
    }
    if !(c_frame > 0.0) || !(c1 > 0.0) {
        return Err(Error::InvalidInput("C_frame and C1 must be > 0".into()));
    }
    if j_max == 0 {
        return Err(Error::InvalidInput("j_max must be >= 1".into()));
    }
    let l = (0..=j_max).map(|j| 2.0 - 0.5f64.powi(j as i32 + 1)).collect();
    let a = (0..=j_max).map(|j| (p.powi(j as i32 + 1) - 1.0) / (p - 1.0)).collect();
    let b = (0..=j_max).map(|j| p.powi(j as i32) - 1.0).collect();
    let e = slicing_e(c_frame, p);
    let mut log_c = vec![c1.ln()];
    for j in 1..j_max {
        let prev = log_c[j - 1];
        log_c.push(p * prev + e.ln() - j as f64 * (2.0 * p).ln());
    }
    Ok(CritSequences {
        p,
        j_max,
        l,
        a,
        b,
        log_c,
        e,
        c1,
    })
}

/// Critical lifespan bound exp(B^{-(p-1)/p} eps^{-p(p-1)}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CritThreshold {
    pub log_t: f64,
    /// +inf when exp(log_t) overflows.
    pub t: f64,
}

pub fn crit_threshold(b: f64, p: f64, eps: f64) -> Result<CritThreshold> {
    if !(b > 0.0) || !(eps > 0.0) || !(p > 1.0) {
        return Err(Error::InvalidInput("need B > 0, eps > 0 and p > 1".into()));
    }
    let log_t = b.powf(-(p - 1.0) / p) * eps.powf(-p * (p - 1.0));
    Ok(CritThreshold { log_t, t: log_t.exp() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps3() -> f64 {
        1.0 + 2f64.sqrt()
    }

    #[test]
    fn slicing_radii_and_exponents() {
        let s = crit_sequences(ps3(), 1.0, 0.1, 10).unwrap();
        assert_eq!(&s.l[..3], &[1.5, 1.75, 1.875]);
        assert!(s.l.windows(2).all(|w| w[1] > w[0] && w[1] < 2.0));
        let p = ps3();
        assert!((s.a[1] - (p + 1.0)).abs() < 1e-14);
        assert!((s.b[1] - (p - 1.0)).abs() < 1e-14);
        assert_eq!(s.a[0], 1.0);
        assert_eq!(s.b[0], 0.0);
    }

    #[test]
    fn recursion_matches_closed_form() {
        for p in [ps3(), 2.0, 1.5, 3.7] {
            let s = crit_sequences(p, 0.7, 1e-3, 30).unwrap();
            assert!(s.closed_form_gap() < 1e-10, "p = {p}");
            assert!(s.log_c.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn printed_grouping_agrees_only_at_two() {
        let s = crit_sequences(2.0, 0.7, 1e-3, 30).unwrap();
        assert!(s.printed_form_gap() < 1e-10);
        let s = crit_sequences(ps3(), 0.7, 1e-3, 30).unwrap();
        assert!(s.printed_form_gap() > 1e-3);
    }

    #[test]
    fn threshold_scaling() {
        let p = ps3();
        let one = crit_threshold(1.0, p, 0.5).unwrap();
        assert!((one.log_t - 2f64.powf(p * (p - 1.0))).abs() < 1e-12);
        let b = 0.3;
        let t1 = crit_threshold(b, p, 0.5).unwrap();
        let t2 = crit_threshold(b, p, 0.25).unwrap();
        assert!((t2.log_t / t1.log_t - 2f64.powf(p * (p - 1.0))).abs() < 1e-9);
        assert!((t1.log_t - b.powf(-(p - 1.0) / p) * 2f64.powf(p * (p - 1.0))).abs() < 1e-12);
        let huge = crit_threshold(1e-6, p, 0.01).unwrap();
        assert!(huge.t.is_infinite() && huge.log_t.is_finite());
    }

    #[test]
    fn b_constant_definition() {
        let p = 2.0;
        let e = slicing_e(4.0, p);
        assert_eq!(e, 4.0 / 32.0);
        let n = slicing_n(4.0, 3.0, p);
        assert!((n - 4.0 * 9.0 / 63.0).abs() < 1e-15);
        let b = slicing_b(n, 4.0, p);
        assert!((b - n * 2f64.powi(-8) * 0.25 * e).abs() < 1e-15);
    }
}
