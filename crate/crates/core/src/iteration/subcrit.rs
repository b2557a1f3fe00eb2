use crate::error::{Error, Result};
use crate::exponents::{gamma_raw, strauss_exponent};

#[derive(Debug, Clone, PartialEq)]
pub struct SubcritSequences {
    pub p: f64,
    pub n: u32,
    pub j_max: usize,
    /// Entry k holds index j = k + 1.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub log_d: Vec<f64>,
    pub c_r1r2: f64,
    pub c2: f64,
    pub c3: f64,
    pub s_p_inf: f64,
    /// First index from which logD_j >= p^{j-1}(logD_1 - S_p(inf)) is asserted.
    pub bound_from: usize,
    /// Whether that bound holds at every j in bound_from..=j_max.
    pub bound_ok: bool,
}

impl SubcritSequences {
    pub fn a_j(&self, j: usize) -> f64 {
        self.a[j - 1]
    }

    pub fn b_j(&self, j: usize) -> f64 {
        self.b[j - 1]
    }

    pub fn log_d_j(&self, j: usize) -> f64 {
        self.log_d[j - 1]
    }

    pub fn a_closed(&self, j: usize) -> f64 {
        let (n, p) = (self.n as f64, self.p);
        p.powi(j as i32 - 1) * ((n - 1.0) * p / 2.0 + n) - n
    }

    pub fn b_closed(&self, j: usize) -> f64 {
        let p = self.p;
        p.powi(j as i32 - 1) * beta(self.n, p) - 2.0 / (p - 1.0)
    }

    /// Largest relative gap between recursion and closed forms of a_j, b_j.
    pub fn closed_form_gap(&self) -> f64 {
        (1..=self.j_max)
            .flat_map(|j| {
                [
                    rel(self.a_j(j), self.a_closed(j)),
                    rel(self.b_j(j), self.b_closed(j)),
                ]
            })
            .fold(0.0, f64::max)
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

/// alpha = (n-1)p/2 + n.
pub fn alpha(n: u32, p: f64) -> f64 {
    (n as f64 - 1.0) * p / 2.0 + n as f64
}

/// beta = n + 1 + 2/(p-1).
pub fn beta(n: u32, p: f64) -> f64 {
    n as f64 + 1.0 + 2.0 / (p - 1.0)
}

pub fn c3(n: u32, p: f64, c_r1r2: f64) -> f64 {
    c_r1r2 / beta(n, p).powi(2)
}

/// S_p(inf) = 2p log p/(p-1)^2 - p log C3/(p-1).
pub fn s_p_inf(n: u32, p: f64, c_r1r2: f64) -> f64 {
    2.0 * p * p.ln() / (p - 1.0).powi(2) - p * c3(n, p, c_r1r2).ln() / (p - 1.0)
}

fn check_subcritical(p: f64, n: u32) -> Result<()> {
    let ps = strauss_exponent(n)?;
    if !(p > 1.0 && p < ps) {
        return Err(Error::InvalidInput(format!(
            "p = {p} is outside the sub-critical range (1, {ps}) for n = {n}"
        )));
    }
    Ok(())
}

fn check_constants(c_r1r2: f64, c2: f64, eps: f64) -> Result<()> {
    if !(c_r1r2 > 0.0 && c_r1r2 <= 1.0) {
        return Err(Error::InvalidInput(format!("C_r1r2 = {c_r1r2} must lie in (0, 1]")));
    }
    if !(c2 > 0.0) || !(eps > 0.0) {
        return Err(Error::InvalidInput("C2 and eps must be > 0".into()));
    }
    Ok(())
}

/// Iterated lower-bound exponents and log-constants with D_1 = C2 eps^p.
pub fn subcrit_sequences(
    p: f64,
    n: u32,
    c_r1r2: f64,
    c2: f64,
    eps: f64,
    j_max: usize,
) -> Result<SubcritSequences> {
    check_subcritical(p, n)?;
    check_constants(c_r1r2, c2, eps)?;
    if j_max == 0 {
        return Err(Error::InvalidInput("j_max must be >= 1".into()));
    }
    let nf = n as f64;
    let mut a = vec![(nf - 1.0) * p / 2.0];
    let mut b = vec![nf + 1.0];
    let mut log_d = vec![c2.ln() + p * eps.ln()];
    let log_c = c_r1r2.ln();
    for k in 0..j_max - 1 {
        a.push(p * a[k] + nf * (p - 1.0));
        b.push(p * b[k] + 2.0);
        log_d.push(p * log_d[k] + log_c - 2.0 * (p * b[k] + 2.0).ln());
    }
    let c3 = c3(n, p, c_r1r2);
    let s = s_p_inf(n, p, c_r1r2);
    let threshold = (p * c3.ln() / (2.0 * p.ln()) - 1.0 / (p - 1.0)).floor() + 1.0;
    let bound_from = if threshold < 1.0 { 1 } else { threshold as usize + 1 };
    let bound_ok = (bound_from..=j_max).all(|j| {
        let bound = p.powi(j as i32 - 1) * (log_d[0] - s);
        log_d[j - 1] >= bound - 1e-12 * bound.abs()
    });
    Ok(SubcritSequences {
        p,
        n,
        j_max,
        a,
        b,
        log_d,
        c_r1r2,
        c2,
        c3,
        s_p_inf: s,
        bound_from,
        bound_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubcritThreshold {
    /// C4 eps^{-2p(p-1)/gamma}.
    pub t: f64,
    pub c4: f64,
    /// J(t) at the returned time.
    pub j_value: f64,
    pub j_exceeds_one: bool,
}

/// J(t) = log D_1 - S_p(inf) - alpha log(1+t) + beta log t.
pub fn j_function(p: f64, n: u32, c_r1r2: f64, c2: f64, eps: f64, t: f64) -> f64 {
    c2.ln() + p * eps.ln() - s_p_inf(n, p, c_r1r2) - alpha(n, p) * t.ln_1p() + beta(n, p) * t.ln()
}

/// Lifespan upper bound of the sub-critical iteration.
pub fn subcrit_threshold(p: f64, n: u32, c_r1r2: f64, c2: f64, eps: f64) -> Result<SubcritThreshold> {
    check_subcritical(p, n)?;
    check_constants(c_r1r2, c2, eps)?;
    let g = gamma_raw(n, p);
    let s = s_p_inf(n, p, c_r1r2);
    let e = 2.0 * (p - 1.0) / g;
    let c4 = ((s + alpha(n, p) * 2f64.ln() + 1.0).exp() / c2).powf(e);
    let t = c4 * eps.powf(-p * e);
    let j_value = j_function(p, n, c_r1r2, c2, eps, t);
    Ok(SubcritThreshold {
        t,
        c4,
        j_value,
        j_exceeds_one: j_value > 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_terms() {
        let s = subcrit_sequences(2.0, 3, 0.5, 0.1, 0.2, 5).unwrap();
        assert_eq!(s.a_j(1), 2.0);
        assert_eq!(s.b_j(1), 4.0);
        assert!((s.log_d_j(1) - (0.1f64 * 0.04).ln()).abs() < 1e-15);
        assert_eq!(s.a_j(2), 2.0 * 2.0 + 3.0);
        let d2 = 0.5 * (0.1f64 * 0.04).powi(2) / 100.0;
        assert!((s.log_d_j(2) - d2.ln()).abs() < 1e-13);
    }

    #[test]
    fn beta_minus_alpha_is_gamma_over_two_p_minus_one() {
        for (n, p) in [(3, 2.0), (2, 2.5), (4, 1.7), (6, 1.4)] {
            let lhs = beta(n, p) - alpha(n, p);
            let rhs = gamma_raw(n, p) / (2.0 * (p - 1.0));
            assert!((lhs - rhs).abs() < 1e-12 * rhs.abs());
        }
        assert_eq!(beta(3, 2.0) - alpha(3, 2.0), 1.0);
    }

    #[test]
    fn closed_forms_match_recursion() {
        let s = subcrit_sequences(2.0, 3, 1.0, 1.0, 1.0, 40).unwrap();
        assert!(s.closed_form_gap() < 1e-12);
        assert!(rel(s.a_j(20), s.a_closed(20)) < 1e-12);
        let s = subcrit_sequences(1.9, 4, 0.3, 2.0, 0.1, 40).unwrap();
        assert!(s.closed_form_gap() < 1e-12);
        assert!(s.log_d.iter().all(|v| v.is_finite()));
        assert!(s.bound_ok);
    }

    #[test]
    fn rejects_non_subcritical_powers() {
        assert!(subcrit_sequences(1.0 + 2f64.sqrt(), 3, 1.0, 1.0, 1.0, 5).is_err());
        assert!(subcrit_sequences(1.0, 3, 1.0, 1.0, 1.0, 5).is_err());
        assert!(subcrit_sequences(2.0, 3, 1.5, 1.0, 1.0, 5).is_err());
    }

    #[test]
    fn threshold_scaling() {
        let t1 = subcrit_threshold(2.0, 3, 0.4, 0.01, 0.2).unwrap();
        let t2 = subcrit_threshold(2.0, 3, 0.4, 0.01, 0.1).unwrap();
        assert!((t2.t / t1.t - 4.0).abs() < 1e-10);
        assert!(t1.j_exceeds_one && t2.j_exceeds_one);
        let t3 = subcrit_threshold(2.0, 3, 0.4, 0.02, 0.2).unwrap();
        // Exponent -2(p-1)/gamma = -1 for (3, 2).
        assert!((t3.t / t1.t - 0.5).abs() < 1e-12);
    }
}
