use crate::error::{Error, Result};
use crate::testfuncs::audit::bracket;

/// Values above this count as divergence.
pub const DIVERGENCE_CAP: f64 = 1e30;
/// Stored values are clamped here so powers stay finite; the clamp keeps the operator monotone.
pub const STORE_CAP: f64 = 1e60;

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    pub t: Vec<f64>,
    /// Values after each sweep; entry 0 is the seed.
    pub sweeps: Vec<Vec<f64>>,
    pub divergence_time: Option<f64>,
    pub sweeps_used: usize,
}

impl EnvelopeResult {
    pub fn last(&self) -> &[f64] {
        self.sweeps.last().expect("seed is always stored")
    }

    pub fn is_monotone(&self) -> bool {
        self.sweeps
            .windows(2)
            .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b >= a))
    }
}

/// Cumulative trapezoid of y over x, written into out.
fn cumulative(x: &[f64], y: &[f64], out: &mut [f64]) {
    out[0] = 0.0;
    for i in 1..x.len() {
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
}

fn clamp(v: f64) -> f64 {
    if v.is_nan() {
        STORE_CAP
    } else {
        v.min(STORE_CAP)
    }
}

/// Iterates v <- max(seed, op(v)) and locates the first node that passes the cap while still
/// growing.
fn iterate<F>(t: Vec<f64>, seed: Vec<f64>, sweeps: usize, mut op: F) -> Result<EnvelopeResult>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if sweeps == 0 {
        return Err(Error::InvalidInput("at least one sweep is required".into()));
    }
    if t.len() < 2 || t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("time grid must be strictly increasing with >= 2 nodes".into()));
    }
    let mut history = vec![seed.iter().map(|&v| clamp(v)).collect::<Vec<_>>()];
    let mut buf = vec![0.0; t.len()];
    let mut used = 0;
    for _ in 0..sweeps {
        let prev = history.last().unwrap();
        op(prev, &mut buf);
        let next: Vec<f64> = buf.iter().zip(&seed).map(|(&v, &s)| clamp(v.max(s))).collect();
        used += 1;
        let fixed = next == *prev;
        history.push(next);
        if fixed {
            break;
        }
    }
    let k = history.len() - 1;
    let last = &history[k];
    let before = &history[k.saturating_sub(1)];
    let hit = (0..t.len()).find(|&i| {
        last[i] > DIVERGENCE_CAP && (last[i] > before[i] || last[i] == STORE_CAP)
    });
    match hit {
        Some(i) => Ok(EnvelopeResult {
            divergence_time: Some(t[i]),
            t,
            sweeps: history,
            sweeps_used: used,
        }),
        None => Err(Error::NoDivergenceOnGrid {
            max_value: last.iter().copied().fold(0.0, f64::max),
        }),
    }
}

/// Seed C2 eps^p (1+t)^{-(n-1)p/2} t^{n+1}.
pub fn subcrit_seed(t: &[f64], c2: f64, eps: f64, n: u32, p: f64) -> Vec<f64> {
    let nf = n as f64;
    t.iter()
        .map(|&s| c2 * eps.powf(p) * (1.0 + s).powf(-(nf - 1.0) * p / 2.0) * s.powf(nf + 1.0))
        .collect()
}

/// Fixed-point sweeps of G <- max(seed, c int_0^t int_0^{s2} G^p (s1+R)^{(1-p)n} ds1 ds2).
pub fn volterra_envelope_subcrit(
    t: &[f64],
    seed: &[f64],
    c_r1r2: f64,
    p: f64,
    n: u32,
    radius: f64,
    sweeps: usize,
) -> Result<EnvelopeResult> {
    if seed.len() != t.len() || seed.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidInput("seed must be nonnegative and match the grid".into()));
    }
    if t.first().map_or(true, |&t0| t0 != 0.0) {
        return Err(Error::InvalidInput("sub-critical grid must start at t = 0".into()));
    }
    let weight: Vec<f64> = t.iter().map(|&s| (s + radius).powf((1.0 - p) * n as f64)).collect();
    let mut integrand = vec![0.0; t.len()];
    let mut inner = vec![0.0; t.len()];
    let tt = t.to_vec();
    iterate(t.to_vec(), seed.to_vec(), sweeps, move |g, out| {
        for i in 0..g.len() {
            integrand[i] = g[i].powf(p) * weight[i];
        }
        cumulative(&tt, &integrand, &mut inner);
        cumulative(&tt, &inner, out);
        for v in out.iter_mut() {
            *v *= c_r1r2;
        }
    })
}

/// Log-spaced grid with `nodes` points on [t0, t1].
pub fn log_grid(t0: f64, t1: f64, nodes: usize) -> Vec<f64> {
    let (a, b) = (t0.ln(), t1.ln());
    (0..nodes)
        .map(|i| (a + (b - a) * i as f64 / (nodes - 1) as f64).exp())
        .collect()
}

/// Seed (M/3) eps^p log(2t/3).
pub fn crit_seed(t: &[f64], m: f64, eps: f64, p: f64) -> Vec<f64> {
    t.iter()
        .map(|&s| (m / 3.0 * eps.powf(p) * (2.0 * s / 3.0).ln()).max(0.0))
        .collect()
}

/// Fixed-point sweeps of F <- max(seed, C/<t> int_{t0}^t (t-s)/<s> F^p / log(<s>)^{p-1} ds).
pub fn volterra_envelope_crit(
    t: &[f64],
    seed: &[f64],
    c_frame: f64,
    p: f64,
    sweeps: usize,
) -> Result<EnvelopeResult> {
    if seed.len() != t.len() || seed.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidInput("seed must be nonnegative and match the grid".into()));
    }
    let kernel: Vec<f64> = t
        .iter()
        .map(|&s| {
            let b = bracket(s);
            1.0 / (b * b.ln().powf(p - 1.0))
        })
        .collect();
    let n = t.len();
    let mut h = vec![0.0; n];
    let mut inner = vec![0.0; n];
    let tt = t.to_vec();
    iterate(t.to_vec(), seed.to_vec(), sweeps, move |f, out| {
        for i in 0..n {
            h[i] = f[i].powf(p) * kernel[i];
        }
        // int (t - s) h ds as an iterated integral, so only nonnegative terms are added.
        cumulative(&tt, &h, &mut inner);
        cumulative(&tt, &inner, out);
        for i in 0..n {
            out[i] *= c_frame / bracket(tt[i]);
        }
    })
}
