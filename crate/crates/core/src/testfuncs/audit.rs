use std::collections::HashMap;

use rayon::prelude::*;

use super::kernel::{KernelColumn, KernelConfig, SpectralKernel};
use super::phi::{phi_bound_fit, PhiBoundFit};
use crate::error::Result;

/// Bracket used by the decay bounds: <s> = 3 + |s|.
#[inline]
pub fn bracket(s: f64) -> f64 {
    3.0 + s.abs()
}

/// Tolerated relative drift of a fitted constant under refinement.
pub const DRIFT_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedConstant {
    pub value: f64,
    pub worst_t: f64,
    pub worst_s: f64,
    pub worst_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditPart {
    A0,
    B0,
    B1,
    B2,
}

impl AuditPart {
    pub const ALL: [AuditPart; 4] = [AuditPart::A0, AuditPart::B0, AuditPart::B1, AuditPart::B2];

    pub fn name(self) -> &'static str {
        match self {
            AuditPart::A0 => "A0",
            AuditPart::B0 => "B0",
            AuditPart::B1 => "B1",
            AuditPart::B2 => "B2",
        }
    }
}

/// Fitted constants of the four kernel bounds plus the phi envelope constants.
///
/// A0, B0, B1 are infima of ratios (lower bounds), B2 a supremum. A part is `None`
/// when its hypothesis on q fails or its constrained grid is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundAudit {
    pub a0: Option<FittedConstant>,
    pub b0: Option<FittedConstant>,
    pub b1: Option<FittedConstant>,
    pub b2: Option<FittedConstant>,
    pub phi_bounds: PhiBoundFit,
}

impl BoundAudit {
    pub fn part(&self, p: AuditPart) -> Option<FittedConstant> {
        match p {
            AuditPart::A0 => self.a0,
            AuditPart::B0 => self.b0,
            AuditPart::B1 => self.b1,
            AuditPart::B2 => self.b2,
        }
    }
}

struct Tracker {
    best: Option<FittedConstant>,
    minimize: bool,
}

impl Tracker {
    fn new(minimize: bool) -> Self {
        Self { best: None, minimize }
    }

    fn offer(&mut self, value: f64, t: f64, s: f64, r: f64) {
        let better = match self.best {
            None => true,
            Some(b) => {
                if self.minimize {
                    value < b.value
                } else {
                    value > b.value
                }
            }
        };
        if better {
            self.best = Some(FittedConstant {
                value,
                worst_t: t,
                worst_s: s,
                worst_r: r,
            });
        }
    }

    fn merge(mut self, other: Tracker) -> Self {
        if let Some(b) = other.best {
            self.offer(b.value, b.worst_t, b.worst_s, b.worst_r);
        }
        self
    }
}

/// Radii from `r_grid` no larger than `limit`, plus `limit` itself.
fn radii_upto(r_grid: &[f64], limit: f64) -> Vec<f64> {
    let mut v: Vec<f64> = r_grid.iter().cloned().filter(|&r| r < limit).collect();
    v.push(limit);
    v
}

pub fn lemma41_audit(
    kernel: &SpectralKernel,
    t_grid: &[f64],
    s_grid: &[f64],
    r_grid: &[f64],
) -> Result<BoundAudit> {
    let cfg = kernel.config;
    let big_r = cfg.radius;
    let n = cfg.n as f64;
    let q = cfg.q;
    let lower_ok = q > 0.0;
    let upper_ok = q > 0.5 * (n - 3.0);

    let mut radii: Vec<f64> = r_grid.to_vec();
    radii.push(big_r);
    radii.extend(s_grid.iter().map(|s| s + big_r));
    radii.extend(t_grid.iter().map(|t| t + big_r));
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup();
    let columns: Vec<KernelColumn<'_>> = radii.par_iter().map(|&r| kernel.column(r)).collect();
    let index: HashMap<u64, usize> = radii
        .iter()
        .enumerate()
        .map(|(i, r)| (r.to_bits(), i))
        .collect();
    let col = |r: f64| &columns[index[&r.to_bits()]];

    let (a0, b0) = if lower_ok {
        let inner = radii_upto(r_grid, big_r);
        let (ta, tb) = t_grid
            .par_iter()
            .map(|&t| {
                let mut ta = Tracker::new(true);
                let mut tb = Tracker::new(true);
                for &r in &inner {
                    let c = col(r);
                    ta.offer(c.xi(t), t, 0.0, r);
                    tb.offer(c.eta(t, 0.0) * bracket(t), t, 0.0, r);
                }
                (ta, tb)
            })
            .reduce(
                || (Tracker::new(true), Tracker::new(true)),
                |a, b| (a.0.merge(b.0), a.1.merge(b.1)),
            );
        (ta.best, tb.best)
    } else {
        (None, None)
    };

    let b1 = if lower_ok {
        s_grid
            .par_iter()
            .map(|&s| {
                let mut tr = Tracker::new(true);
                let rs = radii_upto(r_grid, s + big_r);
                for &t in t_grid.iter().filter(|&&t| t > s) {
                    let w = bracket(t) * bracket(s).powf(q);
                    for &r in &rs {
                        tr.offer(col(r).eta(t, s) * w, t, s, r);
                    }
                }
                tr
            })
            .reduce(|| Tracker::new(true), Tracker::merge)
            .best
    } else {
        None
    };

    let b2 = if upper_ok {
        let e_t = 0.5 * (n - 1.0);
        let e_x = q - 0.5 * (n - 3.0);
        t_grid
            .par_iter()
            .filter(|&&t| t > 0.0)
            .map(|&t| {
                let mut tr = Tracker::new(false);
                for &r in &radii_upto(r_grid, t + big_r) {
                    let v = col(r).eta(t, t) * bracket(t).powf(e_t) * bracket(t - r).powf(e_x);
                    tr.offer(v, t, t, r);
                }
                tr
            })
            .reduce(|| Tracker::new(false), Tracker::merge)
            .best
    } else {
        None
    };

    let phi_bounds = phi_bound_fit(&kernel.phi, cfg.lambda0, r_grid)?;
    Ok(BoundAudit {
        a0,
        b0,
        b1,
        b2,
        phi_bounds,
    })
}

/// Uniform audit grids: t and s on [0, t_max], r on [0, t_max + R].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditGrids {
    pub t_max: f64,
    pub intervals: usize,
}

impl AuditGrids {
    pub fn build(&self, radius: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = self.intervals;
        let t: Vec<f64> = (0..=m).map(|i| self.t_max * i as f64 / m as f64).collect();
        let r_max = self.t_max + radius;
        let mr = m + ((radius / self.t_max) * m as f64).ceil() as usize;
        let r: Vec<f64> = (0..=mr).map(|i| r_max * i as f64 / mr as f64).collect();
        (t.clone(), t, r)
    }

    pub fn doubled(self) -> Self {
        Self {
            intervals: 2 * self.intervals,
            ..self
        }
    }
}

#[derive(Debug, Clone)]
pub struct RefinementReport {
    pub coarse: BoundAudit,
    pub fine: BoundAudit,
    /// Relative drift per part; None when the part is absent at either level.
    pub drift: Vec<(AuditPart, Option<f64>)>,
    /// Parts whose constant drifts by more than 5% or vanishes.
    pub failing: Vec<AuditPart>,
}

/// Runs the audit, then again with doubled grids and doubled lambda nodes.
pub fn lemma41_refinement(config: KernelConfig, grids: AuditGrids) -> Result<RefinementReport> {
    let run = |cfg: KernelConfig, g: AuditGrids| -> Result<BoundAudit> {
        let mut k = SpectralKernel::new(cfg)?;
        k.prepare(2.0 * (g.t_max + cfg.radius));
        let (t, s, r) = g.build(cfg.radius);
        lemma41_audit(&k, &t, &s, &r)
    };
    let coarse = run(config, grids)?;
    let fine = run(config.doubled(), grids.doubled())?;
    let mut drift = Vec::new();
    let mut failing = Vec::new();
    for part in AuditPart::ALL {
        let d = match (coarse.part(part), fine.part(part)) {
            (Some(a), Some(b)) => Some(((b.value - a.value) / a.value).abs()),
            _ => None,
        };
        let bad = match d {
            Some(d) => !(d <= DRIFT_TOL) || !(coarse.part(part).unwrap().value > 0.0),
            None => false,
        };
        if bad {
            failing.push(part);
        }
        drift.push((part, d));
    }
    Ok(RefinementReport {
        coarse,
        fine,
        drift,
        failing,
    })
}
