//! Bekollé–Bonami quotients over Carleson tents: tent averages, the finite
//! sup over a tent grid, the near/far regime split and its closed-form
//! ceilings, and an approach ladder that detects divergence.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::domain::{lens_area, lens_ratio_floor, tent_area, TentSpec};
use crate::error::{Error, Result};
use crate::region::{AngularOptions, Disk, Region};
use crate::weights::{dual_weight, WeightSpec};

pub const DEFAULT_DELTA0: f64 = 0.05;

/// Growth of the running max along the approach ladder that counts as
/// divergence.
pub const DIVERGENCE_GROWTH: f64 = 10.0;

pub fn tent_region(t: &TentSpec) -> Region {
    let mut disks = vec![Disk { center: C64::new(0.0, 0.0), radius: 1.0 }];
    if !t.is_whole_disk() {
        disks.push(Disk { center: t.apex(), radius: t.radius() });
    }
    Region { disks }
}

/// Mean of `σ` over the tent.
pub fn tent_average(spec: &WeightSpec, t: &TentSpec, opts: AngularOptions) -> Result<f64> {
    match *spec {
        WeightSpec::Constant(c) => Ok(c),
        WeightSpec::PairPower { s, .. } if s == 0.0 => Ok(1.0),
        WeightSpec::PairPower { s, w2 } => {
            let integral = tent_region(t).power_integral(w2, s, opts);
            if integral.is_infinite() {
                return Err(Error::NonIntegrable(s));
            }
            Ok(integral / tent_area(t))
        }
        _ => Err(Error::UnsupportedFamily(format!("{spec} is not a weight on the disk"))),
    }
}

/// `avg(σ) · avg(σ^{-1/(p-1)})^{p-1}`, or `+∞` when either average diverges.
pub fn bp_quotient(spec: &WeightSpec, p: f64, t: &TentSpec, opts: AngularOptions) -> Result<f64> {
    let dual = dual_weight(spec, p)?;
    if let WeightSpec::Constant(_) = spec {
        return Ok(1.0);
    }
    let avg = |w: &WeightSpec| match tent_average(w, t, opts) {
        Err(Error::NonIntegrable(_)) => Ok(f64::INFINITY),
        other => other,
    };
    let a = avg(spec)?;
    let b = avg(&dual)?;
    Ok(a * b.powf(p - 1.0))
}

/// Finite stand-in for the sup over all tents.
#[derive(Clone, Debug, PartialEq)]
pub struct TentGrid {
    pub tents: Vec<TentSpec>,
    pub level: usize,
    pub r_min: f64,
    pub w2: C64,
}

impl TentGrid {
    /// `level` radii per octave from `1` down to `r_min`, `8·level` uniform
    /// phases per radius, and for each radius a fan of apexes within `3R`
    /// of the boundary point nearest `w2`.
    pub fn build(w2: C64, r_min: f64, level: usize) -> Result<Self> {
        if level == 0 || !(r_min > 0.0 && r_min < 1.0) {
            return Err(Error::Config(format!("tent grid needs level ≥ 1 and 0 < r_min < 1, got {level}, {r_min}")));
        }
        let lf = level as f64;
        let mut radii = Vec::new();
        let mut j = 1;
        loop {
            let r = 2f64.powf(-(j as f64) / lf);
            if r < r_min {
                break;
            }
            radii.push(r);
            j += 1;
        }
        if radii.last().is_none_or(|&r| r > r_min * 1.000001) {
            radii.push(r_min);
        }
        let target = if w2.norm() > 0.0 { w2.arg() } else { 0.0 };
        let phases = 8 * level;
        let fan = 3 * level as i64;
        let mut tents = vec![TentSpec { z: C64::new(0.0, 0.0) }];
        for &r in &radii {
            for k in 0..phases {
                tents.push(TentSpec::from_apex(TAU * k as f64 / phases as f64, r));
            }
            for m in -fan..=fan {
                tents.push(TentSpec::from_apex(target + r * m as f64 / lf, r));
            }
        }
        Ok(Self { tents, level, r_min, w2 })
    }

    pub fn len(&self) -> usize {
        self.tents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tents.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BpEstimate {
    pub value: f64,
    pub argmax: TentSpec,
    pub argmax_index: usize,
    pub n_tents: usize,
    pub level: usize,
    /// `(level, value)` for every grid evaluated so far.
    pub history: Vec<(usize, f64)>,
}

impl BpEstimate {
    /// Relative change between the last two refinement levels.
    pub fn refinement_change(&self) -> Option<f64> {
        let n = self.history.len();
        (n >= 2).then(|| {
            let (a, b) = (self.history[n - 2].1, self.history[n - 1].1);
            ((b - a) / a).abs()
        })
    }
}

fn argmax(values: &[f64]) -> (usize, f64) {
    // first index wins ties; +∞ beats everything
    let mut best = (0, values[0]);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Candidates taken from the grid into the local search.
pub const POLISH_CANDIDATES: usize = 4;

/// Max of the quotient over the grid, followed by a compass search in
/// `(arg apex, ln R)` from the best grid tents.
pub fn bp_constant(spec: &WeightSpec, p: f64, grid: &TentGrid, opts: AngularOptions) -> Result<BpEstimate> {
    if grid.is_empty() {
        return Err(Error::Config("empty tent grid".into()));
    }
    let values: Vec<f64> = grid
        .tents
        .par_iter()
        .map(|t| bp_quotient(spec, p, t, opts))
        .collect::<Result<_>>()?;
    let (i, v) = argmax(&values);
    let mut best = (grid.tents[i], v);
    if v.is_finite() && !matches!(spec, WeightSpec::Constant(_)) {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|a, b| values[*b].total_cmp(&values[*a]).then(a.cmp(b)));
        let polished: Vec<(TentSpec, f64)> = order
            .iter()
            .take(POLISH_CANDIDATES)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&&k| polish(spec, p, grid, grid.tents[k], values[k], opts))
            .collect::<Result<_>>()?;
        for (t, q) in polished {
            if q > best.1 {
                best = (t, q);
            }
        }
    }
    Ok(BpEstimate {
        value: best.1,
        argmax: best.0,
        argmax_index: i,
        n_tents: grid.len(),
        level: grid.level,
        history: vec![(grid.level, best.1)],
    })
}

fn polish(spec: &WeightSpec, p: f64, grid: &TentGrid, start: TentSpec, q0: f64, opts: AngularOptions) -> Result<(TentSpec, f64)> {
    let lf = grid.level as f64;
    let u_min = grid.r_min.ln();
    let at = |theta: f64, u: f64| TentSpec::from_apex(theta, u.clamp(u_min, 0.0).exp());
    let mut theta = if start.is_whole_disk() { 0.0 } else { start.z.arg() };
    let mut u = start.radius().ln();
    let mut best = q0;
    let mut h_u = std::f64::consts::LN_2 / lf;
    let mut h_t = u.exp() / lf;
    while h_u > 1e-6 {
        let mut moved = false;
        for (dt, du) in [(h_t, 0.0), (-h_t, 0.0), (0.0, h_u), (0.0, -h_u)] {
            let (nt, nu) = (theta + dt, (u + du).clamp(u_min, 0.0));
            if nu == u && dt == 0.0 {
                continue;
            }
            let q = bp_quotient(spec, p, &at(nt, nu), opts)?;
            if q > best {
                (theta, u, best) = (nt, nu, q);
                moved = true;
                break;
            }
        }
        if !moved {
            h_u *= 0.5;
            h_t *= 0.5;
        }
    }
    Ok((at(theta, u), best))
}

/// `bp_constant` on successively finer grids; the last grid's estimate
/// carries the whole history.
pub fn bp_refined(
    spec: &WeightSpec,
    p: f64,
    w2: C64,
    r_min: f64,
    levels: &[usize],
    opts: AngularOptions,
) -> Result<BpEstimate> {
    let mut history = Vec::new();
    let mut last = None;
    for &level in levels {
        let grid = TentGrid::build(w2, r_min, level)?;
        let est = bp_constant(spec, p, &grid, opts)?;
        history.push((level, est.value));
        last = Some(est);
    }
    let mut est = last.ok_or_else(|| Error::Config("no refinement levels".into()))?;
    est.history = history;
    Ok(est)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Far,
    NearSmall,
    NearLarge,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Far => "far",
            Self::NearSmall => "near_small",
            Self::NearLarge => "near_large",
        })
    }
}

pub fn regime_classify(t: &TentSpec, w2: C64, delta0: f64) -> Regime {
    let r = t.radius();
    if (w2 - t.apex()).norm() >= 10.0 * r {
        Regime::Far
    } else if r < delta0 {
        Regime::NearSmall
    } else {
        Regime::NearLarge
    }
}

/// Closed-form ceiling of the quotient in each regime, for `|w - w2|^s` with
/// `s = 2` or `s = 2 - p`.
pub fn regime_bound(spec: &WeightSpec, p: f64, regime: Regime, delta0: f64) -> Result<f64> {
    let WeightSpec::PairPower { s, .. } = *spec else {
        return Err(Error::UnsupportedFamily(format!("no regime bound for {spec}")));
    };
    if p <= 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    if s != 2.0 && (s - (2.0 - p)).abs() > 1e-12 {
        return Err(Error::UnsupportedFamily(format!("no regime bound for exponent {s} at p = {p}")));
    }
    let d = -s / (p - 1.0);
    // ∫_{D(w2, ρ)} |w - w2|^e dA = 2π ρ^{e+2} / (e + 2), divided by a lower
    // bound for the tent area
    let ball = |e: f64, rho: f64, area: f64| {
        if e + 2.0 <= 0.0 {
            f64::INFINITY
        } else {
            TAU * rho.powf(e + 2.0) / ((e + 2.0) * area)
        }
    };
    Ok(match regime {
        Regime::Far => (11.0f64 / 9.0).powf(s.abs()),
        Regime::NearSmall => {
            let c1 = lens_ratio_floor();
            ball(s, 20.0, c1) * ball(d, 20.0, c1).powf(p - 1.0)
        }
        Regime::NearLarge => {
            let c = lens_area(delta0);
            ball(s, 2.0, c) * ball(d, 2.0, c).powf(p - 1.0)
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TentRow {
    pub tent: TentSpec,
    pub regime: Regime,
    pub avg_sigma: f64,
    pub avg_dual: f64,
    pub quotient: f64,
    pub bound: Option<f64>,
}

/// Every tent of the grid with its averages, regime and ceiling.
pub fn sweep_tents(spec: &WeightSpec, p: f64, grid: &TentGrid, delta0: f64, opts: AngularOptions) -> Result<Vec<TentRow>> {
    let dual = dual_weight(spec, p)?;
    let w2 = match *spec {
        WeightSpec::PairPower { w2, .. } => w2,
        _ => grid.w2,
    };
    grid.tents
        .par_iter()
        .map(|t| {
            let avg = |w: &WeightSpec| match tent_average(w, t, opts) {
                Err(Error::NonIntegrable(_)) => Ok(f64::INFINITY),
                other => other,
            };
            let avg_sigma = avg(spec)?;
            let avg_dual = avg(&dual)?;
            let quotient = bp_quotient(spec, p, t, opts)?;
            let regime = regime_classify(t, w2, delta0);
            Ok(TentRow {
                tent: *t,
                regime,
                avg_sigma,
                avg_dual,
                quotient,
                bound: regime_bound(spec, p, regime, delta0).ok(),
            })
        })
        .collect()
}

pub const LADDER_GAPS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

#[derive(Clone, Debug, PartialEq)]
pub struct LadderRung {
    pub gap: f64,
    /// Quotient on the tent whose boundary passes at distance `gap` short of `w2`.
    pub outside: f64,
    pub running_max: f64,
    /// Quotient on the tent reaching `gap` beyond `w2`.
    pub inside: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ladder {
    pub w2: C64,
    pub rungs: Vec<LadderRung>,
}

impl Ladder {
    /// End-to-end growth of the running max over the excluding tents.
    pub fn growth(&self) -> f64 {
        match (self.rungs.first(), self.rungs.last()) {
            (Some(a), Some(b)) => b.running_max / a.running_max,
            _ => 1.0,
        }
    }

    pub fn any_infinite(&self) -> bool {
        self.rungs.iter().any(|r| r.inside.is_infinite() || r.outside.is_infinite())
    }
}

/// Tents with apex at the boundary point nearest `w2`, closing in on `w2`.
pub fn approach_ladder(spec: &WeightSpec, p: f64, gaps: &[f64], opts: AngularOptions) -> Result<Ladder> {
    let WeightSpec::PairPower { w2, .. } = *spec else {
        return Err(Error::UnsupportedFamily(format!("approach ladder needs a pair power, got {spec}")));
    };
    let eps = 1.0 - w2.norm();
    let theta = if w2.norm() > 0.0 { w2.arg() } else { 0.0 };
    let mut rungs = Vec::with_capacity(gaps.len());
    let mut running: f64 = 0.0;
    for &gap in gaps {
        if !(gap > 0.0 && gap < eps) {
            return Err(Error::Config(format!("ladder gap {gap} must lie in (0, {eps})")));
        }
        let outside = bp_quotient(spec, p, &TentSpec::from_apex(theta, eps - gap), opts)?;
        let r_in = (eps + gap).min(1.0);
        let inside = bp_quotient(spec, p, &TentSpec::from_apex(theta, r_in), opts)?;
        running = running.max(outside);
        rungs.push(LadderRung { gap, outside, running_max: running, inside });
    }
    Ok(Ladder { w2, rungs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    Diverging,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Bounded => "bounded",
            Self::Diverging => "diverging",
        })
    }
}

pub fn verdict(estimate: &BpEstimate, ladder: &Ladder) -> Verdict {
    if estimate.value.is_infinite() || ladder.any_infinite() || ladder.growth() >= DIVERGENCE_GROWTH {
        Verdict::Diverging
    } else {
        Verdict::Bounded
    }
}

/// Mean of `|w - w2|^s` over the tent by brute-force polar sampling of the
/// tent indicator, used as an independent check of the region integrator.
pub fn tent_average_by_indicator(s: f64, w2: C64, t: &TentSpec, n_r: usize, n_theta: usize) -> f64 {
    let (a, r) = (t.apex(), t.radius());
    let whole = t.is_whole_disk();
    let (centre, rho) = if whole { (C64::new(0.0, 0.0), 1.0) } else { (a, r) };
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n_r {
        let t_r = rho * (i as f64 + 0.5) / n_r as f64;
        for k in 0..n_theta {
            let th = TAU * (k as f64 + 0.5) / n_theta as f64;
            let w = centre + C64::from_polar(t_r, th);
            if w.norm() < 1.0 {
                num += t_r * (w - w2).norm().powf(s);
                den += t_r;
            }
        }
    }
    num / den
}
