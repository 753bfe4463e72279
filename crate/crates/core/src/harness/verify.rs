//! Registry of module invariants run by `verify`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symbidisk_symbolic::expansion::{compose_with_dz, RationalFn};
use symbidisk_symbolic::poly::{int, pullback_holomorphic};
use symbidisk_symbolic::{
    apply_expansion, direct_dz, dwbar_expansion, dz_expansion, lemma32_report, stirling_identity_check, BivarPoly,
};

use super::commands::{bell_rows, bb_sweep, round4, tent_area_table, TENT_FLOOR_LITERAL, TENT_LADDER};
use super::{ExperimentConfig, ReportEntry, PROVENANCE_COLUMNS};
use crate::bekolle_bonami::{
    approach_ladder, bp_constant, bp_quotient, regime_bound, regime_classify, sweep_tents, tent_average, TentGrid,
    LADDER_GAPS,
};
use crate::domain::{
    in_g, jacobian, phi, phi_preimage, delta_weight, tent_area, tent_area_by_indicator, BidiskPoint, TentSpec,
};
use crate::error::{Error, Result};
use crate::kernels::{
    disk_kernel, g_kernel, g_kernel_covering, kernel_eta_bar_derivative, kernel_w_derivative, partial_kernel,
    partial_kernel_series, KernelConvention, G_PREFACTOR_AS_STATED,
};
use crate::operators::{
    opnorm_lower_bound, project_disk, projection_series, sample_image, OpNormRules, ProjectionDomain, ProjectionOp,
    TestFamily,
};
use crate::quadrature::{
    build_polar_rule, integrate_singular_with, monte_carlo, GridFunction, McRegion, SingularOptions,
};
use crate::region::AngularOptions;
use crate::weights::{dual_weight, WeightSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Outcome {
    /// `value ≤ tolerance`.
    pub fn at_most(value: f64, tolerance: f64) -> Self {
        Self { passed: value <= tolerance, value, tolerance }
    }

    /// `value ≥ tolerance`.
    pub fn at_least(value: f64, tolerance: f64) -> Self {
        Self { passed: value >= tolerance, value, tolerance }
    }

    pub fn zero_count(count: usize) -> Self {
        Self::at_most(count as f64, 0.0)
    }
}

pub type CheckFn = fn(&ExperimentConfig) -> Result<Outcome>;

pub struct Invariant {
    pub suite: &'static str,
    pub case: &'static str,
    pub run: CheckFn,
}

pub const INVARIANT_COUNT: usize = 31;
pub const SUITE_COUNTS: [(&str, usize); 8] = [
    ("domain", 5),
    ("kernels", 5),
    ("quadrature", 3),
    ("weights", 2),
    ("bekolle_bonami", 4),
    ("operators", 5),
    ("symbolic", 4),
    ("harness", 3),
];

pub fn registry() -> Vec<Invariant> {
    let inv = |suite, case, run| Invariant { suite, case, run };
    vec![
        inv("domain", "preimage resubstitution", domain_preimage as CheckFn),
        inv("domain", "image of the bidisk lies in G", domain_membership),
        inv("domain", "exp(-delta) equals |J|^2", domain_delta),
        inv("domain", "tent indicator area matches closed form", domain_tent_indicator),
        inv("domain", "tent area envelope over R ladder", domain_tent_envelope),
        inv("kernels", "reproducing property on monomials", kernels_reproducing),
        inv("kernels", "G kernel independent of root order", kernels_root_order),
        inv("kernels", "partial kernel closed form vs series", kernels_partial),
        inv("kernels", "derivative transfer identity", kernels_transfer),
        inv("kernels", "hermitian symmetry", kernels_hermitian),
        inv("quadrature", "polar rule exactness degree", quadrature_exactness),
        inv("quadrature", "singular rule split convergence", quadrature_singular),
        inv("quadrature", "monte carlo error scaling", quadrature_mc_scaling),
        inv("weights", "dual weight involution on tents", weights_dual),
        inv("weights", "integrability gate", weights_gate),
        inv("bekolle_bonami", "tent quotients within regime bounds", bb_bounds),
        inv("bekolle_bonami", "uniformity across w2", bb_uniformity),
        inv("bekolle_bonami", "divergence outside the range", bb_divergence),
        inv("bekolle_bonami", "jensen floor", bb_jensen),
        inv("operators", "idempotence", ops_idempotence),
        inv("operators", "bell formula vs monte carlo", ops_bell),
        inv("operators", "monotone in the test family", ops_monotone),
        inv("operators", "projection norm below positive operator norm", ops_ordering),
        inv("operators", "pointwise domination by the positive operator", ops_pointwise),
        inv("symbolic", "z-derivative expansions up to order 3", sym_expansion),
        inv("symbolic", "degree bounds", sym_degrees),
        inv("symbolic", "chain rule round trip", sym_round_trip),
        inv("symbolic", "stirling identity and tangential mismatch", sym_stirling),
        inv("harness", "deterministic output", harness_determinism),
        inv("harness", "rows carry provenance", harness_provenance),
        inv("harness", "registry covers every invariant", harness_registry),
    ]
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub entries: Vec<ReportEntry>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed())
    }

    pub fn first_failure(&self) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| !e.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("report serializes")
    }
}

/// Runs the registry, or the invariants of the named suites.
pub fn run_verify(cfg: &ExperimentConfig, suites: Option<&[&str]>) -> Result<VerifyReport> {
    cfg.validate()?;
    cfg.require_seed()?;
    let mut entries = Vec::new();
    for inv in registry() {
        if suites.is_some_and(|s| !s.contains(&inv.suite)) {
            continue;
        }
        let entry = match (inv.run)(cfg) {
            Ok(o) => ReportEntry {
                suite: inv.suite.into(),
                case: inv.case.into(),
                status: if o.passed { "pass" } else { "fail" }.into(),
                value: Some(o.value),
                tolerance: Some(o.tolerance),
            },
            Err(e) => ReportEntry {
                suite: inv.suite.into(),
                case: format!("{}: {e}", inv.case),
                status: "error".into(),
                value: None,
                tolerance: None,
            },
        };
        entries.push(entry);
    }
    Ok(VerifyReport { entries })
}

fn rng(cfg: &ExperimentConfig, salt: u64) -> Result<ChaCha8Rng> {
    Ok(ChaCha8Rng::seed_from_u64(cfg.require_seed()? ^ salt))
}

fn disk_point(rng: &mut ChaCha8Rng, r_max: f64) -> C64 {
    C64::from_polar(r_max * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>())
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn domain_preimage(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 1)?;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let z1 = C64::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let z2 = C64::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let (a, b) = phi_preimage(z1, z2);
        let scale = 1.0 + z1.norm() + z2.norm().sqrt();
        worst = worst.max((a + b - z1).norm() / scale).max((a * b - z2).norm() / (scale * scale));
    }
    Ok(Outcome::at_most(worst, 1e-12))
}

fn domain_membership(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 2)?;
    let edge = 1.0 - 1e-9;
    let mut misses = 0;
    for i in 0..10_000 {
        let (a, b) = if i % 4 == 0 {
            (C64::from_polar(edge, r.random::<f64>() * 2.0 * PI), C64::from_polar(edge, r.random::<f64>() * 2.0 * PI))
        } else {
            (disk_point(&mut r, edge), disk_point(&mut r, edge))
        };
        let z = phi(BidiskPoint::new(a, b).ok_or_else(|| Error::Config("sample left the bidisk".into()))?);
        if !in_g(z.z1, z.z2) {
            misses += 1;
        }
    }
    Ok(Outcome::zero_count(misses))
}

fn domain_delta(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 3)?;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = BidiskPoint::new(disk_point(&mut r, 1.0), disk_point(&mut r, 1.0)).expect("inside");
        let j2 = jacobian(p).norm_sqr();
        if j2 == 0.0 {
            continue;
        }
        let d = delta_weight(phi(p))?;
        worst = worst.max(((-d).exp() - j2).abs() / j2);
    }
    Ok(Outcome::at_most(worst, 1e-12))
}

fn domain_tent_indicator(_: &ExperimentConfig) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for r in [1.0, 0.5, 0.1, 0.01] {
        let t = TentSpec::from_apex(1.1, r);
        worst = worst.max((tent_area_by_indicator(&t, 512, 1024) / tent_area(&t) - 1.0).abs());
    }
    Ok(Outcome::at_most(worst, 0.01))
}

fn domain_tent_envelope(_: &ExperimentConfig) -> Result<Outcome> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for r in TENT_LADDER {
        let q = tent_area(&TentSpec::from_apex(0.4, r)) / (r * r);
        lo = lo.min(round4(q));
        hi = hi.max(q);
    }
    Ok(Outcome {
        passed: lo >= TENT_FLOOR_LITERAL && hi <= PI,
        value: lo,
        tolerance: TENT_FLOOR_LITERAL,
    })
}

fn probe_points() -> Vec<C64> {
    let mut out = Vec::new();
    for r in [0.2, 0.5, 0.8] {
        for k in 0..4 {
            out.push(C64::from_polar(r, 0.3 + k as f64 * PI / 2.0));
        }
    }
    out
}

fn kernels_reproducing(cfg: &ExperimentConfig) -> Result<Outcome> {
    let rule = build_polar_rule(cfg.quad[0], cfg.quad[1])?;
    let mut worst: f64 = 0.0;
    for k in 0..=10u32 {
        let op = project_disk(&rule, &GridFunction::sample(&rule, |e| e.powu(k)), false)?;
        for w in probe_points() {
            worst = worst.max(rel(op.eval(w), w.powu(k)));
        }
    }
    Ok(Outcome::at_most(worst, 1e-6))
}

fn kernels_root_order(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 4)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b, c, d) = (disk_point(&mut r, 0.95), disk_point(&mut r, 0.95), disk_point(&mut r, 0.95), disk_point(&mut r, 0.95));
        let base = g_kernel_covering((a, b), (c, d), G_PREFACTOR_AS_STATED);
        for other in [
            g_kernel_covering((b, a), (c, d), G_PREFACTOR_AS_STATED),
            g_kernel_covering((a, b), (d, c), G_PREFACTOR_AS_STATED),
            g_kernel_covering((b, a), (d, c), G_PREFACTOR_AS_STATED),
        ] {
            worst = worst.max(rel(base, other));
        }
    }
    Ok(Outcome::at_most(worst, 1e-12))
}

fn kernels_partial(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 5)?;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (w, e) = (disk_point(&mut r, 0.9), disk_point(&mut r, 0.9));
        for beta in 0..=5 {
            worst = worst.max((partial_kernel(beta, w, e) - partial_kernel_series(beta, w, e)).norm());
        }
    }
    Ok(Outcome::at_most(worst, 1e-10))
}

fn kernels_transfer(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 6)?;
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 100 {
        let (w, e) = (disk_point(&mut r, 1.0), disk_point(&mut r, 1.0));
        if w.norm() < 0.05 {
            continue;
        }
        n += 1;
        for beta in 0..=3 {
            let lhs = kernel_w_derivative(beta, w, e);
            let rhs = (e.conj() / w).powu(beta) * kernel_eta_bar_derivative(beta, w, e);
            worst = worst.max(rel(lhs, rhs));
        }
    }
    Ok(Outcome::at_most(worst, 1e-8))
}

fn kernels_hermitian(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 7)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (w, e) = (disk_point(&mut r, 0.95), disk_point(&mut r, 0.95));
        for c in [KernelConvention::NORMALIZED, KernelConvention::BARE] {
            worst = worst.max(rel(disk_kernel(w, e, c), disk_kernel(e, w, c).conj()));
        }
        let z = phi(BidiskPoint::new(disk_point(&mut r, 0.95), disk_point(&mut r, 0.95)).expect("inside"));
        let zeta = phi(BidiskPoint::new(disk_point(&mut r, 0.95), disk_point(&mut r, 0.95)).expect("inside"));
        worst = worst.max(rel(g_kernel(z, zeta), g_kernel(zeta, z).conj()));
    }
    Ok(Outcome::at_most(worst, 1e-12))
}

fn quadrature_exactness(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (n_r, n_t) = (cfg.quad[0], cfg.quad[1]);
    let rule = build_polar_rule(n_r, n_t)?;
    let top = (2 * n_r - 2).min(n_t / 2 - 1) as u32;
    let mut worst: f64 = 0.0;
    let mut pa: Vec<C64> = vec![C64::new(1.0, 0.0); rule.len()];
    for a in 0..=top {
        let mut pb: Vec<C64> = pa.clone();
        for b in 0..=top {
            let got: C64 = pb.iter().zip(&rule.weights).map(|(v, w)| v * *w).sum();
            let exact = if a == b { PI / (a as f64 + 1.0) } else { 0.0 };
            let scale = PI / (a.max(b) as f64 + 1.0);
            worst = worst.max((got - exact).norm() / scale);
            for (v, x) in pb.iter_mut().zip(&rule.nodes) {
                *v *= x.conj();
            }
        }
        for (v, x) in pa.iter_mut().zip(&rule.nodes) {
            *v *= x;
        }
    }
    Ok(Outcome::at_most(worst, 1e-10))
}

fn quadrature_singular(cfg: &ExperimentConfig) -> Result<Outcome> {
    let rule = build_polar_rule(cfg.quad[0], cfg.quad[1])?;
    let base = SingularOptions::from_rule(&rule);
    let half = SingularOptions { split: base.split / 2.0, ..base };
    let one = |_: C64| C64::new(1.0, 0.0);
    let mut worst: f64 = 0.0;
    for w2 in [C64::new(0.0, 0.0), C64::new(0.5, 0.2)] {
        let a = integrate_singular_with(base, -1.0, w2, one)?.re;
        let b = integrate_singular_with(half, -1.0, w2, one)?.re;
        worst = worst.max((a - b).abs() / a.abs());
    }
    let at_origin = integrate_singular_with(base, -1.0, C64::new(0.0, 0.0), one)?.re;
    worst = worst.max((at_origin / (2.0 * PI) - 1.0).abs());
    Ok(Outcome::at_most(worst, 1e-4))
}

fn quadrature_mc_scaling(cfg: &ExperimentConfig) -> Result<Outcome> {
    let seed = cfg.require_seed()?;
    let se: Vec<f64> = [10_000usize, 100_000, 1_000_000]
        .iter()
        .map(|n| monte_carlo(McRegion::Disk, *n, seed, |x| C64::new(x[0].norm_sqr(), 0.0)).map(|e| e.std_error))
        .collect::<Result<_>>()?;
    let target = 10f64.sqrt();
    let worst = se.windows(2).map(|w| ((w[0] / w[1]) / target - 1.0).abs()).fold(0.0, f64::max);
    Ok(Outcome::at_most(worst, 0.1))
}

fn weights_dual(_: &ExperimentConfig) -> Result<Outcome> {
    let opts = AngularOptions::default();
    let w2 = C64::new(0.5, 0.0);
    let spec = WeightSpec::PairPower { s: 2.0, w2 };
    let (p, q) = (3.0, 1.5);
    let dual = dual_weight(&spec, p)?;
    let grid = TentGrid::build(w2, 1e-3, 2)?;
    let mut worst: f64 = 0.0;
    for t in &grid.tents {
        let a = bp_quotient(&spec, p, t, opts)?;
        let b = bp_quotient(&dual, q, t, opts)?.powf(p - 1.0);
        worst = worst.max((a - b).abs() / a);
    }
    Ok(Outcome::at_most(worst, 1e-6))
}

fn weights_gate(_: &ExperimentConfig) -> Result<Outcome> {
    let opts = AngularOptions::default();
    let w2 = C64::new(0.5, 0.0);
    let whole = TentSpec { z: C64::new(0.0, 0.0) };
    let mut mismatches = 0;
    for s in [-2.5, -2.0, -1.99, -1.0] {
        let r = tent_average(&WeightSpec::PairPower { s, w2 }, &whole, opts);
        let finite = matches!(r, Ok(v) if v.is_finite());
        if finite != (s > -2.0) {
            mismatches += 1;
        }
    }
    for i in 0..=100 {
        let p = 1.05 + 0.05 * i as f64;
        if (p - 4.0 / 3.0).abs() < 1e-9 {
            continue;
        }
        let WeightSpec::PairPower { s, .. } = dual_weight(&WeightSpec::PairPower { s: 2.0 - p, w2 }, p)? else {
            unreachable!()
        };
        if (s > -2.0) != (p > 4.0 / 3.0) {
            mismatches += 1;
        }
    }
    Ok(Outcome::zero_count(mismatches))
}

/// Proved-range cells checked against regime bounds.
pub fn bound_cells() -> Vec<(WeightSpec, f64)> {
    let mut out = Vec::new();
    for r in [0.0, 0.5, 0.9, 0.99] {
        out.push((WeightSpec::PairPower { s: 2.0, w2: C64::new(r, 0.0) }, 3.0));
    }
    for p in [1.5, 2.0, 3.0, 3.9] {
        out.push((WeightSpec::PairPower { s: 2.0 - p, w2: C64::new(0.5, 0.0) }, p));
    }
    out
}

fn bb_bounds(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = AngularOptions::default();
    let mut worst: f64 = 0.0;
    for (spec, p) in bound_cells() {
        let WeightSpec::PairPower { w2, .. } = spec else { unreachable!() };
        let grid = TentGrid::build(w2, cfg.r_min, cfg.grid_level)?;
        for row in sweep_tents(&spec, p, &grid, cfg.delta0, opts)? {
            let b = row.bound.ok_or_else(|| Error::Config(format!("no regime bound for {spec}")))?;
            worst = worst.max(row.quotient / b);
        }
        let est = bp_constant(&spec, p, &grid, opts)?;
        let b = regime_bound(&spec, p, regime_classify(&est.argmax, w2, cfg.delta0), cfg.delta0)?;
        worst = worst.max(est.value / b);
    }
    Ok(Outcome::at_most(worst, 1.05))
}

pub fn uniformity_points() -> Vec<C64> {
    let mut out = Vec::new();
    for r in [0.0, 0.5, 0.9, 0.99] {
        for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::from_polar(1.0, PI / 4.0)] {
            if r == 0.0 && !out.is_empty() {
                continue;
            }
            out.push(dir * r);
        }
    }
    out
}

fn bb_uniformity(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = AngularOptions::default();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for w2 in uniformity_points() {
        let grid = TentGrid::build(w2, cfg.r_min, cfg.grid_level)?;
        let v = bp_constant(&WeightSpec::PairPower { s: 2.0, w2 }, 3.0, &grid, opts)?.value;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(Outcome::at_most(hi / lo - 1.0, 0.1))
}

fn bb_divergence(_: &ExperimentConfig) -> Result<Outcome> {
    let opts = AngularOptions::default();
    let w2 = C64::new(0.5, 0.0);
    let mut weakest = f64::INFINITY;
    for (spec, p) in [
        (WeightSpec::PairPower { s: 2.0, w2 }, 2.0),
        (WeightSpec::PairPower { s: 2.0 - 4.5, w2 }, 4.5),
    ] {
        weakest = weakest.min(approach_ladder(&spec, p, &LADDER_GAPS, opts)?.growth());
    }
    Ok(Outcome::at_least(weakest, 10.0))
}

fn bb_jensen(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = AngularOptions::default();
    let w2 = C64::new(0.5, 0.3);
    let grid = TentGrid::build(w2, cfg.r_min, 2)?;
    let mut lowest = f64::INFINITY;
    for (spec, p) in [
        (WeightSpec::PairPower { s: 2.0, w2 }, 3.0),
        (WeightSpec::PairPower { s: -1.0, w2 }, 3.0),
        (WeightSpec::PairPower { s: 0.5, w2 }, 1.5),
        (WeightSpec::PairPower { s: 2.0, w2 }, 2.0),
        (WeightSpec::Constant(2.0), 3.0),
    ] {
        for t in &grid.tents {
            lowest = lowest.min(bp_quotient(&spec, p, t, opts)?);
        }
    }
    Ok(Outcome::at_least(lowest, 1.0 - 1e-12))
}

fn ops_idempotence(cfg: &ExperimentConfig) -> Result<Outcome> {
    let rule = build_polar_rule(cfg.quad[0], cfg.quad[1])?;
    let f = GridFunction::sample(&rule, |e| e.conj() * e * e);
    let once = projection_series(&rule, &f)?;
    let twice = project_disk(&rule, &GridFunction::sample(&rule, |w| once.eval(w)), false)?;
    let first = project_disk(&rule, &f, false)?;
    let worst = probe_points()
        .into_iter()
        .map(|w| rel(twice.eval(w), first.eval(w)))
        .fold(0.0, f64::max);
    Ok(Outcome::at_most(worst, 1e-6))
}

fn ops_bell(cfg: &ExperimentConfig) -> Result<Outcome> {
    let rows = bell_rows(cfg)?;
    let row = rows
        .iter()
        .find(|r| r.name == "|z1|^2")
        .ok_or_else(|| Error::Config("missing bell case".into()))?;
    Ok(Outcome::at_most(row.max_se_units, 3.0))
}

fn positive_setup(cfg: &ExperimentConfig) -> Result<(OpNormRules, ProjectionOp, ProjectionOp, TestFamily)> {
    let rules = OpNormRules::new(cfg.quad[0], cfg.quad[1])?;
    let b = ProjectionOp::new(ProjectionDomain::Disk, false, rules.source.clone());
    let bp = ProjectionOp::new(ProjectionDomain::Disk, true, rules.positive_source.clone());
    let family = TestFamily::standard(cfg.family_version, cfg.require_seed()?)?;
    Ok((rules, b, bp, family))
}

fn ops_monotone(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (rules, _, bp, family) = positive_setup(cfg)?;
    let spec = WeightSpec::PairPower { s: 2.0, w2: C64::new(0.5, 0.0) };
    let mut prev = f64::NEG_INFINITY;
    let mut worst_drop: f64 = 0.0;
    for n in [8, 24, 31, family.members.len()] {
        let v = opnorm_lower_bound(&bp, 3.0, &spec, &family.prefix(n), &rules)?.value;
        worst_drop = worst_drop.max(prev - v);
        prev = v;
    }
    Ok(Outcome::at_most(worst_drop, 0.0))
}

fn ops_ordering(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (rules, b, bp, family) = positive_setup(cfg)?;
    let spec = WeightSpec::PairPower { s: 2.0, w2: C64::new(0.5, 0.0) };
    let nb = opnorm_lower_bound(&b, 3.0, &spec, &family, &rules)?.value;
    let np = opnorm_lower_bound(&bp, 3.0, &spec, &family, &rules)?.value;
    let ratio = nb / np;
    Ok(Outcome {
        passed: nb.is_finite() && np.is_finite() && ratio <= 1.0,
        value: ratio,
        tolerance: 1.0,
    })
}

fn ops_pointwise(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (rules, b, bp, family) = positive_setup(cfg)?;
    let mut worst = f64::NEG_INFINITY;
    for f in &family.members {
        let plain = sample_image(&b, f, &rules)?;
        let positive = sample_image(&bp, f, &rules)?;
        for (x, y) in plain.output.iter().zip(&positive.output) {
            worst = worst.max((x - y) / y.max(1e-300));
        }
    }
    Ok(Outcome::at_most(worst, 1e-6))
}

fn z_monomial(a: u32, b: u32) -> BivarPoly {
    BivarPoly::monomial([a, b], int(1))
}

fn sym_expansion(_: &ExperimentConfig) -> Result<Outcome> {
    let mut mismatches = 0;
    for order in 1..=3u32 {
        for a0 in 0..=order {
            let alpha = [a0, order - a0];
            let e = dz_expansion(alpha)?;
            for deg in 0..=4u32 {
                for a in 0..=deg {
                    let f = z_monomial(a, deg - a);
                    if apply_expansion(&e, &f) != RationalFn::polynomial(direct_dz(alpha, &f)) {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    Ok(Outcome::zero_count(mismatches))
}

fn sym_degrees(_: &ExperimentConfig) -> Result<Outcome> {
    let mut violations = 0;
    for order in 1..=3u32 {
        for a0 in 0..=order {
            let e = dz_expansion([a0, order - a0])?;
            violations += e.terms.values().filter(|p| p.degree().unwrap_or(0) > 2 * order - 1).count();
        }
    }
    for a in 0..=3u32 {
        for b in 0..=(3 - a) {
            for c in 0..=(3 - a - b) {
                for d in 0..=(3 - a - b - c) {
                    let beta = [a, b, c, d];
                    let total = a + b + c + d;
                    violations += dwbar_expansion(beta).terms.values().filter(|p| p.degree().unwrap_or(0) > total).count();
                }
            }
        }
    }
    Ok(Outcome::zero_count(violations))
}

fn sym_round_trip(_: &ExperimentConfig) -> Result<Outcome> {
    let tests = [z_monomial(3, 1), z_monomial(0, 4), &z_monomial(2, 0) + &z_monomial(1, 2), z_monomial(1, 0)];
    let e = dwbar_expansion([1, 0, 0, 0]);
    let mut mismatches = 0;
    for f in &tests {
        let pulled = pullback_holomorphic(f);
        if compose_with_dz(&e, &pulled)? != RationalFn::polynomial(pulled.derivative(0)) {
            mismatches += 1;
        }
    }
    Ok(Outcome::zero_count(mismatches))
}

fn sym_stirling(_: &ExperimentConfig) -> Result<Outcome> {
    let stirling = stirling_identity_check(5, 10);
    let rows = lemma32_report(2, 2);
    let row = rows.iter().find(|r| r.m == 1 && r.beta == 1).expect("row (1,1)");
    let mismatch = !row.equal && row.lhs == int(1) && row.rhs == int(-1);
    Ok(Outcome {
        passed: stirling && mismatch,
        value: (stirling as u8 + mismatch as u8) as f64,
        tolerance: 2.0,
    })
}

fn small_config(cfg: &ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig {
        weight: Some("pair_power:2:0.5:0".into()),
        p: vec![3.0],
        w2: vec![[0.5, 0.0]],
        r_min: 1e-2,
        refine_levels: vec![1, 2],
        ..cfg.clone()
    }
}

fn harness_determinism(cfg: &ExperimentConfig) -> Result<Outcome> {
    let small = small_config(cfg);
    let a = bb_sweep(&small)?.table.render() + &tent_area_table(&small)?.table.render();
    let b = bb_sweep(&small)?.table.render() + &tent_area_table(&small)?.table.render();
    Ok(Outcome::zero_count(usize::from(a != b)))
}

fn harness_provenance(cfg: &ExperimentConfig) -> Result<Outcome> {
    let small = small_config(cfg);
    let p = small.provenance();
    let want = [
        p.config_hash.clone(),
        p.seed.map(|s| s.to_string()).unwrap_or_default(),
        p.n_r.to_string(),
        p.n_theta.to_string(),
    ];
    let mut bad = 0;
    for table in [bb_sweep(&small)?.table, tent_area_table(&small)?.table] {
        let n = table.header.len();
        if table.header[n - 4..] != PROVENANCE_COLUMNS.map(String::from) {
            bad += 1;
        }
        bad += table.rows.iter().filter(|r| r[n - 4..] != want).count();
    }
    Ok(Outcome::zero_count(bad))
}

fn harness_registry(_: &ExperimentConfig) -> Result<Outcome> {
    let reg = registry();
    let mut bad = usize::from(reg.len() != INVARIANT_COUNT);
    for (suite, n) in SUITE_COUNTS {
        if reg.iter().filter(|i| i.suite == suite).count() != n {
            bad += 1;
        }
    }
    Ok(Outcome::zero_count(bad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_shape() {
        let reg = registry();
        assert_eq!(reg.len(), INVARIANT_COUNT);
        assert_eq!(SUITE_COUNTS.iter().map(|s| s.1).sum::<usize>(), INVARIANT_COUNT);
        let mut cases: Vec<_> = reg.iter().map(|i| (i.suite, i.case)).collect();
        cases.dedup();
        assert_eq!(cases.len(), INVARIANT_COUNT);
    }

    #[test]
    fn cheap_suites_pass() {
        let cfg = ExperimentConfig {
            quad: [64, 128],
            mc: 10_000,
            ..ExperimentConfig::default()
        };
        let report = run_verify(&cfg, Some(&["domain", "kernels", "symbolic"])).unwrap();
        assert_eq!(report.entries.len(), 14);
        assert!(report.passed(), "{}", report.to_json());
    }

    #[test]
    fn unseeded_config_is_rejected() {
        let cfg = ExperimentConfig { seed: None, ..ExperimentConfig::default() };
        assert_eq!(run_verify(&cfg, Some(&["domain"])).unwrap_err(), Error::SeedRequired);
    }
}
