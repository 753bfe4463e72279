//! Discretized Bergman and positive Bergman operators on the disk, the
//! symmetrized-bidisk projection through the covering, weighted `L^p`
//! norms, and lower bounds for operator norms from test families.
//!
//! On rules laid out in rings about the origin both disk operators are
//! applied through the Fourier modes of each ring:
//! `Bf(w) = (1/π) Σ_j (j+1) w^j ∫ η̄^j f`, and
//! `1/|1 - w η̄|^2 = Σ_k (ρr)^{|k|} e^{ik(φ-θ)} / (1 - ρ²r²)` for the
//! positive kernel.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use symbidisk_symbolic::poly::coeff_to_c64;
use symbidisk_symbolic::{MixedPoly, Poly};

use crate::domain::{phi_preimage, GPoint};
use crate::error::{Error, Result};
use crate::kernels::{disk_kernel, g_kernel_with, KernelConvention};
use crate::quadrature::{
    build_graded_polar_rule, build_polar_rule, integrate_singular_with, monte_carlo_multi, GridFunction, McEstimate,
    McRegion, QuadratureRule, SingularOptions,
};
use crate::region::{AngularOptions, Disk, Region};
use crate::weights::WeightSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionDomain {
    Disk,
    Bidisk,
    G,
}

#[derive(Clone, Debug)]
pub struct ProjectionOp {
    pub domain: ProjectionDomain,
    pub positive: bool,
    pub rule: QuadratureRule,
    pub convention: KernelConvention,
}

impl ProjectionOp {
    pub fn new(domain: ProjectionDomain, positive: bool, rule: QuadratureRule) -> Self {
        Self {
            domain,
            positive,
            rule,
            convention: KernelConvention::NORMALIZED,
        }
    }

    pub fn label(&self) -> &'static str {
        match (self.domain, self.positive) {
            (ProjectionDomain::Disk, false) => "B_D",
            (ProjectionDomain::Disk, true) => "B+_D",
            (ProjectionDomain::Bidisk, _) => "B_DxD",
            (ProjectionDomain::G, _) => "B_G",
        }
    }
}

/// `Σ_i W_i K(w, η_i) f_i`, with `|K|` for the positive operator.
#[derive(Clone, Debug)]
pub struct DirectProjection {
    nodes: Vec<C64>,
    weights: Vec<f64>,
    values: Vec<C64>,
    positive: bool,
}

impl DirectProjection {
    pub fn eval(&self, w: C64) -> C64 {
        let c = KernelConvention::NORMALIZED;
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((eta, wt), v)| {
                let k = disk_kernel(w, *eta, c);
                let k = if self.positive { C64::new(k.norm(), 0.0) } else { k };
                k * v * *wt
            })
            .sum()
    }
}

pub fn project_disk(rule: &QuadratureRule, f: &GridFunction, positive: bool) -> Result<DirectProjection> {
    if f.values.len() != rule.len() {
        return Err(Error::SizeMismatch {
            expected: rule.len(),
            got: f.values.len(),
        });
    }
    Ok(DirectProjection {
        nodes: rule.nodes.clone(),
        weights: rule.weights.clone(),
        values: f.values.clone(),
        positive,
    })
}

/// `Σ_j c_j w^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct HolomorphicSeries {
    pub coeffs: Vec<C64>,
}

impl HolomorphicSeries {
    pub fn eval(&self, w: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * w + c)
    }
}

fn ring_ffts(rule: &QuadratureRule, values: &[C64]) -> Result<Vec<Vec<C64>>> {
    if !rule.is_origin_polar() {
        return Err(Error::InvalidRule("spectral evaluation needs a rule in rings about the origin".into()));
    }
    if values.len() != rule.len() {
        return Err(Error::SizeMismatch {
            expected: rule.len(),
            got: values.len(),
        });
    }
    let n = rule.n_angular;
    let fft = FftPlanner::new().plan_fft_forward(n);
    Ok(values
        .chunks(n)
        .map(|ring| {
            let mut buf = ring.to_vec();
            fft.process(&mut buf);
            buf
        })
        .collect())
}

/// Power series of `Bf`, exact up to the quadrature of each mode
/// `j < n_θ / 2`.
pub fn projection_series(rule: &QuadratureRule, f: &GridFunction) -> Result<HolomorphicSeries> {
    let modes = ring_ffts(rule, &f.values)?;
    let n = rule.n_angular;
    let dtheta = 2.0 * PI / n as f64;
    let j_max = n / 2;
    let mut coeffs = vec![C64::new(0.0, 0.0); j_max];
    for ((r, rw), fr) in rule.radii.iter().zip(&rule.radial_weights).zip(&modes) {
        let mut rj = 1.0;
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c += fr[j] * (rw * dtheta * rj);
            rj *= r;
        }
    }
    for (j, c) in coeffs.iter_mut().enumerate() {
        *c *= (j as f64 + 1.0) / PI;
    }
    Ok(HolomorphicSeries { coeffs })
}

/// `B⁺g` for a real function `g` sampled on a ring rule; `at` evaluates
/// anywhere in the disk and `on_rings` on a ring grid with the same angles.
pub struct PositiveProjection {
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
    n_theta: usize,
    modes: Vec<Vec<C64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl PositiveProjection {
    pub fn new(rule: &QuadratureRule, g: &[f64]) -> Result<Self> {
        let values: Vec<C64> = g.iter().map(|v| C64::new(*v, 0.0)).collect();
        let modes = ring_ffts(rule, &values)?;
        Ok(Self {
            radii: rule.radii.clone(),
            radial_weights: rule.radial_weights.clone(),
            n_theta: rule.n_angular,
            modes,
            inverse: FftPlanner::new().plan_fft_inverse(rule.n_angular),
        })
    }

    /// Fourier coefficients in `φ` of `B⁺g` on the circle `|w| = ρ`,
    /// indexed like an FFT output.
    fn circle_modes(&self, rho: f64) -> Vec<C64> {
        let n = self.n_theta;
        let half = n / 2;
        let dtheta = 2.0 * PI / n as f64;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for ((r, rw), g) in self.radii.iter().zip(&self.radial_weights).zip(&self.modes) {
            let a = rho * r;
            let base = rw * dtheta / (PI * (1.0 - a * a));
            let mut ak = base;
            out[0] += g[0] * ak;
            for k in 1..half {
                ak *= a;
                out[k] += g[k] * ak;
                out[n - k] += g[n - k] * ak;
            }
        }
        out
    }

    pub fn at(&self, w: C64) -> f64 {
        let c = self.circle_modes(w.norm());
        let n = self.n_theta;
        let phi = w.arg();
        let mut acc = c[0];
        for k in 1..n / 2 {
            acc += c[k] * C64::from_polar(1.0, k as f64 * phi) + c[n - k] * C64::from_polar(1.0, -(k as f64) * phi);
        }
        acc.re
    }

    /// Values at the nodes of `eval`, which must share the angular grid.
    pub fn on_rings(&self, eval: &QuadratureRule) -> Result<Vec<f64>> {
        if !eval.is_origin_polar() || eval.n_angular != self.n_theta {
            return Err(Error::InvalidRule(format!(
                "evaluation rule {} does not share the {}-point angular grid",
                eval.size_tag(),
                self.n_theta
            )));
        }
        let rows: Vec<Vec<f64>> = eval
            .radii
            .par_iter()
            .map(|rho| {
                let mut c = self.circle_modes(*rho);
                self.inverse.process(&mut c);
                c.into_iter().map(|v| v.re).collect()
            })
            .collect();
        Ok(rows.concat())
    }
}

fn disk_integral_of_weight(spec: &WeightSpec) -> Result<f64> {
    match *spec {
        WeightSpec::Constant(c) => Ok(c * PI),
        WeightSpec::PairPower { s, w2 } => {
            let v = Region {
                disks: vec![Disk { center: C64::new(0.0, 0.0), radius: 1.0 }],
            }
            .power_integral(w2, s, AngularOptions::default());
            if v.is_infinite() {
                Err(Error::NonIntegrable(s))
            } else {
                Ok(v)
            }
        }
        _ => Err(Error::UnsupportedFamily(format!("{spec} is not a weight on the disk"))),
    }
}

fn check_lp(p: f64) -> Result<()> {
    if p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `(∫ |f|^p σ)^{1/p}`; pair powers use a rule graded onto the singular point.
pub fn weighted_lp_norm(f: impl Fn(C64) -> C64, p: f64, spec: &WeightSpec, rule: &QuadratureRule) -> Result<f64> {
    check_lp(p)?;
    let total = match *spec {
        WeightSpec::Constant(c) => c * rule.nodes.iter().zip(&rule.weights).map(|(w, wt)| f(*w).norm().powf(p) * wt).sum::<f64>(),
        WeightSpec::PairPower { s, w2 } => {
            if s <= -2.0 {
                return Err(Error::NonIntegrable(s));
            }
            if s == 0.0 {
                return weighted_lp_norm(f, p, &WeightSpec::Constant(1.0), rule);
            }
            integrate_singular_with(SingularOptions::from_rule(rule), s, w2, |w| C64::new(f(w).norm().powf(p), 0.0))?.re
        }
        _ => return Err(Error::UnsupportedFamily(format!("{spec} is not a weight on the disk"))),
    };
    Ok(total.powf(1.0 / p))
}

/// Weighted norm of values sampled on `rule`. For negative pair powers the
/// value at the singular point is subtracted and its contribution added back
/// in closed form.
pub fn weighted_lp_norm_sampled(values: &[f64], at_w2: f64, p: f64, spec: &WeightSpec, rule: &QuadratureRule) -> Result<f64> {
    check_lp(p)?;
    if values.len() != rule.len() {
        return Err(Error::SizeMismatch {
            expected: rule.len(),
            got: values.len(),
        });
    }
    let total = match *spec {
        WeightSpec::Constant(c) => c * values.iter().zip(&rule.weights).map(|(v, wt)| v.abs().powf(p) * wt).sum::<f64>(),
        WeightSpec::PairPower { s, w2 } if s >= 0.0 => values
            .iter()
            .zip(&rule.weights)
            .zip(&rule.nodes)
            .map(|((v, wt), w)| v.abs().powf(p) * (w - w2).norm().powf(s) * wt)
            .sum::<f64>(),
        WeightSpec::PairPower { s, w2 } => {
            let base = at_w2.abs().powf(p);
            let smooth: f64 = values
                .iter()
                .zip(&rule.weights)
                .zip(&rule.nodes)
                .map(|((v, wt), w)| (v.abs().powf(p) - base) * (w - w2).norm().powf(s) * wt)
                .sum();
            smooth + base * disk_integral_of_weight(spec)?
        }
        _ => return Err(Error::UnsupportedFamily(format!("{spec} is not a weight on the disk"))),
    };
    Ok(total.max(0.0).powf(1.0 / p))
}

#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// `(1 - conj(a) η)^{-2}`.
    Kernel(C64),
    Monomial(u32),
    /// `Σ c η^a η̄^b`.
    Poly(Vec<(u32, u32, C64)>),
}

impl TestFunction {
    pub fn eval(&self, eta: C64) -> C64 {
        match self {
            Self::Kernel(a) => {
                let d = C64::new(1.0, 0.0) - a.conj() * eta;
                C64::new(1.0, 0.0) / (d * d)
            }
            Self::Monomial(k) => eta.powu(*k),
            Self::Poly(terms) => terms.iter().map(|(a, b, c)| c * eta.powu(*a) * eta.conj().powu(*b)).sum(),
        }
    }

    pub fn id(&self, index: usize) -> String {
        match self {
            Self::Kernel(a) => format!("kernel[{:.3},{:.3}]", a.re, a.im),
            Self::Monomial(k) => format!("eta^{k}"),
            Self::Poly(_) => format!("poly#{index}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestFamily {
    pub version: u32,
    pub seed: u64,
    pub members: Vec<TestFunction>,
}

pub const FAMILY_VERSION: u32 = 1;

impl TestFamily {
    /// Kernels at `|a| ∈ {0.3, 0.6, 0.8}` with 8 phases, monomials up to
    /// degree 6, and 20 random polynomials in `η, η̄` of degree at most 8.
    pub fn standard(version: u32, seed: u64) -> Result<Self> {
        if version != FAMILY_VERSION {
            return Err(Error::Config(format!("unknown test family version {version}")));
        }
        let mut members = Vec::new();
        for m in [0.3, 0.6, 0.8] {
            for k in 0..8 {
                members.push(TestFunction::Kernel(C64::from_polar(m, PI * k as f64 / 4.0)));
            }
        }
        for k in 0..=6 {
            members.push(TestFunction::Monomial(k));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let mut terms = Vec::new();
            for a in 0..=8u32 {
                for b in 0..=(8 - a) {
                    let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    terms.push((a, b, c));
                }
            }
            members.push(TestFunction::Poly(terms));
        }
        Ok(Self { version, seed, members })
    }

    pub fn monomials(max_degree: u32) -> Self {
        Self {
            version: 0,
            seed: 0,
            members: (0..=max_degree).map(TestFunction::Monomial).collect(),
        }
    }

    pub fn prefix(&self, n: usize) -> Self {
        Self {
            version: self.version,
            seed: self.seed,
            members: self.members[..n.min(self.members.len())].to_vec(),
        }
    }

    pub fn describe(&self) -> String {
        format!("v{}:seed{}:n{}", self.version, self.seed, self.members.len())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpNormEstimate {
    pub value: f64,
    pub argmax_id: String,
    pub family: String,
    pub family_size: usize,
    pub p: f64,
    pub weight: String,
    pub skipped: usize,
    pub ratios: Vec<f64>,
}

/// Rules used by the operator-norm estimator.
#[derive(Clone, Debug)]
pub struct OpNormRules {
    /// Source rule of the projection.
    pub source: QuadratureRule,
    /// Source rule of the positive operator, graded towards the circle.
    pub positive_source: QuadratureRule,
    /// Rule on which norms are taken.
    pub eval: QuadratureRule,
}

impl OpNormRules {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        Ok(Self {
            source: build_polar_rule(n_r, n_theta)?,
            positive_source: build_graded_polar_rule((n_r / 8).clamp(8, 16), 20, n_theta)?,
            eval: build_polar_rule(n_r, n_theta)?,
        })
    }
}

/// Image of one test function under a disk operator, sampled on the
/// evaluation rule.
pub struct SampledImage {
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    input_at: Box<dyn Fn(C64) -> f64 + Send + Sync>,
    output_at: Box<dyn Fn(C64) -> f64 + Send + Sync>,
}

impl SampledImage {
    pub fn input_at(&self, w: C64) -> f64 {
        (self.input_at)(w)
    }

    pub fn output_at(&self, w: C64) -> f64 {
        (self.output_at)(w)
    }
}

pub fn sample_image(op: &ProjectionOp, f: &TestFunction, rules: &OpNormRules) -> Result<SampledImage> {
    if op.domain != ProjectionDomain::Disk {
        return Err(Error::UnsupportedFamily(format!("operator norms are estimated for disk operators, not {}", op.label())));
    }
    let input: Vec<f64> = rules.eval.nodes.iter().map(|w| f.eval(*w).norm()).collect();
    let f_in = f.clone();
    let input_at = Box::new(move |w: C64| f_in.eval(w).norm());
    if op.positive {
        let g: Vec<f64> = op.rule.nodes.iter().map(|w| f.eval(*w).norm()).collect();
        let pp = Arc::new(PositiveProjection::new(&op.rule, &g)?);
        let output = pp.on_rings(&rules.eval)?;
        let output_at = Box::new(move |w: C64| pp.at(w));
        Ok(SampledImage { input, output, input_at, output_at })
    } else {
        let series = projection_series(&op.rule, &GridFunction::sample(&op.rule, |w| f.eval(w)))?;
        let output: Vec<f64> = rules.eval.nodes.par_iter().map(|w| series.eval(*w).norm()).collect();
        let output_at = Box::new(move |w: C64| series.eval(w).norm());
        Ok(SampledImage { input, output, input_at, output_at })
    }
}

fn weight_w2(spec: &WeightSpec) -> C64 {
    match spec {
        WeightSpec::PairPower { w2, .. } => *w2,
        _ => C64::new(0.0, 0.0),
    }
}

/// `max_f ‖op f‖ / ‖f‖` in `L^p(σ)` over the family; a lower bound for the
/// operator norm.
pub fn opnorm_lower_bound(op: &ProjectionOp, p: f64, spec: &WeightSpec, family: &TestFamily, rules: &OpNormRules) -> Result<OpNormEstimate> {
    if family.members.is_empty() {
        return Err(Error::Config("empty test family".into()));
    }
    check_lp(p)?;
    let w2 = weight_w2(spec);
    let ratios: Vec<f64> = family
        .members
        .iter()
        .map(|f| {
            let img = sample_image(op, f, rules)?;
            let num = weighted_lp_norm_sampled(&img.output, img.output_at(w2), p, spec, &rules.eval)?;
            let den = weighted_lp_norm_sampled(&img.input, img.input_at(w2), p, spec, &rules.eval)?;
            Ok(if den > 0.0 && den.is_finite() { num / den } else { f64::NAN })
        })
        .collect::<Result<_>>()?;
    let mut best = (0usize, f64::NEG_INFINITY);
    let mut skipped = 0;
    for (i, r) in ratios.iter().enumerate() {
        if r.is_nan() {
            skipped += 1;
        } else if *r > best.1 {
            best = (i, *r);
        }
    }
    if skipped == ratios.len() {
        return Err(Error::Config("every test function has zero norm".into()));
    }
    Ok(OpNormEstimate {
        value: best.1,
        argmax_id: family.members[best.0].id(best.0),
        family: family.describe(),
        family_size: family.members.len(),
        p,
        weight: spec.to_string(),
        skipped,
        ratios,
    })
}

/// A symmetric polynomial `u(w1, w2) = Σ u_jk w1^j w2^k`, the pullback of a
/// holomorphic function on the symmetrized bidisk.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringPoly {
    pub coeffs: Vec<Vec<C64>>,
}

impl CoveringPoly {
    pub fn zero(n: usize) -> Self {
        Self {
            coeffs: vec![vec![C64::new(0.0, 0.0); n]; n],
        }
    }

    pub fn eval(&self, w1: C64, w2: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for row in self.coeffs.iter().rev() {
            let inner = row.iter().rev().fold(C64::new(0.0, 0.0), |a, c| a * w2 + c);
            acc = acc * w1 + inner;
        }
        acc
    }

    /// Value at `z ∈ G` through either preimage.
    pub fn eval_g(&self, z: GPoint) -> C64 {
        let (a, b) = phi_preimage(z.z1, z.z2);
        self.eval(a, b)
    }

    pub fn derivative(&self, var: usize) -> Self {
        let n = self.coeffs.len();
        let mut out = Self::zero(n);
        for j in 0..n {
            for k in 0..n {
                let c = self.coeffs[j][k];
                if var == 0 && j > 0 {
                    out.coeffs[j - 1][k] += c * j as f64;
                } else if var == 1 && k > 0 {
                    out.coeffs[j][k - 1] += c * k as f64;
                }
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Divides the antisymmetric part of `Σ c_jk w1^j w2^k` by `w1 - w2`:
/// `(w1^j w2^k - w1^k w2^j) / (w1 - w2) = (w1 w2)^k Σ_m w1^m w2^{j-k-1-m}`.
fn divide_antisymmetric(c: &[Vec<C64>]) -> CoveringPoly {
    let n = c.len();
    let mut u = CoveringPoly::zero(n.max(1));
    for j in 0..n {
        for k in 0..j {
            let d = 0.5 * (c[j][k] - c[k][j]);
            for m in 0..(j - k) {
                u.coeffs[k + m][k + (j - k - 1 - m)] += d;
            }
        }
    }
    u
}

/// Projection onto the symmetrized bidisk of a polynomial in
/// `(z1, z̄1, z2, z̄2)`, computed exactly term by term from
/// `B(η^a η̄^b)(w) = (a - b + 1)/(a + 1) w^{a-b}` for `a ≥ b`, and zero
/// otherwise.
pub fn project_g_poly(h: &MixedPoly) -> CoveringPoly {
    let pulled = symbidisk_symbolic::poly::pullback_mixed(h);
    let jac = &MixedPoly::var(0) - &MixedPoly::var(2);
    let numer = &pulled * &jac;
    let deg = numer.degree().unwrap_or(0) as usize + 1;
    let mut c = vec![vec![C64::new(0.0, 0.0); deg]; deg];
    for (e, v) in numer.terms() {
        let [a, b, cc, d] = *e;
        if a < b || cc < d {
            continue;
        }
        let f1 = (a - b + 1) as f64 / (a + 1) as f64;
        let f2 = (cc - d + 1) as f64 / (cc + 1) as f64;
        c[(a - b) as usize][(cc - d) as usize] += coeff_to_c64(v) * (f1 * f2);
    }
    divide_antisymmetric(&c)
}

/// Projection onto the symmetrized bidisk of a function given by values:
/// the bidisk projection of `(η1 - η2) h(Φ(η))` is computed by iterated disk
/// projection on a product of `rule` with itself, truncated at `terms`
/// powers in each variable, then divided by the Jacobian.
pub fn project_g<H>(h: H, rule: &QuadratureRule, terms: usize) -> Result<CoveringPoly>
where
    H: Fn(C64, C64) -> C64 + Sync,
{
    if !rule.is_origin_polar() {
        return Err(Error::InvalidRule("iterated projection needs a ring rule".into()));
    }
    let n = rule.len();
    let values: Vec<C64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let e1 = rule.nodes[i];
            let h = &h;
            rule.nodes.iter().map(move |e2| (e1 - e2) * h(e1 + e2, e1 * e2))
        })
        .collect();
    // project in η2 for every η1 node, then in η1
    let inner: Vec<HolomorphicSeries> = values
        .par_chunks(n)
        .map(|row| projection_series(rule, &GridFunction { values: row.to_vec() }))
        .collect::<Result<_>>()?;
    let j_max = terms.min(inner.first().map_or(0, |s| s.coeffs.len()));
    let mut c = vec![vec![C64::new(0.0, 0.0); j_max]; j_max];
    for k in 0..j_max {
        let column = GridFunction {
            values: inner.iter().map(|s| s.coeffs[k]).collect(),
        };
        let outer = projection_series(rule, &column)?;
        for j in 0..j_max {
            c[j][k] = outer.coeffs[j];
        }
    }
    Ok(divide_antisymmetric(&c))
}

/// Monte Carlo estimates of `∫_G K(z, ζ) h(ζ) dv(ζ)` at several `z`, with
/// the kernel carrying `prefactor`.
pub fn project_g_monte_carlo<H>(h: H, points: &[GPoint], prefactor: f64, n: usize, seed: u64) -> Result<Vec<McEstimate>>
where
    H: Fn(C64, C64) -> C64 + Sync,
{
    monte_carlo_multi(McRegion::G, n, seed, points.len(), |x, out| {
        let zeta = GPoint { z1: x[0], z2: x[1] };
        let hv = h(x[0], x[1]);
        for (o, z) in out.iter_mut().zip(points) {
            *o = g_kernel_with(*z, zeta, prefactor) * hv;
        }
    })
}

/// `z = Φ(w)` for `w` drawn uniformly from `|w_i| < r_max`.
pub fn random_g_points(count: usize, r_max: f64, seed: u64) -> Vec<GPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut draw = || C64::from_polar(r_max * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>());
            let (a, b) = (draw(), draw());
            GPoint { z1: a + b, z2: a * b }
        })
        .collect()
}

/// `z1^a z̄1^b z2^c z̄2^d` as a polynomial in `(z1, z̄1, z2, z̄2)`.
pub fn g_monomial(e: [u32; 4]) -> MixedPoly {
    Poly::monomial(e, symbidisk_symbolic::poly::int(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_polar_rule;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn probe_points() -> Vec<C64> {
        (0..12).map(|k| C64::from_polar(0.8 * (k as f64 + 1.0) / 12.0, 1.3 * k as f64)).collect()
    }

    #[test]
    fn direct_and_spectral_projection_agree() {
        let rule = build_polar_rule(64, 256).unwrap();
        for f in [
            Box::new(|e: C64| e.powu(3)) as Box<dyn Fn(C64) -> C64>,
            Box::new(|e: C64| e.conj()),
            Box::new(|e: C64| e * e.conj()),
            Box::new(|e: C64| e.conj() * e * e),
        ] {
            let g = GridFunction::sample(&rule, &f);
            let direct = project_disk(&rule, &g, false).unwrap();
            let series = projection_series(&rule, &g).unwrap();
            for w in probe_points() {
                assert!((direct.eval(w) - series.eval(w)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let rule = build_polar_rule(64, 128).unwrap();
        let s = projection_series(&rule, &GridFunction::sample(&rule, |e| e.powu(3))).unwrap();
        let b = projection_series(&rule, &GridFunction::sample(&rule, |e| e.conj())).unwrap();
        let h = projection_series(&rule, &GridFunction::sample(&rule, |e| e * e.conj())).unwrap();
        for w in probe_points() {
            assert!((s.eval(w) - w.powu(3)).norm() < 1e-10 * w.norm().powi(3).max(1e-3));
            assert!(b.eval(w).norm() < 1e-10);
            assert!((h.eval(w) - 0.5).norm() < 1e-10);
        }
    }

    #[test]
    fn positive_operator_matches_direct_sum() {
        let rule = build_graded_polar_rule(12, 8, 64).unwrap();
        let g: Vec<f64> = rule.nodes.iter().map(|e| (e - c(0.3, 0.1)).norm()).collect();
        let pp = PositiveProjection::new(&rule, &g).unwrap();
        let direct = project_disk(&rule, &GridFunction { values: g.iter().map(|v| c(*v, 0.0)).collect() }, true).unwrap();
        for w in probe_points() {
            let a = pp.at(w);
            let b = direct.eval(w).re;
            assert!((a - b).abs() < 1e-3 * b, "w={w} spectral={a} direct={b}");
        }
        let eval = build_polar_rule(8, 64).unwrap();
        let on = pp.on_rings(&eval).unwrap();
        for (i, w) in eval.nodes.iter().enumerate().step_by(37) {
            assert!((on[i] - pp.at(*w)).abs() < 1e-10 * on[i]);
        }
        // constants: B⁺1(w) = (1/π)∫ |1 - w η̄|^{-2} = -log(1 - |w|²)/|w|²
        let ones = vec![1.0; rule.len()];
        let pp = PositiveProjection::new(&rule, &ones).unwrap();
        for w in probe_points() {
            let exact = -(1.0 - w.norm_sqr()).ln() / w.norm_sqr();
            assert!((pp.at(w) - exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn lp_norm_examples() {
        let rule = build_polar_rule(32, 64).unwrap();
        let one = |_: C64| c(1.0, 0.0);
        for p in [1.0, 2.0, 3.5] {
            let v = weighted_lp_norm(one, p, &WeightSpec::Constant(1.0), &rule).unwrap();
            assert!((v - PI.powf(1.0 / p)).abs() < 1e-12);
        }
        let v = weighted_lp_norm(one, 1.0, &WeightSpec::PairPower { s: 2.0, w2: c(0.0, 0.0) }, &rule).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-10);
        let v = weighted_lp_norm(|w| w, 2.0, &WeightSpec::Constant(1.0), &rule).unwrap();
        assert!((v - (PI / 2.0).sqrt()).abs() < 1e-12);
        // sampled form with the singular point subtracted
        let spec = WeightSpec::PairPower { s: -1.5, w2: c(0.4, 0.2) };
        let f = |w: C64| (w * w + 0.3).norm();
        let values: Vec<f64> = rule.nodes.iter().map(|w| f(*w)).collect();
        let a = weighted_lp_norm_sampled(&values, f(c(0.4, 0.2)), 2.0, &spec, &rule).unwrap();
        let fine = build_polar_rule(96, 192).unwrap();
        let b = weighted_lp_norm(|w| c(f(w), 0.0), 2.0, &spec, &fine).unwrap();
        assert!((a / b - 1.0).abs() < 5e-3, "sampled={a} singular={b}");
    }

    #[test]
    fn projection_norm_on_monomials_is_one() {
        let rules = OpNormRules::new(32, 64).unwrap();
        let op = ProjectionOp::new(ProjectionDomain::Disk, false, rules.source.clone());
        let est = opnorm_lower_bound(&op, 2.0, &WeightSpec::Constant(1.0), &TestFamily::monomials(6), &rules).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9);
        let pos = ProjectionOp::new(ProjectionDomain::Disk, true, rules.positive_source.clone());
        let est = opnorm_lower_bound(&pos, 2.0, &WeightSpec::Constant(1.0), &TestFamily::monomials(6), &rules).unwrap();
        assert!(est.value >= 1.0);
    }

    #[test]
    fn g_projection_examples() {
        let hol = &(&g_monomial([1, 0, 1, 0]) + &g_monomial([3, 0, 0, 0])) + &g_monomial([0, 0, 2, 0]);
        let u = project_g_poly(&hol);
        let z = GPoint::new(c(0.3, 0.2), c(-0.1, 0.05)).unwrap();
        let want = z.z1 * z.z2 + z.z1.powu(3) + z.z2 * z.z2;
        assert!((u.eval_g(z) - want).norm() < 1e-14);
        assert!(project_g_poly(&g_monomial([0, 1, 0, 0])).max_abs_coeff() < 1e-15);
        let u = project_g_poly(&g_monomial([1, 1, 0, 0]));
        assert!((u.eval(c(0.4, 0.1), c(-0.2, 0.3)) - 2.0 / 3.0).norm() < 1e-15);
        // z2 conj(z1) ↦ z1 / 2
        let u = project_g_poly(&g_monomial([0, 1, 1, 0]));
        assert!((u.eval_g(z) - z.z1 / 2.0).norm() < 1e-15);
    }

    #[test]
    fn numeric_g_projection_matches_exact() {
        let rule = build_polar_rule(12, 32).unwrap();
        let u = project_g(|z1, _| z1 * z1.conj(), &rule, 10).unwrap();
        let (a, b) = (c(0.2, -0.3), c(0.5, 0.1));
        assert!((u.eval(a, b) - 2.0 / 3.0).norm() < 1e-10);
        assert!((u.eval(a, a) - 2.0 / 3.0).norm() < 1e-10);
        let u = project_g(|z1, z2| z1 * z2, &rule, 10).unwrap();
        assert!((u.eval(a, b) - (a + b) * a * b).norm() < 1e-10);
    }
}
