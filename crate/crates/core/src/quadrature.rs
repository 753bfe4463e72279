//! Polar product rules on the disk, rules refined around a point singularity,
//! tensor rules on the bidisk, and seeded Monte Carlo.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gauss::{gauss_legendre, gauss_legendre_on};

#[derive(Clone, Debug, PartialEq)]
pub enum RadialScheme {
    GaussLegendre,
    /// Gauss-Legendre panels halving in width towards `r = 1`.
    Graded { panels: usize },
    /// Polar coordinates centred at `center`, graded towards it, tuned for
    /// the factor `|w - center|^s`.
    Centered { center: C64, s: f64, split: f64 },
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<C64>,
    /// Area weights, all positive.
    pub weights: Vec<f64>,
    pub n_radial: usize,
    pub n_angular: usize,
    pub scheme: RadialScheme,
    /// Ring radii and ring weights (including the factor `r`) for rules
    /// centred at the origin; nodes are stored ring by ring.
    pub radii: Vec<f64>,
    pub radial_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `true` for rules laid out as rings about the origin with uniform angles.
    pub fn is_origin_polar(&self) -> bool {
        !self.radii.is_empty()
    }

    pub fn size_tag(&self) -> String {
        format!("{}x{}", self.n_radial, self.n_angular)
    }

    fn from_rings(radii: Vec<f64>, radial_weights: Vec<f64>, n_theta: usize, scheme: RadialScheme) -> Self {
        let dtheta = 2.0 * PI / n_theta as f64;
        let mut nodes = Vec::with_capacity(radii.len() * n_theta);
        let mut weights = Vec::with_capacity(radii.len() * n_theta);
        for (r, wr) in radii.iter().zip(&radial_weights) {
            for k in 0..n_theta {
                nodes.push(C64::from_polar(*r, dtheta * k as f64));
                weights.push(wr * dtheta);
            }
        }
        Self {
            nodes,
            weights,
            n_radial: radii.len(),
            n_angular: n_theta,
            scheme,
            radii,
            radial_weights,
        }
    }
}

fn check_sizes(n_r: usize, n_theta: usize) -> Result<()> {
    if n_r < 2 || n_theta < 4 {
        return Err(Error::InvalidRule(format!(
            "need n_r >= 2 and n_theta >= 4, got {n_r}x{n_theta}"
        )));
    }
    Ok(())
}

/// Gauss-Legendre in `r` against `r dr` on `(0, 1)`, uniform in angle.
pub fn build_polar_rule(n_r: usize, n_theta: usize) -> Result<QuadratureRule> {
    check_sizes(n_r, n_theta)?;
    let (x, w) = gauss_legendre_on(n_r, 0.0, 1.0);
    let rw = x.iter().zip(&w).map(|(r, w)| r * w).collect();
    Ok(QuadratureRule::from_rings(x, rw, n_theta, RadialScheme::GaussLegendre))
}

/// Composite rule with panels `[1 - 2^{-k}, 1 - 2^{-k-1}]`, the last panel
/// reaching `r = 1`.
pub fn build_graded_polar_rule(n_per_panel: usize, panels: usize, n_theta: usize) -> Result<QuadratureRule> {
    check_sizes(n_per_panel, n_theta)?;
    if panels == 0 {
        return Err(Error::InvalidRule("graded rule needs at least one panel".into()));
    }
    let mut radii = Vec::new();
    let mut rw = Vec::new();
    for k in 0..panels {
        let a = 1.0 - 0.5f64.powi(k as i32);
        let b = if k + 1 == panels { 1.0 } else { 1.0 - 0.5f64.powi(k as i32 + 1) };
        let (x, w) = gauss_legendre_on(n_per_panel, a, b);
        for (r, wi) in x.into_iter().zip(w) {
            radii.push(r);
            rw.push(r * wi);
        }
    }
    Ok(QuadratureRule::from_rings(radii, rw, n_theta, RadialScheme::Graded { panels }))
}

/// Nodes and weights on `(0, 1)` for `∫ x^{s+1} g(x) dx`: geometric panels
/// down to `split`, then the substitution `x = split · u^{1/(s+2)}`.
pub fn singular_radial_rule(n_per_panel: usize, s: f64, split: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if s <= -2.0 {
        return Err(Error::NonIntegrable(s));
    }
    if !(split > 0.0 && split < 1.0) {
        return Err(Error::InvalidRule(format!("split radius {split} outside (0, 1)")));
    }
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    let mut hi = 1.0;
    while hi > split * (1.0 + 1e-12) {
        let lo = (hi * 0.5).max(split);
        let (x, w) = gauss_legendre_on(n_per_panel, lo, hi);
        for (xi, wi) in x.into_iter().zip(w) {
            ws.push(wi * xi.powf(s + 1.0));
            xs.push(xi);
        }
        hi = lo;
    }
    let (u, w) = gauss_legendre_on(n_per_panel, 0.0, 1.0);
    let scale = split.powf(s + 2.0) / (s + 2.0);
    for (ui, wi) in u.into_iter().zip(w) {
        xs.push(split * ui.powf(1.0 / (s + 2.0)));
        ws.push(scale * wi);
    }
    Ok((xs, ws))
}

/// Distance from `c` to the unit circle along direction `u`, `|c| ≤ 1`.
pub fn exit_distance(c: C64, u: C64) -> f64 {
    let b = (u.conj() * c).re;
    let disc = b * b + 1.0 - c.norm_sqr();
    (-b + disc.max(0.0).sqrt()).max(0.0)
}

/// Polar rule about `center` covering the disk, for integrands carrying
/// `|w - center|^s`; the stored weights are plain area weights.
pub fn build_centered_rule(center: C64, s: f64, n_per_panel: usize, n_theta: usize, split: f64) -> Result<QuadratureRule> {
    check_sizes(n_per_panel, n_theta)?;
    if center.norm() > 1.0 {
        return Err(Error::InvalidRule(format!("centre {center} outside the closed disk")));
    }
    let (xs, ws) = singular_radial_rule(n_per_panel, s, split)?;
    let dphi = 2.0 * PI / n_theta as f64;
    let mut nodes = Vec::with_capacity(xs.len() * n_theta);
    let mut weights = Vec::with_capacity(xs.len() * n_theta);
    for k in 0..n_theta {
        let u = C64::from_polar(1.0, dphi * k as f64);
        let t1 = exit_distance(center, u);
        if t1 <= 0.0 {
            continue;
        }
        for (x, w) in xs.iter().zip(&ws) {
            let t = t1 * x;
            nodes.push(center + u * t);
            weights.push(dphi * t1.powf(s + 2.0) * w / t.powf(s));
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        n_radial: xs.len(),
        n_angular: n_theta,
        scheme: RadialScheme::Centered { center, s, split },
        radii: Vec::new(),
        radial_weights: Vec::new(),
    })
}

#[derive(Clone, Debug)]
pub struct GridFunction {
    pub values: Vec<C64>,
}

impl GridFunction {
    pub fn sample(rule: &QuadratureRule, f: impl Fn(C64) -> C64) -> Self {
        Self {
            values: rule.nodes.iter().map(|w| f(*w)).collect(),
        }
    }
}

pub fn integrate(rule: &QuadratureRule, f: &GridFunction) -> Result<C64> {
    if f.values.len() != rule.len() {
        return Err(Error::SizeMismatch {
            expected: rule.len(),
            got: f.values.len(),
        });
    }
    Ok(rule.weights.iter().zip(&f.values).map(|(w, v)| v * *w).sum())
}

pub fn integrate_fn(rule: &QuadratureRule, f: impl Fn(C64) -> C64) -> C64 {
    rule.nodes.iter().zip(&rule.weights).map(|(x, w)| f(*x) * *w).sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularOptions {
    pub n_per_panel: usize,
    pub n_theta: usize,
    pub split: f64,
}

impl SingularOptions {
    pub fn from_rule(rule: &QuadratureRule) -> Self {
        Self {
            n_per_panel: (rule.n_radial / 4).clamp(8, 32),
            n_theta: rule.n_angular,
            split: 1.0 / 64.0,
        }
    }
}

/// `∫_D |w - w2|^s f(w) dA(w)`.
pub fn integrate_singular(rule: &QuadratureRule, s: f64, w2: C64, f: impl Fn(C64) -> C64) -> Result<C64> {
    integrate_singular_with(SingularOptions::from_rule(rule), s, w2, f)
}

pub fn integrate_singular_with(opts: SingularOptions, s: f64, w2: C64, f: impl Fn(C64) -> C64) -> Result<C64> {
    let rule = build_centered_rule(w2, s, opts.n_per_panel, opts.n_theta, opts.split)?;
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| f(*x) * (*w * (x - w2).norm().powf(s)))
        .sum())
}

/// Tensor-product integral over the bidisk, reduced row by row.
pub fn integrate_product(a: &QuadratureRule, b: &QuadratureRule, f: impl Fn(C64, C64) -> C64 + Sync) -> C64 {
    let rows: Vec<C64> = a
        .nodes
        .par_iter()
        .zip(a.weights.par_iter())
        .map(|(x, wx)| {
            let row: C64 = b.nodes.iter().zip(&b.weights).map(|(y, wy)| f(*x, *y) * *wy).sum();
            row * *wx
        })
        .collect();
    rows.into_iter().sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McRegion {
    Disk,
    Bidisk,
    /// Sampled on the bidisk and pushed forward; integrands receive `(z1, z2)`.
    G,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: C64,
    pub std_error: f64,
    pub n: usize,
}

pub const MC_BATCH: usize = 8192;

pub fn uniform_disk_point(rng: &mut ChaCha8Rng) -> C64 {
    loop {
        let x = 2.0 * rng.random::<f64>() - 1.0;
        let y = 2.0 * rng.random::<f64>() - 1.0;
        if x * x + y * y < 1.0 {
            return C64::new(x, y);
        }
    }
}

/// Several integrals over one shared sample. `f` fills one value per
/// integrand.
pub fn monte_carlo_multi<F>(region: McRegion, n: usize, seed: u64, m: usize, f: F) -> Result<Vec<McEstimate>>
where
    F: Fn(&[C64], &mut [C64]) + Sync,
{
    if n < 1000 {
        return Err(Error::TooFewSamples(n));
    }
    let batches = n.div_ceil(MC_BATCH);
    let partial: Vec<(Vec<C64>, Vec<f64>)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MC_BATCH.min(n - b * MC_BATCH);
            let mut sum = vec![C64::new(0.0, 0.0); m];
            let mut sq = vec![0.0; m];
            let mut out = vec![C64::new(0.0, 0.0); m];
            let mut pt = [C64::new(0.0, 0.0); 2];
            for _ in 0..count {
                let (args, scale): (&[C64], f64) = match region {
                    McRegion::Disk => {
                        pt[0] = uniform_disk_point(&mut rng);
                        (&pt[..1], PI)
                    }
                    McRegion::Bidisk => {
                        pt[0] = uniform_disk_point(&mut rng);
                        pt[1] = uniform_disk_point(&mut rng);
                        (&pt[..2], PI * PI)
                    }
                    McRegion::G => {
                        let a = uniform_disk_point(&mut rng);
                        let b = uniform_disk_point(&mut rng);
                        pt[0] = a + b;
                        pt[1] = a * b;
                        (&pt[..2], PI * PI * 0.5 * (a - b).norm_sqr())
                    }
                };
                f(args, &mut out);
                for j in 0..m {
                    let v = out[j] * scale;
                    sum[j] += v;
                    sq[j] += v.norm_sqr();
                }
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![C64::new(0.0, 0.0); m];
    let mut sq = vec![0.0; m];
    for (s, q) in partial {
        for j in 0..m {
            sum[j] += s[j];
            sq[j] += q[j];
        }
    }
    let nf = n as f64;
    Ok((0..m)
        .map(|j| {
            let mean = sum[j] / nf;
            let var = ((sq[j] - nf * mean.norm_sqr()) / (nf - 1.0)).max(0.0);
            McEstimate {
                value: mean,
                std_error: (var / nf).sqrt(),
                n,
            }
        })
        .collect())
}

pub fn monte_carlo<F>(region: McRegion, n: usize, seed: u64, f: F) -> Result<McEstimate>
where
    F: Fn(&[C64]) -> C64 + Sync,
{
    let est = monte_carlo_multi(region, n, seed, 1, |x, out| out[0] = f(x))?;
    Ok(est[0])
}

/// Gauss-Legendre rule on `[0, 1]` re-exported for callers building their own
/// product rules.
pub fn unit_interval_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let base = gauss_legendre(n);
    (
        base.0.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        base.1.iter().map(|w| 0.5 * w).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn polar_rule_basics() {
        let r = build_polar_rule(16, 32).unwrap();
        assert!((integrate_fn(&r, |_| c(1.0, 0.0)).re - PI).abs() < 1e-12 * PI);
        assert!((integrate_fn(&r, |w| w * w.conj()).re - PI / 2.0).abs() < 1e-12);
        assert!(integrate_fn(&r, |w| w).norm() < 1e-12);
        assert!(r.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn kernel_row_integrates_to_pi() {
        let r = build_polar_rule(32, 64).unwrap();
        let g = GridFunction::sample(&r, |w| {
            let d = c(1.0, 0.0) - 0.5 * w.conj();
            c(1.0, 0.0) / (d * d)
        });
        assert!((integrate(&r, &g).unwrap() - PI).norm() < 1e-12);
        let short = GridFunction { values: vec![c(1.0, 0.0); 3] };
        assert!(matches!(integrate(&r, &short), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn invalid_sizes_rejected() {
        assert!(matches!(build_polar_rule(1, 256), Err(Error::InvalidRule(_))));
        assert!(matches!(build_polar_rule(8, 3), Err(Error::InvalidRule(_))));
    }

    #[test]
    fn graded_rule_sums_to_pi() {
        let r = build_graded_polar_rule(8, 6, 16).unwrap();
        let total: f64 = r.weights.iter().sum();
        assert!((total - PI).abs() < 1e-13);
        let m = integrate_fn(&r, |w| w.norm_sqr().powi(3).into());
        assert!((m.re - PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn singular_examples() {
        let r = build_polar_rule(32, 64).unwrap();
        let one = |_| c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert!((integrate_singular(&r, 0.0, c(0.3, 0.1), one).unwrap().re - PI).abs() < 1e-12);
        assert!((integrate_singular(&r, 2.0, zero, one).unwrap().re - PI / 2.0).abs() < 1e-12);
        assert!((integrate_singular(&r, -1.0, zero, one).unwrap().re - 2.0 * PI).abs() < 1e-4 * 2.0 * PI);
        assert_eq!(integrate_singular(&r, -2.0, zero, one), Err(Error::NonIntegrable(-2.0)));
    }

    #[test]
    fn singular_rule_off_centre_matches_series() {
        // ∫_D |w - a|^2 dA = π/2 + π|a|^2
        let r = build_polar_rule(32, 128).unwrap();
        for a in [c(0.5, 0.0), c(0.0, 0.9), c(0.99, 0.0)] {
            let got = integrate_singular(&r, 2.0, a, |_| c(1.0, 0.0)).unwrap().re;
            let exact = PI / 2.0 + PI * a.norm_sqr();
            assert!((got - exact).abs() < 1e-9, "a={a} got={got}");
        }
        // ∫_D |w - a|^{-1} conj(w) w dA against a fine centred reference
        let f = |w: C64| w * w.conj();
        let a = c(0.4, -0.2);
        let coarse = integrate_singular(&r, -1.0, a, f).unwrap();
        let fine = integrate_singular_with(SingularOptions { n_per_panel: 40, n_theta: 256, split: 1e-3 }, -1.0, a, f).unwrap();
        assert!((coarse - fine).norm() < 1e-9);
    }

    #[test]
    fn product_rule_examples() {
        let r = build_polar_rule(8, 16).unwrap();
        let one = integrate_product(&r, &r, |_, _| c(1.0, 0.0));
        assert!((one.re - PI * PI).abs() < 1e-11);
        let jac = integrate_product(&r, &r, |a, b| c((a - b).norm_sqr(), 0.0));
        assert!((jac.re - PI * PI).abs() < 1e-11);
        assert!(integrate_product(&r, &r, |a, b| a * b.conj()).norm() < 1e-12);
    }

    #[test]
    fn monte_carlo_examples() {
        let n = 200_000;
        let disk = monte_carlo(McRegion::Disk, n, 42, |_| c(1.0, 0.0)).unwrap();
        assert!((disk.value.re - PI).abs() <= 3.0 * disk.std_error + 1e-12);
        let vol = monte_carlo(McRegion::G, n, 42, |_| c(1.0, 0.0)).unwrap();
        assert!((vol.value.re / (PI * PI / 2.0) - 1.0).abs() < 0.01);
        let again = monte_carlo(McRegion::G, n, 42, |_| c(1.0, 0.0)).unwrap();
        assert_eq!(vol.value.re.to_bits(), again.value.re.to_bits());
        assert!(matches!(monte_carlo(McRegion::Disk, 999, 1, |_| c(1.0, 0.0)), Err(Error::TooFewSamples(999))));
    }

    proptest! {
        #[test]
        fn polar_rule_exact_on_monomials(a in 0u32..12, b in 0u32..12) {
            let r = build_polar_rule(12, 32).unwrap();
            let got = integrate_fn(&r, |w| w.powu(a) * w.conj().powu(b));
            let exact = if a == b { PI / (a as f64 + 1.0) } else { 0.0 };
            prop_assert!((got - exact).norm() < 1e-12);
        }
    }
}
