//! Weighted Sobolev norms on the symmetrized bidisk, computed on the
//! covering bidisk, and the boundedness ratio for the projection.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use symbidisk_symbolic::poly::coeff_to_c64;
use symbidisk_symbolic::{dz_expansion, MixedPoly, Poly};

use crate::error::{Error, Result};
use crate::kernels::DIAGONAL_THRESHOLD;
use crate::operators::{project_g, CoveringPoly};
use crate::quadrature::{build_polar_rule, QuadratureRule};

/// Multi-index over `(z1, z̄1, z2, z̄2)`.
pub type ZIndex = [u32; 4];

/// A function on the symmetrized bidisk with derivatives available at
/// covering points `(w1, w2)`.
pub trait SobolevFunction: Sync {
    fn derivative(&self, alpha: ZIndex, w: (C64, C64)) -> Option<C64>;
}

/// Floating-point image of an exact polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPoly<const N: usize> {
    pub terms: Vec<([u32; N], C64)>,
}

impl<const N: usize> FloatPoly<N> {
    pub fn from_exact(p: &Poly<N>) -> Self {
        Self {
            terms: p.terms().map(|(e, c)| (*e, coeff_to_c64(c))).collect(),
        }
    }

    pub fn eval(&self, x: &[C64; N]) -> C64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(*c, |acc, (k, v)| acc * v.powu(*k)))
            .sum()
    }
}

pub fn indices_up_to(k: u32) -> Vec<ZIndex> {
    let mut out = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            for c in 0..=k - a - b {
                for d in 0..=k - a - b - c {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// A polynomial in `(z1, z̄1, z2, z̄2)` with its derivatives up to order `k`.
pub struct GPolynomial {
    derivs: BTreeMap<ZIndex, FloatPoly<4>>,
}

impl GPolynomial {
    pub fn new(f: &MixedPoly, k: u32) -> Self {
        let derivs = indices_up_to(k)
            .into_iter()
            .map(|alpha| {
                let mut g = f.clone();
                for (var, n) in alpha.iter().enumerate() {
                    for _ in 0..*n {
                        g = g.derivative(var);
                    }
                }
                (alpha, FloatPoly::from_exact(&g))
            })
            .collect();
        Self { derivs }
    }
}

impl SobolevFunction for GPolynomial {
    fn derivative(&self, alpha: ZIndex, w: (C64, C64)) -> Option<C64> {
        let p = self.derivs.get(&alpha)?;
        let (z1, z2) = (w.0 + w.1, w.0 * w.1);
        Some(p.eval(&[z1, z1.conj(), z2, z2.conj()]))
    }
}

struct ZTerm {
    denom_power: u32,
    pieces: Vec<(FloatPoly<2>, CoveringPoly)>,
}

/// A holomorphic function on the symmetrized bidisk given by its covering
/// polynomial; `D_z^α` is applied through the expansion in `w`-derivatives
/// over powers of `w1 - w2`.
pub struct ProjectedG {
    pub u: CoveringPoly,
    terms: BTreeMap<[u32; 2], ZTerm>,
}

impl ProjectedG {
    pub fn new(u: CoveringPoly, k: u32) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for a in 0..=k {
            for b in 0..=(k - a) {
                if a + b == 0 {
                    continue;
                }
                let e = dz_expansion([a, b])?;
                let pieces = e
                    .terms
                    .iter()
                    .map(|(beta, p)| {
                        let mut d = u.clone();
                        for _ in 0..beta[0] {
                            d = d.derivative(0);
                        }
                        for _ in 0..beta[1] {
                            d = d.derivative(1);
                        }
                        (FloatPoly::from_exact(p), d)
                    })
                    .collect();
                terms.insert(
                    [a, b],
                    ZTerm {
                        denom_power: e.denom_power,
                        pieces,
                    },
                );
            }
        }
        Ok(Self { u, terms })
    }
}

impl SobolevFunction for ProjectedG {
    fn derivative(&self, alpha: ZIndex, w: (C64, C64)) -> Option<C64> {
        let [a, abar, b, bbar] = alpha;
        if abar + bbar > 0 {
            return Some(C64::new(0.0, 0.0));
        }
        if a + b == 0 {
            return Some(self.u.eval(w.0, w.1));
        }
        let t = self.terms.get(&[a, b])?;
        let num: C64 = t.pieces.iter().map(|(p, d)| p.eval(&[w.0, w.1]) * d.eval(w.0, w.1)).sum();
        Some(num / (w.0 - w.1).powu(t.denom_power))
    }
}

/// `(Σ_{|α| ≤ k} ∫_G |D^α f|^p |z1² - 4 z2|^l dv)^{1/p}`, integrated on the
/// product of `rule` with itself with the factor `|w1 - w2|² / 2`.
pub fn weighted_sobolev_norm(f: &dyn SobolevFunction, k: u32, p: f64, l: f64, rule: &QuadratureRule) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let indices = indices_up_to(k);
    let probe = (rule.nodes[0], -rule.nodes[0] * 0.5);
    for alpha in &indices {
        if f.derivative(*alpha, probe).is_none() {
            return Err(Error::MissingDerivatives(alpha.iter().sum()));
        }
    }
    let rows: Vec<f64> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(w1, wt1)| {
            let mut row = 0.0;
            for (w2, wt2) in rule.nodes.iter().zip(&rule.weights) {
                let j = (w1 - w2).norm();
                if j < DIAGONAL_THRESHOLD {
                    continue;
                }
                let weight = 0.5 * j * j * (j * j).powf(l);
                let s: f64 = indices
                    .iter()
                    .map(|alpha| f.derivative(*alpha, (*w1, *w2)).unwrap_or_default().norm().powf(p))
                    .sum();
                row += s * weight * wt2;
            }
            row * wt1
        })
        .collect();
    Ok(rows.iter().sum::<f64>().powf(1.0 / p))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SobolevRow {
    pub name: String,
    pub quad: (usize, usize),
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// Covering-polynomial truncation used for the projection.
pub const PROJECTION_TERMS: usize = 8;

/// Rules for a run at disk quadrature `n_r × n_θ`: the projection and the
/// outer norms use one eighth of each size per disk.
pub fn sobolev_rules(quad: (usize, usize)) -> Result<(QuadratureRule, QuadratureRule)> {
    let inner = build_polar_rule((quad.0 / 8).max(8), (quad.1 / 8).max(16))?;
    let outer = build_polar_rule((quad.0 / 8).max(8), (quad.1 / 8).max(16))?;
    Ok((inner, outer))
}

/// `‖B_G f‖_{W^{k,p}(G, l δ)} / ‖f‖_{W^{k,p}(G)}`.
pub fn sobolev_ratio(name: &str, f: &MixedPoly, k: u32, p: f64, l: f64, quad: (usize, usize)) -> Result<SobolevRow> {
    let (inner, outer) = sobolev_rules(quad)?;
    let g = GPolynomial::new(f, k);
    let fz = FloatPoly::from_exact(f);
    let u = project_g(|z1, z2| fz.eval(&[z1, z1.conj(), z2, z2.conj()]), &inner, PROJECTION_TERMS)?;
    let pg = ProjectedG::new(u, k)?;
    let numerator = weighted_sobolev_norm(&pg, k, p, l, &outer)?;
    let denominator = weighted_sobolev_norm(&g, k, p, 0.0, &outer)?;
    Ok(SobolevRow {
        name: name.to_string(),
        quad,
        numerator,
        denominator,
        ratio: numerator / denominator,
    })
}

/// The four test functions of the boundedness check: `z̄1`, `z̄2`, `|z1|²`
/// and `z2 z̄1`.
pub fn sobolev_test_functions() -> Vec<(&'static str, MixedPoly)> {
    let m = |e: [u32; 4]| MixedPoly::monomial(e, symbidisk_symbolic::poly::int(1));
    vec![
        ("conj(z1)", m([0, 1, 0, 0])),
        ("conj(z2)", m([0, 0, 0, 1])),
        ("|z1|^2", m([1, 1, 0, 0])),
        ("z2*conj(z1)", m([0, 1, 1, 0])),
    ]
}

pub fn relative_drift(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-9)
}
