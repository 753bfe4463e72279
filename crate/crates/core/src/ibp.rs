//! Integration by parts against partial kernels on the bidisk. Both sides
//! are assembled from separable monomials in `(η1, η̄1, η2, η̄2)`:
//!
//! * left: `∫∫ ∂_{w1}^{β1} k(w1, η1) ∂_{w2}^{β2} k(w2, η2) f`,
//! * right: `w1^{-β1} w2^{-β2} ∫∫ K_{β1} K_{β2} T_{η1}^{β1} T_{η2}^{β2} f`,
//!
//! with bare kernels `k = (1 - w η̄)^{-2}` and `T = w ∂_η - η̄ ∂_η̄`.

use num_complex::Complex64 as C64;
use symbidisk_symbolic::tangential::{tangential_apply, EtaPoly};
use symbidisk_symbolic::{MixedPoly, Poly};

use crate::error::{Error, Result};
use crate::kernels::{kernel_w_derivative, partial_kernel};
use crate::quadrature::QuadratureRule;
use crate::sobolev::FloatPoly;

pub const W_MIN: f64 = 0.1;
pub const W_MAX: f64 = 0.8;
pub const BETA_MAX: u32 = 2;
/// Residual bound asserted at `β = (0, 0)`.
pub const PLAIN_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct IbpRow {
    pub case: String,
    pub beta: [u32; 2],
    pub w: [C64; 2],
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
    /// Only `β = (0, 0)` carries an asserted bound.
    pub asserted: bool,
}

impl IbpRow {
    pub fn passes(&self) -> bool {
        !self.asserted || self.residual < PLAIN_TOLERANCE
    }
}

fn check_point(w: C64) -> Result<()> {
    let r = w.norm();
    if !(W_MIN..=W_MAX).contains(&r) {
        return Err(Error::EvaluationPoint(r));
    }
    Ok(())
}

/// `∫_D ∂_w^β k(w, η) η^a η̄^b dA(η)` on `rule`.
pub fn lhs_factor(beta: u32, w: C64, a: u32, b: u32, rule: &QuadratureRule) -> C64 {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(eta, wt)| kernel_w_derivative(beta, w, *eta) * eta.powu(a) * eta.conj().powu(b) * *wt)
        .sum()
}

/// `w^{-β} ∫_D K_β(w, η) (T^β η^a η̄^b)(η) dA(η)` on `rule`.
pub fn rhs_factor(beta: u32, w: C64, a: u32, b: u32, rule: &QuadratureRule) -> C64 {
    let g = tangential_apply(&EtaPoly::monomial([a, b, 0], symbidisk_symbolic::poly::int(1)), beta);
    let g = FloatPoly::from_exact(&g);
    let total: C64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(eta, wt)| partial_kernel(beta, w, *eta) * g.eval(&[*eta, eta.conj(), w]) * *wt)
        .sum();
    total / w.powu(beta)
}

pub fn relative_residual(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-12)
}

/// Both sides for `f` a polynomial in `(η1, η̄1, η2, η̄2)`.
pub fn ibp_row(case: &str, f: &MixedPoly, beta: [u32; 2], w: [C64; 2], rule: &QuadratureRule) -> Result<IbpRow> {
    check_point(w[0])?;
    check_point(w[1])?;
    if beta.iter().any(|b| *b > BETA_MAX) {
        return Err(Error::Config(format!("beta {beta:?} exceeds {BETA_MAX}")));
    }
    let mut lhs = C64::new(0.0, 0.0);
    let mut rhs = C64::new(0.0, 0.0);
    for (e, c) in f.terms() {
        let c = symbidisk_symbolic::poly::coeff_to_c64(c);
        let [a1, b1, a2, b2] = *e;
        lhs += c * lhs_factor(beta[0], w[0], a1, b1, rule) * lhs_factor(beta[1], w[1], a2, b2, rule);
        rhs += c * rhs_factor(beta[0], w[0], a1, b1, rule) * rhs_factor(beta[1], w[1], a2, b2, rule);
    }
    Ok(IbpRow {
        case: case.to_string(),
        beta,
        w,
        lhs,
        rhs,
        residual: relative_residual(lhs, rhs),
        asserted: beta == [0, 0],
    })
}

fn eta_monomial(e: [u32; 4]) -> MixedPoly {
    Poly::monomial(e, symbidisk_symbolic::poly::int(1))
}

/// `η1² η̄1 + η̄1² η2 + η1 η̄2 + η2² η̄2`, the polynomial used for the full
/// sweep over `β`.
pub fn default_polynomial() -> MixedPoly {
    [[2, 1, 0, 0], [0, 2, 1, 0], [1, 0, 0, 1], [0, 0, 2, 1]]
        .into_iter()
        .fold(MixedPoly::zero(), |acc, e| &acc + &eta_monomial(e))
}

/// The named cases followed by the sweep over `β1, β2 ≤ 2`.
pub fn ibp_report(w: [C64; 2], rule: &QuadratureRule) -> Result<Vec<IbpRow>> {
    let mut rows = vec![
        ibp_row("conj(eta1)^2", &eta_monomial([0, 2, 0, 0]), [0, 0], w, rule)?,
        ibp_row("conj(eta1)^2", &eta_monomial([0, 2, 0, 0]), [1, 0], w, rule)?,
        ibp_row("conj(eta1)conj(eta2)eta1", &eta_monomial([1, 1, 0, 1]), [1, 1], w, rule)?,
        ibp_row("eta1^2 conj(eta1)", &eta_monomial([2, 1, 0, 0]), [1, 0], w, rule)?,
    ];
    let f = default_polynomial();
    for b1 in 0..=BETA_MAX {
        for b2 in 0..=BETA_MAX {
            rows.push(ibp_row("default", &f, [b1, b2], w, rule)?);
        }
    }
    Ok(rows)
}
