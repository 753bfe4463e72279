//! Quotient-side derivatives written in covering coordinates, and the
//! reverse chain rule.
//!
//! With `z = (w1 + w2, w1 w2)`,
//! `∂/∂z1 = (w1 ∂1 - w2 ∂2) / (w1 - w2)` and `∂/∂z2 = (-∂1 + ∂2) / (w1 - w2)`,
//! where `∂i = ∂/∂wi`.

use std::collections::BTreeMap;

use crate::error::SymbolicError;
use crate::poly::{diagonal_factor, div_by_diagonal, int, pullback_holomorphic, BivarPoly, MixedPoly};

/// `D_z^α = (w1 - w2)^{-m} Σ_β P_β(w1, w2) ∂_w^β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOpExpansion {
    pub alpha: [u32; 2],
    pub denom_power: u32,
    pub terms: BTreeMap<[u32; 2], BivarPoly>,
}

/// `numer / (w1 - w2)^denom_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFn {
    pub numer: BivarPoly,
    pub denom_power: u32,
}

impl RationalFn {
    pub fn polynomial(p: BivarPoly) -> Self {
        Self {
            numer: p,
            denom_power: 0,
        }
    }

    /// Cancels common factors of `w1 - w2`.
    pub fn simplify(mut self) -> Self {
        if self.numer.is_zero() {
            self.denom_power = 0;
            return self;
        }
        while self.denom_power > 0 {
            match div_by_diagonal(&self.numer) {
                Some(q) => {
                    self.numer = q;
                    self.denom_power -= 1;
                }
                None => break,
            }
        }
        self
    }

    /// Returns the polynomial if the denominator has cancelled.
    pub fn as_polynomial(&self) -> Option<&BivarPoly> {
        (self.denom_power == 0).then_some(&self.numer)
    }

    fn lift_to(&self, power: u32) -> BivarPoly {
        &self.numer * &diagonal_factor().pow(power - self.denom_power)
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.denom_power.max(other.denom_power);
        Self {
            numer: &self.lift_to(m) + &other.lift_to(m),
            denom_power: m,
        }
        .simplify()
    }
}

impl DiffOpExpansion {
    pub fn order(&self) -> u32 {
        self.alpha[0] + self.alpha[1]
    }

    fn first_order(which: usize) -> Self {
        let w1 = BivarPoly::var(0);
        let w2 = BivarPoly::var(1);
        let mut terms = BTreeMap::new();
        if which == 0 {
            terms.insert([1, 0], w1);
            terms.insert([0, 1], -&w2);
        } else {
            terms.insert([1, 0], BivarPoly::constant(int(-1)));
            terms.insert([0, 1], BivarPoly::one());
        }
        let mut alpha = [0; 2];
        alpha[which] = 1;
        Self {
            alpha,
            denom_power: 1,
            terms,
        }
    }

    /// Left-composes `∂/∂z_which` with `self`.
    fn apply_dz(&self, which: usize) -> Self {
        let m = int(self.denom_power as i64);
        let w1 = BivarPoly::var(0);
        let w2 = BivarPoly::var(1);
        let d = diagonal_factor();
        let mut out: BTreeMap<[u32; 2], BivarPoly> = BTreeMap::new();
        let mut push = |beta: [u32; 2], p: BivarPoly| {
            if p.is_zero() {
                return;
            }
            let slot = out.entry(beta).or_default();
            *slot = &*slot + &p;
        };
        for (beta, p) in &self.terms {
            let up1 = [beta[0] + 1, beta[1]];
            let up2 = [beta[0], beta[1] + 1];
            if which == 0 {
                // differentiating the (w1 - w2)^{-m} prefactor
                push(*beta, (&(&w1 + &w2) * p).scale(&-m.clone()));
                let dp = &(&w1 * &p.derivative(0)) - &(&w2 * &p.derivative(1));
                push(*beta, &d * &dp);
                push(up1, &(&d * &w1) * p);
                push(up2, -&(&(&d * &w2) * p));
            } else {
                push(*beta, p.scale(&(&m + &m)));
                let dp = &p.derivative(1) - &p.derivative(0);
                push(*beta, &d * &dp);
                push(up1, -&(&d * p));
                push(up2, &d * p);
            }
        }
        out.retain(|_, p| !p.is_zero());
        let mut alpha = self.alpha;
        alpha[which] += 1;
        Self {
            alpha,
            denom_power: self.denom_power + 2,
            terms: out,
        }
    }
}

/// Expands `D_z^α` for `|α| ≥ 1`.
pub fn dz_expansion(alpha: [u32; 2]) -> Result<DiffOpExpansion, SymbolicError> {
    let total = alpha[0] + alpha[1];
    if total == 0 {
        return Err(SymbolicError::ZeroOrder);
    }
    let first = if alpha[0] > 0 { 0 } else { 1 };
    let mut e = DiffOpExpansion::first_order(first);
    let mut remaining = alpha;
    remaining[first] -= 1;
    for which in 0..2 {
        for _ in 0..remaining[which] {
            e = e.apply_dz(which);
        }
    }
    assert_eq!(e.denom_power, 2 * total - 1);
    for p in e.terms.values() {
        assert!(p.degree().unwrap_or(0) < 2 * total);
    }
    Ok(e)
}

fn apply_w_derivatives(e: &DiffOpExpansion, pulled: &BivarPoly) -> BivarPoly {
    let mut numer = BivarPoly::zero();
    for (beta, p) in &e.terms {
        let mut g = pulled.clone();
        for _ in 0..beta[0] {
            g = g.derivative(0);
        }
        for _ in 0..beta[1] {
            g = g.derivative(1);
        }
        numer = &numer + &(p * &g);
    }
    numer
}

/// Applies the expansion to `f ∘ Φ` for `f` holomorphic in `(z1, z2)`.
pub fn apply_expansion(e: &DiffOpExpansion, f: &BivarPoly) -> RationalFn {
    let pulled = pullback_holomorphic(f);
    RationalFn {
        numer: apply_w_derivatives(e, &pulled),
        denom_power: e.denom_power,
    }
    .simplify()
}

/// `(D_z^α f) ∘ Φ`, computed directly on the quotient side.
pub fn direct_dz(alpha: [u32; 2], f: &BivarPoly) -> BivarPoly {
    let mut g = f.clone();
    for _ in 0..alpha[0] {
        g = g.derivative(0);
    }
    for _ in 0..alpha[1] {
        g = g.derivative(1);
    }
    pullback_holomorphic(&g)
}

/// `D_{w,w̄}^β = Σ_α P̃_{α}(w, w̄) D_{z,z̄}^α`; variable order is
/// `(1, bar 1, 2, bar 2)` on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZOpExpansion {
    pub beta: [u32; 4],
    pub terms: BTreeMap<[u32; 4], MixedPoly>,
}

impl ZOpExpansion {
    fn identity() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert([0; 4], MixedPoly::one());
        Self {
            beta: [0; 4],
            terms,
        }
    }

    /// Left-composes `∂/∂w_1`, `∂/∂w̄_1`, `∂/∂w_2` or `∂/∂w̄_2` (index `var`).
    fn apply_dw(&self, var: usize) -> Self {
        // ∂w1 = ∂z1 + w2 ∂z2, ∂w2 = ∂z1 + w1 ∂z2, conjugates alike.
        let (z_first, z_second, partner) = match var {
            0 => (0, 2, 2),
            1 => (1, 3, 3),
            2 => (0, 2, 0),
            _ => (1, 3, 1),
        };
        let partner_var = MixedPoly::var(partner);
        let mut out: BTreeMap<[u32; 4], MixedPoly> = BTreeMap::new();
        let mut push = |a: [u32; 4], p: MixedPoly| {
            if p.is_zero() {
                return;
            }
            let slot = out.entry(a).or_default();
            *slot = &*slot + &p;
        };
        for (alpha, c) in &self.terms {
            push(*alpha, c.derivative(var));
            let mut a1 = *alpha;
            a1[z_first] += 1;
            push(a1, c.clone());
            let mut a2 = *alpha;
            a2[z_second] += 1;
            push(a2, c * &partner_var);
        }
        out.retain(|_, p| !p.is_zero());
        let mut beta = self.beta;
        beta[var] += 1;
        Self { beta, terms: out }
    }
}

/// Expands `D_{w,w̄}^β` in quotient-side derivatives.
pub fn dwbar_expansion(beta: [u32; 4]) -> ZOpExpansion {
    let mut e = ZOpExpansion::identity();
    for (var, &k) in beta.iter().enumerate() {
        for _ in 0..k {
            e = e.apply_dw(var);
        }
    }
    let bound: u32 = beta.iter().sum();
    for p in e.terms.values() {
        assert!(p.degree().unwrap_or(0) <= bound);
    }
    e
}

/// Applies a `ZOpExpansion` to a polynomial in `(z1, z̄1, z2, z̄2)`,
/// giving a polynomial in `(w1, w̄1, w2, w̄2)`.
pub fn apply_zop(e: &ZOpExpansion, f: &MixedPoly) -> MixedPoly {
    let mut out = MixedPoly::zero();
    for (alpha, c) in &e.terms {
        let mut g = f.clone();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                g = g.derivative(i);
            }
        }
        out = &out + &(c * &crate::poly::pullback_mixed(&g));
    }
    out
}

fn holomorphic_part(p: &MixedPoly) -> Option<BivarPoly> {
    let mut out = BivarPoly::zero();
    for (e, c) in p.terms() {
        if e[1] != 0 || e[3] != 0 {
            return None;
        }
        out.add_term([e[0], e[2]], c.clone());
    }
    Some(out)
}

/// Replaces each holomorphic `D_z^α` in `e` by its covering-coordinate
/// expansion and applies the result to `F`, a polynomial in `(w1, w2)`.
///
/// Fails if `e` involves anti-holomorphic derivatives or coefficients.
pub fn compose_with_dz(e: &ZOpExpansion, pulled: &BivarPoly) -> Result<RationalFn, SymbolicError> {
    let mut acc = RationalFn::polynomial(BivarPoly::zero());
    for (alpha, c) in &e.terms {
        if alpha[1] != 0 || alpha[3] != 0 {
            return Err(SymbolicError::NotHolomorphic);
        }
        let coeff = holomorphic_part(c).ok_or(SymbolicError::NotHolomorphic)?;
        let za = [alpha[0], alpha[2]];
        let term = if za == [0, 0] {
            RationalFn::polynomial(pulled.clone())
        } else {
            let dz = dz_expansion(za)?;
            RationalFn {
                numer: apply_w_derivatives(&dz, pulled),
                denom_power: dz.denom_power,
            }
        };
        let scaled = RationalFn {
            numer: &coeff * &term.numer,
            denom_power: term.denom_power,
        };
        acc = acc.add(&scaled);
    }
    Ok(acc.simplify())
}

/// Number of nonzero rational coefficients; used in reports.
pub fn coefficient_count(e: &DiffOpExpansion) -> usize {
    e.terms.values().map(|p| p.len()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_mono(a: u32, b: u32) -> BivarPoly {
        BivarPoly::monomial([a, b], int(1))
    }

    #[test]
    fn first_order_expansions() {
        let e = dz_expansion([1, 0]).unwrap();
        assert_eq!(e.denom_power, 1);
        assert_eq!(e.terms[&[1, 0]], BivarPoly::var(0));
        assert_eq!(e.terms[&[0, 1]], -&BivarPoly::var(1));

        let e = dz_expansion([0, 1]).unwrap();
        assert_eq!(e.terms[&[1, 0]], BivarPoly::constant(int(-1)));
        assert_eq!(e.terms[&[0, 1]], BivarPoly::one());
    }

    #[test]
    fn zero_order_is_rejected() {
        assert!(matches!(dz_expansion([0, 0]), Err(SymbolicError::ZeroOrder)));
    }

    #[test]
    fn second_derivative_of_square() {
        let e = dz_expansion([2, 0]).unwrap();
        let r = apply_expansion(&e, &z_mono(2, 0));
        assert_eq!(r.as_polynomial(), Some(&BivarPoly::constant(int(2))));
    }

    #[test]
    fn simple_applications() {
        let r = apply_expansion(&dz_expansion([1, 0]).unwrap(), &z_mono(1, 0));
        assert_eq!(r.as_polynomial(), Some(&BivarPoly::one()));
        let r = apply_expansion(&dz_expansion([0, 1]).unwrap(), &z_mono(0, 1));
        assert_eq!(r.as_polynomial(), Some(&BivarPoly::one()));
        let r = apply_expansion(&dz_expansion([1, 1]).unwrap(), &z_mono(2, 1));
        let expect = (&BivarPoly::var(0) + &BivarPoly::var(1)).scale(&int(2));
        assert_eq!(r.as_polynomial(), Some(&expect));
    }

    #[test]
    fn all_orders_up_to_three_on_quartic_basis() {
        for order in 1..=3u32 {
            for a0 in 0..=order {
                let alpha = [a0, order - a0];
                let e = dz_expansion(alpha).unwrap();
                assert_eq!(e.denom_power, 2 * order - 1);
                for deg in 0..=4u32 {
                    for a in 0..=deg {
                        let f = z_mono(a, deg - a);
                        let got = apply_expansion(&e, &f);
                        assert_eq!(got, RationalFn::polynomial(direct_dz(alpha, &f)), "alpha {alpha:?}, f z1^{a} z2^{}", deg - a);
                    }
                }
            }
        }
    }

    #[test]
    fn chain_rule_first_order() {
        let e = dwbar_expansion([1, 0, 0, 0]);
        assert_eq!(e.terms.len(), 2);
        assert_eq!(e.terms[&[1, 0, 0, 0]], MixedPoly::one());
        assert_eq!(e.terms[&[0, 0, 1, 0]], MixedPoly::var(2));

        let e = dwbar_expansion([0, 1, 0, 0]);
        assert_eq!(e.terms[&[0, 1, 0, 0]], MixedPoly::one());
        assert_eq!(e.terms[&[0, 0, 0, 1]], MixedPoly::var(3));
    }

    #[test]
    fn mixed_second_order_carries_first_order_term() {
        let e = dwbar_expansion([1, 0, 1, 0]);
        assert_eq!(e.terms[&[0, 0, 1, 0]], MixedPoly::one());
        let z2 = MixedPoly::var(2);
        assert_eq!(apply_zop(&e, &z2), MixedPoly::one());
    }

    #[test]
    fn chain_rule_agrees_with_direct_differentiation() {
        // f = z1^2 conj(z2) + z2 conj(z1)^2
        let mut f = MixedPoly::monomial([2, 0, 0, 1], int(1));
        f.add_term([0, 2, 1, 0], int(1));
        let pulled = crate::poly::pullback_mixed(&f);
        for beta in [[1, 0, 0, 0], [0, 1, 1, 0], [2, 1, 0, 1], [1, 1, 1, 1]] {
            let mut direct = pulled.clone();
            for (i, &k) in beta.iter().enumerate() {
                for _ in 0..k {
                    direct = direct.derivative(i);
                }
            }
            assert_eq!(apply_zop(&dwbar_expansion(beta), &f), direct, "beta {beta:?}");
        }
    }

    #[test]
    fn round_trip_recovers_w_derivatives() {
        let tests = [z_mono(3, 1), z_mono(0, 4), &z_mono(2, 0) + &z_mono(1, 2)];
        for f in &tests {
            let pulled = pullback_holomorphic(f);
            for beta in [[1, 0, 0, 0], [0, 0, 1, 0], [2, 0, 1, 0]] {
                let e = dwbar_expansion(beta);
                let got = compose_with_dz(&e, &pulled).unwrap();
                let mut direct = pulled.clone();
                for _ in 0..beta[0] {
                    direct = direct.derivative(0);
                }
                for _ in 0..beta[2] {
                    direct = direct.derivative(1);
                }
                assert_eq!(got, RationalFn::polynomial(direct));
            }
        }
    }
}
