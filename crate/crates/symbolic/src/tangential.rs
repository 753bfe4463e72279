//! The tangential operator `T = w ∂_η - η̄ ∂_η̄` on polynomials in
//! `(η, η̄, w)`, and the Euler-operator identity that replaces it on
//! anti-holomorphic monomials.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::{int, Coeff, Poly};

/// Polynomial in `(η, η̄, w)`.
pub type EtaPoly = Poly<3>;

pub const ETA: usize = 0;
pub const ETA_BAR: usize = 1;
pub const W: usize = 2;

pub fn eta_bar_power(m: u32) -> EtaPoly {
    EtaPoly::monomial([0, m, 0], int(1))
}

/// Applies `T` `power` times.
pub fn tangential_apply(g: &EtaPoly, power: u32) -> EtaPoly {
    let mut out = g.clone();
    for _ in 0..power {
        let holo = out.derivative(ETA).mul_var(W);
        let anti = out.derivative(ETA_BAR).mul_var(ETA_BAR);
        out = &holo - &anti;
    }
    out
}

/// `S = η̄ ∂_η̄` applied `power` times.
pub fn euler_apply(g: &EtaPoly, power: u32) -> EtaPoly {
    let mut out = g.clone();
    for _ in 0..power {
        out = out.derivative(ETA_BAR).mul_var(ETA_BAR);
    }
    out
}

/// `η̄^β ∂_η̄^β g`.
pub fn weighted_antiderivative(g: &EtaPoly, beta: u32) -> EtaPoly {
    let mut out = g.clone();
    for _ in 0..beta {
        out = out.derivative(ETA_BAR);
    }
    for _ in 0..beta {
        out = out.mul_var(ETA_BAR);
    }
    out
}

/// Signed Stirling numbers of the first kind `s(n, k)`, `0 ≤ k ≤ n`.
pub fn stirling_first_signed(n: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 0..n {
        let mut next = vec![BigInt::zero(); row.len() + 1];
        for (k, v) in row.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= v * BigInt::from(i);
        }
        row = next;
    }
    row
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma32Row {
    pub m: u32,
    pub beta: u32,
    pub lhs: Coeff,
    pub rhs: Coeff,
    pub equal: bool,
}

/// Compares `η̄^β ∂_η̄^β` and `T^β` on `η̄^m` by their coefficient of `η̄^m`.
pub fn lemma32_report(m_max: u32, beta_max: u32) -> Vec<Lemma32Row> {
    let mut rows = Vec::new();
    for m in 0..=m_max {
        let f = eta_bar_power(m);
        for beta in 1..=beta_max {
            let left = weighted_antiderivative(&f, beta);
            let right = tangential_apply(&f, beta);
            let key = [0, m, 0];
            let lhs = left.coeff(&key);
            let rhs = right.coeff(&key);
            // both sides are multiples of η̄^m, so the coefficient decides equality
            debug_assert!(left.len() <= 1 && right.len() <= 1);
            let equal = left == right;
            rows.push(Lemma32Row {
                m,
                beta,
                lhs,
                rhs,
                equal,
            });
        }
    }
    rows
}

fn fmt_coeff(c: &Coeff) -> String {
    if c.im.is_zero() {
        c.re.to_string()
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

pub fn lemma32_csv(rows: &[Lemma32Row]) -> String {
    let mut out = String::from("m,beta,lhs,rhs,equal\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.m, r.beta, fmt_coeff(&r.lhs), fmt_coeff(&r.rhs), r.equal);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StirlingRow {
    pub beta: u32,
    pub m: u32,
    pub lhs: Coeff,
    pub rhs: Coeff,
    pub equal: bool,
}

/// Checks `η̄^β ∂_η̄^β = Σ_k s(β, k) S^k` on every `η̄^m`.
pub fn stirling_report(beta_max: u32, m_max: u32) -> Vec<StirlingRow> {
    let mut rows = Vec::new();
    for beta in 1..=beta_max {
        let s = stirling_first_signed(beta);
        for m in 0..=m_max {
            let f = eta_bar_power(m);
            let left = weighted_antiderivative(&f, beta);
            let mut right = EtaPoly::zero();
            for (k, sk) in s.iter().enumerate() {
                let c = Coeff::new(sk.clone().into(), Zero::zero());
                right = &right + &euler_apply(&f, k as u32).scale(&c);
            }
            let key = [0, m, 0];
            rows.push(StirlingRow {
                beta,
                m,
                lhs: left.coeff(&key),
                rhs: right.coeff(&key),
                equal: left == right,
            });
        }
    }
    rows
}

pub fn stirling_csv(rows: &[StirlingRow]) -> String {
    let mut out = String::from("beta,m,lhs,rhs,equal\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.beta, r.m, fmt_coeff(&r.lhs), fmt_coeff(&r.rhs), r.equal);
    }
    out
}

pub fn stirling_identity_check(beta_max: u32, m_max: u32) -> bool {
    stirling_report(beta_max, m_max).iter().all(|r| r.equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tangential_on_basic_inputs() {
        assert_eq!(tangential_apply(&eta_bar_power(3), 1), eta_bar_power(3).scale(&int(-3)));
        let eta = EtaPoly::var(ETA);
        assert_eq!(tangential_apply(&eta, 1), EtaPoly::var(W));
    }

    #[test]
    fn tangential_squared_matches_two_single_steps() {
        let f = eta_bar_power(2);
        let once = tangential_apply(&f, 1);
        assert_eq!(once, f.scale(&int(-2)));
        let twice = tangential_apply(&once, 1);
        assert_eq!(tangential_apply(&f, 2), twice);
        assert_eq!(twice, f.scale(&int(4)));
    }

    #[test]
    fn report_shows_sign_mismatch_at_first_order() {
        let rows = lemma32_report(2, 2);
        let find = |m, b| rows.iter().find(|r| r.m == m && r.beta == b).unwrap();
        let r = find(1, 1);
        assert_eq!((r.lhs.clone(), r.rhs.clone(), r.equal), (int(1), int(-1), false));
        let r = find(0, 1);
        assert_eq!((r.lhs.clone(), r.rhs.clone(), r.equal), (int(0), int(0), true));
        let r = find(2, 2);
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (int(2), int(4)));
    }

    #[test]
    fn stirling_rows() {
        let s = stirling_first_signed(4);
        let got: Vec<i64> = s.iter().map(|v| i64::try_from(v).unwrap()).collect();
        assert_eq!(got, vec![0, -6, 11, -6, 1]);
    }

    #[test]
    fn stirling_identity_holds() {
        assert!(stirling_identity_check(1, 10));
        assert!(stirling_identity_check(5, 10));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let csv = lemma32_csv(&lemma32_report(1, 1));
        assert_eq!(csv, "m,beta,lhs,rhs,equal\n0,1,0,0,true\n1,1,1,-1,false\n");
    }

    proptest! {
        #[test]
        fn tangential_powers_compose(a in 0u32..4, b in 0u32..4, m in 0u32..6, n in 0u32..3) {
            let f = &eta_bar_power(m) + &EtaPoly::monomial([n, 1, 0], int(2));
            let lhs = tangential_apply(&tangential_apply(&f, a), b);
            prop_assert_eq!(lhs, tangential_apply(&f, a + b));
        }

        #[test]
        fn euler_on_monomial_is_power_of_degree(m in 0u32..12, k in 0u32..5) {
            let got = euler_apply(&eta_bar_power(m), k);
            prop_assert_eq!(got, eta_bar_power(m).scale(&int((m as i64).pow(k))));
        }
    }
}
