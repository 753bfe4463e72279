//! Sparse multivariate polynomials with exact Gaussian-rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact Gaussian rational `a + b i`.
pub type Coeff = Complex<BigRational>;

/// Builds an integer coefficient.
pub fn int(n: i64) -> Coeff {
    Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
}

/// Builds the rational coefficient `num / den`.
pub fn ratio(num: i64, den: i64) -> Coeff {
    Complex::new(
        BigRational::new(BigInt::from(num), BigInt::from(den)),
        BigRational::zero(),
    )
}

pub fn coeff_to_c64(c: &Coeff) -> Complex64 {
    Complex64::new(
        c.re.to_f64().unwrap_or(f64::NAN),
        c.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Polynomial in `N` commuting variables, `Σ c_e x^e`.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly<const N: usize> {
    terms: BTreeMap<[u32; N], Coeff>,
}

/// Polynomial in `(w1, w2)` (or `(z1, z2)` on the quotient side).
pub type BivarPoly = Poly<2>;

/// Polynomial in `(w1, conj w1, w2, conj w2)`, or `(z1, conj z1, z2, conj z2)`.
pub type MixedPoly = Poly<4>;

impl<const N: usize> Poly<N> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Coeff) -> Self {
        Self::monomial([0; N], c)
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn monomial(exps: [u32; N], c: Coeff) -> Self {
        let mut p = Self::zero();
        p.add_term(exps, c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; N];
        e[i] = 1;
        Self::monomial(e, Coeff::one())
    }

    pub fn add_term(&mut self, exps: [u32; N], c: Coeff) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(Coeff::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; N], &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32; N]) -> Coeff {
        self.terms.get(exps).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = *e;
            ne[i] -= 1;
            out.add_term(ne, v * int(e[i] as i64));
        }
        out
    }

    /// Multiplies by `x_i`.
    pub fn mul_var(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            let mut ne = *e;
            ne[i] += 1;
            out.terms.insert(ne, v.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `x_i -> subs[i]`.
    pub fn compose<const M: usize>(&self, subs: &[Poly<M>; N]) -> Poly<M> {
        let mut powers: Vec<Vec<Poly<M>>> = subs.iter().map(|s| vec![Poly::<M>::one(), s.clone()]).collect();
        let mut out = Poly::<M>::zero();
        for (e, v) in &self.terms {
            let mut term = Poly::<M>::constant(v.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &subs[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][k as usize];
            }
            out = &out + &term;
        }
        out
    }

    /// Floating-point evaluation.
    pub fn eval_c64(&self, x: &[Complex64; N]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (e, v) in &self.terms {
            let mut t = coeff_to_c64(v);
            for (xi, &k) in x.iter().zip(e.iter()) {
                if k > 0 {
                    t *= xi.powu(k);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation at Gaussian-rational points.
    pub fn eval_exact(&self, x: &[Coeff; N]) -> Coeff {
        let mut acc = Coeff::zero();
        for (e, v) in &self.terms {
            let mut t = v.clone();
            for (xi, &k) in x.iter().zip(e.iter()) {
                for _ in 0..k {
                    t = &t * xi;
                }
            }
            acc = &acc + &t;
        }
        acc
    }
}

impl<const N: usize> Add for &Poly<N> {
    type Output = Poly<N>;
    fn add(self, rhs: &Poly<N>) -> Poly<N> {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, v.clone());
        }
        out
    }
}

impl<const N: usize> Sub for &Poly<N> {
    type Output = Poly<N>;
    fn sub(self, rhs: &Poly<N>) -> Poly<N> {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, -v.clone());
        }
        out
    }
}

impl<const N: usize> Neg for &Poly<N> {
    type Output = Poly<N>;
    fn neg(self) -> Poly<N> {
        self.scale(&int(-1))
    }
}

impl<const N: usize> Mul for &Poly<N> {
    type Output = Poly<N>;
    fn mul(self, rhs: &Poly<N>) -> Poly<N> {
        let mut out = Poly::zero();
        for (ea, va) in &self.terms {
            for (eb, vb) in &rhs.terms {
                let mut e = [0; N];
                for i in 0..N {
                    e[i] = ea[i] + eb[i];
                }
                out.add_term(e, va * vb);
            }
        }
        out
    }
}

impl<const N: usize> fmt::Debug for Poly<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<const N: usize> fmt::Display for Poly<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, v) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if v.im.is_zero() {
                write!(f, "({})", v.re)?;
            } else {
                write!(f, "({} + {}i)", v.re, v.im)?;
            }
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

/// `w1 - w2` as a bivariate polynomial.
pub fn diagonal_factor() -> BivarPoly {
    &BivarPoly::var(0) - &BivarPoly::var(1)
}

/// Divides `p` by `w1 - w2`, returning `None` unless the division is exact.
pub fn div_by_diagonal(p: &BivarPoly) -> Option<BivarPoly> {
    if p.is_zero() {
        return Some(BivarPoly::zero());
    }
    // View p as a polynomial in w1 whose coefficients live in Q[i][w2].
    let top = p.terms().map(|(e, _)| e[0]).max().unwrap_or(0);
    let mut by_deg: Vec<BivarPoly> = vec![BivarPoly::zero(); top as usize + 1];
    for (e, v) in p.terms() {
        by_deg[e[0] as usize].add_term([0, e[1]], v.clone());
    }
    // Synthetic division by (w1 - w2): q_{k-1} = c_k + w2 q_k.
    let mut quotient = BivarPoly::zero();
    let mut carry = BivarPoly::zero();
    for k in (1..=top as usize).rev() {
        carry = &by_deg[k] + &carry.mul_var(1);
        for (e, v) in carry.terms() {
            quotient.add_term([(k - 1) as u32, e[1]], v.clone());
        }
    }
    let remainder = &by_deg[0] + &carry.mul_var(1);
    remainder.is_zero().then_some(quotient)
}

/// Pulls a holomorphic polynomial in `(z1, z2)` back through
/// `(w1, w2) -> (w1 + w2, w1 w2)`.
pub fn pullback_holomorphic(f: &BivarPoly) -> BivarPoly {
    let w1 = BivarPoly::var(0);
    let w2 = BivarPoly::var(1);
    f.compose(&[&w1 + &w2, &w1 * &w2])
}

/// Pulls a polynomial in `(z1, conj z1, z2, conj z2)` back to
/// `(w1, conj w1, w2, conj w2)`.
pub fn pullback_mixed(f: &MixedPoly) -> MixedPoly {
    let w1 = MixedPoly::var(0);
    let wb1 = MixedPoly::var(1);
    let w2 = MixedPoly::var(2);
    let wb2 = MixedPoly::var(3);
    f.compose(&[&w1 + &w2, &wb1 + &wb2, &w1 * &w2, &wb1 * &wb2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_bivar() -> impl Strategy<Value = BivarPoly> {
        prop::collection::vec(((0u32..5, 0u32..5), -6i64..6), 0..8).prop_map(|ts| {
            let mut p = BivarPoly::zero();
            for ((a, b), c) in ts {
                p.add_term([a, b], int(c));
            }
            p
        })
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut p = BivarPoly::monomial([1, 0], int(3));
        p.add_term([1, 0], int(-3));
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn pullback_of_z2_is_product() {
        let z2 = BivarPoly::var(1);
        let expect = BivarPoly::monomial([1, 1], int(1));
        assert_eq!(pullback_holomorphic(&z2), expect);
    }

    #[test]
    fn discriminant_pulls_back_to_square_of_jacobian() {
        // z1^2 - 4 z2 = (w1 - w2)^2
        let mut disc = BivarPoly::monomial([2, 0], int(1));
        disc.add_term([0, 1], int(-4));
        let d = diagonal_factor();
        assert_eq!(pullback_holomorphic(&disc), &d * &d);
    }

    #[test]
    fn division_rejects_non_multiples() {
        assert!(div_by_diagonal(&BivarPoly::var(0)).is_none());
        assert!(div_by_diagonal(&BivarPoly::one()).is_none());
    }

    proptest! {
        #[test]
        fn diagonal_division_inverts_multiplication(p in arb_bivar()) {
            let q = div_by_diagonal(&(&p * &diagonal_factor())).unwrap();
            prop_assert_eq!(q, p);
        }

        #[test]
        fn derivative_obeys_leibniz(p in arb_bivar(), q in arb_bivar(), i in 0usize..2) {
            let lhs = (&p * &q).derivative(i);
            let rhs = &(&p.derivative(i) * &q) + &(&p * &q.derivative(i));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
