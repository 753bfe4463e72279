use num_complex::Complex64;
use proptest::prelude::*;
use symbidisk_symbolic::poly::{diagonal_factor, div_by_diagonal, int, pullback_holomorphic, ratio};
use symbidisk_symbolic::{apply_expansion, direct_dz, dz_expansion, BivarPoly, Poly, RationalFn};

fn poly(max_deg: u32) -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec((0..=max_deg, 0..=max_deg, -5i64..=5, 1i64..=3), 1..5).prop_map(|terms| {
        let mut p = Poly::zero();
        for (a, b, n, d) in terms {
            p.add_term([a, b], ratio(n, d));
        }
        p
    })
}

fn point() -> impl Strategy<Value = Complex64> {
    (-0.9f64..0.9, -0.9f64..0.9).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #[test]
    fn pullback_is_a_ring_map(f in poly(3), g in poly(3)) {
        prop_assert_eq!(pullback_holomorphic(&(&f * &g)), &pullback_holomorphic(&f) * &pullback_holomorphic(&g));
        prop_assert_eq!(pullback_holomorphic(&(&f + &g)), &pullback_holomorphic(&f) + &pullback_holomorphic(&g));
    }

    #[test]
    fn pullback_is_symmetric(f in poly(4)) {
        let pulled = pullback_holomorphic(&f);
        let swapped = pulled.compose(&[BivarPoly::var(1), BivarPoly::var(0)]);
        prop_assert_eq!(swapped, pulled);
    }

    #[test]
    fn pullback_matches_pointwise_composition(f in poly(4), w1 in point(), w2 in point()) {
        let got = pullback_holomorphic(&f).eval_c64(&[w1, w2]);
        let want = f.eval_c64(&[w1 + w2, w1 * w2]);
        prop_assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()));
    }

    #[test]
    fn expansion_agrees_with_direct_derivative(f in poly(4), a in 0u32..=2, b in 0u32..=2) {
        prop_assume!(a + b > 0);
        let e = dz_expansion([a, b]).unwrap();
        prop_assert_eq!(apply_expansion(&e, &f), RationalFn::polynomial(direct_dz([a, b], &f)));
    }

    #[test]
    fn diagonal_division_inverts_multiplication(f in poly(3)) {
        let g = pullback_holomorphic(&f);
        prop_assert_eq!(div_by_diagonal(&(&diagonal_factor() * &g)), Some(g));
    }
}

#[test]
fn odd_polynomials_do_not_divide() {
    assert_eq!(div_by_diagonal(&BivarPoly::monomial([1, 0], int(1))), None);
}
