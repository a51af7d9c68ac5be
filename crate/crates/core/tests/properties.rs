use nilspec::heat::{fit_alpha, log_grid};
use nilspec::heisenberg::{HeisenbergContext, LaplacianMode};
use nilspec::rule::Ops;
use nilspec::{BasisElement, FormWord, Generator, LinearRule, Space, SparseVector};
use num_complex::Complex64;
use proptest::prelude::*;

const SPACE: Space = Space { modes: 3, central: 1 };

fn element() -> impl Strategy<Value = BasisElement> {
    (prop::collection::vec(0u32..4, 3), 0u32..8, 0u32..8, 0u32..2).prop_map(|(beta, h, a, c)| {
        BasisElement::new(beta, FormWord { holo: h, anti: a, central: c })
    })
}

fn vector() -> impl Strategy<Value = SparseVector> {
    prop::collection::vec((element(), -1.0f64..1.0, -1.0f64..1.0), 1..6)
        .prop_map(|terms| SparseVector::from_terms(terms.into_iter().map(|(e, re, im)| (e, Complex64::new(re, im)))))
}

fn generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        (0usize..3).prop_map(Generator::Holo),
        (0usize..3).prop_map(Generator::Anti),
        Just(Generator::Central(0)),
    ]
}

fn residual(rule: &LinearRule, v: &SparseVector) -> f64 {
    rule.apply(v).max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn exterior_anticommutation(g in generator(), h in generator(), v in vector()) {
        let o = Ops::new(SPACE);
        let ee = o.e(g).anticommutator(&o.e(h)).unwrap();
        let ii = o.i(g).anticommutator(&o.i(h)).unwrap();
        let ei = o.e(g).anticommutator(&o.i(h)).unwrap();
        prop_assert!(residual(&ee, &v) < 1e-14);
        prop_assert!(residual(&ii, &v) < 1e-14);
        let expected = if g == h { v.clone() } else { SparseVector::new() };
        prop_assert!(ei.apply(&v).sub(&expected).max_abs() < 1e-14);
    }

    #[test]
    fn ladder_commutation(i in 0usize..3, j in 0usize..3, v in vector()) {
        let o = Ops::new(SPACE);
        let c = o.ann(i).commutator(&o.cre(j)).unwrap();
        let expected = if i == j { v.clone() } else { SparseVector::new() };
        prop_assert!(c.apply(&v).sub(&expected).max_abs() < 1e-12);
        prop_assert!(residual(&o.cre(i).commutator(&o.cre(j)).unwrap(), &v) < 1e-12);
    }

    #[test]
    fn adjoint_contract(x in vector(), y in vector(), k in 0.25f64..3.0) {
        let ctx = HeisenbergContext::new(3, k, 2).unwrap();
        for rule in [ctx.d(), ctx.laplacian(LaplacianMode::Explicit), ctx.u_pair(0, 2).unwrap()] {
            let lhs = rule.apply(&x).inner(&y);
            let rhs = x.inner(&rule.adjoint().apply(&y));
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
        }
        let d = ctx.d();
        let lhs = d.apply(&x).inner(&y);
        let rhs = x.inner(&ctx.d_star().apply(&y));
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn differential_squares_vanish(v in vector(), k in 0.25f64..3.0) {
        let ctx = HeisenbergContext::new(3, k, 0).unwrap();
        let (d, ds) = (ctx.d(), ctx.d_star());
        prop_assert!(d.apply(&d.apply(&v)).max_abs() < 1e-10);
        prop_assert!(ds.apply(&ds.apply(&v)).max_abs() < 1e-10);
    }

    #[test]
    fn swap_is_an_involution(i in 0usize..3, j in 0usize..3, v in vector()) {
        prop_assume!(i != j);
        let c = LinearRule::chi(SPACE, i, j).unwrap();
        prop_assert!(c.apply(&c.apply(&v)).sub(&v).max_abs() < 1e-15);
    }

    #[test]
    fn laplacian_modes_agree(v in vector(), k in 0.25f64..3.0) {
        let ctx = HeisenbergContext::new(3, k, 1).unwrap();
        let a = ctx.laplacian(LaplacianMode::Composed).apply(&v);
        let b = ctx.laplacian(LaplacianMode::Explicit).apply(&v);
        prop_assert!(a.sub(&b).max_abs() < 1e-10);
    }

    #[test]
    fn power_law_exponent(alpha in 0.5f64..6.0, c in 0.1f64..10.0) {
        let s: Vec<(f64, f64)> = log_grid(1e2, 1e5, 25).into_iter().map(|t| (t, c * t.powf(-alpha))).collect();
        let e = fit_alpha(&s, 8).unwrap();
        prop_assert!((e.alpha_hat - alpha).abs() < 1e-8);
    }
}
