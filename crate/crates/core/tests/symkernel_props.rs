use pdmlab::symkernel::{is_zero, Axis, Env, Expr, GaussRat, ZeroTestPolicy};
use proptest::prelude::*;

mod common;
use common::{rational_tree, small_rational};

/// Rational trees with bounded sin, cos, arctan and exp of a bounded argument.
fn transcendental_tree() -> impl Strategy<Value = Expr> {
    rational_tree().prop_recursive(2, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.arctan()),
            inner.clone().prop_map(|a| a.cos().exp()),
            (inner.clone(), inner).prop_map(|(a, b)| a * b),
        ]
    })
}

fn axis() -> impl Strategy<Value = Axis> {
    (0usize..3).prop_map(Axis::from_index)
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    let c = prop_oneof![-1.9f64..-0.2, 0.2f64..1.9];
    [c.clone(), c.clone(), c]
}

fn rational_point() -> impl Strategy<Value = [(i64, i64); 3]> {
    let c = (-12i64..=12, 1i64..=5);
    [c.clone(), c.clone(), c]
}

/// Exact value of a rational tree at a rational point.
fn exact_value(e: &Expr, p: &[(i64, i64); 3]) -> GaussRat {
    let images = p.map(|(n, d)| Expr::frac(n, d));
    e.subst_vars(&images)
        .normal()
        .expect("finite at a rational point")
        .as_constant()
        .expect("no free symbols left")
}

fn strict() -> ZeroTestPolicy {
    ZeroTestPolicy::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn derivative_is_linear(e1 in rational_tree(), e2 in rational_tree(), a in small_rational(), b in small_rational(), ax in axis()) {
        let lhs = (&a * &e1 + &b * &e2).diff(ax);
        let rhs = &a * e1.diff(ax) + &b * e2.diff(ax);
        prop_assert!(is_zero(&(lhs - rhs), &strict()).is_proved());
    }

    #[test]
    fn rational_mixed_partials_are_proved_equal(e in rational_tree(), a in axis(), b in axis()) {
        let d = e.diff(a).diff(b) - e.diff(b).diff(a);
        prop_assert!(is_zero(&d, &strict()).is_proved());
    }

    #[test]
    fn transcendental_mixed_partials_vanish(e in transcendental_tree(), a in axis(), b in axis()) {
        let d = e.diff(a).diff(b) - e.diff(b).diff(a);
        let s = is_zero(&d, &strict());
        prop_assert!(s.is_zero(), "{s:?}");
    }

    #[test]
    fn derivative_matches_central_differences(e in transcendental_tree(), ax in axis(), p in point()) {
        let h = 1e-5;
        let at = |shift: f64| {
            let mut q = p;
            q[ax.index()] += shift;
            e.eval(&Env::at(q))
        };
        let exact = e.diff(ax).eval(&Env::at(p)).expect("derivative is finite");
        let (plus, minus, mid) = (at(h).unwrap(), at(-h).unwrap(), at(0.0).unwrap());
        let fd = (plus - minus) / (2.0 * h);
        let scale = exact.abs().max(mid.abs()).max(1.0);
        prop_assert!((exact - fd).abs() <= 1e-6 * scale, "exact {exact} fd {fd}");
    }

    #[test]
    fn normalization_is_a_congruence(a in rational_tree(), b in rational_tree(), c in rational_tree(), p in rational_point()) {
        let e1 = &a * (&b + &c);
        let e2 = &a * &b + &a * &c;
        prop_assert!(is_zero(&(&e1 - &e2), &strict()).is_proved());
        prop_assert_eq!(exact_value(&e1, &p), exact_value(&e2, &p));
    }
}
