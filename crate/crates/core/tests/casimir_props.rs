use pdmlab::casimir::{algebraic_spectrum_so4, basis, build_casimirs, q_g_basis, AlgebraTag};
use pdmlab::diffop::{commute_qq, commute_second_first, compose_first_order, levi_civita, FirstOrderOp, SecondOrderOp};
use pdmlab::symkernel::{is_zero, Expr, ZeroTestPolicy};
use proptest::prelude::*;

fn first_vanishes(q: &FirstOrderOp) -> bool {
    let p = ZeroTestPolicy::default();
    q.slots().iter().all(|(_, e)| is_zero(e, &p).is_proved())
}

fn second_vanishes(s: &SecondOrderOp) -> bool {
    let p = ZeroTestPolicy::default();
    s.slots().iter().all(|(_, e)| is_zero(e, &p).is_proved())
}

/// `i ε_{abc} x_c` summed over `c`.
fn i_eps(a: usize, b: usize, x: &[FirstOrderOp; 3]) -> FirstOrderOp {
    (0..3).fold(FirstOrderOp::zero(), |acc, c| {
        acc.add(&x[c].scale(&(Expr::i() * Expr::int(levi_civita(a, b, c)))))
    })
}

fn sum_of_squares(x: &[FirstOrderOp; 3]) -> SecondOrderOp {
    x.iter()
        .fold(SecondOrderOp::zero(), |acc, q| acc.add(&compose_first_order(q, q).unwrap()))
}

#[test]
fn so4_splits_into_two_commuting_su2() {
    let (q, g) = q_g_basis();
    for a in 0..3 {
        for b in 0..3 {
            let qq = commute_qq(&q[a], &q[b]).unwrap().sub(&i_eps(a, b, &q));
            let gg = commute_qq(&g[a], &g[b]).unwrap().sub(&i_eps(a, b, &g));
            assert!(first_vanishes(&qq), "[q{a}, q{b}]");
            assert!(first_vanishes(&gg), "[g{a}, g{b}]");
            assert!(first_vanishes(&commute_qq(&q[a], &g[b]).unwrap()), "[q{a}, g{b}]");
        }
    }
}

#[test]
fn casimirs_are_sums_of_su2_squares() {
    let (q, g) = q_g_basis();
    let pair = build_casimirs(AlgebraTag::So4).unwrap();
    let two = Expr::int(2);
    let q2 = sum_of_squares(&q);
    let g2 = sum_of_squares(&g);
    assert!(second_vanishes(&pair.c1.sub(&q2.add(&g2).scale(&two))));
    assert!(second_vanishes(&pair.c2.sub(&q2.sub(&g2).scale(&two))));
}

#[test]
fn casimirs_are_central() {
    for tag in AlgebraTag::ALL {
        let pair = build_casimirs(tag).unwrap();
        for (label, m) in basis(tag) {
            for (name, c) in [("C1", &pair.c1), ("C2", &pair.c2)] {
                let r = commute_second_first(c, &m).unwrap();
                assert!(second_vanishes(&r), "{tag}: [{name}, {label}]");
            }
        }
    }
}

proptest! {
    #[test]
    fn casimir_value_bridges_to_levels(n in 1i64..=1000) {
        let level = algebraic_spectrum_so4(n).unwrap();
        let q = (n - 1) as f64 / 2.0;
        prop_assert_eq!(4.0 * q * (q + 1.0), (n * n - 1) as f64);
        prop_assert_eq!(level.casimir, n * n - 1);
        prop_assert_eq!(level.etilde, 4 * n * n + 5);
        prop_assert_eq!(level.allowed_l.len() as i64, n);
    }

    #[test]
    fn levels_below_one_are_rejected(n in -50i64..=0) {
        prop_assert!(algebraic_spectrum_so4(n).is_err());
    }
}
