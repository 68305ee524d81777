#![allow(dead_code)]

use pdmlab::conformal::{generator, GeneratorId};
use pdmlab::diffop::FirstOrderOp;
use pdmlab::symkernel::{rat, Expr, Rational};
use proptest::prelude::*;

pub fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (1usize..=3).prop_map(Expr::x),
        (-3i64..=3).prop_map(Expr::int),
        (-3i64..=3, 1i64..=4).prop_map(|(n, d)| Expr::frac(n, d)),
    ]
}

/// Rational trees whose denominators are of the form `1 + e²`.
pub fn rational_tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(|a| a.powi(2)),
            inner.prop_map(|a| (Expr::one() + a.powi(2)).recip()),
        ]
    })
}

pub fn small_rational() -> impl Strategy<Value = Expr> {
    (-9i64..=9, 1i64..=7).prop_map(|(n, d)| Expr::frac(n, d))
}


pub fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

/// Polynomials of low degree in the coordinates.
pub fn polynomial() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner).prop_map(|(a, b)| a * b),
        ]
    })
}

/// A random rational combination of two c(3) generators.
pub fn c3_element() -> impl Strategy<Value = FirstOrderOp> {
    let ids = GeneratorId::c3_basis();
    let n = ids.len();
    (0..n, 0..n, small_rational(), small_rational()).prop_map(move |(i, j, a, b)| {
        generator(ids[i]).scale(&a).add(&generator(ids[j]).scale(&b))
    })
}
