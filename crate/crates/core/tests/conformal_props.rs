use pdmlab::catalog::entry;
use pdmlab::conformal::{apply_transform, transform_operator, TransformSpec};
use pdmlab::diffop::{commute_hq, SecondOrderOp};
use pdmlab::symkernel::{is_zero, rat, Expr, ZeroTestPolicy};
use proptest::prelude::*;

mod common;
use common::small_rational;

/// Rational rotation matrix of the quaternion `(a, b, c, d)`.
fn quaternion_rotation(q: [i64; 4]) -> TransformSpec {
    let [a, b, c, d] = q;
    let n = a * a + b * b + c * c + d * d;
    let m = [
        [a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
        [2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)],
        [2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d],
    ];
    TransformSpec::rotation(m.map(|row| row.map(|v| rat(v, n)))).expect("orthogonal with unit determinant")
}

fn transform() -> impl Strategy<Value = TransformSpec> {
    prop_oneof![
        [small_rational(), small_rational(), small_rational()].prop_map(TransformSpec::shift),
        [-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3]
            .prop_filter("nonzero quaternion", |q| q.iter().any(|v| *v != 0))
            .prop_map(quaternion_rotation),
        small_rational().prop_map(TransformSpec::dilatation),
        Just(TransformSpec::dilatation(Expr::param("lambda"))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transforms_carry_integrals_along(id in 12u32..=18, t in transform()) {
        let e = entry(id).unwrap();
        let policy = ZeroTestPolicy::default();
        let vanishes = |c: &SecondOrderOp| c.slots().iter().all(|(_, r)| is_zero(r, &policy).is_zero());
        let mut cases = vec![(e.hamiltonian.clone(), e.integrals.clone())];
        cases.extend(e.variants.iter().map(|v| (v.hamiltonian.clone(), v.integrals.clone())));
        let mut carried = 0;
        for (h, ints) in cases {
            let h2 = apply_transform(&t, &h).unwrap();
            for q in ints.iter().filter(|q| vanishes(&commute_hq(&h, &q.op()).unwrap())) {
                let q2 = transform_operator(&t, &q.op());
                prop_assert!(vanishes(&commute_hq(&h2, &q2).unwrap()), "row {id} {}", q.label);
                carried += 1;
            }
        }
        prop_assert!(carried > 0);
    }
}
