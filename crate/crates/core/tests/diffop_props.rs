use pdmlab::diffop::{
    abstract_first_order, commute_qq, conformal_killing_residuals, extract_determining, killing_to_op, killing_vector,
    FirstOrderOp, KillingParams, PdmHamiltonian,
};
use pdmlab::symkernel::{is_zero, Expr, FunctionDef, ZeroTestPolicy};
use proptest::prelude::*;

mod common;
use common::{c3_element, polynomial, rational};

fn killing_params() -> impl Strategy<Value = KillingParams> {
    (
        [rational(), rational(), rational()],
        [rational(), rational(), rational()],
        rational(),
        [rational(), rational(), rational()],
        rational(),
    )
        .prop_map(|(lambda, mu_rot, omega, nu, c0)| KillingParams {
            lambda,
            mu_rot,
            omega,
            nu,
            c0,
        })
}

fn proved_zero(q: &FirstOrderOp) -> bool {
    let policy = ZeroTestPolicy::default();
    q.slots().iter().all(|(_, e)| is_zero(e, &policy).is_proved())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn self_commutator_vanishes(q in c3_element()) {
        prop_assert!(proved_zero(&commute_qq(&q, &q).unwrap()));
    }

    #[test]
    fn jacobi_identity(a in c3_element(), b in c3_element(), c in c3_element()) {
        let br = |x: &FirstOrderOp, y: &FirstOrderOp| commute_qq(x, y).unwrap();
        let sum = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
        prop_assert!(proved_zero(&sum));
    }

    #[test]
    fn concrete_commutator_matches_generic_residuals(
        f in polynomial(),
        v in polynomial(),
        xi in [polynomial(), polynomial(), polynomial()],
        eta in polynomial(),
    ) {
        let generic = extract_determining(&PdmHamiltonian::abstract_symbols(), &abstract_first_order()).unwrap();
        let mut defs = vec![("f", f.clone()), ("V", v.clone()), ("eta", eta.clone())];
        let names = ["xi1", "xi2", "xi3"];
        for (n, e) in names.iter().zip(xi.iter()) {
            defs.push((n, e.clone()));
        }
        let concrete = extract_determining(&PdmHamiltonian::new(f, v), &FirstOrderOp::new(xi, eta)).unwrap();
        prop_assert_eq!(generic.len(), concrete.len());
        for (g, c) in generic.iter().zip(&concrete) {
            let mut inst = g.clone();
            for (name, body) in &defs {
                inst = inst.instantiate(name, &FunctionDef::new(3, body.clone()));
            }
            prop_assert!(is_zero(&(inst - c), &ZeroTestPolicy::default()).is_proved());
        }
    }

    #[test]
    fn killing_vectors_are_conformal(p in killing_params()) {
        for r in conformal_killing_residuals(&killing_vector(&p)) {
            prop_assert!(is_zero(&r, &ZeroTestPolicy::default()).is_proved());
        }
    }

    #[test]
    fn symmetrized_constant_is_real(p in killing_params()) {
        let q = killing_to_op(&p);
        let d = q.eta_tilde() - Expr::rational(p.c0.clone());
        prop_assert!(is_zero(&d, &ZeroTestPolicy::default()).is_proved());
    }
}
