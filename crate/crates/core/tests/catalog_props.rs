use std::collections::BTreeMap;

use pdmlab::catalog::{entry, verify_hamiltonian, Integral};
use pdmlab::diffop::PdmHamiltonian;
use pdmlab::symkernel::{Expr, ExprKind, FunctionDef, ZeroTestPolicy};
use proptest::prelude::*;

fn arities(e: &Expr, out: &mut BTreeMap<String, usize>) {
    match e.kind() {
        ExprKind::Add(ts) | ExprKind::Mul(ts) => ts.iter().for_each(|t| arities(t, out)),
        ExprKind::Pow(b, _) | ExprKind::Func(_, b) => arities(b, out),
        ExprKind::Abstract { name, args, .. } => {
            out.insert(name.to_string(), args.len());
            args.iter().for_each(|a| arities(a, out));
        }
        _ => {}
    }
}

/// Three positive rational bodies in the first `arity` coordinates.
fn body(choice: usize, arity: usize) -> Expr {
    let s = Expr::sum((1..=arity).map(|i| Expr::x(i).powi(2)));
    let u = Expr::sum((1..=arity).map(Expr::x));
    match choice {
        0 => Expr::one() + &s,
        1 => (Expr::int(2) + u.powi(2)) / (Expr::one() + &s),
        _ => Expr::int(3) + (Expr::one() + s.powi(2)).recip(),
    }
}

fn instantiate(h: &PdmHamiltonian, defs: &[(String, FunctionDef)]) -> PdmHamiltonian {
    let sub = |e: &Expr| defs.iter().fold(e.clone(), |acc, (n, d)| acc.instantiate(n, d));
    PdmHamiltonian::new(sub(&h.f), sub(&h.v))
}

/// Verbatim row and its variants that pass with abstract functions.
fn passing_cases(id: u32) -> Vec<(PdmHamiltonian, Vec<Integral>)> {
    let e = entry(id).unwrap();
    let policy = ZeroTestPolicy::default();
    let mut cases = vec![(e.hamiltonian.clone(), e.integrals.clone())];
    cases.extend(e.variants.iter().map(|v| (v.hamiltonian.clone(), v.integrals.clone())));
    cases
        .into_iter()
        .filter(|(h, ints)| verify_hamiltonian("abstract", h, ints, &policy).unwrap().passed())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn concrete_functions_preserve_passes(id in 1u32..=11, choices in proptest::collection::vec(0usize..3, 4)) {
        let policy = ZeroTestPolicy::default();
        let cases = passing_cases(id);
        prop_assert!(!cases.is_empty(), "row {id} has no passing reading");
        for (h, ints) in cases {
            let mut ar = BTreeMap::new();
            arities(&h.f, &mut ar);
            arities(&h.v, &mut ar);
            let defs: Vec<(String, FunctionDef)> = ar
                .iter()
                .enumerate()
                .map(|(k, (n, a))| (n.clone(), FunctionDef::new(*a, body(choices[k % choices.len()], *a))))
                .collect();
            let hc = instantiate(&h, &defs);
            let r = verify_hamiltonian(&format!("{id}"), &hc, &ints, &policy).unwrap();
            prop_assert!(r.passed(), "row {id} with {choices:?}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }
}
