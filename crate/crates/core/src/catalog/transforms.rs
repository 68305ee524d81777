//! Equivalence transformations applied to catalog rows.

use super::{entry, verify_hamiltonian, CatalogError};
use crate::conformal::{apply_transform_with, inversion_search, TransformError, TransformSpec};
use crate::diffop::PdmHamiltonian;
use crate::report::{Annotation, CheckRecord, Status, Tier, VerificationReport};
use crate::symkernel::{is_zero, rat, rat_int, Axis, Expr, ZeroTestPolicy};

fn equal_record(entry: &str, check: &str, a: &Expr, b: &Expr, policy: &ZeroTestPolicy) -> CheckRecord {
    let status = is_zero(&(a - b), &policy.for_label(&format!("{entry}/{check}")));
    CheckRecord::from_zero_statuses(entry, check, [&status])
}

fn constant_record(entry: &str, check: &str, e: &Expr, policy: &ZeroTestPolicy) -> CheckRecord {
    let statuses: Vec<_> = Axis::ALL
        .iter()
        .map(|a| is_zero(&e.diff(*a), &policy.for_label(&format!("{entry}/{check}/{a:?}"))))
        .collect();
    CheckRecord::from_zero_statuses(entry, check, statuses.iter())
}

fn failed(entry: &str, check: &str, e: TransformError) -> CheckRecord {
    CheckRecord::new(entry, check, Tier::Symbolic, Status::Fail).with_detail(e.to_string())
}

/// Transforms row `id`, compares `(f′, V′)` with the expected pair and
/// re-verifies the row's integrals on the transformed Hamiltonian.
fn spot_check(
    tag: &str,
    id: u32,
    t: &TransformSpec,
    expected: impl Fn(&PdmHamiltonian) -> PdmHamiltonian,
    policy: &ZeroTestPolicy,
) -> Result<VerificationReport, CatalogError> {
    let e = entry(id)?;
    let mut r = VerificationReport::new(format!("{tag} on entry {id}"));
    let h2 = match apply_transform_with(t, &e.hamiltonian, policy) {
        Ok(h) => h,
        Err(err) => {
            r.push(failed(tag, "transformed operator has the form p f p - V", err));
            return Ok(r);
        }
    };
    let want = expected(&e.hamiltonian);
    r.push(equal_record(tag, &format!("f' = {}", want.f), &h2.f, &want.f, policy));
    r.push(equal_record(tag, &format!("V' = {}", want.v), &h2.v, &want.v, policy));
    let again = verify_hamiltonian(tag, &h2, &e.integrals, policy)?;
    r.extend(again);
    Ok(r)
}

/// Shift, rotation and dilatation spot checks, and the inversion of row 18.
pub fn verify_equivalence_transforms(policy: &ZeroTestPolicy) -> Result<VerificationReport, CatalogError> {
    let mut r = VerificationReport::new("equivalence transformations");

    let shift = TransformSpec::shift([Expr::zero(), Expr::zero(), Expr::one()]);
    let x3 = Expr::x(3) + Expr::one();
    r.extend(spot_check(
        "shift nu=(0,0,1)",
        10,
        &shift,
        |_| PdmHamiltonian::new(Expr::call("F", vec![x3.clone()]), Expr::call("Ft", vec![x3.clone()])),
        policy,
    )?);

    let rotation = TransformSpec::rotation([
        [rat_int(1), rat_int(0), rat_int(0)],
        [rat_int(0), rat(3, 5), rat(-4, 5)],
        [rat_int(0), rat(4, 5), rat(3, 5)],
    ])
    .expect("orthogonal");
    r.extend(spot_check("rotation about x1", 11, &rotation, PdmHamiltonian::clone, policy)?);

    let dilatation = TransformSpec::dilatation(Expr::param("lambda"));
    r.extend(spot_check("dilatation", 14, &dilatation, PdmHamiltonian::clone, policy)?);

    let tag = "inversion";
    let e18 = entry(18)?;
    match inversion_search(&e18.hamiltonian) {
        Ok(out) => {
            for (w, why) in &out.rejected {
                r.annotate(Annotation::new(tag, "rejected weight", format!("w = {w}: {why}")));
            }
            match (out.weight_exponent, out.hamiltonian) {
                (Some(w), Some(h)) => {
                    r.push(
                        CheckRecord::new(tag, "weight exponent found by search", Tier::Symbolic, Status::Pass)
                            .with_detail(format!("W = r^{w}")),
                    );
                    r.push(constant_record(tag, &format!("f' = {} is constant", h.f), &h.f, policy));
                    r.push(constant_record(tag, &format!("V' = {} is constant", h.v), &h.v, policy));
                }
                _ => r.push(
                    CheckRecord::new(tag, "weight exponent found by search", Tier::Symbolic, Status::Fail)
                        .with_detail("no exponent in -3..=3 gives the form p f p - V"),
                ),
            }
        }
        Err(err) => r.push(failed(tag, "inversion of entry 18", err)),
    }
    Ok(r)
}
