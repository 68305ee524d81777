//! Shipped subalgebra data and closure checks.

use rayon::prelude::*;
use serde::Deserialize;

use super::linalg::{coordinates, decompose, rank};
use super::{Combination, ConformalError};
use crate::diffop::{commute_qq, FirstOrderOp};
use crate::report::{Annotation, CheckRecord, Status, Tier, VerificationReport};
use crate::symkernel::NormalForm;

const SHIPPED: &str = include_str!("../../data/subalgebras.toml");

/// One record of the subalgebra data file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SubalgebraSpec {
    pub id: String,
    /// Dimension as labeled in the source list.
    pub dimension: usize,
    pub basis: Vec<String>,
    #[serde(default)]
    pub params: Vec<String>,
    #[serde(default)]
    pub ranges: Option<String>,
    /// Set when the source record is known to be irregular; failures of
    /// such a record are reported as annotations.
    #[serde(default)]
    pub flagged: Option<String>,
}

impl SubalgebraSpec {
    pub fn combinations(&self) -> Result<Vec<Combination>, ConformalError> {
        self.basis.iter().map(|b| Combination::parse(b)).collect()
    }
}

#[derive(Debug, Deserialize)]
struct DataFile {
    version: u32,
    subalgebra: Vec<SubalgebraSpec>,
}

/// The shipped list, in file order.
pub fn shipped_subalgebras() -> Result<Vec<SubalgebraSpec>, ConformalError> {
    let f: DataFile = toml::from_str(SHIPPED).map_err(|e| ConformalError::Data(e.to_string()))?;
    if f.version != 1 {
        return Err(ConformalError::Data(format!("unsupported version {}", f.version)));
    }
    Ok(f.subalgebra)
}

/// Result of a closure computation over a family of operators.
#[derive(Debug, Clone)]
pub struct ClosureOutcome {
    pub rank: usize,
    /// `((i, j), coefficients of [bᵢ, bⱼ] in the basis)` for closed pairs.
    pub brackets: Vec<((usize, usize), Vec<NormalForm>)>,
    pub report: VerificationReport,
}

impl ClosureOutcome {
    pub fn closed(&self) -> bool {
        self.report.passed()
    }
}

/// Checks `[bᵢ, bⱼ] ∈ span(b)` for every pair, with parameters kept symbolic.
pub fn closure(entry: &str, labels: &[String], ops: &[FirstOrderOp]) -> Result<ClosureOutcome, ConformalError> {
    let coords: Vec<Vec<NormalForm>> = ops
        .par_iter()
        .map(coordinates)
        .collect::<Result<_, _>>()
        .map_err(|e| ConformalError::DiffOp(e.into()))?;
    let rank = rank(&coords);
    let pairs: Vec<(usize, usize)> = (0..ops.len())
        .flat_map(|i| (i + 1..ops.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<(CheckRecord, Option<Vec<NormalForm>>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let label = format!("[{}, {}] in span", labels[i], labels[j]);
            let fail = |d: String| (CheckRecord::new(entry, label.clone(), Tier::Symbolic, Status::Fail).with_detail(d), None);
            let c = match commute_qq(&ops[i], &ops[j]) {
                Ok(c) => c,
                Err(e) => return fail(e.to_string()),
            };
            let Ok(cc) = coordinates(&c) else {
                return fail("non-polynomial commutator".into());
            };
            let Some(d) = decompose(&coords, &cc) else {
                return fail("commutator leaves the span".into());
            };
            // Confirm exactly, including terms beyond degree two.
            let back = d
                .coefficients
                .iter()
                .zip(ops)
                .fold(FirstOrderOp::zero(), |acc, (k, q)| acc.add(&q.scale(&k.to_expr())));
            let exact = c
                .sub(&back)
                .slots()
                .iter()
                .all(|(_, e)| e.normal().map(NormalForm::is_zero).unwrap_or(false));
            if !exact {
                return fail("decomposition does not reproduce the commutator".into());
            }
            (
                CheckRecord::new(entry, label, Tier::Symbolic, Status::Pass).with_residual(0.0),
                Some(d.coefficients),
            )
        })
        .collect();
    let mut report = VerificationReport::new(format!("closure: {entry}"));
    let mut brackets = Vec::new();
    for (p, (rec, coeffs)) in pairs.into_iter().zip(results) {
        report.push(rec);
        if let Some(c) = coeffs {
            brackets.push((p, c));
        }
    }
    Ok(ClosureOutcome {
        rank,
        brackets,
        report,
    })
}

/// Closure of one shipped record; flagged records turn failures into
/// annotations and every record reports its rank.
pub fn subalgebra_closure(s: &SubalgebraSpec) -> Result<ClosureOutcome, ConformalError> {
    let combos = s.combinations()?;
    let ops: Vec<FirstOrderOp> = combos.iter().map(Combination::to_op).collect();
    let mut out = closure(&s.id, &s.basis, &ops)?;
    if out.rank != s.dimension {
        out.report.annotate(Annotation::new(
            &s.id,
            "rank",
            format!(
                "labeled dimension {} but the listed elements span rank {} ({} entries)",
                s.dimension,
                out.rank,
                s.basis.len()
            ),
        ));
    }
    if let Some(note) = &s.flagged {
        out.report.annotate(Annotation::new(&s.id, "source irregularity", note.clone()));
        let failed: Vec<CheckRecord> = out.report.failures().cloned().collect();
        if !failed.is_empty() {
            out.report.checks.retain(CheckRecord::passed);
            for f in failed {
                out.report.annotate(Annotation::new(
                    &s.id,
                    "closure as encoded",
                    format!("{}: {}", f.check, f.detail.unwrap_or_default()),
                ));
            }
        }
    }
    Ok(out)
}

/// Closure report for every shipped record.
pub fn verify_all_subalgebras() -> Result<VerificationReport, ConformalError> {
    let specs = shipped_subalgebras()?;
    let outs: Vec<ClosureOutcome> = specs
        .par_iter()
        .map(subalgebra_closure)
        .collect::<Result<_, _>>()?;
    let mut r = VerificationReport::new("subalgebra closure");
    for o in outs {
        r.extend(o.report);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(id: &str, basis: &[&str]) -> SubalgebraSpec {
        SubalgebraSpec {
            id: id.into(),
            dimension: basis.len(),
            basis: basis.iter().map(|s| s.to_string()).collect(),
            params: vec![],
            ranges: None,
            flagged: None,
        }
    }

    #[test]
    fn data_file_loads() {
        let s = shipped_subalgebras().unwrap();
        assert_eq!(s.len(), 31);
        assert_eq!(s[0].id, "m1.1");
        for r in &s {
            r.combinations().unwrap();
        }
    }

    #[test]
    fn small_examples() {
        let o = subalgebra_closure(&spec("a", &["M21"])).unwrap();
        assert!(o.closed());
        assert!(o.report.checks.is_empty());
        let o = subalgebra_closure(&spec("b", &["M43", "M21"])).unwrap();
        assert!(o.closed());
        assert!(o.brackets[0].1.iter().all(NormalForm::is_zero));
        let o = subalgebra_closure(&spec("c", &["M43 - M12", "M42 - M31", "M41 - M23"])).unwrap();
        assert!(o.closed());
        assert_eq!(o.rank, 3);
    }

    #[test]
    fn non_subalgebra_is_rejected() {
        let o = subalgebra_closure(&spec("x", &["P1", "K1"])).unwrap();
        assert!(!o.closed());
    }

    #[test]
    fn parametric_closure() {
        let o = subalgebra_closure(&spec("p", &["(cos c) M12 - (sin c) M04", "M42 - M02", "M41 - M01"])).unwrap();
        assert!(o.closed(), "{:?}", o.report.failures().collect::<Vec<_>>());
    }
}
