//! Linear algebra on the span of conformal operators: `ξ` of degree ≤ 2 and
//! `η` affine, with coefficients in the field of normal forms (parameters
//! such as `alpha` or `cos c` act as independent indeterminates).

use crate::diffop::FirstOrderOp;
use crate::symkernel::{Axis, Expr, KernelError, NormalForm};

/// Exponents of all monomials of degree ≤ 2 in three variables.
fn monomials() -> Vec<[u8; 3]> {
    let mut v = Vec::new();
    for a in 0..=2u8 {
        for b in 0..=2 - a {
            for c in 0..=2 - a - b {
                v.push([a, b, c]);
            }
        }
    }
    v
}

fn factorial(n: u8) -> i64 {
    (1..=i64::from(n)).product()
}

/// Taylor coefficients at the origin of each slot `ξ¹, ξ², ξ³, η` up to
/// degree two: a vector of length 40.
pub fn coordinates(q: &FirstOrderOp) -> Result<Vec<NormalForm>, KernelError> {
    let origin = [Expr::zero(), Expr::zero(), Expr::zero()];
    let mut out = Vec::with_capacity(40);
    for (_, slot) in q.slots() {
        for m in monomials() {
            let mut d = slot.clone();
            for (i, k) in m.iter().enumerate() {
                for _ in 0..*k {
                    d = d.diff(Axis::from_index(i));
                }
            }
            let denom: i64 = m.iter().map(|k| factorial(*k)).product();
            let v = (d.subst_vars(&origin) * Expr::frac(1, denom)).normal()?.clone();
            out.push(v);
        }
    }
    Ok(out)
}

/// Coefficients `c` with `Σ cⱼ·basisⱼ = target`, free columns set to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub coefficients: Vec<NormalForm>,
}

/// Row reduction of the augmented system `[cols | rhs]`; returns pivot
/// columns and the reduced rows.
fn reduce(cols: &[Vec<NormalForm>], rhs: Option<&[NormalForm]>) -> (Vec<usize>, Vec<Vec<NormalForm>>) {
    let n = cols.len();
    let m = cols.first().map_or_else(|| rhs.map_or(0, |r| r.len()), |c| c.len());
    let width = n + usize::from(rhs.is_some());
    let mut rows: Vec<Vec<NormalForm>> = (0..m)
        .map(|i| {
            let mut r: Vec<NormalForm> = cols.iter().map(|c| c[i].clone()).collect();
            if let Some(b) = rhs {
                r.push(b[i].clone());
            }
            r
        })
        .filter(|r: &Vec<NormalForm>| r.iter().any(|e| !e.is_zero()))
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..n {
        let Some(p) = (top..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(top, p);
        let inv = rows[top][col].recip().expect("nonzero pivot");
        for k in col..width {
            rows[top][k] = rows[top][k].mul(&inv);
        }
        for r in 0..rows.len() {
            if r != top && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for k in col..width {
                    let t = rows[top][k].mul(&f);
                    rows[r][k] = rows[r][k].sub(&t);
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    (pivots, rows)
}

/// Solves for `target` in the span of `basis` (given by coordinates).
pub fn decompose(basis: &[Vec<NormalForm>], target: &[NormalForm]) -> Option<Decomposition> {
    let n = basis.len();
    let (pivots, rows) = reduce(basis, Some(target));
    // Inconsistent if some row below the pivots has a nonzero right side.
    if rows.iter().skip(pivots.len()).any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut coefficients = vec![NormalForm::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        coefficients[c] = rows[r][n].clone();
    }
    Some(Decomposition { coefficients })
}

/// Rank of a family of operators given by coordinates.
pub fn rank(basis: &[Vec<NormalForm>]) -> usize {
    reduce(basis, None).0.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{generator, GeneratorId};

    #[test]
    fn coordinates_of_k3() {
        let c = coordinates(&generator(GeneratorId::K(3))).unwrap();
        assert_eq!(c.len(), 40);
        assert_eq!(monomials().len(), 10);
        assert!(c.iter().filter(|e| !e.is_zero()).count() >= 5);
    }

    #[test]
    fn c3_is_ten_dimensional() {
        let b: Vec<_> = GeneratorId::c3_basis()
            .into_iter()
            .map(|g| coordinates(&generator(g)).unwrap())
            .collect();
        assert_eq!(rank(&b), 10);
        let so14: Vec<_> = GeneratorId::so14_basis()
            .into_iter()
            .map(|g| coordinates(&generator(g)).unwrap())
            .collect();
        assert_eq!(rank(&so14), 10);
    }

    #[test]
    fn decompose_recovers_combination() {
        let ids = GeneratorId::c3_basis();
        let b: Vec<_> = ids.iter().map(|g| coordinates(&generator(*g)).unwrap()).collect();
        let t = generator(GeneratorId::M(4, 2));
        let d = decompose(&b, &coordinates(&t).unwrap()).unwrap();
        let half = NormalForm::constant(&crate::symkernel::GaussRat::frac(1, 2));
        assert_eq!(d.coefficients[1], half.neg());
        assert_eq!(d.coefficients[8], half);
        // a non-conformal field is outside the span
        let bad = FirstOrderOp::new([Expr::x(1).powi(2), Expr::zero(), Expr::zero()], Expr::zero());
        assert!(decompose(&b, &coordinates(&bad).unwrap()).is_none());
    }
}
