//! Equivalence transformations: shifts, rotations, dilatations and the
//! inversion `x → x/r²` combined with a power-of-`r` conjugation.
//!
//! Every transformation is a substitution `x = X(y)` of the old coordinates
//! in terms of new ones, followed by renaming `y` back to `x`. A shift by
//! `ν` turns `F(x₃)` into `F(x₃ + ν₃)`.

use thiserror::Error;

use crate::diffop::{hamiltonian_to_op, DiffOpError, FirstOrderOp, PdmHamiltonian, SecondOrderOp};
use crate::symkernel::{is_zero, rat, rat_int, Axis, Expr, Rational, ZeroStatus, ZeroTestPolicy};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("rotation matrix is not orthogonal: RᵀR − 1 has entry {0}")]
    NotOrthogonal(String),
    #[error("inversion needs rational f and V; `{0}` is not rational")]
    NotRational(String),
    #[error("conjugated operator is not of the form p f p − V: {obstruction}")]
    Form { obstruction: String },
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransformSpec {
    Shift { nu: [Expr; 3] },
    /// `x = R·y`.
    Rotation { matrix: [[Expr; 3]; 3] },
    /// `x = e^λ·y`, momenta scale by `e^{−λ}`.
    Dilatation { lambda: Expr },
    /// `x = y/|y|²` followed by conjugation with `W = |y|^w`.
    InversionConjugation { weight_exponent: i64 },
}

impl TransformSpec {
    pub fn shift(nu: [Expr; 3]) -> Self {
        TransformSpec::Shift { nu }
    }

    /// A rational rotation; `RᵀR = 1` is checked exactly.
    pub fn rotation(m: [[Rational; 3]; 3]) -> Result<Self, TransformError> {
        for i in 0..3 {
            for j in 0..3 {
                let mut s = rat_int(0);
                for k in 0..3 {
                    s += &m[k][i] * &m[k][j];
                }
                let target = rat_int(i64::from(i == j));
                if s != target {
                    return Err(TransformError::NotOrthogonal(format!("({i},{j}) = {s}")));
                }
            }
        }
        Ok(TransformSpec::Rotation {
            matrix: std::array::from_fn(|i| std::array::from_fn(|j| Expr::rational(m[i][j].clone()))),
        })
    }

    /// Rotation by a symbolic angle about a coordinate axis.
    pub fn rotation_about(axis: Axis, angle: &Expr) -> Self {
        let (c, s) = (angle.cos(), angle.sin());
        let a = axis.index();
        let (p, q) = ((a + 1) % 3, (a + 2) % 3);
        let mut m: [[Expr; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| Expr::int(i64::from(i == j))));
        m[p][p] = c.clone();
        m[q][q] = c;
        m[p][q] = -&s;
        m[q][p] = s;
        TransformSpec::Rotation { matrix: m }
    }

    pub fn dilatation(lambda: Expr) -> Self {
        TransformSpec::Dilatation { lambda }
    }

    pub fn inversion(weight_exponent: i64) -> Self {
        TransformSpec::InversionConjugation { weight_exponent }
    }

    /// `(X(y), Y(x), W(y))`: old coordinates, new coordinates, multiplier.
    fn maps(&self) -> ([Expr; 3], [Expr; 3], Expr) {
        let x: [Expr; 3] = std::array::from_fn(|i| Expr::x(i + 1));
        match self {
            TransformSpec::Shift { nu } => (
                std::array::from_fn(|i| &x[i] + &nu[i]),
                std::array::from_fn(|i| &x[i] - &nu[i]),
                Expr::one(),
            ),
            TransformSpec::Rotation { matrix } => (
                std::array::from_fn(|i| Expr::sum((0..3).map(|j| &matrix[i][j] * &x[j]))),
                std::array::from_fn(|i| Expr::sum((0..3).map(|j| &matrix[j][i] * &x[j]))),
                Expr::one(),
            ),
            TransformSpec::Dilatation { lambda } => {
                let s = lambda.exp();
                let inv = s.recip();
                (
                    std::array::from_fn(|i| &s * &x[i]),
                    std::array::from_fn(|i| &inv * &x[i]),
                    Expr::one(),
                )
            }
            TransformSpec::InversionConjugation { weight_exponent } => {
                let inv: [Expr; 3] = std::array::from_fn(|i| &x[i] / Expr::r2());
                let w = Expr::r2().pow(rat(*weight_exponent, 2));
                (inv.clone(), inv, w)
            }
        }
    }
}

/// `∂Yᶜ/∂xᵃ`.
fn jacobian(y: &[Expr; 3]) -> [[Expr; 3]; 3] {
    std::array::from_fn(|c| std::array::from_fn(|a| y[c].diff(Axis::from_index(a))))
}

/// Rewrites `S` acting on `φ(x) = ψ(Y(x))` as an operator on `ψ(y)`, then
/// substitutes `x = X(y)` and renames `y → x`.
pub fn change_variables_second(s: &SecondOrderOp, y_of_x: &[Expr; 3], x_of_y: &[Expr; 3]) -> SecondOrderOp {
    let j = jacobian(y_of_x);
    let a: [[Expr; 3]; 3] = std::array::from_fn(|c| {
        std::array::from_fn(|d| {
            Expr::sum((0..3).flat_map(|p| {
                let j = &j;
                (0..3).map(move |q| &s.a[p][q] * &j[c][p] * &j[d][q])
            }))
        })
    });
    let b: [Expr; 3] = std::array::from_fn(|c| {
        let second = Expr::sum((0..3).flat_map(|p| {
            (0..3).map(move |q| &s.a[p][q] * y_of_x[c].diff(Axis::from_index(p)).diff(Axis::from_index(q)))
        }));
        second + Expr::sum((0..3).map(|p| &s.b[p] * &j[c][p]))
    });
    let sub = |e: &Expr| e.subst_vars(x_of_y).normalize();
    SecondOrderOp::new(
        std::array::from_fn(|c| std::array::from_fn(|d| sub(&a[c][d]))),
        std::array::from_fn(|c| sub(&b[c])),
        sub(&s.c),
    )
}

/// First-order analogue of [`change_variables_second`].
pub fn change_variables_first(q: &FirstOrderOp, y_of_x: &[Expr; 3], x_of_y: &[Expr; 3]) -> FirstOrderOp {
    let j = jacobian(y_of_x);
    let sub = |e: &Expr| e.subst_vars(x_of_y).normalize();
    FirstOrderOp::new(
        std::array::from_fn(|c| sub(&Expr::sum((0..3).map(|a| &q.xi[a] * &j[c][a])))),
        sub(&q.eta),
    )
}

/// `W·S·W⁻¹` for a multiplication operator `W`.
fn conjugate_second(s: &SecondOrderOp, w: &Expr) -> SecondOrderOp {
    if w.is_one_literal() {
        return s.clone();
    }
    let g = w.recip();
    let dg: [Expr; 3] = std::array::from_fn(|a| g.diff(Axis::from_index(a)));
    let b = std::array::from_fn(|c| {
        &s.b[c] + Expr::int(2) * Expr::sum((0..3).map(|a| &s.a[a][c] * &dg[a] * w))
    });
    let c = &s.c
        + Expr::sum((0..3).flat_map(|a| {
            let dg = &dg;
            (0..3).map(move |b| &s.a[a][b] * dg[a].diff(Axis::from_index(b)) * w)
        }))
        + Expr::sum((0..3).map(|a| &s.b[a] * &dg[a] * w));
    SecondOrderOp::new(s.a.clone(), b, c).normalize()
}

fn conjugate_first(q: &FirstOrderOp, w: &Expr) -> FirstOrderOp {
    if w.is_one_literal() {
        return q.clone();
    }
    let shift = Expr::sum((0..3).map(|a| &q.xi[a] * w.diff(Axis::from_index(a)))) / w;
    FirstOrderOp::new(q.xi.clone(), &q.eta - shift).normalize()
}

/// The full image `W·(S in new coordinates)·W⁻¹` of a second-order operator.
fn transform_second(t: &TransformSpec, s: &SecondOrderOp) -> SecondOrderOp {
    let (x_of_y, y_of_x, w) = t.maps();
    conjugate_second(&change_variables_second(s, &y_of_x, &x_of_y), &w)
}

/// Image of an integral of motion under the same transformation.
pub fn transform_operator(t: &TransformSpec, q: &FirstOrderOp) -> FirstOrderOp {
    let (x_of_y, y_of_x, w) = t.maps();
    conjugate_first(&change_variables_first(q, &y_of_x, &x_of_y), &w)
}

fn proved(e: &Expr) -> bool {
    e.normal().map(|n| n.is_zero()).unwrap_or(false)
}

/// Reads `(f, V)` back from `A = −fδ`, `B = −∇f`, `C = −V`; the first
/// failing identity is returned as the obstruction.
fn read_back(s: &SecondOrderOp, policy: &ZeroTestPolicy) -> Result<PdmHamiltonian, TransformError> {
    let f = (-&s.a[0][0]).normalize();
    let zero = |e: &Expr| proved(e) || matches!(is_zero(e, policy), ZeroStatus::ProvedZero | ZeroStatus::NumericZero { .. });
    for a in 0..3 {
        for b in 0..3 {
            let target = if a == b { -&f } else { Expr::zero() };
            let d = &s.a[a][b] - target;
            if !zero(&d) {
                return Err(TransformError::Form {
                    obstruction: format!("second-order coefficient ({},{}) off by {}", a + 1, b + 1, d.normalize()),
                });
            }
        }
    }
    for a in 0..3 {
        let d = &s.b[a] + f.diff(Axis::from_index(a));
        if !zero(&d) {
            return Err(TransformError::Form {
                obstruction: format!("first-order term B{} + ∂{}f′ = {}", a + 1, a + 1, d.normalize()),
            });
        }
    }
    Ok(PdmHamiltonian::new(f, (-&s.c).normalize()))
}

/// Transformed `(f′, V′)`.
pub fn apply_transform(t: &TransformSpec, h: &PdmHamiltonian) -> Result<PdmHamiltonian, TransformError> {
    apply_transform_with(t, h, &ZeroTestPolicy::default())
}

pub fn apply_transform_with(
    t: &TransformSpec,
    h: &PdmHamiltonian,
    policy: &ZeroTestPolicy,
) -> Result<PdmHamiltonian, TransformError> {
    if let TransformSpec::InversionConjugation { .. } = t {
        for e in [&h.f, &h.v] {
            if !e.is_rational() {
                return Err(TransformError::NotRational(e.to_string()));
            }
        }
    }
    read_back(&transform_second(t, &hamiltonian_to_op(h)), policy)
}

/// Outcome of the weight search for the inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionOutcome {
    pub weight_exponent: Option<i64>,
    pub hamiltonian: Option<PdmHamiltonian>,
    /// `(w, obstruction)` for every rejected exponent.
    pub rejected: Vec<(i64, String)>,
}

/// Tries `w = −3, …, 3` and keeps the first exponent for which the
/// conjugated operator is again of the form `p f′ p − V′`.
pub fn inversion_search(h: &PdmHamiltonian) -> Result<InversionOutcome, TransformError> {
    let mut rejected = Vec::new();
    for w in -3..=3 {
        match apply_transform(&TransformSpec::inversion(w), h) {
            Ok(h2) => {
                return Ok(InversionOutcome {
                    weight_exponent: Some(w),
                    hamiltonian: Some(h2),
                    rejected,
                })
            }
            Err(TransformError::Form { obstruction }) => rejected.push((w, obstruction)),
            Err(e) => return Err(e),
        }
    }
    Ok(InversionOutcome {
        weight_exponent: None,
        hamiltonian: None,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{generator, GeneratorId};
    use crate::diffop::commute_hq;
    use crate::symkernel::{rat, rat_int};

    fn same(a: &Expr, b: &Expr) -> bool {
        proved(&(a - b))
    }

    #[test]
    fn shift_moves_argument() {
        let h = PdmHamiltonian::new(Expr::call("F", vec![Expr::x(3)]), Expr::call("G", vec![Expr::x(3)]));
        let s = Expr::param("s");
        let t = TransformSpec::shift([Expr::zero(), Expr::zero(), s.clone()]);
        let h2 = apply_transform(&t, &h).unwrap();
        assert!(same(&h2.f, &Expr::call("F", vec![Expr::x(3) + s])));
    }

    #[test]
    fn dilatation_fixes_mu_r2() {
        let mu = Expr::param("mu");
        let h = PdmHamiltonian::new(&mu * Expr::r2(), Expr::param("nu"));
        let h2 = apply_transform(&TransformSpec::dilatation(Expr::param("lambda")), &h).unwrap();
        assert!(same(&h2.f, &h.f));
        assert!(same(&h2.v, &h.v));
    }

    #[test]
    fn rational_rotation_is_checked() {
        let m = [
            [rat(3, 5), rat(-4, 5), rat_int(0)],
            [rat(4, 5), rat(3, 5), rat_int(0)],
            [rat_int(0), rat_int(0), rat_int(1)],
        ];
        let t = TransformSpec::rotation(m.clone()).unwrap();
        let h = PdmHamiltonian::new(Expr::r2(), Expr::rt2());
        let h2 = apply_transform(&t, &h).unwrap();
        assert!(same(&h2.f, &Expr::r2()));
        assert!(same(&h2.v, &Expr::rt2()));
        let mut bad = m;
        bad[0][0] = rat_int(1);
        assert!(TransformSpec::rotation(bad).is_err());
    }

    #[test]
    fn inversion_weight_for_quartic_mass() {
        let mu = Expr::param("mu");
        let h = PdmHamiltonian::new(&mu * Expr::r2().powi(2), Expr::int(6) * &mu * Expr::r2() + Expr::param("nu"));
        let out = inversion_search(&h).unwrap();
        assert_eq!(out.weight_exponent, Some(-3));
        let h2 = out.hamiltonian.unwrap();
        for a in Axis::ALL {
            assert!(proved(&h2.f.diff(a)));
            assert!(proved(&h2.v.diff(a)));
        }
        assert!(matches!(
            apply_transform(&TransformSpec::inversion(0), &h),
            Err(TransformError::Form { .. })
        ));
    }

    #[test]
    fn transcendental_input_rejected_for_inversion() {
        let h = PdmHamiltonian::new(Expr::x(1).exp(), Expr::zero());
        assert!(matches!(
            apply_transform(&TransformSpec::inversion(-3), &h),
            Err(TransformError::NotRational(_))
        ));
    }

    #[test]
    fn integrals_follow_the_inversion() {
        // free motion has P3; its image is an integral of the image
        let h = PdmHamiltonian::new(Expr::one(), Expr::zero());
        let t = TransformSpec::inversion(-3);
        let h2 = apply_transform(&t, &h).unwrap();
        let q2 = transform_operator(&t, &generator(GeneratorId::P(3)));
        let c = commute_hq(&h2, &q2).unwrap();
        assert!(c.slots().iter().all(|(_, e)| proved(e)));
    }
}
