//! Quadratic Casimir operators of the `so(4)` and `so(1,3)` realizations by
//! first-order operators, and the identities tying them to the Hamiltonians
//! `−∂ₐ(1 ± r²)²∂ₐ − 6r²`.

mod spectrum;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffop::{
    commute_qq, commute_second_first, compose_first_order, hamiltonian_to_op, levi_civita, DiffOpError,
    FirstOrderOp, PdmHamiltonian, SecondOrderOp,
};
use crate::report::{Annotation, CheckRecord, Status, Tier, VerificationReport};
use crate::symkernel::{Expr, ZeroStatus, ZeroTestPolicy};

pub use spectrum::{
    algebraic_spectrum_so4, so13_energy_window, spectrum_csv, AffineEnergy, So13Energy, So4Level, Window,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CasimirError {
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
    #[error("quantum number n must be at least 1, got {0}")]
    Domain(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraTag {
    So4,
    So13,
}

impl AlgebraTag {
    pub const ALL: [AlgebraTag; 2] = [AlgebraTag::So4, AlgebraTag::So13];

    pub fn name(self) -> &'static str {
        match self {
            AlgebraTag::So4 => "so4",
            AlgebraTag::So13 => "so13",
        }
    }

    /// Index of the extra generators: `4` for `so(4)`, `0` for `so(1,3)`.
    fn extra_index(self) -> u8 {
        match self {
            AlgebraTag::So4 => 4,
            AlgebraTag::So13 => 0,
        }
    }

    /// Sign of `r² ± 1` in the mass term `f = (1 ± r²)²`.
    fn mass_sign(self) -> i64 {
        match self {
            AlgebraTag::So4 => 1,
            AlgebraTag::So13 => -1,
        }
    }

    /// `k` in the identity `C₁ = ¼(Ĥ + k)`.
    pub fn identity_shift(self) -> i64 {
        match self {
            AlgebraTag::So4 => -9,
            AlgebraTag::So13 => 9,
        }
    }
}

impl fmt::Display for AlgebraTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgebraTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "so4" => Ok(AlgebraTag::So4),
            "so13" => Ok(AlgebraTag::So13),
            _ => Err(format!("unknown algebra `{s}`; expected so4 or so13")),
        }
    }
}

/// `M^{ab} = xᵃpᵇ − xᵇpᵃ`.
pub fn rotation(a: u8, b: u8) -> FirstOrderOp {
    let mut xi = [Expr::zero(), Expr::zero(), Expr::zero()];
    xi[b as usize - 1] = Expr::x(a as usize);
    xi[a as usize - 1] = &xi[a as usize - 1] - Expr::x(b as usize);
    FirstOrderOp::new(xi, Expr::zero()).normalize()
}

/// `½(r² ∓ 1)pᵃ − xᵃ(x·p) + (3i/2)xᵃ`: `M^{4a}` for `so(4)`, `M^{0a}` for
/// `so(1,3)`.
pub fn boost(tag: AlgebraTag, a: u8) -> FirstOrderOp {
    let xa = Expr::x(a as usize);
    let shift = Expr::int(-tag.mass_sign());
    let xi = std::array::from_fn(|k| {
        let own = if k + 1 == a as usize {
            Expr::frac(1, 2) * (Expr::r2() + &shift)
        } else {
            Expr::zero()
        };
        own - &xa * Expr::x(k + 1)
    });
    // −i(ξ·∂ + η) with −iη = (3i/2)xᵃ
    FirstOrderOp::new(xi, Expr::frac(-3, 2) * xa).normalize()
}

/// The six basis elements with their labels, rotations first.
pub fn basis(tag: AlgebraTag) -> Vec<(String, FirstOrderOp)> {
    let e = tag.extra_index();
    let mut v: Vec<(String, FirstOrderOp)> = [(1, 2), (1, 3), (2, 3)]
        .into_iter()
        .map(|(a, b)| (format!("M{a}{b}"), rotation(a, b)))
        .collect();
    v.extend((1..=3).map(|a| (format!("M{e}{a}"), boost(tag, a))));
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct CasimirPair {
    pub c1: SecondOrderOp,
    pub c2: SecondOrderOp,
    pub algebra_tag: AlgebraTag,
}

fn square(q: &FirstOrderOp) -> Result<SecondOrderOp, DiffOpError> {
    compose_first_order(q, q)
}

/// `C₁ = ½M^{ab}M^{ab} ± M^{ea}M^{ea}` (plus for `so(4)`, minus for
/// `so(1,3)`) and `C₂ = ½ε_{abc}M^{ea}M^{bc}`.
pub fn build_casimirs(tag: AlgebraTag) -> Result<CasimirPair, DiffOpError> {
    let mut c1 = SecondOrderOp::zero();
    for (a, b) in [(1, 2), (1, 3), (2, 3)] {
        c1 = c1.add(&square(&rotation(a, b))?);
    }
    let sign = Expr::int(tag.mass_sign());
    for a in 1..=3 {
        c1 = c1.add(&square(&boost(tag, a))?.scale(&sign));
    }
    let mut c2 = SecondOrderOp::zero();
    for a in 1..=3u8 {
        for b in 1..=3u8 {
            for c in 1..=3u8 {
                let e = levi_civita(a as usize - 1, b as usize - 1, c as usize - 1);
                if e == 0 || b > c {
                    continue;
                }
                // ε_{abc}M^{bc} summed over b, c counts each pair twice
                let prod = compose_first_order(&boost(tag, a), &rotation(b, c))?;
                c2 = c2.add(&prod.scale(&Expr::int(e)));
            }
        }
    }
    Ok(CasimirPair {
        c1: c1.normalize(),
        c2: c2.normalize(),
        algebra_tag: tag,
    })
}

/// `f = (1 ± r²)²`, `V = k·r²`; `k = 6` is the superintegrable system.
pub fn scaled_hamiltonian(tag: AlgebraTag, potential: i64) -> PdmHamiltonian {
    let f = (Expr::one() + Expr::int(tag.mass_sign()) * Expr::r2()).powi(2);
    PdmHamiltonian::new(f, Expr::int(potential) * Expr::r2())
}

/// `C₁ − ¼(Ĥ + k)` for the Hamiltonian with potential `potential·r²`.
pub fn identity_residual(pair: &CasimirPair, potential: i64, shift: i64) -> SecondOrderOp {
    let h = hamiltonian_to_op(&scaled_hamiltonian(pair.algebra_tag, potential));
    let rhs = h.add(&SecondOrderOp::scalar(&Expr::int(shift))).scale(&Expr::frac(1, 4));
    pair.c1.sub(&rhs).normalize()
}

fn slot_record(entry: &str, check: &str, op: &SecondOrderOp, policy: &ZeroTestPolicy) -> CheckRecord {
    let statuses: Vec<ZeroStatus> = op
        .zero_statuses(policy, &format!("{entry}/{check}"))
        .into_iter()
        .map(|(_, s)| s)
        .collect();
    CheckRecord::from_zero_statuses(entry, check, statuses.iter())
}

fn first_record(entry: &str, check: &str, op: &FirstOrderOp, policy: &ZeroTestPolicy) -> CheckRecord {
    let statuses: Vec<ZeroStatus> = op
        .zero_statuses(policy, &format!("{entry}/{check}"))
        .into_iter()
        .map(|(_, s)| s)
        .collect();
    CheckRecord::from_zero_statuses(entry, check, statuses.iter())
}

fn error_record(entry: &str, check: &str, e: &DiffOpError) -> CheckRecord {
    CheckRecord::new(entry, check, Tier::Symbolic, Status::Fail).with_detail(e.to_string())
}

/// Constants `(α, β)` with `C₁ = αĤ + β`, when such a relation holds.
pub fn fitted_relation(pair: &CasimirPair) -> Option<(Expr, Expr)> {
    let h = hamiltonian_to_op(&scaled_hamiltonian(pair.algebra_tag, 6));
    let alpha = (&pair.c1.a[0][0] / &h.a[0][0]).normalize();
    if !alpha.as_num().is_some() {
        return None;
    }
    let beta = (&pair.c1.c - &alpha * &h.c).normalize();
    let rest = pair.c1.sub(&h.scale(&alpha)).sub(&SecondOrderOp::scalar(&beta)).normalize();
    (beta.as_num().is_some() && rest.slots().iter().all(|(_, e)| e.normalize().is_zero_literal())).then_some((alpha, beta))
}

fn identity_label(tag: AlgebraTag) -> String {
    match tag.identity_shift() {
        k if k < 0 => format!("C1 - (H - {})/4 = 0", -k),
        k => format!("C1 - (H + {k})/4 = 0"),
    }
}

/// Proves the Casimir identities of one realization, plus centrality and
/// the 6r² → 5r² mutation control.
pub fn verify_casimir_identity(tag: AlgebraTag, policy: &ZeroTestPolicy) -> VerificationReport {
    let entry = tag.name();
    let mut r = VerificationReport::new(format!("casimir identities of {tag}"));
    let pair = match build_casimirs(tag) {
        Ok(p) => p,
        Err(e) => {
            r.push(error_record(entry, "build Casimir operators", &e));
            return r;
        }
    };
    let shift = tag.identity_shift();
    let residual = identity_residual(&pair, 6, shift);
    r.push(slot_record(entry, &identity_label(tag), &residual, policy));
    r.push(slot_record(entry, "C2 = 0", &pair.c2, policy));

    let mutated = identity_residual(&pair, 5, shift);
    let m = slot_record(entry, "mutation 6r^2 -> 5r^2", &mutated, policy);
    let status = if m.status == Status::Fail { Status::Pass } else { Status::Fail };
    r.push(
        CheckRecord::new(entry, "mutation 6r^2 -> 5r^2 breaks the identity", m.tier, status)
            .with_detail(m.detail.unwrap_or_else(|| "mutated identity still holds".into())),
    );

    for (name, g) in basis(tag) {
        let check = format!("[C1, {name}] = 0");
        match commute_second_first(&pair.c1, &g) {
            Ok(c) => r.push(slot_record(entry, &check, &c.normalize(), policy)),
            Err(e) => r.push(error_record(entry, &check, &e)),
        }
    }

    match fitted_relation(&pair) {
        Some((a, b)) => r.annotate(Annotation::new(
            entry,
            "casimir relation",
            format!("computed relation: C1 = ({a})·H + ({b})"),
        )),
        None => r.annotate(Annotation::new(entry, "casimir relation", "C1 is not affine in H")),
    }
    if tag == AlgebraTag::So4 {
        r.extend(verify_decomposition(&pair, policy));
    }
    if tag == AlgebraTag::So13 {
        r.annotate(spectrum::so13_derivation_annotation(fitted_relation(&pair)));
    }
    r
}

/// `q_a = ½(M^{4a} + ½ε_{abc}M^{bc})`, `g_a = ½(−M^{4a} + ½ε_{abc}M^{bc})`.
pub fn q_g_basis() -> ([FirstOrderOp; 3], [FirstOrderOp; 3]) {
    let half = Expr::frac(1, 2);
    let dual = |a: u8| {
        // ½ε_{abc}M^{bc} = M^{bc} for the cyclic (b, c)
        let (b, c) = match a {
            1 => (2, 3),
            2 => (3, 1),
            _ => (1, 2),
        };
        if b < c {
            rotation(b, c)
        } else {
            rotation(c, b).scale(&Expr::int(-1))
        }
    };
    let q = std::array::from_fn(|k| {
        let a = k as u8 + 1;
        boost(AlgebraTag::So4, a).add(&dual(a)).scale(&half).normalize()
    });
    let g = std::array::from_fn(|k| {
        let a = k as u8 + 1;
        dual(a).sub(&boost(AlgebraTag::So4, a)).scale(&half).normalize()
    });
    (q, g)
}

fn sum_squares(ops: &[FirstOrderOp; 3]) -> Result<SecondOrderOp, DiffOpError> {
    let mut s = SecondOrderOp::zero();
    for q in ops {
        s = s.add(&square(q)?);
    }
    Ok(s)
}

/// Two commuting `so(3)` copies inside `so(4)` and the Casimirs in terms
/// of them.
fn verify_decomposition(pair: &CasimirPair, policy: &ZeroTestPolicy) -> VerificationReport {
    let entry = "so4 q/g";
    let mut r = VerificationReport::new("so(4) = so(3) + so(3)");
    let (q, g) = q_g_basis();
    let i = Expr::i();
    for a in 0..3 {
        for b in 0..3 {
            for (lhs, rhs, name) in [(&q, &q, "q,q"), (&g, &g, "g,g")] {
                if a >= b {
                    continue;
                }
                let c = 3 - a - b;
                let e = Expr::int(levi_civita(a, b, c));
                let check = format!("[{}{}, {}{}]", &name[..1], a + 1, &name[2..], b + 1);
                match commute_qq(&lhs[a], &rhs[b]) {
                    Ok(v) => {
                        let want = rhs[c].scale(&(&i * &e));
                        r.push(first_record(entry, &check, &v.sub(&want).normalize(), policy));
                    }
                    Err(e) => r.push(error_record(entry, &check, &e)),
                }
            }
            let check = format!("[q{}, g{}] = 0", a + 1, b + 1);
            match commute_qq(&q[a], &g[b]) {
                Ok(v) => r.push(first_record(entry, &check, &v.normalize(), policy)),
                Err(e) => r.push(error_record(entry, &check, &e)),
            }
        }
    }
    match (sum_squares(&q), sum_squares(&g)) {
        (Ok(q2), Ok(g2)) => {
            let two = Expr::int(2);
            let c1 = pair.c1.sub(&q2.add(&g2).scale(&two)).normalize();
            let c2 = pair.c2.sub(&q2.sub(&g2).scale(&two)).normalize();
            r.push(slot_record(entry, "C1 = 2(q^2 + g^2)", &c1, policy));
            r.push(slot_record(entry, "C2 = 2(q^2 - g^2)", &c2, policy));
        }
        (Err(e), _) | (_, Err(e)) => r.push(error_record(entry, "q^2, g^2", &e)),
    }
    r
}
