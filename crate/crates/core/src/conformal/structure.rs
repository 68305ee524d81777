//! Structure-constant tables and their verification.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::linalg::{coordinates, decompose};
use super::{generator, GeneratorId};
use crate::diffop::{commute_qq, levi_civita, FirstOrderOp};
use crate::report::{Annotation, CheckRecord, Status, Tier, VerificationReport};
use crate::symkernel::{rat_int, Expr, GaussRat, NormalForm};

/// Labeled operators spanning a Lie algebra.
#[derive(Debug, Clone)]
pub struct Basis {
    pub labels: Vec<String>,
    pub ops: Vec<FirstOrderOp>,
}

impl Basis {
    pub fn new(labels: Vec<String>, ops: Vec<FirstOrderOp>) -> Self {
        assert_eq!(labels.len(), ops.len());
        Basis { labels, ops }
    }

    pub fn from_ids(ids: &[GeneratorId]) -> Self {
        Basis::new(
            ids.iter().map(ToString::to_string).collect(),
            ids.iter().map(|g| generator(*g)).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    fn combine(&self, terms: &[(GaussRat, usize)]) -> FirstOrderOp {
        terms
            .iter()
            .fold(FirstOrderOp::zero(), |acc, (k, j)| acc.add(&self.ops[*j].scale(&Expr::num(k.clone()))))
    }
}

/// Expected brackets `[bᵢ, bⱼ] = Σ c·bₖ` for `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketTable {
    pub name: String,
    pub entries: BTreeMap<(usize, usize), Vec<(GaussRat, usize)>>,
}

fn i_times(k: i64) -> GaussRat {
    GaussRat::new(rat_int(0), rat_int(k))
}

/// Collects `Σ kₜ·i·M^{pₜqₜ}` into basis coordinates; `M^{pp}` terms vanish.
fn collect_metric_terms(terms: &[(i64, (u8, u8))], index: &dyn Fn(u8, u8) -> (i64, usize)) -> Vec<(GaussRat, usize)> {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for &(k, (p, q)) in terms {
        if k == 0 || p == q {
            continue;
        }
        let (s, j) = index(p, q);
        *acc.entry(j).or_default() += k * s;
    }
    acc.into_iter().filter(|(_, k)| *k != 0).map(|(j, k)| (i_times(k), j)).collect()
}

/// Basis of index pairs `(μ,ν)`, `μ < ν`, drawn from `indices`.
fn pair_basis(indices: &[u8]) -> Vec<(u8, u8)> {
    let mut v = Vec::new();
    for (a, &m) in indices.iter().enumerate() {
        for &n in &indices[a + 1..] {
            v.push((m, n));
        }
    }
    v
}

fn pair_index(pairs: &[(u8, u8)]) -> impl Fn(u8, u8) -> (i64, usize) + '_ {
    move |p, q| {
        let (s, key) = if p < q { (1, (p, q)) } else { (-1, (q, p)) };
        let j = pairs.iter().position(|k| *k == key).expect("index pair in basis");
        (s, j)
    }
}

fn metric_table(
    name: &str,
    pairs: &[(u8, u8)],
    rule: impl Fn(u8, u8, u8, u8) -> Vec<(i64, (u8, u8))>,
) -> BracketTable {
    let index = pair_index(pairs);
    let mut entries = BTreeMap::new();
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (m, n) = pairs[i];
            let (l, s) = pairs[j];
            entries.insert((i, j), collect_metric_terms(&rule(m, n, l, s), &index));
        }
    }
    BracketTable {
        name: name.to_string(),
        entries,
    }
}

/// Diagonal metric `g` as a lookup.
fn diag(g: &'static [i64]) -> impl Fn(u8, u8) -> i64 {
    move |a, b| if a == b { g[a as usize] } else { 0 }
}

fn kron(a: u8, b: u8) -> i64 {
    i64::from(a == b)
}

/// `[M^{μν},M^{λσ}] = i(g^{μσ}M^{νλ} + g^{νλ}M^{μσ} − g^{μλ}M^{νσ} − g^{νσ}M^{μλ})`
/// with `g = diag(1,−1,−1,−1,−1)`, over the basis of
/// [`GeneratorId::so14_basis`].
pub fn so14_table() -> BracketTable {
    let g = diag(&[1, -1, -1, -1, -1]);
    let pairs = pair_basis(&[0, 1, 2, 3, 4]);
    metric_table("so14", &pairs, |m, n, l, s| {
        vec![
            (g(m, s), (n, l)),
            (g(n, l), (m, s)),
            (-g(m, l), (n, s)),
            (-g(n, s), (m, l)),
        ]
    })
}

/// `[M^{AB},M^{CD}] = i(δ^{AC}M^{BD} + δ^{BD}M^{AC} − δ^{AD}M^{BC} − δ^{BC}M^{AD})`
/// on `A,…,D ∈ {1,2,3,4}`.
pub fn so4_table() -> BracketTable {
    let pairs = pair_basis(&[1, 2, 3, 4]);
    metric_table("so4", &pairs, |a, b, c, d| {
        vec![
            (kron(a, c), (b, d)),
            (kron(b, d), (a, c)),
            (-kron(a, d), (b, c)),
            (-kron(b, c), (a, d)),
        ]
    })
}

/// Reading of the last term of the so(1,3) relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cr11Reading {
    /// Last term `g^{νλ}M^{μσ}`, the same metric as the other three terms.
    Metric,
    /// Last term `δ^{νλ}M^{μσ}` as printed.
    Printed,
}

/// `[M^{μν},M^{λσ}] = i(g^{μλ}M^{νσ} + g^{νσ}M^{μλ} − g^{μσ}M^{νλ} − X^{νλ}M^{μσ})`,
/// `g = diag(−1,1,1,1)`, `X = g` or `δ` per `reading`.
pub fn so13_table(reading: Cr11Reading) -> BracketTable {
    let g = diag(&[-1, 1, 1, 1]);
    let pairs = pair_basis(&[0, 1, 2, 3]);
    let name = match reading {
        Cr11Reading::Metric => "so13",
        Cr11Reading::Printed => "so13-printed",
    };
    metric_table(name, &pairs, |m, n, l, s| {
        let last = match reading {
            Cr11Reading::Metric => g(n, l),
            Cr11Reading::Printed => kron(n, l),
        };
        vec![
            (g(m, l), (n, s)),
            (g(n, s), (m, l)),
            (-g(m, s), (n, l)),
            (-last, (m, s)),
        ]
    })
}

/// The c(3) relations over [`GeneratorId::c3_basis`].
/// Reading of the `δ^{ab}` term in `[Kᵃ, Pᵇ] = 2i(±δ^{ab}D − ε_{abc}Jᶜ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C3Reading {
    /// `−δ^{ab}D`, the sign implied by the so(1,4) relations and the
    /// isomorphism `M^{0a} = ½(Kᵃ+Pᵃ)`, `M^{4a} = ½(Kᵃ−Pᵃ)`, `M^{04} = D`.
    Consistent,
    /// `+δ^{ab}D` as printed.
    Printed,
}

/// The ten c(3) brackets with `[Kᵃ, Pᵇ]` read per `reading`.
pub fn c3_table(reading: C3Reading) -> BracketTable {
    use GeneratorId::*;
    let delta_sign = match reading {
        C3Reading::Consistent => -2,
        C3Reading::Printed => 2,
    };
    let ids = GeneratorId::c3_basis();
    let idx = |g: GeneratorId| ids.iter().position(|h| *h == g).expect("c3 id");
    let eps = |a: u8, b: u8, c: u8| levi_civita(a as usize - 1, b as usize - 1, c as usize - 1);
    let rule = |x: GeneratorId, y: GeneratorId| -> Option<Vec<(GaussRat, usize)>> {
        let cross = |a: u8, b: u8, mk: fn(u8) -> GeneratorId| -> Vec<(GaussRat, usize)> {
            (1..=3u8)
                .filter(|c| eps(a, b, *c) != 0)
                .map(|c| (i_times(eps(a, b, c)), idx(mk(c))))
                .collect()
        };
        Some(match (x, y) {
            (P(_), P(_)) | (K(_), K(_)) | (D, J(_)) => vec![],
            (P(a), J(b)) => cross(a, b, P),
            (J(a), J(b)) => cross(a, b, J),
            (K(a), J(b)) => cross(a, b, K),
            (D, P(a)) => vec![(i_times(1), idx(P(a)))],
            (D, K(a)) => vec![(i_times(-1), idx(K(a)))],
            (K(a), P(b)) => {
                let mut v: Vec<(GaussRat, usize)> = cross(a, b, J)
                    .into_iter()
                    .map(|(k, j)| (&k * &GaussRat::int(-2), j))
                    .collect();
                if a == b {
                    v.push((i_times(delta_sign), idx(D)));
                }
                v
            }
            _ => return None,
        })
    };
    let mut entries = BTreeMap::new();
    for (i, x) in ids.iter().enumerate() {
        for (j, y) in ids.iter().enumerate().skip(i + 1) {
            let v = rule(*x, *y)
                .or_else(|| rule(*y, *x).map(|v| v.into_iter().map(|(k, j)| (-&k, j)).collect()))
                .unwrap_or_else(|| panic!("no c(3) rule for [{x}, {y}]"));
            entries.insert((i, j), v);
        }
    }
    BracketTable {
        name: match reading {
            C3Reading::Consistent => "c3",
            C3Reading::Printed => "c3-printed",
        }
        .into(),
        entries,
    }
}

fn x3() -> [Expr; 3] {
    std::array::from_fn(|k| Expr::x(k + 1))
}

/// `x^a p^b − x^b p^a`, indices 1-based.
fn angular(a: usize, b: usize) -> FirstOrderOp {
    let x = x3();
    let xi = std::array::from_fn(|k| {
        let mut e = Expr::zero();
        if k == b - 1 {
            e = e + &x[a - 1];
        }
        if k == a - 1 {
            e = e - &x[b - 1];
        }
        e
    });
    FirstOrderOp::new(xi, Expr::zero())
}

/// `½(r² + s)pᵃ − xᵃxᵇpᵇ + (3i/2)xᵃ` with `s = ±1`.
fn boost(a: usize, s: i64) -> FirstOrderOp {
    let x = x3();
    let xi = std::array::from_fn(|k| {
        let mut e = -(&x[a - 1] * &x[k]);
        if k == a - 1 {
            e = e + Expr::frac(1, 2) * (Expr::r2() + Expr::int(s));
        }
        e
    });
    FirstOrderOp::new(xi, Expr::frac(-3, 2) * &x[a - 1])
}

/// The so(4) integrals `M^{ab} = xᵃpᵇ − xᵇpᵃ`,
/// `M^{4a} = ½(r²−1)pᵃ − xᵃxᵇpᵇ + (3i/2)xᵃ`, for `A, B ∈ {1,…,4}`.
pub fn im_generator(a: u8, b: u8) -> FirstOrderOp {
    assert!(a != b && (1..=4).contains(&a) && (1..=4).contains(&b));
    let op = match (a, b) {
        (4, c) => boost(c as usize, -1),
        (c, 4) => boost(c as usize, -1).scale(&Expr::int(-1)),
        (a, b) => angular(a as usize, b as usize),
    };
    op.normalize()
}

/// The so(1,3) integrals `M^{ab}` and
/// `M^{0a} = ½(r²+1)pᵃ − xᵃxᵇpᵇ + (3i/2)xᵃ`, for `μ, ν ∈ {0,…,3}`.
pub fn im1_generator(a: u8, b: u8) -> FirstOrderOp {
    assert!(a != b && a <= 3 && b <= 3);
    let op = match (a, b) {
        (0, c) => boost(c as usize, 1),
        (c, 0) => boost(c as usize, 1).scale(&Expr::int(-1)),
        (a, b) => angular(a as usize, b as usize),
    };
    op.normalize()
}

fn pair_basis_ops(indices: &[u8], make: fn(u8, u8) -> FirstOrderOp) -> Basis {
    let pairs = pair_basis(indices);
    Basis::new(
        pairs.iter().map(|(a, b)| format!("M{a}{b}")).collect(),
        pairs.iter().map(|(a, b)| make(*a, *b)).collect(),
    )
}

fn describe(basis: &Basis, terms: &[(NormalForm, usize)]) -> String {
    let parts: Vec<String> = terms
        .iter()
        .filter(|(k, _)| !k.is_zero())
        .map(|(k, j)| format!("({}) {}", k.to_expr(), basis.labels[*j]))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Checks every bracket of `basis` against `table` by exact normal-form
/// comparison; failing pairs carry the computed decomposition.
pub fn verify_structure(basis: &Basis, table: &BracketTable) -> VerificationReport {
    let coords: Vec<Vec<NormalForm>> = basis
        .ops
        .par_iter()
        .map(|q| coordinates(q).expect("polynomial coefficients"))
        .collect();
    let pairs: Vec<(usize, usize)> = table.entries.keys().copied().collect();
    let checks: Vec<CheckRecord> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let label = format!("[{}, {}]", basis.labels[i], basis.labels[j]);
            let expected = &table.entries[&(i, j)];
            let comm = match commute_qq(&basis.ops[i], &basis.ops[j]) {
                Ok(c) => c,
                Err(e) => {
                    return CheckRecord::new(&table.name, label, Tier::Symbolic, Status::Fail).with_detail(e.to_string())
                }
            };
            let residual = comm.sub(&basis.combine(expected));
            let exact = residual
                .slots()
                .iter()
                .all(|(_, e)| e.normal().map(NormalForm::is_zero).unwrap_or(false));
            if exact {
                return CheckRecord::new(&table.name, label, Tier::Symbolic, Status::Pass).with_residual(0.0);
            }
            let got = match coordinates(&comm).ok().and_then(|c| decompose(&coords, &c)) {
                Some(d) => describe(basis, &d.coefficients.into_iter().zip(0..).collect::<Vec<_>>()),
                None => "outside the span of the basis".into(),
            };
            let want: Vec<(NormalForm, usize)> =
                expected.iter().map(|(k, j)| (NormalForm::constant(k), *j)).collect();
            CheckRecord::new(&table.name, label, Tier::Symbolic, Status::Fail)
                .with_detail(format!("computed {got}; expected {}", describe(basis, &want)))
        })
        .collect();
    VerificationReport {
        title: format!("structure constants: {}", table.name),
        checks,
        annotations: vec![],
    }
}

/// Verifies c(3) with the consistent δ-term sign and annotates the
/// brackets on which the printed sign fails.
pub fn verify_c3() -> VerificationReport {
    let basis = Basis::from_ids(&GeneratorId::c3_basis());
    let mut r = verify_structure(&basis, &c3_table(C3Reading::Consistent));
    let printed = verify_structure(&basis, &c3_table(C3Reading::Printed));
    let bad: Vec<String> = printed.failures().map(|c| c.check.clone()).collect();
    r.annotate(Annotation::new(
        "c3",
        "relation reading",
        if bad.is_empty() {
            "the printed sign of the δ term holds on every pair".to_string()
        } else {
            format!(
                "with [K^a,P^b] = 2i(+δ^{{ab}}D − ε_{{abc}}J^c) as printed, {} of 45 brackets fail: {}; \
                 the operators give [K^a,P^a] = −2iD, matching the so(1,4) relations under the isomorphism",
                bad.len(),
                bad.join(", ")
            )
        },
    ));
    r
}

pub fn verify_so14() -> VerificationReport {
    verify_structure(&Basis::from_ids(&GeneratorId::so14_basis()), &so14_table())
}

pub fn verify_so4() -> VerificationReport {
    verify_structure(&pair_basis_ops(&[1, 2, 3, 4], im_generator), &so4_table())
}

/// Verifies the so(1,3) realization against the metric reading and records
/// how the printed reading fares as an annotation.
pub fn verify_so13() -> VerificationReport {
    let basis = pair_basis_ops(&[0, 1, 2, 3], im1_generator);
    let mut r = verify_structure(&basis, &so13_table(Cr11Reading::Metric));
    let printed = verify_structure(&basis, &so13_table(Cr11Reading::Printed));
    let bad: Vec<String> = printed.failures().map(|c| c.check.clone()).collect();
    r.annotate(Annotation::new(
        "so13",
        "relation reading",
        if bad.is_empty() {
            "the printed last term δ^{νλ} agrees with g^{νλ} on every pair".to_string()
        } else {
            format!(
                "with the last term read literally as δ^{{νλ}}M^{{μσ}} instead of g^{{νλ}}M^{{μσ}}, {} of 15 brackets fail: {}; \
                 the metric reading passes all 15",
                bad.len(),
                bad.join(", ")
            )
        },
    ));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_have_all_pairs() {
        assert_eq!(c3_table(C3Reading::Consistent).entries.len(), 45);
        assert_eq!(so14_table().entries.len(), 45);
        assert_eq!(so4_table().entries.len(), 15);
        assert_eq!(so13_table(Cr11Reading::Metric).entries.len(), 15);
    }

    #[test]
    fn c3_relations_hold() {
        let r = verify_c3();
        assert_eq!(r.checks.len(), 45);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.checks.iter().all(|c| c.tier == Tier::Symbolic));
    }

    #[test]
    fn printed_delta_sign_fails_on_diagonal_pairs() {
        let r = verify_structure(&Basis::from_ids(&GeneratorId::c3_basis()), &c3_table(C3Reading::Printed));
        let bad: Vec<&str> = r.failures().map(|c| c.check.as_str()).collect();
        assert_eq!(bad, ["[P1, K1]", "[P2, K2]", "[P3, K3]"]);
        assert!(verify_c3().annotations[0].text.contains("3 of 45"));
    }

    #[test]
    fn so14_relations_hold() {
        let r = verify_so14();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn so4_and_so13_realizations() {
        assert!(verify_so4().passed());
        let r = verify_so13();
        assert!(r.passed());
        assert_eq!(r.annotations.len(), 1);
    }

    #[test]
    fn explicit_realizations_match_iso() {
        let d = im_generator(4, 3).sub(&generator(GeneratorId::M(4, 3)));
        assert!(d.slots().iter().all(|(_, e)| e.normal().unwrap().is_zero()));
        let d = im1_generator(0, 2).sub(&generator(GeneratorId::M(0, 2)));
        assert!(d.slots().iter().all(|(_, e)| e.normal().unwrap().is_zero()));
        let d = im_generator(1, 2).sub(&generator(GeneratorId::M(1, 2)));
        assert!(d.slots().iter().all(|(_, e)| e.normal().unwrap().is_zero()));
    }

    #[test]
    fn wrong_table_is_caught() {
        let mut t = c3_table(C3Reading::Consistent);
        let first = *t.entries.keys().find(|k| !t.entries[k].is_empty()).unwrap();
        t.entries.insert(first, vec![]);
        let r = verify_structure(&Basis::from_ids(&GeneratorId::c3_basis()), &t);
        assert_eq!(r.failures().count(), 1);
        assert!(r.failures().next().unwrap().detail.as_ref().unwrap().contains("computed"));
    }
}
