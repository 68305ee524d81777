//! The conformal algebra c(3) ≅ so(1,4): generator factory, structure
//! constants, subalgebra data and equivalence transformations.

mod linalg;
mod structure;
mod subalgebra;
mod table1;
mod transform;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::diffop::{DiffOpError, FirstOrderOp};
use crate::symkernel::{Expr, ParseError, Parser};

pub use linalg::{coordinates, decompose, rank, Decomposition};
pub use structure::{
    c3_table, im1_generator, im_generator, so13_table, so14_table, so4_table, verify_c3, verify_so13,
    verify_so14, verify_so4, verify_structure, Basis, BracketTable, C3Reading, Cr11Reading,
};
pub use subalgebra::{closure, shipped_subalgebras, subalgebra_closure, verify_all_subalgebras, ClosureOutcome, SubalgebraSpec};
pub use table1::{table1_report, table1_rows, Table1Row};
pub use transform::{
    apply_transform, apply_transform_with, change_variables_first, change_variables_second, inversion_search, transform_operator,
    InversionOutcome, TransformError, TransformSpec,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConformalError {
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
    #[error("bad generator id `{0}`")]
    BadId(String),
    #[error("cannot parse combination `{text}`: {reason}")]
    BadCombination { text: String, reason: String },
    #[error("commutator [{left}, {right}] leaves the span of the basis")]
    DecompositionFailure { left: String, right: String },
    #[error("data file: {0}")]
    Data(String),
}

/// A basis element of c(3) or so(1,4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorId {
    P(u8),
    J(u8),
    D,
    K(u8),
    /// `M^{μν}`, `μ, ν ∈ {0,…,4}`, `μ ≠ ν`.
    M(u8, u8),
}

impl GeneratorId {
    /// The ten c(3) generators in the order `P, J, D, K`.
    pub fn c3_basis() -> Vec<GeneratorId> {
        let mut v: Vec<GeneratorId> = (1..=3).map(GeneratorId::P).collect();
        v.extend((1..=3).map(GeneratorId::J));
        v.push(GeneratorId::D);
        v.extend((1..=3).map(GeneratorId::K));
        v
    }

    /// The ten `M^{μν}` with `μ < ν`.
    pub fn so14_basis() -> Vec<GeneratorId> {
        let mut v = Vec::new();
        for m in 0..5 {
            for n in m + 1..5 {
                v.push(GeneratorId::M(m, n));
            }
        }
        v
    }

    /// `(sign, id)` with `M(μ,ν)` reordered so that `μ < ν`.
    pub fn canonical(self) -> (i64, GeneratorId) {
        match self {
            GeneratorId::M(a, b) if a > b => (-1, GeneratorId::M(b, a)),
            g => (1, g),
        }
    }

    fn check(self) -> Result<Self, ConformalError> {
        let ok = match self {
            GeneratorId::P(i) | GeneratorId::J(i) | GeneratorId::K(i) => (1..=3).contains(&i),
            GeneratorId::D => true,
            GeneratorId::M(a, b) => a <= 4 && b <= 4 && a != b,
        };
        if ok {
            Ok(self)
        } else {
            Err(ConformalError::BadId(self.to_string()))
        }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorId::P(i) => write!(f, "P{i}"),
            GeneratorId::J(i) => write!(f, "J{i}"),
            GeneratorId::D => write!(f, "D"),
            GeneratorId::K(i) => write!(f, "K{i}"),
            GeneratorId::M(a, b) => write!(f, "M{a}{b}"),
        }
    }
}

impl FromStr for GeneratorId {
    type Err = ConformalError;

    /// Accepts `P1`, `J3`, `D`, `K2`, `M43` and `M(4,3)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConformalError::BadId(s.to_string());
        let s = s.trim();
        if s == "D" {
            return Ok(GeneratorId::D);
        }
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest: String = chars.collect();
        let digits: Vec<u8> = rest
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | ',' | ' '))
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
            .collect::<Result<_, _>>()?;
        let id = match (head, digits.as_slice()) {
            ('P', [i]) => GeneratorId::P(*i),
            ('J', [i]) => GeneratorId::J(*i),
            ('K', [i]) => GeneratorId::K(*i),
            ('M', [a, b]) => GeneratorId::M(*a, *b),
            _ => return Err(bad()),
        };
        id.check().map_err(|_| bad())
    }
}

fn e_unit(i: usize) -> [Expr; 3] {
    std::array::from_fn(|k| if k == i { Expr::one() } else { Expr::zero() })
}

fn x3() -> [Expr; 3] {
    std::array::from_fn(|k| Expr::x(k + 1))
}

/// `J^i = ε^{ijk}xʲpᵏ`: `ξᵏ = ε^{ijk}xʲ`.
fn rotation(i: usize) -> FirstOrderOp {
    let x = x3();
    let xi = std::array::from_fn(|k| {
        Expr::sum((0..3).map(|j| Expr::int(crate::diffop::levi_civita(i, j, k)) * &x[j]))
    });
    FirstOrderOp::new(xi, Expr::zero())
}

/// `K^i = r²pⁱ − 2xⁱD`.
fn special_conformal(i: usize) -> FirstOrderOp {
    let x = x3();
    let xi = std::array::from_fn(|a| {
        let mut e = Expr::int(-2) * &x[i] * &x[a];
        if a == i {
            e = e + Expr::r2();
        }
        e
    });
    FirstOrderOp::new(xi, Expr::int(-3) * &x[i])
}

/// The exact `(ξ, η)` realization of a generator, with `M^{μν}` expanded by
/// `M^{ab} = ε^{abc}Jᶜ`, `M^{0a} = ½(Kᵃ + Pᵃ)`, `M^{4a} = ½(Kᵃ − Pᵃ)`,
/// `M^{04} = D`.
pub fn generator(id: GeneratorId) -> FirstOrderOp {
    let op = match id {
        GeneratorId::P(i) => FirstOrderOp::new(e_unit(i as usize - 1), Expr::zero()),
        GeneratorId::J(i) => rotation(i as usize - 1),
        GeneratorId::D => FirstOrderOp::new(x3(), Expr::frac(3, 2)),
        GeneratorId::K(i) => special_conformal(i as usize - 1),
        GeneratorId::M(a, b) if a > b => return generator(GeneratorId::M(b, a)).scale(&Expr::int(-1)).normalize(),
        GeneratorId::M(0, 4) => generator(GeneratorId::D),
        GeneratorId::M(0, a) => generator(GeneratorId::K(a))
            .add(&generator(GeneratorId::P(a)))
            .scale(&Expr::frac(1, 2)),
        GeneratorId::M(a, 4) => generator(GeneratorId::K(a))
            .sub(&generator(GeneratorId::P(a)))
            .scale(&Expr::frac(-1, 2)),
        GeneratorId::M(a, b) => {
            let c = (1..=3u8).find(|c| *c != a && *c != b).expect("three spatial indices");
            let e = crate::diffop::levi_civita(a as usize - 1, b as usize - 1, c as usize - 1);
            generator(GeneratorId::J(c)).scale(&Expr::int(e))
        }
    };
    op.normalize()
}

/// A linear combination `Σ cₖ·gₖ` with symbolic coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub terms: Vec<(Expr, GeneratorId)>,
}

impl Combination {
    pub fn single(id: GeneratorId) -> Self {
        Combination {
            terms: vec![(Expr::one(), id)],
        }
    }

    /// Parses e.g. `M43 - M03 + M21`, `M43 + alpha M21`, `1/2 K3`,
    /// `(cos c) M21 + (sin c) M04`. Parenthesized coefficients use the
    /// expression grammar; bare words are numbers or parameters.
    pub fn parse(text: &str) -> Result<Self, ConformalError> {
        Self::parse_with(text, &Parser::new())
    }

    pub fn parse_with(text: &str, parser: &Parser) -> Result<Self, ConformalError> {
        let err = |reason: &str| ConformalError::BadCombination {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0;
        let mut terms = Vec::new();
        let skip_ws = |pos: &mut usize| {
            while *pos < chars.len() && chars[*pos].is_whitespace() {
                *pos += 1;
            }
        };
        loop {
            skip_ws(&mut pos);
            if pos >= chars.len() {
                break;
            }
            let mut sign = 1;
            if chars[pos] == '+' || chars[pos] == '-' {
                if chars[pos] == '-' {
                    sign = -1;
                }
                pos += 1;
                skip_ws(&mut pos);
            } else if !terms.is_empty() {
                return Err(err("expected `+` or `-` between terms"));
            }
            let mut coef = Expr::int(sign);
            let mut id = None;
            while id.is_none() {
                skip_ws(&mut pos);
                if pos >= chars.len() {
                    return Err(err("term without generator"));
                }
                if chars[pos] == '(' {
                    let start = pos;
                    let mut depth = 0;
                    while pos < chars.len() {
                        match chars[pos] {
                            '(' => depth += 1,
                            ')' => {
                                depth -= 1;
                                if depth == 0 {
                                    pos += 1;
                                    break;
                                }
                            }
                            _ => {}
                        }
                        pos += 1;
                    }
                    if depth != 0 {
                        return Err(err("unbalanced parentheses"));
                    }
                    let src: String = chars[start..pos].iter().collect();
                    let e = parser.parse(&src).map_err(|e: ParseError| err(&e.to_string()))?;
                    coef = coef * e;
                } else {
                    let start = pos;
                    while pos < chars.len() && !chars[pos].is_whitespace() && !matches!(chars[pos], '+' | '(') {
                        if chars[pos] == '-' && pos > start {
                            break;
                        }
                        pos += 1;
                    }
                    let word: String = chars[start..pos].iter().collect();
                    if word.is_empty() {
                        return Err(err("empty token"));
                    }
                    if let Ok(g) = word.parse::<GeneratorId>() {
                        id = Some(g);
                    } else {
                        let e = parser.parse(&word).map_err(|e| err(&e.to_string()))?;
                        coef = coef * e;
                    }
                }
            }
            terms.push((coef.normalize(), id.expect("loop exits with an id")));
        }
        if terms.is_empty() {
            return Err(err("empty combination"));
        }
        Ok(Combination { terms })
    }

    pub fn to_op(&self) -> FirstOrderOp {
        self.terms
            .iter()
            .fold(FirstOrderOp::zero(), |acc, (c, g)| acc.add(&generator(*g).scale(c)))
            .normalize()
    }

    pub fn params(&self) -> std::collections::BTreeSet<String> {
        self.terms.iter().flat_map(|(c, _)| c.params()).collect()
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (c, g)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.is_one_literal() {
                write!(f, "{g}")?;
            } else {
                write!(f, "{c} {g}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::commute_qq;

    fn same(a: &FirstOrderOp, b: &FirstOrderOp) -> bool {
        a.sub(b).slots().iter().all(|(_, e)| e.normal().unwrap().is_zero())
    }

    #[test]
    fn ids_parse_and_print() {
        for s in ["P1", "J3", "D", "K2", "M43", "M04"] {
            assert_eq!(s.parse::<GeneratorId>().unwrap().to_string(), s);
        }
        assert_eq!("M(4,3)".parse::<GeneratorId>().unwrap(), GeneratorId::M(4, 3));
        assert!("M44".parse::<GeneratorId>().is_err());
        assert!("P4".parse::<GeneratorId>().is_err());
        assert!("Q1".parse::<GeneratorId>().is_err());
    }

    #[test]
    fn m43_realization() {
        let m = generator(GeneratorId::M(4, 3));
        let x = |i| Expr::x(i);
        let expect = FirstOrderOp::new(
            [
                -(x(1) * x(3)),
                -(x(2) * x(3)),
                Expr::frac(1, 2) * (Expr::r2() - Expr::int(2) * x(3).powi(2) - Expr::one()),
            ],
            Expr::frac(-3, 2) * x(3),
        );
        assert!(same(&m, &expect));
    }

    #[test]
    fn iso_differences() {
        let d = generator(GeneratorId::M(0, 3)).sub(&generator(GeneratorId::M(4, 3)));
        assert!(same(&d, &generator(GeneratorId::P(3))));
        assert!(same(&generator(GeneratorId::M(0, 4)), &generator(GeneratorId::D)));
        assert!(same(
            &generator(GeneratorId::M(2, 1)),
            &generator(GeneratorId::J(3)).scale(&Expr::int(-1))
        ));
    }

    #[test]
    fn antisymmetric_ids() {
        let a = generator(GeneratorId::M(1, 4));
        let b = generator(GeneratorId::M(4, 1)).scale(&Expr::int(-1));
        assert!(same(&a, &b));
        assert_eq!(GeneratorId::M(4, 1).canonical(), (-1, GeneratorId::M(1, 4)));
    }

    #[test]
    fn combinations_parse() {
        let c = Combination::parse("M43 - M03 + M21").unwrap();
        assert_eq!(c.terms.len(), 3);
        let p = generator(GeneratorId::P(3)).scale(&Expr::int(-1)).add(&generator(GeneratorId::M(2, 1)));
        assert!(same(&c.to_op(), &p));
        let c = Combination::parse("M43 + alpha M21").unwrap();
        assert_eq!(c.params().into_iter().collect::<Vec<_>>(), vec!["alpha".to_string()]);
        let c = Combination::parse("(cos c) M21 + (sin c) M04").unwrap();
        assert_eq!(c.terms.len(), 2);
        let c = Combination::parse("-1/2 K3").unwrap();
        assert!(same(&c.to_op(), &generator(GeneratorId::K(3)).scale(&Expr::frac(-1, 2))));
        assert!(Combination::parse("M43 M21").is_err());
        assert!(Combination::parse("alpha").is_err());
    }

    #[test]
    fn k1_p2_bracket() {
        let c = commute_qq(&generator(GeneratorId::K(1)), &generator(GeneratorId::P(2))).unwrap();
        let e = generator(GeneratorId::J(3)).scale(&(Expr::int(-2) * Expr::i()));
        assert!(same(&c, &e));
    }
}
