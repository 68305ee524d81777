//! Floating-point evaluation.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use thiserror::Error;

use super::expr::{Expr, ExprKind, Func};
use super::poly::{Atom, Poly};
use super::scalar::GaussRat;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at `{0}`")]
    DivisionByZero(String),
    #[error("logarithm of non-positive value at `{0}`")]
    LogDomain(String),
    #[error("no value assigned to `{0}`")]
    Unassigned(String),
    #[error("non-finite value at `{0}`")]
    NonFinite(String),
    #[error("value {re} + {im}i is not real")]
    NotReal { re: f64, im: f64 },
}

/// Evaluation point and symbol assignment.
///
/// Abstract-function symbols are looked up by [`Env::symbol_key`]; when a key
/// is missing and `abstract_seed` is set, a deterministic pseudo-random value
/// in `[0.3, 1.7]` is derived from the seed, the symbol and its argument values.
#[derive(Debug, Clone, Default)]
pub struct Env {
    pub point: [f64; 3],
    pub params: BTreeMap<String, f64>,
    pub abstract_values: BTreeMap<String, f64>,
    pub abstract_seed: Option<u64>,
}

impl Env {
    pub fn at(point: [f64; 3]) -> Self {
        Env {
            point,
            ..Env::default()
        }
    }

    pub fn param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    /// Key of an abstract symbol: `F`, `D1F`, `D1D2F`, …
    pub fn symbol_key(name: &str, deriv: &[u8]) -> String {
        let mut s = String::new();
        for (i, k) in deriv.iter().enumerate() {
            for _ in 0..*k {
                s.push_str(&format!("D{}", i + 1));
            }
        }
        s.push_str(name);
        s
    }

    fn abstract_value(&self, name: &str, deriv: &[u8], args: &[Complex64]) -> Result<f64, EvalError> {
        let key = Env::symbol_key(name, deriv);
        if let Some(v) = self.abstract_values.get(&key) {
            return Ok(*v);
        }
        let seed = self.abstract_seed.ok_or(EvalError::Unassigned(key.clone()))?;
        let mut h = splitmix(seed ^ 0x9e37_79b9_7f4a_7c15);
        for b in key.bytes() {
            h = splitmix(h ^ u64::from(b));
        }
        for a in args {
            h = splitmix(h ^ quantize(a.re));
            h = splitmix(h ^ quantize(a.im));
        }
        Ok(0.3 + 1.4 * ((h >> 11) as f64 / (1u64 << 53) as f64))
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Rounds to about nine significant digits so that numerically equal
/// arguments computed along different paths hash alike.
fn quantize(v: f64) -> u64 {
    if v == 0.0 || !v.is_finite() {
        return 0;
    }
    let e = v.abs().log10().floor();
    let m = (v / 10f64.powf(e) * 1e8).round() as i64;
    (m as u64) ^ ((e as i64 as u64) << 40)
}

impl Expr {
    /// Complex value of the tree as written.
    pub fn eval_complex(&self, env: &Env) -> Result<Complex64, EvalError> {
        let mut memo = HashMap::new();
        self.eval_memo(env, &mut memo)
    }

    fn eval_memo(&self, env: &Env, memo: &mut HashMap<Expr, Complex64>) -> Result<Complex64, EvalError> {
        if let Some(v) = memo.get(self) {
            return Ok(*v);
        }
        let v = match self.kind() {
            ExprKind::Num(g) => gauss_to_complex(g),
            ExprKind::Var(a) => Complex64::new(env.point[a.index()], 0.0),
            ExprKind::Param(p) => Complex64::new(
                *env
                    .params
                    .get(p.as_ref())
                    .ok_or_else(|| EvalError::Unassigned(p.to_string()))?,
                0.0,
            ),
            ExprKind::Add(ts) => {
                let mut s = Complex64::new(0.0, 0.0);
                for t in ts {
                    s += t.eval_memo(env, memo)?;
                }
                s
            }
            ExprKind::Mul(ts) => {
                let mut s = Complex64::new(1.0, 0.0);
                for t in ts {
                    s *= t.eval_memo(env, memo)?;
                }
                s
            }
            ExprKind::Pow(b, q) => {
                let bv = b.eval_memo(env, memo)?;
                let qf = GaussRat::to_f64(q);
                if bv == Complex64::new(0.0, 0.0) {
                    if qf < 0.0 {
                        return Err(EvalError::DivisionByZero(self.to_string()));
                    }
                    Complex64::new(0.0, 0.0)
                } else if q.is_integer() {
                    bv.powi(qf as i32)
                } else if bv.im == 0.0 && bv.re > 0.0 {
                    Complex64::new(bv.re.powf(qf), 0.0)
                } else {
                    bv.powf(qf)
                }
            }
            ExprKind::Func(f, u) => {
                let uv = u.eval_memo(env, memo)?;
                match f {
                    Func::Exp => uv.exp(),
                    Func::Ln => {
                        if uv.im.abs() <= 1e-12 * uv.re.abs() && uv.re <= 0.0 || uv == Complex64::new(0.0, 0.0) {
                            return Err(EvalError::LogDomain(self.to_string()));
                        }
                        uv.ln()
                    }
                    Func::Arctan => {
                        if uv.im == 0.0 {
                            Complex64::new(uv.re.atan(), 0.0)
                        } else {
                            uv.atan()
                        }
                    }
                    Func::Sin => uv.sin(),
                    Func::Cos => uv.cos(),
                }
            }
            ExprKind::Abstract { name, deriv, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(a.eval_memo(env, memo)?);
                }
                Complex64::new(env.abstract_value(name, deriv, &vals)?, 0.0)
            }
        };
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(EvalError::NonFinite(self.to_string()));
        }
        memo.insert(self.clone(), v);
        Ok(v)
    }

    /// Real value of the normalized tree.
    pub fn eval(&self, env: &Env) -> Result<f64, EvalError> {
        let v = self.normalize().eval_complex(env)?;
        if v.im.abs() > 1e-9 * (1.0 + v.re.abs()) {
            return Err(EvalError::NotReal { re: v.re, im: v.im });
        }
        Ok(v.re)
    }
}

pub(crate) fn gauss_to_complex(g: &GaussRat) -> Complex64 {
    Complex64::new(GaussRat::to_f64(&g.re), GaussRat::to_f64(&g.im))
}

/// Evaluates a polynomial through atom values; returns the value and the
/// largest term magnitude.
pub(crate) fn eval_poly(
    p: &Poly,
    env: &Env,
    atoms: &mut HashMap<Atom, Complex64>,
) -> Result<(Complex64, f64), EvalError> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for (m, c) in &p.terms {
        let mut t = Complex64::new(GaussRat::to_f64(c), 0.0);
        for (a, e) in &m.0 {
            let v = match atoms.get(a) {
                Some(v) => *v,
                None => {
                    let v = atom_value(a, env)?;
                    atoms.insert(a.clone(), v);
                    v
                }
            };
            t *= v.powi(*e as i32);
        }
        scale = scale.max(t.norm());
        sum += t;
    }
    Ok((sum, scale))
}

fn atom_value(a: &Atom, env: &Env) -> Result<Complex64, EvalError> {
    let tree = match a {
        Atom::Var(x) => return Ok(Complex64::new(env.point[x.index()], 0.0)),
        Atom::I => return Ok(Complex64::new(0.0, 1.0)),
        Atom::Param(p) => {
            return env
                .params
                .get(p.as_ref())
                .map(|v| Complex64::new(*v, 0.0))
                .ok_or_else(|| EvalError::Unassigned(p.to_string()))
        }
        Atom::Sqrt(r) => r.pow(super::scalar::rat(1, 2)),
        Atom::Func(f, u) => u.apply(*f),
        Atom::RatPow(b, q) => b.pow(q.clone()),
        Atom::Abstract { name, deriv, args } => Expr::call_deriv(name, deriv.clone(), args.clone()),
    };
    tree.eval_complex(env)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_catalog_style_examples() {
        let mu = Expr::param("mu");
        let e = &mu * (Expr::r2() - Expr::one()).powi(2);
        let env = Env::at([1.0, 0.0, 0.0]).param("mu", 1.0);
        assert_eq!(e.eval(&env).unwrap(), 0.0);

        let e = Expr::int(6) * &mu * Expr::r2() + Expr::param("nu");
        let env = Env::at([0.0, 0.0, 0.0]).param("mu", 3.0).param("nu", 2.0);
        assert_eq!(e.eval(&env).unwrap(), 2.0);

        let env = Env::at([3.0, 4.0, 12.0]);
        assert_eq!(Expr::rt2().eval(&env).unwrap(), 25.0);
    }

    #[test]
    fn domain_errors_name_the_subtree() {
        let e = Expr::x(1).ln();
        let err = e.eval(&Env::at([-1.0, 0.0, 0.0])).unwrap_err();
        assert!(matches!(err, EvalError::LogDomain(ref s) if s.contains("ln")));
        let e = Expr::x(1).recip();
        assert!(matches!(
            e.eval(&Env::at([0.0, 1.0, 1.0])),
            Err(EvalError::DivisionByZero(_))
        ));
    }

    #[test]
    fn unassigned_symbols_are_reported() {
        let e = Expr::param("alpha");
        assert_eq!(
            e.eval(&Env::at([1.0, 1.0, 1.0])),
            Err(EvalError::Unassigned("alpha".into()))
        );
    }

    #[test]
    fn abstract_values_are_deterministic() {
        let f = Expr::call("F", vec![Expr::x(1)]);
        let mut env = Env::at([0.5, 0.0, 0.0]);
        env.abstract_seed = Some(7);
        let a = f.eval(&env).unwrap();
        let b = f.eval(&env).unwrap();
        assert_eq!(a, b);
        assert!((0.3..=1.7).contains(&a));
        env.abstract_values.insert("F".into(), 2.5);
        assert_eq!(f.eval(&env).unwrap(), 2.5);
    }
}
