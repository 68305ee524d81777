//! Canonical rational-function normal form.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expr::{Expr, ExprKind, Func};
use super::poly::{radicand, square_part, Atom, Monomial, Poly};
use super::scalar::{rat, rat_int, Axis, GaussRat, Rational};
use super::KernelError;

/// Largest numerator plus denominator term count kept exactly.
pub const TERM_BUDGET: usize = 4000;

/// Reduced quotient `num / den`.
///
/// `den` is free of algebraic atoms, has integer coefficients with unit
/// content and a positive leading coefficient, and is coprime to `num` in the
/// free polynomial ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm {
    num: Poly,
    den: Poly,
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        NormalForm::constant(&GaussRat::int(1))
    }

    pub fn constant(g: &GaussRat) -> Self {
        let num = Poly::constant(g.re.clone()).add(&Poly::term(Monomial::atom(Atom::I, 1), g.im.clone()));
        NormalForm {
            num,
            den: Poly::one(),
        }
    }

    pub(crate) fn from_poly(p: Poly) -> Self {
        NormalForm {
            num: p.reduce(),
            den: Poly::one(),
        }
    }

    pub(crate) fn atom(a: Atom) -> Self {
        NormalForm::from_poly(Poly::atom(a))
    }

    pub(crate) fn num(&self) -> &Poly {
        &self.num
    }

    pub(crate) fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Value if the form is a Gaussian-rational constant.
    pub fn as_constant(&self) -> Option<GaussRat> {
        if !self.den.is_one() {
            return None;
        }
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        for (m, c) in &self.num.terms {
            if m.is_one() {
                re = c.clone();
            } else if m.0.len() == 1 && m.0[0] == (Atom::I, 1) {
                im = c.clone();
            } else {
                return None;
            }
        }
        Some(GaussRat::new(re, im))
    }

    /// Number of terms in numerator and denominator.
    pub fn term_count(&self) -> usize {
        self.num.terms.len() + self.den.terms.len()
    }

    /// Canonicalizes an arbitrary quotient. `None` when `den` is zero.
    pub(crate) fn new(num: Poly, den: Poly) -> Option<Self> {
        let mut num = num.reduce();
        let mut den = den.reduce();
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(NormalForm::zero());
        }
        while let Some(s) = den.atoms().into_iter().find(|a| a.is_algebraic()) {
            let parts = den.by_atom(&s);
            let a = parts.get(&0).cloned().unwrap_or_default();
            let b = parts.get(&1).cloned().unwrap_or_default();
            let conj = a.sub(&b.mul_term(&Monomial::atom(s.clone(), 1), &Rational::one()));
            let nden = den.mul(&conj);
            if nden.is_zero() {
                break;
            }
            num = num.mul(&conj);
            den = nden;
        }
        if let Some(c) = den.as_constant() {
            return Some(NormalForm {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            });
        }
        let g = num.gcd(&den);
        if !g.is_one() {
            num = num.div_exact(&g).expect("gcd divides numerator");
            den = den.div_exact(&g).expect("gcd divides denominator");
        }
        Some(NormalForm::with_content(num, den))
    }

    /// Normalizes content only; caller guarantees coprimality.
    fn with_content(num: Poly, den: Poly) -> Self {
        let k = den.content();
        if k.is_one() {
            return NormalForm { num, den };
        }
        let inv = k.recip();
        NormalForm {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    fn has_algebraic(p: &Poly) -> bool {
        p.terms.keys().any(|m| m.0.iter().any(|(a, _)| a.is_algebraic()))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return NormalForm {
                num: self.num.add(&o.num),
                den: Poly::one(),
            };
        }
        if self.den == o.den {
            return NormalForm::new(self.num.add(&o.num), self.den.clone()).expect("nonzero den");
        }
        let g = self.den.gcd(&o.den);
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        let d2 = o.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d2).add(&o.num.mul(&d1));
        let den = self.den.mul_plain(&d2);
        if g.is_one() {
            // Coprime denominators leave nothing to cancel.
            return NormalForm::with_content(num, den);
        }
        NormalForm::new(num, den).expect("nonzero den")
    }

    pub fn neg(&self) -> Self {
        NormalForm {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, g: &GaussRat) -> Self {
        self.mul(&NormalForm::constant(g))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return NormalForm::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return NormalForm {
                num: self.num.mul(&o.num),
                den: Poly::one(),
            };
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = o.den.div_exact(&g1).expect("gcd divides");
        let n2 = o.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let num = n1.mul(&n2);
        let den = d1.mul_plain(&d2);
        if !NormalForm::has_algebraic(&n1) && !NormalForm::has_algebraic(&n2) {
            return NormalForm::with_content(num, den);
        }
        NormalForm::new(num, den).expect("nonzero den")
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        NormalForm::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.recip()?))
    }

    pub fn powi(&self, n: i64) -> Option<Self> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let n = u32::try_from(n).ok()?;
        let num = self.num.pow(n);
        let den = self.den.pow(n);
        if NormalForm::has_algebraic(&self.num) {
            NormalForm::new(num, den)
        } else {
            Some(NormalForm::with_content(num, den))
        }
    }

    /// Normal form of an expression tree, reusing cached child forms.
    /// Gives up with `TooLarge` once an intermediate form passes
    /// [`TERM_BUDGET`], so callers can fall back to sampling.
    pub(crate) fn from_expr(e: &Expr) -> Result<NormalForm, KernelError> {
        let nf = NormalForm::from_expr_unchecked(e)?;
        if nf.term_count() > TERM_BUDGET {
            return Err(KernelError::TooLarge(TERM_BUDGET));
        }
        Ok(nf)
    }

    fn from_expr_unchecked(e: &Expr) -> Result<NormalForm, KernelError> {
        let check = |nf: NormalForm| {
            if nf.term_count() > TERM_BUDGET {
                Err(KernelError::TooLarge(TERM_BUDGET))
            } else {
                Ok(nf)
            }
        };
        Ok(match e.kind() {
            ExprKind::Num(g) => NormalForm::constant(g),
            ExprKind::Var(a) => NormalForm::atom(Atom::Var(*a)),
            ExprKind::Param(p) => NormalForm::atom(Atom::Param(p.clone())),
            ExprKind::Add(ts) => {
                let mut acc = NormalForm::zero();
                for t in ts {
                    acc = check(acc.add(t.normal()?))?;
                }
                acc
            }
            ExprKind::Mul(ts) => {
                let mut acc = NormalForm::one();
                for t in ts {
                    acc = check(acc.mul(t.normal()?))?;
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
            ExprKind::Pow(b, q) => {
                let nb = b.normal()?;
                let zero_div = || KernelError::DivisionByZero(e.to_string());
                if nb.is_zero() {
                    if q.is_positive() {
                        return Ok(NormalForm::zero());
                    }
                    return Err(zero_div());
                }
                let n = q.floor();
                let frac = q - &n;
                let n = n.to_integer().to_i64().ok_or_else(zero_div)?;
                let whole = nb.powi(n).ok_or_else(zero_div)?;
                if frac.is_zero() {
                    whole
                } else if frac == rat(1, 2) {
                    whole.mul(&nb.sqrt())
                } else if nb.as_constant().map(|c| c.is_one()).unwrap_or(false) {
                    whole
                } else {
                    whole.mul(&NormalForm::atom(Atom::RatPow(nb.to_expr(), frac)))
                }
            }
            ExprKind::Func(f, u) => {
                let nu = u.normal()?;
                if nu.is_zero() {
                    match f {
                        Func::Exp | Func::Cos => return Ok(NormalForm::one()),
                        Func::Arctan | Func::Sin => return Ok(NormalForm::zero()),
                        Func::Ln => return Err(KernelError::LogOfZero(e.to_string())),
                    }
                }
                if *f == Func::Ln && nu.as_constant().map(|c| c.is_one()).unwrap_or(false) {
                    return Ok(NormalForm::zero());
                }
                NormalForm::atom(Atom::Func(*f, nu.to_expr()))
            }
            ExprKind::Abstract { name, deriv, args } => {
                let mut canon = Vec::with_capacity(args.len());
                for a in args {
                    canon.push(a.normal()?.to_expr());
                }
                NormalForm::atom(Atom::Abstract {
                    name: name.clone(),
                    deriv: deriv.clone(),
                    args: canon,
                })
            }
        })
    }

    /// Principal square root.
    fn sqrt(&self) -> NormalForm {
        if !self.den.is_one() {
            return NormalForm::atom(Atom::RatPow(self.to_expr(), rat(1, 2)));
        }
        let p = &self.num;
        let c = p.content().abs();
        let prim = p.scale(&c.recip());
        let ab = c.numer() * c.denom();
        let (k, m) = square_part(&ab);
        let factor = Rational::new(k, c.denom().clone());
        let mfac = Rational::from_integer(m.clone());
        let root = match prim.as_constant() {
            Some(s) if s.is_one() => {
                if m.is_one() {
                    NormalForm::one()
                } else {
                    NormalForm::atom(Atom::Sqrt(Poly::constant(mfac).to_canonical_expr()))
                }
            }
            Some(_) => {
                let i = NormalForm::constant(&GaussRat::i());
                if m.is_one() {
                    i
                } else {
                    i.mul(&NormalForm::atom(Atom::Sqrt(Poly::constant(mfac).to_canonical_expr())))
                }
            }
            None => NormalForm::atom(Atom::Sqrt(prim.scale(&mfac).to_canonical_expr())),
        };
        root.scale(&GaussRat::real(factor))
    }

    /// Exact partial derivative.
    pub fn diff(&self, a: Axis) -> Result<NormalForm, KernelError> {
        let dn = poly_diff(&self.num, a)?;
        if self.den.is_one() {
            return Ok(dn);
        }
        let dd = poly_diff(&self.den, a)?;
        let den = NormalForm::from_poly(self.den.clone());
        let num = NormalForm::from_poly(self.num.clone());
        let top = dn.mul(&den).sub(&num.mul(&dd));
        Ok(top
            .div(&NormalForm::from_poly(self.den.mul_plain(&self.den)))
            .expect("denominator is nonzero"))
    }

    /// Canonical expression tree; its normal form is `self`.
    pub fn to_expr(&self) -> Expr {
        let num = self.num.to_tree();
        let kind = if self.den.is_one() {
            num.kind().clone()
        } else {
            let den = self.den.to_canonical_expr();
            ExprKind::Mul(vec![num, Expr::raw(ExprKind::Pow(den, rat_int(-1)))])
        };
        Expr::with_normal(kind, self.clone())
    }
}

fn atom_tree(a: &Atom) -> Expr {
    match a {
        Atom::Var(x) => Expr::var(*x),
        Atom::Param(p) => Expr::raw(ExprKind::Param(p.clone())),
        Atom::I => Expr::i(),
        Atom::Sqrt(r) => Expr::raw(ExprKind::Pow(r.clone(), rat(1, 2))),
        Atom::Func(f, u) => Expr::raw(ExprKind::Func(*f, u.clone())),
        Atom::RatPow(b, q) => Expr::raw(ExprKind::Pow(b.clone(), q.clone())),
        Atom::Abstract { name, deriv, args } => Expr::raw(ExprKind::Abstract {
            name: name.clone(),
            deriv: deriv.clone(),
            args: args.clone(),
        }),
    }
}

impl Poly {
    /// Tree with Gaussian coefficients, terms in descending monomial order.
    fn to_tree(&self) -> Expr {
        let mut grouped: BTreeMap<Monomial, GaussRat> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (ie, rest) = m.split(&Atom::I);
            let g = grouped.entry(rest).or_insert_with(|| GaussRat::int(0));
            if ie == 0 {
                g.re += c;
            } else {
                g.im += c;
            }
        }
        let mut terms: Vec<Expr> = Vec::with_capacity(grouped.len());
        for (m, c) in grouped.into_iter().rev() {
            let mut factors = Vec::with_capacity(m.0.len() + 1);
            if !c.is_one() || m.is_one() {
                factors.push(Expr::num(c));
            }
            for (a, e) in &m.0 {
                let t = atom_tree(a);
                factors.push(if *e == 1 {
                    t
                } else {
                    Expr::raw(ExprKind::Pow(t, rat_int(*e as i64)))
                });
            }
            terms.push(if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                Expr::raw(ExprKind::Mul(factors))
            });
        }
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::raw(ExprKind::Add(terms)),
        }
    }

    pub(crate) fn to_canonical_expr(&self) -> Expr {
        let nf = NormalForm {
            num: self.clone(),
            den: Poly::one(),
        };
        let t = self.to_tree();
        Expr::with_normal(t.kind().clone(), nf)
    }
}

/// `dp/dx_a` as a rational function, summing over the atoms of `p`.
fn poly_diff(p: &Poly, axis: Axis) -> Result<NormalForm, KernelError> {
    let mut acc = NormalForm::zero();
    for atom in p.atoms() {
        let datom = atom_diff(&atom, axis)?;
        if datom.is_zero() {
            continue;
        }
        let dp = NormalForm::from_poly(p.deriv_atom(&atom));
        acc = acc.add(&dp.mul(&datom));
    }
    Ok(acc)
}

fn atom_diff(atom: &Atom, axis: Axis) -> Result<NormalForm, KernelError> {
    Ok(match atom {
        Atom::Var(b) => {
            if *b == axis {
                NormalForm::one()
            } else {
                NormalForm::zero()
            }
        }
        Atom::Param(_) | Atom::I => NormalForm::zero(),
        Atom::Sqrt(r) => {
            let dr = r.normal_diff(axis)?;
            if dr.is_zero() {
                return Ok(NormalForm::zero());
            }
            let two_rad = NormalForm::from_poly(radicand(r).scale(&rat_int(2)));
            NormalForm::atom(atom.clone())
                .mul(dr)
                .div(&two_rad)
                .ok_or_else(|| KernelError::DivisionByZero(r.to_string()))?
        }
        Atom::Func(f, u) => {
            let du = u.normal_diff(axis)?;
            if du.is_zero() {
                return Ok(NormalForm::zero());
            }
            let nu = u.normal()?;
            let outer = match f {
                Func::Exp => NormalForm::atom(atom.clone()),
                Func::Ln => nu
                    .recip()
                    .ok_or_else(|| KernelError::LogOfZero(u.to_string()))?,
                Func::Arctan => NormalForm::one()
                    .add(&nu.mul(nu))
                    .recip()
                    .ok_or_else(|| KernelError::DivisionByZero(u.to_string()))?,
                Func::Sin => NormalForm::atom(Atom::Func(Func::Cos, u.clone())),
                Func::Cos => NormalForm::atom(Atom::Func(Func::Sin, u.clone())).neg(),
            };
            outer.mul(du)
        }
        Atom::RatPow(b, q) => {
            let db = b.normal_diff(axis)?;
            if db.is_zero() {
                return Ok(NormalForm::zero());
            }
            let nb = b.normal()?;
            NormalForm::atom(atom.clone())
                .mul(db)
                .scale(&GaussRat::real(q.clone()))
                .div(nb)
                .ok_or_else(|| KernelError::DivisionByZero(b.to_string()))?
        }
        Atom::Abstract { name, deriv, args } => {
            let mut acc = NormalForm::zero();
            for (i, u) in args.iter().enumerate() {
                let du = u.normal_diff(axis)?;
                if du.is_zero() {
                    continue;
                }
                let mut d2 = deriv.clone();
                d2[i] += 1;
                let sym = NormalForm::atom(Atom::Abstract {
                    name: name.clone(),
                    deriv: d2,
                    args: args.clone(),
                });
                acc = acc.add(&sym.mul(du));
            }
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nf(e: &Expr) -> NormalForm {
        e.normal().unwrap().clone()
    }

    #[test]
    fn ring_identity_cancels() {
        let e = Expr::x(1) * Expr::x(2) - Expr::x(2) * Expr::x(1);
        assert!(nf(&e).is_zero());
    }

    #[test]
    fn expansion_identity() {
        let r2 = Expr::r2();
        let e = (&r2 - Expr::one()).powi(2) - (r2.powi(2) - Expr::int(2) * &r2 + Expr::one());
        assert!(nf(&e).is_zero());
    }

    #[test]
    fn quotient_cancels_common_factor() {
        let e = (Expr::x(1).powi(2) - Expr::x(2).powi(2)) / (Expr::x(1) - Expr::x(2));
        assert_eq!(nf(&e), nf(&(Expr::x(1) + Expr::x(2))));
    }

    #[test]
    fn equal_rational_functions_share_a_tree() {
        let a = Expr::one() / Expr::x(1) + Expr::one() / Expr::x(2);
        let b = (Expr::x(1) + Expr::x(2)) / (Expr::x(1) * Expr::x(2));
        assert_eq!(a.normalize(), b.normalize());
    }

    #[test]
    fn imaginary_denominator_is_rationalized() {
        let e = Expr::one() / (Expr::x(1) + Expr::i());
        let n = nf(&e);
        assert!(!n.den().contains(&Atom::I));
        let back = n.mul(&nf(&(Expr::x(1) + Expr::i())));
        assert_eq!(back, NormalForm::one());
    }

    #[test]
    fn sqrt_squares_to_radicand() {
        let e = Expr::rt().powi(2) - Expr::rt2();
        assert!(nf(&e).is_zero());
        let four = Expr::int(4).sqrt();
        assert_eq!(nf(&four), NormalForm::constant(&GaussRat::int(2)));
        let m = Expr::int(-9).sqrt();
        assert_eq!(nf(&m), NormalForm::constant(&GaussRat::new(rat_int(0), rat_int(3))));
    }

    #[test]
    fn sqrt_derivative() {
        let d = Expr::r().normal_diff(Axis::X1).unwrap().clone();
        let expected = nf(&(Expr::x(1) / Expr::r()));
        assert_eq!(d, expected);
    }

    #[test]
    fn arctan_derivative() {
        let d = Expr::phi().normal_diff(Axis::X1).unwrap().clone();
        let expected = nf(&(-Expr::x(2) / Expr::rt2()));
        assert_eq!(d, expected);
    }

    #[test]
    fn normalize_is_idempotent() {
        let e = (Expr::x(1) + Expr::i()).recip() + Expr::phi() * Expr::r() - Expr::call("F", vec![Expr::r2()]);
        let n1 = e.normalize();
        let n2 = Expr::raw(n1.kind().clone()).normalize();
        assert_eq!(n1, n2);
    }

    #[test]
    fn mixed_abstract_partials_commute() {
        let f = Expr::call("F", vec![Expr::x(1) * Expr::x(2), Expr::r2()]);
        let d12 = f.diff(Axis::X1).diff(Axis::X2);
        let d21 = f.diff(Axis::X2).diff(Axis::X1);
        assert!(nf(&(d12 - d21)).is_zero());
    }

    #[test]
    fn ln_of_zero_is_an_error() {
        let e = (Expr::x(1) - Expr::x(1)).ln();
        assert!(matches!(e.normal(), Err(KernelError::LogOfZero(_))));
        let d = Expr::x(1) / (Expr::x(2) - Expr::x(2));
        assert!(matches!(d.normal(), Err(KernelError::DivisionByZero(_))));
    }
}
