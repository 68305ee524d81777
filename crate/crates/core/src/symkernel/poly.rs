//! Sparse multivariate polynomials over the rationals, with atoms as variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::expr::{Expr, Func};
use super::scalar::{Axis, Rational};

/// An indeterminate of the polynomial ring.
///
/// `I` and `Sqrt` are algebraic: `I² = −1` and `Sqrt(r)² = r`. All other atoms
/// are treated as algebraically independent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Var(Axis),
    Param(Arc<str>),
    I,
    /// Square root of a canonical polynomial tree.
    Sqrt(Expr),
    /// Transcendental function of a canonical tree.
    Func(Func, Expr),
    /// `base^frac` with `0 < frac < 1`, `frac ≠ 1/2`.
    RatPow(Expr, Rational),
    Abstract {
        name: Arc<str>,
        deriv: Vec<u8>,
        args: Vec<Expr>,
    },
}

impl Atom {
    pub(crate) fn is_algebraic(&self) -> bool {
        matches!(self, Atom::I | Atom::Sqrt(_))
    }
}

/// Power product, sorted by atom, exponents nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub(crate) struct Monomial(pub(crate) Vec<(Atom, u32)>);

impl Ord for Monomial {
    /// Lexicographic order in which smaller atoms are more significant.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((xa, ea)), Some((xb, eb))) => match xa.cmp(xb) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub(crate) fn one() -> Self {
        Monomial(Vec::new())
    }

    pub(crate) fn atom(a: Atom, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            let (xa, ea) = &self.0[i];
            let (xb, eb) = &o.0[j];
            match xa.cmp(xb) {
                Ordering::Equal => {
                    out.push((xa.clone(), ea + eb));
                    i += 1;
                    j += 1;
                }
                Ordering::Less => {
                    out.push((xa.clone(), *ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((xb.clone(), *eb));
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    pub(crate) fn degree(&self, a: &Atom) -> u32 {
        self.0
            .iter()
            .find(|(x, _)| x == a)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    /// `self / o` if `o` divides `self`.
    pub(crate) fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (x, e) in &self.0 {
            if j < o.0.len() {
                match o.0[j].0.cmp(x) {
                    Ordering::Less => return None,
                    Ordering::Equal => {
                        let f = o.0[j].1;
                        j += 1;
                        match e.cmp(&f) {
                            Ordering::Less => return None,
                            Ordering::Equal => continue,
                            Ordering::Greater => {
                                out.push((x.clone(), e - f));
                                continue;
                            }
                        }
                    }
                    Ordering::Greater => {}
                }
            }
            out.push((x.clone(), *e));
        }
        if j < o.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub(crate) fn gcd(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            match self.0[i].0.cmp(&o.0[j].0) {
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.min(o.0[j].1)));
                    i += 1;
                    j += 1;
                }
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
            }
        }
        Monomial(out)
    }

    /// Splits off the power of `a`.
    pub(crate) fn split(&self, a: &Atom) -> (u32, Monomial) {
        let mut e = 0;
        let mut rest = Vec::with_capacity(self.0.len());
        for (x, k) in &self.0 {
            if x == a {
                e = *k;
            } else {
                rest.push((x.clone(), *k));
            }
        }
        (e, Monomial(rest))
    }
}

/// Polynomial `Σ c·m` with nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub(crate) struct Poly {
    pub(crate) terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub(crate) fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub(crate) fn atom(a: Atom) -> Self {
        Poly::term(Monomial::atom(a, 1), Rational::one())
    }

    pub(crate) fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_one() && c.is_one())
                .unwrap_or(false)
    }

    pub(crate) fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn add(&self, o: &Poly) -> Poly {
        let (mut big, small) = if self.terms.len() >= o.terms.len() {
            (self.clone(), o)
        } else {
            (o.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub(crate) fn sub(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub(crate) fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub(crate) fn mul_term(&self, m: &Monomial, k: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (mm, c) in &self.terms {
            out.terms.insert(mm.mul(m), c * k);
        }
        out
    }

    /// Product in the free polynomial ring (no algebraic reduction).
    pub(crate) fn mul_plain(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Product followed by reduction of `I` and square-root powers.
    pub(crate) fn mul(&self, o: &Poly) -> Poly {
        self.mul_plain(o).reduce()
    }

    pub(crate) fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn needs_reduction(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(a, e)| *e >= 2 && a.is_algebraic()))
    }

    /// Rewrites `I^k` and `Sqrt(r)^k` to exponents below two.
    pub(crate) fn reduce(self) -> Poly {
        if !self.needs_reduction() {
            return self;
        }
        let mut out = Poly::zero();
        for (m, c) in self.terms {
            let mut free = Vec::with_capacity(m.0.len());
            let mut factor = Poly::constant(c);
            for (a, e) in m.0 {
                if e >= 2 && a.is_algebraic() {
                    let (q, r) = (e / 2, e % 2);
                    let base = match &a {
                        Atom::I => Poly::constant(-Rational::one()),
                        Atom::Sqrt(rad) => radicand(rad),
                        _ => unreachable!(),
                    };
                    factor = factor.mul(&base.pow(q));
                    if r == 1 {
                        free.push((a, 1));
                    }
                } else {
                    free.push((a, e));
                }
            }
            let part = factor.mul_term(&Monomial(free), &Rational::one()).reduce();
            out = out.add(&part);
        }
        out
    }

    pub(crate) fn atoms(&self) -> Vec<Atom> {
        let mut v: Vec<Atom> = Vec::new();
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                v.push(a.clone());
            }
        }
        v.sort();
        v.dedup();
        v
    }

    /// Coefficients with respect to every atom not in the sorted list `keep`.
    fn coefficients_outside(&self, keep: &[Atom]) -> Vec<Poly> {
        let mut parts: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, outside): (Vec<_>, Vec<_>) =
                m.0.iter().cloned().partition(|(a, _)| keep.binary_search(a).is_ok());
            parts
                .entry(Monomial(outside))
                .or_default()
                .terms
                .insert(Monomial(inside), c.clone());
        }
        parts.into_values().collect()
    }

    pub(crate) fn contains(&self, a: &Atom) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(x, _)| x == a))
    }

    pub(crate) fn degree(&self, a: &Atom) -> u32 {
        self.terms.keys().map(|m| m.degree(a)).max().unwrap_or(0)
    }

    /// Coefficients as a polynomial in `a`.
    pub(crate) fn by_atom(&self, a: &Atom) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(a);
            out.entry(e).or_default().terms.insert(rest, c.clone());
        }
        out
    }

    /// Partial derivative with respect to an atom, all others held fixed.
    pub(crate) fn deriv_atom(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(a);
            if e == 0 {
                continue;
            }
            let m2 = rest.mul(&Monomial::atom(a.clone(), e - 1));
            out.add_term(m2, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact quotient in the free ring, or `None` if `d` does not divide `self`.
    pub(crate) fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((m, c)) = r.leading() {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            r = r.sub(&d.mul_term(&qm, &qc));
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Integer content with the sign of the leading coefficient.
    pub(crate) fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        let mut r = Rational::new(num, den);
        if let Some((_, lc)) = self.leading() {
            if lc.is_negative() {
                r = -r;
            }
        }
        r
    }

    /// Integer coefficients, unit content, positive leading coefficient.
    pub(crate) fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.content().recip())
    }

    /// Greatest common divisor in the free ring, primitive with positive
    /// leading coefficient.
    /// Gcd up to a rational factor, normalized primitive. Large inputs may
    /// exhaust [`GCD_FUEL`], in which case some common factors are missed.
    pub(crate) fn gcd(&self, o: &Poly) -> Poly {
        let top = FUEL.with(|f| {
            let fresh = f.get().is_none();
            if fresh {
                f.set(Some(GCD_FUEL));
            }
            fresh
        });
        let g = self.gcd_inner(o);
        if top {
            FUEL.with(|f| f.set(None));
        }
        g
    }

    fn gcd_inner(&self, o: &Poly) -> Poly {
        if self.is_zero() {
            return o.primitive();
        }
        if o.is_zero() {
            return self.primitive();
        }
        if self.as_constant().is_some() || o.as_constant().is_some() {
            return Poly::one();
        }
        if self == o {
            return self.primitive();
        }
        if self.terms.len() == 1 || o.terms.len() == 1 {
            let (single, other) = if self.terms.len() == 1 {
                (self, o)
            } else {
                (o, self)
            };
            let mut g = single.leading().unwrap().0.clone();
            for m in other.terms.keys() {
                g = g.gcd(m);
                if g.is_one() {
                    break;
                }
            }
            return Poly::term(g, Rational::one());
        }
        let a1 = self.atoms();
        let a2 = o.atoms();
        if a1 != a2 {
            // A common factor cannot involve atoms present on one side only,
            // so it divides every coefficient of those atoms.
            let (wide, narrow, keep) = if a1.iter().any(|a| a2.binary_search(a).is_err()) {
                (self, o, &a2)
            } else {
                (o, self, &a1)
            };
            let mut g = narrow.primitive();
            for part in wide.coefficients_outside(keep) {
                g = g.gcd(&part);
                if g.as_constant().is_some() {
                    return Poly::one();
                }
            }
            return g;
        }
        if self.div_exact(o).is_some() {
            return o.primitive();
        }
        if o.div_exact(self).is_some() {
            return self.primitive();
        }
        let v = match (a1.first(), a2.first()) {
            (Some(x), Some(y)) => x.min(y).clone(),
            _ => return Poly::one(),
        };
        if !self.contains(&v) {
            return self.gcd(&o.content_in(&v));
        }
        if !o.contains(&v) {
            return o.gcd(&self.content_in(&v));
        }
        let ca = self.content_in(&v);
        let cb = o.content_in(&v);
        let pa = self.div_exact(&ca).expect("content divides");
        let pb = o.div_exact(&cb).expect("content divides");
        let c = ca.gcd(&cb);
        if coprime_in(&pa, &pb, &v) {
            return c;
        }
        let g = prs_gcd(pa, pb, &v);
        c.mul_plain(&g).primitive()
    }

    /// Gcd of the coefficients with respect to `v`.
    pub(crate) fn content_in(&self, v: &Atom) -> Poly {
        let parts = self.by_atom(v);
        let mut it = parts.into_values();
        let mut g = it.next().map(|p| p.primitive()).unwrap_or_else(Poly::zero);
        for p in it {
            if g.as_constant().is_some() {
                return Poly::one();
            }
            g = g.gcd(&p);
        }
        g.primitive()
    }

    fn primitive_in(&self, v: &Atom) -> Poly {
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides").primitive()
    }
}

/// Primitive polynomial remainder sequence in `v`; inputs primitive in `v`.
/// Cheap certificate that `a` and `b`, both primitive in `v`, share no
/// factor involving `v`. The other atoms are specialized to fixed integers
/// and the coefficients reduced mod a prime; when both leading coefficients
/// survive, the image gcd degree bounds the true one from above. `false`
/// means "unknown".
fn coprime_in(a: &Poly, b: &Poly, v: &Atom) -> bool {
    let mut others = a.atoms();
    others.extend(b.atoms());
    others.sort();
    others.dedup();
    others.retain(|x| x != v);
    for offset in [0u64, 5] {
        let vals: BTreeMap<&Atom, u64> = others
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let k = k as u64;
                (x, 2 + offset + 3 * k + (k * k) % 11)
            })
            .collect();
        let (Some(ia), Some(ib)) = (modular_image(a, v, &vals), modular_image(b, v, &vals)) else {
            continue;
        };
        return modular_gcd_degree(ia, ib) == 0;
    }
    false
}

const PRIME: u64 = 2_147_483_647;

fn mod_pow(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    b %= PRIME;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    r
}

fn mod_inv(x: u64) -> u64 {
    mod_pow(x, PRIME - 2)
}

fn mod_rational(c: &Rational) -> Option<u64> {
    let p = BigInt::from(PRIME);
    let n = c.numer().mod_floor(&p);
    let d = c.denom().mod_floor(&p);
    let to = |x: BigInt| u64::try_from(x).ok();
    let (n, d) = (to(n)?, to(d)?);
    (d != 0).then(|| n * mod_inv(d) % PRIME)
}

/// Dense coefficients in `v` mod [`PRIME`] after substituting `vals`;
/// `None` when the leading coefficient vanishes.
fn modular_image(p: &Poly, v: &Atom, vals: &BTreeMap<&Atom, u64>) -> Option<Vec<u64>> {
    let d = p.degree(v) as usize;
    let mut out = vec![0u64; d + 1];
    for (m, c) in &p.terms {
        let mut t = mod_rational(c)?;
        let mut e = 0;
        for (x, k) in &m.0 {
            if x == v {
                e = *k as usize;
            } else {
                t = t * mod_pow(*vals.get(x)?, *k as u64) % PRIME;
            }
        }
        out[e] = (out[e] + t) % PRIME;
    }
    (out[d] != 0).then_some(out)
}

fn modular_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    let trim = |p: &mut Vec<u64>| {
        while p.last() == Some(&0) {
            p.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = mod_inv(*b.last().unwrap());
        while a.len() >= b.len() {
            let q = a.last().unwrap() * inv % PRIME;
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + PRIME - q * c % PRIME) % PRIME;
            }
            a.pop();
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Pseudo-remainder steps one top-level gcd may spend, recursion included.
const GCD_FUEL: usize = 400;

thread_local! {
    static FUEL: std::cell::Cell<Option<usize>> = const { std::cell::Cell::new(None) };
}

/// Takes one unit of fuel; `false` once exhausted.
fn burn() -> bool {
    FUEL.with(|f| match f.get() {
        Some(0) => false,
        Some(n) => {
            f.set(Some(n - 1));
            true
        }
        None => true,
    })
}

/// Term count past which the remainder sequence is abandoned. Returning 1
/// only skips a cancellation: zero tests stay sound, forms may just be
/// larger than canonical.
const PRS_TERM_BUDGET: usize = 600;

fn prs_gcd(a: Poly, b: Poly, v: &Atom) -> Poly {
    let (mut a, mut b) = if a.degree(v) >= b.degree(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if b.is_zero() {
            return a.primitive_in(v);
        }
        if b.degree(v) == 0 {
            return Poly::one();
        }
        let Some(r) = prem(&a, &b, v) else {
            return Poly::one();
        };
        if r.is_zero() {
            return b.primitive_in(v);
        }
        let r = r.primitive_in(v);
        a = b;
        b = r;
    }
}

/// Pseudo-remainder of `a` by `b` in `v`; `None` past [`PRS_TERM_BUDGET`].
fn prem(a: &Poly, b: &Poly, v: &Atom) -> Option<Poly> {
    let db = b.degree(v);
    let bparts = b.by_atom(v);
    let lcb = bparts.get(&db).cloned().unwrap_or_else(Poly::zero);
    let mut r = a.clone();
    loop {
        let dr = r.degree(v);
        if r.is_zero() || dr < db {
            return Some(r);
        }
        if r.terms.len() > PRS_TERM_BUDGET || !burn() {
            return None;
        }
        let lcr = r.by_atom(v).remove(&dr).unwrap_or_else(Poly::zero);
        let shift = Monomial::atom(v.clone(), dr - db);
        let lhs = r.mul_plain(&lcb);
        let rhs = b.mul_plain(&lcr).mul_term(&shift, &Rational::one());
        r = lhs.sub(&rhs).primitive();
    }
}

/// Polynomial of a square-root radicand.
pub(crate) fn radicand(rad: &Expr) -> Poly {
    match rad.normal() {
        Ok(nf) => {
            debug_assert!(nf.den().is_one());
            nf.num().clone()
        }
        Err(_) => Poly::zero(),
    }
}

/// Largest `k` with `k² | n`, and `n / k²`. Trial division bounded for speed.
pub(crate) fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut k = BigInt::one();
    let mut m = n.clone();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(100_000u32);
    while &p * &p <= m && p < limit {
        let p2 = &p * &p;
        while (&m % &p2).is_zero() {
            m /= &p2;
            k *= &p;
        }
        p += 1u32;
    }
    (k, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::scalar::rat_int;

    fn x(i: usize) -> Poly {
        Poly::atom(Atom::Var(Axis::from_index(i)))
    }

    fn c(v: i64) -> Poly {
        Poly::constant(rat_int(v))
    }

    #[test]
    fn lex_order_prefers_first_axis() {
        let m1 = Monomial::atom(Atom::Var(Axis::X1), 1);
        let m2 = Monomial::atom(Atom::Var(Axis::X2), 5);
        assert!(m1 > m2);
        assert!(m2 > Monomial::one());
    }

    #[test]
    fn gcd_of_products() {
        let a = x(0).add(&x(1)).mul(&x(0).sub(&c(1)));
        let b = x(0).add(&x(1)).mul(&x(2).add(&c(3)));
        let g = a.gcd(&b);
        assert_eq!(g, x(0).add(&x(1)));
    }

    #[test]
    fn gcd_with_one_sided_atoms() {
        // (x0 + x1)(x2 + 3) against (x0 + x1)(x0 - 1): x2 only on the left
        let a = x(0).add(&x(1)).mul(&x(2).add(&c(3)));
        let b = x(0).add(&x(1)).mul(&x(0).sub(&c(1)));
        assert_eq!(a.gcd(&b), x(0).add(&x(1)));
        assert_eq!(b.gcd(&a), x(0).add(&x(1)));
        let d = x(2).mul(&x(0)).add(&x(1));
        assert!(d.gcd(&x(0).add(&c(1))).is_one());
    }

    #[test]
    fn gcd_coprime_is_one() {
        let a = x(0).mul(&x(0)).add(&c(1));
        let b = x(0).add(&x(1));
        assert!(a.gcd(&b).is_one());
    }

    #[test]
    fn modular_image_bounds_gcd_degree() {
        // (v - 1)(v + 2) and (v - 1)(v - 5): one common root
        assert_eq!(modular_gcd_degree(vec![PRIME - 2, 1, 1], vec![5, PRIME - 6, 1]), 1);
        assert_eq!(modular_gcd_degree(vec![1, 0, 1], vec![PRIME - 1, 1]), 0);
        let v = Atom::Var(Axis::X1);
        let a = x(0).mul(&x(1)).add(&c(1));
        let b = x(0).add(&x(1)).mul(&x(0)).add(&c(2));
        assert!(coprime_in(&a, &b, &v));
        let g = x(0).add(&x(1)).add(&c(1));
        assert!(!coprime_in(&g.mul(&a), &g.mul(&b), &v));
    }

    #[test]
    fn exact_division_round_trip() {
        let a = x(0).add(&x(1)).pow(3);
        let b = x(0).add(&x(1));
        assert_eq!(a.div_exact(&b).unwrap(), b.pow(2));
        assert!(x(0).div_exact(&x(1)).is_none());
    }

    #[test]
    fn imaginary_unit_reduces() {
        let i = Poly::atom(Atom::I);
        assert_eq!(i.mul(&i), c(-1));
        assert_eq!(i.pow(4), c(1));
    }

    #[test]
    fn square_part_extraction() {
        let (k, m) = square_part(&BigInt::from(72));
        assert_eq!(k, BigInt::from(6));
        assert_eq!(m, BigInt::from(2));
    }
}
