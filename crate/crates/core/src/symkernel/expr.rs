use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::normal::NormalForm;
use super::scalar::{rat, rat_int, Axis, GaussRat, Rational};
use super::KernelError;

/// Elementary transcendental functions. `sqrt` is a rational power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Ln,
    Arctan,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Arctan => "arctan",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "arctan" => Func::Arctan,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExprKind {
    Num(GaussRat),
    Var(Axis),
    Param(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Rational),
    Func(Func, Expr),
    /// Application of an abstract function, or one of its formal partial
    /// derivatives: `deriv[i]` counts differentiations in argument `i`.
    Abstract {
        name: Arc<str>,
        deriv: Vec<u8>,
        args: Vec<Expr>,
    },
}

type Cached = OnceLock<Result<NormalForm, KernelError>>;

struct Node {
    kind: ExprKind,
    hash: u64,
    normal: Cached,
    partials: [Cached; 3],
}

/// Immutable, shareable expression tree.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl Eq for Expr {}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0
            .hash
            .cmp(&other.0.hash)
            .then_with(|| self.0.kind.cmp(&other.0.kind))
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Concrete body for an abstract function; argument `i` is bound to axis `i`.
#[derive(Debug, Clone)]
pub struct FunctionDef {
    pub arity: usize,
    pub body: Expr,
}

impl FunctionDef {
    pub fn new(arity: usize, body: Expr) -> Self {
        assert!(arity <= 3, "abstract functions take at most three arguments");
        FunctionDef { arity, body }
    }
}

impl Expr {
    /// Builds a node without any simplification.
    pub fn raw(kind: ExprKind) -> Expr {
        let mut h = DefaultHasher::new();
        kind.hash(&mut h);
        Expr(Arc::new(Node {
            kind,
            hash: h.finish(),
            normal: OnceLock::new(),
            partials: Default::default(),
        }))
    }

    pub(crate) fn with_normal(kind: ExprKind, nf: NormalForm) -> Expr {
        let e = Expr::raw(kind);
        let _ = e.0.normal.set(Ok(nf));
        e
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn num(g: GaussRat) -> Expr {
        Expr::raw(ExprKind::Num(g))
    }

    pub fn int(v: i64) -> Expr {
        Expr::num(GaussRat::int(v))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(GaussRat::frac(n, d))
    }

    pub fn rational(r: Rational) -> Expr {
        Expr::num(GaussRat::real(r))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Expr {
        Expr::num(GaussRat::i())
    }

    pub fn var(a: Axis) -> Expr {
        Expr::raw(ExprKind::Var(a))
    }

    /// `x1`, `x2`, `x3` by one-based index.
    pub fn x(i: usize) -> Expr {
        Expr::var(Axis::from_index(i - 1))
    }

    pub fn param(name: &str) -> Expr {
        Expr::raw(ExprKind::Param(Arc::from(name)))
    }

    pub fn as_num(&self) -> Option<&GaussRat> {
        match self.kind() {
            ExprKind::Num(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        self.as_num().map(|g| g.is_zero()).unwrap_or(false)
    }

    pub fn is_one_literal(&self) -> bool {
        self.as_num().map(|g| g.is_one()).unwrap_or(false)
    }

    /// Sum with flattening and constant folding.
    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut konst = GaussRat::int(0);
        let mut out = Vec::new();
        for t in terms {
            match t.kind() {
                ExprKind::Num(g) => konst = &konst + g,
                ExprKind::Add(inner) => {
                    for u in inner {
                        if let ExprKind::Num(g) = u.kind() {
                            konst = &konst + g;
                        } else {
                            out.push(u.clone());
                        }
                    }
                }
                _ => out.push(t),
            }
        }
        if !konst.is_zero() {
            out.push(Expr::num(konst));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::raw(ExprKind::Add(out)),
        }
    }

    /// Product with flattening and constant folding.
    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut konst = GaussRat::int(1);
        let mut out = Vec::new();
        for t in factors {
            match t.kind() {
                ExprKind::Num(g) => konst = &konst * g,
                ExprKind::Mul(inner) => {
                    for u in inner {
                        if let ExprKind::Num(g) = u.kind() {
                            konst = &konst * g;
                        } else {
                            out.push(u.clone());
                        }
                    }
                }
                _ => out.push(t),
            }
        }
        if konst.is_zero() {
            return Expr::zero();
        }
        if !konst.is_one() {
            out.insert(0, Expr::num(konst));
        }
        match out.len() {
            0 => Expr::one(),
            1 => out.pop().unwrap(),
            _ => Expr::raw(ExprKind::Mul(out)),
        }
    }

    /// Rational power.
    pub fn pow(&self, q: Rational) -> Expr {
        if q.is_zero() {
            return Expr::one();
        }
        if q.is_one() {
            return self.clone();
        }
        if q.is_integer() {
            if let ExprKind::Num(g) = self.kind() {
                if !g.is_zero() || q.is_positive() {
                    if let Some(n) = q.to_integer().to_i64() {
                        if n.unsigned_abs() <= 64 {
                            return Expr::num(gauss_powi(g, n));
                        }
                    }
                }
            }
            if let ExprKind::Pow(b, q0) = self.kind() {
                return b.pow(q0 * &q);
            }
        }
        Expr::raw(ExprKind::Pow(self.clone(), q))
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(rat_int(n))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn sqrt(&self) -> Expr {
        self.pow(rat(1, 2))
    }

    pub fn apply(&self, f: Func) -> Expr {
        Expr::raw(ExprKind::Func(f, self.clone()))
    }

    pub fn exp(&self) -> Expr {
        self.apply(Func::Exp)
    }

    pub fn ln(&self) -> Expr {
        self.apply(Func::Ln)
    }

    pub fn arctan(&self) -> Expr {
        self.apply(Func::Arctan)
    }

    pub fn sin(&self) -> Expr {
        self.apply(Func::Sin)
    }

    pub fn cos(&self) -> Expr {
        self.apply(Func::Cos)
    }

    /// `self^p` for a symbolic exponent, as `exp(p·ln self)` unless `p` is a
    /// rational literal.
    pub fn pow_expr(&self, p: &Expr) -> Expr {
        match p.as_num() {
            Some(g) if g.is_real() => self.pow(g.re.clone()),
            _ => (p * &self.ln()).exp(),
        }
    }

    /// Abstract function application `name(args…)`.
    pub fn call(name: &str, args: Vec<Expr>) -> Expr {
        let n = args.len();
        Expr::raw(ExprKind::Abstract {
            name: Arc::from(name),
            deriv: vec![0; n],
            args,
        })
    }

    /// Formal derivative symbol of an abstract function.
    pub fn call_deriv(name: &str, deriv: Vec<u8>, args: Vec<Expr>) -> Expr {
        assert_eq!(deriv.len(), args.len(), "derivative counts must match arity");
        Expr::raw(ExprKind::Abstract {
            name: Arc::from(name),
            deriv,
            args,
        })
    }

    /// `r² = x1²+x2²+x3²`.
    pub fn r2() -> Expr {
        Expr::sum((1..=3).map(|i| Expr::x(i).powi(2)))
    }

    /// `r̃² = x1²+x2²`.
    pub fn rt2() -> Expr {
        Expr::sum((1..=2).map(|i| Expr::x(i).powi(2)))
    }

    pub fn r() -> Expr {
        Expr::r2().sqrt()
    }

    pub fn rt() -> Expr {
        Expr::rt2().sqrt()
    }

    /// `s_a = 2x_a² − r²`.
    pub fn s(a: usize) -> Expr {
        Expr::int(2) * Expr::x(a).powi(2) - Expr::r2()
    }

    /// Polar angle `φ = arctan(x2/x1)`.
    pub fn phi() -> Expr {
        (Expr::x(2) / Expr::x(1)).arctan()
    }

    /// Cached exact normal form.
    pub fn normal(&self) -> Result<&NormalForm, KernelError> {
        self.0
            .normal
            .get_or_init(|| NormalForm::from_expr(self))
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Canonical tree. Total: returns the input when normalization fails.
    pub fn normalize(&self) -> Expr {
        match self.normal() {
            Ok(nf) => nf.to_expr(),
            Err(_) => self.clone(),
        }
    }

    /// Cached normal form of the partial derivative.
    pub fn normal_diff(&self, a: Axis) -> Result<&NormalForm, KernelError> {
        self.0.partials[a.index()]
            .get_or_init(|| self.normal().and_then(|nf| nf.diff(a)))
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Exact partial derivative by the tree rules.
    pub fn diff(&self, a: Axis) -> Expr {
        let mut memo = HashMap::new();
        self.diff_memo(a, &mut memo)
    }

    fn diff_memo(&self, a: Axis, memo: &mut HashMap<*const Node, Expr>) -> Expr {
        let key = Arc::as_ptr(&self.0);
        if let Some(d) = memo.get(&key) {
            return d.clone();
        }
        let d = match self.kind() {
            ExprKind::Num(_) | ExprKind::Param(_) => Expr::zero(),
            ExprKind::Var(b) => {
                if *b == a {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            ExprKind::Add(ts) => Expr::sum(ts.iter().map(|t| t.diff_memo(a, memo))),
            ExprKind::Mul(fs) => {
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let di = fs[i].diff_memo(a, memo);
                    if di.is_zero_literal() {
                        continue;
                    }
                    let mut parts: Vec<Expr> = Vec::with_capacity(fs.len());
                    for (j, f) in fs.iter().enumerate() {
                        parts.push(if i == j { di.clone() } else { f.clone() });
                    }
                    terms.push(Expr::product(parts));
                }
                Expr::sum(terms)
            }
            ExprKind::Pow(b, q) => {
                let db = b.diff_memo(a, memo);
                if db.is_zero_literal() {
                    Expr::zero()
                } else {
                    Expr::product([
                        Expr::rational(q.clone()),
                        b.pow(q - Rational::one()),
                        db,
                    ])
                }
            }
            ExprKind::Func(f, u) => {
                let du = u.diff_memo(a, memo);
                if du.is_zero_literal() {
                    Expr::zero()
                } else {
                    let outer = match f {
                        Func::Exp => self.clone(),
                        Func::Ln => u.recip(),
                        Func::Arctan => (Expr::one() + u.powi(2)).recip(),
                        Func::Sin => u.cos(),
                        Func::Cos => -u.sin(),
                    };
                    Expr::product([outer, du])
                }
            }
            ExprKind::Abstract { name, deriv, args } => {
                let mut terms = Vec::new();
                for (i, arg) in args.iter().enumerate() {
                    let du = arg.diff_memo(a, memo);
                    if du.is_zero_literal() {
                        continue;
                    }
                    let mut d2 = deriv.clone();
                    d2[i] += 1;
                    let sym = Expr::raw(ExprKind::Abstract {
                        name: name.clone(),
                        deriv: d2,
                        args: args.clone(),
                    });
                    terms.push(Expr::product([sym, du]));
                }
                Expr::sum(terms)
            }
        };
        memo.insert(key, d.clone());
        d
    }

    /// Bottom-up rewrite. `f` is tried on each node first; on `None` the node
    /// is rebuilt from rewritten children.
    pub fn rewrite(&self, f: &mut dyn FnMut(&Expr) -> Option<Expr>) -> Expr {
        let mut memo = HashMap::new();
        self.rewrite_memo(f, &mut memo)
    }

    fn rewrite_memo(
        &self,
        f: &mut dyn FnMut(&Expr) -> Option<Expr>,
        memo: &mut HashMap<*const Node, Expr>,
    ) -> Expr {
        let key = Arc::as_ptr(&self.0);
        if let Some(e) = memo.get(&key) {
            return e.clone();
        }
        let out = if let Some(e) = f(self) {
            e
        } else {
            match self.kind() {
                ExprKind::Num(_) | ExprKind::Var(_) | ExprKind::Param(_) => self.clone(),
                ExprKind::Add(ts) => Expr::sum(ts.iter().map(|t| t.rewrite_memo(f, memo))),
                ExprKind::Mul(ts) => Expr::product(ts.iter().map(|t| t.rewrite_memo(f, memo))),
                ExprKind::Pow(b, q) => b.rewrite_memo(f, memo).pow(q.clone()),
                ExprKind::Func(k, u) => u.rewrite_memo(f, memo).apply(*k),
                ExprKind::Abstract { name, deriv, args } => Expr::raw(ExprKind::Abstract {
                    name: name.clone(),
                    deriv: deriv.clone(),
                    args: args.iter().map(|t| t.rewrite_memo(f, memo)).collect(),
                }),
            }
        };
        memo.insert(key, out.clone());
        out
    }

    /// Simultaneous substitution `x_a → images[a]`.
    pub fn subst_vars(&self, images: &[Expr; 3]) -> Expr {
        self.rewrite(&mut |e| match e.kind() {
            ExprKind::Var(a) => Some(images[a.index()].clone()),
            _ => None,
        })
    }

    /// Simultaneous substitution of named parameters.
    pub fn subst_params(&self, values: &BTreeMap<String, Expr>) -> Expr {
        self.rewrite(&mut |e| match e.kind() {
            ExprKind::Param(p) => values.get(p.as_ref()).cloned(),
            _ => None,
        })
    }

    /// Replaces every application of `name` (and its derivative symbols) by the
    /// corresponding derivative of `def`.
    pub fn instantiate(&self, name: &str, def: &FunctionDef) -> Expr {
        let mut partials: HashMap<Vec<u8>, Expr> = HashMap::new();
        let mut f = |e: &Expr| -> Option<Expr> {
            let ExprKind::Abstract {
                name: n,
                deriv,
                args,
            } = e.kind()
            else {
                return None;
            };
            if n.as_ref() != name {
                return None;
            }
            assert_eq!(args.len(), def.arity, "arity mismatch instantiating {name}");
            let body = partials
                .entry(deriv.clone())
                .or_insert_with(|| {
                    let mut b = def.body.clone();
                    for (i, k) in deriv.iter().enumerate() {
                        for _ in 0..*k {
                            b = b.diff(Axis::from_index(i));
                        }
                    }
                    b
                })
                .clone();
            let inner: Vec<Expr> = args.iter().map(|a| a.instantiate(name, def)).collect();
            let mut images = [Expr::x(1), Expr::x(2), Expr::x(3)];
            for (i, a) in inner.into_iter().enumerate() {
                images[i] = a;
            }
            Some(body.subst_vars(&images))
        };
        self.rewrite(&mut f)
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        let mut seen = BTreeSet::new();
        self.visit_inner(f, &mut seen);
    }

    fn visit_inner(&self, f: &mut dyn FnMut(&Expr), seen: &mut BTreeSet<usize>) {
        if !seen.insert(Arc::as_ptr(&self.0) as usize) {
            return;
        }
        f(self);
        match self.kind() {
            ExprKind::Add(ts) | ExprKind::Mul(ts) => ts.iter().for_each(|t| t.visit_inner(f, seen)),
            ExprKind::Pow(b, _) => b.visit_inner(f, seen),
            ExprKind::Func(_, u) => u.visit_inner(f, seen),
            ExprKind::Abstract { args, .. } => args.iter().for_each(|t| t.visit_inner(f, seen)),
            _ => {}
        }
    }

    /// Names of free parameters.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let ExprKind::Param(p) = e.kind() {
                out.insert(p.to_string());
            }
        });
        out
    }

    /// Names of abstract functions.
    pub fn abstract_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let ExprKind::Abstract { name, .. } = e.kind() {
                out.insert(name.to_string());
            }
        });
        out
    }

    /// True when the tree has no transcendental, abstract or fractional-power
    /// nodes.
    pub fn is_rational(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |e| match e.kind() {
            ExprKind::Func(..) | ExprKind::Abstract { .. } => ok = false,
            ExprKind::Pow(_, q) if !q.is_integer() => ok = false,
            _ => {}
        });
        ok
    }

    /// Number of distinct nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

fn gauss_powi(g: &GaussRat, n: i64) -> GaussRat {
    let mut acc = GaussRat::int(1);
    for _ in 0..n.unsigned_abs() {
        acc = &acc * g;
    }
    if n < 0 {
        let d = &acc.re * &acc.re + &acc.im * &acc.im;
        GaussRat::new(&acc.re / &d, -&acc.im / &d)
    } else {
        acc
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, o)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                (&self).$m(&o)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                (&self).$m(o)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                self.$m(&o)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::sum([a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::product([a.clone(), b.clone()]));
binop!(Div, div, |a, b| Expr::product([a.clone(), b.recip()]));

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::int(-1), self.clone()])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Expr {
        Expr::int(v)
    }
}

impl From<GaussRat> for Expr {
    fn from(g: GaussRat) -> Expr {
        Expr::num(g)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::rational(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_fold_constants() {
        let e = Expr::int(2) + Expr::int(3);
        assert_eq!(e, Expr::int(5));
        let z = Expr::x(1) * Expr::zero();
        assert!(z.is_zero_literal());
    }

    #[test]
    fn structural_equality_ignores_sharing() {
        let a = Expr::x(1) + Expr::x(2);
        let b = Expr::x(1) + Expr::x(2);
        assert!(!a.ptr_eq(&b));
        assert_eq!(a, b);
    }

    #[test]
    fn chain_rule_on_abstract_argument() {
        let u = (Expr::r2() - Expr::one()) / Expr::x(1);
        let f = Expr::call("F", vec![u.clone()]);
        let d = f.diff(Axis::X2);
        let expected = Expr::call_deriv("F", vec![1], vec![u]) * (Expr::int(2) * Expr::x(2) / Expr::x(1));
        assert!((d - expected).normal().unwrap().is_zero());
    }

    #[test]
    fn instantiate_replaces_derivatives() {
        let f = Expr::call_deriv("F", vec![1], vec![Expr::x(3)]);
        let def = FunctionDef::new(1, Expr::x(1).powi(3));
        let e = f.instantiate("F", &def);
        let expected = Expr::int(3) * Expr::x(3).powi(2);
        assert!((e - expected).normal().unwrap().is_zero());
    }

    #[test]
    fn parameter_collection() {
        let e = Expr::param("mu") * Expr::r2() + Expr::param("nu");
        let ps: Vec<_> = e.params().into_iter().collect();
        assert_eq!(ps, vec!["mu".to_string(), "nu".to_string()]);
    }
}
