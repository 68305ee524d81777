//! General linear differential operators `Σ c_α ∂^α` with normal-form
//! coefficients, composed by the Leibniz rule.

use std::collections::{BTreeMap, HashMap};

use crate::symkernel::{Axis, GaussRat, KernelError, NormalForm};

pub(crate) type MultiIndex = [u8; 3];

pub(crate) fn order(m: &MultiIndex) -> u8 {
    m[0] + m[1] + m[2]
}

pub(crate) fn unit(a: usize) -> MultiIndex {
    let mut m = [0; 3];
    m[a] = 1;
    m
}

pub(crate) fn pair(a: usize, b: usize) -> MultiIndex {
    let mut m = [0; 3];
    m[a] += 1;
    m[b] += 1;
    m
}

fn binom(n: u8, k: u8) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * i64::from(n - i) / i64::from(i + 1);
    }
    r
}

/// All `γ ≤ α` componentwise.
fn below(alpha: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for g0 in 0..=alpha[0] {
        for g1 in 0..=alpha[1] {
            for g2 in 0..=alpha[2] {
                out.push([g0, g1, g2]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct DiffOp {
    pub(crate) terms: BTreeMap<MultiIndex, NormalForm>,
}

impl DiffOp {
    pub(crate) fn insert(&mut self, m: MultiIndex, c: NormalForm) {
        if c.is_zero() {
            return;
        }
        let s = match self.terms.remove(&m) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(m, s);
        }
    }

    pub(crate) fn get(&self, m: &MultiIndex) -> NormalForm {
        self.terms.get(m).cloned().unwrap_or_else(NormalForm::zero)
    }

    pub(crate) fn sub(&self, o: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert(*m, c.neg());
        }
        out
    }

    /// Operator product `self ∘ o`.
    pub(crate) fn compose(&self, o: &DiffOp) -> Result<DiffOp, KernelError> {
        let mut derivs: HashMap<(MultiIndex, MultiIndex), NormalForm> = HashMap::new();
        let mut out = DiffOp::default();
        for (alpha, a) in &self.terms {
            for (beta, b) in &o.terms {
                for gamma in below(alpha) {
                    let db = match derivs.get(&(*beta, gamma)) {
                        Some(d) => d.clone(),
                        None => {
                            let d = partial(b, &gamma)?;
                            derivs.insert((*beta, gamma), d.clone());
                            d
                        }
                    };
                    if db.is_zero() {
                        continue;
                    }
                    let k: i64 = (0..3).map(|i| binom(alpha[i], gamma[i])).product();
                    let mut m = *beta;
                    for i in 0..3 {
                        m[i] += alpha[i] - gamma[i];
                    }
                    let c = a.mul(&db).scale(&GaussRat::int(k));
                    out.insert(m, c);
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn commutator(&self, o: &DiffOp) -> Result<DiffOp, KernelError> {
        Ok(self.compose(o)?.sub(&o.compose(self)?))
    }
}

/// `∂^γ c`.
pub(crate) fn partial(c: &NormalForm, gamma: &MultiIndex) -> Result<NormalForm, KernelError> {
    let mut d = c.clone();
    for (i, k) in gamma.iter().enumerate() {
        for _ in 0..*k {
            if d.is_zero() {
                return Ok(d);
            }
            d = d.diff(Axis::from_index(i))?;
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::Expr;

    fn nf(e: Expr) -> NormalForm {
        e.normal().unwrap().clone()
    }

    #[test]
    fn leibniz_on_multiplication_operator() {
        // ∂1 ∘ x1 = x1 ∂1 + 1
        let mut d1 = DiffOp::default();
        d1.insert(unit(0), NormalForm::one());
        let mut x1 = DiffOp::default();
        x1.insert([0; 3], nf(Expr::x(1)));
        let p = d1.compose(&x1).unwrap();
        assert_eq!(p.get(&unit(0)), nf(Expr::x(1)));
        assert_eq!(p.get(&[0; 3]), NormalForm::one());
    }

    #[test]
    fn second_derivative_of_product() {
        // ∂1² ∘ x1² = x1² ∂1² + 4 x1 ∂1 + 2
        let mut d = DiffOp::default();
        d.insert([2, 0, 0], NormalForm::one());
        let mut m = DiffOp::default();
        m.insert([0; 3], nf(Expr::x(1).powi(2)));
        let p = d.compose(&m).unwrap();
        assert_eq!(p.get(&[2, 0, 0]), nf(Expr::x(1).powi(2)));
        assert_eq!(p.get(&[1, 0, 0]), nf(Expr::int(4) * Expr::x(1)));
        assert_eq!(p.get(&[0, 0, 0]), nf(Expr::int(2)));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2), 6);
        assert_eq!(binom(2, 0), 1);
        assert_eq!(binom(3, 3), 1);
    }
}
