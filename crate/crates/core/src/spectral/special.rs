//! Gauss hypergeometric and Bessel functions with two derivatives.

use num_traits::{One, Signed, ToPrimitive, Zero};
use statrs::function::gamma::gamma;

use super::SpectralError;
use crate::symkernel::Rational;

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn product(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }

    /// `g(z(r))` from the jet of `g` in `z` and of `z` in `r`.
    pub fn compose(self, z: Jet) -> Jet {
        Jet {
            v: self.v,
            d1: self.d1 * z.d1,
            d2: self.d2 * z.d1 * z.d1 + self.d1 * z.d2,
        }
    }
}

fn nonpositive_integer(x: &Rational) -> bool {
    x.is_integer() && !x.is_positive()
}

/// Coefficients in `z` of `₂F₁(a, b; c; z)` when the series terminates.
pub fn terminating_2f1(a: &Rational, b: &Rational, c: &Rational) -> Option<Vec<Rational>> {
    let len = [a, b]
        .into_iter()
        .filter(|x| nonpositive_integer(x))
        .map(|x| (-x).to_integer().to_usize().unwrap_or(usize::MAX))
        .min()?;
    let mut out = vec![Rational::one()];
    for k in 0..len {
        let kk = Rational::from_integer(k.into());
        let den = (c + &kk) * (&kk + Rational::one());
        if den.is_zero() {
            return None;
        }
        let next = out[k].clone() * (a + &kk) * (b + &kk) / den;
        out.push(next);
    }
    Some(out)
}

/// Jet of a polynomial with the given coefficients.
pub fn poly_jet(coeffs: &[f64], z: f64) -> Jet {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for c in coeffs.iter().rev() {
        d2 = d2 * z + 2.0 * d1;
        d1 = d1 * z + v;
        v = v * z + c;
    }
    Jet { v, d1, d2 }
}

const SERIES_CAP: usize = 4_000_000;

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpectralError> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..SERIES_CAP {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term == 0.0 || (term.abs() < 1e-17 * sum.abs() && k > 2.0) {
            return Ok(sum);
        }
    }
    Err(SpectralError::Domain(format!("2F1({a}, {b}; {c}; {z}) series did not converge")))
}

fn is_int(x: f64) -> bool {
    (x - x.round()).abs() < 1e-12
}

/// `₂F₁(a, b; c; z)` for `−1 < z < 1`. Near `z = 1` the connection
/// formula to `1 − z` is used when `c − a − b` is not an integer.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpectralError> {
    if !(z.abs() < 1.0) {
        return Err(SpectralError::Domain(format!("2F1 needs |z| < 1, got {z}")));
    }
    if c <= 0.0 && is_int(c) {
        return Err(SpectralError::Domain(format!("2F1 with c = {c}")));
    }
    let terminates = |x: f64| x <= 0.0 && is_int(x);
    let s = c - a - b;
    if z <= 0.5 || terminates(a) || terminates(b) || is_int(s) {
        return series(a, b, c, z);
    }
    let w = 1.0 - z;
    let first = gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b)) * series(a, b, 1.0 - s, w)?;
    let second = w.powf(s) * gamma(c) * gamma(-s) / (gamma(a) * gamma(b)) * series(c - a, c - b, s + 1.0, w)?;
    Ok(first + second)
}

/// Jet in `z` of `₂F₁(a, b; c; z)`.
pub fn hyp2f1_jet(a: f64, b: f64, c: f64, z: f64) -> Result<Jet, SpectralError> {
    Ok(Jet {
        v: hyp2f1(a, b, c, z)?,
        d1: a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z)?,
        d2: a * (a + 1.0) * b * (b + 1.0) / (c * (c + 1.0)) * hyp2f1(a + 2.0, b + 2.0, c + 2.0, z)?,
    })
}

/// Largest argument accepted by the power series of [`bessel_jet`].
pub const BESSEL_MAX_ARG: f64 = 25.0;

/// `J_ν(x)` (or `I_ν(x)` when `modified`) with two derivatives, by the
/// power series. `ν ≥ 0`, `0 < x ≤ 25`.
pub fn bessel_jet(nu: f64, x: f64, modified: bool) -> Result<Jet, SpectralError> {
    if nu < 0.0 || !(x > 0.0 && x <= BESSEL_MAX_ARG) {
        return Err(SpectralError::Domain(format!("Bessel series at order {nu}, argument {x}")));
    }
    let sign = if modified { 1.0 } else { -1.0 };
    let q = sign * x * x / 4.0;
    let mut t = (x / 2.0).powf(nu) / gamma(nu + 1.0);
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for k in 0..10_000 {
        let m = 2.0 * k as f64 + nu;
        v += t;
        d1 += m / x * t;
        d2 += m * (m - 1.0) / (x * x) * t;
        let kf = k as f64 + 1.0;
        t *= q / (kf * (kf + nu));
        if kf > x && t.abs() < 1e-18 * v.abs().max(1e-300) {
            return Ok(Jet { v, d1, d2 });
        }
    }
    Err(SpectralError::Domain(format!("Bessel series at order {nu}, argument {x} did not converge")))
}
