//! Exact radial solutions and their residual and normalization checks.

use num_traits::ToPrimitive;
use serde::Serialize;

use super::quad::adaptive_simpson;
use super::special::{bessel_jet, hyp2f1_jet, poly_jet, terminating_2f1, Jet, BESSEL_MAX_ARG};
use super::{SpectralError, System};
use crate::symkernel::{rat, Rational};

/// Which radial equation of the scale-invariant system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleEquation {
    /// `−r̃²(Φ″ + ω²Φ) − 3r̃Φ′ = (Ẽ − κ²)Φ`, solved by `J_β(ωr̃)/r̃`.
    Printed,
    /// `−r̃²(Φ″ − ω²Φ) − 3r̃Φ′ = (Ẽ − κ²)Φ`, the reduction of `−r̃²Δ − 2x_α∂_α`,
    /// solved by `I_β(ωr̃)/r̃`.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "formula", rename_all = "snake_case")]
pub enum ClosedFormSolution {
    /// `(r²+1)^{−n−½} r^{l+1} F(−n+l+1, −n+½; l+3/2; −r²)`, `n ≥ l+1`.
    Soll { n: u32, l: u32 },
    /// `(1−r²)^{−½−k} r^{l+1} F(−k+l+1, −k+½; l+3/2; r²)`, the branch with
    /// vanishing second constant.
    Soll1 { k: f64, l: u32 },
    /// `Z_β(ωr̃)/r̃` with `β = √(κ²+1−Ẽ)`.
    Soso {
        kappa: i64,
        etilde: f64,
        omega: f64,
        equation: ScaleEquation,
    },
}

impl ClosedFormSolution {
    pub fn formula(&self) -> &'static str {
        match self {
            ClosedFormSolution::Soll { .. } => "soll",
            ClosedFormSolution::Soll1 { .. } => "soll1",
            ClosedFormSolution::Soso { .. } => "soso",
        }
    }

    pub fn label(&self) -> String {
        match self {
            ClosedFormSolution::Soll { n, l } => format!("soll n={n} l={l}"),
            ClosedFormSolution::Soll1 { k, l } => format!("soll1 k={k} l={l}"),
            ClosedFormSolution::Soso {
                kappa,
                etilde,
                omega,
                equation,
            } => format!("soso kappa={kappa} Etilde={etilde} omega={omega} ({equation:?})"),
        }
    }

    /// Right-hand side constant of the radial equation.
    pub fn eigenvalue(&self) -> f64 {
        match *self {
            ClosedFormSolution::Soll { n, .. } => 4.0 * (n as f64).powi(2) + 1.0,
            ClosedFormSolution::Soll1 { k, .. } => -1.0 - 4.0 * k * k,
            ClosedFormSolution::Soso { kappa, etilde, .. } => etilde - (kappa * kappa) as f64,
        }
    }

    /// Bessel index `β = √(κ²+1−Ẽ)`.
    pub fn bessel_index(&self) -> Option<f64> {
        match *self {
            ClosedFormSolution::Soso { kappa, etilde, .. } => {
                let b2 = (kappa * kappa) as f64 + 1.0 - etilde;
                (b2 >= 0.0).then(|| b2.sqrt())
            }
            _ => None,
        }
    }

    /// The index as printed next to the Bessel solution, `κ²+1−Ẽ`.
    pub fn printed_index(&self) -> Option<f64> {
        match *self {
            ClosedFormSolution::Soso { kappa, etilde, .. } => Some((kappa * kappa) as f64 + 1.0 - etilde),
            _ => None,
        }
    }

    /// Exact coefficients in `z = −r²` of the terminating series of `soll`.
    pub fn terminating_coefficients(&self) -> Option<Vec<Rational>> {
        match *self {
            ClosedFormSolution::Soll { n, l } => {
                let (n, l) = (n as i64, l as i64);
                terminating_2f1(&rat(l + 1 - n, 1), &rat(1 - 2 * n, 2), &rat(2 * l + 3, 2))
            }
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), SpectralError> {
        match *self {
            ClosedFormSolution::Soll { n, l } if n < l + 1 => Err(SpectralError::InvalidProblem(format!(
                "soll needs n >= l + 1, got n={n}, l={l}"
            ))),
            ClosedFormSolution::Soll1 { k, .. } if !(k.is_finite() && k >= 0.0) => {
                Err(SpectralError::InvalidProblem(format!("soll1 needs real k >= 0, got {k}")))
            }
            ClosedFormSolution::Soso { omega, .. } if !(omega > 0.0) => {
                Err(SpectralError::InvalidProblem(format!("soso needs omega > 0, got {omega}")))
            }
            ClosedFormSolution::Soso { kappa, etilde, .. } if self.bessel_index().is_none() => Err(
                SpectralError::InvalidProblem(format!("kappa^2 + 1 - Etilde < 0 for kappa={kappa}, Etilde={etilde}")),
            ),
            _ => Ok(()),
        }
    }

    /// Open interval on which the solution is evaluated.
    pub fn domain(&self) -> (f64, f64) {
        match *self {
            ClosedFormSolution::Soll { .. } => (0.0, f64::INFINITY),
            ClosedFormSolution::Soll1 { .. } => (0.0, 1.0),
            ClosedFormSolution::Soso { omega, .. } => (0.0, BESSEL_MAX_ARG / omega),
        }
    }

    /// `count` evenly spaced points well inside the domain.
    pub fn sample_points(&self, count: usize) -> Vec<f64> {
        let (lo, hi) = match *self {
            ClosedFormSolution::Soll { .. } => (0.05, 6.0),
            ClosedFormSolution::Soll1 { .. } => (0.05, 0.95),
            ClosedFormSolution::Soso { omega, .. } => (0.1, (8.0 / omega).min(0.9 * BESSEL_MAX_ARG / omega)),
        };
        if count == 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
    }

    /// Value and two `r`-derivatives of the solution.
    pub fn jet(&self, r: f64) -> Result<Jet, SpectralError> {
        self.validate()?;
        let (lo, hi) = self.domain();
        if !(r > lo && r < hi) {
            return Err(SpectralError::Domain(format!("{} at r = {r}", self.label())));
        }
        match *self {
            ClosedFormSolution::Soll { n, l } => {
                let coeffs: Vec<f64> = self
                    .terminating_coefficients()
                    .expect("n >= l + 1 terminates")
                    .iter()
                    .map(|c| c.to_f64().unwrap_or(f64::NAN))
                    .collect();
                let z = Jet { v: -r * r, d1: -2.0 * r, d2: -2.0 };
                let f = poly_jet(&coeffs, z.v).compose(z);
                let base = power_jet(Jet { v: r * r + 1.0, d1: 2.0 * r, d2: 2.0 }, -(n as f64) - 0.5);
                Ok(base.product(monomial_jet(r, l as f64 + 1.0)).product(f))
            }
            ClosedFormSolution::Soll1 { k, l } => {
                let l = l as f64;
                let z = Jet { v: r * r, d1: 2.0 * r, d2: 2.0 };
                let f = hyp2f1_jet(-k + l + 1.0, -k + 0.5, 1.5 + l, z.v)?.compose(z);
                let base = power_jet(Jet { v: 1.0 - r * r, d1: -2.0 * r, d2: -2.0 }, -0.5 - k);
                Ok(base.product(monomial_jet(r, l + 1.0)).product(f))
            }
            ClosedFormSolution::Soso { omega, equation, .. } => {
                let beta = self.bessel_index().expect("validated");
                let b = bessel_jet(beta, omega * r, equation == ScaleEquation::Derived)?;
                let b = Jet {
                    v: b.v,
                    d1: omega * b.d1,
                    d2: omega * omega * b.d2,
                };
                Ok(b.product(monomial_jet(r, -1.0)))
            }
        }
    }

    /// `Lφ` for the radial operator the solution belongs to.
    fn apply_operator(&self, r: f64, j: Jet) -> f64 {
        match *self {
            ClosedFormSolution::Soll { l, .. } => sl_apply(System::So4, l, r, j),
            ClosedFormSolution::Soll1 { l, .. } => sl_apply(System::So13, l, r, j),
            ClosedFormSolution::Soso { omega, equation, .. } => {
                let w2 = match equation {
                    ScaleEquation::Printed => omega * omega,
                    ScaleEquation::Derived => -omega * omega,
                };
                -r * r * (j.d2 + w2 * j.v) - 3.0 * r * j.d1
            }
        }
    }
}

fn power_jet(u: Jet, s: f64) -> Jet {
    Jet {
        v: u.v.powf(s),
        d1: s * u.v.powf(s - 1.0) * u.d1,
        d2: s * (s - 1.0) * u.v.powf(s - 2.0) * u.d1 * u.d1 + s * u.v.powf(s - 1.0) * u.d2,
    }
}

fn monomial_jet(r: f64, m: f64) -> Jet {
    power_jet(Jet { v: r, d1: 1.0, d2: 0.0 }, m)
}

/// `−(pφ′)′ + qφ` from a jet of `φ`.
pub(crate) fn sl_apply(system: System, l: u32, r: f64, j: Jet) -> f64 {
    -system.p(r) * j.d2 - system.dp(r) * j.d1 + system.q(l, r) * j.v
}

/// `max |Lφ − Λφ| / max(1, |Λφ|)` over the sample points.
pub fn closed_form_residual(s: &ClosedFormSolution, sample_points: &[f64]) -> Result<f64, SpectralError> {
    let lambda = s.eigenvalue();
    let mut worst: f64 = 0.0;
    for &r in sample_points {
        let j = s.jet(r)?;
        let res = (s.apply_operator(r, j) - lambda * j.v).abs() / (lambda * j.v).abs().max(1.0);
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Residual of a Bessel-type solution against either scale equation,
/// independent of which equation the solution was built for.
pub fn scale_residual(s: &ClosedFormSolution, against: ScaleEquation, sample_points: &[f64]) -> Result<f64, SpectralError> {
    match *s {
        ClosedFormSolution::Soso {
            kappa, etilde, omega, ..
        } => {
            let lambda = s.eigenvalue();
            let probe = ClosedFormSolution::Soso {
                kappa,
                etilde,
                omega,
                equation: against,
            };
            let mut worst: f64 = 0.0;
            for &r in sample_points {
                let j = s.jet(r)?;
                let res = (probe.apply_operator(r, j) - lambda * j.v).abs() / (lambda * j.v).abs().max(1.0);
                worst = worst.max(res);
            }
            Ok(worst)
        }
        _ => Err(SpectralError::Unsupported(format!("{} is not a Bessel solution", s.label()))),
    }
}

/// Result of a normalization quadrature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationReport {
    pub solution: String,
    /// The weight the integral uses.
    pub metric: String,
    pub signed_value: f64,
    pub abs_value: f64,
    /// Verdict from the exponents of the integrand at the interval ends.
    pub finite: bool,
    /// Integrand exponents at the left and right ends.
    pub end_exponents: (f64, f64),
    /// The integrand tends to zero at both ends.
    pub vanishes_at_ends: bool,
    /// Integrand sampled close to both ends.
    pub end_values: (f64, f64),
}

const QUAD_TOL: f64 = 1e-11;
const EDGE: f64 = 1e-9;

/// Norm of the solution: `∫₀^∞ φ² dr` for `soll`, and `∫₀¹ φ²(r²−1)³ dr`
/// for `soll1`. The half line is mapped to finite intervals by `r = 1/t`.
pub fn normalization_integral(s: &ClosedFormSolution) -> Result<NormalizationReport, SpectralError> {
    s.validate()?;
    match *s {
        ClosedFormSolution::Soll { l, .. } => {
            let dens = |r: f64| s.jet(r).map(|j| j.v * j.v).unwrap_or(f64::NAN);
            let inner = adaptive_simpson(&mut |r| if r == 0.0 { 0.0 } else { dens(r) }, 0.0, 1.0, QUAD_TOL);
            let outer = adaptive_simpson(
                &mut |t: f64| if t == 0.0 { 0.0 } else { dens(1.0 / t) / (t * t) },
                0.0,
                1.0,
                QUAD_TOL,
            );
            let value = check_finite(inner + outer)?;
            let ends = (2.0 * l as f64 + 2.0, -2.0 * l as f64 - 4.0);
            Ok(NormalizationReport {
                solution: s.label(),
                metric: "dr on (0, inf)".into(),
                signed_value: value,
                abs_value: value.abs(),
                finite: ends.0 > -1.0 && ends.1 < -1.0,
                end_exponents: ends,
                vanishes_at_ends: ends.0 > 0.0 && ends.1 < 0.0,
                end_values: (dens(1e-6), dens(1e6)),
            })
        }
        ClosedFormSolution::Soll1 { k, l } => {
            if (2.0 * k - (2.0 * k).round()).abs() < 1e-12 {
                return Err(SpectralError::Unsupported(format!(
                    "2k = {} is an integer; the hypergeometric factor is not resolved at r = 1",
                    2.0 * k
                )));
            }
            let lf = l as f64;
            // φ²(r²−1)³ = −(1−r²)^{2−2k} r^{2l+2} F²
            let mut dens = |r: f64| {
                if r == 0.0 {
                    return 0.0;
                }
                match hyp2f1_jet(-k + lf + 1.0, -k + 0.5, 1.5 + lf, r * r) {
                    Ok(f) => -(1.0 - r * r).powf(2.0 - 2.0 * k) * r.powf(2.0 * lf + 2.0) * f.v * f.v,
                    Err(_) => f64::NAN,
                }
            };
            let signed = check_finite(adaptive_simpson(&mut dens, 0.0, 1.0 - EDGE, QUAD_TOL))?;
            let ends = (2.0 * lf + 2.0, 2.0 - 2.0 * k);
            Ok(NormalizationReport {
                solution: s.label(),
                metric: "(r^2 - 1)^3 dr on (0, 1)".into(),
                signed_value: signed,
                abs_value: signed.abs(),
                finite: ends.0 > -1.0 && ends.1 > -1.0,
                end_exponents: ends,
                vanishes_at_ends: ends.0 > 0.0 && ends.1 > 0.0,
                end_values: (dens(1e-6), dens(1.0 - 1e-6)),
            })
        }
        ClosedFormSolution::Soso { .. } => Err(SpectralError::Unsupported(
            "normalization is implemented for soll and soll1".into(),
        )),
    }
}

fn check_finite(v: f64) -> Result<f64, SpectralError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SpectralError::Domain("quadrature produced a non-finite value".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soll_lowest_state_is_elementary() {
        // n=1, l=0: φ = r(1+r²)^{−3/2}
        let s = ClosedFormSolution::Soll { n: 1, l: 0 };
        for r in [0.3, 1.0, 2.7] {
            let j = s.jet(r).unwrap();
            assert!((j.v - r * (1.0 + r * r).powf(-1.5)).abs() < 1e-15);
        }
        assert!(closed_form_residual(&s, &s.sample_points(25)).unwrap() < 1e-10);
    }

    #[test]
    fn soll_second_state_polynomial() {
        let s = ClosedFormSolution::Soll { n: 2, l: 0 };
        // F(−1, −3/2; 3/2; −r²) = 1 − r²
        assert_eq!(s.terminating_coefficients().unwrap(), vec![rat(1, 1), rat(1, 1)]);
        let r: f64 = 0.8;
        let direct = r * (1.0 + r * r).powf(-2.5) * (1.0 - r * r);
        assert!((s.jet(r).unwrap().v - direct).abs() < 1e-15);
        assert!(closed_form_residual(&s, &s.sample_points(25)).unwrap() < 1e-8);
    }

    #[test]
    fn wrong_eigenvalue_leaves_a_residual() {
        // the n=2 profile against the n=1 level
        let s = ClosedFormSolution::Soll { n: 2, l: 0 };
        let pts = s.sample_points(10);
        let worst = pts
            .iter()
            .map(|&r| {
                let j = s.jet(r).unwrap();
                (sl_apply(System::So4, 0, r, j) - 5.0 * j.v).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-2);
    }

    #[test]
    fn soll1_and_soso_residuals() {
        for s in [ClosedFormSolution::Soll1 { k: 0.3, l: 0 }, ClosedFormSolution::Soll1 { k: 0.7, l: 2 }] {
            assert!(closed_form_residual(&s, &s.sample_points(20)).unwrap() < 1e-8, "{}", s.label());
        }
        let s = ClosedFormSolution::Soso {
            kappa: 0,
            etilde: 1.0,
            omega: 2.0,
            equation: ScaleEquation::Printed,
        };
        assert_eq!(s.bessel_index(), Some(0.0));
        let pts = s.sample_points(20);
        assert!(closed_form_residual(&s, &pts).unwrap() < 1e-8);
        // J solves the printed equation only
        assert!(scale_residual(&s, ScaleEquation::Derived, &pts).unwrap() > 1e-2);
        let m = ClosedFormSolution::Soso {
            kappa: 0,
            etilde: 1.0,
            omega: 2.0,
            equation: ScaleEquation::Derived,
        };
        assert!(closed_form_residual(&m, &pts).unwrap() < 1e-8);
    }

    #[test]
    fn invalid_and_singular_inputs() {
        assert!(ClosedFormSolution::Soll { n: 1, l: 1 }.jet(0.5).is_err());
        assert!(ClosedFormSolution::Soll1 { k: 0.3, l: 0 }.jet(1.0).is_err());
        assert!(ClosedFormSolution::Soll { n: 1, l: 0 }.jet(0.0).is_err());
        let bad = ClosedFormSolution::Soso {
            kappa: 0,
            etilde: 3.0,
            omega: 1.0,
            equation: ScaleEquation::Printed,
        };
        assert!(bad.jet(1.0).is_err());
        assert_eq!(bad.printed_index(), Some(-2.0));
    }

    #[test]
    fn soll_norm_exact() {
        // ∫₀^∞ r²(1+r²)^{−3} dr = π/16
        let rep = normalization_integral(&ClosedFormSolution::Soll { n: 1, l: 0 }).unwrap();
        assert!((rep.signed_value - std::f64::consts::PI / 16.0).abs() < 1e-9);
        assert!(rep.finite && rep.vanishes_at_ends);
        assert_eq!(rep.end_exponents, (2.0, -4.0));
    }

    #[test]
    fn soll1_norm_under_the_signed_weight() {
        // reference values from an independent 30-digit quadrature
        for (k, l, reference) in [
            (0.3, 0, -0.114_291_311_672_884_98),
            (0.7, 0, -0.171_998_727_413_281_68),
            (0.3, 1, -0.048_933_827_094_954_295),
        ] {
            let rep = normalization_integral(&ClosedFormSolution::Soll1 { k, l }).unwrap();
            assert!((rep.signed_value - reference).abs() < 1e-8, "{k} {l}: {}", rep.signed_value);
            assert_eq!(rep.abs_value, -rep.signed_value);
            assert!(rep.finite && rep.vanishes_at_ends, "{k}");
            assert!(rep.end_values.1.abs() < 1e-3);
        }
        let rep = normalization_integral(&ClosedFormSolution::Soll1 { k: 1.2, l: 0 }).unwrap();
        assert!(rep.finite && !rep.vanishes_at_ends);
        assert!(normalization_integral(&ClosedFormSolution::Soll1 { k: 0.5, l: 0 }).is_err());
    }
}
