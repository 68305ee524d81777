//! Algebraic spectra from Casimir eigenvalues.

use serde::{Deserialize, Serialize};

use super::CasimirError;
use crate::report::Annotation;
use num_traits::{Signed, Zero};

use crate::symkernel::Expr;

/// `E = μ·mu_coeff + ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineEnergy {
    pub mu_coeff: i64,
    pub nu_coeff: i64,
}

impl std::fmt::Display for AffineEnergy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "mu*{} + nu", self.mu_coeff)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct So4Level {
    pub n: i64,
    /// `C₁` eigenvalue `4q(q+1)` with `q = (n−1)/2`.
    pub casimir: i64,
    pub etilde: i64,
    pub energy: AffineEnergy,
    /// Orbital numbers present at this level.
    pub allowed_l: Vec<i64>,
}

/// Level `n` of the `so(4)` system: `Ẽ = 4n² + 5`, `l ≤ n − 1`.
pub fn algebraic_spectrum_so4(n: i64) -> Result<So4Level, CasimirError> {
    if n < 1 {
        return Err(CasimirError::Domain(n));
    }
    // 4q(q+1) with q = (n-1)/2, kept integral
    let casimir = (n - 1) * (n + 1);
    let etilde = 4 * casimir + 9;
    Ok(So4Level {
        n,
        casimir,
        etilde,
        energy: AffineEnergy {
            mu_coeff: etilde,
            nu_coeff: 1,
        },
        allowed_l: (0..n).collect(),
    })
}

/// CSV with columns `n,Etilde,E_mu_coeff,E_const` for `n = 1..=max_n`.
pub fn spectrum_csv(max_n: i64) -> Result<String, CasimirError> {
    let mut out = String::from("n,Etilde,E_mu_coeff,E_const\n");
    for n in 1..=max_n {
        let l = algebraic_spectrum_so4(n)?;
        out.push_str(&format!("{},{},{},nu\n", l.n, l.etilde, l.energy.mu_coeff));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// `−6 ≤ Ẽ ≤ −5`.
    Principal,
    /// `−5 ≤ Ẽ < ∞`.
    Subsidiary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct So13Energy {
    pub j1_squared: f64,
    /// `Ẽ = −5 − j₁²` as printed.
    pub etilde: f64,
    /// Every printed window containing `Ẽ`; both at `Ẽ = −5`.
    pub windows: Vec<Window>,
    /// `Ẽ = 4c₁ − 9` with `c₁ = 1 − j₁²`, from `C₁ = ¼(Ĥ + 9)`.
    pub etilde_from_casimir: f64,
}

pub fn so13_energy_window(j1sq: f64) -> So13Energy {
    let etilde = -5.0 - j1sq;
    let mut windows = Vec::new();
    if (-6.0..=-5.0).contains(&etilde) {
        windows.push(Window::Principal);
    }
    if etilde >= -5.0 {
        windows.push(Window::Subsidiary);
    }
    So13Energy {
        j1_squared: j1sq,
        etilde,
        windows,
        etilde_from_casimir: 4.0 * (1.0 - j1sq) - 9.0,
    }
}

fn signed(q: &num_rational::BigRational) -> String {
    if q.is_negative() {
        format!("- {}", -q)
    } else {
        format!("+ {q}")
    }
}

/// Side-by-side derivations of the `so(1,3)` energies. `fitted` is the
/// computed `(α, β)` of `C₁ = αĤ + β`, if any.
pub(crate) fn so13_derivation_annotation(fitted: Option<(Expr, Expr)>) -> Annotation {
    let computed = fitted
        .and_then(|(a, b)| Some((a.as_num()?.re.clone(), b.as_num()?.re.clone())))
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, b)| {
            let p = a.recip();
            let q = -(&b / &a);
            format!(
                " The operator computation gives C1 = {a}·H {}, hence E = {p}·c1 {} = {} {}·j1² with c1 = 1 − j1².",
                signed(&b),
                signed(&q),
                &p + &q,
                signed(&-p.clone())
            )
        })
        .unwrap_or_default();
    Annotation::new(
        "so13",
        "energy derivation",
        format!(
            "Printed: E = −5 − j1², windows −6 ≤ E ≤ −5 (principal) and −5 ≤ E (subsidiary). \
             From C1 = (H + 9)/4 and c1 = 1 − j1²: E = 4c1 − 9 = −5 − 4j1². \
             For j1 = iλ this gives E = −5 + 4λ² ≥ −5, and for 0 ≤ j1 ≤ 1 it gives −9 ≤ E ≤ −5, \
             so the window labels appear swapped relative to the printed ones.{computed}"
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so4_levels() {
        assert_eq!(algebraic_spectrum_so4(1).unwrap().etilde, 9);
        assert_eq!(algebraic_spectrum_so4(2).unwrap().etilde, 21);
        let l3 = algebraic_spectrum_so4(3).unwrap();
        assert_eq!(l3.etilde, 41);
        assert_eq!(l3.allowed_l, vec![0, 1, 2]);
        assert_eq!(l3.energy.to_string(), "mu*41 + nu");
        assert!(matches!(algebraic_spectrum_so4(0), Err(CasimirError::Domain(0))));
    }

    #[test]
    fn casimir_bridge() {
        // 4q(q+1) with half-integer q, in exact arithmetic
        for n in 1..=10i64 {
            let q = num_rational::Ratio::new(n - 1, 2);
            let c = q * (q + 1) * 4;
            assert_eq!(c, num_rational::Ratio::from_integer(n * n - 1));
            assert_eq!(algebraic_spectrum_so4(n).unwrap().casimir, n * n - 1);
        }
    }

    #[test]
    fn so13_windows() {
        let e = so13_energy_window(1.0);
        assert_eq!(e.etilde, -6.0);
        assert_eq!(e.windows, vec![Window::Principal]);
        let e = so13_energy_window(0.0);
        assert_eq!(e.etilde, -5.0);
        assert_eq!(e.windows, vec![Window::Principal, Window::Subsidiary]);
        let e = so13_energy_window(-4.0);
        assert_eq!(e.etilde, -1.0);
        assert_eq!(e.windows, vec![Window::Subsidiary]);
        assert_eq!(e.etilde_from_casimir, 11.0);
    }

    #[test]
    fn csv_rows() {
        let csv = spectrum_csv(2).unwrap();
        assert_eq!(csv, "n,Etilde,E_mu_coeff,E_const\n1,9,9,nu\n2,21,21,nu\n");
    }
}
