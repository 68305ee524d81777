//! Radial eigenvalue problems of the so(4) and so(1,3) systems, their exact
//! solutions, and the Bessel solutions of the scale-invariant system.
//!
//! The radial coordinate is written `x1` in symbolic output.

mod closed_form;
mod fd;
mod quad;
mod special;

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::symkernel::Expr;

pub use closed_form::{
    closed_form_residual, normalization_integral, scale_residual, ClosedFormSolution, NormalizationReport,
    ScaleEquation,
};
pub use quad::adaptive_simpson;
pub use special::{bessel_jet, hyp2f1, hyp2f1_jet, terminating_2f1, Jet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid radial problem: {0}")]
    InvalidProblem(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    Convergence(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    So4,
    So13,
    Scale,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::So4 => "so4",
            System::So13 => "so13",
            System::Scale => "scale",
        }
    }

    fn sign(self) -> f64 {
        if self == System::So13 {
            -1.0
        } else {
            1.0
        }
    }

    /// `p(r) = (r² ± 1)²`.
    pub fn p(self, r: f64) -> f64 {
        (r * r + self.sign()).powi(2)
    }

    pub fn dp(self, r: f64) -> f64 {
        4.0 * r * (r * r + self.sign())
    }

    /// `q(r) = (r² ± 1)² l(l+1)/r² − 2r²`.
    pub fn q(self, l: u32, r: f64) -> f64 {
        let ll = (l * (l + 1)) as f64;
        self.p(r) * ll / (r * r) - 2.0 * r * r
    }
}

impl std::fmt::Display for System {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = SpectralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "so4" => Ok(System::So4),
            "so13" => Ok(System::So13),
            "scale" => Ok(System::Scale),
            _ => Err(SpectralError::InvalidProblem(format!("unknown system `{s}`"))),
        }
    }
}

/// End conditions of the truncated interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `φ = 0` at both ends.
    Dirichlet,
    /// The log-derivative of the solution regular at `r = 0` on the left and
    /// of the solution decaying like `r^{−l−2}` on the right, fixed
    /// self-consistently with the eigenvalue. so4 only.
    Matched,
}

impl FromStr for Boundary {
    type Err = SpectralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dirichlet" => Ok(Boundary::Dirichlet),
            "matched" => Ok(Boundary::Matched),
            _ => Err(SpectralError::InvalidProblem(format!("unknown boundary `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProblem {
    pub system: System,
    /// Orbital number `l`, or `κ` for the scale system.
    pub l: u32,
    /// Only used by the scale system.
    pub omega: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub grid_points: usize,
    pub boundary: Boundary,
}

impl RadialProblem {
    /// so4 on `[1e−3, 30]` with 4000 points and matched ends.
    pub fn so4(l: u32) -> Self {
        RadialProblem {
            system: System::So4,
            l,
            omega: 0.0,
            r_min: 1e-3,
            r_max: 30.0,
            grid_points: 4000,
            boundary: Boundary::Matched,
        }
    }

    /// so(1,3) on `[1e−3, 1 − δ]` with Dirichlet ends.
    pub fn so13(l: u32, delta: f64, grid_points: usize) -> Self {
        RadialProblem {
            system: System::So13,
            l,
            omega: 0.0,
            r_min: 1e-3,
            r_max: 1.0 - delta,
            grid_points,
            boundary: Boundary::Dirichlet,
        }
    }

    pub fn with_boundary(mut self, b: Boundary) -> Self {
        self.boundary = b;
        self
    }

    pub fn with_grid(mut self, points: usize) -> Self {
        self.grid_points = points;
        self
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        let bad = |m: String| Err(SpectralError::InvalidProblem(m));
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return bad(format!("need 0 < r_min < r_max, got [{}, {}]", self.r_min, self.r_max));
        }
        if self.grid_points < 16 {
            return bad(format!("need at least 16 grid points, got {}", self.grid_points));
        }
        if self.system == System::So13 && self.r_max >= 1.0 {
            return bad(format!("so13 needs r_max < 1, got {}", self.r_max));
        }
        if self.boundary == Boundary::Matched {
            if self.system != System::So4 {
                return bad("matched ends are available for so4 only".into());
            }
            if self.r_min >= 1.0 || self.r_max <= 1.0 {
                return bad("matched ends need r_min < 1 < r_max".into());
            }
        }
        Ok(())
    }

    fn require_sturm_liouville(&self) -> Result<(), SpectralError> {
        self.validate()?;
        if self.system == System::Scale {
            return Err(SpectralError::Unsupported(
                "the scale system is handled by its Bessel solutions".into(),
            ));
        }
        Ok(())
    }
}

/// Coefficients of `−(pφ′)′ + qφ = Λwφ` in the variable `x1 = r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmLiouville {
    pub p: Expr,
    pub q: Expr,
    pub w: Expr,
}

pub fn sturm_liouville_form(problem: &RadialProblem) -> Result<SturmLiouville, SpectralError> {
    problem.require_sturm_liouville()?;
    let r = Expr::x(1);
    let p = (r.powi(2) + Expr::int(problem.system.sign() as i64)).powi(2);
    let ll = Expr::int((problem.l * (problem.l + 1)) as i64);
    let q = &p * ll / r.powi(2) - Expr::int(2) * r.powi(2);
    Ok(SturmLiouville {
        p: p.normalize(),
        q: q.normalize(),
        w: Expr::one(),
    })
}

/// The radial operator in its expanded form
/// `−(r²±1)²(∂² − l(l+1)/r²) − 4r(r²±1)∂ − 2r²`, as coefficients of
/// `(φ″, φ′, φ)`.
pub fn radial_operator(system: System, l: u32) -> Result<[Expr; 3], SpectralError> {
    if system == System::Scale {
        return Err(SpectralError::Unsupported("the scale system has no (r^2 ± 1) form".into()));
    }
    let r = Expr::x(1);
    let s = Expr::int(system.sign() as i64);
    let u = r.powi(2) + s;
    let ll = Expr::int((l * (l + 1)) as i64);
    Ok([
        -u.powi(2),
        Expr::int(-4) * &r * &u,
        u.powi(2) * ll / r.powi(2) - Expr::int(2) * r.powi(2),
    ])
}

/// The lowest `count` eigenvalues, ascending.
pub fn fd_eigenvalues(problem: &RadialProblem, count: usize) -> Result<Vec<f64>, SpectralError> {
    problem.require_sturm_liouville()?;
    let available = match problem.boundary {
        Boundary::Dirichlet => problem.grid_points - 2,
        Boundary::Matched => problem.grid_points,
    };
    if count > available {
        return Err(SpectralError::InvalidProblem(format!(
            "{count} eigenvalues requested from {available} unknowns"
        )));
    }
    (0..count).map(|k| fd::eigenvalue(problem, k)).collect()
}

/// Eigenvalues on a grid and on the grid with halved spacing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refinement {
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    /// `(4·fine − coarse)/3`.
    pub extrapolated: Vec<f64>,
    /// Largest relative change between the two grids.
    pub max_change: f64,
    pub warning: Option<String>,
}

pub fn fd_refined(problem: &RadialProblem, count: usize, tol: f64) -> Result<Refinement, SpectralError> {
    let coarse = fd_eigenvalues(problem, count)?;
    let fine_problem = problem.clone().with_grid(2 * problem.grid_points - 1);
    let fine = fd_eigenvalues(&fine_problem, count)?;
    let extrapolated: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    let max_change = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| ((f - c) / f).abs())
        .fold(0.0, f64::max);
    let warning = (max_change > tol).then(|| {
        format!("grid too coarse: eigenvalues change by {max_change:.3e} under refinement (tolerance {tol:.1e})")
    });
    Ok(Refinement {
        coarse,
        fine,
        extrapolated,
        max_change,
        warning,
    })
}

/// Number of eigenvalues below `lambda`.
pub fn sturm_count(problem: &RadialProblem, lambda: f64) -> Result<usize, SpectralError> {
    problem.require_sturm_liouville()?;
    Ok(fd::assemble(problem, lambda).count_below(lambda))
}

/// Exact so4 eigenvalue `4n²+1` of the `index`-th state at orbital number `l`.
pub fn so4_exact(l: u32, index: usize) -> f64 {
    let n = (l as usize + 1 + index) as f64;
    4.0 * n * n + 1.0
}

/// Grid nodes and the unit-norm eigenvector of the `index`-th eigenvalue.
pub fn fd_eigenvector(problem: &RadialProblem, index: usize) -> Result<(f64, Vec<(f64, f64)>), SpectralError> {
    problem.require_sturm_liouville()?;
    let (lambda, v) = fd::eigenvector(problem, index)?;
    Ok((lambda, fd::grid(problem).into_iter().zip(v).collect()))
}

/// Relative L² distance on the grid between the FD eigenvector and the
/// closed-form so4 solution, after fitting sign and scale.
pub fn eigenvector_agreement(problem: &RadialProblem, index: usize) -> Result<f64, SpectralError> {
    if problem.system != System::So4 {
        return Err(SpectralError::Unsupported("closed forms are compared for so4".into()));
    }
    let (_, v) = fd_eigenvector(problem, index)?;
    let exact = ClosedFormSolution::Soll {
        n: problem.l + 1 + index as u32,
        l: problem.l,
    };
    let phi: Vec<f64> = v.iter().map(|(r, _)| exact.jet(*r).map(|j| j.v)).collect::<Result<_, _>>()?;
    let dot: f64 = v.iter().zip(&phi).map(|((_, a), b)| a * b).sum();
    let pp: f64 = phi.iter().map(|b| b * b).sum();
    let c = dot / pp;
    let err: f64 = v.iter().zip(&phi).map(|((_, a), b)| (a - c * b).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = v.iter().map(|(_, a)| a * a).sum::<f64>().sqrt();
    Ok(err / norm)
}

/// Lowest Dirichlet eigenvalue of the so(1,3) problem on `[1e−3, 1 − δ]`
/// for each `δ`, at fixed grid spacing ratio.
pub fn so13_drift(l: u32, deltas: &[f64], grid_points: usize) -> Result<Vec<(f64, f64)>, SpectralError> {
    deltas
        .iter()
        .map(|&d| {
            let p = RadialProblem::so13(l, d, grid_points);
            Ok((d, fd_eigenvalues(&p, 1)?[0]))
        })
        .collect()
}

/// The sequence decreases strictly, so no eigenvalue settles as `δ → 0`.
pub fn is_monotone_drift(drift: &[(f64, f64)]) -> bool {
    drift.windows(2).all(|w| w[1].1 < w[0].1)
}

/// One row of an eigenvalue table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRow {
    pub system: System,
    pub l_or_kappa: u32,
    pub index: usize,
    pub lambda_fd: f64,
    pub lambda_exact: Option<f64>,
    pub rel_err: Option<f64>,
}

pub fn eigen_rows(problem: &RadialProblem, count: usize) -> Result<Vec<EigenRow>, SpectralError> {
    let values = fd_eigenvalues(problem, count)?;
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(index, lambda_fd)| {
            let lambda_exact = (problem.system == System::So4).then(|| so4_exact(problem.l, index));
            EigenRow {
                system: problem.system,
                l_or_kappa: problem.l,
                index,
                lambda_fd,
                lambda_exact,
                rel_err: lambda_exact.map(|e| (lambda_fd - e) / e),
            }
        })
        .collect())
}

pub fn eigen_csv(rows: &[EigenRow]) -> String {
    let mut out = String::from("system,l_or_kappa,index,lambda_fd,lambda_exact,rel_err\n");
    let opt = |v: Option<f64>, prec: usize| v.map_or(String::new(), |x| format!("{x:.prec$e}"));
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.12},{},{}",
            r.system,
            r.l_or_kappa,
            r.index,
            r.lambda_fd,
            r.lambda_exact.map_or(String::new(), |x| format!("{x}")),
            opt(r.rel_err, 6)
        );
    }
    out
}

/// Two-column `r phi` dump of an eigenvector.
pub fn eigenfunction_dump(points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    for (r, v) in points {
        let _ = writeln!(out, "{r:.10e} {v:.10e}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::Axis;

    fn zero(e: &Expr) -> bool {
        e.normal().map(|n| n.is_zero()).unwrap_or(false)
    }

    #[test]
    fn sturm_liouville_expands_to_radial_operator() {
        for system in [System::So4, System::So13] {
            for l in 0..3 {
                let p = match system {
                    System::So4 => RadialProblem::so4(l),
                    _ => RadialProblem::so13(l, 0.1, 100),
                };
                let sl = sturm_liouville_form(&p).unwrap();
                let [a2, a1, a0] = radial_operator(system, l).unwrap();
                // −(pφ′)′ + qφ = −pφ″ − p′φ′ + qφ
                assert!(zero(&(&sl.p + &a2)));
                assert!(zero(&(sl.p.diff(Axis::X1) + &a1)));
                assert!(zero(&(&sl.q - &a0)));
            }
        }
        let so13 = RadialProblem::so13(1, 0.1, 100);
        let sl = sturm_liouville_form(&so13).unwrap();
        let r = Expr::x(1);
        let expect = (r.powi(2) - Expr::one()).powi(2) * Expr::int(2) / r.powi(2) - Expr::int(2) * r.powi(2);
        assert!(zero(&(&sl.q - &expect)));
    }

    #[test]
    fn three_dimensional_operator_separates() {
        use crate::casimir::{scaled_hamiltonian, AlgebraTag};
        use crate::diffop::hamiltonian_to_op;
        use crate::symkernel::{ZeroStatus, ZeroTestPolicy};

        // Ĥ(φ(r)Y/r) = (r^{-1}Y)(L ± 4)φ with Y = 1 and Y = x3/r
        for (tag, system) in [(AlgebraTag::So4, System::So4), (AlgebraTag::So13, System::So13)] {
            let h = hamiltonian_to_op(&scaled_hamiltonian(tag, 6));
            let r = Expr::r();
            for (l, y) in [(0u32, Expr::one()), (1, Expr::x(3) / &r)] {
                let phi = |d: u8| Expr::call_deriv("phi", vec![d], vec![r.clone()]);
                let psi = phi(0) * &y / &r;
                let [a2, a1, a0] = radial_operator(system, l).unwrap();
                let at_r = |e: &Expr| e.subst_vars(&[r.clone(), Expr::x(2), Expr::x(3)]);
                let radial = at_r(&a2) * phi(2) + at_r(&a1) * phi(1) + (at_r(&a0) + Expr::int(4 * system.sign() as i64)) * phi(0);
                let residual = h.apply(&psi) - radial * &y / &r;
                let status = crate::symkernel::is_zero(&residual, &ZeroTestPolicy::default());
                assert!(status.is_zero(), "{tag:?} l={l}: {status:?}");
                assert!(!matches!(status, ZeroStatus::NonZero { .. }));
            }
        }
    }

    #[test]
    fn scale_system_is_rejected() {
        let mut p = RadialProblem::so4(0);
        p.system = System::Scale;
        p.boundary = Boundary::Dirichlet;
        assert!(matches!(sturm_liouville_form(&p), Err(SpectralError::Unsupported(_))));
        assert!(radial_operator(System::Scale, 0).is_err());
    }

    #[test]
    fn validation() {
        assert!(RadialProblem::so4(0).validate().is_ok());
        assert!(RadialProblem::so4(0).with_grid(10).validate().is_err());
        let mut p = RadialProblem::so4(0);
        p.r_min = 0.0;
        assert!(p.validate().is_err());
        assert!(RadialProblem::so13(0, 0.0, 100).validate().is_err());
        assert!(RadialProblem::so13(0, 0.1, 100).with_boundary(Boundary::Matched).validate().is_err());
    }

    #[test]
    fn count_zero_is_empty() {
        assert!(fd_eigenvalues(&RadialProblem::so4(0), 0).unwrap().is_empty());
    }

    #[test]
    fn so4_low_levels() {
        let p = RadialProblem::so4(0).with_grid(1000);
        let v = fd_eigenvalues(&p, 3).unwrap();
        for (k, x) in v.iter().enumerate() {
            let e = so4_exact(0, k);
            assert!(((x - e) / e).abs() < 5e-3, "{x} vs {e}");
        }
    }

    #[test]
    fn sturm_count_matches_admissible_levels() {
        for l in 0..3 {
            let p = RadialProblem::so4(l).with_grid(800);
            for n in 1..5u32 {
                let lambda = 4.0 * (n * n) as f64 + 1.0 + 0.5;
                let admissible = (n as usize).saturating_sub(l as usize);
                assert_eq!(sturm_count(&p, lambda).unwrap(), admissible, "l={l} n={n}");
            }
        }
    }

    #[test]
    fn eigenvector_matches_closed_form() {
        let p = RadialProblem::so4(0).with_grid(1000);
        for k in 0..2 {
            assert!(eigenvector_agreement(&p, k).unwrap() < 1e-2);
        }
    }

    #[test]
    fn csv_layout() {
        let rows = eigen_rows(&RadialProblem::so4(1).with_grid(400), 1).unwrap();
        let csv = eigen_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("system,l_or_kappa,index,lambda_fd,lambda_exact,rel_err"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..3], &["so4", "1", "0"]);
        assert_eq!(row[4], "17");
    }
}
