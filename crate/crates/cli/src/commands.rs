//! Command implementations.

use std::fmt::Write as _;

use pdmlab::casimir::{algebraic_spectrum_so4, verify_casimir_identity, AlgebraTag};
use pdmlab::catalog::{catalog, entry, verify_catalog, verify_entry, verify_worked_family, CatalogError, WorkedFamily};
use pdmlab::conformal::{
    apply_transform_with, inversion_search, table1_report, verify_all_subalgebras, verify_c3, verify_so13, verify_so14,
    verify_so4, TransformError, TransformSpec,
};
use pdmlab::report::{Annotation, CheckRecord, Status, Tier, VerificationReport};
use pdmlab::spectral::{
    closed_form_residual, eigen_csv, eigen_rows, eigenfunction_dump, fd_eigenvector, fd_refined, is_monotone_drift,
    scale_residual, so13_drift, Boundary, ClosedFormSolution, RadialProblem, ScaleEquation, SpectralError,
};
use pdmlab::symkernel::{Axis, Expr, Parser, ZeroTestPolicy};

use crate::{BoundaryArg, CliError, ExprAction, Outcome, SpectrumArgs, SpectrumSystem, TransformArgs, TransformKind};

/// Relative tolerance of FD eigenvalues against `4n²+1`.
const FD_TOL: f64 = 5e-3;
/// Relative tolerance after Richardson extrapolation.
const RICHARDSON_TOL: f64 = 1e-3;
/// Closed-form residual tolerance.
const RESIDUAL_TOL: f64 = 1e-8;
const RESIDUAL_POINTS: usize = 20;

fn catalog_err(e: CatalogError) -> CliError {
    match e {
        CatalogError::Range(_) => CliError::BadArgs(e.to_string()),
        _ => CliError::Runtime(e.to_string()),
    }
}

fn spectral_err(e: SpectralError) -> CliError {
    match e {
        SpectralError::InvalidProblem(_) | SpectralError::Unsupported(_) => CliError::BadArgs(e.to_string()),
        _ => CliError::Runtime(e.to_string()),
    }
}

fn only(sections: Vec<VerificationReport>) -> Outcome {
    Outcome {
        text: String::new(),
        sections,
    }
}

pub fn catalog_list() -> Result<Outcome, CliError> {
    let mut text = String::new();
    for e in catalog().map_err(catalog_err)? {
        let ints: Vec<&str> = e.integrals.iter().map(|q| q.label.as_str()).collect();
        let _ = writeln!(
            text,
            "{:>2}  f = {}  V = {}  integrals: {}",
            e.id,
            e.hamiltonian.f,
            e.hamiltonian.v,
            ints.join(", ")
        );
    }
    Ok(Outcome {
        text,
        sections: Vec::new(),
    })
}

pub fn catalog_verify(id: Option<u32>, all: bool, policy: &ZeroTestPolicy) -> Result<Outcome, CliError> {
    let sections = match (id, all) {
        (Some(n), false) => vec![verify_entry(n, policy).map_err(catalog_err)?],
        (None, true) => verify_catalog(policy).map_err(catalog_err)?,
        _ => return Err(CliError::BadArgs("give exactly one of --entry N and --all".into())),
    };
    Ok(only(sections))
}

pub fn catalog_families(policy: &ZeroTestPolicy) -> Result<Outcome, CliError> {
    Ok(only(WorkedFamily::ALL.iter().map(|f| verify_worked_family(*f, policy)).collect()))
}

pub fn algebra(check: Option<&str>, subalgebras: bool, table1: bool) -> Result<Outcome, CliError> {
    let section = match (check, subalgebras, table1) {
        (Some("c3"), ..) => verify_c3(),
        (Some("so14"), ..) => verify_so14(),
        (Some("so4"), ..) => verify_so4(),
        (Some("so13"), ..) => verify_so13(),
        (None, true, _) => verify_all_subalgebras().map_err(|e| CliError::Runtime(e.to_string()))?,
        (None, false, true) => table1_report(),
        _ => return Err(CliError::BadArgs("give one of --check, --subalgebras and --table1".into())),
    };
    Ok(only(vec![section]))
}

pub fn casimir(tag: AlgebraTag, policy: &ZeroTestPolicy) -> Result<Outcome, CliError> {
    Ok(only(vec![verify_casimir_identity(tag, policy)]))
}

fn radial_problem(a: &SpectrumArgs, mut p: RadialProblem) -> Result<RadialProblem, CliError> {
    if let Some(n) = a.grid {
        p.grid_points = n;
    }
    if let Some(r) = a.rmin {
        p.r_min = r;
    }
    if let Some(r) = a.rmax {
        p.r_max = r;
    }
    if let Some(b) = a.boundary {
        p.boundary = match b {
            BoundaryArg::Matched => Boundary::Matched,
            BoundaryArg::Dirichlet => Boundary::Dirichlet,
        };
    }
    p.validate().map_err(spectral_err)?;
    Ok(p)
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    match a.system {
        SpectrumSystem::So4 => spectrum_so4(a),
        SpectrumSystem::So13 => spectrum_so13(a),
        SpectrumSystem::Scale => spectrum_scale(a),
    }
}

fn spectrum_so4(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let p = radial_problem(a, RadialProblem::so4(a.l))?;
    let tag = format!("so4 l={}", a.l);
    let rows = eigen_rows(&p, a.count).map_err(spectral_err)?;
    let refined = fd_refined(&p, a.count, RICHARDSON_TOL).map_err(spectral_err)?;
    let mut text = eigen_csv(&rows);
    let mut r = VerificationReport::new(format!(
        "so4 radial spectrum, l={}, [{}, {}], {} points, {:?} ends",
        a.l, p.r_min, p.r_max, p.grid_points, p.boundary
    ));
    let _ = writeln!(text, "n,Lambda,Etilde,E");
    for (row, x) in rows.iter().zip(&refined.extrapolated) {
        let exact = row.lambda_exact.expect("so4 rows carry exact values");
        let n = a.l as i64 + 1 + row.index as i64;
        r.push(CheckRecord::numeric(
            &tag,
            format!("Lambda_{} = 4n^2+1 = {exact} (n={n}) within {FD_TOL:e}", row.index),
            row.rel_err.unwrap_or(f64::NAN).abs(),
            FD_TOL,
        ));
        r.push(CheckRecord::numeric(
            &tag,
            format!("Richardson Lambda_{} = {exact} within {RICHARDSON_TOL:e}", row.index),
            ((x - exact) / exact).abs(),
            RICHARDSON_TOL,
        ));
        let level = algebraic_spectrum_so4(n).map_err(|e| CliError::Runtime(e.to_string()))?;
        let _ = writeln!(text, "{n},{exact},{},{}", level.etilde, level.energy);
    }
    if let Some(w) = &refined.warning {
        r.annotate(Annotation::new(&tag, "grid refinement", w.clone()));
    }
    if let Some(path) = &a.dump {
        if a.count > 0 {
            let (_, v) = fd_eigenvector(&p, 0).map_err(spectral_err)?;
            std::fs::write(path, eigenfunction_dump(&v))
                .map_err(|e| CliError::BadArgs(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    Ok(Outcome { text, sections: vec![r] })
}

fn spectrum_so13(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let grid = a.grid.unwrap_or(2000);
    for &d in &a.deltas {
        RadialProblem::so13(a.l, d, grid).validate().map_err(spectral_err)?;
    }
    let drift = so13_drift(a.l, &a.deltas, grid).map_err(spectral_err)?;
    let mut text = String::from("delta,lambda_lowest\n");
    for (d, x) in &drift {
        let _ = writeln!(text, "{d},{x:.12}");
    }
    let tag = format!("so13 l={}", a.l);
    let mut r = VerificationReport::new(format!("so(1,3) radial problem on [1e-3, 1 - delta], {grid} points"));
    let monotone = is_monotone_drift(&drift);
    r.push(
        CheckRecord::new(
            &tag,
            "lowest Dirichlet eigenvalue drifts monotonically as delta -> 0",
            Tier::Numeric,
            if monotone { Status::Pass } else { Status::Fail },
        )
        .with_detail(format!("{} values", drift.len())),
    );
    r.annotate(Annotation::new(
        &tag,
        "continuous spectrum",
        "no eigenvalue settles as the cut approaches r = 1, consistent with the absence of bound states",
    ));
    Ok(Outcome { text, sections: vec![r] })
}

fn spectrum_scale(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let s = ClosedFormSolution::Soso {
        kappa: a.kappa,
        etilde: a.etilde,
        omega: a.omega,
        equation: ScaleEquation::Printed,
    };
    let beta = s.bessel_index().ok_or_else(|| {
        CliError::BadArgs(format!("kappa^2 + 1 - Etilde = {} is negative", s.printed_index().unwrap_or(f64::NAN)))
    })?;
    let pts = s.sample_points(RESIDUAL_POINTS);
    let printed = closed_form_residual(&s, &pts).map_err(spectral_err)?;
    let j_derived = scale_residual(&s, ScaleEquation::Derived, &pts).map_err(spectral_err)?;
    let modified = ClosedFormSolution::Soso {
        kappa: a.kappa,
        etilde: a.etilde,
        omega: a.omega,
        equation: ScaleEquation::Derived,
    };
    let i_derived = closed_form_residual(&modified, &pts).map_err(spectral_err)?;
    let tag = s.label();
    let text = format!(
        "kappa={} Etilde={} omega={} beta={beta} residual={printed:.3e}\n",
        a.kappa, a.etilde, a.omega
    );
    let mut r = VerificationReport::new("scale-invariant radial equation");
    r.push(
        CheckRecord::numeric(&tag, "J_beta(omega r)/r solves the printed radial equation", printed, RESIDUAL_TOL)
            .with_detail(format!("beta = sqrt(kappa^2 + 1 - Etilde) = {beta}, {RESIDUAL_POINTS} points")),
    );
    r.annotate(Annotation::new(
        &tag,
        "Bessel index",
        format!(
            "the index printed next to the solution is kappa^2 + 1 - Etilde = {}; the residual requires its square root {beta}",
            s.printed_index().unwrap_or(f64::NAN)
        ),
    ));
    r.annotate(Annotation::new(
        &tag,
        "derived radial equation",
        format!(
            "reducing -r^2 Laplacian - 2 x_a d_a gives -omega^2 in the bracket; there J leaves residual {j_derived:.3e} and I_beta(omega r)/r leaves {i_derived:.3e}"
        ),
    ));
    Ok(Outcome { text, sections: vec![r] })
}

fn parse(text: &str) -> Result<Expr, CliError> {
    let mut p = Parser::new();
    p.define("r2", Expr::r2());
    p.define("rt2", Expr::rt2());
    p.define("r", Expr::r());
    p.define("rt", Expr::rt());
    p.define("phi", Expr::phi());
    p.parse(text)
        .map_err(|e| CliError::BadArgs(format!("cannot parse `{text}`: {e}")))
}

pub fn transform(a: &TransformArgs, policy: &ZeroTestPolicy) -> Result<Outcome, CliError> {
    let e = entry(a.entry).map_err(catalog_err)?;
    let tag = format!("entry {}", a.entry);
    let mut r = VerificationReport::new(format!("{:?} of entry {}", a.kind, a.entry).to_lowercase());
    let spec = match a.kind {
        TransformKind::Shift => {
            let parts: Vec<&str> = a.nu.split(',').collect();
            let [x, y, z] = parts.as_slice() else {
                return Err(CliError::BadArgs(format!("--nu needs three components, got `{}`", a.nu)));
            };
            TransformSpec::shift([parse(x.trim())?, parse(y.trim())?, parse(z.trim())?])
        }
        TransformKind::Rotation => TransformSpec::rotation_about(Axis::from_index(a.axis as usize - 1), &parse(&a.angle)?),
        TransformKind::Dilatation => TransformSpec::dilatation(parse(&a.lambda)?),
        TransformKind::Inversion => {
            let out = inversion_search(&e.hamiltonian).map_err(|err| match err {
                TransformError::NotRational(_) => CliError::BadArgs(err.to_string()),
                _ => CliError::Runtime(err.to_string()),
            })?;
            for (w, why) in &out.rejected {
                r.annotate(Annotation::new(&tag, "rejected weight", format!("w = {w}: {why}")));
            }
            let (text, check) = match (out.weight_exponent, out.hamiltonian) {
                (Some(w), Some(h)) => (
                    format!("weight = r^{w}\nf' = {}\nV' = {}\n", h.f.normalize(), h.v.normalize()),
                    CheckRecord::new(&tag, "conjugated inversion has the form p f p - V", Tier::Symbolic, Status::Pass)
                        .with_detail(format!("W = r^{w}")),
                ),
                _ => (
                    String::new(),
                    CheckRecord::new(&tag, "conjugated inversion has the form p f p - V", Tier::Symbolic, Status::Fail)
                        .with_detail("no weight exponent in -3..=3 works"),
                ),
            };
            r.push(check);
            return Ok(Outcome { text, sections: vec![r] });
        }
    };
    let check = "transformed operator has the form p f p - V";
    match apply_transform_with(&spec, &e.hamiltonian, policy) {
        Ok(h) => {
            r.push(CheckRecord::new(&tag, check, Tier::Symbolic, Status::Pass));
            Ok(Outcome {
                text: format!("f' = {}\nV' = {}\n", h.f.normalize(), h.v.normalize()),
                sections: vec![r],
            })
        }
        Err(TransformError::Form { obstruction }) => {
            r.push(CheckRecord::new(&tag, check, Tier::Symbolic, Status::Fail).with_detail(obstruction));
            Ok(Outcome {
                text: String::new(),
                sections: vec![r],
            })
        }
        Err(err) => Err(CliError::Runtime(err.to_string())),
    }
}

pub fn expr(action: &ExprAction) -> Result<Outcome, CliError> {
    let out = match action {
        ExprAction::Parse { text } => parse(text)?,
        ExprAction::Normalize { text } => normal(&parse(text)?)?,
        ExprAction::Diff { var, text } => {
            let axis = Axis::from_index(var[1..].parse::<usize>().expect("validated by clap") - 1);
            normal(&parse(text)?.diff(axis))?
        }
    };
    let printed = out.to_string();
    let mut r = VerificationReport::new("expression");
    let reparsed = parse(&printed)?;
    r.push(CheckRecord::new(
        "expr",
        "parse(print(e)) reproduces e",
        Tier::Symbolic,
        if reparsed.to_string() == printed { Status::Pass } else { Status::Fail },
    ));
    Ok(Outcome {
        text: format!("{printed}\n"),
        sections: vec![r],
    })
}

fn normal(e: &Expr) -> Result<Expr, CliError> {
    e.normal()
        .map(|n| n.to_expr())
        .map_err(|err| CliError::Runtime(err.to_string()))
}
