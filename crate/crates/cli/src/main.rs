//! `pdmlab` command-line front end.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pdmlab::report::ReportDocument;
use pdmlab::symkernel::ZeroTestPolicy;

#[derive(Debug, Parser)]
#[command(name = "pdmlab", version)]
#[command(about = "Verify integrals of motion, Casimir identities and spectra of position-dependent-mass Hamiltonians")]
struct Cli {
    /// Write the JSON report to this path (`-` for standard output).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Seed of the numeric zero test.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Sample points of the numeric zero test.
    #[arg(long, global = true, value_name = "N")]
    points: Option<usize>,

    /// Tolerance of the numeric zero test.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,

    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List or verify the eighteen catalog rows.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Structure constants and subalgebra closure.
    Algebra(AlgebraArgs),
    /// Radial eigenvalues, closed-form residuals and Bessel solutions.
    Spectrum(SpectrumArgs),
    /// Casimir identities of the so(4) and so(1,3) realizations.
    Casimir {
        #[arg(long, value_enum)]
        system: AlgebraSystem,
    },
    /// Apply an equivalence transformation to a catalog row.
    Transform(TransformArgs),
    /// Parse and normalize expressions in the text grammar.
    Expr {
        #[command(subcommand)]
        action: ExprAction,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    /// One line per row with f, V and the integrals.
    List,
    /// Verify one row or all rows.
    Verify {
        #[arg(long, value_name = "N", conflicts_with = "all", required_unless_present = "all")]
        entry: Option<u32>,
        #[arg(long)]
        all: bool,
    },
    /// Verify the worked families of the M03 chain.
    Families,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct AlgebraArgs {
    #[arg(long, value_enum)]
    check: Option<AlgebraCheck>,
    /// Closure of every listed subalgebra.
    #[arg(long)]
    subalgebras: bool,
    /// Compare the generator table with the realization.
    #[arg(long)]
    table1: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgebraCheck {
    C3,
    So14,
    So4,
    So13,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgebraSystem {
    So4,
    So13,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpectrumSystem {
    So4,
    So13,
    Scale,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Matched,
    Dirichlet,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long, value_enum)]
    system: SpectrumSystem,
    /// Orbital number.
    #[arg(long, default_value_t = 0)]
    l: u32,
    /// Number of eigenvalues.
    #[arg(long, default_value_t = 3)]
    count: usize,
    /// Grid points.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,
    /// Write a two-column eigenfunction dump of the lowest state.
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
    /// Comma-separated distances of the so13 right end from r = 1.
    #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625])]
    deltas: Vec<f64>,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    kappa: i64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    etilde: f64,
    #[arg(long, default_value_t = 2.0)]
    omega: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformKind {
    Shift,
    Rotation,
    Dilatation,
    Inversion,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    kind: TransformKind,
    #[arg(long, value_name = "N")]
    entry: u32,
    /// Shift vector, three expressions separated by commas.
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    nu: String,
    /// Rotation axis.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
    axis: u8,
    /// Rotation angle expression.
    #[arg(long, default_value = "theta", allow_hyphen_values = true)]
    angle: String,
    /// Dilatation parameter expression.
    #[arg(long, default_value = "lambda", allow_hyphen_values = true)]
    lambda: String,
}

#[derive(Debug, Subcommand)]
enum ExprAction {
    /// Parse and print back.
    Parse { text: String },
    /// Print the canonical rational normal form.
    Normalize { text: String },
    /// Derivative with respect to x1, x2 or x3.
    Diff {
        #[arg(long, value_parser = ["x1", "x2", "x3"])]
        var: String,
        text: String,
    },
}

/// Failure modes of a command, mapped to exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    BadArgs(String),
    #[error("{0}")]
    Runtime(String),
}

/// Result of a command: human-readable text and the report model.
pub struct Outcome {
    pub text: String,
    pub sections: Vec<pdmlab::report::VerificationReport>,
}

fn policy(cli: &Cli) -> Result<ZeroTestPolicy, CliError> {
    let mut p = ZeroTestPolicy::default();
    if let Some(s) = cli.seed {
        p.seed = s;
    }
    if let Some(n) = cli.points {
        if n == 0 {
            return Err(CliError::BadArgs("--points must be positive".into()));
        }
        p.points = n;
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::BadArgs("--tol must be a positive number".into()));
        }
        p.tol = t;
    }
    Ok(p)
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::BadArgs("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let policy = policy(cli)?;
    match &cli.command {
        Command::Catalog { action } => match action {
            CatalogAction::List => commands::catalog_list(),
            CatalogAction::Verify { entry, all } => commands::catalog_verify(*entry, *all, &policy),
            CatalogAction::Families => commands::catalog_families(&policy),
        },
        Command::Algebra(a) => commands::algebra(a.check.map(|c| match c {
            AlgebraCheck::C3 => "c3",
            AlgebraCheck::So14 => "so14",
            AlgebraCheck::So4 => "so4",
            AlgebraCheck::So13 => "so13",
        }), a.subalgebras, a.table1),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Casimir { system } => commands::casimir(
            match system {
                AlgebraSystem::So4 => pdmlab::casimir::AlgebraTag::So4,
                AlgebraSystem::So13 => pdmlab::casimir::AlgebraTag::So13,
            },
            &policy,
        ),
        Command::Transform(a) => commands::transform(a, &policy),
        Command::Expr { action } => commands::expr(action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(CliError::BadArgs(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
    };
    let policy = policy(&cli).expect("validated in run");
    let doc = ReportDocument::new(&policy, outcome.sections);
    print!("{}", render::header(&doc));
    print!("{}", outcome.text);
    print!("{}", render::document(&doc));
    if let Some(path) = &cli.json {
        let json = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
        if path.as_os_str() == "-" {
            print!("{json}");
        } else if let Err(e) = std::fs::write(path, json) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if doc.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
