use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use qdetect::io::{
    self, CertFile, CertificateReport, ConditionReport, LsmReport, OptimalReport, PovmFile,
    Problem, ValidateReport, VerificationJson,
};
use qdetect::lsm::COND_TOL_DEFAULT;
use qdetect::sdp::SolverOptions;
use qdetect::{Certificate, Error, Solution};

#[derive(Parser)]
#[command(name = "qdetect", version, about = "Quantum detection: LSM and optimal measurements")]
struct Cli {
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Reduced {
    Auto,
    Full,
    Gu,
    Cgu,
}

#[derive(Subcommand)]
enum Command {
    /// Build the least-squares measurement and check its optimality condition.
    Lsm {
        file: PathBuf,
        /// Tolerance for the square-root optimality condition.
        #[arg(long, default_value_t = COND_TOL_DEFAULT)]
        cond_tol: f64,
        /// Write the measurement to a POVM file.
        #[arg(long)]
        povm_out: Option<PathBuf>,
        /// Write the optimality certificate (when the condition holds).
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Solve for the minimum-error measurement by semidefinite programming.
    Optimal {
        file: PathBuf,
        /// Problem form: auto picks the reduced form when group data exists.
        #[arg(long, value_enum, default_value_t = Reduced::Auto)]
        reduced: Reduced,
        #[arg(long)]
        gap_tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        povm_out: Option<PathBuf>,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Check a POVM/certificate pair against the optimality conditions.
    Verify {
        file: PathBuf,
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Parse and validate a problem file, reporting its structure.
    Validate { file: PathBuf },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::MaxIterations { .. }
        | Error::NumericalBreakdown(_)
        | Error::EighNoConvergence { .. }
        | Error::Singular { .. }
        | Error::RecoveryInfeasible { .. }
        | Error::ConditionNotMet { .. } => 3,
        _ => 2,
    }
}

fn emit<T: Serialize>(report: &T, pretty: bool) -> qdetect::Result<()> {
    let text = if pretty {
        serde_json::to_string_pretty(report)?
    } else {
        serde_json::to_string(report)?
    };
    println!("{text}");
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> qdetect::Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn certificate_report(
    e: &qdetect::Ensemble,
    povm: &qdetect::Povm,
    cert: &Certificate,
    tol: f64,
) -> qdetect::Result<CertificateReport> {
    let verification = qdetect::verify_optimality(e, povm, cert, tol)?;
    Ok(CertificateReport {
        trace: cert.trace,
        x: io::matrix_to_json(cert.x.as_matrix()),
        verification: VerificationJson::from(&verification),
    })
}

fn cmd_lsm(
    file: &Path,
    cond_tol: f64,
    povm_out: Option<&Path>,
    cert_out: Option<&Path>,
    pretty: bool,
) -> qdetect::Result<ExitCode> {
    let problem = io::load_problem(file)?;
    let e = problem.ensemble();
    let lsm = qdetect::least_squares_measurement(e)?;
    let condition = qdetect::check_square_root_condition(e, &lsm, cond_tol)?;
    let per_state = qdetect::per_state_detection(e, &lsm.povm)?;
    let p_correct = qdetect::correct_detection_probability(e, &lsm.povm)?;
    info!("LSM built: P_d = {p_correct:.12}, condition_holds = {}", condition.condition_holds);
    let certificate = if condition.condition_holds {
        let x = qdetect::certificate_from_condition(e, &lsm, &condition)?;
        let cert = Certificate::from_dual(x, e);
        if let Some(path) = cert_out {
            write_json(path, &CertFile::from_certificate(&cert))?;
        }
        Some(certificate_report(e, &lsm.povm, &cert, 1e-8)?)
    } else {
        None
    };
    if let Some(path) = povm_out {
        write_json(path, &PovmFile::from_povm(&lsm.povm))?;
    }
    let report = LsmReport {
        dim: e.dim(),
        state_count: e.len(),
        p_correct,
        per_state_detection: per_state,
        condition: ConditionReport {
            condition_holds: condition.condition_holds,
            alpha: condition.alpha,
            max_deviation: condition.max_deviation,
        },
        factors: lsm.factors.iter().map(io::matrix_to_json).collect(),
        operators: lsm.povm.operators().iter().map(|op| io::matrix_to_json(op.as_matrix())).collect(),
        certificate,
    };
    emit(&report, pretty)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_optimal(
    file: &Path,
    reduced: Reduced,
    gap_tol: Option<f64>,
    max_iters: Option<usize>,
    povm_out: Option<&Path>,
    cert_out: Option<&Path>,
    pretty: bool,
) -> qdetect::Result<ExitCode> {
    let problem = io::load_problem(file)?;
    let mut opts = SolverOptions::default();
    if let Some(g) = gap_tol {
        opts.gap_tol = g;
    }
    if let Some(m) = max_iters {
        opts.max_iters = m;
    }
    let (solution, label): (Solution, &str) = match (&problem, reduced) {
        (_, Reduced::Full) => (qdetect::solve_optimal(problem.ensemble(), &opts)?, "full"),
        (Problem::Explicit(e), Reduced::Auto) => (qdetect::solve_optimal(e, &opts)?, "full"),
        (Problem::Explicit(_), _) => {
            return Err(Error::InvalidOptions(
                "--reduced gu/cgu requires group data in the problem file".into(),
            ))
        }
        (Problem::Symmetric { spec, .. }, Reduced::Gu) => {
            let gu = problem.gu_spec().ok_or_else(|| {
                Error::InvalidOptions(format!(
                    "--reduced gu needs exactly one generator, file has {}",
                    spec.generator_factors.len()
                ))
            })?;
            (qdetect::solve_gu(&gu, &opts)?, "gu")
        }
        (Problem::Symmetric { spec, .. }, Reduced::Cgu) => (qdetect::solve_cgu(spec, &opts)?, "cgu"),
        (Problem::Symmetric { spec, .. }, Reduced::Auto) => {
            if let Some(gu) = problem.gu_spec() {
                (qdetect::solve_gu(&gu, &opts)?, "gu")
            } else {
                (qdetect::solve_cgu(spec, &opts)?, "cgu")
            }
        }
    };
    let e = problem.ensemble();
    info!(
        "solved ({label}): P_d = {:.12}, gap = {:.3e}, {} iterations",
        solution.p_correct, solution.duality_gap, solution.iterations
    );
    if let Some(path) = povm_out {
        write_json(path, &PovmFile::from_povm(&solution.povm))?;
    }
    if let Some(path) = cert_out {
        write_json(path, &CertFile::from_certificate(&solution.certificate))?;
    }
    let certificate = certificate_report(e, &solution.povm, &solution.certificate, 1e-6)?;
    let report = OptimalReport {
        dim: e.dim(),
        state_count: e.len(),
        reduction: label.to_string(),
        p_correct: solution.p_correct,
        certificate_trace: solution.certificate.trace,
        duality_gap: solution.duality_gap,
        iterations: solution.iterations,
        unknowns: solution.diagnostics.unknowns,
        constraints: solution.diagnostics.constraints,
        full_unknowns: solution.diagnostics.full_unknowns,
        full_constraints: solution.diagnostics.full_constraints,
        operators: solution
            .povm
            .operators()
            .iter()
            .map(|op| io::matrix_to_json(op.as_matrix()))
            .collect(),
        certificate,
    };
    emit(&report, pretty)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    file: &Path,
    povm_path: &Path,
    cert_path: &Path,
    tol: f64,
    pretty: bool,
) -> qdetect::Result<ExitCode> {
    let problem = io::load_problem(file)?;
    let e = problem.ensemble();
    let povm = io::load_povm(povm_path)?;
    let cert = io::load_certificate(cert_path, e)?;
    let report = qdetect::verify_optimality(e, &povm, &cert, tol)?;
    let optimal = report.optimal;
    emit(&VerificationJson::from(&report), pretty)?;
    Ok(if optimal { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_validate(file: &Path, pretty: bool) -> qdetect::Result<ExitCode> {
    let problem = io::load_problem(file)?;
    let e = problem.ensemble();
    let report = match &problem {
        Problem::Explicit(_) => ValidateReport {
            dim: e.dim(),
            kind: "explicit".into(),
            state_count: e.len(),
            group_order: None,
            generator_count: None,
            second_group_phase_commutes: None,
        },
        Problem::Symmetric { spec, second_group, .. } => {
            let phase = match second_group {
                Some(q) => {
                    Some(qdetect::check_phase_commutation(&spec.group, q)?.commutes)
                }
                None => None,
            };
            ValidateReport {
                dim: e.dim(),
                kind: if spec.generator_factors.len() == 1 { "gu".into() } else { "cgu".into() },
                state_count: e.len(),
                group_order: Some(spec.group.order()),
                generator_count: Some(spec.generator_factors.len()),
                second_group_phase_commutes: phase,
            }
        }
    };
    emit(&report, pretty)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> qdetect::Result<ExitCode> {
    match &cli.command {
        Command::Lsm { file, cond_tol, povm_out, cert_out } => {
            cmd_lsm(file, *cond_tol, povm_out.as_deref(), cert_out.as_deref(), cli.pretty)
        }
        Command::Optimal { file, reduced, gap_tol, max_iters, povm_out, cert_out } => cmd_optimal(
            file,
            *reduced,
            *gap_tol,
            *max_iters,
            povm_out.as_deref(),
            cert_out.as_deref(),
            cli.pretty,
        ),
        Command::Verify { file, povm, cert, tol } => {
            cmd_verify(file, povm, cert, *tol, cli.pretty)
        }
        Command::Validate { file } => cmd_validate(file, cli.pretty),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("QDETECT_LOG", "warn"),
    )
    .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
