//! Command dispatch and the exit-status contract.
//!
//! Exit 0 means the report passed, 1 means it ran but failed its
//! tolerance, 2 means the request was bad (flags, files, symbols that
//! violate a theorem's standing hypotheses), 3 means a numerical stage
//! gave up (non-convergence, runaway residual). Numerical failures also
//! leave a small failure report naming the stage, so a scripted sweep can
//! tell what died without scraping stderr.

use szegolab_core::lab::{
    banded_e_check, bef_even_check, bocg_check, f_toeplitz_check, szego_widom_fit,
    th_noneven_check,
};
use szegolab_core::operators::toeplitz_finite;
use szegolab_core::symbol::DoublingPolicy;
use szegolab_core::{BlockSymbol, Error, MVariant, C64};

use crate::config::{CommandKind, RunConfig};
use crate::report::{
    symbol_hash, write_failure, write_report, FailurePayload, ReportPayload, RowPayload,
};
use crate::symbol_file::read_spec;

/// Errors surfaced to the user, already classified by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad request: exit status 2.
    Usage(String),
    /// A numerical stage failed on legitimate input: exit status 3.
    Numeric { stage: String, error: Error },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// Sort a library error into the exit-status contract. Violated
    /// standing hypotheses (winding, singular symbol values, analyticity)
    /// are properties of the input, not of the numerics, so they count as
    /// usage errors.
    pub fn classify(stage: &str, error: Error) -> Self {
        let input_shaped = error.is_usage()
            || matches!(
                error,
                Error::NonzeroWinding { .. }
                    | Error::SingularSymbol { .. }
                    | Error::RegionViolation { .. }
            );
        if input_shaped {
            CliError::Usage(format!("{stage}: {error}"))
        } else {
            CliError::Numeric { stage: stage.to_string(), error }
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric { .. } => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(msg) => msg.clone(),
            CliError::Numeric { stage, error } => format!("{stage}: {error}"),
        }
    }
}

pub struct RunOutcome {
    pub pass: bool,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let policy = DoublingPolicy { max_doublings: cfg.max_doublings };
    let file = read_spec(&cfg.symbol_path)?;
    let hash = symbol_hash(&file.file_bytes);
    let outcome = file
        .build(policy)
        .and_then(|sym| dispatch(cfg, &sym, hash.clone(), policy))
        .and_then(|payload| {
            let path = write_report(&payload, &cfg.output_dir, cfg.format)?;
            println!(
                "{} pass={} rows={} -> {}",
                payload.check,
                payload.pass,
                payload.rows.len(),
                path.display()
            );
            Ok(RunOutcome { pass: payload.pass })
        });
    if let Err(CliError::Numeric { stage, error }) = &outcome {
        let failure = FailurePayload {
            command: cfg.command.as_str().to_string(),
            stage: stage.clone(),
            error: error.to_string(),
            pass: false,
        };
        if let Ok(path) = write_failure(&failure, &cfg.output_dir, &hash) {
            eprintln!("failure report -> {}", path.display());
        }
    }
    outcome
}

fn dispatch(
    cfg: &RunConfig,
    sym: &BlockSymbol,
    hash: String,
    policy: DoublingPolicy,
) -> Result<ReportPayload, CliError> {
    let bs = sym.block_size();
    match cfg.command {
        CommandKind::DetSeq => det_seq(cfg, sym, hash),
        CommandKind::SzegoFit => {
            let fit = szego_widom_fit(sym, cfg.n_min, cfg.n_max, cfg.tol, policy)
                .map_err(|e| CliError::classify("szego-fit", e))?;
            let mut payload = ReportPayload::from_identity(
                cfg.command.as_str(),
                &fit.report,
                hash,
                bs,
                cfg.n_min,
                cfg.n_max,
                cfg.tol,
            );
            payload.insert_constant("e_computed", fit.e_computed);
            payload.insert_constant("e_fit", fit.e_fit);
            payload.insert_constant("g_computed", fit.g_computed);
            payload.insert_constant("g_fit", fit.g_fit);
            Ok(payload)
        }
        CommandKind::Bocg => {
            let bocg = bocg_check(sym, cfg.n_min, cfg.n_max, cfg.tol, policy)
                .map_err(|e| CliError::classify("bocg", e))?;
            let mut payload = ReportPayload::from_identity(
                cfg.command.as_str(),
                &bocg.report,
                hash,
                bs,
                cfg.n_min,
                cfg.n_max,
                cfg.tol,
            );
            payload.insert_constant("log_e", bocg.log_e);
            payload.insert_constant("log_g", bocg.log_g);
            Ok(payload)
        }
        CommandKind::BandedE => {
            let report = match banded_e_check(sym, cfg.n_min, cfg.n_max, cfg.tol, policy) {
                Err(Error::InvalidInput(msg)) if msg.contains("bandwidth") => {
                    return Err(CliError::usage(format!("symbol not banded: {msg}")))
                }
                other => other.map_err(|e| CliError::classify("banded-e", e))?,
            };
            Ok(ReportPayload::from_identity(
                cfg.command.as_str(),
                &report,
                hash,
                bs,
                cfg.n_min,
                cfg.n_max,
                cfg.tol,
            ))
        }
        CommandKind::Th => {
            let variant = cfg.variant.expect("clap requires --variant for th");
            let (stage, result) = if sym.is_even() {
                ("th-even", bef_even_check(sym, variant, cfg.n_min, cfg.n_max, cfg.tol, policy))
            } else {
                (
                    "th-noneven",
                    th_noneven_check(sym, variant, cfg.n_min, cfg.n_max, cfg.tol, policy),
                )
            };
            let report = result.map_err(|e| CliError::classify(stage, e))?;
            let mut payload = ReportPayload::from_identity(
                cfg.command.as_str(),
                &report,
                hash,
                bs,
                cfg.n_min,
                cfg.n_max,
                cfg.tol,
            );
            payload.variant = Some(variant_name(variant).to_string());
            Ok(payload)
        }
        CommandKind::Ftoeplitz => {
            let function = cfg.function.as_ref().expect("clap requires --function for ftoeplitz");
            let spec = function.to_spec();
            let report = f_toeplitz_check(sym, &spec, cfg.n_min, cfg.n_max, cfg.tol, policy)
                .map_err(|e| CliError::classify("ftoeplitz", e))?;
            let mut payload = ReportPayload::from_identity(
                cfg.command.as_str(),
                &report,
                hash,
                bs,
                cfg.n_min,
                cfg.n_max,
                cfg.tol,
            );
            payload.function = Some(function.text.clone());
            Ok(payload)
        }
    }
}

/// Plain determinant table: only the left-hand column is populated, the
/// comparison columns are zero. A singular section cannot contribute a log
/// determinant, so it is skipped and fails the run.
fn det_seq(cfg: &RunConfig, sym: &BlockSymbol, hash: String) -> Result<ReportPayload, CliError> {
    let zero = C64::new(0.0, 0.0);
    let mut rows = Vec::with_capacity(cfg.n_max - cfg.n_min + 1);
    let mut pass = true;
    for n in cfg.n_min..=cfg.n_max {
        match toeplitz_finite(sym, n).log_det() {
            Ok(log_det) => rows.push(RowPayload::new(n, log_det, zero, 0.0)),
            Err(_) => {
                eprintln!("note: section n={n} is singular, no determinant recorded");
                pass = false;
            }
        }
    }
    Ok(ReportPayload {
        command: cfg.command.as_str().to_string(),
        check: "DET_SEQ".to_string(),
        symbol_hash: hash,
        block_size: sym.block_size(),
        n_min: cfg.n_min,
        n_max: cfg.n_max,
        tol: cfg.tol,
        variant: None,
        function: None,
        pass,
        flatness: None,
        constants: Default::default(),
        rows,
    })
}

fn variant_name(v: MVariant) -> &'static str {
    match v {
        MVariant::I => "I",
        MVariant::II => "II",
        MVariant::III => "III",
        MVariant::IV => "IV",
    }
}
