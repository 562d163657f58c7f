//! Command-line front end: flag and config parsing, dispatch to the core
//! library, and CSV, JSON and SVG output.

pub mod args;
pub mod config;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;

use atomloc_core::scan::TableKind;
use atomloc_core::{
    classify, detuning_branches, heatmap, localize, profile, verify_profile, Error, PhaseCase, ProfileTable,
};
use clap::Parser;

use crate::args::{Cli, Command, Format};
use crate::config::RunConfig;
use crate::output::VerifySummary;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status when a computation fails or a verification does not pass.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for invalid flags, values or combinations.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error(transparent)]
    Svg(#[from] svg::SvgError),
    #[error("{0}")]
    Failed(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Svg(_) => EXIT_USAGE,
            CliError::Compute(e) => match e {
                Error::UnknownPreset(_)
                | Error::InvalidRequest(_)
                | Error::UnsupportedPhase(_)
                | Error::UnequalDrives(..)
                | Error::DegenerateParameters(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            },
            CliError::Failed(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

fn unsupported(cfg: &RunConfig) -> CliError {
    CliError::Usage(format!("format {:?} is not available for {:?}", cfg.format, cfg.command).to_lowercase())
}

fn table_output(cfg: &RunConfig, table: &ProfileTable) -> Result<String, CliError> {
    Ok(match cfg.format {
        Format::Csv => output::table_csv(table),
        Format::Json => output::json(table),
        Format::Svg => svg::render(table)?,
    })
}

/// Result of a run that produced output.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    /// One-line summary for the error stream.
    pub note: Option<String>,
    /// Set when the output is complete but the run did not pass.
    pub failure: Option<String>,
}

impl From<String> for Report {
    fn from(text: String) -> Self {
        Self { text, note: None, failure: None }
    }
}

/// Output of a resolved run, or the reason it produced none.
pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = &cfg.params;
    if cfg.dump_config {
        return Ok(output::json(&p.to_doc()).into());
    }
    let req = p.request();
    let text = match cfg.command {
        Command::Profile => table_output(cfg, &profile(&req)?)?,
        Command::Heatmap => {
            if req.delta_range.is_none() {
                return Err(CliError::Usage("heatmap needs --delta-range LO:HI:N".into()));
            }
            let table = heatmap(&req)?;
            debug_assert_eq!(table.kind, TableKind::Heatmap);
            table_output(cfg, &table)?
        }
        Command::Peaks | Command::Classify => {
            req.validate()?;
            let (set, class) = localize(
                &p.drive,
                &p.decay,
                p.delta,
                &p.prefactor,
                p.grid_n,
                atomloc_core::localization::DEFAULT_MIN_PROMINENCE,
            )?;
            debug_assert_eq!(class, classify(&set));
            match (cfg.command, cfg.format) {
                (Command::Peaks, Format::Json) => output::peaks_json(&set, class),
                (Command::Peaks, Format::Csv) => output::peaks_csv(&set),
                (_, Format::Json) => output::class_json(class),
                (_, Format::Csv) => output::class_csv(class),
                _ => return Err(unsupported(cfg)),
            }
        }
        Command::Curves => {
            req.validate()?;
            let case = PhaseCase::from_phi(p.drive.phi)?;
            let xs = atomloc_core::scan::linspace(req.x_range.0, req.x_range.1, req.x_count);
            let branches = detuning_branches(case, &p.drive, &xs)?;
            match cfg.format {
                Format::Csv => output::curves_csv(&branches),
                Format::Json => output::json(&branches),
                Format::Svg => return Err(unsupported(cfg)),
            }
        }
        Command::Verify => {
            let summary = VerifySummary::new(verify_profile(&req)?);
            let text = match cfg.format {
                Format::Json => output::json(&summary),
                Format::Csv => summary.csv(),
                Format::Svg => return Err(unsupported(cfg)),
            };
            let failure = (!summary.passed).then(|| summary.summary.clone());
            return Ok(Report { text, note: Some(summary.summary), failure });
        }
        Command::PresetList => match cfg.format {
            Format::Csv => output::presets_csv(),
            Format::Json => output::presets_json(),
            Format::Svg => return Err(unsupported(cfg)),
        },
    };
    Ok(text.into())
}

fn deliver(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parse `argv`, run, and return the exit status. Diagnostics go to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(stdout, "{e}");
            } else {
                let _ = write!(stderr, "{e}");
            }
            return code;
        }
    };
    let result = RunConfig::resolve(&cli).and_then(|cfg| {
        let report = execute(&cfg)?;
        deliver(&cfg, &report.text, stdout)?;
        if let Some(note) = &report.note {
            let _ = writeln!(stderr, "{note}");
        }
        match report.failure {
            Some(why) => Err(CliError::Failed(why)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "atomloc: {e}");
            e.exit_code()
        }
    }
}
