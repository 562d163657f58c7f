//! Command-line flags and the number syntax they accept.

use std::path::PathBuf;

use atomloc_core::scan::DeltaRange;
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Susceptibility along the standing wave at one detuning.
    Profile,
    /// Susceptibility over a (detuning, position) grid.
    Heatmap,
    /// Absorption peaks with widths and their classification.
    Peaks,
    /// Detuning branches for phase 0, pi/2 or pi.
    Curves,
    /// Half-wavelength classification only.
    Classify,
    /// Closed form, direct solve and time integration compared on the profile grid.
    Verify,
    /// Names of the built-in parameter sets.
    PresetList,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "atomloc", version, about = "Probe absorption and atom localization in a cavity standing wave")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// Built-in parameter set to start from.
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON parameter file; applied after the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Print the resolved parameters as a JSON config and exit.
    #[arg(long)]
    pub dump_config: bool,

    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub omega1: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub omega2: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub omega3: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub theta2: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub theta3: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub gamma1: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub gamma2: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub gamma_bc: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Medium prefactor multiplying the susceptibility.
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub x_count: Option<usize>,
    /// Detuning scan as LO:HI:N.
    #[arg(long, value_parser = parse_delta_range, allow_hyphen_values = true)]
    pub delta_range: Option<DeltaRange>,
    /// Samples per period for peak search.
    #[arg(long)]
    pub grid_n: Option<usize>,
}

impl Cli {
    /// True when any physical parameter is set on the command line.
    pub fn has_overrides(&self) -> bool {
        [
            self.omega1,
            self.omega2,
            self.omega3,
            self.phi,
            self.theta2,
            self.theta3,
            self.gamma1,
            self.gamma2,
            self.gamma_bc,
            self.delta,
            self.scale,
        ]
        .iter()
        .any(Option::is_some)
            || self.x_count.is_some()
            || self.grid_n.is_some()
            || self.delta_range.is_some()
    }
}

/// Decimal number or a multiple of pi: `pi`, `-pi/2`, `3pi/4`, `0.5pi`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let bad = || format!("invalid number '{s}'");
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    };
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let coefficient = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match tail {
        "" => 1.0,
        d => d.strip_prefix('/').and_then(|d| d.parse::<f64>().ok()).filter(|d| *d != 0.0).ok_or_else(bad)?,
    };
    let v = coefficient * std::f64::consts::PI / divisor;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// `LO:HI:N`, with `LO` and `HI` in [`parse_number`] syntax.
pub fn parse_delta_range(s: &str) -> Result<DeltaRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("delta range must be LO:HI:N, got '{s}'"));
    };
    let count = n.trim().parse::<usize>().map_err(|_| format!("invalid sample count '{n}'"))?;
    Ok(DeltaRange { lo: parse_number(lo)?, hi: parse_number(hi)?, count })
}
