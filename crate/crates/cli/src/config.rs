//! JSON parameter documents and resolution of preset, file and flags into one
//! run configuration.

use std::path::{Path, PathBuf};

use atomloc_core::localization::DEFAULT_GRID_N;
use atomloc_core::scan::DeltaRange;
use atomloc_core::{DecayConfig, DriveConfig, MediumPrefactor, Preset, ScanRequest};
use serde::{Deserialize, Serialize};

use crate::args::{Cli, Command, Format};
use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta3: Option<f64>,
    /// Drive-beam to standing-wave wavenumber ratio.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_over_kappa: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_bc: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_range: Option<DeltaRange>,
}

/// Config file contents; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    #[serde(default)]
    pub drive: DriveDoc,
    #[serde(default)]
    pub decay: DecayDoc,
    #[serde(default)]
    pub probe: ProbeDoc,
    #[serde(default)]
    pub medium: MediumDoc,
    #[serde(default)]
    pub scan: ScanDoc,
}

impl ConfigDoc {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// True when the document sets nothing.
    pub fn is_empty(&self) -> bool {
        *self == ConfigDoc::default()
    }
}

/// Fully resolved physical and sampling parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub drive: DriveConfig,
    pub decay: DecayConfig,
    pub prefactor: MediumPrefactor,
    pub delta: f64,
    pub x_count: usize,
    pub grid_n: usize,
    pub delta_range: Option<DeltaRange>,
}

impl Default for Params {
    fn default() -> Self {
        Self::from_request(&ScanRequest::new(DriveConfig::new(0.0, 0.0, 0.0, 0.0), DecayConfig::default(), 0.0))
    }
}

impl Params {
    pub fn from_request(req: &ScanRequest) -> Self {
        Self {
            drive: req.drive,
            decay: req.decay,
            prefactor: req.prefactor,
            delta: req.delta,
            x_count: req.x_count,
            grid_n: DEFAULT_GRID_N,
            delta_range: req.delta_range,
        }
    }

    pub fn request(&self) -> ScanRequest {
        ScanRequest {
            prefactor: self.prefactor,
            x_count: self.x_count,
            delta_range: self.delta_range,
            ..ScanRequest::new(self.drive, self.decay, self.delta)
        }
    }

    pub fn apply(&mut self, doc: &ConfigDoc) {
        fn set<T: Copy>(target: &mut T, value: Option<T>) {
            if let Some(v) = value {
                *target = v;
            }
        }
        let d = &doc.drive;
        set(&mut self.drive.omega1, d.omega1);
        set(&mut self.drive.omega2, d.omega2);
        set(&mut self.drive.omega3, d.omega3);
        set(&mut self.drive.phi, d.phi);
        set(&mut self.drive.theta2, d.theta2);
        set(&mut self.drive.theta3, d.theta3);
        set(&mut self.drive.k_over_kappa, d.k_over_kappa);
        set(&mut self.decay.gamma1, doc.decay.gamma1);
        set(&mut self.decay.gamma2, doc.decay.gamma2);
        set(&mut self.decay.gamma_bc, doc.decay.gamma_bc);
        set(&mut self.delta, doc.probe.delta);
        set(&mut self.prefactor.scale, doc.medium.scale);
        set(&mut self.x_count, doc.scan.x_count);
        set(&mut self.grid_n, doc.scan.grid_n);
        if doc.scan.delta_range.is_some() {
            self.delta_range = doc.scan.delta_range;
        }
    }

    /// Document that reproduces these parameters exactly.
    pub fn to_doc(&self) -> ConfigDoc {
        ConfigDoc {
            drive: DriveDoc {
                omega1: Some(self.drive.omega1),
                omega2: Some(self.drive.omega2),
                omega3: Some(self.drive.omega3),
                phi: Some(self.drive.phi),
                theta2: Some(self.drive.theta2),
                theta3: Some(self.drive.theta3),
                k_over_kappa: Some(self.drive.k_over_kappa),
            },
            decay: DecayDoc {
                gamma1: Some(self.decay.gamma1),
                gamma2: Some(self.decay.gamma2),
                gamma_bc: Some(self.decay.gamma_bc),
            },
            probe: ProbeDoc { delta: Some(self.delta) },
            medium: MediumDoc { scale: Some(self.prefactor.scale) },
            scan: ScanDoc { x_count: Some(self.x_count), grid_n: Some(self.grid_n), delta_range: self.delta_range },
        }
    }
}

/// Everything a run needs, after preset, config file and flags are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: Params,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub dump_config: bool,
}

impl RunConfig {
    /// Preset first, then the config file, then individual flags.
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let file = cli.config.as_deref().map(ConfigDoc::read).transpose()?;
        let needs_params = !matches!(cli.command, Command::PresetList);
        if needs_params && cli.preset.is_none() && file.as_ref().is_none_or(ConfigDoc::is_empty) && !cli.has_overrides()
        {
            return Err(CliError::Usage("no parameters given; use --preset, --config or parameter flags".into()));
        }

        let mut params = match &cli.preset {
            Some(name) => {
                let p: Preset = name.parse().map_err(|_| CliError::Usage(format!("unknown preset '{name}'")))?;
                Params::from_request(&p.request())
            }
            None => Params::default(),
        };
        if let Some(doc) = &file {
            params.apply(doc);
        }
        params.apply(&ConfigDoc {
            drive: DriveDoc {
                omega1: cli.omega1,
                omega2: cli.omega2,
                omega3: cli.omega3,
                phi: cli.phi,
                theta2: cli.theta2,
                theta3: cli.theta3,
                k_over_kappa: None,
            },
            decay: DecayDoc { gamma1: cli.gamma1, gamma2: cli.gamma2, gamma_bc: cli.gamma_bc },
            probe: ProbeDoc { delta: cli.delta },
            medium: MediumDoc { scale: cli.scale },
            scan: ScanDoc { x_count: cli.x_count, grid_n: cli.grid_n, delta_range: cli.delta_range },
        });

        let format = cli.format.unwrap_or(match cli.command {
            Command::Profile | Command::Heatmap | Command::Curves | Command::PresetList => Format::Csv,
            Command::Peaks | Command::Classify | Command::Verify => Format::Json,
        });
        Ok(Self { command: cli.command, params, format, output: cli.output.clone(), dump_config: cli.dump_config })
    }
}
