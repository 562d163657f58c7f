//! Batch evaluation along the standing wave and over `(delta, kx)` grids.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{verify_point, EvolutionSettings, VerificationReport};
use crate::steady_state::chi;
use crate::susceptibility::{DecayConfig, DriveConfig, MediumPrefactor, ProbePoint, Susceptibility};

pub const DEFAULT_X_COUNT: usize = 513;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    #[default]
    ChiIm,
    ChiRe,
    Both,
}

/// Inclusive detuning range `lo..=hi` with `count` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRequest {
    pub drive: DriveConfig,
    pub decay: DecayConfig,
    pub prefactor: MediumPrefactor,
    /// Detuning of 1D profiles.
    pub delta: f64,
    /// Inclusive `kappa_x` range.
    pub x_range: (f64, f64),
    pub x_count: usize,
    pub delta_range: Option<DeltaRange>,
    pub quantity: Quantity,
}

impl ScanRequest {
    pub fn new(drive: DriveConfig, decay: DecayConfig, delta: f64) -> Self {
        Self {
            drive,
            decay,
            prefactor: MediumPrefactor::default(),
            delta,
            x_range: (-PI, PI),
            x_count: DEFAULT_X_COUNT,
            delta_range: None,
            quantity: Quantity::ChiIm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.drive.validate()?;
        self.decay.validate()?;
        self.prefactor.validate()?;
        if !self.delta.is_finite() {
            return Err(Error::InvalidRequest(format!("delta must be finite, got {}", self.delta)));
        }
        check_range("kappa_x", self.x_range.0, self.x_range.1, self.x_count)?;
        if let Some(r) = self.delta_range {
            check_range("delta", r.lo, r.hi, r.count)?;
        }
        Ok(())
    }

    pub fn point(&self, kappa_x: f64) -> ProbePoint {
        ProbePoint::new(self.delta, kappa_x)
    }
}

fn check_range(name: &str, lo: f64, hi: f64, count: usize) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidRequest(format!("{name} range needs lo < hi, got {lo}..{hi}")));
    }
    if count < 2 {
        return Err(Error::InvalidRequest(format!("{name} count must be >= 2, got {count}")));
    }
    Ok(())
}

/// `count` evenly spaced values from `lo` to `hi`, both included.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let last = count.saturating_sub(1).max(1) as f64;
    (0..count).map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * i as f64 / last }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Profile,
    Heatmap,
}

/// One table cell; `value` is `None` where the susceptibility is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub delta: f64,
    pub kappa_x: f64,
    pub value: Option<Susceptibility>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub request: ScanRequest,
    pub code_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTable {
    pub kind: TableKind,
    pub rows: Vec<ProfileRow>,
    pub metadata: TableMetadata,
}

impl ProfileTable {
    fn new(kind: TableKind, rows: Vec<ProfileRow>, request: &ScanRequest) -> Self {
        Self {
            kind,
            rows,
            metadata: TableMetadata { request: request.clone(), code_version: env!("CARGO_PKG_VERSION").to_string() },
        }
    }
}

fn cell(req: &ScanRequest, delta: f64, kappa_x: f64) -> ProfileRow {
    let value = chi(&req.drive, &req.decay, &ProbePoint::new(delta, kappa_x), &req.prefactor).ok();
    ProfileRow { delta, kappa_x, value }
}

fn grid(req: &ScanRequest, with_delta: bool) -> Result<Vec<(f64, f64)>> {
    req.validate()?;
    let xs = linspace(req.x_range.0, req.x_range.1, req.x_count);
    if !with_delta {
        return Ok(xs.into_iter().map(|x| (req.delta, x)).collect());
    }
    let r = req.delta_range.ok_or_else(|| Error::InvalidRequest("heatmap needs a delta range".into()))?;
    Ok(linspace(r.lo, r.hi, r.count).into_iter().flat_map(|d| xs.iter().map(move |&x| (d, x))).collect())
}

/// Absorption and dispersion along `kappa_x` at the request's detuning.
pub fn profile(req: &ScanRequest) -> Result<ProfileTable> {
    let rows = grid(req, false)?.into_par_iter().map(|(d, x)| cell(req, d, x)).collect();
    Ok(ProfileTable::new(TableKind::Profile, rows, req))
}

/// Single-threaded [`profile`].
pub fn profile_serial(req: &ScanRequest) -> Result<ProfileTable> {
    let rows = grid(req, false)?.into_iter().map(|(d, x)| cell(req, d, x)).collect();
    Ok(ProfileTable::new(TableKind::Profile, rows, req))
}

/// `(delta, kappa_x)` grid, delta outer and `kappa_x` inner.
pub fn heatmap(req: &ScanRequest) -> Result<ProfileTable> {
    let rows = grid(req, true)?.into_par_iter().map(|(d, x)| cell(req, d, x)).collect();
    Ok(ProfileTable::new(TableKind::Heatmap, rows, req))
}

/// Single-threaded [`heatmap`].
pub fn heatmap_serial(req: &ScanRequest) -> Result<ProfileTable> {
    let rows = grid(req, true)?.into_iter().map(|(d, x)| cell(req, d, x)).collect();
    Ok(ProfileTable::new(TableKind::Heatmap, rows, req))
}

/// Three-way verification at every `kappa_x` of the profile grid.
pub fn verify_profile(req: &ScanRequest) -> Result<Vec<VerificationReport>> {
    Ok(grid(req, false)?
        .into_par_iter()
        .map(|(d, x)| {
            let p = ProbePoint::new(d, x);
            let settings = EvolutionSettings::suggested(&req.drive, &req.decay, &p);
            verify_point(&req.drive, &req.decay, &p, &req.prefactor, &settings)
        })
        .collect())
}

/// Named parameter sets for the standard regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3Phi0,
    Fig3Phihalf,
    Fig3Phipi,
    Fig4e,
    SubhalfPhi0,
    SubhalfPhipi,
}

impl Preset {
    pub const ALL: [Preset; 10] = [
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig2c,
        Preset::Fig2d,
        Preset::Fig3Phi0,
        Preset::Fig3Phihalf,
        Preset::Fig3Phipi,
        Preset::Fig4e,
        Preset::SubhalfPhi0,
        Preset::SubhalfPhipi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig2c => "fig2c",
            Preset::Fig2d => "fig2d",
            Preset::Fig3Phi0 => "fig3_phi0",
            Preset::Fig3Phihalf => "fig3_phihalf",
            Preset::Fig3Phipi => "fig3_phipi",
            Preset::Fig4e => "fig4e",
            Preset::SubhalfPhi0 => "subhalf_phi0",
            Preset::SubhalfPhipi => "subhalf_phipi",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Fig2a => "Omega2=Omega3=1, Omega1=3, phi=pi/2, delta=5: two broad peaks",
            Preset::Fig2b => "as fig2a with delta=1.4: four peaks",
            Preset::Fig2c => "as fig2a with delta=1.3: four peaks",
            Preset::Fig2d => "as fig2a with Omega1=20: four sharp peaks",
            Preset::Fig3Phi0 => "Omega2=Omega3=20, Omega1=30, phi=0, delta scan 0..30",
            Preset::Fig3Phihalf => "Omega2=Omega3=20, Omega1=30, phi=pi/2, delta scan 0..30",
            Preset::Fig3Phipi => "Omega2=Omega3=20, Omega1=30, phi=pi, delta scan 0..30",
            Preset::Fig4e => "Omega2=Omega3=20, Omega1=30, phi=pi/2, delta=0: flat absorption",
            Preset::SubhalfPhi0 => "Omega2=Omega3=20, Omega1=30, phi=0, delta=7.5: peaks in (-pi, 0)",
            Preset::SubhalfPhipi => "Omega2=Omega3=20, Omega1=30, phi=pi, delta=7.5: peaks in (0, pi)",
        }
    }

    pub fn request(self) -> ScanRequest {
        let decay = DecayConfig::metastable();
        let weak =
            |omega1: f64, delta: f64| ScanRequest::new(DriveConfig::new(omega1, 1.0, 1.0, FRAC_PI_2), decay, delta);
        let strong = |phi: f64, delta: f64| ScanRequest::new(DriveConfig::new(30.0, 20.0, 20.0, phi), decay, delta);
        let detuning_scan = Some(DeltaRange { lo: 0.0, hi: 30.0, count: 121 });
        match self {
            Preset::Fig2a => weak(3.0, 5.0),
            Preset::Fig2b => weak(3.0, 1.4),
            Preset::Fig2c => weak(3.0, 1.3),
            Preset::Fig2d => weak(20.0, 5.0),
            Preset::Fig3Phi0 => ScanRequest { delta_range: detuning_scan, ..strong(0.0, 7.5) },
            Preset::Fig3Phihalf => ScanRequest { delta_range: detuning_scan, ..strong(FRAC_PI_2, 425f64.sqrt()) },
            Preset::Fig3Phipi => ScanRequest { delta_range: detuning_scan, ..strong(PI, 7.5) },
            Preset::Fig4e => strong(FRAC_PI_2, 0.0),
            Preset::SubhalfPhi0 => strong(0.0, 7.5),
            Preset::SubhalfPhipi => strong(PI, 7.5),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Scan request of a named preset.
pub fn preset(name: &str) -> Result<ScanRequest> {
    Ok(name.parse::<Preset>()?.request())
}
