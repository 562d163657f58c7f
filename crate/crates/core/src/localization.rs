//! From absorption profiles to position information.
//!
//! In the metastable limit the absorption along the standing wave is
//! maximal wherever `sin(kx)` equals one of the real roots `R1,2`, which gives
//! analytic peak positions. The numeric route samples the profile and finds
//! its maxima directly. For `Omega2 = Omega3` the maximum condition can be
//! solved for the detuning instead, giving one curve per branch.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::peaks::{find_peaks_periodic, grid_position, wrap_angle, PeakSet};
use crate::steady_state::chi;
use crate::susceptibility::{roots_r, DecayConfig, DriveConfig, MediumPrefactor, ProbePoint};

pub const DEFAULT_GRID_N: usize = 2048;

/// Relative prominence a maximum needs to count as a localization peak.
pub const DEFAULT_MIN_PROMINENCE: f64 = 1e-2;

/// Analytic positions closer than this are the same point.
const DUPLICATE_TOL: f64 = 1e-12;

/// Roots this close to +-1 are taken as the antinode itself.
const ANTINODE_TOL: f64 = 1e-12;

/// Tolerance when matching `phi` to one of the special phases.
const PHASE_TOL: f64 = 1e-9;

/// Where the localization peaks sit relative to the two half-wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalizationClass {
    /// All peaks in `(-pi, 0)`.
    SubHalfNegative,
    /// All peaks in `(0, pi)`.
    SubHalfPositive,
    BothHalves,
    Uniform,
    NoPeaks,
}

impl LocalizationClass {
    /// Image under `kx -> -kx`.
    pub fn mirrored(self) -> Self {
        match self {
            Self::SubHalfNegative => Self::SubHalfPositive,
            Self::SubHalfPositive => Self::SubHalfNegative,
            other => other,
        }
    }
}

/// Phases for which the detuning branches have closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseCase {
    Zero,
    HalfPi,
    Pi,
}

impl PhaseCase {
    pub fn from_phi(phi: f64) -> Result<Self> {
        let w = phi.rem_euclid(2.0 * PI);
        let near = |target: f64| (w - target).abs() <= PHASE_TOL;
        if near(0.0) || near(2.0 * PI) {
            Ok(Self::Zero)
        } else if near(FRAC_PI_2) {
            Ok(Self::HalfPi)
        } else if near(PI) {
            Ok(Self::Pi)
        } else {
            Err(Error::UnsupportedPhase(phi))
        }
    }

    pub fn phi(self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::HalfPi => FRAC_PI_2,
            Self::Pi => PI,
        }
    }
}

/// Detuning that puts an absorption maximum at each sampled position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningBranch {
    pub phase_case: PhaseCase,
    /// For `Zero`/`Pi`: 1 and 2 are the `+`/`-` roots of the quadratic, 3 the
    /// linear branch. For `HalfPi`: 1 is `+delta1`, 2 is `-delta1`.
    pub branch_id: u8,
    /// `(kappa_x, delta)` samples.
    pub values: Vec<(f64, f64)>,
}

/// Detuning of one branch at `kappa_x`; `omega` is the common `Omega2 = Omega3`.
pub fn branch_detuning(phase_case: PhaseCase, branch_id: u8, omega1: f64, omega: f64, kappa_x: f64) -> f64 {
    let w = omega1 * kappa_x.sin();
    match (phase_case, branch_id) {
        (PhaseCase::HalfPi, 1) => 0.5 * (w * w + 2.0 * omega * omega).sqrt(),
        (PhaseCase::HalfPi, _) => -0.5 * (w * w + 2.0 * omega * omega).sqrt(),
        (case, id) => {
            // phi = pi flips the sign of the position term.
            let w = if case == PhaseCase::Pi { -w } else { w };
            let root = (w * w + 8.0 * omega * omega).sqrt();
            match id {
                1 => 0.25 * (w + root),
                2 => 0.25 * (w - root),
                _ => -0.5 * w,
            }
        }
    }
}

/// All closed-form detuning branches of `phase_case`, sampled at `kappa_x_samples`.
///
/// `drive.phi` is not consulted; the branches belong to `phase_case`.
pub fn detuning_branches(
    phase_case: PhaseCase,
    drive: &DriveConfig,
    kappa_x_samples: &[f64],
) -> Result<Vec<DetuningBranch>> {
    if drive.omega2 != drive.omega3 {
        return Err(Error::UnequalDrives(drive.omega2, drive.omega3));
    }
    let ids: &[u8] = match phase_case {
        PhaseCase::HalfPi => &[1, 2],
        _ => &[1, 2, 3],
    };
    Ok(ids
        .iter()
        .map(|&branch_id| DetuningBranch {
            phase_case,
            branch_id,
            values: kappa_x_samples
                .iter()
                .map(|&x| (x, branch_detuning(phase_case, branch_id, drive.omega1, drive.omega2, x)))
                .collect(),
        })
        .collect())
}

/// Positions in `[-pi, pi)` where the metastable absorption peaks.
///
/// Each real root with `|R| <= 1` gives `asin(R)` and `pi - asin(R)`;
/// coincident positions (`|R| = 1`, equal roots) are merged.
pub fn peak_positions_analytic(drive: &DriveConfig, delta: f64) -> Result<Vec<f64>> {
    let roots = roots_r(drive, delta)?;
    let mut out: Vec<f64> = Vec::new();
    for r in roots.real_roots() {
        if (r.abs() - 1.0).abs() <= ANTINODE_TOL {
            let x = FRAC_PI_2.copysign(r);
            if !out.iter().any(|&y| (x - y).abs() <= DUPLICATE_TOL) {
                out.push(x);
            }
            continue;
        }
        if r.abs() > 1.0 {
            continue;
        }
        let a = r.asin();
        for x in [wrap_angle(a), wrap_angle(PI - a)] {
            let seen = out.iter().any(|&y| {
                let d = (x - y).abs();
                d <= DUPLICATE_TOL || (2.0 * PI - d) <= DUPLICATE_TOL
            });
            if !seen {
                out.push(x);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// `chi''` on the uniform grid `kappa_x_i = -pi + 2 pi i / n`.
pub fn absorption_samples(
    drive: &DriveConfig,
    decay: &DecayConfig,
    delta: f64,
    prefactor: &MediumPrefactor,
    grid_n: usize,
) -> Result<Vec<f64>> {
    (0..grid_n)
        .map(|i| chi(drive, decay, &ProbePoint::new(delta, grid_position(i, grid_n)), prefactor).map(|c| c.chi_im))
        .collect()
}

/// Numeric peak search on `chi''` over one period.
///
/// Fails with [`Error::UniformProfile`] when the absorption is flat.
pub fn peak_positions_numeric(
    drive: &DriveConfig,
    decay: &DecayConfig,
    delta: f64,
    prefactor: &MediumPrefactor,
    grid_n: usize,
    min_prominence: f64,
) -> Result<PeakSet> {
    let samples = absorption_samples(drive, decay, delta, prefactor, grid_n)?;
    let profile =
        |x: f64| chi(drive, decay, &ProbePoint::new(delta, x), prefactor).map(|c| c.chi_im).unwrap_or(f64::NAN);
    find_peaks_periodic(&samples, profile, min_prominence)
}

/// Peak search that folds a flat profile into a uniform [`PeakSet`].
pub fn localize(
    drive: &DriveConfig,
    decay: &DecayConfig,
    delta: f64,
    prefactor: &MediumPrefactor,
    grid_n: usize,
    min_prominence: f64,
) -> Result<(PeakSet, LocalizationClass)> {
    let set = match peak_positions_numeric(drive, decay, delta, prefactor, grid_n, min_prominence) {
        Ok(set) => set,
        Err(Error::UniformProfile { .. }) => PeakSet::uniform(grid_n),
        Err(e) => return Err(e),
    };
    let class = classify(&set);
    Ok((set, class))
}

/// Half-wavelength confinement of a peak set.
///
/// A peak within one grid step of a node (`0` or `+-pi`) cannot be assigned
/// to a half and yields `BothHalves`.
pub fn classify(peaks: &PeakSet) -> LocalizationClass {
    if peaks.uniform {
        return LocalizationClass::Uniform;
    }
    if peaks.peaks.is_empty() {
        return LocalizationClass::NoPeaks;
    }
    let margin = peaks.resolution();
    let on_boundary = peaks.peaks.iter().any(|p| p.kappa_x.abs() <= margin || p.kappa_x.abs() >= PI - margin);
    if on_boundary {
        return LocalizationClass::BothHalves;
    }
    if peaks.peaks.iter().all(|p| p.kappa_x < 0.0) {
        LocalizationClass::SubHalfNegative
    } else if peaks.peaks.iter().all(|p| p.kappa_x > 0.0) {
        LocalizationClass::SubHalfPositive
    } else {
        LocalizationClass::BothHalves
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peaks::Peak;

    fn set_at(xs: &[f64]) -> PeakSet {
        PeakSet {
            peaks: xs.iter().map(|&kappa_x| Peak { kappa_x, height: 1.0, prominence: 1.0, fwhm: Some(0.1) }).collect(),
            profile_resolution: DEFAULT_GRID_N,
            uniform: false,
        }
    }

    #[test]
    fn analytic_subhalf_positions() {
        let d = DriveConfig::new(30.0, 20.0, 20.0, 0.0);
        let xs = peak_positions_analytic(&d, 7.5).unwrap();
        assert_eq!(xs.len(), 2);
        assert!((xs[0] + 5.0 * PI / 6.0).abs() < 1e-12);
        assert!((xs[1] + PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_none_when_roots_out_of_range() {
        let d = DriveConfig::new(3.0, 1.0, 1.0, FRAC_PI_2);
        assert!(peak_positions_analytic(&d, 5.0).unwrap().is_empty());
    }

    #[test]
    fn analytic_four_positions_fig2d() {
        let d = DriveConfig::new(20.0, 1.0, 1.0, FRAC_PI_2);
        let xs = peak_positions_analytic(&d, 5.0).unwrap();
        let s = 98f64.sqrt() / 20.0;
        let a = s.asin();
        let mut want = vec![-PI + a, -a, a, PI - a];
        want.sort_by(f64::total_cmp);
        assert_eq!(xs.len(), 4);
        for (x, w) in xs.iter().zip(&want) {
            assert!((x - w).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_merges_antinode_duplicates() {
        let d = DriveConfig::new(30.0, 20.0, 20.0, FRAC_PI_2);
        let xs = peak_positions_analytic(&d, 425f64.sqrt()).unwrap();
        assert_eq!(xs.len(), 2);
        assert_eq!(xs, vec![-FRAC_PI_2, FRAC_PI_2]);
    }

    #[test]
    fn branch_examples() {
        let d = DriveConfig::new(30.0, 20.0, 20.0, 0.0);
        let b = detuning_branches(PhaseCase::HalfPi, &d, &[FRAC_PI_2]).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b[0].values[0].1 - 425f64.sqrt()).abs() < 1e-12);
        assert!((b[1].values[0].1 + 425f64.sqrt()).abs() < 1e-12);

        let b = detuning_branches(PhaseCase::Zero, &d, &[-FRAC_PI_2]).unwrap();
        assert_eq!(b[2].values[0].1, 15.0);

        let b = detuning_branches(PhaseCase::Pi, &d, &[0.0]).unwrap();
        assert_eq!(b[2].values[0].1, 0.0);
        let expected = (8.0f64 * 400.0).sqrt() / 4.0;
        assert!((b[0].values[0].1 - expected).abs() < 1e-12);
        assert!((b[1].values[0].1 + expected).abs() < 1e-12);
        assert!((expected - 20.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn branches_need_equal_drives() {
        let d = DriveConfig::new(30.0, 20.0, 21.0, 0.0);
        assert!(matches!(detuning_branches(PhaseCase::Zero, &d, &[0.1]), Err(Error::UnequalDrives(..))));
    }

    #[test]
    fn phase_case_parsing() {
        assert_eq!(PhaseCase::from_phi(0.0).unwrap(), PhaseCase::Zero);
        assert_eq!(PhaseCase::from_phi(2.0 * PI).unwrap(), PhaseCase::Zero);
        assert_eq!(PhaseCase::from_phi(FRAC_PI_2).unwrap(), PhaseCase::HalfPi);
        assert_eq!(PhaseCase::from_phi(-PI).unwrap(), PhaseCase::Pi);
        assert!(matches!(PhaseCase::from_phi(0.3), Err(Error::UnsupportedPhase(_))));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&set_at(&[-5.0 * PI / 6.0, -PI / 6.0])), LocalizationClass::SubHalfNegative);
        assert_eq!(classify(&set_at(&[PI / 6.0, 5.0 * PI / 6.0])), LocalizationClass::SubHalfPositive);
        assert_eq!(classify(&set_at(&[-1.0, 1.0])), LocalizationClass::BothHalves);
        assert_eq!(classify(&set_at(&[-1.0, 0.0])), LocalizationClass::BothHalves);
        assert_eq!(classify(&set_at(&[-PI, -1.0])), LocalizationClass::BothHalves);
        assert_eq!(classify(&set_at(&[0.001, 1.0])), LocalizationClass::BothHalves);
        assert_eq!(classify(&set_at(&[])), LocalizationClass::NoPeaks);
        assert_eq!(classify(&PeakSet::uniform(DEFAULT_GRID_N)), LocalizationClass::Uniform);
    }

    #[test]
    fn mirrored_class() {
        assert_eq!(LocalizationClass::SubHalfNegative.mirrored(), LocalizationClass::SubHalfPositive);
        assert_eq!(LocalizationClass::BothHalves.mirrored(), LocalizationClass::BothHalves);
    }

    #[test]
    fn numeric_subhalf() {
        let d = DriveConfig::new(30.0, 20.0, 20.0, 0.0);
        let (set, class) = localize(
            &d,
            &DecayConfig::metastable(),
            7.5,
            &MediumPrefactor::default(),
            DEFAULT_GRID_N,
            DEFAULT_MIN_PROMINENCE,
        )
        .unwrap();
        assert_eq!(set.peaks.len(), 2, "{set:?}");
        assert_eq!(class, LocalizationClass::SubHalfNegative);
    }

    #[test]
    fn numeric_uniform() {
        let d = DriveConfig::new(30.0, 20.0, 20.0, FRAC_PI_2);
        let err = peak_positions_numeric(&d, &DecayConfig::metastable(), 0.0, &MediumPrefactor::default(), 2048, 1e-2);
        assert!(matches!(err, Err(Error::UniformProfile { .. })));
    }
}
