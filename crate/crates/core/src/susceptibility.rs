//! Closed-form probe susceptibility of the four-level scheme.
//!
//! Level `|a1>` couples to `|b>` through the cavity standing wave
//! `Omega1 sin(kx)`, `|a2>` couples to `|b>` through field 2 and `|a1>` to
//! `|a2>` through field 3, which carries the collective phase `phi`. The weak
//! probe drives `|c> -> |a1>` with detuning `delta`. All frequencies are in
//! units of `gamma1`.
//!
//! With `N = Omega2^2 - 4 delta^2 + 2i gamma2 delta` and `Y = A + iB`,
//!
//! ```text
//! A = -8 delta^3 + 2 delta (Omega1^2 sin^2 kx + Omega2^2 + Omega3^2)
//!     + 2 gamma1 gamma2 delta + 2 Omega1 Omega2 Omega3 cos(phi) sin(kx)
//! B = 4 delta^2 (gamma1 + gamma2) - gamma1 Omega2^2 - gamma2 Omega1^2 sin^2 kx
//! chi = scale * N / Y
//! ```
//!
//! The expressions hold when the propagation phases of fields 2 and 3 cancel
//! (`cos theta2 + cos theta3 = 0`) and the ground coherence does not dephase.
//! [`crate::steady_state`] handles the general geometry.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Drive-field configuration.
///
/// `phi` is the collective phase `phi2 + phi3 - phi1`; only that combination
/// enters the response. The default beam angles make the propagation phases
/// of fields 2 and 3 cancel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Standing-wave Rabi amplitude.
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub phi: f64,
    /// Angle of field 2 with respect to the cavity axis.
    #[serde(default = "default_theta2")]
    pub theta2: f64,
    /// Angle of field 3 with respect to the cavity axis.
    #[serde(default = "default_theta3")]
    pub theta3: f64,
    /// Ratio of the drive-beam wavenumber to the standing-wave wavenumber.
    #[serde(default = "default_k_over_kappa")]
    pub k_over_kappa: f64,
}

fn default_theta2() -> f64 {
    3.0 * PI / 4.0
}

fn default_theta3() -> f64 {
    PI / 4.0
}

fn default_k_over_kappa() -> f64 {
    1.0
}

/// Beams closer than this to the phase-cancelling geometry use the closed form.
const GEOMETRY_TOL: f64 = 1e-12;

impl DriveConfig {
    /// Drive with the default (phase-cancelling) beam geometry.
    pub fn new(omega1: f64, omega2: f64, omega3: f64, phi: f64) -> Self {
        Self {
            omega1,
            omega2,
            omega3,
            phi,
            theta2: default_theta2(),
            theta3: default_theta3(),
            k_over_kappa: default_k_over_kappa(),
        }
    }

    pub fn with_angles(mut self, theta2: f64, theta3: f64) -> Self {
        self.theta2 = theta2;
        self.theta3 = theta3;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega1", self.omega1), ("omega2", self.omega2), ("omega3", self.omega3)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidRequest(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in
            [("phi", self.phi), ("theta2", self.theta2), ("theta3", self.theta3), ("k_over_kappa", self.k_over_kappa)]
        {
            if !v.is_finite() {
                return Err(Error::InvalidRequest(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Net propagation phase `k x (cos theta2 + cos theta3)` picked up by the
    /// closed loop `a1 -> a2 -> b -> a1` at position `kappa_x`.
    pub fn loop_propagation_phase(&self, kappa_x: f64) -> f64 {
        self.k_over_kappa * kappa_x * (self.theta2.cos() + self.theta3.cos())
    }

    /// Phase that, substituted for `phi` in the closed form, reproduces the
    /// response at arbitrary beam angles.
    pub fn effective_phase(&self, kappa_x: f64) -> f64 {
        self.phi - self.loop_propagation_phase(kappa_x)
    }

    /// True when the propagation phases of fields 2 and 3 cancel.
    pub fn has_cancelling_geometry(&self) -> bool {
        (self.theta2.cos() + self.theta3.cos()).abs() <= GEOMETRY_TOL
    }
}

/// Radiative and dephasing rates, in units of `gamma1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    #[serde(default = "one")]
    pub gamma1: f64,
    #[serde(default)]
    pub gamma2: f64,
    #[serde(default)]
    pub gamma_bc: f64,
}

fn one() -> f64 {
    1.0
}

impl DecayConfig {
    pub fn new(gamma1: f64, gamma2: f64, gamma_bc: f64) -> Self {
        Self { gamma1, gamma2, gamma_bc }
    }

    /// `gamma1 = 1`, metastable `|a2>` and no ground dephasing.
    pub fn metastable() -> Self {
        Self::new(1.0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma1.is_finite() && self.gamma1 > 0.0) {
            return Err(Error::InvalidRequest(format!("gamma1 must be > 0, got {}", self.gamma1)));
        }
        for (name, v) in [("gamma2", self.gamma2), ("gamma_bc", self.gamma_bc)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidRequest(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self::metastable()
    }
}

/// Probe detuning and dimensionless position along the standing wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub delta: f64,
    pub kappa_x: f64,
}

impl ProbePoint {
    pub fn new(delta: f64, kappa_x: f64) -> Self {
        Self { delta, kappa_x }
    }
}

/// Stands for `2 N |p_a1c|^2 / (eps0 hbar)`; multiplies every susceptibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumPrefactor {
    pub scale: f64,
}

impl MediumPrefactor {
    pub fn new(scale: f64) -> Self {
        Self { scale }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidRequest(format!("scale must be > 0, got {}", self.scale)));
        }
        Ok(())
    }
}

impl Default for MediumPrefactor {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

/// `chi = chi_re + i chi_im`; `chi_im` is the probe absorption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Susceptibility {
    pub chi_re: f64,
    pub chi_im: f64,
}

impl Susceptibility {
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.chi_re, self.chi_im)
    }

    pub fn norm(self) -> f64 {
        self.to_complex().norm()
    }
}

impl From<Complex64> for Susceptibility {
    fn from(z: Complex64) -> Self {
        Self { chi_re: z.re, chi_im: z.im }
    }
}

/// The two solutions of `sin(kx) = R` that maximise the metastable absorption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootPair {
    pub r1: Complex64,
    pub r2: Complex64,
}

impl RootPair {
    /// Roots that are real (non-negative discriminant), in order `r1, r2`.
    pub fn real_roots(&self) -> Vec<f64> {
        [self.r1, self.r2].into_iter().filter(|r| r.im == 0.0).map(|r| r.re).collect()
    }
}

/// Position-dependent standing-wave Rabi frequency `Omega1 sin(kx)`.
pub fn effective_rabi(drive: &DriveConfig, kappa_x: f64) -> f64 {
    drive.omega1 * kappa_x.sin()
}

/// `8 delta^3 - 2 delta (Omega1^2 s^2 + Omega2^2 + Omega3^2) - 2 Omega1 Omega2 Omega3 cos(phi) s`.
///
/// Equals `-A` in the metastable limit; vanishes exactly on the absorption maxima.
fn cubic_bracket(drive: &DriveConfig, delta: f64, s: f64) -> f64 {
    let DriveConfig { omega1, omega2, omega3, phi, .. } = *drive;
    let rabi1 = omega1 * s;
    8.0 * delta * delta * delta
        - 2.0 * delta * (rabi1 * rabi1 + omega2 * omega2 + omega3 * omega3)
        - 2.0 * omega1 * omega2 * omega3 * phi.cos() * s
}

/// Transparency factor `Omega2^2 - 4 delta^2`.
fn dark_factor(drive: &DriveConfig, delta: f64) -> f64 {
    drive.omega2 * drive.omega2 - 4.0 * delta * delta
}

/// The denominator `Y = A + iB`.
pub fn y_denominator(drive: &DriveConfig, decay: &DecayConfig, point: &ProbePoint) -> Complex64 {
    let s = point.kappa_x.sin();
    let delta = point.delta;
    let DecayConfig { gamma1, gamma2, .. } = *decay;
    let rabi1 = drive.omega1 * s;
    let a = 2.0 * gamma1 * gamma2 * delta - cubic_bracket(drive, delta, s);
    // 4 delta^2 (g1 + g2) - g1 Omega2^2 - g2 Omega1^2 s^2, grouped around the
    // transparency factor so the metastable limit shares its rounding.
    let b = -gamma1 * dark_factor(drive, delta) + gamma2 * (4.0 * delta * delta - rabi1 * rabi1);
    Complex64::new(a, b)
}

/// Full closed-form susceptibility.
pub fn chi_closed_form(
    drive: &DriveConfig,
    decay: &DecayConfig,
    point: &ProbePoint,
    prefactor: &MediumPrefactor,
) -> Result<Susceptibility> {
    let y = y_denominator(drive, decay, point);
    let z = y.norm_sqr();
    if z == 0.0 || !z.is_finite() {
        return Err(Error::DegenerateDenominator { modulus: y.norm() });
    }
    let dark = dark_factor(drive, point.delta);
    let lossy = 2.0 * decay.gamma2 * point.delta;
    let chi_re = (dark * y.re + lossy * y.im) / z;
    let chi_im = (lossy * y.re - dark * y.im) / z;
    Ok(Susceptibility { chi_re: prefactor.scale * chi_re, chi_im: prefactor.scale * chi_im })
}

/// Absorption in the metastable limit `gamma2 = 0`.
pub fn chi_metastable(
    drive: &DriveConfig,
    gamma1: f64,
    point: &ProbePoint,
    prefactor: &MediumPrefactor,
) -> Result<f64> {
    let dark = dark_factor(drive, point.delta);
    let bracket = cubic_bracket(drive, point.delta, point.kappa_x.sin());
    let num = gamma1 * dark * dark;
    let den = gamma1 * gamma1 * dark * dark + bracket * bracket;
    if den == 0.0 {
        return Err(Error::DegenerateDenominator { modulus: 0.0 });
    }
    Ok(prefactor.scale * num / den)
}

/// Roots `R1,2` of the metastable absorption, `sin(kx) = R` at the maxima.
///
/// `r1` takes the `+` sign of the square root. A negative discriminant gives
/// a conjugate pair.
pub fn roots_r(drive: &DriveConfig, delta: f64) -> Result<RootPair> {
    if delta == 0.0 {
        return Err(Error::DegenerateParameters("zero detuning"));
    }
    if drive.omega1 == 0.0 {
        return Err(Error::DegenerateParameters("zero standing-wave amplitude"));
    }
    let DriveConfig { omega1, omega2, omega3, phi, .. } = *drive;
    let b = omega2 * omega3 * phi.cos();
    let d2 = 4.0 * delta * delta;
    let disc = b * b - d2 * ((omega2 * omega2 + omega3 * omega3) - d2);
    let denom = 2.0 * delta * omega1;
    if disc < 0.0 {
        let root = Complex64::new(0.0, (-disc).sqrt());
        return Ok(RootPair {
            r1: (Complex64::new(-b, 0.0) + root) / denom,
            r2: (Complex64::new(-b, 0.0) - root) / denom,
        });
    }
    // u = delta * omega1 * R solves u^2 + b u + delta^2 P = 0; take the large
    // root first and the small one from the product to avoid cancellation.
    let sq = disc.sqrt();
    let big = -0.5 * (b + b.signum() * sq);
    let product = 0.25 * d2 * ((omega2 * omega2 + omega3 * omega3) - d2);
    let small = if big == 0.0 { 0.0 } else { product / big };
    let scale = delta * omega1;
    let (plus, minus) = if b >= 0.0 { (small, big) } else { (big, small) };
    Ok(RootPair { r1: Complex64::new(plus / scale, 0.0), r2: Complex64::new(minus / scale, 0.0) })
}

/// The quadratic in `sin(kx)` whose roots are `R1,2`, evaluated at `r`.
///
/// Same polynomial as the cubic bracket divided by `-2 delta`.
pub fn root_polynomial(drive: &DriveConfig, delta: f64, r: Complex64) -> Complex64 {
    let DriveConfig { omega1, omega2, omega3, phi, .. } = *drive;
    let b = omega2 * omega3 * phi.cos();
    r * r * (omega1 * omega1) + r * (omega1 * b / delta) + (omega2 * omega2 + omega3 * omega3 - 4.0 * delta * delta)
}
