use thiserror::Error;

/// Everything that can go wrong while evaluating or analysing the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `Y = A + iB` vanished; the susceptibility is undefined at this point.
    #[error("degenerate denominator: |Y| = {modulus:e}")]
    DegenerateDenominator { modulus: f64 },

    /// Parameters for which the factorized absorption formula does not apply
    /// (zero detuning or zero standing-wave amplitude).
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(&'static str),

    /// The coefficient matrix is numerically singular.
    #[error("singular system: scaled determinant {scaled_det:e}")]
    SingularSystem { scaled_det: f64 },

    /// Time integration reached the horizon before the residual dropped below tolerance.
    #[error("not converged by t = {t_max} (relative residual {residual:e})")]
    NonConverged { t_max: f64, residual: f64 },

    /// The fixed-step integrator blew up; the step is too large for this system.
    #[error("integration unstable at t = {t} (|R| = {norm:e})")]
    StepUnstable { t: f64, norm: f64 },

    /// The absorption profile is flat; there are no peaks to report.
    #[error("uniform absorption profile (spread {spread:e})")]
    UniformProfile { spread: f64 },

    /// Detuning branches exist in closed form only for phi in {0, pi/2, pi}.
    #[error("no closed-form detuning branches for phi = {0}")]
    UnsupportedPhase(f64),

    /// Closed-form detuning branches require omega2 == omega3.
    #[error("detuning branches require omega2 == omega3 (got {0} and {1})")]
    UnequalDrives(f64, f64),

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
