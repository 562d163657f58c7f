//! Weak-probe susceptibility of a four-level atom in a cavity standing wave
//! and the atom localization it allows.
//!
//! Three independent routes compute the same susceptibility:
//! [`susceptibility::chi_closed_form`] evaluates the analytic expression,
//! [`steady_state::chi_numeric`] solves the 3x3 coherence system directly, and
//! [`evolution::evolve`] integrates the equations of motion to their steady
//! state. [`localization`] turns absorption profiles into peak positions and
//! half-wavelength classifications; [`scan`] batches evaluations.

pub mod error;
pub mod evolution;
pub mod localization;
pub mod peaks;
pub mod scan;
pub mod steady_state;
pub mod susceptibility;

pub use error::{Error, Result};
pub use evolution::{evolve, run_evolution, verify_point, EvolutionSettings, VerificationReport};
pub use localization::{
    classify, detuning_branches, localize, peak_positions_analytic, peak_positions_numeric, DetuningBranch,
    LocalizationClass, PhaseCase,
};
pub use peaks::{Peak, PeakSet};
pub use scan::{heatmap, preset, profile, verify_profile, DeltaRange, Preset, ProfileTable, ScanRequest};
pub use steady_state::{build_system, chi, chi_numeric, solve_coherences, CoherenceVector, LinearSystem};
pub use susceptibility::{
    chi_closed_form, chi_metastable, effective_rabi, roots_r, y_denominator, DecayConfig, DriveConfig, MediumPrefactor,
    ProbePoint, RootPair, Susceptibility,
};
