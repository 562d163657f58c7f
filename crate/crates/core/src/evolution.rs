//! Time-domain oracle: integrate `dR/dt = -M R + C` from the ground state
//! until it settles, then compare against the algebraic routes.
//!
//! For a constant linear system, one classical RK4 step is an affine map
//! `R -> P R + q`. The map is extracted once from the four stage formulas and
//! iterated. Past [`FINE_HORIZON`] the same map is composed with itself
//! (`P^2`, `P^4`, ...) so weakly damped dark superpositions can be followed
//! to long times without changing the fixed-step trajectory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::steady_state::{
    build_system, chi_numeric, closed_form_applies, mat_vec, norm, CoherenceVector, LinearSystem, Matrix3, Vector3,
};
use crate::susceptibility::{chi_closed_form, DecayConfig, DriveConfig, MediumPrefactor, ProbePoint, Susceptibility};

/// Time up to which every step is taken and checked individually.
pub const FINE_HORIZON: f64 = 1e4;

/// Upper bound on the default integration horizon.
pub const MAX_HORIZON: f64 = 1e9;

/// Default steady-state threshold on `|dR/dt| / |C|`.
pub const DEFAULT_TOL: f64 = 1e-11;

/// Floor used for undamped coherences when estimating the slowest decay.
const TINY_DAMPING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSettings {
    /// Fixed step, in units of `1/gamma1`.
    pub dt: f64,
    pub t_max: f64,
    /// Converged once `|-M R + C| <= tol |C|`.
    pub tol: f64,
}

impl EvolutionSettings {
    pub fn new(dt: f64, t_max: f64, tol: f64) -> Result<Self> {
        if !(dt > 0.0 && t_max > 0.0 && tol > 0.0) || !dt.is_finite() || !t_max.is_finite() {
            return Err(Error::InvalidRequest(format!(
                "evolution settings need dt, t_max, tol > 0 (got {dt}, {t_max}, {tol})"
            )));
        }
        Ok(Self { dt, t_max, tol })
    }

    /// Step bounded by the fastest frequency in the problem, horizon by the slowest decay.
    pub fn suggested(drive: &DriveConfig, decay: &DecayConfig, point: &ProbePoint) -> Self {
        let fastest =
            [decay.gamma1, decay.gamma2, drive.omega1, drive.omega2, drive.omega3, 2.0 * point.delta.abs(), 1.0]
                .into_iter()
                .fold(0.0, f64::max);
        let slowest = (0.5 * decay.gamma1).min(0.5 * decay.gamma2 + TINY_DAMPING).min(decay.gamma_bc + TINY_DAMPING);
        Self { dt: 0.2 / fastest, t_max: (200.0 / slowest).min(MAX_HORIZON), tol: DEFAULT_TOL }
    }
}

/// Affine map `R -> P R + q` advancing the state by some whole number of steps.
#[derive(Debug, Clone, Copy)]
struct StepMap {
    p: Matrix3,
    q: Vector3,
}

impl StepMap {
    fn apply(&self, r: &Vector3) -> Vector3 {
        let mut out = mat_vec(&self.p, r);
        for (o, q) in out.iter_mut().zip(&self.q) {
            *o += q;
        }
        out
    }

    /// `self` applied twice.
    fn squared(&self) -> Self {
        let mut p = [[Default::default(); 3]; 3];
        for (i, row) in p.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.p[i][k] * self.p[k][j]).sum();
            }
        }
        Self { p, q: self.apply(&self.q) }
    }
}

fn derivative(system: &LinearSystem, r: &Vector3) -> Vector3 {
    let mut d = mat_vec(&system.m, r);
    for (x, c) in d.iter_mut().zip(&system.c) {
        *x = c - *x;
    }
    d
}

fn axpy(r: &Vector3, h: f64, k: &Vector3) -> Vector3 {
    [r[0] + h * k[0], r[1] + h * k[1], r[2] + h * k[2]]
}

/// One classical fourth-order Runge-Kutta step.
fn rk4_step(system: &LinearSystem, r: &Vector3, dt: f64) -> Vector3 {
    let k1 = derivative(system, r);
    let k2 = derivative(system, &axpy(r, 0.5 * dt, &k1));
    let k3 = derivative(system, &axpy(r, 0.5 * dt, &k2));
    let k4 = derivative(system, &axpy(r, dt, &k3));
    let mut out = *r;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Fixed-step RK4 integrator for `dR/dt = -M R + C`, starting from `R = 0`.
#[derive(Debug, Clone)]
pub struct Rk4Integrator {
    system: LinearSystem,
    dt: f64,
    map: StepMap,
    state: Vector3,
    steps: u64,
}

impl Rk4Integrator {
    pub fn new(system: LinearSystem, dt: f64) -> Self {
        let zero = [Default::default(); 3];
        let q = rk4_step(&system, &zero, dt);
        let mut p = [[Default::default(); 3]; 3];
        for j in 0..3 {
            let mut e = zero;
            e[j] = 1.0.into();
            let col = rk4_step(&system, &e, dt);
            for i in 0..3 {
                p[i][j] = col[i] - q[i];
            }
        }
        Self { system, dt, map: StepMap { p, q }, state: zero, steps: 0 }
    }

    pub fn step(&mut self) {
        self.state = self.map.apply(&self.state);
        self.steps += 1;
    }

    pub fn state(&self) -> Vector3 {
        self.state
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// `|-M R + C| / |C|`.
    pub fn relative_residual(&self) -> f64 {
        norm(&derivative(&self.system, &self.state)) / norm(&self.system.c)
    }
}

/// Whether the run met its tolerance before the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvolutionStatus {
    Converged,
    NonConverged,
}

/// Final state of an integration, converged or not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRun {
    pub state: CoherenceVector,
    pub t: f64,
    pub residual: f64,
    pub status: EvolutionStatus,
}

/// Blow-up bound `1e6 |C| / d`, `d` the weakest positive diagonal damping.
fn blowup_bound(system: &LinearSystem) -> f64 {
    let weakest =
        system.m.iter().enumerate().map(|(i, row)| row[i].re).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    let weakest = if weakest.is_finite() { weakest } else { TINY_DAMPING };
    1e6 * norm(&system.c) / weakest
}

/// Integrate and report the final state whether or not it settled.
pub fn run_evolution(system: &LinearSystem, settings: &EvolutionSettings) -> Result<EvolutionRun> {
    let EvolutionSettings { dt, t_max, tol } = *settings;
    let bound = blowup_bound(system);
    let mut integ = Rk4Integrator::new(*system, dt);
    let check = |integ: &Rk4Integrator| -> Result<f64> {
        let n = norm(&integ.state);
        if !n.is_finite() || n > bound {
            return Err(Error::StepUnstable { t: integ.time(), norm: n });
        }
        Ok(integ.relative_residual())
    };
    let done = |integ: &Rk4Integrator, residual: f64, status| EvolutionRun {
        state: CoherenceVector::from_array(integ.state),
        t: integ.time(),
        residual,
        status,
    };

    let fine_steps = (t_max.min(FINE_HORIZON) / dt).ceil() as u64;
    let mut residual = f64::INFINITY;
    while integ.steps < fine_steps {
        integ.step();
        residual = check(&integ)?;
        if residual <= tol {
            return Ok(done(&integ, residual, EvolutionStatus::Converged));
        }
    }

    // Long-time tail: advance by 1, 2, 4, ... steps along the same trajectory.
    let total_steps = (t_max / dt).ceil() as u64;
    let mut block = integ.map;
    let mut block_len: u64 = 1;
    while integ.steps < total_steps {
        if integ.steps + block_len > total_steps {
            break;
        }
        integ.state = block.apply(&integ.state);
        integ.steps += block_len;
        residual = check(&integ)?;
        if residual <= tol {
            return Ok(done(&integ, residual, EvolutionStatus::Converged));
        }
        block = block.squared();
        block_len *= 2;
    }
    Ok(done(&integ, residual, EvolutionStatus::NonConverged))
}

/// Steady state reached by time integration.
pub fn evolve(system: &LinearSystem, settings: &EvolutionSettings) -> Result<CoherenceVector> {
    let run = run_evolution(system, settings)?;
    match run.status {
        EvolutionStatus::Converged => Ok(run.state),
        EvolutionStatus::NonConverged => Err(Error::NonConverged { t_max: settings.t_max, residual: run.residual }),
    }
}

/// `|a - b| / max(1, |a|, |b|)`: absolute below unit magnitude, relative above.
pub fn mixed_deviation(a: Susceptibility, b: Susceptibility) -> f64 {
    let (a, b) = (a.to_complex(), b.to_complex());
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// Three-way comparison at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub point: ProbePoint,
    /// `None` when the closed form does not apply or failed.
    pub closed_form: Option<Susceptibility>,
    pub numeric: Option<Susceptibility>,
    pub evolution: Option<Susceptibility>,
    pub evolution_time: Option<f64>,
    pub evolution_converged: bool,
    pub closed_vs_numeric: Option<f64>,
    pub closed_vs_evolution: Option<f64>,
    pub numeric_vs_evolution: Option<f64>,
    /// One line per failed route.
    pub errors: Vec<String>,
}

impl VerificationReport {
    /// Largest available pairwise deviation.
    pub fn max_deviation(&self) -> Option<f64> {
        [self.closed_vs_numeric, self.closed_vs_evolution, self.numeric_vs_evolution]
            .into_iter()
            .flatten()
            .reduce(f64::max)
    }

    /// Every route produced a value, the integration converged and all deviations are within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.errors.is_empty() && self.evolution_converged && self.max_deviation().is_some_and(|d| d <= tol)
    }
}

/// Evaluate the susceptibility by all available routes and compare them.
pub fn verify_point(
    drive: &DriveConfig,
    decay: &DecayConfig,
    point: &ProbePoint,
    prefactor: &MediumPrefactor,
    settings: &EvolutionSettings,
) -> VerificationReport {
    let mut errors = Vec::new();
    let mut keep = |route: &str, r: Result<Susceptibility>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(format!("{route}: {e}"));
            None
        }
    };

    let closed_form = if closed_form_applies(drive, decay) {
        keep("closed form", chi_closed_form(drive, decay, point, prefactor))
    } else {
        None
    };
    let numeric = keep("numeric", chi_numeric(drive, decay, point, prefactor));
    let run = run_evolution(&build_system(drive, decay, point), settings);
    let (evolution, evolution_time, evolution_converged) = match run {
        Ok(run) => {
            if run.status == EvolutionStatus::NonConverged {
                errors.push(format!(
                    "evolution: {}",
                    Error::NonConverged { t_max: settings.t_max, residual: run.residual }
                ));
            }
            (
                Some(Susceptibility::from(prefactor.scale * run.state.rho_a1c)),
                Some(run.t),
                run.status == EvolutionStatus::Converged,
            )
        }
        Err(e) => {
            errors.push(format!("evolution: {e}"));
            (None, None, false)
        }
    };

    let pair = |a: Option<Susceptibility>, b: Option<Susceptibility>| Some(mixed_deviation(a?, b?));
    VerificationReport {
        point: *point,
        closed_vs_numeric: pair(closed_form, numeric),
        closed_vs_evolution: pair(closed_form, evolution),
        numeric_vs_evolution: pair(numeric, evolution),
        closed_form,
        numeric,
        evolution,
        evolution_time,
        evolution_converged,
        errors,
    }
}
