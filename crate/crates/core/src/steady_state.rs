//! Direct steady-state solution of the linearized coherence equations.
//!
//! To first order in the probe, the rotated-frame coherences
//! `R = (rho_a1c, rho_a2c, rho_bc)` obey `dR/dt = -M R + C`. The steady
//! state `M^-1 C` is solved here without any of the closed-form algebra, for
//! arbitrary beam angles and ground-state dephasing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::susceptibility::{chi_closed_form, DecayConfig, DriveConfig, MediumPrefactor, ProbePoint, Susceptibility};

pub type Matrix3 = [[Complex64; 3]; 3];
pub type Vector3 = [Complex64; 3];

/// Below this `|det M| / prod(row norms)` the system is treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficient matrix `M` and source `C` for unit probe Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub m: Matrix3,
    pub c: Vector3,
}

/// Probe-induced rotated-frame coherences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceVector {
    pub rho_a1c: Complex64,
    pub rho_a2c: Complex64,
    pub rho_bc: Complex64,
}

impl CoherenceVector {
    pub fn from_array(r: Vector3) -> Self {
        Self { rho_a1c: r[0], rho_a2c: r[1], rho_bc: r[2] }
    }

    pub fn to_array(self) -> Vector3 {
        [self.rho_a1c, self.rho_a2c, self.rho_bc]
    }
}

pub fn mat_vec(m: &Matrix3, v: &Vector3) -> Vector3 {
    let mut out = [ZERO; 3];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

pub fn norm(v: &Vector3) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn determinant(m: &Matrix3) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `|det M|` divided by the product of the row norms; 1 for orthogonal rows, 0 when singular.
pub fn scaled_determinant(m: &Matrix3) -> f64 {
    let rows: f64 = m.iter().map(norm).product();
    if rows == 0.0 {
        return 0.0;
    }
    determinant(m).norm() / rows
}

impl LinearSystem {
    /// `M R - C`.
    pub fn residual(&self, r: &Vector3) -> Vector3 {
        let mut mr = mat_vec(&self.m, r);
        for (x, c) in mr.iter_mut().zip(&self.c) {
            *x -= c;
        }
        mr
    }
}

/// Assemble `M` and `C` for one probe point.
///
/// Atoms start in `|c>`, so the source only feeds `rho_a1c` (`C = (i/2, 0, 0)`).
pub fn build_system(drive: &DriveConfig, decay: &DecayConfig, point: &ProbePoint) -> LinearSystem {
    let half_i = 0.5 * I;
    let delta = point.delta;
    let kx = drive.k_over_kappa * point.kappa_x;
    let rabi1 = drive.omega1 * point.kappa_x.sin();
    let field3 = drive.omega3 * Complex64::from_polar(1.0, -drive.phi + kx * drive.theta3.cos());
    let field2 = drive.omega2 * Complex64::from_polar(1.0, kx * drive.theta2.cos());

    let m = [
        [I * delta + 0.5 * decay.gamma1, -half_i * field3, -half_i * rabi1],
        [-half_i * field3.conj(), I * delta + 0.5 * decay.gamma2, -half_i * field2],
        [-half_i * rabi1, -half_i * field2.conj(), I * delta + decay.gamma_bc],
    ];
    LinearSystem { m, c: [half_i, ZERO, ZERO] }
}

/// Gaussian elimination with partial pivoting on a copy of `m`.
fn eliminate(m: &Matrix3, b: &Vector3) -> Vector3 {
    let mut a = *m;
    let mut x = *b;
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap_or(col);
        a.swap(col, pivot);
        x.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (k, t) in pivot_row.iter().enumerate().skip(col) {
                a[row][k] -= factor * t;
            }
            let t = x[col];
            x[row] -= factor * t;
        }
    }
    for row in (0..3).rev() {
        let mut acc = x[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Solve `M R = C` directly, with one step of iterative refinement.
pub fn solve_coherences(system: &LinearSystem) -> Result<CoherenceVector> {
    let scaled_det = scaled_determinant(&system.m);
    if scaled_det.is_nan() || scaled_det < SINGULARITY_THRESHOLD {
        return Err(Error::SingularSystem { scaled_det });
    }
    let mut r = eliminate(&system.m, &system.c);
    let correction = eliminate(&system.m, &system.residual(&r));
    for (x, dx) in r.iter_mut().zip(correction) {
        *x -= dx;
    }
    Ok(CoherenceVector::from_array(r))
}

/// Susceptibility from the direct linear solve.
pub fn chi_numeric(
    drive: &DriveConfig,
    decay: &DecayConfig,
    point: &ProbePoint,
    prefactor: &MediumPrefactor,
) -> Result<Susceptibility> {
    let rho = solve_coherences(&build_system(drive, decay, point))?;
    Ok(Susceptibility::from(prefactor.scale * rho.rho_a1c))
}

/// True when the closed form is exact for these parameters.
pub fn closed_form_applies(drive: &DriveConfig, decay: &DecayConfig) -> bool {
    drive.has_cancelling_geometry() && decay.gamma_bc == 0.0
}

/// Closed form where it applies, direct solve otherwise.
pub fn chi(
    drive: &DriveConfig,
    decay: &DecayConfig,
    point: &ProbePoint,
    prefactor: &MediumPrefactor,
) -> Result<Susceptibility> {
    if closed_form_applies(drive, decay) {
        chi_closed_form(drive, decay, point, prefactor)
    } else {
        chi_numeric(drive, decay, point, prefactor)
    }
}
