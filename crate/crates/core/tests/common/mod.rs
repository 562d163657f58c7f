#![allow(dead_code)]

use std::f64::consts::PI;

use atomloc_core::{DecayConfig, DriveConfig, ProbePoint, Susceptibility};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Drive with amplitudes in `[0, 40]`, any phase, default geometry.
pub fn random_drive<R: Rng>(rng: &mut R) -> DriveConfig {
    DriveConfig::new(
        rng.gen_range(0.0..40.0),
        rng.gen_range(0.0..40.0),
        rng.gen_range(0.0..40.0),
        rng.gen_range(0.0..2.0 * PI),
    )
}

pub fn random_point<R: Rng>(rng: &mut R) -> ProbePoint {
    ProbePoint::new(rng.gen_range(-50.0..50.0), rng.gen_range(-PI..PI))
}

pub fn random_decay<R: Rng>(rng: &mut R) -> DecayConfig {
    DecayConfig::new(1.0, rng.gen_range(0.0..2.0), 0.0)
}

/// `|a - b| / max(1, |a|, |b|)`.
pub fn deviation(a: Susceptibility, b: Susceptibility) -> f64 {
    let (a, b) = (a.to_complex(), b.to_complex());
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// Relative difference, falling back to absolute below `floor`.
pub fn rel_or_abs(a: Susceptibility, b: Susceptibility, floor: f64) -> f64 {
    let (a, b) = (a.to_complex(), b.to_complex());
    let scale = a.norm().max(b.norm());
    if scale < floor {
        (a - b).norm()
    } else {
        (a - b).norm() / scale
    }
}

/// Deviation of `value` from `reference`: relative, or absolute with bound
/// `1e-12` mapped onto the relative scale when `|reference| < 1e-13`.
///
/// Returns the deviation divided by its tolerance, so `<= 1` passes.
pub fn oracle_ratio(reference: Susceptibility, value: Susceptibility, rel_tol: f64) -> f64 {
    let (a, b) = (reference.to_complex(), value.to_complex());
    if a.norm() < 1e-13 {
        (a - b).norm() / 1e-12
    } else {
        (a - b).norm() / a.norm() / rel_tol
    }
}

/// Ridge points of a heatmap that lie farther than one grid cell from every
/// detuning branch of `case`. Ridge points are row-wise local maxima in
/// `kappa_x` at or above half the global maximum; flat rows are skipped.
///
/// Returns `(ridge points checked, misses)`.
pub fn ridge_misses(
    table: &atomloc_core::ProfileTable,
    case: atomloc_core::PhaseCase,
    drive: &DriveConfig,
) -> (usize, Vec<(f64, f64)>) {
    use atomloc_core::localization::branch_detuning;

    let req = &table.metadata.request;
    let range = req.delta_range.expect("heatmap request");
    let nx = req.x_count;
    let hx = (req.x_range.1 - req.x_range.0) / (nx - 1) as f64;
    let hd = (range.hi - range.lo) / (range.count - 1) as f64;
    let value = |k: usize| table.rows[k].value.map_or(f64::NAN, |v| v.chi_im);
    let global = (0..table.rows.len()).map(value).fold(0.0, f64::max);
    let ids: &[u8] = if case == atomloc_core::PhaseCase::HalfPi { &[1, 2] } else { &[1, 2, 3] };

    let mut checked = 0;
    let mut misses = Vec::new();
    for row in 0..range.count {
        // first and last columns are the same point of the period
        let period = nx - 1;
        let v: Vec<f64> = (0..period).map(|i| value(row * nx + i)).collect();
        let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        if hi - lo <= 1e-9 * hi {
            continue;
        }
        for i in 0..period {
            let (l, r) = (v[(i + period - 1) % period], v[(i + 1) % period]);
            if v[i] < 0.5 * global || v[i] < l || v[i] < r {
                continue;
            }
            checked += 1;
            let cell = table.rows[row * nx + i];
            let near = ids.iter().any(|&id| {
                (0..=64).any(|s| {
                    let x = cell.kappa_x - hx + 2.0 * hx * s as f64 / 64.0;
                    (branch_detuning(case, id, drive.omega1, drive.omega2, x) - cell.delta).abs() <= hd
                })
            });
            if !near {
                misses.push((cell.delta, cell.kappa_x));
            }
        }
    }
    (checked, misses)
}
